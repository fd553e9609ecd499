import re

import pytest

from pivotc import ir
from pivotc.clp import ClpEmitOptions, emit_clp
from pivotc.errors import UnsupportedElementError
from pivotc.flat import lower_to_flat
from pivotc.parser import SourceUnit, parse
from pivotc.passes import PassConfig, run_pipeline

from conftest import parse_fixture

GOLFERS_CFG = PassConfig(("objectFlatten", "enumRemove", "foldConstants"))


def _golfers_clp():
    m = parse_fixture("golfers.som", "golfers.dat")
    out, _ = run_pipeline(m, GOLFERS_CFG)
    return out, emit_clp(out)


def _block(text: str, zone: str) -> str:
    lines = text.splitlines()
    start = next(i for i, l in enumerate(lines) if l.strip() == f"% {zone}")
    end = len(lines)
    for j in range(start + 1, len(lines)):
        if lines[j].strip().startswith("%") or lines[j].strip() == "label_sets(L).":
            end = j
            break
    return "\n".join(lines[start:end])


def test_golfers_intsets_line_exact():
    _, text = _golfers_clp()
    assert "intsets(WEEKSCHED_GROUPSCHED_PLAYERS,12,1,9)" in text


def test_golfers_different_groups_has_four_nested_loops():
    _, text = _golfers_clp()
    block = _block(text, "differentGroups")
    assert block.count("(for(") == 4
    # and they are genuinely nested: indentation strictly increases
    indents = [len(l) - len(l.lstrip()) for l in block.splitlines() if "(for(" in l]
    assert indents == sorted(indents) and len(set(indents)) == 4


def test_golfers_head_and_label():
    _, text = _golfers_clp()
    assert text.startswith("socialGolfers(L):-\n")
    assert text.rstrip().endswith("label_sets(L).")


def test_minimal_model_three_domains_one_goal():
    m = parse(SourceUnit(
        "model Tiny;\nint x in 1..3;\nint y in 1..3;\nint z in 1..3;\n"
        "constraint c { x + y = z; }"
    ))
    text = emit_clp(m)
    assert text.count(" :: 1..3") == 3
    assert " X+Y $= Z," in text
    assert "L = [X,Y,Z]" in text


def test_class_is_unsupported(golfers):
    with pytest.raises(UnsupportedElementError):
        emit_clp(golfers)


def test_real_variable_unsupported():
    m = parse(SourceUnit("model R;\nreal x in 1..2;"))
    with pytest.raises(UnsupportedElementError):
        emit_clp(m)


def test_balanced_parens_and_single_final_period():
    _, text = _golfers_clp()
    assert text.count("(") == text.count(")")
    body = text.rstrip()
    assert body.endswith(".") and not body.endswith("..")
    assert all(not l.rstrip().endswith(".") for l in body.splitlines()[:-1])


def test_deterministic_emission():
    _, a = _golfers_clp()
    _, b = _golfers_clp()
    assert a == b


def test_fresh_variables_numbered_in_emission_order():
    _, text = _golfers_clp()
    fresh = re.findall(r"\bV(\d+)\b", text)
    seen = []
    for n in fresh:
        if n not in seen:
            seen.append(n)
    assert seen == [str(i) for i in range(1, len(seen) + 1)]


def test_param_lists_match_scope_analysis():
    """Every name used in a loop body and defined outside appears in the
    loop's param list (re-scан of the emitted text against the model)."""
    model, text = _golfers_clp()
    decl_names = {
        e.name.upper()
        for e in model.elements
        if isinstance(e, (ir.Variable, ir.Constant))
    }
    loop_re = re.compile(r"\(for\(([A-Z][A-Za-z0-9_]*),.*?\)(?:,param\(([^)]*)\))? do")
    lines = text.splitlines()
    stack: list[tuple[int, str, set[str]]] = []  # (indent, iterator, params)
    for line in lines:
        indent = len(line) - len(line.lstrip())
        while stack and indent <= stack[-1][0]:
            stack.pop()
        m = loop_re.search(line)
        if m:
            params = set((m.group(2) or "").split(",")) - {""}
            outer_iters = {it for _, it, _ in stack}
            # body names defined outside: declared names or outer iterators
            stack.append((indent, m.group(1), params))
            continue
        if not stack:
            continue
        used = set(re.findall(r"\b[A-Z][A-Za-z0-9_]*\b", line))
        outside = {
            n for n in used
            if n in decl_names or any(n == it for _, it, _ in stack[:-1])
        }
        innermost_params = stack[-1][2]
        missing = outside - innermost_params
        assert not missing, f"params missing {missing} in line: {line}"


def test_structured_statements_not_more_than_flat_constraints():
    for name, data in (("golfers.som", "golfers.dat"), ("queens4.som", None)):
        m = parse_fixture(name, data)
        structured, _ = run_pipeline(m, GOLFERS_CFG)
        stmt_count = sum(
            len(e.body)
            for e in structured.elements
            if isinstance(e, ir.ConstraintZone)
        )
        full, _ = run_pipeline(
            m,
            PassConfig(
                ("objectFlatten", "enumRemove", "foldConstants", "alldiffRewrite", "loopUnroll")
            ),
        )
        flat = lower_to_flat(full)
        assert stmt_count <= len(flat.constraints)


def test_custom_predicate_name_and_no_label():
    m = parse(SourceUnit("model Tiny;\nint x in 1..2;\nconstraint c { x = 1; }"))
    text = emit_clp(m, ClpEmitOptions(predicate_name="probe", label_sets=False))
    assert text.startswith("probe(L):-")
    assert "label_sets" not in text
    assert text.rstrip().endswith("X $= 1.")


def test_invalid_predicate_name_rejected():
    m = parse(SourceUnit("model Tiny;\nint x in 1..2;"))
    with pytest.raises(UnsupportedElementError):
        emit_clp(m, ClpEmitOptions(predicate_name="NotAnAtom"))


def test_queens_clp_shape():
    m = parse_fixture("queens4.som")
    out, _ = run_pipeline(m, GOLFERS_CFG)
    text = emit_clp(out)
    assert "length(Q,4)" in text
    assert "Q :: 1..4" in text
    assert "alldifferent([" in text
    # indexed accesses go through nth
    assert text.count("nth(") >= 4


def test_if_statement_emission():
    m = parse(SourceUnit(
        "model C;\nint x in 1..3;\nint y in 1..3;\n"
        "constraint z { if (x = 1) { y = 2; } else { y = 3; } }"
    ))
    text = emit_clp(m)
    assert "( (X $= 1) ->" in text
    assert ";" in text


def test_alldifferent_param_lookup_through_nth():
    m = parse(SourceUnit(
        "model A;\nint q[2] in 1..2;\nconstraint c { alldifferent(q[1], q[2]); }"
    ))
    text = emit_clp(m)
    assert "nth(V1,1,Q)" in text
    assert "nth(V2,2,Q)" in text
    assert "alldifferent([V1,V2])" in text


def test_empty_zone_emits_true_goal():
    m = parse(SourceUnit("model Z;\nint x in 1..2;\nconstraint empty { }"))
    text = emit_clp(m)
    assert "% empty" in text
    assert "true," in text
    assert text.rstrip().endswith("label_sets(L).")
    assert text.count("(") == text.count(")")


def test_connectives_and_set_literals_emit():
    m = parse(SourceUnit(
        "model K;\nint x in 1..3;\nint set s in 1..3;\n"
        "constraint z { x = 1 or x = 3; card(s union {1,2}) >= 2; }"
    ))
    text = emit_clp(m)
    assert "((X $= 1) or (X $= 3))" in text
    assert "#(S \\/ [1,2], V1)" in text
    assert "V1 $>= 2" in text
