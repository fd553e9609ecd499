"""pivotc: a constraint-model compiler built around a rewritable pivot IR.

Frontend (object-oriented modeling language) -> pivot model -> rewriting
passes -> structured CLP text or a flat constraint list, with a brute-force
enumerator as the semantic ground truth for the rewrites.
"""

from .clp import ClpEmitOptions, emit_clp
from .errors import CompileError, Diagnostic, Loc, ParseError
from .flat import FlatProgram, FlatVar, emit_flat, lower_to_flat
from .ir import Model, model_equals
from .oracle import (
    Assignment,
    SolutionSet,
    compare_solutions,
    enumerate_solutions,
    parse_flat,
)
from .parser import SourceUnit, parse, parse_expression
from .passes import (
    PassConfig,
    PassReport,
    alldiff_rewrite,
    alldiff_to_boolean,
    alldiff_to_disequalities,
    alldiff_to_relaxation,
    enum_remove,
    fold_constants,
    loop_unroll,
    object_flatten,
    run_pipeline,
)
from .printer import print_expression, print_pivot
from .sema import Scope, infer_type, resolve, validate

__version__ = "0.1.0"

__all__ = [
    "Assignment", "ClpEmitOptions", "CompileError", "Diagnostic",
    "FlatProgram", "FlatVar", "Loc", "Model", "ParseError", "PassConfig",
    "PassReport", "Scope", "SolutionSet", "SourceUnit", "__version__",
    "alldiff_rewrite", "alldiff_to_boolean", "alldiff_to_disequalities",
    "alldiff_to_relaxation", "compare_solutions", "emit_clp", "emit_flat",
    "enum_remove", "enumerate_solutions", "fold_constants", "infer_type",
    "loop_unroll", "lower_to_flat", "model_equals", "object_flatten",
    "parse", "parse_expression", "parse_flat", "print_expression",
    "print_pivot", "resolve", "run_pipeline", "validate",
]
