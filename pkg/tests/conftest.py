from __future__ import annotations

from pathlib import Path

import pytest

from pivotc.parser import SourceUnit, parse

FIXTURES = Path(__file__).parent / "fixtures"


def load_unit(model_name: str, data_name: str | None = None) -> SourceUnit:
    model_path = FIXTURES / model_name
    data_text = None
    if data_name is not None:
        data_text = (FIXTURES / data_name).read_text()
    return SourceUnit(
        model_path.read_text(), data_text, model_name, data_name or "<data>"
    )


def parse_fixture(model_name: str, data_name: str | None = None):
    return parse(load_unit(model_name, data_name))


@pytest.fixture
def golfers():
    return parse_fixture("golfers.som", "golfers.dat")


@pytest.fixture
def golfers_small():
    return parse_fixture("golfers.som", "golfers_small.dat")


@pytest.fixture
def queens4():
    return parse_fixture("queens4.som")


ALL_FIXTURES = [
    ("golfers.som", "golfers.dat"),
    ("golfers.som", "golfers_small.dat"),
    ("queens4.som", None),
    ("queens5.som", None),
    ("queens6.som", None),
    ("send.som", None),
]
