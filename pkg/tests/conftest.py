import pathlib

import pytest

from c2ka import specfile

REPO = pathlib.Path(__file__).resolve().parent.parent
FIXTURE = REPO / "fixtures" / "port_terminal.c2ka"
DATA = pathlib.Path(__file__).resolve().parent / "data"


@pytest.fixture(scope="session")
def fixture_text() -> str:
    return FIXTURE.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def port(fixture_text) -> specfile.SystemModel:
    """The compiled port-terminal system."""
    return specfile.compile_text(fixture_text)
