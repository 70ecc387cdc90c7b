import pathlib

import pytest

from hyperbolike import CayleyOracle, ExplicitOracle, FreeProductOracle, Presentation, QuasiTreeOracle, kb_complete
from hyperbolike.certify import VonDyckRepresentation, certify_normal_forms

CONFIGS = pathlib.Path(__file__).resolve().parent.parent / "configs"

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def f2():
    return FreeProductOracle(["inf", "inf"])


@pytest.fixture(scope="session")
def surface_presentation():
    return Presentation.from_file(CONFIGS / "genus2.pres")


@pytest.fixture(scope="session")
def genus2(surface_presentation):
    return CayleyOracle(kb_complete(surface_presentation))


@pytest.fixture(scope="session")
def triangle_presentation():
    return Presentation.from_file(CONFIGS / "triangle237.pres")


@pytest.fixture(scope="session")
def triangle_system(triangle_presentation):
    rs = kb_complete(triangle_presentation, max_len=30)
    L = certify_normal_forms(rs, VonDyckRepresentation(2, 3, 7), 31)
    return rs, L


@pytest.fixture(scope="session")
def t237(triangle_system):
    rs, L = triangle_system
    return CayleyOracle(rs, L)


@pytest.fixture(scope="session")
def quasitree():
    return QuasiTreeOracle(3)


@pytest.fixture(scope="session")
def cycle6():
    return ExplicitOracle.from_file(CONFIGS / "cycle6.graph")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
