import math

import pytest

from pkm_synth import Architecture, synthesize
from pkm_synth.mechanism import MechanismDesign

# exact normalised base lengths for the three presets (L = 1)
L0_EXACT = {
    Architecture.BIGLIDE1: 2.0 * math.sqrt(18.0 / 19.0),
    Architecture.BIGLIDE2: 2.0 / math.sqrt(19.0),
    Architecture.ORTHOGLIDE: 10.0 / math.sqrt(26.0),
}


@pytest.fixture(scope="session")
def synthesized():
    return {arch: synthesize(arch) for arch in Architecture}


@pytest.fixture
def biglide1_unit():
    """Biglide1 with L0=2, L=sqrt(2): P=(1,1) at rho=(0,0)."""
    return MechanismDesign(0.0, math.pi, 2.0, math.sqrt(2.0), 1.0)


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE = {}


def record(criterion, ok, detail):
    ACCEPTANCE[criterion] = (bool(ok), detail)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
