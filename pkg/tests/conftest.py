import pytest

from nplab.dunkl import RootSystemSpec, WeightedMeasure
from nplab.heat import HeatKernel
from nplab.quad import QuadSpec


def make_kernel(kappa=0.0, dim=1):
    if dim == 1:
        spec = RootSystemSpec.z2(kappa) if kappa > 0 else RootSystemSpec.trivial(1)
    else:
        spec = RootSystemSpec.z2_product([kappa] * dim) if kappa > 0 else RootSystemSpec.trivial(dim)
    return HeatKernel(WeightedMeasure(spec))


@pytest.fixture(scope="session")
def k0():
    return make_kernel(0.0)


@pytest.fixture(scope="session")
def k_half():
    return make_kernel(0.5)


@pytest.fixture(scope="session")
def light_quad():
    """Cheaper rule for property sweeps; its declared tolerance matches what it achieves."""
    return QuadSpec(rtol=1e-4, nodes=16, t_panel=3.0, t_min=1e-10, t_max=1e8)


ACCEPTANCE_LINES: dict = {}


@pytest.fixture
def criterion():
    """Record one summary line per acceptance criterion."""
    def record(number, passed, detail):
        ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
