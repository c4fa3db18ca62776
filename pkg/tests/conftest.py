import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from finitepbg.core import Layer, UnitCell, quarter_wave_cell

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# first gap of the n1 = 1, n2 = 2 quarter-wave stack
QW12_LOWER_EDGE = float(np.arccos(-7 / 9) / np.pi)
QW12_RESONANCES = (0.18820486, 0.37392793, 0.55230117, 0.708034)


@pytest.fixture
def qw12():
    return quarter_wave_cell(1.0, 2.0)


indices = st.floats(1.0, 3.5)
thicknesses = st.floats(0.05, 1.5)
frequencies = st.floats(0.01, 3.0)


@st.composite
def unit_cells(draw, min_layers=2, max_layers=4):
    n = draw(st.integers(min_layers, max_layers))
    layers = tuple(Layer(draw(indices), draw(thicknesses)) for _ in range(n))
    return UnitCell(layers, ambient_index=draw(indices))


@st.composite
def symmetric_cells(draw):
    half = [Layer(draw(indices), draw(thicknesses)) for _ in range(draw(st.integers(1, 2)))]
    middle = [Layer(draw(indices), draw(thicknesses))] if draw(st.booleans()) else []
    return UnitCell(tuple(half + middle + half[::-1]), ambient_index=draw(indices))


# criterion number -> summary line, filled by test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
