import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import QW12_LOWER_EDGE, QW12_RESONANCES, frequencies, unit_cells
from finitepbg.bloch import (
    MAX_PERIODS,
    bloch_cos,
    chebyshev_pair,
    chebyshev_xi,
    chebyshev_xi_derivative,
    smrf_power,
    stack_amplitudes,
    stack_matrix,
    stack_transmission,
    transmission_resonances,
    xi_sequence,
)
from finitepbg.core import (
    TransferMatrix,
    amplitudes_from_matrix,
    cell_amplitudes,
    cell_matrix,
    quarter_wave_cell,
    qw_unit_amplitudes,
)
from finitepbg.errors import ChebyshevRangeError, DomainError
from finitepbg.oracle import direct_matrix_product


def rel_frobenius(a: TransferMatrix, b: TransferMatrix) -> float:
    a, b = a.to_array(), b.to_array()
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


class TestBlochCos:
    def test_free(self):
        out = bloch_cos(1.0)
        assert out.x == 1.0 and not out.in_gap

    def test_midgap(self):
        out = bloch_cos(-0.8)
        assert out.x == pytest.approx(-1.25) and out.in_gap

    def test_long_wavelength(self):
        assert bloch_cos(qw_unit_amplitudes(1, 2, 1e-6).t).x == pytest.approx(1.0, abs=1e-9)

    def test_zero(self):
        with pytest.raises(DomainError):
            bloch_cos(0.0)


class TestChebyshev:
    def test_order_one(self):
        p = chebyshev_pair(0.37, 1)
        assert (p.xi, p.theta) == (1.0, 0.37)

    def test_midgap_order_five(self):
        seq = xi_sequence(-1.25, 5)
        assert list(seq[2:]) == [1.0, -2.5, 5.25, -10.625, 21.3125]
        assert chebyshev_xi(-1.25, 5) == 21.3125

    @pytest.mark.parametrize("N", [0, 1, 2, 7, 30])
    def test_band_edge(self, N):
        p = chebyshev_pair(1.0, N)
        assert p.xi == N and p.theta == 1.0

    def test_negative_one(self):
        assert chebyshev_xi(0.3, -1) == -1.0

    def test_trig_form_in_band(self):
        beta = 0.83
        for N in range(0, 12):
            p = chebyshev_pair(np.cos(beta), N)
            assert p.xi == pytest.approx(np.sin(N * beta) / np.sin(beta), abs=1e-12)
            assert p.theta == pytest.approx(np.cos(N * beta), abs=1e-12)

    @given(st.floats(-3, 3), st.integers(0, 40))
    def test_pell_identity(self, x, N):
        p = chebyshev_pair(x, N)
        scale = max(1.0, p.theta**2)
        assert abs(p.theta**2 - (x * x - 1) * p.xi**2 - 1) <= 1e-10 * scale

    @given(st.floats(-2, 2), st.integers(1, 25))
    def test_derivative(self, x, N):
        h = 1e-6
        fd = (chebyshev_xi(x + h, N) - chebyshev_xi(x - h, N)) / (2 * h)
        assert chebyshev_xi_derivative(x, N) == pytest.approx(fd, rel=1e-5, abs=1e-5)

    def test_overflow(self):
        with pytest.raises(ChebyshevRangeError):
            chebyshev_xi(1e3, 5000)

    def test_order_cap(self):
        with pytest.raises(DomainError):
            chebyshev_xi(0.5, MAX_PERIODS + 1)
        with pytest.raises(DomainError):
            chebyshev_xi(0.5, -2)

    def test_vectorised(self):
        x = np.linspace(-1.5, 1.5, 7)
        assert np.allclose(chebyshev_xi(x, 6), [chebyshev_xi(v, 6) for v in x])


class TestSmrf:
    def test_order_one(self):
        m = cell_matrix(quarter_wave_cell(1, 2), 0.4)
        out = smrf_power(m, np.real(m.half_trace), 1)
        assert rel_frobenius(out, m) < 1e-15

    def test_order_two(self):
        m = cell_matrix(quarter_wave_cell(1, 2), 0.4)
        x = np.real(m.half_trace)
        assert rel_frobenius(smrf_power(m, x, 2), m @ m) < 1e-14
        assert rel_frobenius(smrf_power(m, x, 2), m.scale_add_identity(2 * x, -1)) < 1e-15

    def test_order_zero(self):
        m = cell_matrix(quarter_wave_cell(1, 2), 0.4)
        out = smrf_power(m, np.real(m.half_trace), 0)
        assert np.allclose(out.to_array(), np.eye(2))

    @given(unit_cells(), frequencies)
    def test_thirteen(self, cell, w):
        m = cell_matrix(cell, w)
        slow = m
        for _ in range(12):
            slow = slow @ m
        assert rel_frobenius(smrf_power(m, np.real(m.half_trace), 13), slow) < 1e-10

    @given(unit_cells(), frequencies, st.integers(1, 20))
    def test_matches_layer_product(self, cell, w, N):
        m = cell_matrix(cell, w)
        fast = smrf_power(m, bloch_cos(cell_amplitudes(cell, w).t).x, N)
        slow = direct_matrix_product(cell.stacked(N), w, cell.ambient_index)
        assert rel_frobenius(fast, slow) < 1e-10

    def test_trace_inconsistency(self):
        m = cell_matrix(quarter_wave_cell(1, 2), 0.4)
        with pytest.raises(DomainError):
            smrf_power(m, np.real(m.half_trace) + 1e-6, 3)


class TestStackAmplitudes:
    def test_single_period(self):
        s = qw_unit_amplitudes(1, 2, 0.3)
        out = stack_amplitudes(s.t, s.r, 1)
        assert out.t == pytest.approx(s.t) and out.r == pytest.approx(s.r)

    def test_midgap_five(self):
        out = stack_amplitudes(-0.8, qw_unit_amplitudes(1, 2, 1.0).r, 5)
        assert 1 / out.t == pytest.approx(-16.015625, rel=1e-14)
        assert out.T == pytest.approx(3.8986e-3, rel=1e-4)

    @given(unit_cells(), frequencies, st.integers(1, 30))
    def test_lossless(self, cell, w, N):
        s = cell_amplitudes(cell, w)
        out = stack_amplitudes(s.t, s.r, N)
        assert abs(out.T + out.R - 1) < 1e-10

    @given(unit_cells(), frequencies, st.integers(1, 20))
    def test_matches_matrix_power(self, cell, w, N):
        a = stack_transmission(cell, N, w)
        b = amplitudes_from_matrix(stack_matrix(cell, N, w))
        assert abs(a.t - b.t) < 1e-10 * max(1, abs(a.t)) and abs(a.r - b.r) < 1e-10

    def test_gap_decay(self):
        cell = quarter_wave_cell(1, 2)
        T = [stack_transmission(cell, N, 1.0).T for N in range(1, 15)]
        assert all(b < a for a, b in zip(T, T[1:]))


class TestResonances:
    def test_four_in_first_band(self):
        cell = quarter_wave_cell(1, 2)
        res = transmission_resonances(cell, 5, 1e-6, QW12_LOWER_EDGE)
        assert res == pytest.approx(QW12_RESONANCES, abs=1e-8)
        T = stack_transmission(cell, 5, res).T
        assert np.all(T >= 1 - 1e-8)

    @pytest.mark.parametrize("N", [2, 3, 8, 12])
    def test_count_is_n_minus_one(self, N):
        res = transmission_resonances(quarter_wave_cell(1, 2), N, 1e-6, QW12_LOWER_EDGE)
        assert len(res) == N - 1
