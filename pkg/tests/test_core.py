import numpy as np
import pytest
from hypothesis import given

from conftest import frequencies, indices, symmetric_cells, unit_cells
from finitepbg.core import (
    Layer,
    ScatterAmplitudes,
    TransferMatrix,
    UnitCell,
    amplitudes_from_matrix,
    cell_amplitudes,
    cell_matrix,
    double_boundary,
    fresnel,
    matrix_from_amplitudes,
    quarter_wave_cell,
    qw_unit_amplitudes,
)
from finitepbg.errors import DomainError, SingularMatrixError


class TestFresnel:
    def test_one_two(self):
        assert fresnel(1, 2) == pytest.approx((2 / 3, 1 / 3), abs=1e-15)

    def test_no_interface(self):
        assert fresnel(1.7, 1.7) == (1.0, 0.0)

    def test_two_one(self):
        assert fresnel(2, 1) == pytest.approx((4 / 3, -1 / 3), abs=1e-15)

    @pytest.mark.parametrize("bad", [0.0, -1.0, np.nan, np.inf])
    def test_rejects_bad_index(self, bad):
        with pytest.raises(DomainError):
            fresnel(bad, 1.0)

    @given(indices, indices)
    def test_antisymmetric(self, a, b):
        assert fresnel(a, b)[1] == -fresnel(b, a)[1]


class TestDoubleBoundary:
    def test_one_two(self):
        assert double_boundary(1, 2) == pytest.approx((8 / 9, 1 / 9), abs=1e-15)

    def test_no_interface(self):
        assert double_boundary(2.2, 2.2) == pytest.approx((1.0, 0.0))

    @given(indices, indices)
    def test_sum_is_one(self, a, b):
        T, R = double_boundary(a, b)
        assert T + R == pytest.approx(1.0, abs=1e-15)


class TestQuarterWaveAmplitudes:
    def test_midgap(self):
        s = qw_unit_amplitudes(1, 2, 1.0)
        assert s.t == pytest.approx(-0.8, abs=1e-15)
        assert s.T == pytest.approx(0.64, abs=1e-15)

    def test_homogeneous(self):
        s = qw_unit_amplitudes(1.5, 1.5, np.linspace(0.1, 3, 7))
        assert np.allclose(np.abs(s.t), 1.0)
        assert np.allclose(s.r, 0.0)

    def test_lossless_half(self):
        s = qw_unit_amplitudes(1, 2, 0.5)
        assert s.T + s.R == pytest.approx(1.0, abs=1e-14)

    @given(indices, indices, frequencies)
    def test_matches_layer_product(self, n1, n2, w):
        closed = qw_unit_amplitudes(n1, n2, w)
        brute = cell_amplitudes(quarter_wave_cell(n1, n2), w)
        assert abs(closed.t - brute.t) < 1e-10
        assert abs(closed.r - brute.r) < 1e-10

    def test_alternative_reflection_phase_rejected(self):
        # a reflection numerator r12 (e^{2i pi w} - 1) fails the layer-product check
        w = np.linspace(0.05, 1.95, 101)
        T12, R12 = double_boundary(1, 2)
        r12 = fresnel(1, 2)[1]
        e = np.exp(1j * np.pi * w)
        alt = r12 * (e**2 - 1) / (1 - R12 * e)
        brute = cell_amplitudes(quarter_wave_cell(1, 2), w).r
        assert np.max(np.abs(alt - brute)) > 0.1

    def test_doubled_phase_denominator_rejected(self):
        # t = T12 e / (1 - R12 e^2) misses the layer product away from midgap
        w = np.linspace(0.05, 1.95, 101)
        T12, R12 = double_boundary(1, 2)
        e = np.exp(1j * np.pi * w)
        alt = T12 * e / (1 - R12 * e**2)
        brute = cell_amplitudes(quarter_wave_cell(1, 2), w).t
        assert np.max(np.abs(alt - brute)) > 0.05
        # at midgap it gives -1; the -0.8 value needs the single-phase denominator 1 + R12
        assert T12 * -1 / (1 - R12) == pytest.approx(-1.0)
        assert T12 * -1 / (1 + R12) == pytest.approx(-0.8)


class TestCells:
    def test_layer_validation(self):
        with pytest.raises(DomainError):
            Layer(1.0, 0.0)
        with pytest.raises(DomainError):
            Layer(-1.0, 1.0)
        with pytest.raises(DomainError):
            UnitCell(())

    def test_quarter_wave_geometry(self):
        cell = quarter_wave_cell(1, 2)
        assert cell.length == pytest.approx(np.pi / 2 * 1.5)
        assert cell.ambient_index == 1
        assert cell.thicknesses[0] * 1 == pytest.approx(cell.thicknesses[1] * 2)

    def test_single_layer_is_pure_phase(self):
        n, L = 1.7, 0.9
        s = cell_amplitudes(UnitCell((Layer(n, L),), ambient_index=n), 1.3)
        assert s.t == pytest.approx(np.exp(1j * n * 1.3 * L), abs=1e-14)
        assert abs(s.r) < 1e-15

    def test_layer_index_at(self):
        cell = quarter_wave_cell(1, 2)
        assert cell.layer_index_at(0.0) == 0
        assert cell.layer_index_at(cell.length) == 1
        with pytest.raises(DomainError):
            cell.layer_index_at(-0.1)

    @given(unit_cells(), frequencies)
    def test_lossless(self, cell, w):
        s = cell_amplitudes(cell, w)
        assert s.T + s.R == pytest.approx(1.0, abs=1e-12)

    @given(unit_cells(), frequencies)
    def test_unit_determinant(self, cell, w):
        m = cell_matrix(cell, w)
        assert abs(m.det - 1) < 1e-12

    @given(unit_cells(), frequencies)
    def test_time_reversal_form(self, cell, w):
        m = cell_matrix(cell, w)
        assert abs(m.m11 - np.conj(m.m22)) < 1e-10 * abs(m.m11)
        assert abs(m.m21 - np.conj(m.m12)) < 1e-10 * max(abs(m.m11), 1)

    @given(symmetric_cells(), frequencies)
    def test_symmetric_cell_phase(self, cell, w):
        s = cell_amplitudes(cell, w)
        if s.R < 1e-12:
            return
        diff = np.angle(np.exp(1j * (s.phi - s.psi)))
        assert min(abs(diff - np.pi / 2), abs(diff + np.pi / 2)) < 1e-9


class TestMatrixForm:
    def test_identity(self):
        m = matrix_from_amplitudes(ScatterAmplitudes(1.0, 0.0))
        assert np.allclose(m.to_array(), np.eye(2))

    def test_midgap_determinant(self):
        m = matrix_from_amplitudes(qw_unit_amplitudes(1, 2, 1.0))
        assert m.det == pytest.approx(1.0, abs=1e-14)

    def test_maps_right_to_left(self):
        s = qw_unit_amplitudes(1, 2, 0.37)
        lam = matrix_from_amplitudes(s).apply((s.t, 0.0))
        assert lam[0] == pytest.approx(1.0, abs=1e-14)
        assert lam[1] == pytest.approx(s.r, abs=1e-14)

    @given(unit_cells(), frequencies)
    def test_round_trip(self, cell, w):
        s = cell_amplitudes(cell, w)
        back = amplitudes_from_matrix(matrix_from_amplitudes(s))
        assert abs(back.t - s.t) < 1e-12 and abs(back.r - s.r) < 1e-12

    def test_zero_transmission(self):
        with pytest.raises(SingularMatrixError):
            matrix_from_amplitudes(ScatterAmplitudes(0.0, 1.0))

    def test_broadcast_product(self):
        a = TransferMatrix.from_array(np.random.default_rng(0).normal(size=(5, 2, 2)))
        b = a @ a.inverse()
        assert np.allclose(b.to_array(), np.broadcast_to(np.eye(2), (5, 2, 2)))
