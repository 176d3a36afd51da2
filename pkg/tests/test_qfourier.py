"""Tests for the discrete q-Fourier transform."""

import numpy as np
import pytest

from app.core.exceptions import (
    InvalidParameterError,
    NonConvergenceError,
    TransformValidationError,
    WindowMismatchError,
)
from app.schemas.fock import FockVector
from app.schemas.params import ExtremalMeasure, MeasureKind, QParameters, SpectralWindow, Tolerance
from app.services import qfourier_service, spectra_service

PARAMS = QParameters(q=2.0)
B, B_PRIME = 0.5, 0.7
SUPPORT = 4


@pytest.fixture(scope="module")
def transform():
    window = SpectralWindow.symmetric(qfourier_service.unitarity_margin(PARAMS) + 2 * SUPPORT)
    return qfourier_service.build_transform(B_PRIME, B, PARAMS, window)


def random_momentum_grid(M, seed: int = 3):
    """Unit-norm input supported on [-SUPPORT, SUPPORT]."""
    rng = np.random.default_rng(seed)
    amplitudes = np.zeros(M.window.size, dtype=complex)
    support = [M.window.position_of(r) for r in range(-SUPPORT, SUPPORT + 1)]
    amplitudes[support] = rng.normal(size=len(support)) + 1j * rng.normal(size=len(support))
    amplitudes /= np.linalg.norm(amplitudes)
    momentum = ExtremalMeasure(params=PARAMS, b=B_PRIME, kind=MeasureKind.MOMENTUM)
    return spectra_service.grid_function(momentum, M.window, amplitudes * np.exp(-0.5 * M.log_weights_prime))


# ============== Entry Tests ==============


class TestEntries:
    """Tests for single matrix entries."""

    @pytest.mark.parametrize(
        "q, b, b_prime",
        [
            (2.0, 0.5, 0.5),
            (2.0, 0.5, 0.7),
            (2.0, 0.7, 0.5),
            (2.0, 0.7, 0.7),
            (1.5, 0.7, 0.9),
            (1.5, 0.9, 0.7),
        ],
    )
    def test_product_equals_series(self, q, b, b_prime):
        """Closed product and partial sum agree to 1e-7 on [-6, 6]²."""
        params = QParameters(q=q)
        rng = np.random.default_rng(11)
        for r_prime, r in rng.integers(-6, 7, size=(25, 2)):
            product = qfourier_service.transform_entry_product(int(r_prime), int(r), b_prime, b, params)
            series = qfourier_service.transform_entry_series(int(r_prime), int(r), b_prime, b, params).value
            assert abs(product - series) <= 1e-7 * abs(series)

    def test_log_entry_matches_matrix(self, transform):
        """transform_entry_log gives the unitary core entry."""
        for r_prime, r in [(0, 0), (-3, 2), (4, -5)]:
            entry = qfourier_service.transform_entry_log(r_prime, r, B_PRIME, B, PARAMS).value
            i, j = transform.window.position_of(r_prime), transform.window.position_of(r)
            assert entry == pytest.approx(transform.t_entries[i, j], rel=1e-10, abs=1e-300)

    def test_margin(self):
        """q = 2 needs 23 sites between an interior band and the edge."""
        assert qfourier_service.unitarity_margin(PARAMS) == 23


# ============== Matrix Tests ==============


class TestBuildTransform:
    """Tests for the matrix and its validation."""

    def test_interior_unitarity(self, transform):
        """Interior columns and rows of T have unit norm to 1e-6."""
        assert transform.interior_columns
        assert transform.unitarity_deviation is not None
        assert transform.unitarity_deviation <= 1e-6
        rows = [transform.window.position_of(r) for r in transform.interior_rows]
        assert np.abs(transform.row_norms[rows] - 1.0).max() <= 1e-6

    def test_spot_checks_recorded(self, transform):
        """The default spot checks ran and passed."""
        assert len(transform.spot_checks) == 9
        assert transform.worst_spot_check < qfourier_service.SPOT_CHECK_TOL

    def test_core_and_kernel_relation(self, transform):
        """F = (m_r'/m_r)^{1/2} T where both are finite."""
        i, j = transform.window.position_of(1), transform.window.position_of(-1)
        ratio = np.exp(0.5 * (transform.log_weights_prime[i] - transform.log_weights[j]))
        assert transform.entries[i, j] == pytest.approx(ratio * transform.t_entries[i, j], rel=1e-12)

    def test_small_window_has_no_interior(self):
        """A narrow window builds but asserts nothing about unitarity."""
        M = qfourier_service.build_transform(B_PRIME, B, PARAMS, SpectralWindow.symmetric(3), spot_checks=2)
        assert M.interior_columns == []
        assert M.unitarity_deviation is None

    def test_truncated_series_fails_validation(self):
        """Spot checks against a four-term series reject the matrix."""
        with pytest.raises(TransformValidationError):
            qfourier_service.build_transform(B_PRIME, B, PARAMS, SpectralWindow.symmetric(4), series_terms=3)

    def test_product_truncation_raises(self):
        """Products that cannot reach tail_eps within max_terms are an error."""
        with pytest.raises(NonConvergenceError):
            qfourier_service.build_transform(
                B_PRIME, B, PARAMS, SpectralWindow.symmetric(2), Tolerance(max_terms=8), spot_checks=0
            )

    @pytest.mark.parametrize("threads", [2, 3, 4])
    def test_threads_do_not_change_result(self, threads):
        """Row-block parallel fill gives a bit-identical matrix."""
        window = SpectralWindow.symmetric(12)
        single = qfourier_service.build_transform(B_PRIME, B, PARAMS, window, spot_checks=0, threads=1)
        parallel = qfourier_service.build_transform(B_PRIME, B, PARAMS, window, spot_checks=0, threads=threads)
        assert np.array_equal(parallel.t_entries, single.t_entries)
        assert np.array_equal(parallel.entries, single.entries, equal_nan=True)


# ============== Action Tests ==============


class TestApplyTransform:
    """Tests for Plancherel and round trips."""

    def test_plancherel(self, transform):
        """The weighted norm is preserved to 1e-7."""
        Fhat = random_momentum_grid(transform)
        F = qfourier_service.apply_transform(transform, Fhat)
        assert abs(F.weighted_norm - Fhat.weighted_norm) < 1e-7

    @pytest.mark.parametrize("seed", [0, 5, 9])
    def test_round_trip(self, transform, seed):
        """inverse(transform(F̂)) = F̂ to 1e-6 on the interior rows."""
        Fhat = random_momentum_grid(transform, seed=seed)
        assert qfourier_service.round_trip_deviation(transform, Fhat) < 1e-6

    @pytest.mark.parametrize("n", range(11))
    def test_transform_maps_momentum_basis_to_position_basis(self, transform, n):
        """transform(Ω'|n>) = Ω|n> on the whole window."""
        v = FockVector.basis(n, 10)
        position = ExtremalMeasure(params=PARAMS, b=B)
        momentum = ExtremalMeasure(params=PARAMS, b=B_PRIME, kind=MeasureKind.MOMENTUM)
        Fhat = spectra_service.isometry_omega(v, momentum, transform.window)
        F = spectra_service.isometry_omega(v, position, transform.window)
        transformed = qfourier_service.apply_transform(transform, Fhat)
        assert np.linalg.norm(transformed.amplitudes - F.amplitudes) < 1e-6

    def test_round_trip_without_interior(self):
        """A window with no interior rows has nothing to compare."""
        M = qfourier_service.build_transform(B_PRIME, B, PARAMS, SpectralWindow.symmetric(4), spot_checks=0)
        momentum = ExtremalMeasure(params=PARAMS, b=B_PRIME, kind=MeasureKind.MOMENTUM)
        grid = spectra_service.grid_function(momentum, M.window, np.ones(M.window.size))
        with pytest.raises(InvalidParameterError):
            qfourier_service.round_trip_deviation(M, grid)

    def test_window_mismatch(self, transform):
        """A grid on another window is rejected."""
        momentum = ExtremalMeasure(params=PARAMS, b=B_PRIME, kind=MeasureKind.MOMENTUM)
        window = SpectralWindow.symmetric(5)
        grid = spectra_service.grid_function(momentum, window, np.ones(window.size))
        with pytest.raises(WindowMismatchError):
            qfourier_service.apply_transform(transform, grid)

    def test_wrong_extension(self, transform):
        """A coordinate grid of another b is rejected by the inverse."""
        other = ExtremalMeasure(params=PARAMS, b=0.6)
        grid = spectra_service.grid_function(other, transform.window, np.zeros(transform.window.size))
        with pytest.raises(WindowMismatchError):
            qfourier_service.apply_inverse(transform, grid)


# ============== Export Tests ==============


class TestMatrixDocument:
    """Tests for the transform document."""

    def test_document_shape(self):
        """One entry per (r', r) with the schema header fields."""
        M = qfourier_service.build_transform(B_PRIME, B, PARAMS, SpectralWindow.symmetric(2), spot_checks=1)
        document = qfourier_service.matrix_document(M, core=True)
        assert document.schema_version == "1"
        assert document.command == "transform"
        assert document.matrix == "T"
        assert len(document.entries) == 25
        assert document.window == (-2, 2)
