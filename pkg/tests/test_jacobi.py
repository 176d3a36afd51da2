"""Tests for Jacobi operators, truncated spectra and self-adjointness verdicts."""

import math

import numpy as np
import pytest

from app.core.exceptions import InvalidParameterError
from app.schemas.jacobi import JacobiOperator, Verdict
from app.schemas.params import QParameters
from app.services import jacobi_service

PARAMS = QParameters(q=2.0)


# ============== Recurrence Tests ==============


class TestRecurrence:
    """Tests for the orthonormal polynomials of a Jacobi matrix."""

    def test_first_polynomials(self):
        """p_0 = 1, p_1 = x for the q-oscillator position operator."""
        p = jacobi_service.recurrence_polynomials(jacobi_service.position_jacobi(PARAMS), 0.7, 3)
        assert p[0] == 1.0
        assert p[1] == pytest.approx(0.7)
        # a_1 p_2 = x p_1 - a_0 p_0 with a_0 = 1, a_1 = sqrt(3)
        assert p[2] == pytest.approx((0.7**2 - 1.0) / math.sqrt(3.0))

    def test_undeformed_is_hermite(self):
        """Undeformed p_3(x) = (x³ - 3x)/sqrt(6)."""
        x = 1.3
        p = jacobi_service.recurrence_polynomials(jacobi_service.undeformed_jacobi(), x, 3)
        assert p[3] == pytest.approx((x**3 - 3 * x) / math.sqrt(6.0), rel=1e-13)

    def test_zeros_of_undeformed(self):
        """Zeros of He_3 are 0 and ±sqrt(3)."""
        zeros = jacobi_service.recurrence_zeros(jacobi_service.undeformed_jacobi(), 3)
        assert np.allclose(zeros, [-math.sqrt(3.0), 0.0, math.sqrt(3.0)], atol=1e-12)

    def test_vanishing_off_diagonal_rejected(self):
        """a_n = 0 is not a Jacobi matrix."""
        J = JacobiOperator(a=lambda n: 0.0 if n == 2 else 1.0, b=lambda n: 0.0, label="broken")
        with pytest.raises(InvalidParameterError):
            jacobi_service.recurrence_polynomials(J, 0.5, 5)

    def test_scale_warning(self, caplog):
        """Values past 1e100 are reported, not raised."""
        J = JacobiOperator(a=lambda n: 1e-3, b=lambda n: 0.0, label="tiny")
        with caplog.at_level("WARNING"):
            p = jacobi_service.recurrence_polynomials(J, 1.0, 40)
        assert np.all(np.isfinite(p))
        assert "exceed" in caplog.text


# ============== Spectrum Tests ==============


class TestTruncatedSpectrum:
    """Tests for eigenpairs of the leading block."""

    @pytest.mark.parametrize("N", [1, 2, 5, 12, 25])
    def test_eigenvalues_are_recurrence_zeros(self, N):
        """Eigenvalues of the N block are the zeros of p_N."""
        J = jacobi_service.position_jacobi(PARAMS)
        decomposition = jacobi_service.truncated_eigendecomposition(J, N)
        zeros = jacobi_service.recurrence_zeros(J, N)
        scale = max(1.0, float(np.abs(decomposition.eigenvalues).max()))
        assert np.abs(np.sort(zeros) - decomposition.eigenvalues).max() <= 1e-9 * scale

    @pytest.mark.parametrize("N", range(1, 21))
    def test_consecutive_truncations_interlace(self, N):
        """Eigenvalues of the N and N+1 blocks alternate strictly."""
        J = jacobi_service.position_jacobi(PARAMS)
        small = jacobi_service.truncated_eigendecomposition(J, N).eigenvalues
        large = jacobi_service.truncated_eigendecomposition(J, N + 1).eigenvalues
        assert np.all(large[:-1] < small)
        assert np.all(small < large[1:])

    def test_two_by_two(self):
        """[[0, 1], [1, 0]] has eigenvalues ±1."""
        decomposition = jacobi_service.truncated_eigendecomposition(jacobi_service.position_jacobi(PARAMS), 2)
        assert np.allclose(decomposition.eigenvalues, [-1.0, 1.0])

    def test_eigenvectors_are_polynomial_values(self):
        """The eigenvector of λ is proportional to (p_0(λ), ..., p_{N-1}(λ))."""
        J = jacobi_service.position_jacobi(PARAMS)
        N = 8
        decomposition = jacobi_service.truncated_eigendecomposition(J, N)
        for k, value in enumerate(decomposition.eigenvalues):
            p = jacobi_service.recurrence_polynomials(J, value, N - 1)
            p = p / np.linalg.norm(p)
            vector = decomposition.eigenvectors[:, k]
            assert abs(abs(np.dot(p, vector)) - 1.0) < 1e-8

    def test_residual_recorded(self):
        """The residual of the returned eigenpairs is tiny."""
        decomposition = jacobi_service.truncated_eigendecomposition(jacobi_service.undeformed_jacobi(), 30)
        assert decomposition.max_residual < 1e-10 * float(np.abs(decomposition.eigenvalues).max())

    def test_invalid_size(self):
        """N < 1 is rejected."""
        with pytest.raises(InvalidParameterError):
            jacobi_service.truncated_eigendecomposition(jacobi_service.undeformed_jacobi(), 0)


# ============== Verdict Tests ==============


class TestSelfAdjointness:
    """Tests for the finite-probe verdicts."""

    def test_q_above_one_not_self_adjoint(self):
        """Position operator at q = 2 has deficiency indices (1, 1)."""
        result = jacobi_service.self_adjointness_verdict(jacobi_service.position_jacobi(PARAMS))
        assert result.verdict == Verdict.NOT_SELF_ADJOINT
        assert result.evidence.reciprocal_tail_bound is not None
        assert result.evidence.log_convex_from is not None

    def test_momentum_not_self_adjoint(self):
        """Momentum operator shares the verdict of the position operator."""
        result = jacobi_service.self_adjointness_verdict(jacobi_service.momentum_jacobi(PARAMS))
        assert result.verdict == Verdict.NOT_SELF_ADJOINT

    def test_q_below_one_bounded(self):
        """At q = 0.5 the coefficients are bounded."""
        params = QParameters.relaxed_q(0.5)
        result = jacobi_service.self_adjointness_verdict(jacobi_service.position_jacobi(params))
        assert result.verdict == Verdict.SELF_ADJOINT_BOUNDED
        assert result.evidence.sup_bound == pytest.approx(math.sqrt(2.0), rel=1e-6)

    @pytest.mark.parametrize("q", [1.5, 2.0, 3.0, 10.0])
    def test_verdict_above_one(self, q):
        """Every q > 1 gives a position operator that is not self-adjoint."""
        result = jacobi_service.self_adjointness_verdict(jacobi_service.position_jacobi(QParameters(q=q)))
        assert result.verdict == Verdict.NOT_SELF_ADJOINT

    @pytest.mark.parametrize("q", [0.3, 0.5, 0.9])
    def test_verdict_below_one(self, q):
        """Every 0 < q < 1 gives bounded coefficients."""
        params = QParameters.relaxed_q(q)
        result = jacobi_service.self_adjointness_verdict(jacobi_service.position_jacobi(params))
        assert result.verdict == Verdict.SELF_ADJOINT_BOUNDED

    def test_undeformed_carleman(self):
        """a_n = sqrt(n+1): Σ 1/a_n diverges."""
        result = jacobi_service.self_adjointness_verdict(jacobi_service.undeformed_jacobi())
        assert result.verdict == Verdict.SELF_ADJOINT_CARLEMAN
        assert result.evidence.partial_sum_slope > 0

    def test_probe_too_short(self):
        """N_probe below the minimum is rejected."""
        with pytest.raises(InvalidParameterError):
            jacobi_service.self_adjointness_verdict(jacobi_service.undeformed_jacobi(), N_probe=8)
