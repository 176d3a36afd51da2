"""Tests for q⁻¹-Hermite polynomials and the coefficient families."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from app.core.exceptions import InvalidParameterError
from app.schemas.hermite import SignConvention
from app.schemas.params import MeasureKind, QParameters
from app.services import jacobi_service, qhermite_service

PARAMS = QParameters(q=2.0)
GRID = (0.0, 0.5, -0.5, 1.5, -1.5, 3.0, -3.0)


# ============== Evaluator Tests ==============


class TestHermiteEvaluators:
    """Tests for the explicit sum and the recurrence."""

    def test_low_degrees(self):
        """h_0 = 1, h_1 = 2x, h_2 = 4x² - (q - 1)."""
        x = 0.8
        for q in (1.5, 2.0, 3.0):
            params = QParameters(q=q)
            assert qhermite_service.h_poly_rec(0, x, params) == 1.0
            assert qhermite_service.h_poly_rec(1, x, params) == pytest.approx(2 * x)
            assert qhermite_service.h_poly_rec(2, x, params) == pytest.approx(4 * x**2 - (q - 1))
            assert qhermite_service.h_poly_sum(2, x, params) == pytest.approx(4 * x**2 - (q - 1), rel=1e-13)

    def test_degree_three(self):
        """h_3 = 8x³ - 2x(q - 1) - 2x(q² - 1)."""
        x, q = -1.1, 2.0
        expected = 8 * x**3 - 2 * x * (q - 1) - 2 * x * (q**2 - 1)
        assert qhermite_service.h_poly_sum(3, x, PARAMS) == pytest.approx(expected, rel=1e-13)
        assert qhermite_service.h_poly_rec(3, x, PARAMS) == pytest.approx(expected, rel=1e-13)

    @pytest.mark.parametrize("q", [1.5, 2.0])
    def test_sum_and_recurrence_agree(self, q):
        """Both evaluators agree to 1e-9 relative for n <= 12."""
        params = QParameters(q=q)
        for x in GRID:
            for n in range(qhermite_service.GATE_DEGREE + 1):
                by_sum = qhermite_service.h_poly_sum(n, x, params)
                by_rec = qhermite_service.h_poly_rec(n, x, params)
                assert abs(by_sum - by_rec) <= 1e-9 * max(abs(by_sum), 1.0)

    @given(st.floats(min_value=-4.0, max_value=4.0), st.integers(min_value=0, max_value=20))
    def test_parity(self, x, n):
        """h_n(-x) = (-1)^n h_n(x)."""
        family = qhermite_service.hermite_family(np.array([x, -x]), n, PARAMS)
        assert family.log_abs[0, n] == family.log_abs[1, n]
        if family.sign[0, n] != 0:
            assert family.sign[1, n] == (-1) ** n * family.sign[0, n]

    def test_large_degree_stays_finite_in_log_form(self):
        """h_400 at a large argument is representable through its log magnitude."""
        family = qhermite_service.hermite_family(1e6, 400, PARAMS)
        assert np.all(np.isfinite(family.log_abs))
        assert family.degree == 400

    def test_negative_degree(self):
        """n < 0 is rejected."""
        with pytest.raises(InvalidParameterError):
            qhermite_service.h_poly_sum(-1, 0.0, PARAMS)


# ============== Coefficient Family Tests ==============


class TestCoefficientFamilies:
    """Tests for P_n and P̃_n."""

    def test_first_coefficient_signs(self):
        """P_1(x) = -x verbatim, +x in the eigenvector convention, P̃_1(p) = ip."""
        x = 0.9
        assert qhermite_service.P_coeff(1, x, PARAMS) == pytest.approx(-x)
        eigen = qhermite_service.position_family(x, 1, PARAMS, SignConvention.EIGENVECTOR)
        assert eigen[1] == pytest.approx(x)
        assert qhermite_service.P_tilde_coeff(1, x, PARAMS) == pytest.approx(1j * x)

    def test_second_coefficient(self):
        """P_2(x) = (x² - 1)/sqrt(3) at q = 2."""
        for x in (0.0, 0.7, -2.0):
            assert qhermite_service.P_coeff(2, x, PARAMS) == pytest.approx((x**2 - 1) / math.sqrt(3.0), abs=1e-14)

    @pytest.mark.parametrize("q", [1.5, 2.0, 3.0])
    def test_eigenvector_convention_matches_jacobi_recurrence(self, q):
        """Eigenvector coefficients are the orthonormal polynomials of Q."""
        params = QParameters(q=q)
        J = jacobi_service.position_jacobi(params)
        for x in (0.3, -1.2, 2.5):
            family = qhermite_service.position_family(x, 15, params, SignConvention.EIGENVECTOR)
            p = jacobi_service.recurrence_polynomials(J, x, 15)
            assert np.allclose(family, p, rtol=1e-10, atol=1e-12)

    def test_momentum_phases(self):
        """P̃_n = i^n times the eigenvector-convention P_n."""
        p = 1.4
        momentum = qhermite_service.momentum_family(p, 10, PARAMS)
        position = qhermite_service.position_family(p, 10, PARAMS, SignConvention.EIGENVECTOR)
        assert np.allclose(momentum, (1j ** np.arange(11)) * position)

    def test_family_model(self):
        """CoefficientFamily reports degree and partial sums."""
        family = qhermite_service.coefficient_family(MeasureKind.POSITION, 0.5, 6, PARAMS)
        assert family.degree == 6
        assert family.convention == SignConvention.EIGENVECTOR
        sums = family.squared_partial_sums()
        assert sums[0] == 1.0
        assert np.all(np.diff(sums) >= 0)

    def test_normalizers(self):
        """c_n = q̆^{n(n+1)/4} (q̆;q̆)_n^{-1/2}: c_0 = 1, c_1 = 1/sqrt(q - 1)."""
        logs = qhermite_service.log_normalizers(3, PARAMS)
        assert logs[0] == 0.0
        assert math.exp(logs[1]) == pytest.approx(1.0 / math.sqrt(PARAMS.q - 1.0))
