"""
Tests for the angle-measure polynomials, the Hoggar test and regular schemes.
"""

from fractions import Fraction
import math

import numpy as np
import pytest
from scipy.special import eval_jacobi

from designlab.algebra.hilbert import Configuration, FieldTag
from designlab.analytics.designs import mub_family, onb, potential, welch_bound
from designlab.analytics.moments import c_t, c_t_exact
from designlab.analytics.projective import (
    RegularScheme,
    implied_gaps,
    hoggar_test,
    induced_density,
    induced_moment_by_quadrature,
    jacobi_inner,
    jacobi_norm_sq,
    jacobi_norm_sq_exact,
    jacobi_q,
    power_in_jacobi_basis,
    regular_scheme_check,
    regular_scheme_of,
    residuals_within,
)
from designlab.exceptions import ConfigurationError, DomainError, NotUnitNormError


GOLDEN_MINUS = (3 - math.sqrt(5)) / 8
GOLDEN_PLUS = (3 + math.sqrt(5)) / 8
HOGGAR_SCHEME = RegularScheme(
    n=315,
    angles=(0.0, GOLDEN_MINUS, 0.25, 0.5, GOLDEN_PLUS),
    counts=(10, 32, 160, 80, 32),
)


# =============================================================================
# JACOBI POLYNOMIALS
# =============================================================================

@pytest.mark.parametrize("m", [1, 2, 4])
def test_first_polynomial(m):
    """Q_1(x) = (m/2)(1 - d x)."""
    for d in range(1, 5):
        q = jacobi_q(1, m, d)
        assert q.coeffs == (Fraction(m, 2), -Fraction(m * d, 2))


def test_second_complex_polynomial_on_c2():
    assert jacobi_q(2, 2, 2).coeffs == (1, -6, 6)
    assert jacobi_norm_sq_exact(2, 2, 2) == Fraction(1, 5)


def test_norm_quaternionic_plane():
    assert np.isclose(jacobi_norm_sq(1, 4, 2), 0.8)
    assert jacobi_norm_sq_exact(0, 4, 2) == 1


@pytest.mark.parametrize("m", [1, 2, 4])
@pytest.mark.parametrize("d", [2, 3, 4])
def test_matches_shifted_classical_jacobi(m, d):
    """Q_k(x) = P_k^(m/2-1, m(d-1)/2-1)(1 - 2x)."""
    x = np.linspace(0.0, 1.0, 11)
    alpha, beta = m / 2 - 1, m * (d - 1) / 2 - 1
    for k in range(0, 7):
        assert np.allclose(jacobi_q(k, m, d)(x), eval_jacobi(k, alpha, beta, 1 - 2 * x), rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize("m", [1, 2, 4])
@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_orthogonality(m, d):
    for j in range(0, 7):
        for k in range(0, 7):
            value = jacobi_inner(j, k, m, d)
            if j != k:
                assert value == 0
            elif d >= 2 or k == 0:
                assert value == jacobi_norm_sq_exact(k, m, d)


def test_integral_of_positive_degree_vanishes():
    for k in range(1, 6):
        assert jacobi_q(k, 4, 3).integrate() == 0


def test_jacobi_rejects_bad_arguments():
    with pytest.raises(DomainError):
        jacobi_q(-1, 2, 2)
    with pytest.raises(ConfigurationError):
        jacobi_q(1, 3, 2)


def test_power_expansion_reconstructs_monomial():
    """sum_l a_l Q_l reproduces x^r coefficient by coefficient."""
    for m in (1, 2, 4):
        for d in (2, 3):
            for r in range(0, 6):
                coeffs = power_in_jacobi_basis(r, m, d)
                total = [Fraction(0)] * (r + 1)
                for ell, a in enumerate(coeffs):
                    for j, c in enumerate(jacobi_q(ell, m, d).coeffs):
                        total[j] += a * c
                assert total == [Fraction(0)] * r + [Fraction(1)]


def test_power_expansion_constant_term_is_moment():
    assert power_in_jacobi_basis(3, 4, 3)[0] == c_t_exact(FieldTag.H, 3, 3)


def test_power_expansion_on_a_line_has_only_the_constant():
    assert power_in_jacobi_basis(4, 2, 1) == (Fraction(1),) + (Fraction(0),) * 4


# =============================================================================
# HOGGAR TEST
# =============================================================================

@pytest.mark.parametrize("field", ["R", "C", "H"])
def test_mub_family_passes_through_degree_three(field):
    residuals = hoggar_test(mub_family(field), 4)
    m = FieldTag.parse(field).m
    assert residuals_within(residuals[:3], m, 2, 1e-12)
    assert not residuals_within(residuals, m, 2, 1e-6)


@pytest.mark.parametrize("field,expected", [("R", 1 / 35), ("C", 1 / 24), ("H", 1 / 20)])
def test_mub_family_hoggar_gap_at_degree_four(field, expected):
    """The implied gap equals the frame potential gap; 15 against 100/7 in H^2."""
    gaps = implied_gaps(hoggar_test(mub_family(field), 4), FieldTag.parse(field).m, 2)
    assert max(gaps[:3]) < 1e-12
    assert np.isclose(gaps[3], expected, rtol=1e-9)
    cfg = mub_family(field)
    assert np.isclose(gaps[3], (potential(cfg, 4) - welch_bound(cfg, 4)) / welch_bound(cfg, 4), rtol=1e-9)


def test_onb_is_only_a_one_design():
    residuals = hoggar_test(onb(FieldTag.H, 3), 2)
    assert abs(residuals[0]) < 1e-12
    assert abs(residuals[1]) > 1e-3


def test_hoggar_test_requires_unit_vectors():
    vectors = np.zeros((2, 2, 4))
    vectors[0, 0, 0] = 2.0
    vectors[1, 1, 0] = 1.0
    with pytest.raises(NotUnitNormError):
        hoggar_test(Configuration(FieldTag.R, 2, vectors), 1)


def test_hoggar_test_rejects_t_zero():
    with pytest.raises(DomainError):
        hoggar_test(onb(FieldTag.R, 2), 0)


def test_weighted_onb_is_not_a_one_design():
    cfg = onb(FieldTag.C, 2).with_weights([1.0, 3.0])
    assert abs(hoggar_test(cfg, 1)[0]) > 1e-3


# =============================================================================
# REGULAR SCHEMES
# =============================================================================

@pytest.mark.parametrize("r", [1, 2, 3, 4, 5])
def test_hoggar_lines_scheme(r):
    lhs, rhs = regular_scheme_check(HOGGAR_SCHEME, FieldTag.H, 3, r)
    assert np.isclose(lhs, rhs, rtol=1e-12)


def test_hoggar_lines_scheme_known_values():
    assert np.isclose(regular_scheme_check(HOGGAR_SCHEME, FieldTag.H, 3, 5)[1], 7.5)
    assert np.isclose(regular_scheme_check(HOGGAR_SCHEME, FieldTag.H, 3, 1)[1], 105)


def test_hoggar_lines_fail_at_degree_six():
    lhs, rhs = regular_scheme_check(HOGGAR_SCHEME, FieldTag.H, 3, 6)
    assert not np.isclose(lhs, rhs, rtol=1e-9)


def test_onb_scheme():
    scheme = RegularScheme(n=3, angles=(0.0,), counts=(2,))
    assert np.allclose(regular_scheme_check(scheme, FieldTag.H, 3, 1), (1.0, 1.0))
    lhs, rhs = regular_scheme_check(scheme, FieldTag.H, 3, 2)
    assert lhs == 1.0 and rhs < 1.0


def test_scheme_validation():
    with pytest.raises(ConfigurationError):
        RegularScheme(n=4, angles=(0.0,), counts=(2,))
    with pytest.raises(ConfigurationError):
        RegularScheme(n=3, angles=(1.5,), counts=(2,))
    with pytest.raises(ConfigurationError):
        RegularScheme(n=3, angles=(0.0, 0.5), counts=(2,))


def test_scheme_of_mub_family():
    scheme = regular_scheme_of(mub_family(FieldTag.H))
    assert scheme.n == 10
    assert np.allclose(scheme.angles, (0.0, 0.5))
    assert scheme.counts == (1, 8)


def test_scheme_of_single_vector():
    scheme = regular_scheme_of(onb(FieldTag.R, 1))
    assert scheme.n == 1 and scheme.counts == ()


def test_scheme_of_irregular_configuration(make_configuration, rng):
    assert regular_scheme_of(make_configuration("C", 2, 4, rng)) is None


def test_scheme_rejects_coincident_lines():
    with pytest.raises(ConfigurationError):
        RegularScheme(n=2, angles=(1.0,), counts=(1,))


def test_scheme_of_repeated_lines_is_none():
    cfg = Configuration(FieldTag.R, 2, np.stack([onb(FieldTag.R, 2).vectors[0]] * 2))
    assert regular_scheme_of(cfg) is None


@pytest.mark.parametrize("field", ["R", "C", "H"])
def test_hoggar_design_gives_a_consistent_scheme(field):
    """When the Hoggar test passes at degree t, the induced scheme satisfies r = 1..t."""
    cfg = mub_family(field)
    t = 3
    assert residuals_within(hoggar_test(cfg, t), FieldTag.parse(field).m, 2, 1e-12)
    scheme = regular_scheme_of(cfg)
    for r in range(1, t + 1):
        lhs, rhs = regular_scheme_check(scheme, field, 2, r)
        assert np.isclose(lhs, rhs, rtol=1e-12)


def test_six_lines_scheme(load_fixture):
    cfg = load_fixture("six_lines_h2")
    assert residuals_within(hoggar_test(cfg, 2), 4, 2, 1e-12)
    scheme = regular_scheme_of(cfg)
    assert scheme.counts == (5,)
    for r in (1, 2):
        lhs, rhs = regular_scheme_check(scheme, FieldTag.H, 2, r)
        assert np.isclose(lhs, rhs, rtol=1e-12)


# =============================================================================
# INDUCED MEASURE
# =============================================================================

@pytest.mark.parametrize("field", [FieldTag.R, FieldTag.C, FieldTag.H])
def test_quadrature_moments_match_constants(field):
    for d in (2, 3):
        for r in range(0, 5):
            assert np.isclose(induced_moment_by_quadrature(r, field, d), c_t(field, d, r), rtol=1e-6)


def test_complex_plane_angles_are_uniform():
    for z in (0.1, 0.5, 0.9):
        assert np.isclose(induced_density(z, FieldTag.C, 2), 1.0)


def test_density_domain():
    with pytest.raises(DomainError):
        induced_density(0.5, FieldTag.H, 1)
    with pytest.raises(DomainError):
        induced_density(1.0, FieldTag.H, 2)
