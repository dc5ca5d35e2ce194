"""
Projective designs through the induced angle measure.

For unit x, y drawn from the sphere of F^d the angle |<x, y>|^2 is Beta
distributed on [0, 1] with moments c_r(F^d). The orthogonal polynomials of
that measure, Q_k, turn the design condition into the vanishing of the
double sums sum_{j,k} w_j w_k Q_l(|<v_j, v_k>|^2), l = 1..t.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import logging
import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import integrate
from scipy.special import gammaln

from designlab.algebra.hilbert import Configuration, FieldTag, cluster_values
from designlab.analytics.moments import c_t_exact, pochhammer
from designlab.exceptions import ConfigurationError, DomainError, NotUnitNormError

logger = logging.getLogger(__name__)

UNIT_NORM_TOL = 1e-8


# =============================================================================
# JACOBI POLYNOMIALS
# =============================================================================

@dataclass(frozen=True)
class JacobiPoly:
    """
    Q_k^(m) on [0, 1] for F^d; coeffs[j] is the exact coefficient of x^j.
    """
    k: int
    m: int
    d: int
    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.k + 1:
            raise DomainError(f"Degree {self.k} needs {self.k + 1} coefficients")
        if self.coeffs[self.k] == 0:
            raise DomainError("Leading coefficient vanishes")

    @property
    def field(self) -> FieldTag:
        return FieldTag.from_m(self.m)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])

    def __call__(self, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        return npoly.polyval(x, self.coefficients)

    def integrate(self) -> Fraction:
        """Integral against the induced measure, from its moments."""
        return sum((c * c_t_exact(self.field, self.d, r) for r, c in enumerate(self.coeffs)), Fraction(0))


@lru_cache(maxsize=None)
def jacobi_q(k: int, m: int, d: int) -> JacobiPoly:
    """
    Q_k^(m)(x) = ((m/2)_k / k!) sum_j (-1)^j C(k,j) ((md/2 - 1 + k)_j / (m/2)_j) x^j.
    """
    FieldTag.from_m(m)
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    half_m = Fraction(m, 2)
    shift = Fraction(m * d, 2) - 1 + k
    prefactor = pochhammer(half_m, k) / math.factorial(k)
    coeffs = tuple(
        prefactor * (-1) ** j * math.comb(k, j) * pochhammer(shift, j) / pochhammer(half_m, j)
        for j in range(k + 1)
    )
    return JacobiPoly(k=k, m=m, d=d, coeffs=coeffs)


def jacobi_inner(j: int, k: int, m: int, d: int) -> Fraction:
    """Exact integral of Q_j Q_k against the induced measure, via its moments."""
    field = FieldTag.from_m(m)
    qj, qk = jacobi_q(j, m, d), jacobi_q(k, m, d)
    total = Fraction(0)
    for a, ca in enumerate(qj.coeffs):
        for b, cb in enumerate(qk.coeffs):
            total += ca * cb * c_t_exact(field, d, a + b)
    return total


def jacobi_norm_sq_exact(k: int, m: int, d: int) -> Fraction:
    """
    (1/(2k + md/2 - 1)) (m/2)_k ((m/2)(d-1))_k / ((md/2)_{k-1} k!).
    """
    FieldTag.from_m(m)
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if k == 0:
        return Fraction(1)
    half_m = Fraction(m, 2)
    half_md = Fraction(m * d, 2)
    numerator = pochhammer(half_m, k) * pochhammer(half_m * (d - 1), k)
    return numerator / (pochhammer(half_md, k - 1) * math.factorial(k) * (2 * k + half_md - 1))


def jacobi_norm_sq(k: int, m: int, d: int) -> float:
    return float(jacobi_norm_sq_exact(k, m, d))


@lru_cache(maxsize=None)
def power_in_jacobi_basis(r: int, m: int, d: int) -> Tuple[Fraction, ...]:
    """
    Exact coefficients a_0..a_r of x^r = sum_l a_l Q_l(x) on the support of
    the induced measure. a_0 = c_r; terms with a null Q_l (d = 1) are zero.
    """
    field = FieldTag.from_m(m)
    if r < 0:
        raise DomainError(f"r must be >= 0, got {r}")
    coeffs = []
    for ell in range(r + 1):
        norm = jacobi_norm_sq_exact(ell, m, d)
        if norm == 0:
            coeffs.append(Fraction(0))
            continue
        q = jacobi_q(ell, m, d)
        projection = sum((c * c_t_exact(field, d, r + j) for j, c in enumerate(q.coeffs)), Fraction(0))
        coeffs.append(projection / norm)
    return tuple(coeffs)


def implied_gaps(residuals: Sequence[float], m: int, d: int) -> List[float]:
    """
    Relative frame potential gaps at r = 1..t recovered from the Hoggar
    residuals: sum_{l<=r} |a_l r_l| / c_r with x^r = sum_l a_l Q_l.
    """
    field = FieldTag.from_m(m)
    gaps = []
    for r in range(1, len(residuals) + 1):
        coeffs = power_in_jacobi_basis(r, m, d)
        total = sum(abs(float(coeffs[ell])) * abs(residuals[ell - 1]) for ell in range(1, r + 1))
        gaps.append(total / float(c_t_exact(field, d, r)))
    return gaps


# =============================================================================
# HOGGAR TEST
# =============================================================================

def hoggar_test(cfg: Configuration, t: int, unit_tol: float = UNIT_NORM_TOL) -> List[float]:
    """
    Residuals sum_{j,k} w_j w_k Q_l(|<v_j, v_k>|^2) for l = 1..t, with weights
    normalised to sum to one. All vanish exactly for projective t-designs.
    """
    if t < 1:
        raise DomainError(f"t must be >= 1, got {t}")
    norms = cfg.norms_sq()
    worst = float(np.max(np.abs(norms - 1.0)))
    if worst > unit_tol:
        raise NotUnitNormError(f"Hoggar test needs unit vectors; max | |v|^2 - 1 | = {worst:.3e}")
    weights = cfg.weights_or_ones()
    weights = weights / np.sum(weights)
    outer = np.outer(weights, weights)
    angles = cfg.gram_abs_sq()
    residuals = [float(np.sum(outer * jacobi_q(ell, cfg.field.m, cfg.dim)(angles))) for ell in range(1, t + 1)]
    logger.debug(f"Hoggar residuals for n={cfg.n}, t={t}: {residuals}")
    return residuals


# =============================================================================
# REGULAR SCHEMES
# =============================================================================

@dataclass(frozen=True)
class RegularScheme:
    """
    n lines such that every line sees counts[i] others at angle angles[i].
    """
    n: int
    angles: Tuple[float, ...]
    counts: Tuple[int, ...]

    def __post_init__(self):
        angles = tuple(float(a) for a in self.angles)
        counts = tuple(int(c) for c in self.counts)
        if self.n < 1:
            raise ConfigurationError(f"n must be positive, got {self.n}")
        if len(angles) != len(counts):
            raise ConfigurationError(f"{len(angles)} angles but {len(counts)} counts")
        if any(not 0.0 <= a < 1.0 for a in angles):
            raise ConfigurationError(f"Angles between distinct lines must lie in [0, 1), got {angles}")
        if any(c < 0 for c in counts):
            raise ConfigurationError("Counts must be nonnegative")
        if sum(counts) != self.n - 1:
            raise ConfigurationError(f"Counts sum to {sum(counts)}, expected n - 1 = {self.n - 1}")
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "counts", counts)


def regular_scheme_check(s: RegularScheme, field: FieldTag, d: int, r: int) -> Tuple[float, float]:
    """(1 + sum_i angles_i^r counts_i, n c_r(F^d)); equal at every r <= t for a t-design."""
    field = FieldTag.parse(field)
    if r < 0:
        raise DomainError(f"r must be >= 0, got {r}")
    lhs = 1.0 + sum(a ** r * c for a, c in zip(s.angles, s.counts))
    return lhs, float(s.n * c_t_exact(field, d, r))


def regular_scheme_of(cfg: Configuration, tol: float = 1e-6) -> Optional[RegularScheme]:
    """
    The regular scheme formed by the lines of cfg, or None when different
    vectors see different angle multisets.
    """
    if cfg.n == 1:
        return RegularScheme(n=1, angles=(), counts=())
    angles = cfg.normalized_angles()
    mask = ~np.eye(cfg.n, dtype=bool)
    centers = np.array([center for center, _ in cluster_values(angles[mask], tol)])
    labels = np.argmin(np.abs(angles[..., None] - centers[None, None, :]), axis=-1)
    rows = np.stack([np.bincount(labels[j][mask[j]], minlength=centers.size) for j in range(cfg.n)])
    if not np.all(rows == rows[0]):
        logger.debug("Angle multisets differ between vectors; not a regular scheme")
        return None
    if np.any(centers >= 1.0 - tol):
        logger.debug("Repeated lines; not a regular scheme")
        return None
    return RegularScheme(n=cfg.n, angles=tuple(np.clip(centers, 0.0, 1.0)), counts=tuple(rows[0]))


# =============================================================================
# INDUCED MEASURE
# =============================================================================

def induced_density(zval: float, field: FieldTag, d: int) -> float:
    """
    Beta density W(z) = Gamma(md/2) / (Gamma(m/2) Gamma(m(d-1)/2))
    z^{m/2 - 1} (1 - z)^{m(d-1)/2 - 1}.
    """
    field = FieldTag.parse(field)
    if d < 2:
        raise DomainError(f"The induced measure has a density only for d >= 2, got d={d}")
    if not 0.0 < zval < 1.0:
        raise DomainError(f"z must lie in (0, 1), got {zval}")
    a = field.m / 2.0
    b = field.m * (d - 1) / 2.0
    log_w = gammaln(a + b) - gammaln(a) - gammaln(b) + (a - 1.0) * math.log(zval) + (b - 1.0) * math.log1p(-zval)
    return math.exp(log_w)


def induced_moment_by_quadrature(r: int, field: FieldTag, d: int) -> float:
    """Integral of z^r W(z) over (0, 1) by adaptive quadrature."""
    value, abserr = integrate.quad(lambda z: z ** r * induced_density(z, field, d), 0.0, 1.0, limit=200)
    logger.debug(f"Quadrature moment r={r}: {value} (error estimate {abserr:.1e})")
    return float(value)


def residuals_within(residuals: Sequence[float], m: int, d: int, tol: float) -> bool:
    """Every implied relative gap is at most tol, the variational tolerance."""
    return all(gap <= tol for gap in implied_gaps(residuals, m, d))
