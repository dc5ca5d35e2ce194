"""
Design verification and closed-form catalog configurations.

A weighted configuration (v_j, w_j) satisfies

    sum_{j,k} w_j w_k |<v_j, v_k>|^{2t} >= c_t(F^d) (sum_l w_l ||v_l||^{2t})^2

with equality exactly for spherical (t,t)-designs. verify() evaluates this
variational condition together with the Bessel identity at probe points, the
cubature rule on expanded kernels and the Jacobi (Hoggar) residuals.
"""
from dataclasses import asdict, dataclass
import logging
import math
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from designlab.algebra.hilbert import (
    AngleSpectrum,
    Configuration,
    FieldTag,
    Vector,
    angle_spectrum,
    gram_abs_sq,
)
from designlab.algebra.quat import UNITS
from designlab.analytics.moments import c_t, dim_hom_r, sic_bound
from designlab.analytics.polyspace import coords, kernel, random_unit_vectors, sphere_integral
from designlab.analytics.projective import hoggar_test, residuals_within
from designlab.exceptions import DomainError, EnvelopeError, UnsupportedDimensionError
from designlab.settings import get_settings

logger = logging.getLogger(__name__)

CUBATURE_PROBES = 6


def _check_t(t: int) -> None:
    if t < 1:
        raise DomainError(f"t must be >= 1, got {t}")


# =============================================================================
# POTENTIAL AND BOUND
# =============================================================================

def potential(cfg: Configuration, t: int) -> float:
    """Weighted frame potential sum_{j,k} w_j w_k |<v_j, v_k>|^{2t}."""
    _check_t(t)
    w = cfg.weights_or_ones()
    return float(w @ (cfg.gram_abs_sq() ** t) @ w)


def welch_bound(cfg: Configuration, t: int) -> float:
    """c_t(F^d) (sum_l w_l ||v_l||^{2t})^2."""
    _check_t(t)
    mass = float(np.sum(cfg.weights_or_ones() * cfg.norms_sq() ** t))
    return c_t(cfg.field, cfg.dim, t) * mass * mass


def equivalent_vectors(cfg: Configuration, t: int) -> np.ndarray:
    """Unweighted vectors w_j^{1/2t} v_j with the same degree-t potential."""
    scale = cfg.weights_or_ones() ** (1.0 / (2 * t))
    return cfg.vectors * scale[:, None, None]


@dataclass(frozen=True)
class DegreeCheck:
    """Variational check at a lower degree r."""
    r: int
    potential: float
    bound: float
    gap: float

    @property
    def relative_gap(self) -> float:
        return self.gap / self.bound


def lower_degree_checks(cfg: Configuration, t: int) -> List[DegreeCheck]:
    """
    For r = 1..t, the degree-r variational check on the rescaled vectors
    ||x_j||^{t/r - 1} x_j, x_j = w_j^{1/2t} v_j.
    """
    _check_t(t)
    x = equivalent_vectors(cfg, t)
    norms_sq = np.sum(x ** 2, axis=(1, 2))
    base = gram_abs_sq(x)
    checks = []
    for r in range(1, t + 1):
        factor = norms_sq ** (t / r - 1.0)
        angles = base * np.outer(factor, factor)
        pot = float(np.sum(angles ** r))
        mass = float(np.sum((norms_sq * factor) ** r))
        bound = c_t(cfg.field, cfg.dim, r) * mass * mass
        checks.append(DegreeCheck(r=r, potential=pot, bound=bound, gap=pot - bound))
    return checks


# =============================================================================
# BESSEL AND CUBATURE
# =============================================================================

def bessel_probes(field: FieldTag, d: int, count: int, seed: int) -> np.ndarray:
    """count seeded random unit vectors followed by the d standard basis vectors."""
    field = FieldTag.parse(field)
    rng = np.random.default_rng(seed)
    basis = np.zeros((d, d, 4))
    basis[np.arange(d), np.arange(d), 0] = 1.0
    return np.concatenate([random_unit_vectors(field, d, count, rng), basis])


def bessel_residual(cfg: Configuration, t: int, probes: np.ndarray) -> float:
    """
    max_x | sum_j w_j |<v_j, x>|^{2t} / sum_l w_l ||v_l||^{2t} - c_t ||x||^{2t} |.
    """
    _check_t(t)
    w = cfg.weights_or_ones()
    mass = float(np.sum(w * cfg.norms_sq() ** t))
    values = w @ (gram_abs_sq(cfg.vectors, probes) ** t) / mass
    target = c_t(cfg.field, cfg.dim, t) * np.sum(probes ** 2, axis=(1, 2)) ** t
    return float(np.max(np.abs(values - target)))


def cubature_residual(
    cfg: Configuration,
    t: int,
    probes: np.ndarray,
    max_monomials: Optional[int] = None,
) -> Optional[float]:
    """
    max over probe kernels f = K_x of |integral f - sum_j omega_j f(u_j)|, in the
    unit form (u_j, omega_j). None when the expansion is too large.
    """
    _check_t(t)
    if max_monomials is None:
        max_monomials = get_settings().cubature_max_monomials
    monomials = dim_hom_r(cfg.field, cfg.dim, 2 * t)
    if monomials > max_monomials:
        logger.warning(f"Skipping symbolic cubature check: {monomials} monomials > {max_monomials}")
        return None
    unit, omega = cfg.unit_form(t)
    points = np.stack([coords(unit.vector(j), cfg.field).values for j in range(unit.n)])
    worst = 0.0
    try:
        for x in probes[:CUBATURE_PROBES]:
            f = kernel(Vector(x), cfg.field, t)
            worst = max(worst, abs(sphere_integral(f) - float(omega @ f.evaluate(points))))
    except EnvelopeError as exc:
        logger.warning(f"Skipping symbolic cubature check: {exc}")
        return None
    return worst


# =============================================================================
# REPORT
# =============================================================================

@dataclass(frozen=True)
class DesignReport:
    """
    Verdict of verify(); potential and bound are for the configuration as given.

    cubature_max_residual is diagnostic only and takes no part in any verdict.
    """
    t: int
    field: FieldTag
    dim: int
    n: int
    potential: float
    bound: float
    gap: float
    relative_gap: float
    is_design: bool
    tolerance: float
    per_r: Tuple[DegreeCheck, ...]
    spectrum: AngleSpectrum
    bessel_max_residual: float
    bessel_ok: bool
    cubature_max_residual: Optional[float]
    hoggar_residuals: Tuple[float, ...]
    hoggar_ok: bool
    normalization: str

    @property
    def verdicts_agree(self) -> bool:
        return self.is_design == self.bessel_ok == self.hoggar_ok

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "field": self.field.value,
            "dim": self.dim,
            "n": self.n,
            "potential": self.potential,
            "bound": self.bound,
            "gap": self.gap,
            "relative_gap": self.relative_gap,
            "is_design": self.is_design,
            "tolerance": self.tolerance,
            "per_r": [dict(asdict(check), relative_gap=check.relative_gap) for check in self.per_r],
            "spectrum": self.spectrum.to_dict(),
            "bessel_max_residual": self.bessel_max_residual,
            "bessel_ok": self.bessel_ok,
            "cubature_max_residual": self.cubature_max_residual,
            "hoggar_residuals": list(self.hoggar_residuals),
            "hoggar_ok": self.hoggar_ok,
            "normalization": self.normalization,
        }


def verify(cfg: Configuration, t: int, tol: Optional[float] = None) -> DesignReport:
    """
    Evaluate the design conditions at degree t.

    The variational verdict is relative_gap <= tol at every degree r <= t.
    The Bessel verdict allows sqrt(tol) c_t, since the probe residual grows
    like the square root of the gap. The Hoggar verdict converts the
    residuals back into relative gaps (implied_gaps) and holds them to tol.
    """
    _check_t(t)
    settings = get_settings()
    if tol is None:
        tol = settings.design_tol

    pot = potential(cfg, t)
    bound = welch_bound(cfg, t)
    gap = pot - bound
    relative_gap = gap / bound
    checks = tuple(lower_degree_checks(cfg, t))
    is_design = relative_gap <= tol and all(check.relative_gap <= tol for check in checks)

    unit, omega = cfg.unit_form(t)
    weighted_unit = unit.with_weights(omega)
    spectrum = angle_spectrum(unit, settings.angle_tol)

    probes = bessel_probes(cfg.field, cfg.dim, settings.bessel_probe_count, settings.bessel_probe_seed)
    bessel = bessel_residual(cfg, t, probes)
    bessel_ok = bessel <= math.sqrt(tol) * c_t(cfg.field, cfg.dim, t)
    cubature = cubature_residual(cfg, t, probes, settings.cubature_max_monomials)

    hoggar = tuple(hoggar_test(weighted_unit, t))
    hoggar_ok = residuals_within(hoggar, cfg.field.m, cfg.dim, tol)

    if cfg.weights is None and cfg.is_unit_norm():
        normalization = "none: unit vectors, unit weights (Hoggar weights 1/n)"
    else:
        normalization = "unit vectors u_j = v_j/|v_j|, weights w_j |v_j|^{2t} scaled to sum 1"

    report = DesignReport(
        t=t,
        field=cfg.field,
        dim=cfg.dim,
        n=cfg.n,
        potential=pot,
        bound=bound,
        gap=gap,
        relative_gap=relative_gap,
        is_design=is_design,
        tolerance=tol,
        per_r=checks,
        spectrum=spectrum,
        bessel_max_residual=bessel,
        bessel_ok=bool(bessel_ok),
        cubature_max_residual=cubature,
        hoggar_residuals=hoggar,
        hoggar_ok=hoggar_ok,
        normalization=normalization,
    )
    logger.info(
        f"{cfg.field.value}^{cfg.dim}, n={cfg.n}, t={t}: potential={pot:.12g} bound={bound:.12g} "
        f"relative_gap={relative_gap:.3e} design={is_design}"
    )
    if not report.verdicts_agree:
        logger.warning(
            f"Design criteria disagree: variational={is_design} bessel={bessel_ok} hoggar={hoggar_ok}"
        )
    return report


def equiangular_check(cfg: Configuration, tol: float = 1e-6) -> Tuple[bool, Optional[float], Optional[bool]]:
    """
    (is_equiangular, common angle C, whether n and C meet the maximal
    equiangular count and its forced angle). C and the last entry are None
    when the lines are not equiangular.
    """
    if cfg.n < 2:
        return True, None, False
    angles = cfg.normalized_angles()[~np.eye(cfg.n, dtype=bool)]
    if float(np.max(angles) - np.min(angles)) > tol:
        return False, None, None
    common = float(np.mean(angles))
    n_max, angle = sic_bound(cfg.field, cfg.dim)
    return True, common, bool(cfg.n == n_max and abs(common - angle) <= tol)


# =============================================================================
# CATALOG
# =============================================================================

def onb(field: FieldTag, d: int) -> Configuration:
    """The standard basis e_1..e_d."""
    field = FieldTag.parse(field)
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    vectors = np.zeros((d, d, 4))
    vectors[np.arange(d), np.arange(d), 0] = 1.0
    return Configuration(field, d, vectors)


def mub_family(field: FieldTag, d: int = 2) -> Configuration:
    """
    The 2m + 2 unit vectors e_1, e_2 and (1, +-i_r)/sqrt(2), r = 1..m, of F^2:
    m/2 + 1 mutually unbiased bases forming a (3,3)-design.
    """
    field = FieldTag.parse(field)
    if d != 2:
        raise UnsupportedDimensionError(f"The MUB family is defined for d = 2, got d={d}")
    vectors = [np.array([[1.0, 0, 0, 0], [0, 0, 0, 0]]), np.array([[0, 0, 0, 0], [1.0, 0, 0, 0]])]
    for unit in UNITS[:field.m]:
        for sign in (1.0, -1.0):
            vectors.append(np.stack([np.array([1.0, 0, 0, 0]), sign * unit.to_array()]) / math.sqrt(2.0))
    cfg = Configuration(field, 2, np.stack(vectors))
    logger.debug(f"MUB family in {field.value}^2 with {cfg.n} vectors")
    return cfg


CATALOG = {"onb": onb, "mub": mub_family}


def catalog(name: str, field: FieldTag, d: int) -> Configuration:
    try:
        builder = CATALOG[name.lower()]
    except KeyError:
        raise DomainError(f"Unknown catalog entry '{name}'; expected one of {sorted(CATALOG)}")
    return builder(field, d)
