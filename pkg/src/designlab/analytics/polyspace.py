"""
Sparse polynomials in the md real coordinates of F^d.

A vector z in F^d is identified with the point (x_11, ..., x_1m, ..., x_dm)
of R^{md}, where z_j = sum_r x_jr i_r. The plane-wave powers
K_w = |<w, .>|^{2t} span Hom(t,t); this module expands them, pairs them with
the apolar inner product, integrates them over the sphere and checks the
differentiation identities they satisfy.
"""
from dataclasses import dataclass, field as dc_field
from functools import cached_property, lru_cache
import logging
import math
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np

from designlab.algebra.hilbert import FieldTag, Vector, abs_ip_sq, gram_abs_sq
from designlab.algebra.quat import UNITS, qconj, qmul
from designlab.analytics.moments import (
    b_const,
    compositions,
    dim_homtt,
    sphere_monomial_moment_exact,
)
from designlab.exceptions import (
    DegreeMismatchError,
    DimensionMismatchError,
    DomainError,
    EnvelopeError,
    FieldConformanceError,
)

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]

MAX_REAL_VARS = 12
MAX_DEGREE = 10
RANK_RTOL = 1e-8
RANK_SAMPLE_MARGIN = 2


def check_envelope(num_vars: int, degree: int) -> None:
    """Reject polynomial work outside md <= 12, degree <= 10."""
    if num_vars > MAX_REAL_VARS or degree > MAX_DEGREE:
        raise EnvelopeError(
            f"Polynomial of degree {degree} in {num_vars} variables is outside the supported "
            f"envelope (at most {MAX_REAL_VARS} variables, degree {MAX_DEGREE})"
        )


# =============================================================================
# POLY
# =============================================================================

@dataclass(frozen=True)
class Poly:
    """
    Sparse real polynomial sum_alpha f_alpha x^alpha.

    Zero coefficients are never stored. When homogeneous_degree is set every
    term must have that degree.
    """
    num_vars: int
    terms: Mapping[Exponent, float] = dc_field(default_factory=dict)
    homogeneous_degree: Optional[int] = None

    def __post_init__(self):
        if self.num_vars < 1:
            raise DomainError(f"num_vars must be positive, got {self.num_vars}")
        clean: Dict[Exponent, float] = {}
        for exps, coef in self.terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.num_vars or any(e < 0 for e in exps):
                raise DimensionMismatchError(
                    f"Exponent {exps} does not fit a polynomial in {self.num_vars} variables"
                )
            coef = float(coef)
            if coef != 0.0:
                clean[exps] = clean.get(exps, 0.0) + coef
        clean = {k: v for k, v in clean.items() if v != 0.0}
        if self.homogeneous_degree is not None:
            bad = [k for k in clean if sum(k) != self.homogeneous_degree]
            if bad:
                raise DegreeMismatchError(
                    f"Term {bad[0]} has degree {sum(bad[0])}, expected {self.homogeneous_degree}"
                )
        object.__setattr__(self, "terms", clean)

    @classmethod
    def zero(cls, num_vars: int) -> "Poly":
        return cls(num_vars, {})

    @classmethod
    def constant(cls, num_vars: int, value: float = 1.0) -> "Poly":
        return cls(num_vars, {(0,) * num_vars: value}, homogeneous_degree=0)

    @classmethod
    def variable(cls, num_vars: int, index: int) -> "Poly":
        exps = [0] * num_vars
        exps[index] = 1
        return cls(num_vars, {tuple(exps): 1.0}, homogeneous_degree=1)

    @property
    def degrees(self) -> List[int]:
        return sorted({sum(k) for k in self.terms})

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(k) for k in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self, degree: Optional[int] = None) -> bool:
        degs = self.degrees
        if not degs:
            return True
        return len(degs) == 1 and (degree is None or degs[0] == degree)

    def coefficient(self, exps: Iterable[int]) -> float:
        return self.terms.get(tuple(exps), 0.0)

    # -------------------------------------------------------------------------
    # arithmetic
    # -------------------------------------------------------------------------

    def _check_vars(self, other: "Poly") -> None:
        if self.num_vars != other.num_vars:
            raise DimensionMismatchError(
                f"Polynomials in {self.num_vars} and {other.num_vars} variables"
            )

    def _common_degree(self, other: "Poly") -> Optional[int]:
        if self.homogeneous_degree == other.homogeneous_degree:
            return self.homogeneous_degree
        return None

    def __add__(self, other: "Poly") -> "Poly":
        self._check_vars(other)
        terms = dict(self.terms)
        for exps, coef in other.terms.items():
            terms[exps] = terms.get(exps, 0.0) + coef
        return Poly(self.num_vars, terms, self._common_degree(other))

    def __neg__(self) -> "Poly":
        return self.scale(-1.0)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def scale(self, factor: float) -> "Poly":
        return Poly(self.num_vars, {k: factor * v for k, v in self.terms.items()},
                    self.homogeneous_degree)

    def __mul__(self, other: Union["Poly", float]) -> "Poly":
        if isinstance(other, Poly):
            return poly_mul(self, other)
        return self.scale(float(other))

    def __rmul__(self, other: float) -> "Poly":
        return self.scale(float(other))

    def partial(self, index: int) -> "Poly":
        """Formal partial derivative with respect to x_index."""
        terms: Dict[Exponent, float] = {}
        for exps, coef in self.terms.items():
            power = exps[index]
            if power == 0:
                continue
            lowered = exps[:index] + (power - 1,) + exps[index + 1:]
            terms[lowered] = terms.get(lowered, 0.0) + coef * power
        degree = None if self.homogeneous_degree is None else max(self.homogeneous_degree - 1, 0)
        return Poly(self.num_vars, terms, degree if terms else None)

    def isclose(self, other: "Poly", atol: float = 1e-12) -> bool:
        """Coefficientwise comparison."""
        self._check_vars(other)
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.coefficient(k) - other.coefficient(k)) <= atol for k in keys)

    # -------------------------------------------------------------------------
    # evaluation
    # -------------------------------------------------------------------------

    @cached_property
    def _arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        if not self.terms:
            return np.zeros((0, self.num_vars), dtype=int), np.zeros(0)
        exps = np.array(list(self.terms.keys()), dtype=int)
        coefs = np.array(list(self.terms.values()), dtype=float)
        return exps, coefs

    def evaluate(self, points: np.ndarray) -> Union[float, np.ndarray]:
        """
        Evaluate at one point of shape (num_vars,) or many of shape (P, num_vars).
        """
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        if pts.shape[1] != self.num_vars:
            raise DimensionMismatchError(
                f"Point has {pts.shape[1]} coordinates, polynomial has {self.num_vars} variables"
            )
        exps, coefs = self._arrays
        monomials = np.prod(pts[:, None, :] ** exps[None, :, :], axis=2)
        values = monomials @ coefs
        return float(values[0]) if single else values

    def __call__(self, points: np.ndarray) -> Union[float, np.ndarray]:
        return self.evaluate(points)


def poly_mul(f: Poly, g: Poly) -> Poly:
    """Distributive product; homogeneous degrees add."""
    f._check_vars(g)
    terms: Dict[Exponent, float] = {}
    for ef, cf in f.terms.items():
        for eg, cg in g.terms.items():
            key = tuple(a + b for a, b in zip(ef, eg))
            terms[key] = terms.get(key, 0.0) + cf * cg
    degree = None
    if f.homogeneous_degree is not None and g.homogeneous_degree is not None:
        degree = f.homogeneous_degree + g.homogeneous_degree
    return Poly(f.num_vars, terms, degree)


def poly_pow(f: Poly, t: int) -> Poly:
    """f^t by repeated multiplication; f^0 = 1."""
    if t < 0:
        raise DomainError(f"Exponent must be nonnegative, got {t}")
    if f.degree >= 0:
        check_envelope(f.num_vars, f.degree * t)
    result = Poly.constant(f.num_vars)
    for _ in range(t):
        result = poly_mul(result, f)
    return result


# =============================================================================
# REAL COORDINATES AND PLANE WAVES
# =============================================================================

@dataclass(frozen=True)
class RealCoords:
    """The md real coordinates of a vector in F^d, entry-major."""
    values: np.ndarray
    field: FieldTag

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).reshape(-1)
        field = FieldTag.parse(self.field)
        if vals.size % field.m != 0:
            raise DimensionMismatchError(
                f"{vals.size} coordinates do not split into entries of {field.m}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "field", field)

    @property
    def dim(self) -> int:
        return self.values.size // self.field.m

    def to_vector(self) -> Vector:
        entries = np.zeros((self.dim, 4))
        entries[:, :self.field.m] = self.values.reshape(self.dim, self.field.m)
        return Vector(entries)


def coords(v: Vector, field: FieldTag) -> RealCoords:
    field = FieldTag.parse(field)
    if not v.conforms(field):
        raise FieldConformanceError(f"Vector has components outside {field.value}")
    return RealCoords(v.entries[:, :field.m].reshape(-1), field)


def _linear_form_matrix(w: Vector, field: FieldTag) -> np.ndarray:
    """
    Real 4 x md matrix L with <w, z> = L x for x = coords(z).

    Column (j, r) holds the components of conj(w_j) i_r.
    """
    units = np.array([u.to_array() for u in UNITS[:field.m]])
    columns = qmul(qconj(w.entries)[:, None, :], units[None, :, :])
    return columns.reshape(-1, 4).T


def planewave_operator(w: Vector, field: FieldTag) -> np.ndarray:
    """
    Real symmetric md x md matrix M with |<w, D>|^2 = sum_ab M_ab d_a d_b,
    M_ab = Re(conj(w_j) i_r conj(i_s) w_k) for a = (j, r), b = (k, s).

    The same matrix gives the quadratic form |<w, z>|^2 = x^T M x.
    """
    field = FieldTag.parse(field)
    if not w.conforms(field):
        raise FieldConformanceError(f"Vector has components outside {field.value}")
    L = _linear_form_matrix(w, field)
    return L.T @ L


def quadratic_form_poly(matrix: np.ndarray) -> Poly:
    """x^T A x as a homogeneous quadratic Poly."""
    A = np.asarray(matrix, dtype=float)
    n = A.shape[0]
    terms: Dict[Exponent, float] = {}
    for p in range(n):
        for q in range(p, n):
            value = A[p, p] if p == q else 2.0 * A[p, q]
            if value == 0.0:
                continue
            exps = [0] * n
            exps[p] += 1
            exps[q] += 1
            terms[tuple(exps)] = value
    return Poly(n, terms, homogeneous_degree=2)


def expand_abs_ip_sq(w: Vector, field: FieldTag) -> Poly:
    """The quadratic |<w, z>|^2 in the real coordinates of z."""
    return quadratic_form_poly(planewave_operator(w, field))


def norm_sq_poly(field: FieldTag, d: int) -> Poly:
    """||x||^2 in md variables."""
    md = FieldTag.parse(field).m * d
    return quadratic_form_poly(np.eye(md))


def kernel(w: Vector, field: FieldTag, t: int) -> Poly:
    """K_w = |<w, .>|^{2t}, the reproducing kernel of Hom(t,t) at w."""
    field = FieldTag.parse(field)
    check_envelope(field.m * w.dim, 2 * t)
    return poly_pow(expand_abs_ip_sq(w, field), t)


# =============================================================================
# APOLAR INNER PRODUCT
# =============================================================================

def apolar(f: Poly, g: Poly, t: int, m: int) -> float:
    """
    <f, g> = (1/b_{t,m}) sum_{|alpha|=2t} alpha! f_alpha g_alpha.

    Both polynomials must be homogeneous of degree 2t.
    """
    f._check_vars(g)
    for name, p in (("f", f), ("g", g)):
        if not p.is_homogeneous(2 * t):
            raise DegreeMismatchError(
                f"{name} has degrees {p.degrees}, expected homogeneous degree {2 * t}"
            )
    small, large = (f, g) if len(f.terms) <= len(g.terms) else (g, f)
    total = 0.0
    for exps, coef in small.terms.items():
        other = large.terms.get(exps)
        if other is not None:
            total += math.prod(math.factorial(e) for e in exps) * coef * other
    return total / b_const(t, m)


def reproduce(f: Poly, w: Vector, t: int, field: FieldTag) -> Tuple[float, float]:
    """(apolar(K_w, f), f(w)); the two agree for f in Hom(t,t)."""
    field = FieldTag.parse(field)
    lhs = apolar(kernel(w, field, t), f, t, field.m)
    rhs = f.evaluate(coords(w, field).values)
    return lhs, rhs


# =============================================================================
# SPHERE INTEGRATION
# =============================================================================

@lru_cache(maxsize=65536)
def _moment(exps: Exponent) -> float:
    return float(sphere_monomial_moment_exact(exps))


def sphere_integral(f: Poly) -> float:
    """Exact integral of f over the unit sphere of R^{num_vars}, term by term."""
    return float(sum(coef * _moment(exps) for exps, coef in f.terms.items()))


def ct_by_integration(field: FieldTag, d: int, t: int) -> float:
    """c_t(F^d) as the sphere integral of K_{e1}."""
    return sphere_integral(kernel(Vector.basis(d, 0), field, t))


# =============================================================================
# DIFFERENTIATION IDENTITIES
# =============================================================================

def apply_second_order(f: Poly, matrix: np.ndarray) -> Poly:
    """sum_ab M_ab d_a d_b f for a symmetric real matrix M."""
    M = np.asarray(matrix, dtype=float)
    n = f.num_vars
    if M.shape != (n, n):
        raise DimensionMismatchError(f"Operator of shape {M.shape} for {n} variables")
    terms: Dict[Exponent, float] = {}
    pairs = [(a, b, M[a, b]) for a in range(n) for b in range(n) if M[a, b] != 0.0]
    for exps, coef in f.terms.items():
        for a, b, weight in pairs:
            lowered = list(exps)
            factor = lowered[a]
            lowered[a] -= 1
            factor *= lowered[b]
            if factor <= 0:
                continue
            lowered[b] -= 1
            key = tuple(lowered)
            terms[key] = terms.get(key, 0.0) + weight * factor * coef
    degree = None if f.homogeneous_degree is None else f.homogeneous_degree - 2
    return Poly(n, terms, degree if terms and degree is not None and degree >= 0 else None)


def planewave_derivative(f: Poly, w: Vector, field: FieldTag) -> Poly:
    """|<w, D>|^2 f with <w, D> = sum_{j,r} conj(w_j) i_r d/dx_jr."""
    return apply_second_order(f, planewave_operator(w, field))


def laplacian(f: Poly) -> Poly:
    return apply_second_order(f, np.eye(f.num_vars))


def planewave_lemma_check(v: Vector, w: Vector, field: FieldTag, t: int) -> Tuple[Poly, Poly]:
    """
    (|<w,D>|^2 K_v^{(t)}, 2t(2t+m-2) |<v,w>|^2 K_v^{(t-1)}), equal as polynomials.
    """
    field = FieldTag.parse(field)
    if t < 1:
        raise DomainError(f"t must be >= 1, got {t}")
    lhs = planewave_derivative(kernel(v, field, t), w, field)
    factor = 2 * t * (2 * t + field.m - 2) * abs_ip_sq(v, w)
    return lhs, kernel(v, field, t - 1).scale(factor)


def laplacian_lemma_check(v: Vector, field: FieldTag, t: int) -> Tuple[Poly, Poly]:
    """(Laplacian of K_v^{(t)}, 2t(2t+m-2) ||v||^2 K_v^{(t-1)})."""
    field = FieldTag.parse(field)
    if t < 1:
        raise DomainError(f"t must be >= 1, got {t}")
    lhs = laplacian(kernel(v, field, t))
    return lhs, kernel(v, field, t - 1).scale(2 * t * (2 * t + field.m - 2) * v.norm_sq())


def planewave_norm_check(w: Vector, field: FieldTag) -> Tuple[float, float]:
    """(|<w,D>|^2 applied to ||x||^2, 2m ||w||^2)."""
    field = FieldTag.parse(field)
    result = planewave_derivative(norm_sq_poly(field, w.dim), w, field)
    return result.coefficient((0,) * result.num_vars), 2.0 * field.m * w.norm_sq()


# =============================================================================
# DIMENSION OF Hom(t,t) BY GRAM RANK
# =============================================================================

def random_unit_vectors(field: FieldTag, d: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """count unit vectors of shape (count, d, 4) with standard-normal coordinates."""
    field = FieldTag.parse(field)
    arr = np.zeros((count, d, 4))
    arr[:, :, :field.m] = rng.standard_normal((count, d, field.m))
    norms = np.sqrt(np.sum(arr ** 2, axis=(1, 2)))
    return arr / norms[:, None, None]


def numerical_rank(gram: np.ndarray, rtol: float = RANK_RTOL) -> int:
    """Number of eigenvalues of a symmetric PSD matrix above max_eig * rtol."""
    eigenvalues = np.linalg.eigvalsh(gram)
    top = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    if top == 0.0:
        return 0
    return int(np.sum(eigenvalues > top * rtol))


@dataclass(frozen=True)
class RankResult:
    """Gram-rank estimate of dim Hom(t,t)."""
    rank: int
    expected: int
    samples: int
    insufficient_samples: bool

    @property
    def matches(self) -> bool:
        return self.rank == self.expected


def homtt_dim_by_rank(
    field: FieldTag,
    d: int,
    t: int,
    samples: Optional[int] = None,
    seed: int = 0,
) -> RankResult:
    """
    Rank of G_jk = |<w_j, w_k>|^{2t} for random unit w_j, which is the apolar
    Gram matrix of the kernels K_{w_j}.
    """
    field = FieldTag.parse(field)
    check_envelope(field.m * d, 2 * t)
    expected = dim_homtt(field, d, t)
    if samples is None:
        samples = max(2 * expected, expected + RANK_SAMPLE_MARGIN)
    if samples < 1:
        raise DomainError(f"samples must be positive, got {samples}")
    insufficient = samples < expected + RANK_SAMPLE_MARGIN
    if insufficient:
        logger.warning(
            f"{samples} samples cannot certify dim Hom(t,t)={expected} for {field.value}^{d}, t={t}"
        )
    rng = np.random.default_rng(seed)
    vectors = random_unit_vectors(field, d, samples, rng)
    gram = gram_abs_sq(vectors) ** t
    rank = numerical_rank(gram)
    logger.debug(f"Gram rank {rank} from {samples} samples ({field.value}^{d}, t={t})")
    return RankResult(rank=rank, expected=expected, samples=samples, insufficient_samples=insufficient)


def zonal_membership_residual(
    w: Vector,
    field: FieldTag,
    d: int,
    t: int,
    samples: Optional[int] = None,
    seed: int = 0,
) -> float:
    """
    Relative least-squares residual of ||.||^{2(t-1)} |<w, .>|^2 against the
    span of `samples` random kernels K_u; near zero when it lies in Hom(t,t).
    """
    field = FieldTag.parse(field)
    if w.dim != d:
        raise DimensionMismatchError(f"Vector of dimension {w.dim} for d={d}")
    if t < 1:
        raise DomainError(f"t must be >= 1, got {t}")
    if samples is None:
        samples = 2 * dim_homtt(field, d, t)
    target = poly_mul(poly_pow(norm_sq_poly(field, d), t - 1), expand_abs_ip_sq(w, field))
    rng = np.random.default_rng(seed)
    frame = [kernel(Vector(u), field, t) for u in random_unit_vectors(field, d, samples, rng)]

    index: Dict[Exponent, int] = {}
    for poly in frame + [target]:
        for exps in poly.terms:
            index.setdefault(exps, len(index))
    A = np.zeros((len(index), samples))
    for col, poly in enumerate(frame):
        for exps, coef in poly.terms.items():
            A[index[exps], col] = coef
    b = np.zeros(len(index))
    for exps, coef in target.terms.items():
        b[index[exps]] = coef

    solution, *_ = np.linalg.lstsq(A, b, rcond=None)
    return float(np.linalg.norm(A @ solution - b) / np.linalg.norm(b))


# =============================================================================
# TIGHT FRAMES FOR Hom_{H^d}(1,1)
# =============================================================================

def _pair_reals(z: np.ndarray) -> np.ndarray:
    """R[j, k, r] = Re(z_j conj(z_k) i_r) for z of shape (d, 4)."""
    units = np.array([u.to_array() for u in UNITS])
    products = qmul(z[:, None, :], qconj(z)[None, :, :])
    return qmul(products[:, :, None, :], units[None, None, :, :])[..., 0]


def p_system_values(z: Vector) -> np.ndarray:
    """
    The d + 4 C(d,2) polynomials |z_j|^2 and sqrt(2) Re(z_j conj(z_k) i_r), j < k,
    evaluated at z.
    """
    reals = _pair_reals(z.entries)
    d = z.dim
    diag = [reals[j, j, 0] for j in range(d)]
    off = [math.sqrt(2.0) * reals[j, k, r] for j in range(d) for k in range(j + 1, d) for r in range(4)]
    return np.array(diag + off)


def q_system_values(z: Vector) -> np.ndarray:
    """Re(z_j conj(z_k) i_r) over all j, k and r, evaluated at z."""
    return _pair_reals(z.entries).reshape(-1)


def _multinomial_pairing(p: np.ndarray, q: np.ndarray, t: int) -> float:
    total = 0.0
    for alpha in compositions(t, p.size):
        exps = np.array(alpha.exponents)
        total += alpha.multinomial() * float(np.prod(p ** exps)) * float(np.prod(q ** exps))
    return total


def tight_frame_expansion_check(
    field: FieldTag,
    d: int,
    t: int,
    w: Vector,
    z: Vector,
    system: str = "P",
) -> Tuple[float, float]:
    """
    (sum_{|alpha|=t} C(t,alpha) P^alpha(z) P^alpha(w), |<w,z>|^{2t}).

    system "P" is the basis of Hom_{H^d}(1,1); "Q" is the redundant
    spanning set over all ordered pairs.
    """
    field = FieldTag.parse(field)
    if field is not FieldTag.H:
        raise DomainError("The P and Q systems are defined for H^d")
    if w.dim != d or z.dim != d:
        raise DimensionMismatchError(f"Vectors of dimensions {w.dim}, {z.dim} for d={d}")
    values = {"P": p_system_values, "Q": q_system_values}.get(system.upper())
    if values is None:
        raise DomainError(f"Unknown system '{system}', expected P or Q")
    lhs = _multinomial_pairing(values(z), values(w), t)
    return lhs, abs_ip_sq(w, z) ** t


def p_system_product_rank(d: int, t: int, samples: Optional[int] = None, seed: int = 0) -> Tuple[int, int]:
    """
    (number of products P^alpha with |alpha| = t, their numerical rank as
    functions on H^d).
    """
    check_envelope(4 * d, 2 * t)
    size = d + 4 * math.comb(d, 2)
    alphas = [np.array(a.exponents) for a in compositions(t, size)]
    if samples is None:
        samples = 3 * len(alphas)
    rng = np.random.default_rng(seed)
    points = random_unit_vectors(FieldTag.H, d, samples, rng)
    rows = np.array([p_system_values(Vector(z)) for z in points])
    matrix = np.stack([np.prod(rows ** a[None, :], axis=1) for a in alphas], axis=1)
    singular = np.linalg.svd(matrix, compute_uv=False)
    return len(alphas), int(np.sum(singular > singular[0] * RANK_RTOL))
