"""
Closed-form constants for spherical (t,t)-designs.

All products of Pochhammer symbols and factorials are evaluated exactly with
integers and Fractions; floats are only produced at the public boundary.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
import math
from typing import Iterator, Tuple, Union

from designlab.algebra.hilbert import FieldTag
from designlab.exceptions import DomainError

Rational = Union[int, Fraction]


# =============================================================================
# MULTI-INDICES
# =============================================================================

@dataclass(frozen=True)
class MultiIndex:
    """Exponent vector alpha of the monomial x^alpha."""
    exponents: Tuple[int, ...]

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        if any(e < 0 for e in exps):
            raise DomainError(f"Exponents must be nonnegative, got {exps}")
        object.__setattr__(self, "exponents", exps)

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    def factorial(self) -> int:
        """alpha! = prod alpha_i!"""
        return math.prod(math.factorial(e) for e in self.exponents)

    def multinomial(self) -> int:
        """C(|alpha|, alpha) = |alpha|! / alpha!"""
        return math.factorial(self.degree) // self.factorial()

    def is_even(self) -> bool:
        return all(e % 2 == 0 for e in self.exponents)


def compositions(total: int, parts: int) -> Iterator[MultiIndex]:
    """All multi-indices with `parts` entries summing to `total`."""
    if parts < 1:
        raise DomainError(f"parts must be positive, got {parts}")
    for combo in combinations_with_replacement(range(parts), total):
        exps = [0] * parts
        for slot in combo:
            exps[slot] += 1
        yield MultiIndex(tuple(exps))


def pochhammer(x: Rational, k: int) -> Fraction:
    """
    Rising factorial (x)_k = x(x+1)...(x+k-1).

    (x)_0 = 1 and, by convention, (x)_{-1} = 1/(x-1).
    """
    x = Fraction(x)
    if k == -1:
        if x == 1:
            raise DomainError("(x)_{-1} is undefined at x = 1")
        return 1 / (x - 1)
    if k < -1:
        raise DomainError(f"pochhammer index must be >= -1, got {k}")
    result = Fraction(1)
    for j in range(k):
        result *= x + j
    return result


def _check_dim(d: int) -> None:
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")


def _check_degree(t: int, name: str = "t") -> None:
    if t < 0:
        raise DomainError(f"{name} must be >= 0, got {t}")


# =============================================================================
# SHARP CONSTANTS
# =============================================================================

@lru_cache(maxsize=None)
def c_t_exact(field: FieldTag, d: int, t: int) -> Fraction:
    """c_t(F^d) = prod_{j<t} (m+2j)/(md+2j), exactly."""
    field = FieldTag.parse(field)
    _check_dim(d)
    _check_degree(t)
    m = field.m
    result = Fraction(1)
    for j in range(t):
        result *= Fraction(m + 2 * j, m * d + 2 * j)
    return result


def c_t(field: FieldTag, d: int, t: int) -> float:
    """Mean of |<x, y>|^{2t} over the unit sphere for a fixed unit y."""
    return float(c_t_exact(field, d, t))


def frame_bound(field: FieldTag, d: int, t: int, n: int) -> float:
    """Lower bound c_t n^2 on the order-t frame potential of n unit vectors."""
    return float(c_t_exact(field, d, t) * n * n)


def sphere_monomial_moment_exact(alpha: Union[MultiIndex, Tuple[int, ...]]) -> Fraction:
    """
    Integral of x^alpha over the unit sphere of R^N, N = len(alpha), against
    normalised surface measure.
    """
    if not isinstance(alpha, MultiIndex):
        alpha = MultiIndex(tuple(alpha))
    total_dim = len(alpha.exponents)
    if total_dim < 1:
        raise DomainError("monomial needs at least one coordinate")
    if not alpha.is_even():
        return Fraction(0)
    half = [e // 2 for e in alpha.exponents]
    numerator = math.prod((pochhammer(Fraction(1, 2), h) for h in half), start=Fraction(1))
    return numerator / pochhammer(Fraction(total_dim, 2), sum(half))


def sphere_monomial_moment(alpha: Union[MultiIndex, Tuple[int, ...]]) -> float:
    return float(sphere_monomial_moment_exact(alpha))


# =============================================================================
# APOLAR NORMALISATION
# =============================================================================

def _check_m(m: int) -> None:
    if m not in (1, 2, 4):
        raise DomainError(f"m must be 1, 2 or 4, got {m}")


def b_const(t: int, m: int) -> int:
    """b_{t,m} = prod_{j=1}^t 2j(2j+m-2)."""
    _check_m(m)
    if t < 1:
        raise DomainError(f"t must be >= 1, got {t}")
    return math.prod(2 * j * (2 * j + m - 2) for j in range(1, t + 1))


def b_closed_form(t: int, m: int) -> int:
    """(2t)!, 4^t t!^2 and 4^t t!(t+1)! for m = 1, 2, 4."""
    _check_m(m)
    if m == 1:
        return math.factorial(2 * t)
    if m == 2:
        return 4 ** t * math.factorial(t) ** 2
    return 4 ** t * math.factorial(t) * math.factorial(t + 1)


def b_identity_sum(t: int, m: int) -> int:
    """Brute force sum over |alpha| = t in Z_+^m of (2 alpha)! C(t, alpha)^2."""
    _check_m(m)
    return sum(
        math.prod(math.factorial(2 * e) for e in alpha.exponents) * alpha.multinomial() ** 2
        for alpha in compositions(t, m)
    )


# =============================================================================
# DIMENSIONS AND COUNTING BOUNDS
# =============================================================================

def dim_homtt(field: FieldTag, d: int, t: int) -> int:
    """Dimension of Hom_{F^d}(t,t)."""
    field = FieldTag.parse(field)
    _check_dim(d)
    _check_degree(t)
    if field is FieldTag.R:
        return math.comb(d + 2 * t - 1, 2 * t)
    if field is FieldTag.C:
        return math.comb(d + t - 1, t) ** 2
    top = t + 2 * d - 1
    return math.comb(top, t) * math.comb(top, t + 1) // top


def dim_hom_r(field: FieldTag, d: int, r: int) -> int:
    """Number of monomials of degree r in the md real coordinates."""
    field = FieldTag.parse(field)
    _check_dim(d)
    _check_degree(r, "r")
    md = field.m * d
    return math.comb(r + md - 1, md - 1)


def sic_bound(field: FieldTag, d: int) -> Tuple[int, float]:
    """
    Maximal number of equiangular lines d + (m/2)(d^2 - d) and the common
    angle m/(md+2) such a maximal set must have.
    """
    field = FieldTag.parse(field)
    _check_dim(d)
    m = field.m
    n_max = d + m * (d * d - d) // 2
    return n_max, m / (m * d + 2)


def mub_count_bound(field: FieldTag, d: int) -> int:
    """Largest possible number of mutually unbiased bases, (m/2)d + 1."""
    field = FieldTag.parse(field)
    _check_dim(d)
    return field.m * d // 2 + 1
