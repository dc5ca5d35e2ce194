"""
Quaternion scalars.

A single Quaternion value type for scalar work, plus vectorised helpers that
treat any numpy array with a trailing axis of length 4 as an array of
quaternions (w, x, y, z). Real and complex scalars are quaternions whose
trailing components are zero.
"""
from dataclasses import dataclass
import math
from typing import List, Sequence, Tuple, Union

import numpy as np

from designlab.exceptions import DomainError

Real = Union[int, float]


@dataclass(frozen=True)
class Quaternion:
    """
    q = w + x i + y j + z k with double-precision components.

    Multiplication follows ij = k, jk = i, ki = j and is not commutative.
    """
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        for name in ("w", "x", "y", "z"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"Quaternion component {name}={value} is not finite")
            object.__setattr__(self, name, value)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "Quaternion":
        """Build from a [w, x, y, z] sequence."""
        if len(values) != 4:
            raise DomainError(f"Quaternion needs 4 components, got {len(values)}")
        return cls(*(float(v) for v in values))

    def to_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z], dtype=float)

    def to_list(self) -> List[float]:
        return [self.w, self.x, self.y, self.z]

    def __add__(self, other: "Quaternion") -> "Quaternion":
        if isinstance(other, (int, float)):
            other = Quaternion(other)
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    __radd__ = __add__

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        if isinstance(other, (int, float)):
            other = Quaternion(other)
        return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other: Union["Quaternion", Real]) -> "Quaternion":
        if isinstance(other, (int, float)):
            return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)
        return mul(self, other)

    def __rmul__(self, other: Real) -> "Quaternion":
        # real scalars are central, so left and right scaling agree
        return self.__mul__(other)

    def __truediv__(self, other: Real) -> "Quaternion":
        return Quaternion(self.w / other, self.x / other, self.y / other, self.z / other)

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    @property
    def re(self) -> float:
        return self.w

    def norm_sq(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def isclose(self, other: "Quaternion", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.to_array(), other.to_array(), rtol=0.0, atol=atol))

    def __repr__(self) -> str:
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)

# i_1..i_4; the first m of them span R, C or H
UNITS: Tuple[Quaternion, ...] = (ONE, I, J, K)


def mul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product a*b."""
    return Quaternion(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )


def conj(q: Quaternion) -> Quaternion:
    return q.conj()


def re(q: Quaternion) -> float:
    return q.re


def norm(q: Quaternion) -> float:
    return q.norm()


def unit_sums(q: Quaternion, m: int) -> Tuple[Quaternion, Quaternion]:
    """
    Return (sum_r i_r q i_r, sum_r i_r q conj(i_r)) over the first m units.

    For q in the field of real dimension m = 1, 2, 4 these are (q, q), (0, 2q)
    and (-2 conj(q), 4 Re(q)).
    """
    if m not in (1, 2, 4):
        raise DomainError(f"m must be 1, 2 or 4, got {m}")
    first = Quaternion()
    second = Quaternion()
    for unit in UNITS[:m]:
        first = first + unit * q * unit
        second = second + unit * q * unit.conj()
    return first, second


# =============================================================================
# VECTORISED ARITHMETIC
# =============================================================================

def qmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Hamilton product of quaternion arrays, broadcasting over leading axes.

    Args:
        a: Array of shape (..., 4)
        b: Array of shape (..., 4)

    Returns:
        Array of shape broadcast(a, b)
    """
    aw, ax, ay, az = np.moveaxis(np.asarray(a, dtype=float), -1, 0)
    bw, bx, by, bz = np.moveaxis(np.asarray(b, dtype=float), -1, 0)
    return np.stack(
        (
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ),
        axis=-1,
    )


def qconj(a: np.ndarray) -> np.ndarray:
    """Componentwise conjugate of a quaternion array."""
    out = np.array(a, dtype=float, copy=True)
    out[..., 1:] *= -1.0
    return out
