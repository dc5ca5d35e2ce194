"""
Vectors and weighted vector systems in F^d, F = R, C, H.

The inner product is conjugate-linear in the first slot and right-linear in
the second: <v, w> = sum_j conj(v_j) w_j. Vectors are stored as numpy arrays
of shape (d, 4); a configuration of n vectors as an array of shape (n, d, 4).
"""
from dataclasses import dataclass
from enum import Enum
import json
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from designlab.algebra.quat import Quaternion, qconj, qmul
from designlab.exceptions import (
    ConfigurationError,
    DimensionMismatchError,
    FieldConformanceError,
)

logger = logging.getLogger(__name__)


class FieldTag(str, Enum):
    """Scalar field of the ambient space."""
    R = "R"
    C = "C"
    H = "H"

    @property
    def m(self) -> int:
        """Real dimension of the field."""
        return {"R": 1, "C": 2, "H": 4}[self.value]

    @classmethod
    def parse(cls, value: Any) -> "FieldTag":
        if isinstance(value, FieldTag):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ConfigurationError(f"Unknown field '{value}'; expected one of R, C, H")

    @classmethod
    def from_m(cls, m: int) -> "FieldTag":
        lookup = {1: cls.R, 2: cls.C, 4: cls.H}
        if m not in lookup:
            raise ConfigurationError(f"m must be 1, 2 or 4, got {m}")
        return lookup[m]


def _conforms(entries: np.ndarray, field: FieldTag, atol: float = 0.0) -> bool:
    return bool(np.all(np.abs(entries[..., field.m:]) <= atol))


@dataclass(frozen=True)
class Vector:
    """
    A vector in F^d as d quaternion entries.

    entries has shape (d, 4) and is stored read-only.
    """
    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 4 or arr.shape[0] < 1:
            raise ConfigurationError(f"Vector entries must have shape (d, 4), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ConfigurationError("Vector entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_quaternions(cls, entries: Sequence[Quaternion]) -> "Vector":
        return cls(np.array([q.to_array() for q in entries]))

    @classmethod
    def basis(cls, d: int, index: int) -> "Vector":
        """Standard basis vector e_{index+1} of F^d."""
        arr = np.zeros((d, 4))
        arr[index, 0] = 1.0
        return cls(arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def as_quaternions(self) -> List[Quaternion]:
        return [Quaternion.from_array(row) for row in self.entries]

    def conforms(self, field: FieldTag) -> bool:
        return _conforms(self.entries, field)

    def norm_sq(self) -> float:
        return float(np.sum(self.entries ** 2))

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))

    def scale_right(self, alpha: Quaternion) -> "Vector":
        """Right scalar multiple v*alpha."""
        return Vector(qmul(self.entries, alpha.to_array()))

    def __add__(self, other: "Vector") -> "Vector":
        _check_dims(self, other)
        return Vector(self.entries + other.entries)

    def __sub__(self, other: "Vector") -> "Vector":
        _check_dims(self, other)
        return Vector(self.entries - other.entries)

    def normalized(self) -> "Vector":
        return Vector(self.entries / self.norm())

    def to_list(self) -> List[List[float]]:
        return self.entries.tolist()


def _check_dims(v: Vector, w: Vector) -> None:
    if v.dim != w.dim:
        raise DimensionMismatchError(f"Vectors have dimensions {v.dim} and {w.dim}")


def inner(v: Vector, w: Vector) -> Quaternion:
    """<v, w> = sum_j conj(v_j) w_j."""
    _check_dims(v, w)
    return Quaternion.from_array(np.sum(qmul(qconj(v.entries), w.entries), axis=0))


def abs_ip_sq(v: Vector, w: Vector) -> float:
    """|<v, w>|^2."""
    return inner(v, w).norm_sq()


def gram(vectors: np.ndarray, others: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Quaternion Gram array G[j, k] = <v_j, u_k> for vectors of shape (n, d, 4)
    and others of shape (p, d, 4) (defaults to vectors).

    Returns:
        Array of shape (n, p, 4)
    """
    if others is None:
        others = vectors
    if vectors.shape[1] != others.shape[1]:
        raise DimensionMismatchError(
            f"Vectors have dimensions {vectors.shape[1]} and {others.shape[1]}"
        )
    left = qconj(vectors)[:, None, :, :]
    right = others[None, :, :, :]
    return np.sum(qmul(left, right), axis=2)


def gram_abs_sq(vectors: np.ndarray, others: Optional[np.ndarray] = None) -> np.ndarray:
    """Real matrix of |<v_j, u_k>|^2."""
    return np.sum(gram(vectors, others) ** 2, axis=-1)


# =============================================================================
# CONFIGURATIONS
# =============================================================================

@dataclass(frozen=True)
class Configuration:
    """
    A finite sequence of n vectors in F^d with optional positive weights.

    Weights are stored as given (unnormalised); None means unit weights.
    """
    field: FieldTag
    dim: int
    vectors: np.ndarray
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        field = FieldTag.parse(self.field)
        object.__setattr__(self, "field", field)

        arr = np.array(self.vectors, dtype=float)
        if arr.ndim != 3 or arr.shape[2] != 4:
            raise ConfigurationError(f"vectors must have shape (n, d, 4), got {arr.shape}")
        n, d, _ = arr.shape
        if n < 1:
            raise ConfigurationError("A configuration needs at least one vector")
        if d != self.dim:
            raise DimensionMismatchError(f"Configuration dim={self.dim} but vectors have dimension {d}")
        if not np.all(np.isfinite(arr)):
            raise ConfigurationError("Vector entries must be finite")
        if not _conforms(arr, field):
            raise FieldConformanceError(
                f"Vectors have nonzero components outside {field.value} (m={field.m})"
            )
        if not np.any(arr != 0.0):
            raise ConfigurationError("All vectors are zero")
        arr.setflags(write=False)
        object.__setattr__(self, "vectors", arr)

        if self.weights is not None:
            w = np.array(self.weights, dtype=float).reshape(-1)
            if w.shape[0] != n:
                raise ConfigurationError(f"Got {w.shape[0]} weights for {n} vectors")
            if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
                raise ConfigurationError("Weights must be finite and strictly positive")
            w.setflags(write=False)
            object.__setattr__(self, "weights", w)

    @classmethod
    def from_vectors(
        cls,
        field: FieldTag,
        vectors: Sequence[Vector],
        weights: Optional[Sequence[float]] = None,
    ) -> "Configuration":
        if not vectors:
            raise ConfigurationError("A configuration needs at least one vector")
        dims = {v.dim for v in vectors}
        if len(dims) != 1:
            raise DimensionMismatchError(f"Vectors have mixed dimensions {sorted(dims)}")
        return cls(FieldTag.parse(field), dims.pop(), np.stack([v.entries for v in vectors]),
                   None if weights is None else np.asarray(weights, dtype=float))

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    def vector(self, j: int) -> Vector:
        return Vector(self.vectors[j])

    def weights_or_ones(self) -> np.ndarray:
        return np.ones(self.n) if self.weights is None else np.array(self.weights)

    def norms_sq(self) -> np.ndarray:
        return np.sum(self.vectors ** 2, axis=(1, 2))

    def is_unit_norm(self, tol: float = 1e-9) -> bool:
        return bool(np.all(np.abs(self.norms_sq() - 1.0) <= tol))

    def gram_abs_sq(self) -> np.ndarray:
        return gram_abs_sq(self.vectors)

    def normalized_angles(self) -> np.ndarray:
        """|<v_j,v_k>|^2 / (|v_j|^2 |v_k|^2); rows and columns of zero vectors are 0."""
        norms = self.norms_sq()
        denom = np.outer(norms, norms)
        with np.errstate(divide="ignore", invalid="ignore"):
            angles = np.where(denom > 0.0, self.gram_abs_sq() / denom, 0.0)
        return angles

    def unit_normalized(self) -> "Configuration":
        """Same lines, each vector scaled to unit length; zero vectors dropped."""
        norms = np.sqrt(self.norms_sq())
        keep = norms > 0.0
        weights = None if self.weights is None else self.weights[keep]
        return Configuration(self.field, self.dim, self.vectors[keep] / norms[keep, None, None], weights)

    def unit_form(self, t: int) -> Tuple["Configuration", np.ndarray]:
        """
        Canonical presentation for degree t: unit vectors u_j = v_j/|v_j| and
        weights w_j |v_j|^{2t} / sum_l w_l |v_l|^{2t}, which sum to one.
        """
        norms_sq = self.norms_sq()
        keep = norms_sq > 0.0
        raw = self.weights_or_ones()[keep] * norms_sq[keep] ** t
        unit = Configuration(self.field, self.dim,
                             self.vectors[keep] / np.sqrt(norms_sq[keep])[:, None, None])
        return unit, raw / np.sum(raw)

    def with_weights(self, weights: Optional[Sequence[float]]) -> "Configuration":
        return Configuration(self.field, self.dim, self.vectors,
                             None if weights is None else np.asarray(weights, dtype=float))

    # -------------------------------------------------------------------------
    # serialisation
    # -------------------------------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {
            "field": self.field.value,
            "dim": self.dim,
            "vectors": self.vectors.tolist(),
        }
        if self.weights is not None:
            doc["weights"] = self.weights.tolist()
        return doc

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> "Configuration":
        # imported here: models depends on this module
        from designlab.models.requests import ConfigurationModel

        model = ConfigurationModel.model_validate(doc)
        return cls(FieldTag.parse(model.field), model.dim, np.array(model.vectors, dtype=float),
                   None if model.weights is None else np.array(model.weights, dtype=float))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Configuration":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"Configuration is not valid JSON: {exc}")
        if not isinstance(doc, dict):
            raise ConfigurationError("Configuration JSON must be an object")
        return cls.from_dict(doc)


# =============================================================================
# ANGLE SPECTRUM
# =============================================================================

@dataclass(frozen=True)
class AngleSpectrum:
    """Clustered off-diagonal angles (center, multiplicity) in increasing order."""
    clusters: Tuple[Tuple[float, int], ...]
    tolerance: float

    @property
    def total(self) -> int:
        return sum(count for _, count in self.clusters)

    def values(self) -> List[float]:
        return [value for value, _ in self.clusters]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tolerance": self.tolerance,
            "clusters": [{"angle": value, "multiplicity": count} for value, count in self.clusters],
        }


def cluster_values(values: np.ndarray, tol: float) -> Tuple[Tuple[float, int], ...]:
    """Single-linkage clustering of reals: sorted neighbours closer than tol merge."""
    if values.size == 0:
        return ()
    ordered = np.sort(values)
    breaks = np.nonzero(np.diff(ordered) > tol)[0] + 1
    return tuple((float(np.mean(group)), int(group.size)) for group in np.split(ordered, breaks))


def angle_spectrum(cfg: Configuration, tol: float = 1e-6) -> AngleSpectrum:
    """
    Cluster the n(n-1) ordered off-diagonal angles |<v_j,v_k>|^2/(|v_j|^2 |v_k|^2).
    """
    angles = cfg.normalized_angles()
    off_diagonal = angles[~np.eye(cfg.n, dtype=bool)]
    spectrum = AngleSpectrum(cluster_values(off_diagonal, tol), tol)
    logger.debug(f"Angle spectrum of {cfg.n} vectors: {len(spectrum.clusters)} clusters")
    return spectrum
