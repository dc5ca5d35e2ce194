"""
Pydantic request models for the designlab CLI and configuration documents.
"""
from enum import Enum
import math
from pathlib import Path
from typing import Any, List, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from designlab.algebra.hilbert import FieldTag

# the two irrational angles of Hoggar's 315-line design in H^3
ANGLE_TOKENS = {
    "g+": (3.0 + math.sqrt(5.0)) / 8.0,
    "g-": (3.0 - math.sqrt(5.0)) / 8.0,
    "g−": (3.0 - math.sqrt(5.0)) / 8.0,
}


def _split_csv(v: Any) -> Any:
    if isinstance(v, str):
        return [item.strip() for item in v.split(",") if item.strip()]
    return v


class OutputFormat(str, Enum):
    """CLI output format."""
    JSON = "json"
    TABLE = "table"


class ConfigurationModel(BaseModel):
    """Configuration JSON document: {"field", "dim", "vectors", "weights"?}."""
    field: FieldTag = Field(..., description="Scalar field R, C or H")
    dim: int = Field(..., ge=1, description="Dimension d of F^d")
    vectors: List[List[List[float]]] = Field(..., min_length=1, description="n vectors of d [w,x,y,z] entries")
    weights: Optional[List[float]] = Field(None, description="Optional positive weights, one per vector")

    @field_validator("field", mode="before")
    @classmethod
    def normalize_field(cls, v: Any) -> Any:
        return v.upper() if isinstance(v, str) else v

    @field_validator("vectors")
    @classmethod
    def validate_entries(cls, v: List[List[List[float]]]) -> List[List[List[float]]]:
        """Every entry is a finite 4-array."""
        for vector in v:
            for entry in vector:
                if len(entry) != 4:
                    raise ValueError("Each entry must be a 4-array [w, x, y, z]")
                if not all(math.isfinite(c) for c in entry):
                    raise ValueError("Entries must be finite")
        return v

    @field_validator("weights")
    @classmethod
    def validate_weights(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        if v is not None and any(not math.isfinite(w) or w <= 0 for w in v):
            raise ValueError("Weights must be finite and strictly positive")
        return v

    @model_validator(mode="after")
    def validate_shape(self) -> "ConfigurationModel":
        for index, vector in enumerate(self.vectors):
            if len(vector) != self.dim:
                raise ValueError(f"Vector {index} has {len(vector)} entries, expected dim={self.dim}")
        if self.weights is not None and len(self.weights) != len(self.vectors):
            raise ValueError(f"{len(self.weights)} weights for {len(self.vectors)} vectors")
        return self


# =============================================================================
# SUBCOMMAND REQUESTS
# =============================================================================

class ConstantsRequest(BaseModel):
    """`constants`: c_t, b_{t,m}, dim Hom(t,t) and the bound c_t n^2."""
    field: FieldTag
    dim: int = Field(..., ge=1)
    t: int = Field(..., ge=0, le=64)
    n: Optional[int] = Field(None, ge=1, description="Vector count for the bound c_t n^2")


class DimRequest(BaseModel):
    """`dim`: closed-form dim Hom(t,t) against the kernel Gram rank."""
    field: FieldTag
    dim: int = Field(..., ge=1)
    t: int = Field(..., ge=0)
    samples: Optional[int] = Field(None, ge=1, description="Random kernels (default 2 dim Hom(t,t))")
    seed: int = Field(0, ge=0)


class VerifyRequest(BaseModel):
    """`verify`: design report for a configuration file."""
    config_path: str = Field(..., min_length=1)
    t: int = Field(..., ge=1)
    tol: Optional[float] = Field(None, gt=0, lt=1)

    @field_validator("config_path")
    @classmethod
    def validate_exists(cls, v: str) -> str:
        if not Path(v).is_file():
            raise ValueError(f"Configuration file not found: {v}")
        return v


class SearchOptions(BaseModel):
    """Parameters of a frame potential minimisation."""
    field: FieldTag
    dim: int = Field(..., ge=1)
    n: int = Field(..., ge=1, description="Number of vectors")
    t: int = Field(..., ge=1, description="Design strength")
    restarts: int = Field(20, ge=1)
    max_iters: int = Field(5000, ge=1)
    seed: int = Field(0, ge=0, le=2 ** 64 - 1)
    grad_tol: float = Field(1e-11, gt=0, description="Stop when the tangent gradient norm falls below this")
    target_gap: float = Field(1e-12, ge=0, description="Stop when the relative gap falls below this")
    workers: int = Field(1, ge=1, description="Processes for independent restarts")


class SearchRequest(SearchOptions):
    """`search`: SearchOptions plus output locations."""
    out: Optional[str] = Field(None, description="Write the best configuration JSON here")
    emit_trajectory: Optional[str] = Field(None, description="Write the (iteration, potential) CSV here")


class CatalogRequest(BaseModel):
    """`catalog`: closed-form configurations."""
    name: Literal["onb", "mub"]
    field: FieldTag
    dim: int = Field(2, ge=1)
    out: Optional[str] = Field(None, description="Write the configuration JSON here instead of stdout")

    @model_validator(mode="after")
    def validate_mub_dim(self) -> "CatalogRequest":
        if self.name == "mub" and self.dim != 2:
            raise ValueError("The MUB family is only defined for --dim 2")
        return self


class HoggarRequest(BaseModel):
    """`hoggar`: regular-scheme design condition for r = 1..t."""
    n: int = Field(..., ge=1)
    dim: int = Field(..., ge=1)
    field: FieldTag
    t: int = Field(..., ge=1)
    angles: List[float] = Field(..., min_length=1)
    counts: List[int] = Field(..., min_length=1)
    tol: float = Field(1e-9, gt=0)

    @field_validator("angles", mode="before")
    @classmethod
    def parse_angles(cls, v: Any) -> Any:
        """Accept decimals and the tokens g+ and g- for (3 +- sqrt 5)/8."""
        items = _split_csv(v)
        if isinstance(items, list):
            return [ANGLE_TOKENS.get(item, item) if isinstance(item, str) else item for item in items]
        return items

    @field_validator("counts", mode="before")
    @classmethod
    def parse_counts(cls, v: Any) -> Any:
        return _split_csv(v)

    @field_validator("angles")
    @classmethod
    def validate_angles(cls, v: List[float]) -> List[float]:
        if any(not 0.0 <= a <= 1.0 for a in v):
            raise ValueError("Angles must lie in [0, 1]")
        return v

    @field_validator("counts")
    @classmethod
    def validate_counts(cls, v: List[int]) -> List[int]:
        if any(c < 0 for c in v):
            raise ValueError("Counts must be nonnegative")
        return v

    @model_validator(mode="after")
    def validate_scheme(self) -> "HoggarRequest":
        if len(self.angles) != len(self.counts):
            raise ValueError(f"{len(self.angles)} angles but {len(self.counts)} counts")
        if sum(self.counts) != self.n - 1:
            raise ValueError(f"Counts sum to {sum(self.counts)}, expected n - 1 = {self.n - 1}")
        return self


class KernelTestRequest(BaseModel):
    """`kernel-test`: random checks of the reproducing property."""
    field: FieldTag
    dim: int = Field(..., ge=1)
    t: int = Field(..., ge=1)
    trials: int = Field(100, ge=1, le=10000)
    terms: int = Field(3, ge=1, le=20, description="Kernels per random combination")
    seed: int = Field(0, ge=0)


Request = Union[
    ConstantsRequest,
    DimRequest,
    VerifyRequest,
    SearchRequest,
    CatalogRequest,
    HoggarRequest,
    KernelTestRequest,
]


class CommandSpec(BaseModel):
    """A validated CLI invocation."""
    subcommand: Literal["constants", "dim", "verify", "search", "catalog", "hoggar", "kernel-test"]
    output_format: OutputFormat = OutputFormat.JSON
    expect_design: bool = False
    request: Request
