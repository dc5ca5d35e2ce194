"""
Runtime settings, overridable through DESIGNLAB_* environment variables.
"""
from functools import lru_cache
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class DesignLabSettings(BaseSettings):
    """Defaults shared by the library and the CLI."""

    model_config = SettingsConfigDict(env_prefix="DESIGNLAB_")

    log_level: str = Field("WARNING", description="Root logging level")
    log_file: Optional[str] = Field(None, description="Rotating log file (console only when unset)")

    design_tol: float = Field(1e-9, gt=0, description="Relative gap tolerance for exact inputs")
    search_tol: float = Field(1e-6, gt=0, description="Relative gap tolerance for search outputs")
    angle_tol: float = Field(1e-6, gt=0, description="Single-linkage tolerance for angle spectra")

    bessel_probe_count: int = Field(32, ge=0, description="Random unit probes for the Bessel identity")
    bessel_probe_seed: int = Field(20200, ge=0, description="Seed for the Bessel probes")
    cubature_max_monomials: int = Field(
        20000, ge=1, description="Largest monomial count for the symbolic cubature check"
    )

    show_progress: bool = Field(False, description="Show a tqdm bar over search restarts")


@lru_cache(maxsize=1)
def get_settings() -> DesignLabSettings:
    """Return the process-wide settings instance."""
    return DesignLabSettings()
