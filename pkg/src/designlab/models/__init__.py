"""
Request and document models validated with pydantic.
"""

from .requests import (
    CatalogRequest,
    CommandSpec,
    ConfigurationModel,
    ConstantsRequest,
    DimRequest,
    HoggarRequest,
    KernelTestRequest,
    OutputFormat,
    SearchOptions,
    SearchRequest,
    VerifyRequest,
)

__all__ = [
    "CatalogRequest",
    "CommandSpec",
    "ConfigurationModel",
    "ConstantsRequest",
    "DimRequest",
    "HoggarRequest",
    "KernelTestRequest",
    "OutputFormat",
    "SearchOptions",
    "SearchRequest",
    "VerifyRequest",
]
