"""
Scalar and vector algebra over R, C and H.
"""

from .quat import Quaternion, qconj, qmul
from .hilbert import (
    AngleSpectrum,
    Configuration,
    FieldTag,
    Vector,
    abs_ip_sq,
    angle_spectrum,
    inner,
)

__all__ = [
    "Quaternion",
    "qmul",
    "qconj",
    "FieldTag",
    "Vector",
    "Configuration",
    "AngleSpectrum",
    "inner",
    "abs_ip_sq",
    "angle_spectrum",
]
