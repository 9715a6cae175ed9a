"""
Region Data Models
==================
Canonical representations of density pairs and their region labels.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Tuple


class RegionLabel(Enum):
    """Region of a density pair (alpha1, alpha2)."""
    R1_PRIME = "R1prime"
    R1_MINUS_R1_PRIME = "R1_minus_R1prime"
    R2 = "R2"
    OUTSIDE = "outside"
    INVALID = "invalid"


@dataclass(frozen=True)
class CanonicalRep:
    """
    The unique (x, y, z) with x + y + z = 1, x >= 1/2, x >= z, y >= z >= 0,
    x^2 + y^2 = alpha1 and x^2 + z^2 = alpha2.
    """
    x: float
    y: float
    z: float
    residual_1: float = 0.0
    residual_2: float = 0.0

    @property
    def prime_condition(self) -> float:
        """2x^2 + z^2; the pair lies in the prime region iff this is >= 1."""
        return 2 * self.x ** 2 + self.z ** 2

    def to_dict(self) -> Dict[str, Any]:
        return {'x': self.x, 'y': self.y, 'z': self.z,
                'residual_1': self.residual_1, 'residual_2': self.residual_2}


@dataclass(frozen=True)
class RegionClassification:
    """Region label with the forcing alpha3 where one is defined."""
    alpha1: float
    alpha2: float
    label: RegionLabel
    alpha3: Optional[float] = None
    rep: Optional[CanonicalRep] = None
    on_shared_boundary: bool = False
    alpha3_r2: Optional[float] = None

    @property
    def in_region(self) -> bool:
        return self.label in (RegionLabel.R1_PRIME, RegionLabel.R2)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'alpha1': self.alpha1,
            'alpha2': self.alpha2,
            'label': self.label.value,
            'alpha3': self.alpha3,
            'rep': self.rep.to_dict() if self.rep else None,
            'on_shared_boundary': self.on_shared_boundary,
        }


@dataclass(frozen=True)
class CorollaryMaxima:
    """Maxima of the two three-class products over their parameter domains."""
    h_max: float
    h_argmax: Tuple[float, float]
    f_max: float
    f_argmax: Tuple[float, float]
    upsilon: float
    h_upsilon: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            'h_max': self.h_max, 'h_argmax': list(self.h_argmax),
            'f_max': self.f_max, 'f_argmax': list(self.f_argmax),
            'upsilon': self.upsilon, 'h_upsilon': self.h_upsilon,
        }
