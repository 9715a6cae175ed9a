"""
Construction Data Models
========================
Parameters of the F- and H-constructions and the witnesses built from them.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

from src.core.exceptions import ValidationError
from src.core.template import ColouringTemplate


class ConstructionKind(Enum):
    """The two extremal template families."""
    F = "F"
    H = "H"


class NonForcingCase(Enum):
    """Which family of non-forcing witnesses applies to a triple."""
    BALANCED = "a"
    SMALL_SECOND = "b"
    SMALL_SUM = "c"
    OUTSIDE_PRIME_REGION = "d"
    RESIDUAL = "e"


@dataclass(frozen=True)
class ConstructionParams:
    """
    Part sizes of a construction on n = a + b + c vertices.

    Parts are A = 0..a-1, B = a..a+b-1, C = a+b..n-1.
    """
    kind: ConstructionKind
    a: int
    b: int
    c: int

    def __post_init__(self):
        """Post-initialization validation."""
        for name in ('a', 'b', 'c'):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ValidationError(f"part size {name} must be a non-negative integer", field=name)

    @property
    def n(self) -> int:
        return self.a + self.b + self.c

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind.value, 'a': self.a, 'b': self.b, 'c': self.c}


@dataclass
class NonForcingWitness:
    """
    A template showing that a triple is not forcing.

    Attributes:
        case: The witness family used
        params: Construction parameters at the requested n
        template: The constructed template
        epsilon: Slack used by the case (0 when the case has none)
        densities: Exact density vector of the template
        dominates: Whether the sorted densities beat the sorted triple at this n
        threshold_n: Smallest tested n from which the witness family dominates
    """
    case: NonForcingCase
    params: ConstructionParams
    template: ColouringTemplate
    epsilon: float
    densities: Tuple[float, float, float]
    dominates: bool
    threshold_n: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'case': self.case.value,
            'params': self.params.to_dict(),
            'epsilon': self.epsilon,
            'densities': list(self.densities),
            'dominates': self.dominates,
            'threshold_n': self.threshold_n,
        }


@dataclass
class TheoremWitness:
    """Region witness for a pair (alpha1, alpha2) together with its size margins."""
    params: ConstructionParams
    template: ColouringTemplate
    targets: Tuple[float, float, float]
    margin_constant: float
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'params': self.params.to_dict(),
            'targets': list(self.targets),
            'margin_constant': self.margin_constant,
            'class_sizes': list(self.template.class_sizes()),
        }
