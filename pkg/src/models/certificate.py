"""
Certificate Data Models
=======================
Numerical certificates and the partition profiles of the easy case.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from src.core.exceptions import ValidationError


@dataclass(frozen=True)
class LipschitzCertificate:
    """
    Grid minimum of a Lipschitz function and the lower bound it certifies:
    certified_lower_bound = grid_min - lipschitz * spacing.
    """
    a: float
    b: float
    points: int
    lipschitz: float
    grid_min: float
    argmin: float
    spacing: float
    certified_lower_bound: float

    @property
    def success(self) -> bool:
        return self.certified_lower_bound > 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'interval': [self.a, self.b], 'points': self.points, 'lipschitz': self.lipschitz,
            'grid_min': self.grid_min, 'argmin': self.argmin, 'spacing': self.spacing,
            'certified_lower_bound': self.certified_lower_bound, 'success': self.success,
        }


@dataclass(frozen=True)
class DerivativeBoundStage:
    """One majorant in the chain bounding |k'| on [0, 1]."""
    name: str
    grid_max: float


@dataclass(frozen=True)
class DerivativeBoundReport:
    stages: Tuple[DerivativeBoundStage, ...]
    derivative_max: float
    closed_form: float
    dominated: bool


@dataclass(frozen=True)
class PartitionProfile:
    """
    Part densities of the easy case: a12, a13, a23 for the matched parts and d
    for the unmatched part.
    """
    a12: float
    a13: float
    a23: float
    d: float

    def __post_init__(self):
        """Post-initialization validation."""
        for name in ('a12', 'a13', 'a23', 'd'):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be non-negative", field=name)

    @property
    def total(self) -> float:
        return self.a12 + self.a13 + self.a23 + self.d

    def delta(self, y: float) -> float:
        """a13^2 + d*a13 - y^2."""
        return self.a13 ** 2 + self.d * self.a13 - y ** 2

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.a12, self.a13, self.a23, self.d)

    def to_dict(self) -> Dict[str, Any]:
        return {'a12': self.a12, 'a13': self.a13, 'a23': self.a23, 'd': self.d}


@dataclass
class Lemma28Report:
    """
    Outcome of the partition-profile search for a good pair.

    Attributes:
        counterexample: A profile satisfying all seven strict inequalities, if any
        non_strict_profile: A profile feasible once the third inequality is relaxed to >=
        points_checked: Grid points evaluated
        best_slack: Largest worst-case slack seen (negative means infeasible)
    """
    alpha1: float
    alpha2: float
    step: float
    sum_bound: float
    counterexample: Optional[PartitionProfile] = None
    non_strict_profile: Optional[PartitionProfile] = None
    points_checked: int = 0
    best_slack: float = float('-inf')
    refined_points: List[PartitionProfile] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'alpha1': self.alpha1, 'alpha2': self.alpha2, 'step': self.step, 'sum_bound': self.sum_bound,
            'counterexample': self.counterexample.to_dict() if self.counterexample else None,
            'non_strict_profile': self.non_strict_profile.to_dict() if self.non_strict_profile else None,
            'points_checked': self.points_checked, 'best_slack': self.best_slack,
        }
