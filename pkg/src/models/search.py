"""
Search Data Models
==================
Objectives and results of the exhaustive and stochastic template searches.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.core.template import ColouringTemplate


class Objective(Enum):
    """Objective maximised over gallai templates."""
    SUM = "sum"
    MIN_CLASS = "min"
    GEOMETRIC_MEAN = "geomean"

    def evaluate(self, sizes: Sequence[int]) -> float:
        if self is Objective.SUM:
            return float(sum(sizes))
        if self is Objective.MIN_CLASS:
            return float(min(sizes))
        return float(math.prod(sizes)) ** (1.0 / 3.0)


@dataclass(frozen=True)
class AcceptedMove:
    """An improving toggle taken by local search."""
    step: int
    pair: Tuple[int, int]
    colour: int
    added: bool
    value: float


@dataclass
class SearchResult:
    """
    Best template found by a search.

    Attributes:
        best_value: Objective value of `witness`
        witness: Best template (None when nothing qualified)
        visited: Complete gallai templates visited (exhaustive) or steps taken (local)
        pruned: Whether rainbow pruning was used
        moves: Accepted improving moves (local search only)
    """
    best_value: float
    witness: Optional[ColouringTemplate]
    visited: int
    pruned: bool = True
    moves: List[AcceptedMove] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'best_value': self.best_value,
            'class_sizes': list(self.witness.class_sizes()) if self.witness else None,
            'visited': self.visited,
            'pruned': self.pruned,
            'accepted_moves': len(self.moves),
            **self.metadata,
        }
