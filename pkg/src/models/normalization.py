"""
Normalization Trace Models
==========================
Step-by-step record of the hard-case normalization.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from src.core.matching import MatchingPartition
from src.core.template import ColouringTemplate, Pair


class TraceAction(Enum):
    """Kinds of elementary change made by the normalization."""
    REWRITE = "rewrite"      # drop colour j from a pair and add colour 1 to a missing pair
    DELETE = "delete"        # drop colour j from a pair
    MOVE = "move"            # drop colour j from a pair and add colour j (and 1) to another pair
    SELECT = "select"        # class chosen as second largest in the last step
    EARLY_EXIT = "early_exit"


@dataclass(frozen=True)
class TraceRecord:
    step: int
    action: TraceAction
    edge: Optional[Pair]
    colour_from: int
    colour_to: int
    g_before: float
    g_after: float
    second_class_before: int
    target: Optional[Pair] = None

    def edge_text(self) -> str:
        if self.edge is None:
            return ""
        text = f"{self.edge[0]}-{self.edge[1]}"
        if self.target is not None:
            text += f"+{self.target[0]}-{self.target[1]}"
        return text


@dataclass
class NormalizationTrace:
    """
    Full history of one normalization run.

    Attributes:
        records: Elementary changes in order
        partition: Bichromatic matching partition of the input
        g_before: g of the input template
        g_after: g of the output template
        early_exit: Whether the run stopped because the second class became small
        exit_step: Step (0 = entry, 1..3) at which it stopped
        threshold: C(N,2)/4 + N
        auxiliary_edges: Edge counts (e12, e13, e) of the auxiliary graph
        diagnostics: Warnings about assumptions that did not hold
    """
    records: List[TraceRecord] = field(default_factory=list)
    partition: Optional[MatchingPartition] = None
    g_before: float = 0.0
    g_after: float = 0.0
    early_exit: bool = False
    exit_step: Optional[int] = None
    threshold: float = 0.0
    auxiliary_edges: Tuple[int, int, int] = (0, 0, 0)
    diagnostics: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'records': len(self.records),
            'g_before': self.g_before,
            'g_after': self.g_after,
            'early_exit': self.early_exit,
            'exit_step': self.exit_step,
            'auxiliary_edges': list(self.auxiliary_edges),
            'diagnostics': list(self.diagnostics),
        }


@dataclass
class NormalizationResult:
    template: ColouringTemplate
    trace: NormalizationTrace
