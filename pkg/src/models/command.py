"""
Command Result Model
====================
Outcome of a single CLI invocation.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List


@dataclass
class CommandResult:
    """Exit code, human-readable report and any files written."""

    exit_code: int
    report: str = ""
    outputs: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.exit_code == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'exit_code': self.exit_code,
            'report': self.report,
            'outputs': list(self.outputs),
        }
