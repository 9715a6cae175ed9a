"""
Normalization Service
=====================
Hard-case normalization of a nested gallai template.

Starting from a template with G2 ∪ G3 ⊆ G1 and no rainbow edges, the
normalization takes a maximum bichromatic matching (M12, M13, unmatched D)
and rewrites colour-2/3 edges into colour-1 edges in three passes:

1. pairs between D and the matching edges,
2. pairs inside V12 and inside V13,
3. pairs across V12 × V13, guided by the auxiliary graph on matching edges.

The run stops early as soon as the second class drops below C(N,2)/4 + N.
Every elementary change is recorded in the trace with g before and after.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Tuple

from src.config.settings import RainbowConfig, default_config
from src.core.exceptions import PreconditionError, StructureViolation, ValidationError
from src.core.matching import MatchingPartition, max_bichromatic_matching
from src.core.template import COLOURS, ColouringTemplate, Pair, g_from_sizes, pair_count
from src.models.normalization import NormalizationResult, NormalizationTrace, TraceAction, TraceRecord
from src.utils.formatting import csv_text, fmt

logger = logging.getLogger(__name__)

TRACE_HEADER = ('step', 'action', 'edge', 'colour_from', 'colour_to', 'g_after')


def _pair(u: int, v: int) -> Pair:
    return (u, v) if u < v else (v, u)


def _between(x: Pair, y: Pair) -> List[Pair]:
    """The four pairs joining matching edge x to matching edge y, sorted."""
    return sorted(_pair(u, w) for u in x for w in y)


def second_class_threshold(n: int) -> float:
    return pair_count(n) / 4 + n


# ============================================================================
# AUXILIARY GRAPH AND STRUCTURE
# ============================================================================

@dataclass
class AuxiliaryGraph:
    """
    Graph on the matching edges.

    Two edges of M1j are adjacent when at most three of the four pairs
    between them carry colour j; X in M12 and Y in M13 are adjacent when the
    four pairs between them carry five colours in total.
    """
    within: Dict[int, List[Tuple[Pair, Pair]]] = field(default_factory=dict)
    cross: List[Tuple[Pair, Pair]] = field(default_factory=list)

    @property
    def edge_counts(self) -> Tuple[int, int, int]:
        return len(self.within.get(2, [])), len(self.within.get(3, [])), len(self.cross)


def auxiliary_graph(template: ColouringTemplate, partition: MatchingPartition) -> AuxiliaryGraph:
    graph = AuxiliaryGraph(within={2: [], 3: []})
    for j in (2, 3):
        for x, y in combinations(partition.edges((1, j)), 2):
            if sum(template.has_edge(j, u, v) for u, v in _between(x, y)) <= 3:
                graph.within[j].append((x, y))
    for x in partition.edges((1, 2)):
        for y in partition.edges((1, 3)):
            total = sum(template.has_edge(c, u, v) for u, v in _between(x, y) for c in COLOURS)
            if total == 5:
                graph.cross.append((x, y))
    return graph


def structure_property_holds(template: ColouringTemplate, partition: MatchingPartition) -> bool:
    """
    For j in {2, 3}: at most half of the pairs between V1j and D lie in G_j,
    and every other G_j edge lies inside V1j.
    """
    unmatched = set(partition.unmatched)
    for j in (2, 3):
        inside = set(partition.vertices((1, j)))
        to_unmatched = 0
        for u, v in template.classes[j - 1]:
            if u in inside and v in inside:
                continue
            if (u in inside and v in unmatched) or (v in inside and u in unmatched):
                to_unmatched += 1
                continue
            return False
        if 2 * to_unmatched > len(inside) * len(unmatched):
            return False
    return True


def trace_csv(trace: NormalizationTrace) -> str:
    rows = [
        (r.step, r.action.value, r.edge_text(), r.colour_from or '', r.colour_to or '', fmt(r.g_after))
        for r in trace.records
    ]
    return csv_text(TRACE_HEADER, rows)


# ============================================================================
# WORKING COPY
# ============================================================================

class _WorkingTemplate:
    """Mutable bitset copy of a template with running class sizes."""

    def __init__(self, template: ColouringTemplate):
        self.n = template.n
        self.rows = [list(template.rows(c)) for c in COLOURS]
        self.sizes = list(template.class_sizes())

    def has(self, colour: int, pair: Pair) -> bool:
        u, v = pair
        return bool((self.rows[colour - 1][u] >> v) & 1)

    def add(self, colour: int, pair: Pair) -> bool:
        if self.has(colour, pair):
            return False
        u, v = pair
        self.rows[colour - 1][u] |= 1 << v
        self.rows[colour - 1][v] |= 1 << u
        self.sizes[colour - 1] += 1
        return True

    def remove(self, colour: int, pair: Pair) -> bool:
        if not self.has(colour, pair):
            return False
        u, v = pair
        self.rows[colour - 1][u] &= ~(1 << v)
        self.rows[colour - 1][v] &= ~(1 << u)
        self.sizes[colour - 1] -= 1
        return True

    @property
    def second(self) -> int:
        return max(self.sizes[1], self.sizes[2])

    def g(self) -> float:
        return g_from_sizes(self.n, self.sizes)

    def freeze(self) -> ColouringTemplate:
        return ColouringTemplate(self.n, self.rows)


class _EarlyExit(Exception):
    pass


class _HardCaseRun:
    """One normalization run over a working copy."""

    def __init__(self, template: ColouringTemplate, partition: MatchingPartition):
        self.work = _WorkingTemplate(template)
        self.partition = partition
        self.unmatched = partition.unmatched
        self.threshold = second_class_threshold(template.n)
        self.trace = NormalizationTrace(partition=partition, threshold=self.threshold)
        self.step = 0

    # ------------------------------------------------------------------
    # elementary changes
    # ------------------------------------------------------------------

    def _record(self, action: TraceAction, edge: Optional[Pair], colour_from: int, colour_to: int,
                g_before: float, second_before: int, target: Optional[Pair] = None) -> None:
        self.trace.records.append(TraceRecord(
            step=self.step, action=action, edge=edge, colour_from=colour_from, colour_to=colour_to,
            g_before=g_before, g_after=self.work.g(), second_class_before=second_before, target=target,
        ))
        if self.work.second < self.threshold:
            raise _EarlyExit()

    def replace(self, edge: Pair, colour: int, target: Optional[Pair]) -> None:
        """Drop `colour` from `edge` and add colour 1 to `target` (a plain deletion without one)."""
        g_before, second_before = self.work.g(), self.work.second
        self.work.remove(colour, edge)
        if target is not None and self.work.add(1, target):
            self._record(TraceAction.REWRITE, edge, colour, 1, g_before, second_before, target)
        else:
            self._record(TraceAction.DELETE, edge, colour, 0, g_before, second_before)

    def delete(self, edge: Pair, colour: int) -> None:
        self.replace(edge, colour, None)

    def move(self, edge: Pair, colour: int, target: Pair) -> None:
        g_before, second_before = self.work.g(), self.work.second
        self.work.remove(colour, edge)
        self.work.add(colour, target)
        self.work.add(1, target)
        self._record(TraceAction.MOVE, edge, colour, colour, g_before, second_before, target)

    def first_missing(self, colour: int, pairs: List[Pair]) -> Optional[Pair]:
        return next((p for p in pairs if not self.work.has(colour, p)), None)

    # ------------------------------------------------------------------
    # passes
    # ------------------------------------------------------------------

    def pass_unmatched(self) -> None:
        self.step = 1
        has = self.work.has
        for j, k in ((2, 3), (3, 2)):
            for x in self.partition.edges((1, j)):
                for v in self.unmatched:
                    for w, other in ((x[0], x[1]), (x[1], x[0])):
                        edge = _pair(v, w)
                        if has(1, edge) and has(k, edge):
                            target = _pair(v, other)
                            self.replace(edge, k, None if has(1, target) else target)

        # at most one vertex of D sends two 1j-edges to a matching edge
        for j in (2, 3):
            for x in self.partition.edges((1, j)):
                for v in self.unmatched:
                    if all(has(1, _pair(v, w)) and has(j, _pair(v, w)) for w in x):
                        self.delete(_pair(v, x[0]), j)

    def pass_inside(self) -> None:
        self.step = 2
        for j, k in ((2, 3), (3, 2)):
            for x, y in combinations(self.partition.edges((1, j)), 2):
                between = _between(x, y)
                for edge in between:
                    if self.work.has(k, edge):
                        self.replace(edge, k, self.first_missing(1, between))

    def pass_across(self, aux: AuxiliaryGraph) -> None:
        self.step = 3
        m12, m13 = self.partition.edges((1, 2)), self.partition.edges((1, 3))
        adjacent = set(aux.cross)

        for x in m12:
            for y in m13:
                if (x, y) in adjacent:
                    continue
                between = _between(x, y)
                for edge in between:
                    for c in (2, 3):
                        if self.work.has(c, edge):
                            self.replace(edge, c, self.first_missing(1, between))

        e12, e13, e = aux.edge_counts
        bound = e12 + e13 + (len(m12) + len(m13)) / 2
        if e > bound:
            message = f"auxiliary cross edges e={e} exceed e12+e13+(|M12|+|M13|)/2 = {bound}"
            logger.warning(message)
            self.trace.diagnostics.append(message)

        across = sorted(_pair(u, w) for u in self.partition.vertices((1, 2))
                        for w in self.partition.vertices((1, 3)))

        for j, budget in ((2, min(e12, e)), (3, min(e13, e))):
            sources = [p for p in across if self.work.has(j, p)]
            moved = 0
            for x, y in aux.within[j]:
                if moved >= budget or not sources:
                    break
                target = self.first_missing(j, _between(x, y))
                if target is None:
                    continue
                self.move(sources.pop(0), j, target)
                moved += 1

        while True:
            missing = self.first_missing(1, across)
            if missing is None:
                break
            s2, s3 = self.work.sizes[1], self.work.sizes[2]
            j, k = (2, 3) if s2 >= s3 else (3, 2)
            colour, edge = j, next((p for p in across if self.work.has(j, p)), None)
            if edge is None:
                colour, edge = k, next((p for p in across if self.work.has(k, p)), None)
            if edge is None:
                break
            if s2 == s3:
                g_now = self.work.g()
                self._record(TraceAction.SELECT, None, j, j, g_now, self.work.second)
            self.replace(edge, colour, missing)

        for edge in across:
            for c in (2, 3):
                if self.work.has(c, edge):
                    self.delete(edge, c)


class NormalizationService:
    """Hard-case normalization and the checks made on its output."""

    def __init__(self, config: Optional[RainbowConfig] = None):
        self.config = config or default_config

    def _check_preconditions(self, template: ColouringTemplate) -> None:
        triangle = template.first_rainbow_triangle()
        if triangle is not None:
            raise PreconditionError("gallai", f"rainbow triangle {triangle}")
        rainbow = template.rainbow_edges()
        if rainbow:
            raise PreconditionError("no_rainbow_edges", f"pair {rainbow[0]} lies in all three classes")
        g1, g2, g3 = (template.rows(c) for c in COLOURS)
        for v, (a, b, c) in enumerate(zip(g1, g2, g3)):
            if (b | c) & ~a:
                raise PreconditionError("nested", f"vertex {v} has a colour-2/3 edge outside G1")

    def normalize_hard_case(self, template: ColouringTemplate,
                            c_param: Optional[float] = None) -> NormalizationResult:
        """
        Normalize a nested gallai template with no rainbow edges.

        An input whose second class is already below C(N,2)/4 + N is not
        rejected: it comes back unchanged with a single step-0 early-exit
        record, and the g <= 2N bound is still checked.

        Args:
            template: Input template (G2 ∪ G3 ⊆ G1 required)
            c_param: Hard-case constant; inputs with g < c_param·N are flagged in the diagnostics

        Returns:
            NormalizationResult with the normalized template and its trace

        Raises:
            PreconditionError: Named after the first failed precondition
            StructureViolation: If the output breaks the guaranteed bounds
        """
        c_param = self.config.c_param if c_param is None else c_param
        if c_param <= 0:
            raise ValidationError("c_param must be positive", field="c_param")
        self._check_preconditions(template)

        n = template.n
        partition = max_bichromatic_matching(template)
        run = _HardCaseRun(template, partition)
        trace = run.trace
        trace.g_before = run.work.g()
        logger.info(
            f"Normalizing n={n}: sizes={template.class_sizes()}, g={trace.g_before:.3f}, "
            f"|M12|={len(partition.edges((1, 2)))}, |M13|={len(partition.edges((1, 3)))}, |D|={len(partition.unmatched)}"
        )
        if trace.g_before < c_param * n:
            trace.diagnostics.append(f"g={trace.g_before:.6g} is below c_param*N={c_param * n:.6g}")

        try:
            if run.work.second < run.threshold:
                logger.debug(
                    f"Second class {run.work.second} already below {run.threshold:.3f}; returning the input unchanged"
                )
                raise _EarlyExit()
            run.pass_unmatched()
            run.pass_inside()
            aux = auxiliary_graph(run.work.freeze(), partition)
            trace.auxiliary_edges = aux.edge_counts
            run.pass_across(aux)
        except _EarlyExit:
            trace.early_exit = True
            trace.exit_step = run.step
            g_now = run.work.g()
            trace.records.append(TraceRecord(
                step=run.step, action=TraceAction.EARLY_EXIT, edge=None, colour_from=0, colour_to=0,
                g_before=g_now, g_after=g_now, second_class_before=run.work.second,
            ))

        output = run.work.freeze()
        trace.g_after = run.work.g()

        if trace.early_exit:
            if trace.g_after > 2 * n:
                raise StructureViolation(f"early exit with g={trace.g_after} > 2N={2 * n}")
            logger.info(f"Normalization stopped early in step {trace.exit_step}: g={trace.g_after:.3f}")
        else:
            if not structure_property_holds(output, partition):
                raise StructureViolation("normalized template breaks the partition structure")
            if trace.g_after < trace.g_before - 2 * n:
                message = f"g fell from {trace.g_before:.6g} to {trace.g_after:.6g}, more than 2N"
                logger.warning(message)
                trace.diagnostics.append(message)
            logger.info(f"Normalization finished: {len(trace.records)} changes, g={trace.g_after:.3f}")

        return NormalizationResult(template=output, trace=trace)

    def hard_case_bound_check(self, template: ColouringTemplate, partition: MatchingPartition) -> bool:
        """
        Whether g(template) <= 3N.

        Raises:
            StructureViolation: If the template lacks the structure property for `partition`
        """
        if not structure_property_holds(template, partition):
            raise StructureViolation("template does not have the structure property for this partition")
        return template.g_value() <= 3 * template.n


# Global normalization service instance
_normalization_service = None

def get_normalization_service() -> NormalizationService:
    """Get global normalization service instance"""
    global _normalization_service
    if _normalization_service is None:
        _normalization_service = NormalizationService()
    return _normalization_service
