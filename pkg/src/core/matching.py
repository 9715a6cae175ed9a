"""
Bichromatic Matching
====================
Maximum matching in the graph of pairs that lie in at least two classes,
and the vertex partition it induces.

The matching is found with Edmonds' blossom algorithm (base-array form:
blossoms are contracted by relabelling their vertices' base). Exposed
vertices are tried as roots in increasing order, neighbours are scanned in
increasing order, and each alternating tree is grown breadth-first until the
first exposed vertex is reached. That scan order is the tie-break between
maximum matchings; no lexicographic minimum over augmenting paths is taken.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from src.core.template import ColouringTemplate, Pair, colour_label, iter_bits

logger = logging.getLogger(__name__)

LABELS = ((1, 2), (1, 3), (2, 3))


@dataclass(frozen=True)
class MatchingPartition:
    """Maximum bichromatic matching split by colour-pair label, and the unmatched set D."""

    n: int
    matched: Dict[Tuple[int, int], Tuple[Pair, ...]] = field(default_factory=dict)
    unmatched: Tuple[int, ...] = ()

    def edges(self, label: Tuple[int, int]) -> Tuple[Pair, ...]:
        return self.matched.get(label, ())

    def vertices(self, label: Tuple[int, int]) -> Tuple[int, ...]:
        """V_label: endpoints of the matching edges with that label."""
        return tuple(sorted(v for pair in self.edges(label) for v in pair))

    @property
    def size(self) -> int:
        return sum(len(edges) for edges in self.matched.values())

    def all_edges(self) -> List[Pair]:
        return sorted(pair for label in LABELS for pair in self.edges(label))

    def is_partition(self) -> bool:
        seen: List[int] = []
        for label in LABELS:
            seen.extend(self.vertices(label))
        seen.extend(self.unmatched)
        return sorted(seen) == list(range(self.n))

    def to_dict(self):
        return {
            'n': self.n,
            'M12': [list(p) for p in self.edges((1, 2))],
            'M13': [list(p) for p in self.edges((1, 3))],
            'M23': [list(p) for p in self.edges((2, 3))],
            'D': list(self.unmatched),
        }


def bichromatic_adjacency(template: ColouringTemplate) -> List[int]:
    """Neighbourhood bitsets of the graph of pairs lying in at least two classes."""
    g1, g2, g3 = (template.rows(c) for c in (1, 2, 3))
    return [(a & b) | (a & c) | (b & c) for a, b, c in zip(g1, g2, g3)]


class _Blossom:
    """Single-use solver holding the mutable search state."""

    def __init__(self, adjacency: Sequence[int]):
        self.n = len(adjacency)
        self.neighbours = [list(iter_bits(row)) for row in adjacency]
        self.match = [-1] * self.n

    def _lowest_common_ancestor(self, a: int, b: int, base: List[int], parent: List[int]) -> int:
        on_path = [False] * self.n
        while True:
            a = base[a]
            on_path[a] = True
            if self.match[a] == -1:
                break
            a = parent[self.match[a]]
        while True:
            b = base[b]
            if on_path[b]:
                return b
            b = parent[self.match[b]]

    def _mark_path(self, v: int, stem: int, child: int, base: List[int],
                   parent: List[int], in_blossom: List[bool]) -> None:
        while base[v] != stem:
            in_blossom[base[v]] = True
            in_blossom[base[self.match[v]]] = True
            parent[v] = child
            child = self.match[v]
            v = parent[self.match[v]]

    def _augmenting_path_end(self, root: int, parent: List[int]) -> int:
        """BFS over alternating trees from `root`; returns the exposed end vertex or -1."""
        n = self.n
        used = [False] * n
        base = list(range(n))
        used[root] = True
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for u in self.neighbours[v]:
                if base[v] == base[u] or self.match[v] == u:
                    continue
                if u == root or (self.match[u] != -1 and parent[self.match[u]] != -1):
                    stem = self._lowest_common_ancestor(v, u, base, parent)
                    in_blossom = [False] * n
                    self._mark_path(v, stem, u, base, parent, in_blossom)
                    self._mark_path(u, stem, v, base, parent, in_blossom)
                    for i in range(n):
                        if in_blossom[base[i]]:
                            base[i] = stem
                            if not used[i]:
                                used[i] = True
                                queue.append(i)
                elif parent[u] == -1:
                    parent[u] = v
                    if self.match[u] == -1:
                        return u
                    used[self.match[u]] = True
                    queue.append(self.match[u])
        return -1

    def solve(self) -> List[int]:
        for root in range(self.n):
            if self.match[root] != -1 or not self.neighbours[root]:
                continue
            parent = [-1] * self.n
            end = self._augmenting_path_end(root, parent)
            while end != -1:
                previous = parent[end]
                following = self.match[previous]
                self.match[end] = previous
                self.match[previous] = end
                end = following
        return self.match


def maximum_matching(adjacency: Sequence[int]) -> List[Pair]:
    """Maximum matching of a simple graph given by neighbourhood bitsets, as sorted pairs."""
    mate = _Blossom(adjacency).solve()
    return [(v, w) for v, w in enumerate(mate) if w > v]


def max_bichromatic_matching(template: ColouringTemplate) -> MatchingPartition:
    """
    Maximum matching M of the bichromatic graph, split into M12, M13, M23 by
    the colour-pair label of each matched pair, plus the unmatched vertices D.
    """
    pairs = maximum_matching(bichromatic_adjacency(template))
    matched: Dict[Tuple[int, int], List[Pair]] = {label: [] for label in LABELS}
    covered = set()
    for u, v in pairs:
        matched[colour_label(template.pair_colours(u, v))].append((u, v))
        covered.update((u, v))
    unmatched = tuple(v for v in range(template.n) if v not in covered)
    logger.debug(
        f"Bichromatic matching: |M12|={len(matched[(1, 2)])}, |M13|={len(matched[(1, 3)])}, "
        f"|M23|={len(matched[(2, 3)])}, |D|={len(unmatched)}"
    )
    return MatchingPartition(
        n=template.n,
        matched={label: tuple(sorted(edges)) for label, edges in matched.items()},
        unmatched=unmatched,
    )
