"""
Search Service
==============
Exhaustive and stochastic searches over gallai templates.

The exhaustive search assigns each vertex pair a subset of the three classes
(a 3-bit mask) in triangles-first order, so that every triangle is checked
for a rainbow colouring as soon as its last pair is assigned.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations, permutations
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from src.config.settings import RainbowConfig, default_config
from src.core.exceptions import PreconditionError, SearchLimitError, ValidationError
from src.core.template import ColouringTemplate, Pair, pair_count
from src.core.template_io import template_to_json
from src.models.search import AcceptedMove, Objective, SearchResult
from src.services.construction_service import ConstructionService, get_construction_service

logger = logging.getLogger(__name__)

SizeObjective = Callable[[Sequence[int]], float]

MASKS_INCLUDE_FIRST = tuple(range(7, -1, -1))


def _rainbow_table() -> Tuple[bool, ...]:
    """rainbow[(m1 << 6) | (m2 << 3) | m3]: three pair masks admit distinct colours."""
    table = []
    for m1 in range(8):
        for m2 in range(8):
            for m3 in range(8):
                table.append(any(
                    (m1 >> c1) & 1 and (m2 >> c2) & 1 and (m3 >> c3) & 1
                    for c1, c2, c3 in permutations(range(3))
                ))
    return tuple(table)


RAINBOW = _rainbow_table()


def decision_order(n: int) -> List[Pair]:
    """Pairs ordered so that the three pairs of each early triangle are adjacent."""
    order: List[Pair] = []
    seen = set()
    for u, v, w in combinations(range(n), 3):
        for pair in ((u, v), (u, w), (v, w)):
            if pair not in seen:
                seen.add(pair)
                order.append(pair)
    for pair in combinations(range(n), 2):
        if pair not in seen:
            order.append(pair)
    return order


def template_from_masks(n: int, pairs: Sequence[Pair], masks: Sequence[int]) -> ColouringTemplate:
    rows = [[0] * n for _ in range(3)]
    for (u, v), mask in zip(pairs, masks):
        for c in range(3):
            if (mask >> c) & 1:
                rows[c][u] |= 1 << v
                rows[c][v] |= 1 << u
    return ColouringTemplate(n, rows)


class _Enumeration:
    """Depth-first search over pair masks for one shard (fixed mask of the first pair)."""

    def __init__(self, n: int, objective: SizeObjective, pruned: bool):
        self.n = n
        self.objective = objective
        self.pruned = pruned
        self.pairs = decision_order(n)
        index = {pair: t for t, pair in enumerate(self.pairs)}
        self.closing: List[List[Tuple[int, int, int]]] = [[] for _ in self.pairs]
        self.triangles: List[Tuple[int, int, int]] = []
        for u, v, w in combinations(range(n), 3):
            ids = (index[(u, v)], index[(u, w)], index[(v, w)])
            self.triangles.append(ids)
            self.closing[max(ids)].append(ids)
        self.masks = [0] * len(self.pairs)
        self.sizes = [0, 0, 0]
        self.visited = 0
        self.best_key: Optional[Tuple[float, Tuple[int, int, int]]] = None
        self.best_masks: Optional[Tuple[int, ...]] = None

    def _is_rainbow(self, ids: Tuple[int, int, int]) -> bool:
        m = self.masks
        return RAINBOW[(m[ids[0]] << 6) | (m[ids[1]] << 3) | m[ids[2]]]

    def _leaf(self) -> None:
        if not self.pruned and any(self._is_rainbow(ids) for ids in self.triangles):
            return
        self.visited += 1
        key = (self.objective(self.sizes), tuple(self.sizes))
        if self.best_key is None or key > self.best_key:
            self.best_key, self.best_masks = key, tuple(self.masks)
        elif key == self.best_key and self._serial(self.masks) < self._serial(self.best_masks):
            self.best_masks = tuple(self.masks)

    def _serial(self, masks: Sequence[int]) -> str:
        return template_to_json(template_from_masks(self.n, self.pairs, masks))

    def _descend(self, t: int) -> None:
        if t == len(self.pairs):
            self._leaf()
            return
        for mask in MASKS_INCLUDE_FIRST:
            self.masks[t] = mask
            if self.pruned and any(self._is_rainbow(ids) for ids in self.closing[t]):
                continue
            for c in range(3):
                self.sizes[c] += (mask >> c) & 1
            self._descend(t + 1)
            for c in range(3):
                self.sizes[c] -= (mask >> c) & 1
        self.masks[t] = 0

    def run(self, first_mask: Optional[int]) -> '_Enumeration':
        if first_mask is None:
            self._descend(0)
            return self
        self.masks[0] = first_mask
        if self.pruned and any(self._is_rainbow(ids) for ids in self.closing[0]):
            return self
        for c in range(3):
            self.sizes[c] += (first_mask >> c) & 1
        self._descend(1)
        return self


class SearchService:
    """Exhaustive enumeration, local search and the forcing probe."""

    def __init__(self, config: Optional[RainbowConfig] = None,
                 constructions: Optional[ConstructionService] = None):
        self.config = config or default_config
        self.constructions = constructions or (ConstructionService(config) if config else get_construction_service())

    # ========================================================================
    # EXHAUSTIVE ENUMERATION
    # ========================================================================

    def enumerate_gallai(self, n: int, objective: Objective, pruned: bool = True) -> SearchResult:
        """
        Maximise `objective` over all gallai templates on n vertices.

        Ties are broken by the larger class-size vector, then by the smaller
        canonical serialization, so the witness does not depend on sharding.

        Raises:
            SearchLimitError: If n exceeds the configured exhaustive limit
        """
        if not isinstance(n, int) or n < 0:
            raise ValidationError("n must be a non-negative integer", field="n")
        allowed = n <= self.config.exhaustive_limit or (n == 5 and pruned and self.config.allow_pruned_n5)
        if not allowed:
            raise SearchLimitError(
                f"exhaustive search on n={n} exceeds the limit {self.config.exhaustive_limit}"
            )
        logger.info(f"Enumerating gallai templates on n={n} for '{objective.value}' (pruned={pruned})")

        if pair_count(n) == 0:
            shards = [_Enumeration(n, objective.evaluate, pruned).run(None)]
        else:
            def shard(mask: int) -> _Enumeration:
                return _Enumeration(n, objective.evaluate, pruned).run(mask)

            if self.config.workers > 1:
                with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                    shards = list(pool.map(shard, MASKS_INCLUDE_FIRST))
            else:
                shards = [shard(mask) for mask in MASKS_INCLUDE_FIRST]

        best = None
        for result in shards:
            if result.best_key is None:
                continue
            if best is None or result.best_key > best.best_key:
                best = result
            elif result.best_key == best.best_key and \
                    result._serial(result.best_masks) < best._serial(best.best_masks):
                best = result

        visited = sum(result.visited for result in shards)
        witness = template_from_masks(n, best.pairs, best.best_masks)
        logger.info(f"Best {objective.value} on n={n}: {best.best_key[0]} over {visited} gallai templates")
        return SearchResult(
            best_value=best.best_key[0],
            witness=witness,
            visited=visited,
            pruned=pruned,
            metadata={'exhaustive': True, 'objective': objective.value},
        )

    # ========================================================================
    # LOCAL SEARCH
    # ========================================================================

    def local_search(self, n: int, objective, init: ColouringTemplate,
                     budget: Optional[int] = None, seed: Optional[int] = None) -> SearchResult:
        """
        Hill-climb over single pair/class toggles that keep the template
        gallai, accepting strict improvements only.

        Args:
            n: Number of vertices (must match `init`)
            objective: An Objective or a function of the class sizes
            init: Gallai starting template
            budget: Number of proposed toggles
            seed: Seed of the proposal stream

        Raises:
            PreconditionError: If `init` is not gallai
        """
        budget = self.config.search_budget if budget is None else budget
        seed = self.config.search_seed if seed is None else seed
        evaluate = objective.evaluate if isinstance(objective, Objective) else objective
        if init.n != n:
            raise ValidationError(f"initial template has {init.n} vertices, expected {n}", field="init")
        if not init.is_gallai():
            raise PreconditionError("gallai", f"initial template contains rainbow triangle {init.first_rainbow_triangle()}")

        rows = [list(init.rows(c)) for c in (1, 2, 3)]
        sizes = list(init.class_sizes())
        value = evaluate(sizes)
        moves: List[AcceptedMove] = []
        pairs = list(combinations(range(n), 2))

        if pairs and budget > 0:
            rng = np.random.default_rng(seed)
            picks = rng.integers(0, len(pairs), size=budget)
            colours = rng.integers(0, 3, size=budget)
            for step in range(budget):
                u, v = pairs[picks[step]]
                c = int(colours[step])
                present = (rows[c][u] >> v) & 1
                if not present:
                    q, r = rows[(c + 1) % 3], rows[(c + 2) % 3]
                    if (q[u] & r[v]) | (r[u] & q[v]):
                        continue
                sizes[c] += -1 if present else 1
                candidate = evaluate(sizes)
                if candidate > value + 1e-12:
                    rows[c][u] ^= 1 << v
                    rows[c][v] ^= 1 << u
                    value = candidate
                    moves.append(AcceptedMove(step, (u, v), c + 1, not present, value))
                else:
                    sizes[c] -= -1 if present else 1

        logger.debug(f"Local search on n={n}: {len(moves)} improving moves in {budget} steps, value {value}")
        return SearchResult(
            best_value=value,
            witness=ColouringTemplate(n, rows),
            visited=budget,
            pruned=False,
            moves=moves,
            metadata={'exhaustive': False, 'seed': seed},
        )

    # ========================================================================
    # FORCING PROBE
    # ========================================================================

    def forcing_probe(self, alpha1: float, alpha2: float, alpha3: float, n: int,
                      c_param: Optional[float] = None, budget: Optional[int] = None,
                      seed: Optional[int] = None) -> Optional[ColouringTemplate]:
        """
        Look for a gallai template with |G_i| >= alpha_i C(n,2) - c_param*n for
        every class, starting from the region witness of (alpha1, alpha2) when
        there is one and from the empty template otherwise.
        """
        c_param = self.config.probe_slack if c_param is None else c_param
        total = pair_count(n)
        targets = (alpha1 * total, alpha2 * total, alpha3 * total)
        slack = c_param * n

        def margin(sizes: Sequence[int]) -> float:
            return min(s - t for s, t in zip(sizes, targets))

        init = ColouringTemplate.empty(n)
        try:
            init = self.constructions.theorem_witness(alpha1, alpha2, n).template
        except ValidationError as e:
            logger.debug(f"No region witness for ({alpha1}, {alpha2}): {e}")

        result = self.local_search(n, margin, init, budget=budget, seed=seed)
        found = result.best_value >= -slack
        logger.info(f"Forcing probe ({alpha1}, {alpha2}, {alpha3}) on n={n}: best margin {result.best_value:.1f}, "
                    f"needed >= {-slack:.1f}, {'present' if found else 'absent'}")
        return result.witness if found else None


# Global search service instance
_search_service = None

def get_search_service() -> SearchService:
    """Get global search service instance"""
    global _search_service
    if _search_service is None:
        _search_service = SearchService()
    return _search_service
