"""
Colouring Templates
===================
A 3-colouring template is a triple (G1, G2, G3) of simple graphs on the
vertex set {0, ..., n-1}. A pair may belong to several classes at once.

Each class is held as one neighbourhood bitset (a Python int) per vertex;
the sorted pair lists are derived from the bitsets on first use. Templates
are immutable: every operation returns a new template.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from src.core.exceptions import ValidationError

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]
Triangle = Tuple[int, int, int]

COLOURS = (1, 2, 3)


def pair_count(n: int) -> int:
    """Number of unordered vertex pairs, C(n, 2)."""
    return n * (n - 1) // 2


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of `mask` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bitmask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def colour_label(in_classes: Sequence[bool]) -> Optional[Tuple[int, int]]:
    """
    Colour-pair label of a pair that lies in at least two classes.

    The first matching pair in the order (1,2), (1,3), (2,3) wins, so a
    rainbow edge is labelled (1, 2).
    """
    for i, j in ((1, 2), (1, 3), (2, 3)):
        if in_classes[i - 1] and in_classes[j - 1]:
            return (i, j)
    return None


@dataclass(frozen=True)
class DensityVector:
    """Exact class densities |G_i| / C(n, 2)."""

    values: Tuple[Fraction, Fraction, Fraction]

    def __getitem__(self, index: int) -> Fraction:
        return self.values[index]

    def __iter__(self):
        return iter(self.values)

    def as_floats(self) -> Tuple[float, float, float]:
        return tuple(float(v) for v in self.values)

    def sorted_desc(self) -> Tuple[Fraction, Fraction, Fraction]:
        return tuple(sorted(self.values, reverse=True))

    def to_dict(self):
        return {
            'exact': [f"{v.numerator}/{v.denominator}" for v in self.values],
            'float': list(self.as_floats()),
        }


class ColouringTemplate:
    """Immutable 3-colouring template backed by per-vertex neighbourhood bitsets."""

    def __init__(self, n: int, rows: Sequence[Sequence[int]]):
        # Callers go through new_template / from_rows, which validate.
        self._n = n
        self._rows: Tuple[Tuple[int, ...], ...] = tuple(tuple(r) for r in rows)

    # ========================================================================
    # CONSTRUCTION
    # ========================================================================

    @classmethod
    def empty(cls, n: int) -> 'ColouringTemplate':
        return cls(n, [[0] * n for _ in COLOURS])

    @classmethod
    def from_rows(cls, n: int, rows: Sequence[Sequence[int]], validate: bool = True) -> 'ColouringTemplate':
        """
        Build a template from three lists of neighbourhood bitsets.

        Raises:
            ValidationError: If a row is asymmetric, has a loop or points outside the vertex set
        """
        if len(rows) != 3:
            raise ValidationError("a template has exactly three classes", field="classes")
        if validate:
            limit = 1 << n
            for c, class_rows in enumerate(rows, start=1):
                if len(class_rows) != n:
                    raise ValidationError(f"class {c} has {len(class_rows)} rows, expected {n}", field="classes")
                for v, row in enumerate(class_rows):
                    if row < 0 or row >= limit:
                        raise ValidationError(f"class {c}, vertex {v}: neighbour outside vertex set", field="classes")
                    if (row >> v) & 1:
                        raise ValidationError(f"class {c}: self-loop at vertex {v}", field="classes")
                    for w in iter_bits(row):
                        if not (class_rows[w] >> v) & 1:
                            raise ValidationError(f"class {c}: pair ({v}, {w}) is not symmetric", field="classes")
        return cls(n, rows)

    # ========================================================================
    # BASIC ACCESSORS
    # ========================================================================

    @property
    def n(self) -> int:
        return self._n

    def rows(self, colour: int) -> Tuple[int, ...]:
        """Neighbourhood bitsets of class `colour` (1-based)."""
        return self._rows[colour - 1]

    def neighbours(self, colour: int, v: int) -> int:
        return self._rows[colour - 1][v]

    def has_edge(self, colour: int, u: int, v: int) -> bool:
        return bool((self._rows[colour - 1][u] >> v) & 1)

    def pair_colours(self, u: int, v: int) -> Tuple[bool, bool, bool]:
        return tuple(bool((class_rows[u] >> v) & 1) for class_rows in self._rows)

    @cached_property
    def classes(self) -> Tuple[Tuple[Pair, ...], ...]:
        """Sorted pair lists (u < v) of the three classes."""
        out = []
        for class_rows in self._rows:
            pairs = []
            for u, row in enumerate(class_rows):
                for v in iter_bits(row >> (u + 1)):
                    pairs.append((u, u + 1 + v))
            out.append(tuple(pairs))
        return tuple(out)

    @cached_property
    def _sizes(self) -> Tuple[int, int, int]:
        return tuple(sum(row.bit_count() for row in class_rows) // 2 for class_rows in self._rows)

    def class_sizes(self) -> Tuple[int, int, int]:
        """(|G1|, |G2|, |G3|)"""
        return self._sizes

    def class_product(self) -> int:
        a, b, c = self._sizes
        return a * b * c

    def geometric_mean(self) -> float:
        return self.class_product() ** (1.0 / 3.0)

    def density_vector(self) -> DensityVector:
        total = pair_count(self._n)
        if total == 0:
            return DensityVector((Fraction(0), Fraction(0), Fraction(0)))
        return DensityVector(tuple(Fraction(s, total) for s in self._sizes))

    # ========================================================================
    # RAINBOW STRUCTURE
    # ========================================================================

    def _rainbow_witnesses(self) -> Iterator[Tuple[int, int, int]]:
        """
        Yield (u, v, common) where uv lies in the smallest class and `common`
        is the bitset of third vertices closing a rainbow triangle on uv.
        """
        order = sorted(range(3), key=lambda i: (self._sizes[i], i))
        pivot, q, r = (self._rows[i] for i in order)
        for u in range(self._n):
            qu, ru = q[u], r[u]
            if not (qu or ru):
                continue
            for offset in iter_bits(pivot[u] >> (u + 1)):
                v = u + 1 + offset
                common = (qu & r[v]) | (ru & q[v])
                if common:
                    yield u, v, common

    def rainbow_triangles(self) -> List[Triangle]:
        """All rainbow triangles as sorted vertex triples, lexicographically ordered."""
        found = set()
        for u, v, common in self._rainbow_witnesses():
            for w in iter_bits(common):
                found.add(tuple(sorted((u, v, w))))
        return sorted(found)

    def first_rainbow_triangle(self) -> Optional[Triangle]:
        for u, v, common in self._rainbow_witnesses():
            w = next(iter_bits(common))
            return tuple(sorted((u, v, w)))
        return None

    def is_gallai(self) -> bool:
        """True iff the template has no rainbow triangle."""
        return next(self._rainbow_witnesses(), None) is None

    def rainbow_edges(self) -> List[Pair]:
        """Pairs lying in all three classes."""
        g1, g2, g3 = self._rows
        out = []
        for u in range(self._n):
            for offset in iter_bits((g1[u] & g2[u] & g3[u]) >> (u + 1)):
                out.append((u, u + 1 + offset))
        return out

    def bichromatic_edges(self) -> List[Tuple[Pair, Tuple[int, int]]]:
        """Pairs lying in at least two classes, with their colour-pair label."""
        g1, g2, g3 = self._rows
        out = []
        for u in range(self._n):
            multi = (g1[u] & g2[u]) | (g1[u] & g3[u]) | (g2[u] & g3[u])
            for offset in iter_bits(multi >> (u + 1)):
                v = u + 1 + offset
                out.append(((u, v), colour_label(self.pair_colours(u, v))))
        return out

    # ========================================================================
    # DERIVED TEMPLATES
    # ========================================================================

    def blow_up(self, k: int, max_vertices: Optional[int] = None) -> 'ColouringTemplate':
        """
        Replace every vertex v by the independent part {v*k, ..., v*k + k - 1}
        and every pair uv of class i by the complete bipartite graph between
        the two parts, in class i.
        """
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            raise ValidationError("blow-up factor must be a positive integer", field="k")
        size = self._n * k
        if max_vertices is not None and size > max_vertices:
            raise ValidationError(f"blow-up would have {size} vertices, limit is {max_vertices}", field="k")
        block = (1 << k) - 1

        def expand(mask: int) -> int:
            out = 0
            for w in iter_bits(mask):
                out |= block << (w * k)
            return out

        rows = []
        for class_rows in self._rows:
            expanded = [expand(row) for row in class_rows]
            rows.append([expanded[x // k] for x in range(size)])
        return ColouringTemplate(size, rows)

    def induced(self, vertices: Iterable[int]) -> 'ColouringTemplate':
        """Sub-template on `vertices`, relabelled 0..|S|-1 in increasing order."""
        chosen = sorted(set(vertices))
        for v in chosen:
            if not isinstance(v, int) or not 0 <= v < self._n:
                raise ValidationError(f"vertex {v} outside 0..{self._n - 1}", field="vertices")
        index: Dict[int, int] = {v: i for i, v in enumerate(chosen)}
        keep = bitmask(chosen)
        rows = []
        for class_rows in self._rows:
            new_rows = []
            for v in chosen:
                row = 0
                for w in iter_bits(class_rows[v] & keep):
                    row |= 1 << index[w]
                new_rows.append(row)
            rows.append(new_rows)
        return ColouringTemplate(len(chosen), rows)

    def shift_classes(self, i: int, j: int) -> 'ColouringTemplate':
        """Replace (G_i, G_j) by (G_i ∪ G_j, G_i ∩ G_j); the rainbow-free property survives."""
        if i not in COLOURS or j not in COLOURS or i == j:
            raise ValidationError(f"cannot shift classes {i} and {j}", field="classes")
        rows = [list(r) for r in self._rows]
        gi, gj = self._rows[i - 1], self._rows[j - 1]
        rows[i - 1] = [a | b for a, b in zip(gi, gj)]
        rows[j - 1] = [a & b for a, b in zip(gi, gj)]
        return ColouringTemplate(self._n, rows)

    def nest_into_largest(self) -> 'ColouringTemplate':
        """
        Shift the largest class against both others so that it contains them,
        then relabel so that it becomes class 1 (other classes keep their order).
        """
        largest = max(COLOURS, key=lambda c: (self._sizes[c - 1], -c))
        nested = self
        for other in COLOURS:
            if other != largest:
                nested = nested.shift_classes(largest, other)
        order = [largest] + [c for c in COLOURS if c != largest]
        return ColouringTemplate(self._n, [nested.rows(c) for c in order])

    # ========================================================================
    # POTENTIAL
    # ========================================================================

    def g_value(self) -> float:
        """
        g = Σ|G_i| - 2·C(N,2) - 2·max(|G_b|,|G_c|) + 2·sqrt(C(N,2)·max(|G_b|,|G_c|)),
        where G_b, G_c are the two classes other than the largest.
        """
        return g_from_sizes(self._n, self._sizes)

    # ========================================================================
    # DUNDER
    # ========================================================================

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ColouringTemplate):
            return NotImplemented
        return self._n == other._n and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self._n, self._rows))

    def __repr__(self) -> str:
        return f"ColouringTemplate(n={self._n}, sizes={self._sizes})"


def new_template(n: int, classes: Sequence[Iterable[Sequence[int]]]) -> ColouringTemplate:
    """
    Build a template from three pair lists.

    Pairs may be given in either orientation; they are stored with u < v.

    Raises:
        ValidationError: On an out-of-range vertex, a self-loop or a duplicate pair
    """
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise ValidationError("n must be a non-negative integer", field="n")
    classes = list(classes)
    if len(classes) != 3:
        raise ValidationError("a template has exactly three classes", field="classes")
    rows = []
    for c, pairs in enumerate(classes, start=1):
        class_rows = [0] * n
        for pair in pairs:
            if len(pair) != 2:
                raise ValidationError(f"class {c}: {pair!r} is not a pair", field=f"classes[{c - 1}]")
            u, v = pair
            for x in (u, v):
                if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < n:
                    raise ValidationError(f"class {c}: vertex {x!r} outside 0..{n - 1}", field=f"classes[{c - 1}]")
            if u == v:
                raise ValidationError(f"class {c}: self-loop at vertex {u}", field=f"classes[{c - 1}]")
            if (class_rows[u] >> v) & 1:
                raise ValidationError(f"class {c}: duplicate pair ({min(u, v)}, {max(u, v)})", field=f"classes[{c - 1}]")
            class_rows[u] |= 1 << v
            class_rows[v] |= 1 << u
        rows.append(class_rows)
    return ColouringTemplate(n, rows)


def g_from_sizes(n: int, sizes: Sequence[int]) -> float:
    """The g potential of any template on n vertices with these class sizes."""
    largest = max(range(3), key=lambda i: (sizes[i], -i))
    second = max(sizes[i] for i in range(3) if i != largest)
    total = pair_count(n)
    return sum(sizes) - 2 * total - 2 * second + 2 * math.sqrt(total * second)


def f_value(n: int, x: float) -> float:
    """f_n(x) = x - sqrt(x·C(n,2)); minimum -C(n,2)/4 at C(n,2)/4, increasing beyond it."""
    if n < 1:
        raise ValidationError(f"n must be at least 1, got {n}", field="n")
    if x < 0:
        raise ValidationError(f"x must be non-negative, got {x}", field="x")
    return x - math.sqrt(x * pair_count(n))
