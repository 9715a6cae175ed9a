import unittest
from fractions import Fraction
from itertools import combinations, permutations

import networkx as nx
import numpy as np

from src.core.exceptions import ValidationError
from src.core.template import ColouringTemplate, f_value, g_from_sizes, new_template, pair_count
from src.services.construction_service import build_F, build_H


def random_template(n, density, seed):
    rng = np.random.default_rng(seed)
    classes = [[], [], []]
    for pair in combinations(range(n), 2):
        for c in range(3):
            if rng.random() < density:
                classes[c].append(pair)
    return new_template(n, classes)


def rainbow_oracle(template):
    """Rainbow triangles found by scanning the triangles of the union graph."""
    union = nx.Graph()
    union.add_nodes_from(range(template.n))
    for pairs in template.classes:
        union.add_edges_from(pairs)
    found = []
    for clique in nx.enumerate_all_cliques(union):
        if len(clique) < 3:
            continue
        if len(clique) > 3:
            break
        u, v, w = sorted(clique)
        sides = ((u, v), (u, w), (v, w))
        if any(all(template.has_edge(c, *side) for c, side in zip(colours, sides))
               for colours in permutations((1, 2, 3))):
            found.append((u, v, w))
    return sorted(found)


def naive_rainbow_scan(template):
    """Every triple and every assignment of the three colours to its sides."""
    found = []
    for u, v, w in combinations(range(template.n), 3):
        sides = ((u, v), (u, w), (v, w))
        if any(all(template.has_edge(c, *side) for c, side in zip(colours, sides))
               for colours in permutations((1, 2, 3))):
            found.append((u, v, w))
    return found


def random_gallai_template(n, seed):
    """Greedy random insertions, each kept only while the template stays gallai."""
    rng = np.random.default_rng(seed)
    classes = [[], [], []]
    pairs = list(combinations(range(n), 2))
    for index in rng.permutation(len(pairs) * 3):
        pair, colour = pairs[int(index) // 3], int(index) % 3
        classes[colour].append(pair)
        if not new_template(n, classes).is_gallai():
            classes[colour].pop()
    return new_template(n, classes)


class TestColouringTemplate(unittest.TestCase):
    def test_monochromatic_triangle_is_gallai(self):
        k3 = [(0, 1), (0, 2), (1, 2)]
        template = new_template(3, [k3, k3, []])
        self.assertTrue(template.is_gallai())
        self.assertEqual(template.class_sizes(), (3, 3, 0))
        self.assertEqual(template.rainbow_triangles(), [])

    def test_rainbow_triangle_detected(self):
        template = new_template(3, [[(0, 1)], [(0, 2)], [(1, 2)]])
        self.assertFalse(template.is_gallai())
        self.assertEqual(template.rainbow_triangles(), [(0, 1, 2)])
        self.assertEqual(template.first_rainbow_triangle(), (0, 1, 2))

    def test_pair_in_several_classes_counts_once_per_triangle(self):
        k3 = [(0, 1), (0, 2), (1, 2)]
        template = new_template(3, [k3, k3, k3])
        self.assertEqual(template.rainbow_triangles(), [(0, 1, 2)])
        self.assertEqual(template.rainbow_edges(), k3)

    def test_rainbow_triangles_match_oracle(self):
        for seed in range(6):
            template = random_template(9, 0.35, seed)
            self.assertEqual(template.rainbow_triangles(), rainbow_oracle(template), f"seed {seed}")
            self.assertEqual(template.is_gallai(), not rainbow_oracle(template))

    def test_rainbow_triangles_match_naive_scan_up_to_sixty(self):
        for n, density in ((20, 0.4), (40, 0.2), (60, 0.12)):
            template = random_template(n, density, seed=n)
            self.assertEqual(template.rainbow_triangles(), naive_rainbow_scan(template), f"n={n}")

    def test_bichromatic_labels(self):
        template = new_template(4, [[(0, 1), (0, 2), (0, 3)], [(0, 1), (2, 3)], [(0, 2), (0, 3), (2, 3)]])
        labels = dict(template.bichromatic_edges())
        self.assertEqual(labels, {(0, 1): (1, 2), (0, 2): (1, 3), (0, 3): (1, 3), (2, 3): (2, 3)})

    def test_rainbow_edge_labelled_first_pair(self):
        template = new_template(2, [[(0, 1)], [(0, 1)], [(0, 1)]])
        self.assertEqual(template.bichromatic_edges(), [((0, 1), (1, 2))])

    def test_density_vector_is_exact(self):
        template = build_F(2, 2, 2)
        self.assertEqual(template.class_sizes(), (2, 2, 14))
        self.assertEqual(tuple(template.density_vector()), (Fraction(2, 15), Fraction(2, 15), Fraction(14, 15)))

    def test_density_vector_without_pairs(self):
        template = ColouringTemplate.empty(1)
        self.assertEqual(template.density_vector().as_floats(), (0.0, 0.0, 0.0))

    def test_orientation_is_normalised(self):
        a = new_template(3, [[(2, 0)], [], []])
        b = new_template(3, [[(0, 2)], [], []])
        self.assertEqual(a, b)
        self.assertEqual(hash(a), hash(b))
        self.assertEqual(a.classes[0], ((0, 2),))

    def test_invalid_pairs_rejected(self):
        with self.assertRaises(ValidationError):
            new_template(3, [[(1, 1)], [], []])
        with self.assertRaises(ValidationError):
            new_template(3, [[(0, 1), (1, 0)], [], []])
        with self.assertRaises(ValidationError) as ctx:
            new_template(3, [[], [(0, 3)], []])
        self.assertEqual(ctx.exception.field, "classes[1]")
        with self.assertRaises(ValidationError):
            new_template(-1, [[], [], []])

    def test_from_rows_checks_symmetry(self):
        with self.assertRaises(ValidationError):
            ColouringTemplate.from_rows(2, [[0b10, 0], [0, 0], [0, 0]])
        template = ColouringTemplate.from_rows(2, [[0b10, 0b01], [0, 0], [0, 0]])
        self.assertEqual(template.class_sizes(), (1, 0, 0))


class TestDerivedTemplates(unittest.TestCase):
    def test_blow_up_scales_sizes_and_keeps_gallai(self):
        template = build_F(2, 2, 2)
        blown = template.blow_up(2)
        self.assertEqual(blown.n, 12)
        self.assertEqual(blown.class_sizes(), (8, 8, 56))
        self.assertTrue(blown.is_gallai())
        self.assertTrue(blown.has_edge(3, 0, 4))
        self.assertFalse(blown.has_edge(3, 0, 1))

    def test_blow_up_preserves_gallai_status(self):
        for seed in range(8):
            template = random_template(5, 0.4, seed)
            for k in range(1, 5):
                self.assertEqual(template.blow_up(k).is_gallai(), template.is_gallai(), f"seed {seed}, k={k}")
        gallai = random_gallai_template(6, seed=2)
        for k in range(1, 5):
            self.assertTrue(gallai.blow_up(k).is_gallai())

    def test_blow_up_limits(self):
        template = build_H(2, 1, 1)
        with self.assertRaises(ValidationError):
            template.blow_up(0)
        with self.assertRaises(ValidationError):
            template.blow_up(10, max_vertices=39)
        self.assertEqual(template.blow_up(1), template)

    def test_induced_relabels(self):
        template = build_F(2, 2, 2)
        sub = template.induced([4, 0, 1])
        self.assertEqual(sub.n, 3)
        self.assertEqual(sub.classes[0], ((0, 1),))
        self.assertEqual(sub.classes[1], ((0, 1),))
        self.assertEqual(sub.classes[2], ((0, 2), (1, 2)))
        with self.assertRaises(ValidationError):
            template.induced([0, 9])

    def test_shift_classes(self):
        for seed in range(4):
            template = random_template(8, 0.3, seed)
            shifted = template.shift_classes(1, 2)
            self.assertEqual(sum(shifted.class_sizes()), sum(template.class_sizes()))
            self.assertEqual(shifted.rows(3), template.rows(3))
            for a, b in zip(shifted.rows(1), shifted.rows(2)):
                self.assertEqual(b & ~a, 0)
        with self.assertRaises(ValidationError):
            template.shift_classes(2, 2)
        with self.assertRaises(ValidationError):
            template.shift_classes(1, 4)

    def test_shift_keeps_gallai(self):
        template = build_H(3, 2, 2)
        for i, j in permutations((1, 2, 3), 2):
            self.assertTrue(template.shift_classes(i, j).is_gallai())

    def test_nest_into_largest(self):
        template = build_F(3, 2, 1)
        nested = template.nest_into_largest()
        self.assertEqual(sum(nested.class_sizes()), sum(template.class_sizes()))
        self.assertTrue(nested.is_gallai())
        g1, g2, g3 = (nested.rows(c) for c in (1, 2, 3))
        for a, b, c in zip(g1, g2, g3):
            self.assertEqual((b | c) & ~a, 0)
        self.assertEqual(nested.class_sizes()[0], max(nested.class_sizes()))


class TestPotential(unittest.TestCase):
    def test_g_of_empty_template(self):
        self.assertEqual(ColouringTemplate.empty(4).g_value(), -12.0)

    def test_g_matches_size_formula(self):
        template = build_F(4, 3, 3)
        sizes = template.class_sizes()
        total = pair_count(10)
        second = sorted(sizes)[1]
        expected = sum(sizes) - 2 * total - 2 * second + 2 * (total * second) ** 0.5
        self.assertAlmostEqual(template.g_value(), expected)
        self.assertAlmostEqual(g_from_sizes(10, sizes), expected)

    def test_f_value(self):
        self.assertAlmostEqual(f_value(5, 10.0), 0.0)
        self.assertLess(f_value(5, 2.5), f_value(5, 6.0))

    def test_f_value_rejects_bad_input(self):
        with self.assertRaises(ValidationError) as ctx:
            f_value(5, -1.0)
        self.assertEqual(ctx.exception.field, "x")
        with self.assertRaises(ValidationError) as ctx:
            f_value(0, 1.0)
        self.assertEqual(ctx.exception.field, "n")

    def test_f_value_minimum_and_monotonicity(self):
        for n in (5, 10, 40):
            total = pair_count(n)
            self.assertEqual(f_value(n, 0.0), 0.0)
            self.assertAlmostEqual(f_value(n, float(total)), 0.0, places=9)
            self.assertAlmostEqual(f_value(n, total / 4), -total / 4, places=9)
            grid = np.linspace(0.0, total, 10_000)
            values = np.array([f_value(n, x) for x in grid])
            self.assertGreaterEqual(values.min(), -total / 4 - 1e-9)
            falling = np.array([f_value(n, x) for x in np.linspace(0.0, total / 4, 5_000)])
            rising = np.array([f_value(n, x) for x in np.linspace(total / 4, total, 5_000)])
            self.assertTrue(np.all(np.diff(falling) < 0), f"n={n}")
            self.assertTrue(np.all(np.diff(rising) > 0), f"n={n}")

    def test_g_invariant_under_class_permutations(self):
        for seed in range(10):
            template = random_template(8, 0.3 + 0.05 * (seed % 4), seed)
            g = template.g_value()
            for order in permutations(range(3)):
                permuted = new_template(8, [template.classes[i] for i in order])
                self.assertAlmostEqual(permuted.g_value(), g, places=12, msg=f"seed {seed}, order {order}")

    def test_g_closed_forms(self):
        k10 = list(combinations(range(10), 2))
        self.assertEqual(new_template(10, [k10, [], []]).g_value(), -45.0)
        self.assertAlmostEqual(new_template(10, [k10, k10, k10]).g_value(), 45.0)


class TestGallaiEdgeBound(unittest.TestCase):
    def test_random_gallai_templates_use_at_most_two_colours_per_pair(self):
        for seed in range(25):
            n = 3 + seed % 6
            template = random_gallai_template(n, seed)
            self.assertTrue(template.is_gallai())
            self.assertLessEqual(sum(template.class_sizes()), 2 * pair_count(n), f"seed {seed}")

    def test_constructions_respect_the_bound(self):
        for template in (build_F(4, 3, 3), build_H(5, 3, 2), build_F(4, 2, 1).blow_up(3)):
            self.assertLessEqual(sum(template.class_sizes()), 2 * pair_count(template.n))


if __name__ == '__main__':
    unittest.main()
