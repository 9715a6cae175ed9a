import unittest
from itertools import combinations

import networkx as nx
import numpy as np

from src.core.matching import bichromatic_adjacency, max_bichromatic_matching, maximum_matching
from src.core.template import bitmask, new_template
from src.services.construction_service import build_F, build_H


def adjacency_from_edges(n, edges):
    rows = [0] * n
    for u, v in edges:
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return rows


def random_edges(n, p, seed):
    rng = np.random.default_rng(seed)
    return [pair for pair in combinations(range(n), 2) if rng.random() < p]


class TestMaximumMatching(unittest.TestCase):
    def assert_is_matching(self, n, edges, matching):
        edge_set = set(edges)
        seen = set()
        for u, v in matching:
            self.assertIn((u, v), edge_set)
            self.assertNotIn(u, seen)
            self.assertNotIn(v, seen)
            seen.update((u, v))

    def test_odd_cycle_needs_blossom(self):
        # 5-cycle with a pendant path: greedy from vertex 0 gets stuck without contraction
        edges = [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (4, 5), (5, 6)]
        matching = maximum_matching(adjacency_from_edges(7, edges))
        self.assert_is_matching(7, edges, matching)
        self.assertEqual(len(matching), 3)

    def test_matches_networkx_cardinality(self):
        for seed in range(12):
            n = 8 + seed
            edges = random_edges(n, 0.25, seed)
            matching = maximum_matching(adjacency_from_edges(n, edges))
            self.assert_is_matching(n, edges, matching)
            graph = nx.Graph()
            graph.add_nodes_from(range(n))
            graph.add_edges_from(edges)
            expected = len(nx.max_weight_matching(graph, maxcardinality=True))
            self.assertEqual(len(matching), expected, f"seed {seed}")

    def test_deterministic(self):
        edges = random_edges(14, 0.3, 99)
        rows = adjacency_from_edges(14, edges)
        self.assertEqual(maximum_matching(rows), maximum_matching(list(rows)))

    def test_tie_break_follows_root_and_scan_order(self):
        # roots ascending; each tree ends at the first exposed vertex reached
        self.assertEqual(maximum_matching(adjacency_from_edges(4, [(0, 1), (1, 2), (2, 3)])), [(0, 1), (2, 3)])
        self.assertEqual(maximum_matching(adjacency_from_edges(4, [(0, 1), (0, 3), (1, 2), (2, 3)])),
                         [(0, 1), (2, 3)])
        self.assertEqual(maximum_matching(adjacency_from_edges(4, [(0, 1), (0, 2), (1, 3)])), [(0, 2), (1, 3)])
        self.assertEqual(maximum_matching(adjacency_from_edges(4, [(0, 1), (0, 2), (0, 3)])), [(0, 1)])

    def test_empty_graph(self):
        self.assertEqual(maximum_matching([0, 0, 0]), [])


class TestBichromaticPartition(unittest.TestCase):
    def test_adjacency_is_pairs_in_two_classes(self):
        template = new_template(4, [[(0, 1), (1, 2)], [(0, 1), (2, 3)], [(1, 2), (2, 3)]])
        rows = bichromatic_adjacency(template)
        self.assertEqual(rows[0], bitmask([1]))
        self.assertEqual(rows[2], bitmask([1, 3]))

    def test_partition_of_nested_template(self):
        # G1 = K_7, G2 = {0..3}², G3 = {4, 5}²: bichromatic edges live inside {0..3} and {4, 5}
        k7 = list(combinations(range(7), 2))
        g2 = list(combinations(range(4), 2))
        template = new_template(7, [k7, g2, [(4, 5)]])
        partition = max_bichromatic_matching(template)
        self.assertTrue(partition.is_partition())
        self.assertEqual(len(partition.edges((1, 2))), 2)
        self.assertEqual(partition.edges((1, 3)), ((4, 5),))
        self.assertEqual(partition.edges((2, 3)), ())
        self.assertEqual(partition.unmatched, (6,))
        self.assertEqual(partition.vertices((1, 2)), (0, 1, 2, 3))
        self.assertEqual(partition.to_dict()['D'], [6])

    def test_partition_sizes_for_constructions(self):
        for template in (build_F(4, 3, 2), build_H(4, 3, 2)):
            partition = max_bichromatic_matching(template)
            self.assertTrue(partition.is_partition())
            pairs = set(p for p, _ in template.bichromatic_edges())
            graph = nx.Graph(list(pairs))
            graph.add_nodes_from(range(template.n))
            self.assertEqual(partition.size, len(nx.max_weight_matching(graph, maxcardinality=True)))
            for label in ((1, 2), (1, 3), (2, 3)):
                for u, v in partition.edges(label):
                    self.assertTrue(template.has_edge(label[0], u, v))
                    self.assertTrue(template.has_edge(label[1], u, v))


if __name__ == '__main__':
    unittest.main()
