import unittest
from itertools import combinations, product

from src.config.settings import RainbowConfig
from src.core.exceptions import PreconditionError, SearchLimitError, ValidationError
from src.core.template import ColouringTemplate, new_template
from src.models.search import Objective
from src.services.construction_service import build_F
from src.services.search_service import RAINBOW, SearchService, decision_order, template_from_masks


def count_gallai_naively(n):
    pairs = list(combinations(range(n), 2))
    return sum(
        template_from_masks(n, pairs, masks).is_gallai()
        for masks in product(range(8), repeat=len(pairs))
    )


class TestHelpers(unittest.TestCase):
    def test_rainbow_table(self):
        self.assertTrue(RAINBOW[(0b001 << 6) | (0b010 << 3) | 0b100])
        self.assertFalse(RAINBOW[(0b001 << 6) | (0b001 << 3) | 0b111])
        self.assertFalse(RAINBOW[(0b011 << 6) | (0b011 << 3) | 0b011])
        self.assertTrue(RAINBOW[(0b111 << 6) | (0b111 << 3) | 0b111])
        self.assertFalse(RAINBOW[0])

    def test_decision_order_covers_every_pair_once(self):
        for n in range(6):
            order = decision_order(n)
            self.assertEqual(sorted(order), list(combinations(range(n), 2)))
        self.assertEqual(decision_order(4)[:3], [(0, 1), (0, 2), (1, 2)])


class TestExhaustiveSearch(unittest.TestCase):
    def setUp(self):
        self.service = SearchService(RainbowConfig())

    def test_sum_on_three_vertices(self):
        result = self.service.enumerate_gallai(3, Objective.SUM)
        self.assertEqual(result.best_value, 6.0)
        k3 = [(0, 1), (0, 2), (1, 2)]
        self.assertEqual(result.witness, new_template(3, [k3, k3, []]))
        self.assertTrue(result.metadata['exhaustive'])

    def test_sum_on_four_vertices(self):
        result = self.service.enumerate_gallai(4, Objective.SUM)
        self.assertEqual(result.best_value, 12.0)
        self.assertTrue(result.witness.is_gallai())

    def test_other_objectives(self):
        self.assertAlmostEqual(self.service.enumerate_gallai(3, Objective.GEOMETRIC_MEAN).best_value, 2.0)
        self.assertEqual(self.service.enumerate_gallai(3, Objective.MIN_CLASS).best_value, 2.0)

    def test_pruning_does_not_change_the_result(self):
        for n in (3, 4):
            pruned = self.service.enumerate_gallai(n, Objective.SUM, pruned=True)
            full = self.service.enumerate_gallai(n, Objective.SUM, pruned=False)
            self.assertEqual(pruned.best_value, full.best_value)
            self.assertEqual(pruned.witness, full.witness)
            self.assertEqual(pruned.visited, full.visited)

    def test_visits_every_gallai_template(self):
        result = self.service.enumerate_gallai(3, Objective.SUM)
        self.assertEqual(result.visited, count_gallai_naively(3))

    def test_workers_give_same_witness(self):
        threaded = SearchService(RainbowConfig(workers=4))
        for objective in Objective:
            serial = self.service.enumerate_gallai(4, objective)
            parallel = threaded.enumerate_gallai(4, objective)
            self.assertEqual(serial.witness, parallel.witness)
            self.assertEqual(serial.visited, parallel.visited)

    def test_small_n(self):
        for n in (0, 1, 2):
            result = self.service.enumerate_gallai(n, Objective.SUM)
            self.assertEqual(result.best_value, 3.0 * (n * (n - 1) // 2))

    def test_limit(self):
        with self.assertRaises(SearchLimitError):
            self.service.enumerate_gallai(5, Objective.SUM)
        with self.assertRaises(SearchLimitError):
            SearchService(RainbowConfig(allow_pruned_n5=True)).enumerate_gallai(5, Objective.SUM, pruned=False)
        with self.assertRaises(ValidationError):
            self.service.enumerate_gallai(-1, Objective.SUM)


class TestLocalSearch(unittest.TestCase):
    def setUp(self):
        self.service = SearchService(RainbowConfig())

    def test_improves_and_stays_gallai(self):
        result = self.service.local_search(8, Objective.SUM, ColouringTemplate.empty(8), budget=2000, seed=3)
        self.assertTrue(result.witness.is_gallai())
        self.assertEqual(result.best_value, float(sum(result.witness.class_sizes())))
        self.assertGreater(result.best_value, 0)
        values = [move.value for move in result.moves]
        self.assertEqual(values, sorted(values))
        self.assertEqual(len(set(values)), len(values))

    def test_seeded_runs_repeat(self):
        first = self.service.local_search(7, Objective.GEOMETRIC_MEAN, build_F(3, 2, 2), budget=1500, seed=11)
        second = self.service.local_search(7, Objective.GEOMETRIC_MEAN, build_F(3, 2, 2), budget=1500, seed=11)
        self.assertEqual(first.witness, second.witness)
        self.assertEqual(first.moves, second.moves)

    def test_custom_objective(self):
        result = self.service.local_search(6, lambda sizes: sizes[2] - sizes[0], ColouringTemplate.empty(6),
                                           budget=3000, seed=0)
        self.assertEqual(result.witness.class_sizes()[0], 0)
        self.assertTrue(all(move.colour == 3 for move in result.moves))

    def test_requires_gallai_start(self):
        rainbow = new_template(3, [[(0, 1)], [(0, 2)], [(1, 2)]])
        with self.assertRaises(PreconditionError) as ctx:
            self.service.local_search(3, Objective.SUM, rainbow, budget=10)
        self.assertEqual(ctx.exception.name, "gallai")
        with self.assertRaises(ValidationError):
            self.service.local_search(4, Objective.SUM, ColouringTemplate.empty(3), budget=10)


class TestForcingProbe(unittest.TestCase):
    def setUp(self):
        self.service = SearchService(RainbowConfig())

    def test_below_forcing_alpha3_is_present(self):
        witness = self.service.forcing_probe(0.68, 0.64, 0.31, 100, budget=2000)
        self.assertIsNotNone(witness)
        self.assertTrue(witness.is_gallai())

    def test_above_forcing_alpha3_is_absent(self):
        self.assertIsNone(self.service.forcing_probe(0.68, 0.64, 0.41, 100, budget=2000))

    def test_zero_targets(self):
        witness = self.service.forcing_probe(0.0, 0.0, 0.0, 20, budget=100)
        self.assertIsNotNone(witness)


if __name__ == '__main__':
    unittest.main()
