"""
Construction Service
====================
Generators for the F- and H-templates, their exact and limiting class
densities, and witness templates for triples that are not forcing.

Parts are contiguous ranges: A = 0..a-1, B = a..a+b-1, C = a+b..n-1.
"""

import logging
import math
from typing import Callable, Optional, Tuple

from src.config.settings import RainbowConfig, default_config
from src.core.exceptions import PreconditionError, ValidationError
from src.core.template import ColouringTemplate, pair_count
from src.models.construction import (
    ConstructionKind,
    ConstructionParams,
    NonForcingCase,
    NonForcingWitness,
    TheoremWitness,
)
from src.models.region import RegionLabel
from src.services.boundary_service import TAU, TAU_THRESHOLD, BoundaryService, get_boundary_service, upsilon

logger = logging.getLogger(__name__)

# Slack candidates 2^-k tried from largest to smallest
EPSILON_EXPONENTS = range(3, 31)

# Vertex counts tried when locating the dominance threshold
THRESHOLD_LADDER = tuple(2 ** k for k in range(3, 21))


# ============================================================================
# TEMPLATE BUILDERS
# ============================================================================

def _part_masks(a: int, b: int, c: int) -> Tuple[int, int, int, int]:
    n = a + b + c
    mask_a = (1 << a) - 1
    mask_b = ((1 << b) - 1) << a
    mask_c = ((1 << c) - 1) << (a + b)
    return n, mask_a, mask_b, mask_c


def build_F(a: int, b: int, c: int) -> ColouringTemplate:
    """F1 = A² ∪ B², F2 = A² ∪ C², F3 = K_n minus A²."""
    ConstructionParams(ConstructionKind.F, a, b, c)
    n, mask_a, mask_b, mask_c = _part_masks(a, b, c)
    everything = (1 << n) - 1
    rows = ([], [], [])
    for v in range(n):
        me = 1 << v
        if v < a:
            rows[0].append(mask_a ^ me)
            rows[1].append(mask_a ^ me)
            rows[2].append(everything & ~mask_a)
        elif v < a + b:
            rows[0].append(mask_b ^ me)
            rows[1].append(0)
            rows[2].append(everything ^ me)
        else:
            rows[0].append(0)
            rows[1].append(mask_c ^ me)
            rows[2].append(everything ^ me)
    return ColouringTemplate(n, rows)


def build_H(a: int, b: int, c: int) -> ColouringTemplate:
    """H1 = A² ∪ (B∪C)² ∪ (A,C), H2 = A², H3 = (B∪C)² ∪ (A,B)."""
    ConstructionParams(ConstructionKind.H, a, b, c)
    n, mask_a, mask_b, mask_c = _part_masks(a, b, c)
    mask_bc = mask_b | mask_c
    rows = ([], [], [])
    for v in range(n):
        me = 1 << v
        if v < a:
            rows[0].append((mask_a ^ me) | mask_c)
            rows[1].append(mask_a ^ me)
            rows[2].append(mask_b)
        elif v < a + b:
            rows[0].append(mask_bc ^ me)
            rows[1].append(0)
            rows[2].append((mask_bc ^ me) | mask_a)
        else:
            rows[0].append((mask_bc ^ me) | mask_a)
            rows[1].append(0)
            rows[2].append(mask_bc ^ me)
    return ColouringTemplate(n, rows)


def build(params: ConstructionParams) -> ColouringTemplate:
    builder = build_F if params.kind is ConstructionKind.F else build_H
    return builder(params.a, params.b, params.c)


def construction_sizes(params: ConstructionParams) -> Tuple[int, int, int]:
    """Exact class sizes of a construction without building it."""
    a, b, c, n = params.a, params.b, params.c, params.n
    if params.kind is ConstructionKind.F:
        return (pair_count(a) + pair_count(b), pair_count(a) + pair_count(c), pair_count(n) - pair_count(a))
    return (pair_count(n) - a * b, pair_count(a), pair_count(b + c) + a * b)


def predicted_density(kind: ConstructionKind, x: float, y: float, z: float) -> Tuple[float, float, float]:
    """
    Limiting class densities of a construction with part proportions (x, y, z).

    Raises:
        ValidationError: On negative proportions or if they do not sum to 1
    """
    for name, value in (('x', x), ('y', y), ('z', z)):
        if value < 0:
            raise ValidationError(f"{name}={value} must be non-negative", field=name)
    if abs(x + y + z - 1) > 1e-12:
        raise ValidationError(f"proportions sum to {x + y + z}, expected 1", field="z")
    if kind is ConstructionKind.F:
        return (x * x + y * y, x * x + z * z, 1 - x * x)
    return (1 - 2 * x * y, x * x, (1 - x) ** 2 + 2 * x * y)


def dominates(sizes: Tuple[int, int, int], n: int, triple: Tuple[float, float, float]) -> bool:
    """
    Sorted densities strictly beat the sorted triple in every coordinate
    (a target of 1 is matched by density 1).
    """
    total = pair_count(n)
    if total == 0:
        return False
    densities = sorted((s / total for s in sizes), reverse=True)
    targets = sorted(triple, reverse=True)
    return all(d > t or (t >= 1 and d >= 1) for d, t in zip(densities, targets))


def _largest_epsilon(condition: Callable[[float], bool]) -> Optional[float]:
    for k in EPSILON_EXPONENTS:
        eps = 2.0 ** -k
        if condition(eps):
            return eps
    return None


class ConstructionService:
    """Witness templates for non-forcing triples and for the two forcing regions."""

    def __init__(self, config: Optional[RainbowConfig] = None,
                 boundary: Optional[BoundaryService] = None):
        self.config = config or default_config
        self.boundary = boundary or (BoundaryService(config) if config else get_boundary_service())

    def _floor(self, value: float) -> int:
        return math.floor(value + self.config.floor_guard)

    # ========================================================================
    # NON-FORCING WITNESSES
    # ========================================================================

    def _select_case(self, alpha1: float, alpha2: float):
        """
        First applicable witness family for (alpha1, alpha2) and a function
        mapping n to its construction parameters.
        """
        if alpha1 < TAU_THRESHOLD:
            def params_a(n):
                t = math.ceil(TAU * n)
                if n - 2 * t < 0:
                    raise ValidationError(f"n={n} is too small for the balanced witness", field="n")
                return ConstructionParams(ConstructionKind.F, n - 2 * t, t, t)
            return NonForcingCase.BALANCED, 0.0, params_a

        if alpha2 < 0.25:
            def params_b(n):
                half = math.ceil(n / 2)
                return ConstructionParams(ConstructionKind.F, 0, half, n - half)
            return NonForcingCase.SMALL_SECOND, 0.0, params_b

        if alpha1 + alpha2 < 1:
            eps = _largest_epsilon(lambda e: 1 - alpha2 - 4 * e > alpha1)
            if eps is not None:
                share = math.sqrt(alpha2 + 2 * eps)

                def params_c(n):
                    a = min(n, math.ceil(n * share))
                    return ConstructionParams(ConstructionKind.F, a, n - a, 0)
                return NonForcingCase.SMALL_SUM, eps, params_c

        rep = None
        try:
            rep = self.boundary.canonical_representation(alpha1, alpha2, verify_unique=False)
        except PreconditionError:
            pass
        if rep is not None and rep.prime_condition < 1:
            x, y = rep.x, rep.y
            eps = _largest_epsilon(lambda e: e < y and alpha2 + e * e < 1 - (x + e) ** 2)
            if eps is not None:
                def params_d(n):
                    a = self._floor((x + eps) * n)
                    b = self._floor((y - eps) * n)
                    return ConstructionParams(ConstructionKind.F, a, b, n - a - b)
                return NonForcingCase.OUTSIDE_PRIME_REGION, eps, params_d

        if 0.25 <= alpha2 < 0.5 and alpha1 < 2 - 2 * math.sqrt(alpha2):
            eps = _largest_epsilon(lambda e: alpha1 + e < 2 - 2 * math.sqrt(alpha2 + e) and alpha2 + e < 0.5)
            if eps is not None:
                root = math.sqrt(alpha2 + eps)

                def params_e(n):
                    a = self._floor(root * n)
                    b = self._floor((2 * root - 1) / (2 * root) * n)
                    return ConstructionParams(ConstructionKind.H, a, b, n - a - b)
                return NonForcingCase.RESIDUAL, eps, params_e

        raise PreconditionError(
            "no_non_forcing_case",
            f"no witness family applies to ({alpha1}, {alpha2}); the triple may be forcing",
        )

    def witness_non_forcing(self, alpha1: float, alpha2: float, alpha3: float, n: int) -> NonForcingWitness:
        """
        Build the witness template for the first applicable case.

        Args:
            alpha1, alpha2, alpha3: Target densities with alpha1 >= alpha2 >= alpha3
            n: Number of vertices

        Returns:
            NonForcingWitness with the dominance verdict at n and the smallest
            ladder n from which the family dominates

        Raises:
            ValidationError: If the triple is not sorted or out of range
            PreconditionError: If no case applies
        """
        triple = (alpha1, alpha2, alpha3)
        for name, value in zip(('alpha1', 'alpha2', 'alpha3'), triple):
            if not 0 <= value <= 1:
                raise ValidationError(f"{name}={value} must lie in [0, 1]", field=name)
        if not alpha1 >= alpha2 >= alpha3:
            raise ValidationError("expected alpha1 >= alpha2 >= alpha3", field="alpha")
        if not isinstance(n, int) or n < 1:
            raise ValidationError("n must be a positive integer", field="n")

        case, eps, params_for = self._select_case(alpha1, alpha2)
        params = params_for(n)
        template = build(params)
        sizes = template.class_sizes()

        threshold = None
        for m in THRESHOLD_LADDER:
            try:
                if dominates(construction_sizes(params_for(m)), m, triple):
                    threshold = m
                    break
            except ValidationError:
                continue

        result = NonForcingWitness(
            case=case,
            params=params,
            template=template,
            epsilon=eps,
            densities=template.density_vector().as_floats(),
            dominates=dominates(sizes, n, triple),
            threshold_n=threshold,
        )
        logger.info(f"Non-forcing witness for {triple}: case ({case.value}), {params.kind.value}"
                    f"({params.a}, {params.b}, {params.c}), dominates={result.dominates}, threshold={threshold}")
        return result

    # ========================================================================
    # REGION WITNESSES
    # ========================================================================

    def theorem_witness(self, alpha1: float, alpha2: float, n: int) -> TheoremWitness:
        """
        F(floor(xn), floor(yn), rest) in R1prime, or
        H(floor(sqrt(alpha2) n), floor((1 - alpha1)/(2 sqrt(alpha2)) n), rest) in R2.

        Raises:
            ValidationError: If the pair lies in neither region
        """
        region = self.boundary.classify(alpha1, alpha2)
        if not region.in_region:
            raise ValidationError(f"({alpha1}, {alpha2}) lies outside both regions", field="alpha")

        if region.label is RegionLabel.R1_PRIME:
            a = self._floor(region.rep.x * n)
            b = min(n - a, self._floor(region.rep.y * n))
            params = ConstructionParams(ConstructionKind.F, a, b, n - a - b)
        else:
            root = math.sqrt(alpha2)
            a = self._floor(root * n)
            b = min(n - a, self._floor((1 - alpha1) / (2 * root) * n))
            params = ConstructionParams(ConstructionKind.H, a, b, n - a - b)

        template = build(params)
        total = pair_count(n)
        targets = (alpha1, alpha2, region.alpha3)
        deficits = [t * total - s for t, s in zip(targets, template.class_sizes())]
        measured = max(deficits) / n if n else 0.0
        if measured > self.config.witness_constant:
            logger.warning(f"Region witness deficit {measured:.3f}n exceeds {self.config.witness_constant}n")
        logger.debug(f"Region witness {params.to_dict()} for ({alpha1}, {alpha2}), deficit constant {measured:.4f}")
        return TheoremWitness(
            params=params,
            template=template,
            targets=targets,
            margin_constant=measured,
            metadata={'region': region.label.value, 'bound': self.config.witness_constant},
        )

    def product_witness(self, n: int) -> ColouringTemplate:
        """H(ceil(upsilon n), n - ceil(upsilon n), 0): large product of class sizes."""
        a = min(n, math.ceil(upsilon() * n))
        return build_H(a, n - a, 0)

    def min_class_witness(self, n: int) -> ColouringTemplate:
        """F(n - 2 ceil(tau n), ceil(tau n), ceil(tau n)): all classes of density about (1 + tau^2)/2."""
        t = math.ceil(TAU * n)
        if n - 2 * t < 0:
            raise ValidationError(f"n={n} is too small", field="n")
        return build_F(n - 2 * t, t, t)


# Global construction service instance
_construction_service = None

def get_construction_service() -> ConstructionService:
    """Get global construction service instance"""
    global _construction_service
    if _construction_service is None:
        _construction_service = ConstructionService()
    return _construction_service
