"""
Boundary Service
================
Analytic side of the forcing problem: the constants tau and upsilon, the
canonical representation of a density pair, the good-pair test, region
classification with the forcing alpha3, the maxima of the two product
functions, and the boundary grid.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.config.settings import RainbowConfig, default_config
from src.core.exceptions import ConvergenceError, PreconditionError, ValidationError
from src.core.template import ColouringTemplate, pair_count
from src.models.region import CanonicalRep, CorollaryMaxima, RegionClassification, RegionLabel
from src.utils.formatting import csv_text, fmt
from src.utils.numerics import bisect_root, count_sign_changes, grid_maximize

logger = logging.getLogger(__name__)

# ============================================================================
# CONSTANTS
# ============================================================================

SQRT7 = math.sqrt(7.0)

# Smallest root of 9t^2 - 8t + 1
TAU = (4.0 - SQRT7) / 9.0

# (1 + tau^2) / 2 = (52 - 4*sqrt(7)) / 81
TAU_THRESHOLD = (52.0 - 4.0 * SQRT7) / 81.0


def h(x):
    """h(x) = (x^2 + (1-x)^2) x^2 (1 - x^2); accepts scalars or arrays."""
    return (x ** 2 + (1 - x) ** 2) * x ** 2 * (1 - x ** 2)


def h_prime(x):
    p = 2 * x ** 2 - 2 * x + 1
    q = x ** 2 - x ** 4
    return (4 * x - 2) * q + p * (2 * x - 4 * x ** 3)


@lru_cache(maxsize=None)
def upsilon() -> float:
    """The maximiser of h on [0, 1] (unique critical point in (1/2, 1))."""
    return bisect_root(h_prime, 0.5, 1.0)


def h_upsilon() -> float:
    return float(h(upsilon()))


def f_H(x, y):
    """Product of the class densities of the H-construction with parts (x, y, 1-x-y)."""
    return (1 - 2 * x * y) * x ** 2 * ((1 - x) ** 2 + 2 * x * y)


def f_F(x, y):
    """Product of the class densities of the F-construction with parts (x, y, 1-x-y)."""
    return (x ** 2 + y ** 2) * (x ** 2 + (1 - x - y) ** 2) * (1 - x ** 2)


def _check_unit(value: float, name: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
        raise ValidationError(f"{name} must be a real number", field=name)
    if value < 0 or value > 1:
        raise ValidationError(f"{name}={value} must lie in [0, 1]", field=name)
    return float(value)


class BoundaryService:
    """Region classification and forcing surface for density pairs."""

    def __init__(self, config: Optional[RainbowConfig] = None):
        self.config = config or default_config

    # ========================================================================
    # CANONICAL REPRESENTATION
    # ========================================================================

    def canonical_representation(self, alpha1: float, alpha2: float,
                                 verify_unique: bool = True) -> CanonicalRep:
        """
        Solve x^2 + y^2 = alpha1, x^2 + z^2 = alpha2 with x + y + z = 1.

        y is eliminated as sqrt(alpha1 - x^2) and the remaining equation is
        bracketed on [x0, x1], where x0 gives z = 0 and x1 gives y = z.

        Args:
            alpha1: Density of the larger class, >= 1/2
            alpha2: Density of the second class
            verify_unique: Also scan the bracket for a second sign change

        Raises:
            PreconditionError: If the pair is outside the solvable range
            ConvergenceError: If the solve fails or the root is not unique
        """
        alpha1 = _check_unit(alpha1, "alpha1")
        alpha2 = _check_unit(alpha2, "alpha2")
        tol = self.config.boundary_tol
        if alpha1 < 0.5 - tol:
            raise PreconditionError("alpha1_at_least_half", f"alpha1={alpha1} < 1/2")
        root = math.sqrt(max(0.0, 2 * alpha1 - 1))
        lower = (alpha1 + root) / 2
        if alpha2 < lower - tol:
            raise PreconditionError("alpha2_lower_bound", f"alpha2={alpha2} < (alpha1 + sqrt(2 alpha1 - 1))/2 = {lower}")
        if alpha2 > alpha1 + tol:
            raise PreconditionError("alpha2_at_most_alpha1", f"alpha2={alpha2} > alpha1={alpha1}")

        x0 = (1 + root) / 2
        x1 = min((1 + 2 * math.sqrt(max(0.0, 5 * alpha1 - 1))) / 5, math.sqrt(alpha1))

        def residual(x):
            y = np.sqrt(np.maximum(0.0, alpha1 - x * x))
            return x * x + (1 - x - y) ** 2 - alpha2

        if x1 <= x0 or abs(residual(x0)) <= tol:
            x = x0
        elif abs(residual(x1)) <= tol:
            x = x1
        else:
            x = bisect_root(residual, x0, x1, tol=self.config.bisection_tol,
                            max_iter=self.config.bisection_max_iter)

        if verify_unique and x1 > x0:
            xs = np.linspace(x0, x1, self.config.uniqueness_scan_points)
            if count_sign_changes(residual(xs)) > 1:
                raise ConvergenceError(f"residual has several roots on [{x0}, {x1}] for ({alpha1}, {alpha2})")

        y = math.sqrt(max(0.0, alpha1 - x * x))
        z = 1 - x - y
        if -1e-9 < z < 0:
            z = 0.0
        rep = CanonicalRep(
            x=x, y=y, z=z,
            residual_1=abs(x * x + y * y - alpha1),
            residual_2=abs(x * x + z * z - alpha2),
        )
        if rep.residual_2 > 1e-10:
            raise ConvergenceError(f"residual {rep.residual_2:.3e} too large for ({alpha1}, {alpha2})")
        return rep

    def is_good_pair(self, alpha1: float, alpha2: float) -> Tuple[bool, Optional[CanonicalRep]]:
        """
        max{1/4, (a1 + sqrt(2a1 - 1))/2} <= a2, max{a2, 1 - a2, (1 + tau^2)/2} <= a1,
        and the canonical representation has 2x^2 + z^2 >= 1.

        Returns:
            (good, rep); rep is None when a linear inequality already fails
        """
        alpha1 = _check_unit(alpha1, "alpha1")
        alpha2 = _check_unit(alpha2, "alpha2")
        tol = self.config.boundary_tol
        if alpha1 < 0.5:
            return False, None
        lower = max(0.25, (alpha1 + math.sqrt(2 * alpha1 - 1)) / 2)
        if alpha2 < lower - tol:
            return False, None
        if max(alpha2, 1 - alpha2, TAU_THRESHOLD) > alpha1 + tol:
            return False, None
        rep = self.canonical_representation(alpha1, alpha2, verify_unique=False)
        return rep.prime_condition >= 1 - tol, rep

    # ========================================================================
    # REGIONS
    # ========================================================================

    def classify(self, alpha1: float, alpha2: float, verify_unique: bool = True) -> RegionClassification:
        """
        Label (alpha1, alpha2) as R1prime, R1_minus_R1prime, R2 or outside and
        attach the forcing alpha3 inside R1prime and R2.

        Raises:
            ValidationError: If a value is outside [0, 1] or alpha2 > alpha1
        """
        alpha1 = _check_unit(alpha1, "alpha1")
        alpha2 = _check_unit(alpha2, "alpha2")
        tol = self.config.boundary_tol
        if alpha2 > alpha1 + tol:
            raise ValidationError(f"alpha2={alpha2} exceeds alpha1={alpha1}", field="alpha2")

        root2 = math.sqrt(alpha2)
        r1_upper = 1 - 2 * root2 + 2 * alpha2
        in_r1 = max(1 - alpha2, TAU_THRESHOLD, alpha2) <= alpha1 + tol and alpha1 <= r1_upper + tol
        in_r2 = alpha1 + tol >= max(2 - 2 * root2, r1_upper)

        rep = None
        in_r1_prime = False
        if in_r1:
            try:
                rep = self.canonical_representation(alpha1, alpha2, verify_unique=verify_unique)
                in_r1_prime = rep.prime_condition >= 1 - tol
            except PreconditionError:
                in_r1 = False

        alpha3_r2 = max(0.0, 2 - alpha1 - 2 * root2 + alpha2) if in_r2 else None

        if in_r1_prime:
            alpha3 = max(0.0, 1 - rep.x ** 2)
            shared = in_r2
            if shared and abs(alpha3 - alpha3_r2) > 1e-9:
                raise ConvergenceError(
                    f"forcing alpha3 disagrees on the shared boundary at ({alpha1}, {alpha2}): {alpha3} vs {alpha3_r2}"
                )
            return RegionClassification(alpha1, alpha2, RegionLabel.R1_PRIME, alpha3, rep,
                                        on_shared_boundary=shared, alpha3_r2=alpha3_r2)
        if in_r2:
            return RegionClassification(alpha1, alpha2, RegionLabel.R2, alpha3_r2, rep, alpha3_r2=alpha3_r2)
        if in_r1:
            return RegionClassification(alpha1, alpha2, RegionLabel.R1_MINUS_R1_PRIME, None, rep)
        return RegionClassification(alpha1, alpha2, RegionLabel.OUTSIDE)

    def forcing_alpha3(self, alpha1: float, alpha2: float) -> float:
        """
        Raises:
            ValidationError: If the pair lies in neither R1prime nor R2
        """
        result = self.classify(alpha1, alpha2)
        if not result.in_region:
            raise ValidationError(
                f"({alpha1}, {alpha2}) lies outside both regions ({result.label.value})", field="alpha"
            )
        return result.alpha3

    # ========================================================================
    # PRODUCT MAXIMA
    # ========================================================================

    def corollary_maxima(self) -> CorollaryMaxima:
        """Maximise f_H over the simplex and f_F over its domain by grid search with zooming."""
        eps = 1e-12
        h_value, hx, hy = grid_maximize(
            f_H,
            lambda x, y: (x >= 0) & (y >= 0) & (x + y <= 1 + eps),
            (0.0, 1.0, 0.0, 1.0),
        )
        f_value, fx, fy = grid_maximize(
            f_F,
            lambda x, y: (x >= 0.5) & (y >= (1 - x) / 2 - eps) & (y <= 1 - x + eps),
            (0.5, 1.0, 0.0, 0.5),
        )
        result = CorollaryMaxima(h_value, (hx, hy), f_value, (fx, fy), upsilon(), h_upsilon())
        logger.info(f"Product maxima: f_H={h_value:.9g} at ({hx:.6f}, {hy:.6f}), "
                    f"f_F={f_value:.9g} at ({fx:.6f}, {fy:.6f}), h(upsilon)={result.h_upsilon:.9g}")
        return result

    # ========================================================================
    # BOUNDARY GRID
    # ========================================================================

    def _grid_row(self, alpha1: float, alpha2_values: Sequence[float]) -> List[Tuple[float, float, str, Optional[float]]]:
        rows = []
        for alpha2 in alpha2_values:
            if alpha2 > alpha1 + self.config.boundary_tol:
                rows.append((alpha1, alpha2, RegionLabel.INVALID.value, None))
                continue
            result = self.classify(alpha1, alpha2, verify_unique=False)
            rows.append((alpha1, alpha2, result.label.value, result.alpha3))
        return rows

    def boundary_grid(self, resolution: int) -> List[Tuple[float, float, str, Optional[float]]]:
        """
        Classify every grid point (alpha1, alpha2) of [0,1]^2 with `resolution`
        points per axis, alpha1 outer; points with alpha2 > alpha1 are marked invalid.
        """
        if not isinstance(resolution, int) or isinstance(resolution, bool) or resolution < 2:
            raise ValidationError("resolution must be an integer >= 2", field="resolution")
        values = [float(v) for v in np.linspace(0.0, 1.0, resolution)]
        workers = self.config.workers
        logger.info(f"Classifying a {resolution}x{resolution} boundary grid with {workers} worker(s)")
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                blocks = list(pool.map(lambda a1: self._grid_row(a1, values), values))
        else:
            blocks = [self._grid_row(a1, values) for a1 in values]
        return [row for block in blocks for row in block]

    def boundary_csv(self, resolution: int) -> str:
        rows = self.boundary_grid(resolution)
        return csv_text(
            ("alpha1", "alpha2", "label", "alpha3"),
            ((fmt(a1), fmt(a2), label, fmt(a3)) for a1, a2, label, a3 in rows),
        )

    # ========================================================================
    # CASE HYPOTHESES
    # ========================================================================

    def easy_case_hypothesis(self, template: ColouringTemplate, alpha1: float, alpha2: float) -> bool:
        """
        With (x, y, z) the canonical representation of the good pair and
        alpha3 = 1 - x^2: true iff |G_i| + |G_j| >= (alpha_i + alpha_j) C(n,2) + 5n
        for every two classes. Gallai templates never satisfy it.

        Raises:
            PreconditionError: If (alpha1, alpha2) is not a good pair
        """
        good, rep = self.is_good_pair(alpha1, alpha2)
        if not good:
            raise PreconditionError("good_pair", f"({alpha1}, {alpha2}) is not a good pair")
        alphas = (alpha1, alpha2, 1 - rep.x ** 2)
        n = template.n
        total = pair_count(n)
        sizes = template.class_sizes()
        return all(
            sizes[i] + sizes[j] >= (alphas[i] + alphas[j]) * total + 5 * n
            for i, j in ((0, 1), (0, 2), (1, 2))
        )

    def hard_case_hypothesis(self, template: ColouringTemplate, c_param: Optional[float] = None) -> bool:
        """True iff g(T) >= C*n."""
        c_param = self.config.c_param if c_param is None else c_param
        return template.g_value() >= c_param * template.n


# Global boundary service instance
_boundary_service = None

def get_boundary_service() -> BoundaryService:
    """Get global boundary service instance"""
    global _boundary_service
    if _boundary_service is None:
        _boundary_service = BoundaryService()
    return _boundary_service
