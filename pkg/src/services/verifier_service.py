"""
Verifier Service
================
Certified numerics for the easy case:

- k(d) >= 0 on [0, 1] via a Lipschitz grid certificate, with the bound on
  |k'| re-derived through its chain of majorants;
- the seven strict inequalities satisfied by a partition profile, and a grid
  search showing they cannot hold with total part size at most 1;
- the maximum of a^2 + b^2 + c^2 under ordered lower bounds.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Tuple

import numpy as np

from src.config.settings import RainbowConfig, default_config
from src.core.exceptions import CertificationError, PreconditionError, ValidationError
from src.models.certificate import (
    DerivativeBoundReport,
    DerivativeBoundStage,
    Lemma28Report,
    LipschitzCertificate,
    PartitionProfile,
)
from src.models.region import CanonicalRep
from src.services.boundary_service import SQRT7, TAU, BoundaryService, get_boundary_service

logger = logging.getLogger(__name__)

# 1 - 2*tau
NU = 1.0 - 2.0 * TAU

# Location of the minimum of k on [0, 1]
EXPECTED_ARGMIN = 0.0948007
ARGMIN_TOLERANCE = 2e-3

DERIVATIVE_SAMPLES = 10_000


# ============================================================================
# THE FUNCTION k AND ITS DERIVATIVE
# ============================================================================

def _k_parts(d):
    q = np.sqrt(d * d + 4 * TAU ** 2)
    s = np.sqrt(d * d + NU ** 2)
    radicand = 4 * d * s - 3 * d * d + 16 * TAU ** 2
    numerator = 4 * d * d / s + 4 * s - 6 * d
    return q, s, radicand, numerator


def _check_domain(d) -> np.ndarray:
    values = np.asarray(d, dtype=float)
    if not np.all(np.isfinite(values)) or np.any(values < 0) or np.any(values > 1):
        raise ValidationError("d must lie in [0, 1]", field="d")
    return values


def k_of_d(d):
    """
    k(d) = d/(2 sqrt(d^2 + 4 tau^2))
         + (4d^2/s + 4s - 6d) / (4 sqrt(4ds - 3d^2 + 16 tau^2))
         + d/s - 1,                      s = sqrt(d^2 + (1 - 2 tau)^2)

    Accepts a scalar or an array of points in [0, 1].
    """
    values = _check_domain(d)
    q, s, radicand, numerator = _k_parts(values)
    if np.any(radicand <= 0):
        raise ValidationError("inner radicand must be positive", field="d")
    result = values / (2 * q) + numerator / (4 * np.sqrt(radicand)) + values / s - 1
    return float(result) if result.ndim == 0 else result


def k_derivative(d):
    """Closed-form k'(d)."""
    values = _check_domain(d)
    q, s, radicand, numerator = _k_parts(values)
    d = values
    result = (
        -d * d / (2 * q ** 3) + 1 / (2 * q)
        + (-4 * d ** 3 / s ** 3 + 12 * d / s - 6) / (4 * np.sqrt(radicand))
        - numerator ** 2 / (8 * radicand ** 1.5)
        - d * d / s ** 3 + 1 / s
    )
    return float(result) if result.ndim == 0 else result


def _stage_distributed(d):
    """|k'| with the modulus moved onto every term."""
    q, s, radicand, _ = _k_parts(d)
    return (
        d * d / (2 * q ** 3) + 1 / (2 * q)
        + (4 * d ** 3 / s ** 3 + 12 * d / s + 6) / (4 * np.sqrt(radicand))
        + (4 * d * d / s + 4 * s + 6 * d) ** 2 / (8 * radicand ** 1.5)
        + d * d / s ** 3 + 1 / s
    )


def _stage_numerators(d):
    """Numerators evaluated at d = 1."""
    q, s, radicand, _ = _k_parts(d)
    s1 = math.sqrt(1 + NU ** 2)
    return (
        1 / (2 * q ** 3) + 1 / (2 * q)
        + (4 / s ** 3 + 12 / s + 6) / (4 * np.sqrt(radicand))
        + (4 / s + 4 * s1 + 6) ** 2 / (8 * radicand ** 1.5)
        + 1 / s ** 3 + 1 / s
    )


def _stage_denominators(d):
    """Outer denominators evaluated at d = 0; only the radicand still depends on d."""
    _, _, radicand, _ = _k_parts(d)
    s1 = math.sqrt(1 + NU ** 2)
    return (
        1 / (16 * TAU ** 3) + 1 / (4 * TAU)
        + (4 / NU ** 3 + 12 / NU + 6) / (4 * np.sqrt(radicand))
        + (4 / NU + 4 * s1 + 6) ** 2 / (8 * radicand ** 1.5)
        + 1 / NU ** 3 + 1 / NU
    )


def _stage_constant() -> float:
    """The radicand at d = 0 equals 16 tau^2."""
    s1 = math.sqrt(1 + NU ** 2)
    return (
        (4 * s1 + 4 / NU + 6) ** 2 / (512 * TAU ** 3)
        + (12 / NU + 4 / NU ** 3 + 6) / (16 * TAU)
        + 1 / (4 * TAU) + 1 / (16 * TAU ** 3) + 1 / NU + 1 / NU ** 3
    )


def derivative_bound_closed_form() -> float:
    return (66716 + 31943 * SQRT7 + 12 * math.sqrt(19825442 + 7493276 * SQRT7)) / 1152


# ============================================================================
# EASY-CASE INEQUALITIES
# ============================================================================

def easy_case_sides(a12, a13, a23, d, rep: CanonicalRep):
    """
    Left and right sides of the seven inequalities for a partition profile
    (or arrays of profiles) and a canonical representation.
    """
    x2, y2, z2 = rep.x ** 2, rep.y ** 2, rep.z ** 2
    alpha1, alpha2, alpha3 = x2 + y2, x2 + z2, 1 - x2
    lhs = (
        a12 * (a12 + d),
        a13 * (a13 + d),
        a23 * (a23 + d),
        a12 * (a12 + d) + a13 * (a13 + d) + a23 * (a23 + d),
        a12 ** 2 + 2 * a13 ** 2 + 2 * a23 ** 2 + 2 * a13 * d + 2 * a23 * d,
        2 * a12 ** 2 + a13 ** 2 + 2 * a23 ** 2 + 2 * a12 * d + 2 * a23 * d,
        2 * a12 ** 2 + 2 * a13 ** 2 + a23 ** 2 + 2 * a12 * d + 2 * a13 * d,
    )
    rhs = (
        2 * x2 + y2 + z2 - 1,
        y2,
        z2,
        x2 + y2 + z2,
        x2 + 2 * y2 + 2 * z2,
        2 * alpha1 + 3 * alpha2 + 2 * alpha3 - 3,
        3 * alpha1 + 2 * alpha2 + 2 * alpha3 - 3,
    )
    return lhs, rhs


def easy_case_inequalities(profile: PartitionProfile, rep: CanonicalRep) -> Tuple[bool, ...]:
    """Truth values of the seven strict inequalities, in order."""
    lhs, rhs = easy_case_sides(profile.a12, profile.a13, profile.a23, profile.d, rep)
    return tuple(bool(left > right) for left, right in zip(lhs, rhs))


class VerifierService:
    """Lipschitz certificates and the profile search."""

    def __init__(self, config: Optional[RainbowConfig] = None,
                 boundary: Optional[BoundaryService] = None):
        self.config = config or default_config
        self.boundary = boundary or (BoundaryService(config) if config else get_boundary_service())

    # ========================================================================
    # DERIVATIVE BOUND
    # ========================================================================

    def derivative_bound_stages(self, samples: int = DERIVATIVE_SAMPLES) -> DerivativeBoundReport:
        """
        Evaluate each majorant of |k'| on a sample grid and check that every
        stage dominates the one before it.
        """
        d = np.linspace(0.0, 1.0, samples)
        exact = np.abs(k_derivative(d))
        constant = _stage_constant()
        stages = [
            ("modulus", _stage_distributed(d)),
            ("numerators_at_1", _stage_numerators(d)),
            ("denominators_at_0", _stage_denominators(d)),
            ("radicand_at_0", np.full_like(d, constant)),
        ]
        dominated = True
        previous = exact
        for name, values in stages:
            if np.any(values < previous - 1e-9):
                worst = int(np.argmax(previous - values))
                logger.error(f"Majorant '{name}' fails at d={d[worst]:.6f}: {values[worst]} < {previous[worst]}")
                dominated = False
            previous = values

        # Central differences on the interior as an independent sample of |k'|
        h = 1e-6
        inner = d[1:-1]
        inner = inner[(inner > h) & (inner < 1 - h)]
        sampled = np.abs((k_of_d(inner + h) - k_of_d(inner - h)) / (2 * h))

        closed = derivative_bound_closed_form()
        if abs(constant - closed) > 1e-7 * closed:
            logger.error(f"Final majorant {constant} disagrees with closed form {closed}")
            dominated = False
        return DerivativeBoundReport(
            stages=tuple(DerivativeBoundStage(name, float(np.max(values))) for name, values in stages),
            derivative_max=float(max(np.max(exact), np.max(sampled))),
            closed_form=closed,
            dominated=dominated and float(np.max(sampled)) <= closed,
        )

    def k_derivative_bound(self) -> float:
        """
        Closed-form bound on |k'| over [0, 1].

        Raises:
            CertificationError: If the majorant chain does not dominate or the bound exceeds the Lipschitz constant
        """
        bound = derivative_bound_closed_form()
        if not 196.8 < bound < 196.9 or bound > self.config.appendix_lipschitz:
            raise CertificationError(f"derivative bound {bound} out of range")
        report = self.derivative_bound_stages()
        if not report.dominated:
            raise CertificationError("majorant chain for |k'| does not dominate")
        logger.debug(f"|k'| <= {bound:.6f}; sampled max {report.derivative_max:.6f}")
        return bound

    # ========================================================================
    # LIPSCHITZ CERTIFICATES
    # ========================================================================

    def _evaluate(self, func: Callable, xs: np.ndarray) -> np.ndarray:
        def run(chunk: np.ndarray) -> np.ndarray:
            try:
                values = np.asarray(func(chunk), dtype=float)
                if values.shape == chunk.shape:
                    return values
            except (TypeError, ValueError):
                pass
            return np.array([func(float(x)) for x in chunk], dtype=float)

        workers = self.config.workers
        if workers <= 1 or xs.size < 2 * workers:
            return run(xs)
        chunks = np.array_split(xs, workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return np.concatenate(list(pool.map(run, chunks)))

    def certify_nonnegative(self, func: Callable, a: float, b: float, lipschitz: float, points: int) -> LipschitzCertificate:
        """
        Evaluate `func` at `points` evenly spaced points of [a, b] (endpoints
        included) and certify min f >= grid_min - L*(b - a)/(points - 1).
        `lipschitz` must be a valid Lipschitz constant for f on [a, b].

        Raises:
            ValidationError: On a bad interval, grid size or constant
            CertificationError: If f is not finite at a grid point
        """
        if not isinstance(points, int) or points < 2:
            raise ValidationError("at least two grid points are required", field="points")
        if not b > a:
            raise ValidationError("interval must satisfy a < b", field="interval")
        if lipschitz < 0:
            raise ValidationError("Lipschitz constant must be non-negative", field="lipschitz")
        xs = np.linspace(a, b, points)
        values = self._evaluate(func, xs)
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            raise CertificationError(f"non-finite value at x={xs[bad[0]]}")
        index = int(np.argmin(values))
        spacing = (b - a) / (points - 1)
        grid_min = float(values[index])
        return LipschitzCertificate(
            a=a, b=b, points=points, lipschitz=lipschitz,
            grid_min=grid_min, argmin=float(xs[index]), spacing=spacing,
            certified_lower_bound=grid_min - lipschitz * spacing,
        )

    def verify_appendix(self, points: Optional[int] = None) -> LipschitzCertificate:
        """
        Certify k >= 0 on [0, 1].

        Raises:
            CertificationError: If the certified bound is not positive or the minimum is misplaced
        """
        points = points or self.config.appendix_grid
        lipschitz = self.config.appendix_lipschitz
        bound = self.k_derivative_bound()
        logger.info(f"Certifying k >= 0 on {points} points with L={lipschitz} (|k'| <= {bound:.3f})")
        certificate = self.certify_nonnegative(k_of_d, 0.0, 1.0, lipschitz, points)
        if not certificate.success:
            raise CertificationError(
                f"certified lower bound {certificate.certified_lower_bound:.6g} is not positive "
                f"(grid min {certificate.grid_min:.6g}, spacing {certificate.spacing:.3g})"
            )
        if abs(certificate.argmin - EXPECTED_ARGMIN) > ARGMIN_TOLERANCE:
            raise CertificationError(f"grid minimum at d={certificate.argmin:.6f}, expected near {EXPECTED_ARGMIN}")
        return certificate

    # ========================================================================
    # PROFILE SEARCH
    # ========================================================================

    def lemma28_report(self, alpha1: float, alpha2: float, step: float,
                       sum_bound: float = 1.0, refine: bool = True) -> Lemma28Report:
        """
        Search profiles on the `step` lattice with a12 + a13 + a23 + d <= sum_bound
        for one satisfying all seven strict inequalities. For sum_bound = 1
        none exists.

        Raises:
            PreconditionError: If (alpha1, alpha2) is not a good pair
            ValidationError: On a non-positive step
        """
        if not step > 0:
            raise ValidationError("step must be positive", field="step")
        good, rep = self.boundary.is_good_pair(alpha1, alpha2)
        if not good:
            raise PreconditionError("good_pair", f"({alpha1}, {alpha2}) is not a good pair")
        margin = self.config.strict_margin
        report = Lemma28Report(alpha1=alpha1, alpha2=alpha2, step=step, sum_bound=sum_bound)

        levels = int(math.floor(sum_bound / step + 1e-9))
        i, j, k = np.indices((levels + 1,) * 3).reshape(3, -1)
        keep = i + j + k <= levels
        i, j, k = i[keep], j[keep], k[keep]
        triple_sum = i + j + k
        a12_all, a13_all, a23_all = i * step, j * step, k * step

        best_point: Optional[Tuple[float, float, float, float]] = None
        for level_d in range(levels + 1):
            select = triple_sum <= levels - level_d
            a12, a13, a23 = a12_all[select], a13_all[select], a23_all[select]
            d = level_d * step
            lhs, rhs = easy_case_sides(a12, a13, a23, d, rep)
            slacks = np.stack([left - right for left, right in zip(lhs, rhs)])
            report.points_checked += int(a12.size)
            worst = slacks.min(axis=0)
            strict = worst > margin
            if report.counterexample is None and np.any(strict):
                first = int(np.argmax(strict))
                report.counterexample = PartitionProfile(float(a12[first]), float(a13[first]), float(a23[first]), d)
            relaxed = (np.delete(slacks, 2, axis=0).min(axis=0) > margin) & (slacks[2] >= -margin)
            if report.non_strict_profile is None and np.any(relaxed):
                first = int(np.argmax(relaxed))
                report.non_strict_profile = PartitionProfile(float(a12[first]), float(a13[first]), float(a23[first]), d)
            top = int(np.argmax(worst))
            if worst[top] > report.best_slack:
                report.best_slack = float(worst[top])
                best_point = (float(a12[top]), float(a13[top]), float(a23[top]), d)

        if report.counterexample is None and refine and best_point is not None:
            self._refine(report, best_point, rep, step, sum_bound, margin)

        if report.counterexample is not None:
            logger.warning(f"Profile satisfying all inequalities found: {report.counterexample.to_dict()}")
        logger.info(f"Profile search for ({alpha1}, {alpha2}) at step {step}: {report.points_checked} points, "
                    f"best slack {report.best_slack:.3e}")
        return report

    def _refine(self, report: Lemma28Report, centre: Tuple[float, float, float, float],
                rep: CanonicalRep, step: float, sum_bound: float, margin: float, samples: int = 4000) -> None:
        rng = np.random.default_rng(self.config.search_seed)
        points = np.clip(np.asarray(centre) + rng.uniform(-step, step, size=(samples, 4)), 0.0, None)
        points = points[points.sum(axis=1) <= sum_bound]
        if points.size == 0:
            return
        lhs, rhs = easy_case_sides(points[:, 0], points[:, 1], points[:, 2], points[:, 3], rep)
        worst = np.stack([left - right for left, right in zip(lhs, rhs)]).min(axis=0)
        report.points_checked += int(points.shape[0])
        top = int(np.argmax(worst))
        best = PartitionProfile(*(float(v) for v in points[top]))
        report.refined_points.append(best)
        if worst[top] > report.best_slack:
            report.best_slack = float(worst[top])
        if worst[top] > margin:
            report.counterexample = best

    def lemma28_search(self, alpha1: float, alpha2: float, step: float,
                       sum_bound: float = 1.0) -> Optional[PartitionProfile]:
        """Profile satisfying all seven inequalities within the sum bound, if the search finds one."""
        return self.lemma28_report(alpha1, alpha2, step, sum_bound).counterexample

    # ========================================================================
    # SUM OF SQUARES
    # ========================================================================

    def prop_sum_of_squares(self, b0: float, c0: float, s: float,
                            grid: int = 1000) -> Tuple[Tuple[float, float, float], float]:
        """
        Maximum of a^2 + b^2 + c^2 subject to a + b + c = s, a >= b >= c,
        b >= b0 and c >= c0: attained at (s - b0 - c0, b0, c0).

        Raises:
            PreconditionError: Unless 0 <= c0 <= b0 and 2 b0 + c0 <= s
            CertificationError: If a feasible grid point beats the claimed maximum
        """
        tol = 1e-12
        if not (0 <= c0 <= b0):
            raise PreconditionError("ordered_lower_bounds", f"need 0 <= c0 <= b0, got c0={c0}, b0={b0}")
        if 2 * b0 + c0 > s + tol:
            raise PreconditionError("feasible_sum", f"need 2 b0 + c0 <= s, got {2 * b0 + c0} > {s}")
        argmax = (s - b0 - c0, b0, c0)
        value = sum(v * v for v in argmax)

        bs = np.linspace(b0, max(b0, s / 2), grid)
        cs = np.linspace(c0, max(c0, s / 3), grid)
        B, C = np.meshgrid(bs, cs, indexing='ij')
        A = s - B - C
        feasible = (A >= B - tol) & (B >= C - tol) & (B >= b0 - tol) & (C >= c0 - tol)
        squares = np.where(feasible, A * A + B * B + C * C, -np.inf)
        grid_max = float(squares.max())
        if grid_max > value + 1e-12:
            raise CertificationError(f"grid value {grid_max} exceeds claimed maximum {value}")
        return argmax, value


# Global verifier service instance
_verifier_service = None

def get_verifier_service() -> VerifierService:
    """Get global verifier service instance"""
    global _verifier_service
    if _verifier_service is None:
        _verifier_service = VerifierService()
    return _verifier_service
