"""
Command Handlers
================
One handler per CLI command. Each takes the parsed arguments and the run
configuration and returns a CommandResult; toolkit errors are mapped to
exit codes by `handle_command_error`.
"""

import logging
from argparse import Namespace
from typing import List

from src.config.settings import RainbowConfig
from src.core.template import ColouringTemplate
from src.core.template_io import read_template, write_template
from src.models.command import CommandResult
from src.models.construction import ConstructionKind, ConstructionParams
from src.models.search import Objective
from src.services.boundary_service import BoundaryService
from src.services.construction_service import ConstructionService, build
from src.services.normalization_service import NormalizationService, trace_csv
from src.services.search_service import SearchService
from src.services.verifier_service import VerifierService
from src.utils.error_handling import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, CommandError, handle_command_error
from src.utils.formatting import fmt, write_text

logger = logging.getLogger(__name__)


def _sizes_text(sizes) -> str:
    return "/".join(str(s) for s in sizes)


# ============================================================================
# TEMPLATES
# ============================================================================

@handle_command_error
def handle_construct(args: Namespace, config: RainbowConfig) -> CommandResult:
    params = ConstructionParams(ConstructionKind(args.kind), args.a, args.b, args.c)
    template = build(params)
    write_template(template, args.out)
    report = f"{params.kind.value}({params.a}, {params.b}, {params.c}): n={params.n}, sizes {_sizes_text(template.class_sizes())}"
    return CommandResult(exit_code=EXIT_OK, report=report, outputs=[args.out])


@handle_command_error
def handle_check(args: Namespace, config: RainbowConfig) -> CommandResult:
    template = read_template(args.file)
    triangles = template.rainbow_triangles()
    shown = triangles if args.all else triangles[:config.triangle_report_cap]
    densities = template.density_vector()
    lines = [
        f"n: {template.n}",
        f"sizes: {_sizes_text(template.class_sizes())}",
        f"densities: {', '.join(fmt(v) for v in densities.as_floats())}",
        f"rainbow edges: {len(template.rainbow_edges())}",
        f"bichromatic edges: {len(template.bichromatic_edges())}",
        f"gallai: {'true' if not triangles else 'false'}",
        f"rainbow triangles: {len(triangles)}",
    ]
    lines.extend(f"  {u} {v} {w}" for u, v, w in shown)
    if len(shown) < len(triangles):
        lines.append(f"  ... {len(triangles) - len(shown)} more (use --all)")
    lines.append(f"g: {fmt(template.g_value())}")
    return CommandResult(exit_code=EXIT_OK, report="\n".join(lines))


@handle_command_error
def handle_blowup(args: Namespace, config: RainbowConfig) -> CommandResult:
    template = read_template(args.file).blow_up(args.k, max_vertices=config.max_vertices)
    write_template(template, args.out)
    report = f"blow-up x{args.k}: n={template.n}, sizes {_sizes_text(template.class_sizes())}"
    return CommandResult(exit_code=EXIT_OK, report=report, outputs=[args.out])


# ============================================================================
# DENSITIES AND REGIONS
# ============================================================================

@handle_command_error
def handle_classify(args: Namespace, config: RainbowConfig) -> CommandResult:
    region = BoundaryService(config).classify(args.a1, args.a2)
    line = region.label.value
    if region.alpha3 is not None:
        line += f", alpha3={fmt(region.alpha3)}"
    lines = [line]
    if region.rep is not None:
        rep = region.rep
        lines.append(f"x={fmt(rep.x)}, y={fmt(rep.y)}, z={fmt(rep.z)}")
    return CommandResult(exit_code=EXIT_OK, report="\n".join(lines))


@handle_command_error
def handle_boundary(args: Namespace, config: RainbowConfig) -> CommandResult:
    if args.resolution < 2:
        raise CommandError("resolution must be at least 2", exit_code=EXIT_USAGE)
    text = BoundaryService(config).boundary_csv(args.resolution)
    write_text(args.out, text)
    rows = text.count("\n") - 1
    return CommandResult(exit_code=EXIT_OK, report=f"{rows} grid points written to {args.out}", outputs=[args.out])


@handle_command_error
def handle_witness(args: Namespace, config: RainbowConfig) -> CommandResult:
    witness = ConstructionService(config).witness_non_forcing(args.a1, args.a2, args.a3, args.n)
    outputs: List[str] = []
    if args.out:
        write_template(witness.template, args.out)
        outputs.append(args.out)
    params = witness.params
    lines = [
        f"case ({witness.case.value})",
        f"{params.kind.value}({params.a}, {params.b}, {params.c}), epsilon={fmt(witness.epsilon)}",
        f"densities: {', '.join(fmt(v) for v in witness.densities)}",
        f"dominates at n={args.n}: {'true' if witness.dominates else 'false'}",
        f"threshold n: {witness.threshold_n if witness.threshold_n is not None else 'none'}",
    ]
    return CommandResult(exit_code=EXIT_OK, report="\n".join(lines), outputs=outputs)


@handle_command_error
def handle_extremal(args: Namespace, config: RainbowConfig) -> CommandResult:
    template = ConstructionService(config).product_witness(args.n)
    outputs: List[str] = []
    if args.out:
        write_template(template, args.out)
        outputs.append(args.out)
    total = template.n * (template.n - 1) // 2
    mean = template.geometric_mean()
    ratio = mean / total if total else 0.0
    report = f"sizes {_sizes_text(template.class_sizes())}, geometric mean {fmt(mean)}, ratio {fmt(ratio)}"
    return CommandResult(exit_code=EXIT_OK, report=report, outputs=outputs)


# ============================================================================
# CERTIFICATES
# ============================================================================

@handle_command_error
def handle_verify_appendix(args: Namespace, config: RainbowConfig) -> CommandResult:
    verifier = VerifierService(config)
    bound = verifier.k_derivative_bound()
    certificate = verifier.verify_appendix(points=args.grid)
    lines = [
        f"derivative_bound: {fmt(bound)}",
        f"lipschitz: {fmt(certificate.lipschitz)}",
        f"grid_points: {certificate.points}",
        f"grid_min: {fmt(certificate.grid_min)}",
        f"argmin: {fmt(certificate.argmin)}",
        f"certified: {fmt(certificate.certified_lower_bound)}",
    ]
    return CommandResult(exit_code=EXIT_OK, report="\n".join(lines))


@handle_command_error
def handle_lemma28(args: Namespace, config: RainbowConfig) -> CommandResult:
    report = VerifierService(config).lemma28_report(args.a1, args.a2, args.step, sum_bound=args.sum_bound)
    lines = [f"points checked: {report.points_checked}", f"best slack: {fmt(report.best_slack)}"]
    if report.counterexample is not None:
        p = report.counterexample
        lines.insert(0, f"profile found: a12={fmt(p.a12)}, a13={fmt(p.a13)}, a23={fmt(p.a23)}, d={fmt(p.d)}")
        return CommandResult(exit_code=EXIT_FAILURE, report="\n".join(lines))
    lines.insert(0, "no profile found")
    return CommandResult(exit_code=EXIT_OK, report="\n".join(lines))


# ============================================================================
# SEARCH AND NORMALIZATION
# ============================================================================

@handle_command_error
def handle_search(args: Namespace, config: RainbowConfig) -> CommandResult:
    objective = Objective(args.objective)
    search = SearchService(config)
    if args.exhaustive:
        result = search.enumerate_gallai(args.n, objective)
    else:
        init = read_template(args.init) if args.init else ColouringTemplate.empty(args.n)
        result = search.local_search(args.n, objective, init, budget=args.budget, seed=args.seed)
    outputs: List[str] = []
    if args.out:
        write_template(result.witness, args.out)
        outputs.append(args.out)
    lines = [
        f"{objective.value}: {fmt(result.best_value)}",
        f"sizes: {_sizes_text(result.witness.class_sizes())}",
        f"exhaustive: {'true' if args.exhaustive else 'false'}",
        f"visited: {result.visited}",
    ]
    if not args.exhaustive:
        lines.append(f"accepted moves: {len(result.moves)}")
    return CommandResult(exit_code=EXIT_OK, report="\n".join(lines), outputs=outputs)


@handle_command_error
def handle_normalize(args: Namespace, config: RainbowConfig) -> CommandResult:
    template = read_template(args.file)
    service = NormalizationService(config)
    result = service.normalize_hard_case(template, c_param=args.c)
    trace = result.trace
    outputs: List[str] = []
    if args.out:
        write_template(result.template, args.out)
        outputs.append(args.out)
    if args.trace:
        write_text(args.trace, trace_csv(trace))
        outputs.append(args.trace)
    lines = [
        f"g before: {fmt(trace.g_before)}",
        f"g after: {fmt(trace.g_after)}",
        f"changes: {len(trace.records)}",
        f"early exit: {'true' if trace.early_exit else 'false'}",
    ]
    if not trace.early_exit:
        within = service.hard_case_bound_check(result.template, trace.partition)
        lines.append(f"g <= 3N: {'true' if within else 'false'}")
    lines.extend(f"warning: {message}" for message in trace.diagnostics)
    return CommandResult(exit_code=EXIT_OK, report="\n".join(lines), outputs=outputs)


COMMANDS = {
    'construct': handle_construct,
    'check': handle_check,
    'blowup': handle_blowup,
    'classify': handle_classify,
    'boundary': handle_boundary,
    'witness': handle_witness,
    'extremal': handle_extremal,
    'verify-appendix': handle_verify_appendix,
    'lemma28': handle_lemma28,
    'search': handle_search,
    'normalize': handle_normalize,
}
