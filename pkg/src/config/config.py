"""
Configuration settings for the rainbow-triangle toolkit
=======================================================
Centralized defaults for every tunable of the library and the CLI.

Values that change a computed result are only ever overridden from CLI
flags; the environment (or a .env file) may only touch logging and the
worker count, so identical invocations stay byte-identical.
"""

import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# ============================================================================
# TEMPLATE LIMITS
# ============================================================================

# Largest vertex count a blow-up may produce
MAX_VERTICES = 4096

# Rainbow triangles listed by `check` before the list is capped
TRIANGLE_REPORT_CAP = 20

# ============================================================================
# BOUNDARY / ROOT SOLVING
# ============================================================================

BISECTION_TOL = 1e-12
BISECTION_MAX_ITER = 200
BOUNDARY_TOL = 1e-12
UNIQUENESS_SCAN_POINTS = 10_000

# Floor guard for part sizes computed from floating densities (80.0 must not floor to 79)
FLOOR_GUARD = 1e-9

# Measured constant C in |G_i| >= alpha_i * C(n,2) - C*n for the region witnesses
WITNESS_CONSTANT = 2.0

# ============================================================================
# VERIFIER
# ============================================================================

APPENDIX_GRID = 8000
APPENDIX_LIPSCHITZ = 200.0
STRICT_MARGIN = 1e-12

# ============================================================================
# SEARCH
# ============================================================================

EXHAUSTIVE_LIMIT = 4
SEARCH_BUDGET = 10_000
SEARCH_SEED = 0
C_PARAM = 6.0
PROBE_SLACK = 2.0

# ============================================================================
# LOGGING / EXECUTION (environment-overridable)
# ============================================================================

LOG_LEVEL = os.getenv('RAINBOW_LOG_LEVEL', 'WARNING')
LOG_FORMAT = os.getenv('RAINBOW_LOG_FORMAT', '%(asctime)s - %(name)s - %(levelname)s - %(message)s')
WORKERS = 1  # RAINBOW_WORKERS is parsed by RainbowConfig.from_env
