"""
Constants for the Transverse Solver.
Contains numerical defaults, tolerances, and app branding.
"""

# Default configuration values
DEFAULT_OUTPUT_DIR = "./runs"
DEFAULT_THREADS = 1
DEFAULT_JOBS = 1
DEFAULT_SEED = 0

# Newton / continuation
DEFAULT_NEWTON_TOL = 1e-10
DEFAULT_PATH_TOL = 1e-8
DEFAULT_MAX_NEWTON_ITER = 30
DEFAULT_MAX_HALVINGS = 30
DEFAULT_INITIAL_T_STEP = 0.25
DEFAULT_MIN_T_STEP = 1e-4

# Krylov inner solve
DEFAULT_KRYLOV_RTOL = 1e-12
DEFAULT_KRYLOV_RESTART = 60
DEFAULT_KRYLOV_MAXITER = 20
DEFAULT_KRYLOV_FORCING = 0.1

# Cone / spectrum handling
DEFAULT_ADMISSIBILITY_FLOOR = 1e-10
DEFAULT_PERTURBATION_TAU = 1e-6
CONE_STRICTNESS = 1e-12
DEGENERACY_GAP = 1e-8
HERMITIAN_RTOL = 1e-14

# f_infinity sentinel for unbounded limits
UNBOUNDED_SENTINEL = 1e30

# Identity suite
DEFAULT_IDENTITY_SAMPLES = 1000
DEFAULT_DERIVATIVE_SAMPLES = 200

# Chart limits
MIN_GRID = 8
SUPPORTED_DIMENSIONS = (1, 2, 3)

# Field snapshot format
SNAPSHOT_MAGIC = b"BSFIELD1"
SNAPSHOT_HEADER_SIZE = 32

# Environment override for FFT worker threads
THREADS_ENV_VAR = "TRANSVERSE_THREADS"

# Operator family names (as written in problem files)
FAMILY_NAMES = ["monge-ampere", "hessian", "hessian-quotient", "t-hessian"]

# App branding
APP_NAME = "Transverse Solver"
APP_VERSION = "1.0.0"

# Banner art
BANNER = """
╔══════════════════════════════════════════════════════════════╗
║   ▀█▀ █▀█ ▄▀█ █▄ █ █▀ █ █ █▀▀ █▀█ █▀ █▀▀                      ║
║    █  █▀▄ █▀█ █ ▀█ ▄█ ▀▄▀ ██▄ █▀▄ ▄█ ██▄   f(λ(A)) = ψ + b    ║
║                    Version 1.0.0                             ║
╚══════════════════════════════════════════════════════════════╝
"""
