# config.py

# Loop soup intensity. Critical value; the metric/GFF route is only valid here.
DEFAULT_ALPHA = 0.5
MAX_ALPHA = 0.5

DEFAULT_SEED = 20240601
SEED_ENV_VAR = "LOOPSOUP_SEED"

# None = os.cpu_count()
DEFAULT_JOBS = None

# Replicas handed to one worker at a time
REPLICA_CHUNK = 64

# Rare-event budgeting
MIN_EXPECTED_HITS = 100
PILOT_REPLICAS = 400
MAX_AUTO_REPLICAS = 5_000_000
MAX_SECONDS = None  # wall-clock cap for "auto" budgets; None = unlimited

# Linear algebra
CG_THRESHOLD = 100_000  # interior vertices above which solves switch to CG
CG_RTOL = 1e-10
DENSE_FALLBACK_LIMIT = 4_000  # dense Cholesky allowed below this size

# Output
RESULTS_DIR = "cache/results"
META_DIR = "cache/meta"
LAST_RUN_PATH = "cache/meta/last_run.json"

# Default grids (desk scale)
TWO_ARM_GRID = {"n": 64, "k": [2, 4, 8, 16, 32]}
FOUR_ARM_GRID = {"n": 64, "k": [8, 16, 32]}
QUASI_GRID = [(4, 16), (4, 32), (8, 32)]
NLAMBDA_SIZES = [32, 64, 128]
NLAMBDA_REPLICAS = 2000  # N(Λ) is a mean; "auto" falls back to this count

EXPERIMENTS = ["arm", "fit", "quasi", "nlambda", "verify", "sample", "selftest"]
VERIFY_CHECKS = ["resistance-drop", "segment", "low1", "surrounding", "outer-boundary"]
