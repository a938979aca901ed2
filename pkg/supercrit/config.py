import os
from pathlib import Path
from dotenv import load_dotenv

# Load .env file
load_dotenv()

# Base paths
HOME_DIR = Path.home()
SUPERCRIT_DIR = Path(os.getenv("SUPERCRIT_HOME", HOME_DIR / ".supercrit"))
LOG_DIR = SUPERCRIT_DIR / "logs"
RUNS_DB = SUPERCRIT_DIR / "runs.db"
OUTPUT_DIR = Path(os.getenv("SUPERCRIT_OUTPUT", "runs"))

# Bundled scenario files ship inside the package
SCENARIO_DIR = Path(__file__).parent / "scenarios"

# Ensure directories exist
SUPERCRIT_DIR.mkdir(parents=True, exist_ok=True)
LOG_DIR.mkdir(exist_ok=True)

# Application settings
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
DEFAULT_THREADS = int(os.getenv("SUPERCRIT_THREADS", "1"))

# Multipliers: symbols are frozen below this wavenumber magnitude
CLAMP_FLOOR = float(os.getenv("SUPERCRIT_CLAMP_FLOOR", "2.0"))
SAMPLES_PER_DECADE = 128

# Osgood tables
ENVELOPE_POINTS_PER_DECADE = 64
ENVELOPE_MAX_LOG10 = 300.0

# Solver and patch defaults
CFL_SAFETY = float(os.getenv("SUPERCRIT_CFL_SAFETY", "0.5"))
BAND_CELLS = 6
SMOOTH_CELLS = 2
PAIR_BUDGET = int(os.getenv("SUPERCRIT_PAIR_BUDGET", "4096"))

# Kernel quadrature
KERNEL_MAX_INTERVALS = 200
KERNEL_GAUSS_ORDER = 16

# Header written into every output bundle
TORUS_NOTICE = (
    "periodic torus stand-in for the whole plane; "
    "domain period chosen >= 4x data diameter"
)
