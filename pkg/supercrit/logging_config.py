import logging
import sys
from supercrit.config import LOG_DIR, LOG_LEVEL

def setup_logging():
    log_file = LOG_DIR / "supercrit.log"

    # Configure logging
    log_level = getattr(logging, LOG_LEVEL.upper(), logging.INFO)

    logging.basicConfig(
        level=log_level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(log_file),
            logging.StreamHandler(sys.stderr)
        ]
    )

    # Create specific loggers
    loggers = {
        'multipliers': logging.getLogger('supercrit.multipliers'),
        'spectral': logging.getLogger('supercrit.spectral'),
        'lp': logging.getLogger('supercrit.littlewood_paley'),
        'osgood': logging.getLogger('supercrit.osgood'),
        'euler': logging.getLogger('supercrit.euler'),
        'patch': logging.getLogger('supercrit.patch'),
        'lab': logging.getLogger('supercrit.inequalities'),
        'cli': logging.getLogger('supercrit.cli'),
        'storage': logging.getLogger('supercrit.storage'),
    }

    return loggers

loggers = setup_logging()
