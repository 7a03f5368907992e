""" Logging setup for the command line
"""

import logging
import sys

LOG_FORMAT = "%(levelname)-7s: %(message)s"


def setup_logging(verbosity=0):
    """Attach a stderr handler to the package logger

    Parameters
    ----------

    verbosity : int
        -1 quiet (warnings only), 0 info, 1 and above debug.
    """
    level = logging.INFO
    if verbosity < 0:
        level = logging.WARNING
    elif verbosity > 0:
        level = logging.DEBUG

    logger = logging.getLogger("dhymlib")
    for handler in list(logger.handlers):
        if getattr(handler, "_dhymlib_cli", False):
            logger.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._dhymlib_cli = True
    logger.addHandler(handler)
    logger.setLevel(level)
    return logger
