import logging
import os
import tempfile

# keep test runs out of the user's log folder
os.environ.setdefault("KINETIC_LIMIT_LOG_DIR", tempfile.mkdtemp(prefix="kinetic-limit-logs-"))

from log.logging import logger  # noqa: E402

logger.setConsoleLevel(logging.WARNING)
