"""
Output Writers
CSV tables, the resolved configuration echo and the machine readable error report
"""

from pathlib import Path
from typing import Any, Dict, List, Sequence

import pandas as pd

from log.logging import logger
from utils.errors import KineticLimitError


FLOAT_FORMAT = "%.17g"


def ensureDirectory(out_dir: str) -> Path:
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def writeCsv(
    out_dir: str, name: str, rows: List[Dict[str, Any]], columns: Sequence[str]
) -> Path:
    """Write rows with a header line; floats carry 17 significant digits"""
    path = ensureDirectory(out_dir) / name
    frame = pd.DataFrame(rows, columns=list(columns))
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return path


def writeResolvedConfig(out_dir: str, text: str) -> Path:
    path = ensureDirectory(out_dir) / "config.resolved"
    path.write_text(text, encoding="utf-8")
    return path


def writeErrorFile(out_dir: str, exc: BaseException, subcommand: str) -> Path:
    """
    error.txt with kind, message, subcommand and the error details as key=value
    """
    path = ensureDirectory(out_dir) / "error.txt"
    message = str(exc).replace("\n", " ")
    lines = [
        f"kind={type(exc).__name__}",
        f"message={message}",
        f"subcommand={subcommand}",
    ]
    if isinstance(exc, KineticLimitError):
        for key in sorted(exc.details):
            lines.append(f"{key}={exc.details[key]}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
