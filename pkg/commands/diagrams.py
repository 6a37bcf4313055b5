"""
Diagram Commands
diagram-bounds subcommand
"""

from config.env import RunConfig
from diagrams.bounds import boundCheckCombi
from utils.output import writeCsv


BOUND_COLUMNS = ["n", "I_len", "lhs", "rhs", "ok"]


def boundRows(cfg: RunConfig, pinned: bool):
    rows = []
    for n in range(1, cfg.getInt("diagrams.n_max") + 1):
        for length in cfg.getFloatList("diagrams.intervals"):
            lhs, rhs, ok = boundCheckCombi(n, length, pinned=pinned)
            rows.append({"n": n, "I_len": length, "lhs": lhs, "rhs": rhs, "ok": ok})
    return rows


def runDiagramBounds(cfg: RunConfig, out_dir: str) -> None:
    writeCsv(out_dir, "bounds.csv", boundRows(cfg, pinned=False), BOUND_COLUMNS)
    writeCsv(out_dir, "bounds_pinned.csv", boundRows(cfg, pinned=True), BOUND_COLUMNS)
