"""
Dyson Commands
ladder-check, pole and mixing subcommands
"""

import numpy as np

from classes.FiberOperator import PeriodicFiberBasis
from config.env import RunConfig
from dyson.mixing import mixingCheck
from dyson.resolvent import kineticReference, ladderLimitCheck, poleTrack
from dyson.vertex import vertexN2Norm
from log.logging import logger
from utils.errors import ConfigurationError
from utils.factories import createDispersion, createFiberGrid, createSpectralDensity
from utils.output import writeCsv


VERTEX_N2_TIMES = (1.0, 2.0, 3.0, 4.0, 5.0)


def _setup(cfg: RunConfig):
    psd = createSpectralDensity(cfg)
    eps = createDispersion(cfg)
    grid = createFiberGrid(cfg)
    kappa = cfg.getVector("dyson.kappa", eps.d)
    return psd, eps, grid, kappa


def _truncation(cfg: RunConfig) -> int:
    truncation = cfg.getInt("dyson.truncation")
    if truncation not in (1, 2):
        raise ConfigurationError(f"Unknown truncation order: {truncation}")
    return truncation


def runLadderCheck(cfg: RunConfig, out_dir: str) -> None:
    psd, eps, grid, kappa = _setup(cfg)
    result = ladderLimitCheck(
        psd,
        eps,
        grid,
        kappa,
        cfg.getFloatList("dyson.lambdas"),
        cfg.getFloat("dyson.T_cut"),
        cfg.getFloat("dyson.quad_tol"),
    )
    writeCsv(
        out_dir, "ladder_check.csv", result["rows"], ["lambda", "kappa", "opnorm_diff", "antiherm_diff"]
    )
    writeCsv(out_dir, "ladder_fit.csv", [{"slope": result["slope"]}], ["slope"])


def poleRows(cfg: RunConfig, kappa=None):
    """One pole per configured lambda; kappa defaults to `dyson.kappa`"""
    psd, eps, grid, default_kappa = _setup(cfg)
    kappa = default_kappa if kappa is None else kappa
    reference = kineticReference(psd, eps, grid)
    rows, results = [], []
    for lam in cfg.getFloatList("dyson.lambdas"):
        pole = poleTrack(
            psd,
            eps,
            grid,
            kappa,
            lam,
            T_cut=cfg.getFloat("dyson.T_cut"),
            quad_tol=cfg.getFloat("dyson.quad_tol"),
            kappa_cap=cfg.getFloat("kinetic.kappa_cap"),
            reference=reference,
        )
        deviation = abs(pole.u / lam**2 - pole.kinetic_u)
        logger.info(f"lambda={lam:g}: |u / lambda^2 - u_M| = {deviation:.3e}")
        rows.append(
            {
                "lambda": lam,
                "kappa": float(np.linalg.norm(kappa)),
                "re_u": pole.u.real,
                "im_u": pole.u.imag,
                "defect": pole.defect,
            }
        )
        results.append(pole)
    return rows, results


def vertexN2Rows(cfg: RunConfig):
    """R_ex envelope from the fourth-order vertex on the small periodic lattice"""
    psd = createSpectralDensity(cfg)
    eps = createDispersion(cfg)
    basis = PeriodicFiberBasis(eps.d, cfg.getInt("dyson.mc_L"))
    rows = []
    for lam in cfg.getFloatList("dyson.lambdas"):
        for t in VERTEX_N2_TIMES:
            estimate, stderr = vertexN2Norm(
                basis,
                psd,
                eps,
                t,
                lam,
                mc_samples=cfg.getInt("dyson.mc_samples"),
                seed=cfg.getInt("dyson.seed"),
            )
            rows.append({"lambda": lam, "t": t, "estimate": estimate, "stderr": stderr})
    return rows


def runPole(cfg: RunConfig, out_dir: str) -> None:
    truncation = _truncation(cfg)
    rows, _ = poleRows(cfg)
    writeCsv(out_dir, "pole.csv", rows, ["lambda", "kappa", "re_u", "im_u", "defect"])
    if truncation == 2:
        logger.note("Truncation 2: certifying the R_ex envelope instead of assembling it")
        writeCsv(out_dir, "vertex_n2.csv", vertexN2Rows(cfg), ["lambda", "t", "estimate", "stderr"])


def mixingResult(cfg: RunConfig, lam: float, T_cut=None):
    psd, eps, grid, kappa = _setup(cfg)
    return mixingCheck(
        psd,
        eps,
        grid,
        lam,
        kappa,
        T_cut=cfg.getFloat("dyson.T_cut") if T_cut is None else T_cut,
        time_step=cfg.getFloat("dyson.time_step"),
        quad_tol=cfg.getFloat("dyson.quad_tol"),
    )


def runMixing(cfg: RunConfig, out_dir: str) -> None:
    kappa = cfg.getVector("dyson.kappa", cfg.getInt("lattice.d"))
    traces, fits = [], []
    for lam in cfg.getFloatList("dyson.lambdas"):
        result = mixingResult(cfg, lam)
        traces.extend(
            {"lambda": lam, "t": t, "distance": distance}
            for t, distance in zip(result["times"], result["distances"])
        )
        fits.append(
            {
                "lambda": lam,
                "kappa": float(np.linalg.norm(kappa)),
                "g_fit": result["g_fit"],
                "gap": result["gap"],
            }
        )
    writeCsv(out_dir, "mixing.csv", traces, ["lambda", "t", "distance"])
    writeCsv(out_dir, "mixing_fit.csv", fits, ["lambda", "kappa", "g_fit", "gap"])
