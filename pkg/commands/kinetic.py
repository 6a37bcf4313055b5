"""
Kinetic Commands
kinetic-stationary, kinetic-gap, drift, diffusion, branch and einstein subcommands
"""

import numpy as np

from config.env import RunConfig
from kinetic.spectrum import drift, spectralGap, stationaryState
from kinetic.transport import branchDerivatives, diffusionGk, eigenBranch, einsteinResidual
from log.logging import logger
from utils.factories import createDispersion, createGenerator, createSpectralDensity
from utils.output import writeCsv


DRIFT_POINTS = 5
# relative N -> 2N change tolerated for the gap
GAP_REFINEMENT_TOL = 0.05


def _setup(cfg: RunConfig):
    return createSpectralDensity(cfg), createDispersion(cfg)


def runStationary(cfg: RunConfig, out_dir: str) -> None:
    psd, eps = _setup(cfg)
    field = cfg.getVector("kinetic.field", eps.d)
    gen = createGenerator(cfg, psd, eps, field=field)
    zeta = stationaryState(gen)
    # k is the node momentum in d = 1 and the flat node index otherwise
    labels = gen.grid.points[:, 0] if gen.grid.d == 1 else np.arange(gen.grid.size)
    rows = [{"k": k, "zeta": z} for k, z in zip(labels, zeta)]
    writeCsv(out_dir, "stationary.csv", rows, ["k", "zeta"])


def runGap(cfg: RunConfig, out_dir: str) -> None:
    psd, eps = _setup(cfg)
    N = cfg.getInt("kinetic.N")
    rows = []
    for size in (N, 2 * N):
        gap = spectralGap(createGenerator(cfg, psd, eps, N=size))
        rows.append({"N": size, "gap": gap})
    change = abs(rows[1]["gap"] - rows[0]["gap"]) / rows[1]["gap"]
    if change <= GAP_REFINEMENT_TOL:
        logger.success(f"Spectral gap {rows[1]['gap']:.6g}, N -> 2N change {change:.2e}")
    else:
        logger.warning(f"Spectral gap moves by {change:.2e} under N -> 2N")
    writeCsv(out_dir, "gap.csv", rows, ["N", "gap"])


def runDrift(cfg: RunConfig, out_dir: str) -> None:
    """v along the first axis for forces -F..F along the configured direction"""
    psd, eps = _setup(cfg)
    field = cfg.getVector("kinetic.field", eps.d)
    gen = createGenerator(cfg, psd, eps, field=field)
    rows = []
    for scale in np.linspace(-1.0, 1.0, DRIFT_POINTS):
        v = drift(gen.withField(scale * field))
        rows.append({"field": scale * field[0], "v": v[0]})
    writeCsv(out_dir, "drift.csv", rows, ["field", "v"])


def runDiffusion(cfg: RunConfig, out_dir: str) -> None:
    psd, eps = _setup(cfg)
    gen = createGenerator(cfg, psd, eps)
    D_gk = diffusionGk(gen)
    D_branch = branchDerivatives(gen, cfg.getFloat("kinetic.fd_step_kappa"))["D"]
    relative = float(np.max(np.abs(D_branch - D_gk)) / np.max(np.abs(D_gk)))
    logger.info(f"Green-Kubo and branch diffusion differ by {relative:.3e}")
    rows = [
        {"i": i, "j": j, "D_gk": D_gk[i, j], "D_branch": D_branch[i, j]}
        for i in range(eps.d)
        for j in range(eps.d)
    ]
    writeCsv(out_dir, "diffusion.csv", rows, ["i", "j", "D_gk", "D_branch"])


def runBranch(cfg: RunConfig, out_dir: str) -> None:
    psd, eps = _setup(cfg)
    field = cfg.getVector("kinetic.field", eps.d)
    gen = createGenerator(cfg, psd, eps, field=field)
    cap = cfg.getFloat("kinetic.kappa_cap")
    kappas = np.linspace(-cap, cap, cfg.getInt("kinetic.kappa_points"))
    branch = eigenBranch(gen, kappas, kappa_cap=cap)
    rows = [
        {"kappa": k, "re_u": u.real, "im_u": u.imag}
        for k, u in zip(branch.kappas, branch.eigenvalues)
    ]
    writeCsv(out_dir, "branch.csv", rows, ["kappa", "re_u", "im_u"])


def einsteinRows(cfg: RunConfig):
    """One row per configured beta, first diagonal entry of the tensors"""
    eps = createDispersion(cfg)
    h = cfg.getFloat("kinetic.fd_step_field")
    rows = []
    for beta in cfg.getFloatList("kinetic.betas"):
        psd = createSpectralDensity(cfg, beta=beta)
        gen = createGenerator(cfg, psd, eps)
        result = einsteinResidual(gen, beta, h)
        rows.append(
            {
                "beta": beta,
                "N": gen.grid.N,
                "h": h,
                "dvdF": result["dvdF"][0, 0],
                "betaD": result["betaD"][0, 0],
                "residual": result["residual"],
            }
        )
    return rows


def runEinstein(cfg: RunConfig, out_dir: str) -> None:
    rows = einsteinRows(cfg)
    writeCsv(out_dir, "einstein.csv", rows, ["beta", "N", "h", "dvdF", "betaD", "residual"])
