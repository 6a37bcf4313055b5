"""
Object Factories
Build reservoirs, dispersions, Hamiltonians and generators from a resolved RunConfig
"""

from typing import Optional

import numpy as np

from classes.DispersionLaw import DispersionLaw
from classes.FiniteHamiltonian import FiniteHamiltonian
from classes.KineticGenerator import KineticGenerator
from classes.SpectralDensity import FormFactor, ReservoirParams, SpectralDensity
from classes.TorusGrid import TorusGrid
from config.env import RunConfig
from constants.defaults import DispersionKind, PairOrder, Profile
from kinetic.assembly import buildGenerator, rateMatrix
from log.logging import logger
from utils.errors import ConfigurationError


def _enumValue(enum_cls, cfg: RunConfig, key: str):
    raw = cfg.getStr(key)
    try:
        return enum_cls(raw.lower())
    except ValueError:
        raise ConfigurationError(f"Unknown {key}: {raw}", details={"key": key})


def pairOrder(cfg: RunConfig) -> PairOrder:
    return _enumValue(PairOrder, cfg, "diagrams.pair_order")


def createSpectralDensity(
    cfg: RunConfig, beta: Optional[float] = None, d_res: Optional[int] = None
) -> SpectralDensity:
    """
    Reservoir from the `reservoir.*` keys; beta and d_res may be overridden
    """
    form_factor = FormFactor(
        profile=_enumValue(Profile, cfg, "reservoir.profile"),
        sigma=cfg.getFloat("reservoir.sigma"),
        d_res=cfg.getInt("reservoir.d_res") if d_res is None else d_res,
        amplitude=cfg.getFloat("reservoir.amplitude"),
    )
    params = ReservoirParams(
        beta=cfg.getFloat("reservoir.beta") if beta is None else beta,
        form_factor=form_factor,
        quad_nodes=cfg.getInt("reservoir.quad_nodes"),
        cutoff=cfg.getFloat("reservoir.cutoff"),
        decay_t_max=cfg.getFloat("reservoir.decay_t_max"),
        decay_samples=cfg.getInt("reservoir.decay_samples"),
    )
    return SpectralDensity(params)


def createDispersion(cfg: RunConfig) -> DispersionLaw:
    d = cfg.getInt("lattice.d")
    if d < 1:
        raise ConfigurationError(f"Lattice dimension must be positive: {d}")
    return DispersionLaw.create(
        _enumValue(DispersionKind, cfg, "dispersion.kind"),
        d,
        cfg.getStr("dispersion.coeffs"),
        cfg.getFloat("lattice.strip_width"),
    )


def createHamiltonian(cfg: RunConfig, eps: Optional[DispersionLaw] = None) -> FiniteHamiltonian:
    eps = eps or createDispersion(cfg)
    return FiniteHamiltonian(
        eps,
        cfg.getInt("lattice.L"),
        cfg.getFloat("lattice.lambda"),
        cfg.getVector("lattice.field", eps.d),
    )


def createKineticGrid(cfg: RunConfig, N: Optional[int] = None) -> TorusGrid:
    return TorusGrid(cfg.getInt("lattice.d"), cfg.getInt("kinetic.N") if N is None else N)


def createFiberGrid(cfg: RunConfig) -> TorusGrid:
    """Momentum grid of the periodic lattice used by the diagram resummation"""
    return TorusGrid(cfg.getInt("lattice.d"), cfg.getInt("dyson.L"))


def createGenerator(
    cfg: RunConfig,
    psd: SpectralDensity,
    eps: DispersionLaw,
    N: Optional[int] = None,
    field=None,
) -> KineticGenerator:
    """
    Kinetic generator at kappa = 0 on the configured grid, caps from `kinetic.*`
    """
    grid = createKineticGrid(cfg, N)
    logger.note(f"Assembling the kinetic generator on {grid.size} nodes")
    return buildGenerator(
        grid,
        rateMatrix(grid, psd, eps),
        eps,
        field=np.zeros(grid.d) if field is None else field,
        kappa_cap=cfg.getFloat("kinetic.kappa_cap"),
        field_cap=cfg.getFloat("kinetic.field_cap"),
    )
