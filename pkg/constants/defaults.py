from enum import Enum
from dataclasses import dataclass
from typing import Dict, Tuple

from utils.errors import ConfigurationError


# Which side of the density matrix an interaction acts on
class Side(Enum):
    LEFT = "left"
    RIGHT = "right"


# Argument order of the pair factor h inside a diagram weight
class PairOrder(Enum):
    PRINTED = "printed"
    TIME_ORDERED = "time_ordered"


# Radial coupling profile of the reservoir
class Profile(Enum):
    GAUSSIAN = "gaussian"
    R_GAUSSIAN = "r_gaussian"


class DispersionKind(Enum):
    LAPLACIAN = "laplacian"
    CUSTOM = "custom"


@dataclass(frozen=True)
class OracleSettings:
    """Damped Fourier transform used to cross-check the spectral density"""

    t_max: float = 30.0
    dt: float = 0.05
    dampings: Tuple[float, float, float] = (1e-4, 5e-5, 2.5e-5)

    def __post_init__(self):
        if self.t_max <= 0 or self.dt <= 0:
            raise ConfigurationError("Oracle window and step must be positive")
        if len(self.dampings) != 3:
            raise ConfigurationError("Three damping levels are needed for Richardson")


@dataclass(frozen=True)
class PoleIteration:
    """Damped fixed point iteration for the pseudo-resolvent pole"""

    alpha: float = 0.5
    tol: float = 1e-10
    max_iter: int = 200
    contour_nodes: int = 64

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ConfigurationError(f"Damping must lie in (0, 1]: {self.alpha}")
        if self.max_iter < 1 or self.contour_nodes < 8:
            raise ConfigurationError("Pole iteration needs iterations and contour nodes")


@dataclass(frozen=True)
class Tolerances:
    eigen_residual: float = 1e-8
    stationary_floor: float = -1e-10
    gap_floor: float = 1e-8
    richardson_cauchy: float = 1e-6
    noise_floor: float = 1e-12
    kernel_floor: float = 1e-12
    combes_thomas_stability: float = 0.05
    mc_relative_error: float = 0.3


ORACLE = OracleSettings()
POLE = PoleIteration()
TOLERANCES = Tolerances()

# Wavepacket width (sites) used by the Bloch oscillation check
BLOCH_WIDTH = 4.0

# Gauss-Legendre order per panel for time quadratures
PANEL_ORDER = 16

SUBCOMMANDS = (
    "psd",
    "correlation",
    "combes-thomas",
    "bloch",
    "kinetic-stationary",
    "kinetic-gap",
    "drift",
    "diffusion",
    "branch",
    "einstein",
    "diagram-bounds",
    "ladder-check",
    "pole",
    "mixing",
    "accept-all",
)

# Every accepted configuration key with its default value
DEFAULT_CONFIG: Dict[str, str] = {
    "reservoir.beta": "1.0",
    "reservoir.profile": "gaussian",
    "reservoir.sigma": "1.0",
    "reservoir.d_res": "2",
    "reservoir.quad_nodes": "400",
    "reservoir.cutoff": "10.0",
    "reservoir.amplitude": "1.0",
    "reservoir.decay_t_max": "16.0",
    "reservoir.decay_samples": "32",
    "lattice.d": "1",
    "lattice.L": "201",
    "lattice.lambda": "0.5",
    "lattice.field": "0.8",
    "lattice.nu": "0.5",
    "lattice.times": "0.5,1,2,4",
    "lattice.strip_width": "2.0",
    "lattice.bloch_t_max": "100.0",
    "lattice.bloch_samples": "2001",
    "dispersion.kind": "laplacian",
    "dispersion.coeffs": "",
    "kinetic.N": "128",
    "kinetic.kappa_cap": "0.2",
    "kinetic.field_cap": "0.2",
    "kinetic.fd_step_field": "1e-3",
    "kinetic.fd_step_kappa": "1e-2",
    "kinetic.field": "0.05",
    "kinetic.kappa_points": "9",
    "kinetic.betas": "1,2",
    "diagrams.n_max": "3",
    "diagrams.intervals": "0.5,1,2",
    "diagrams.pair_order": "printed",
    "dyson.L": "32",
    "dyson.T_cut": "40.0",
    "dyson.time_step": "0.2",
    "dyson.mc_samples": "4000",
    "dyson.mc_L": "8",
    "dyson.seed": "20240601",
    "dyson.truncation": "1",
    "dyson.lambdas": "0.3,0.1,0.03",
    "dyson.kappa": "0.05",
    "dyson.quad_tol": "1e-10",
    "run.seed": "0",
    "run.out": "output",
}

# Keys from older configs that are accepted and ignored
RETIRED_CONFIG_KEYS: Dict[str, str] = {
    "dyson.bromwich_nodes": "the reduced evolution steps in time with dyson.time_step",
}
