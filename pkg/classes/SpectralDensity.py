"""
Spectral Density
Reservoir correlation function on the strip 0 <= Im z <= beta and its spectral density
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import gamma, roots_legendre

from constants.defaults import Profile
from log.logging import logger
from utils.errors import AssumptionViolation, ConfigurationError, DomainError


def sphereArea(m: int) -> float:
    """Surface area of the unit m-sphere in R^(m+1)"""
    return 2.0 * np.pi ** ((m + 1) / 2.0) / gamma((m + 1) / 2.0)


@dataclass(frozen=True)
class FormFactor:
    """Spherically symmetric coupling profile phi(|q|)"""

    profile: Profile = Profile.GAUSSIAN
    sigma: float = 1.0
    d_res: int = 2
    amplitude: float = 1.0

    def __post_init__(self):
        if not isinstance(self.profile, Profile):
            raise ConfigurationError(f"Unknown profile: {self.profile}")
        if self.sigma <= 0:
            raise ConfigurationError(f"Profile width must be positive: {self.sigma}")
        if int(self.d_res) != self.d_res or self.d_res < 1:
            raise ConfigurationError(f"Reservoir dimension must be a positive integer: {self.d_res}")
        if self.d_res == 1 and self(0.0) != 0.0:
            logger.error("A one dimensional reservoir needs phi(0) = 0")
            raise AssumptionViolation(
                "phi(0) must vanish for d_res = 1, the spectral density is unbounded otherwise",
                details={"profile": self.profile.value, "d_res": self.d_res},
            )

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        envelope = self.amplitude * np.exp(-(r**2) / (2.0 * self.sigma**2))
        if self.profile is Profile.GAUSSIAN:
            return envelope
        return (r / self.sigma) * envelope


@dataclass(frozen=True)
class ReservoirParams:
    beta: float
    form_factor: FormFactor
    quad_nodes: int = 400
    cutoff: float = 10.0
    decay_t_max: float = 16.0
    decay_samples: int = 32

    def __post_init__(self):
        if self.beta <= 0:
            raise ConfigurationError(f"Inverse temperature must be positive: {self.beta}")
        if self.quad_nodes < 16:
            raise ConfigurationError(f"Too few radial nodes: {self.quad_nodes}")
        # tail of |phi|^2 r^(d-1) at the cutoff must be below machine precision
        radii = np.linspace(0.0, self.cutoff, 2001)
        density = self.radialDensity(radii)
        peak = float(np.max(density))
        tail = float(self.radialDensity(np.array([self.cutoff]))[0])
        if peak <= 0 or tail > np.finfo(float).eps * peak:
            raise ConfigurationError(
                f"Cutoff {self.cutoff} too small for the form factor",
                details={"tail": tail, "peak": peak},
            )

    def radialDensity(self, r):
        return np.abs(self.form_factor(r)) ** 2 * r ** (self.form_factor.d_res - 1)


class SpectralDensity:
    """Correlation function psi_hat(z) and spectral density psi(E) of one reservoir"""

    def __init__(self, params: ReservoirParams):
        self.params = params
        self.beta = params.beta
        self.d_res = params.form_factor.d_res
        self.surface = sphereArea(self.d_res - 1)
        nodes, weights = roots_legendre(params.quad_nodes)
        half = 0.5 * params.cutoff
        self._radii = half * (nodes + 1.0)
        self._weights = half * weights * self.surface * params.radialDensity(self._radii)
        self._certificate: Optional[Tuple[float, float]] = None

    def psd(self, E):
        """
        Closed form psi(E) = S |E|^(d-1) |phi(|E|)|^2 / |e^(beta E) - 1|
        """
        E = np.asarray(E, dtype=float)
        magnitude = np.abs(E)
        nonzero = magnitude > 0
        safe = np.where(nonzero, magnitude, 1.0)
        values = (
            self.surface
            * self.params.radialDensity(safe)
            / np.abs(np.expm1(self.beta * np.where(nonzero, E, 1.0)))
        )
        return np.where(nonzero, values, self.psdAtZero())

    @property
    def resolvedTime(self) -> float:
        """Largest t for which the radial rule resolves e^(itr) on [0, cutoff]"""
        return self.params.quad_nodes / self.params.cutoff

    def psdAtZero(self) -> float:
        """Continuous limit of psi at E = 0"""
        if self.d_res == 2:
            phi0 = float(self.params.form_factor(0.0))
            return self.surface * phi0**2 / self.beta
        return 0.0

    def correlation(self, z):
        """
        psi_hat(z) by Gauss-Legendre radial quadrature, z in the strip 0 <= Im z <= beta
        """
        z = np.asarray(z, dtype=complex)
        imag = z.imag
        slack = 1e-12 * self.beta
        if np.any(imag < -slack) or np.any(imag > self.beta + slack):
            raise DomainError(
                "Correlation argument outside the strip 0 <= Im z <= beta",
                details={"beta": self.beta, "min_im": float(np.min(imag)), "max_im": float(np.max(imag))},
            )
        flat = z.reshape(-1)
        r = self._radii
        emission = 1.0 / np.expm1(self.beta * r)
        absorption = -1.0 / np.expm1(-self.beta * r)
        phase = np.outer(flat, r)
        integrand = np.exp(-1j * phase) * emission + np.exp(1j * phase) * absorption
        values = integrand @ self._weights
        return values.reshape(z.shape)

    def certify(self) -> Tuple[float, float]:
        """Cached decay certificate (C, g_res); raises when the fitted rate is not positive"""
        if self._certificate is None:
            from reservoir.certify import decayFit

            self._certificate = decayFit(
                self, self.params.decay_t_max, self.params.decay_samples
            )
        return self._certificate

    def rescaled(self, factor: float) -> "SpectralDensity":
        """Same reservoir with psi multiplied by `factor`"""
        if factor <= 0:
            raise ConfigurationError(f"Rescaling factor must be positive: {factor}")
        form = self.params.form_factor
        scaled_form = FormFactor(
            profile=form.profile,
            sigma=form.sigma,
            d_res=form.d_res,
            amplitude=form.amplitude * np.sqrt(factor),
        )
        params = ReservoirParams(
            beta=self.params.beta,
            form_factor=scaled_form,
            quad_nodes=self.params.quad_nodes,
            cutoff=self.params.cutoff,
            decay_t_max=self.params.decay_t_max,
            decay_samples=self.params.decay_samples,
        )
        return SpectralDensity(params)
