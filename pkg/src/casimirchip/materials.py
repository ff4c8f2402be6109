"""Dielectric response models evaluated at imaginary frequency.

The platform is built to distinguish competing descriptions of a metal's
low-frequency reflectivity, so the material model is a first-class tagged
variant:

* ``IdealMetal``      -- perfectly reflecting at all frequencies; handled via
  its exact reflection limits, never via a finite permittivity.
* ``Plasma``          -- eps(i xi) = 1 + omega_p^2 / xi^2 (dissipationless).
* ``Drude``           -- eps(i xi) = 1 + omega_p^2 / (xi (xi + gamma)).
* ``SuperconductorTwoFluid`` -- Gorter-Casimir mixture: a superfluid
  fraction f_s(T) responds plasma-like, the rest Drude-like.

On the imaginary axis eps is real and >= 1 for all of these, so no complex
arithmetic is needed anywhere in the pressure engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class IdealMetal:
    """Perfect conductor: r_TE = -1, r_TM = 1 at every frequency and angle."""

    @property
    def label(self):
        return "ideal"


@dataclass(frozen=True)
class Plasma:
    """Collisionless free-electron response with plasma frequency omega_p (rad/s)."""

    omega_p: float

    def __post_init__(self):
        if not (math.isfinite(self.omega_p) and self.omega_p > 0.0):
            raise DomainError(f"omega_p must be finite and > 0, got {self.omega_p!r}")

    @property
    def label(self):
        return "plasma"


@dataclass(frozen=True)
class Drude:
    """Free-electron response with relaxation rate gamma (rad/s)."""

    omega_p: float
    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.omega_p) and self.omega_p > 0.0):
            raise DomainError(f"omega_p must be finite and > 0, got {self.omega_p!r}")
        if not (math.isfinite(self.gamma) and self.gamma >= 0.0):
            raise DomainError(f"gamma must be finite and >= 0, got {self.gamma!r}")

    @property
    def label(self):
        return "drude"


@dataclass(frozen=True)
class SuperconductorTwoFluid:
    """Two-fluid superconductor: plasma-like superfluid + Drude-like normal fluid.

    Above t_c this coincides with ``Drude(omega_p, gamma)`` at every
    frequency; at T = 0 it coincides with ``Plasma(omega_p)``.
    """

    omega_p: float
    gamma: float
    t_c: float

    def __post_init__(self):
        if not (math.isfinite(self.omega_p) and self.omega_p > 0.0):
            raise DomainError(f"omega_p must be finite and > 0, got {self.omega_p!r}")
        if not (math.isfinite(self.gamma) and self.gamma >= 0.0):
            raise DomainError(f"gamma must be finite and >= 0, got {self.gamma!r}")
        if not (math.isfinite(self.t_c) and self.t_c > 0.0):
            raise DomainError(f"t_c must be finite and > 0, got {self.t_c!r}")

    @property
    def label(self):
        return "superconductor"


MaterialModel = Union[IdealMetal, Plasma, Drude, SuperconductorTwoFluid]


def superfluid_fraction(temperature, t_c):
    """Gorter-Casimir superfluid fraction f_s = 1 - (T/T_c)^4, clamped to [0, 1].

    Returns 0 at and above t_c, 1 at T = 0; continuous across the
    transition.
    """
    if not (math.isfinite(temperature) and temperature >= 0.0):
        raise DomainError(f"temperature must be finite and >= 0, got {temperature!r}")
    if not (math.isfinite(t_c) and t_c > 0.0):
        raise DomainError(f"t_c must be finite and > 0, got {t_c!r}")
    if temperature >= t_c:
        return 0.0
    return 1.0 - (temperature / t_c) ** 4


def eps_imag_freq(model, xi, temperature=None):
    """Permittivity eps(i xi) of ``model`` at imaginary frequency xi (rad/s).

    xi must be strictly positive: the xi = 0 point is where the competing
    models disagree and is handled analytically inside the pressure engine,
    never by evaluating eps at 0.  ``temperature`` is required for the
    two-fluid model and ignored otherwise.  Accepts scalars or numpy arrays
    of xi.
    """
    if isinstance(model, IdealMetal):
        raise TypeError(
            "IdealMetal has no finite permittivity; use its exact reflection limits"
        )
    xi_arr = np.asarray(xi, dtype=float)
    if not np.all(np.isfinite(xi_arr)) or np.any(xi_arr <= 0.0):
        raise DomainError(
            "xi must be finite and > 0; the zero-frequency term must use the "
            "analytic limit path"
        )
    if isinstance(model, Plasma):
        out = 1.0 + (model.omega_p / xi_arr) ** 2
    elif isinstance(model, Drude):
        out = 1.0 + model.omega_p**2 / (xi_arr * (xi_arr + model.gamma))
    elif isinstance(model, SuperconductorTwoFluid):
        if temperature is None:
            raise DomainError("two-fluid permittivity requires a temperature")
        f_s = superfluid_fraction(temperature, model.t_c)
        out = (
            1.0
            + f_s * (model.omega_p / xi_arr) ** 2
            + (1.0 - f_s) * model.omega_p**2 / (xi_arr * (xi_arr + model.gamma))
        )
    else:
        raise TypeError(f"unknown material model: {model!r}")
    if np.ndim(xi) == 0:
        return float(out)
    return out


def zero_frequency_plasma_weight(model, temperature=None):
    """Effective omega_p^2 governing the TE reflection at exactly zero frequency.

    Plasma keeps its full spectral weight, Drude loses all of it (the TE
    zero mode vanishes), and the two-fluid superconductor keeps the
    superfluid share f_s(T) omega_p^2.  IdealMetal is handled by its exact
    limits and is rejected here.
    """
    if isinstance(model, Plasma):
        return model.omega_p**2
    if isinstance(model, Drude):
        return 0.0
    if isinstance(model, SuperconductorTwoFluid):
        if temperature is None:
            raise DomainError("two-fluid zero-frequency limit requires a temperature")
        return superfluid_fraction(temperature, model.t_c) * model.omega_p**2
    if isinstance(model, IdealMetal):
        raise TypeError("IdealMetal is handled via its exact reflection limits")
    raise TypeError(f"unknown material model: {model!r}")
