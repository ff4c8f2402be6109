"""Tensioned-nanostring mechanics for the beam pair.

The beams are modeled as taut strings: with ~GPa film stress, sub-micron
cross sections and hundreds of microns of length, the bending-stiffness
correction to both the static deflection and the fundamental frequency is
below 1% (flexural length scale sqrt(E I / S) ~ a few microns << L), so
the string equation

    -S w''(x) = q * 1_[x1, x2](x),   w(0) = w(L) = 0

replaces a full finite-element treatment.  The evaporated metal loads the
strings with mass but carries no tension: the film is deposited after the
nitride stress is set and relaxes when the structure is released.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class DeviceGeometry:
    """Nanobeam-pair geometry and film properties (SI units).

    ``effective_length`` is the span of the fundamental mode.  The physical
    strings are longer than the suspended section, so the overall
    dimensions underdetermine the modal span and it is an explicit input;
    the shipped example uses 340 um, which reproduces the ~950 kHz
    fundamental of the reference device with full film stress.
    """

    string_length: float          # m, overall string length
    effective_length: float       # m, modal span used by the string model
    width: float                  # m
    thickness: float              # m
    metal_eff_thickness: float    # m, metal thickness on the side faces
    metal_segment_length: float   # m, centered on the string
    plate_height: float           # m, height of the facing metalized walls
    gap: float                    # m
    parallelism_jitter: float     # m
    film_stress: float            # Pa, tensile
    density_sin: float            # kg/m^3
    density_al: float             # kg/m^3

    def __post_init__(self):
        positive = (
            "string_length", "effective_length", "width", "thickness",
            "metal_eff_thickness", "metal_segment_length", "plate_height",
            "gap", "film_stress", "density_sin", "density_al",
        )
        for name in positive:
            val = getattr(self, name)
            if not (isinstance(val, (int, float)) and math.isfinite(val) and val > 0):
                raise DomainError(f"{name} must be finite and > 0, got {val!r}")
        if self.parallelism_jitter < 0:
            raise DomainError("parallelism_jitter must be >= 0")
        if self.metal_segment_length > self.effective_length:
            raise DomainError("metal_segment_length must not exceed effective_length")
        if self.effective_length > self.string_length:
            raise DomainError("effective_length must not exceed string_length")


@dataclass(frozen=True)
class BeamMechanicsDerived:
    """Derived string quantities: S = stress * (w t); f1 = (1/2L) sqrt(S/mu)."""

    tension: float          # N
    linear_density: float   # kg/m, metal mass averaged over the span
    f1: float               # Hz
    m_eff: float            # kg
    k_eff: float            # N/m


def axial_tension(stress, geometry):
    """Axial tension S = stress * (width * thickness) in N.

    Only the nitride cross section carries stress; the evaporated metal is
    unstressed.
    """
    if not (math.isfinite(stress) and stress > 0):
        raise DomainError(f"stress must be finite and > 0, got {stress!r}")
    return stress * geometry.width * geometry.thickness


def _linear_density(geometry):
    mu_sin = geometry.density_sin * geometry.width * geometry.thickness
    metal_area = geometry.metal_eff_thickness * geometry.plate_height
    mu_al = (
        geometry.density_al * metal_area
        * geometry.metal_segment_length / geometry.effective_length
    )
    return mu_sin + mu_al


def deflection_profile(q, load_span, length, tension):
    """Static profile of a pinned string under a uniform line load q over a span.

    Returns ``(profile, w_mid)`` where ``profile`` maps position (m, scalar
    or array) to deflection (m) and ``w_mid`` is the midpoint value.  The
    closed form is piecewise quadratic; for a full-span load the midpoint
    is q L^2 / (8 S), and for a centered span of length c it is
    (q c / 8 S)(2 L - c).
    """
    x1, x2 = load_span
    if not (0.0 <= x1 < x2 <= length):
        raise DomainError(f"load span must satisfy 0 <= x1 < x2 <= L, got {load_span!r}")
    if not (math.isfinite(tension) and tension > 0):
        raise DomainError(f"tension must be finite and > 0, got {tension!r}")
    if not (math.isfinite(q) and q >= 0):
        raise DomainError(f"line load must be finite and >= 0, got {q!r}")
    c = x2 - x1
    xbar = 0.5 * (x1 + x2)
    mu = q / tension
    slope_left = mu * c * (length - xbar) / length
    slope_right = mu * c * xbar / length

    def profile(x):
        x = np.asarray(x, dtype=float)
        left = slope_left * x
        mid = slope_left * x - 0.5 * mu * (x - x1) ** 2
        right = slope_right * (length - x)
        out = np.where(x < x1, left, np.where(x <= x2, mid, right))
        return out if out.ndim else float(out)

    return profile, profile(0.5 * length)


def fundamental_frequency(geometry):
    """Fundamental string frequency f1 = (1 / 2 L) sqrt(S / mu) in Hz."""
    tension = axial_tension(geometry.film_stress, geometry)
    mu = _linear_density(geometry)
    return math.sqrt(tension / mu) / (2.0 * geometry.effective_length)


def effective_stiffness(m_eff, f1):
    """Modal stiffness k_eff = m_eff (2 pi f1)^2 in N/m."""
    if not (math.isfinite(m_eff) and m_eff > 0):
        raise DomainError(f"m_eff must be finite and > 0, got {m_eff!r}")
    if not (math.isfinite(f1) and f1 > 0):
        raise DomainError(f"f1 must be finite and > 0, got {f1!r}")
    return m_eff * (2.0 * math.pi * f1) ** 2


def derive_mechanics(geometry, m_eff=None):
    """Bundle of derived string quantities.

    If ``m_eff`` is not supplied, the sine-mode estimate mu L / 2 for a
    single beam is used; a measured or simulated modal mass (which also
    captures the supports and the photonic-crystal region) supersedes it.
    """
    tension = axial_tension(geometry.film_stress, geometry)
    mu = _linear_density(geometry)
    f1 = fundamental_frequency(geometry)
    if m_eff is None:
        m_eff = 0.5 * mu * geometry.effective_length
    return BeamMechanicsDerived(
        tension=tension,
        linear_density=mu,
        f1=f1,
        m_eff=m_eff,
        k_eff=effective_stiffness(m_eff, f1),
    )


def pressure_to_gap_change(pressure, geometry):
    """Gap closing (m) produced by an attractive pressure on the plate faces.

    The pressure acts on the metalized side walls as a line load
    q = P * plate_height over the centered metal segment; both beams
    deflect in the differential mode, so the gap change is twice the
    per-beam midpoint deflection.
    """
    if not (math.isfinite(pressure) and pressure >= 0):
        raise DomainError(f"pressure must be finite and >= 0, got {pressure!r}")
    tension = axial_tension(geometry.film_stress, geometry)
    q = pressure * geometry.plate_height
    length = geometry.effective_length
    c = geometry.metal_segment_length
    x1 = 0.5 * (length - c)
    _, w_mid = deflection_profile(q, (x1, x1 + c), length, tension)
    return 2.0 * w_mid
