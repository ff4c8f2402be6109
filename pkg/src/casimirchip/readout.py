"""Optical readout chain: gap changes to cavity shifts, PDH voltage,
optical-spring coupling extraction, and the minimum-detectable-pressure
figure of merit.

Sign convention (one constant, used consistently): a gap decrease lowers
the cavity resonance frequency.  Only magnitudes enter the detectability
figures, but scan traces are signed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constants import C, HBAR
from .errors import ConditioningError, DomainError
from .mechanics import axial_tension

#: Frequency change per unit (signed) gap change follows this sign: a gap
#: decrease (negative delta) gives a negative frequency shift.
GAP_DECREASE_LOWERS_FREQUENCY = True


@dataclass(frozen=True)
class CavityParams:
    """Optical cavity constants.

    ``g_om`` is the optomechanical coupling in rad/s per meter of gap
    change; ``kappa`` and ``kappa_e`` are total and extrinsic linewidths in
    rad/s.  On construction the quoted optical Q is cross-checked against
    omega_c / kappa; a >5% mismatch is a warning, not an error.
    """

    lambda_res: float   # m
    kappa: float        # rad/s
    kappa_e: float      # rad/s
    q_optical: float    # dimensionless
    g_om: float         # rad/s per m

    def __post_init__(self):
        for name in ("lambda_res", "kappa", "kappa_e", "q_optical", "g_om"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise DomainError(f"{name} must be finite and > 0, got {val!r}")
        if self.kappa_e > self.kappa:
            raise DomainError("kappa_e must not exceed kappa")
        q_from_kappa = self.omega_c / self.kappa
        if abs(q_from_kappa - self.q_optical) > 0.05 * self.q_optical:
            warnings.warn(
                f"q_optical = {self.q_optical:.3g} differs from omega_c/kappa = "
                f"{q_from_kappa:.3g} by more than 5%",
                stacklevel=2,
            )

    @property
    def omega_c(self):
        return 2.0 * math.pi * C / self.lambda_res


@dataclass(frozen=True)
class ReadoutCalibration:
    """PDH-chain calibration constants.

    ``linear_window`` bounds the linear PDH response (about a quarter
    linewidth, in ordinary Hz); shifts beyond it are clamped with a
    warning.  ``drift_bound`` is the long-term drift over a measurement and
    may exceed the minimum resolvable shift.
    """

    pdh_slope: float              # V/Hz
    min_resolvable_shift: float   # Hz
    drift_bound: float            # Hz
    linear_window: float | None = None  # Hz

    def __post_init__(self):
        for name in ("pdh_slope", "min_resolvable_shift", "drift_bound"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise DomainError(f"{name} must be finite and > 0, got {val!r}")
        if self.linear_window is not None and not self.linear_window > 0:
            raise DomainError("linear_window must be > 0 when given")


@dataclass(frozen=True)
class PressureFloor:
    """Minimum detectable pressure and its intermediate chain quantities."""

    pressure: float             # Pa
    gap_change: float           # m, cavity gap change at the minimum shift
    per_beam_deflection: float  # m
    line_load: float            # N/m


@dataclass(frozen=True)
class GomFitResult:
    """Least-squares optomechanical coupling estimate."""

    g_om: float          # rad/s per m
    stderr: float        # rad/s per m
    residual_rms: float  # Hz
    n_points: int
    flags: tuple


def gap_change_to_frequency_shift(delta_gap, cavity):
    """Signed cavity frequency shift (Hz) for a signed gap change (m)."""
    if not math.isfinite(delta_gap):
        raise DomainError(f"delta_gap must be finite, got {delta_gap!r}")
    return cavity.g_om / (2.0 * math.pi) * delta_gap


def cavity_response(detuning, cavity):
    """Single-port reflection (amplitude in [0, 1], phase in rad) vs detuning (Hz).

    r(Delta) = 1 - kappa_e / (kappa/2 + i 2 pi Delta); the on-resonance dip
    depth is set by kappa_e/kappa (undercoupled cavities dip shallowly).
    """
    dw = 2.0 * math.pi * np.asarray(detuning, dtype=float)
    r = 1.0 - cavity.kappa_e / (0.5 * cavity.kappa + 1j * dw)
    amplitude, phase = np.abs(r), np.angle(r)
    if np.ndim(detuning) == 0:
        return float(amplitude), float(phase)
    return amplitude, phase


def pdh_voltage(freq_shift, calib):
    """PDH DC voltage for a cavity frequency shift, V = slope * shift.

    Shifts beyond the linear window are clamped (with a warning) to the
    window edge.
    """
    if not math.isfinite(freq_shift):
        raise DomainError(f"freq_shift must be finite, got {freq_shift!r}")
    shift = freq_shift
    if calib.linear_window is not None and abs(shift) > calib.linear_window:
        warnings.warn(
            f"frequency shift {shift:.3g} Hz is outside the linear PDH window "
            f"(+/-{calib.linear_window:.3g} Hz); clamping",
            stacklevel=2,
        )
        shift = math.copysign(calib.linear_window, shift)
    return calib.pdh_slope * shift


def optical_spring_shift(detuning, intracavity_photons, cavity, omega_m, m_eff):
    """Mechanical frequency shift (Hz) from the optical spring at one detuning (Hz).

    Unresolved-sideband form (kappa >> omega_m):

        delta omega_m = (2 n_cav hbar g_om^2 / (m_eff omega_m))
                        * Delta / (Delta^2 + kappa^2/4),   Delta in rad/s.

    Antisymmetric in detuning, extremal near |Delta| = kappa/2.
    """
    if not (math.isfinite(m_eff) and m_eff > 0):
        raise DomainError(f"m_eff must be finite and > 0, got {m_eff!r}")
    if not (math.isfinite(omega_m) and omega_m > 0):
        raise DomainError(f"omega_m must be finite and > 0, got {omega_m!r}")
    if intracavity_photons < 0:
        raise DomainError("intracavity_photons must be >= 0")
    delta = 2.0 * math.pi * np.asarray(detuning, dtype=float)
    amp = 2.0 * intracavity_photons * HBAR * cavity.g_om**2 / (m_eff * omega_m)
    shift = amp * delta / (delta**2 + 0.25 * cavity.kappa**2) / (2.0 * math.pi)
    if np.ndim(detuning) == 0:
        return float(shift)
    return shift


def intracavity_photons(input_power, detuning, cavity):
    """Steady-state photon number from the input power (W) at a detuning (Hz)."""
    if not (math.isfinite(input_power) and input_power >= 0):
        raise DomainError(f"input_power must be finite and >= 0, got {input_power!r}")
    delta = 2.0 * math.pi * detuning
    return (
        input_power / (HBAR * cavity.omega_c)
        * cavity.kappa_e / (delta**2 + 0.25 * cavity.kappa**2)
    )


def fit_gom(spring_dataset, fixed):
    """Least-squares g_om from optical-spring data.

    ``spring_dataset`` is a sequence of (detuning_Hz, omega_m_shift_Hz)
    pairs; ``fixed`` supplies n_cav, m_eff, omega_m (rad/s) and kappa
    (rad/s).  The model is linear in g_om^2, so the estimate is closed
    form.  When ``fixed`` marks n_cav_uncertain, only the combination
    g_om * sqrt(n_cav) is constrained and the result is flagged.
    """
    data = np.asarray(spring_dataset, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 5:
        raise ConditioningError("need at least 5 (detuning, shift) points")
    detuning, shift = data[:, 0], data[:, 1]
    if not (np.any(detuning > 0) and np.any(detuning < 0)):
        raise ConditioningError("detunings must span both signs to constrain g_om")

    n_cav = fixed["n_cav"]
    m_eff = fixed["m_eff"]
    omega_m = fixed["omega_m"]
    kappa = fixed["kappa"]
    delta = 2.0 * math.pi * detuning
    # shift = g^2 * basis
    basis = (
        2.0 * n_cav * HBAR / (m_eff * omega_m)
        * delta / (delta**2 + 0.25 * kappa**2) / (2.0 * math.pi)
    )
    denom = float(np.dot(basis, basis))
    if denom == 0.0:
        raise ConditioningError("basis function vanishes on every supplied detuning")
    g_sq = float(np.dot(basis, shift)) / denom
    residuals = shift - g_sq * basis
    dof = max(len(shift) - 1, 1)
    sigma_sq = float(np.dot(residuals, residuals)) / dof
    var_gsq = sigma_sq / denom

    flags = []
    if g_sq <= 0.0:
        g_om = 0.0
        stderr = math.inf
        flags.append("large-uncertainty")
    else:
        g_om = math.sqrt(g_sq)
        stderr = math.sqrt(var_gsq) / (2.0 * g_om)
        if stderr >= g_om:
            flags.append("large-uncertainty")
    if fixed.get("n_cav_uncertain"):
        flags.append("gom-sqrt-ncav-degenerate")
    return GomFitResult(
        g_om=g_om,
        stderr=stderr,
        residual_rms=math.sqrt(sigma_sq),
        n_points=len(shift),
        flags=tuple(flags),
    )


def min_detectable_pressure(geometry, cavity, calib):
    """Pressure floor of the full chain, inverted from the minimum shift.

    min shift -> gap change (/ g_om) -> per-beam deflection (/2) -> line
    load (string compliance of the centered metal segment) -> pressure
    (/ plate height).
    """
    gap_change = 2.0 * math.pi * calib.min_resolvable_shift / cavity.g_om
    deflection = 0.5 * gap_change
    tension = axial_tension(geometry.film_stress, geometry)
    length = geometry.effective_length
    c = geometry.metal_segment_length
    # Midpoint compliance of the centered span: delta = (q c / 8 S)(2 L - c).
    q = deflection * 8.0 * tension / (c * (2.0 * length - c))
    pressure = q / geometry.plate_height
    return PressureFloor(
        pressure=pressure,
        gap_change=gap_change,
        per_beam_deflection=deflection,
        line_load=q,
    )
