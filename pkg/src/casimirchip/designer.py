"""Orchestration layer: gap sweeps, simulated temperature scans, and
detectability verdicts.

Every grid evaluation is pure, so rows may be computed concurrently; the
output is always assembled in lexicographic (gap, temperature, pair) order
and is therefore byte-identical regardless of the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import CasimirChipError, DomainError
from .lifshitz import DEFAULT_NUMERICS, differential_pressure, plate_pressure
from .mechanics import pressure_to_gap_change
from .readout import (
    gap_change_to_frequency_shift,
    min_detectable_pressure,
    pdh_voltage,
)


@dataclass(frozen=True)
class SweepSpec:
    """Grid of gaps, temperatures and material pairs to evaluate.

    ``pairs`` holds (label, material_a, material_b) triples; the label is
    carried into the output table.
    """

    gap_min: float       # m
    gap_max: float       # m
    gap_step: float      # m
    temperatures: tuple  # K
    pairs: tuple         # of (label, MaterialModel, MaterialModel)

    def __post_init__(self):
        if not (0 < self.gap_min <= self.gap_max):
            raise DomainError("need 0 < gap_min <= gap_max")
        if not self.gap_step > 0:
            raise DomainError("gap_step must be > 0")
        for t in self.temperatures:
            if not (math.isfinite(t) and t >= 0):
                raise DomainError(f"temperatures must be finite and >= 0, got {t!r}")

    def gaps(self):
        n = int(round((self.gap_max - self.gap_min) / self.gap_step))
        out = [self.gap_min + i * self.gap_step for i in range(n + 1)]
        return tuple(g for g in out if g <= self.gap_max * (1 + 1e-12))


@dataclass(frozen=True)
class SweepRow:
    gap: float           # m
    temperature: float   # K
    pair: str
    pressure: float      # Pa (nan on error)
    gap_change: float    # m
    freq_shift: float    # Hz
    voltage: float       # V
    detectable: bool
    margin: float        # pressure / floor
    error: str = ""


@dataclass(frozen=True)
class DetectabilityVerdict:
    """Comparison of one named pressure signal against the chain floor."""

    name: str
    signal: float      # Pa
    floor: float       # Pa
    freq_shift: float  # Hz
    detectable: bool
    margin: float      # signal / floor


@dataclass(frozen=True)
class MaterialPairDifferential:
    """Theory input: Lifshitz pressure difference between two material pairs."""

    name: str
    pair: tuple       # (MaterialModel, MaterialModel)
    reference: tuple  # (MaterialModel, MaterialModel)

    def delta_pressure(self, gap, temperature, num=DEFAULT_NUMERICS):
        mat_a, mat_b = self.pair
        return differential_pressure(gap, temperature, mat_a, mat_b,
                                     self.reference, num)


@dataclass(frozen=True)
class StepPressureSignal:
    """Theory input: an opaque pressure magnitude switching on below t_c.

    Used for signals whose magnitude is quoted rather than derived, e.g.
    the proposed gravitational-Casimir pressure between superconductors.
    """

    name: str
    magnitude: float  # Pa
    t_c: float        # K

    def __post_init__(self):
        if not (math.isfinite(self.magnitude) and self.magnitude >= 0):
            raise DomainError("magnitude must be finite and >= 0")
        if not (math.isfinite(self.t_c) and self.t_c > 0):
            raise DomainError("t_c must be finite and > 0")

    def delta_pressure(self, gap, temperature, num=DEFAULT_NUMERICS):
        return self.magnitude if temperature < self.t_c else 0.0


def _chain_shift(delta_pressure, geometry, cavity):
    """Signed cavity shift for a signed differential pressure.

    Extra attraction closes the gap, which lowers the resonance.
    """
    closing = pressure_to_gap_change(abs(delta_pressure), geometry)
    delta_gap = -math.copysign(closing, delta_pressure) if delta_pressure else 0.0
    return gap_change_to_frequency_shift(delta_gap, cavity)


def run_gap_sweep(spec, geometry, cavity, calib, num=DEFAULT_NUMERICS, workers=1):
    """Evaluate the full (gap, temperature, pair) grid into SweepRow records.

    A failed engine evaluation marks its row's ``error`` column and the
    sweep continues.  Rows are returned in lexicographic (gap, temperature,
    pair index) order regardless of ``workers``.
    """
    floor = min_detectable_pressure(geometry, cavity, calib).pressure
    jobs = [
        (gap, temp, label, mat_a, mat_b)
        for gap in spec.gaps()
        for temp in spec.temperatures
        for (label, mat_a, mat_b) in spec.pairs
    ]

    def evaluate(job):
        gap, temp, label, mat_a, mat_b = job
        try:
            pressure = plate_pressure(gap, temp, mat_a, mat_b, num).pressure
        except CasimirChipError as exc:
            return SweepRow(gap, temp, label, math.nan, math.nan, math.nan,
                            math.nan, False, math.nan, error=str(exc))
        gap_change = pressure_to_gap_change(pressure, geometry)
        freq_shift = gap_change_to_frequency_shift(-gap_change, cavity)
        voltage = pdh_voltage(freq_shift, calib)
        margin = pressure / floor
        return SweepRow(gap, temp, label, pressure, gap_change, freq_shift,
                        voltage, margin >= 1.0, margin)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(evaluate, jobs))
    else:
        rows = [evaluate(job) for job in jobs]
    return rows


def simulate_temperature_scan(geometry, cavity, calib, t_grid, theory,
                              num=DEFAULT_NUMERICS):
    """Predicted cavity shift vs temperature, relative to the hottest point.

    Mirrors the measured observable: shift(T) = chain(dP(T) - dP(T_base))
    with T_base = max(t_grid), where dP is the theory's differential
    pressure at the device gap.  Returns a list of (temperature, shift_Hz)
    in the input grid order.
    """
    t_grid = list(t_grid)
    if not t_grid:
        return []
    t_c = getattr(theory, "t_c", None)
    if t_c is not None and not (min(t_grid) < t_c <= max(t_grid)):
        raise DomainError(
            f"temperature grid {min(t_grid)}..{max(t_grid)} K must span "
            f"the transition at {t_c} K"
        )
    t_base = max(t_grid)
    gap = geometry.gap
    dp_base = theory.delta_pressure(gap, t_base, num)
    out = []
    for temp in t_grid:
        dp = theory.delta_pressure(gap, temp, num)
        out.append((temp, _chain_shift(dp - dp_base, geometry, cavity)))
    return out


def detectability_report(signals, geometry, cavity, calib):
    """Verdicts for named pressure signals against the chain floor.

    ``signals`` is a sequence of (name, pressure_Pa) pairs; each verdict
    carries the implied cavity shift magnitude and the signal/floor margin.
    """
    floor = min_detectable_pressure(geometry, cavity, calib).pressure
    verdicts = []
    for name, signal in signals:
        if not (math.isfinite(signal) and signal >= 0):
            raise DomainError(f"signal {name!r} must be finite and >= 0")
        shift = abs(_chain_shift(signal, geometry, cavity))
        margin = signal / floor
        verdicts.append(DetectabilityVerdict(
            name=name, signal=signal, floor=floor, freq_shift=shift,
            detectable=margin >= 1.0, margin=margin,
        ))
    return verdicts
