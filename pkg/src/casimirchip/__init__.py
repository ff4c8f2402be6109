"""Measurement-chain modeling for on-chip Casimir experiments between
superconducting nanobeams: finite-temperature Lifshitz pressure under
competing dielectric models, film characterization from four-point data,
tensioned-beam mechanics, optomechanical readout, and detectability
analysis."""

from .constants import CODATA, PhysicalConstants, matsubara_frequency, thermal_frequency
from .designer import (
    DetectabilityVerdict,
    MaterialPairDifferential,
    StepPressureSignal,
    SweepRow,
    SweepSpec,
    detectability_report,
    run_gap_sweep,
    simulate_temperature_scan,
)
from .errors import (
    CasimirChipError,
    ConditioningError,
    ConfigError,
    ConvergenceError,
    DomainError,
    TransitionNotFoundError,
)
from .film import (
    FilmParams,
    RTCurve,
    TcResult,
    coherence_length,
    conductivity_from_four_point,
    extract_tc,
    ingest_rt_table,
    mean_free_path,
    penetration_depth,
)
from .lifshitz import (
    DEFAULT_NUMERICS,
    BeamFaceGeometry,
    LifshitzNumerics,
    PressureResult,
    beam_pfa_pressure,
    differential_pressure,
    ideal_pressure_closed_form,
    plate_pressure,
    reflection_coefficients,
)
from .config import (
    DeviceConfig,
    example_config_path,
    load_device_config,
    parse_material_spec,
)
from .materials import (
    Drude,
    IdealMetal,
    MaterialModel,
    Plasma,
    SuperconductorTwoFluid,
    eps_imag_freq,
    superfluid_fraction,
)
from .mechanics import (
    BeamMechanicsDerived,
    DeviceGeometry,
    axial_tension,
    deflection_profile,
    derive_mechanics,
    effective_stiffness,
    fundamental_frequency,
    pressure_to_gap_change,
)
from .readout import (
    CavityParams,
    GomFitResult,
    PressureFloor,
    ReadoutCalibration,
    cavity_response,
    fit_gom,
    gap_change_to_frequency_shift,
    intracavity_photons,
    min_detectable_pressure,
    optical_spring_shift,
    pdh_voltage,
)

__version__ = "0.1.0"
