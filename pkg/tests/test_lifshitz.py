import math

import numpy as np
import pytest
import scipy.constants as sc
from scipy.integrate import quad

from casimirchip import (
    BeamFaceGeometry,
    ConvergenceError,
    DomainError,
    Drude,
    IdealMetal,
    LifshitzNumerics,
    Plasma,
    SuperconductorTwoFluid,
    beam_pfa_pressure,
    differential_pressure,
    ideal_pressure_closed_form,
    plate_pressure,
    reflection_coefficients,
)
from casimirchip.lifshitz import _k_integrals, _k_integrals_adaptive

OMEGA_P = 1.83e16
GAMMA = 7.6e13
ZETA3 = 1.2020569031595943

IDEAL = IdealMetal()
PLASMA = Plasma(OMEGA_P)
DRUDE = Drude(OMEGA_P, GAMMA)
TWOFLUID = SuperconductorTwoFluid(OMEGA_P, GAMMA, 0.9)


# ---------------------------------------------------------------- reflection

def test_ideal_metal_reflection_everywhere():
    for xi in (0.0, 1e10, 1e14, 1e17):
        for k in (1e3, 1e6, 1e8):
            assert reflection_coefficients(IDEAL, xi, k) == (-1.0, 1.0)


def test_drude_te_zero_mode_vanishes():
    for k in (1e4, 1e6, 1e8):
        r_te, r_tm = reflection_coefficients(DRUDE, 0.0, k)
        assert r_te == 0.0
        assert r_tm == 1.0


def test_plasma_zero_frequency_te_limit():
    k = 1e7
    r_te, r_tm = reflection_coefficients(PLASMA, 0.0, k)
    s = math.sqrt(k**2 + OMEGA_P**2 / sc.c**2)
    assert r_te == pytest.approx((k - s) / (k + s), rel=1e-12)
    assert r_tm == 1.0


def test_two_fluid_zero_frequency_weighted_by_superfluid_fraction():
    k = 1e7
    f_s = 1.0 - (0.45 / 0.9) ** 4
    s = math.sqrt(k**2 + f_s * OMEGA_P**2 / sc.c**2)
    r_te, _ = reflection_coefficients(TWOFLUID, 0.0, k, temperature=0.45)
    assert r_te == pytest.approx((k - s) / (k + s), rel=1e-12)
    # At and above t_c the TE zero mode is gone, as for Drude.
    r_te_hot, r_tm_hot = reflection_coefficients(TWOFLUID, 0.0, k, temperature=0.9)
    assert r_te_hot == 0.0
    assert r_tm_hot == 1.0


def test_vacuum_limit_no_reflection():
    # eps -> 1 (omega_p much below xi) drives both coefficients to zero.
    weak = Plasma(1e6)
    r_te, r_tm = reflection_coefficients(weak, 1e15, 1e6)
    assert abs(r_te) < 1e-12
    assert abs(r_tm) < 1e-12


def test_reflection_magnitudes_bounded():
    rng = np.random.default_rng(7)
    for _ in range(50):
        xi = 10 ** rng.uniform(8, 18)
        k = 10 ** rng.uniform(2, 9)
        for model in (IDEAL, PLASMA, DRUDE, TWOFLUID):
            r_te, r_tm = reflection_coefficients(model, xi, k, temperature=0.5)
            assert abs(r_te) <= 1.0 + 1e-12
            assert abs(r_tm) <= 1.0 + 1e-12


def test_reflection_rejects_bad_k():
    with pytest.raises(DomainError):
        reflection_coefficients(IDEAL, 1e12, 0.0)
    with pytest.raises(DomainError):
        reflection_coefficients(IDEAL, 1e12, -1.0)


# ------------------------------------------------------------- closed form

def test_ideal_closed_form_values():
    assert ideal_pressure_closed_form(100e-9) == pytest.approx(13.00, abs=0.005)
    assert ideal_pressure_closed_form(1e-6) == pytest.approx(1.300e-3, rel=1e-3)
    assert ideal_pressure_closed_form(200e-9) == pytest.approx(
        ideal_pressure_closed_form(100e-9) / 16.0
    )
    with pytest.raises(DomainError):
        ideal_pressure_closed_form(0.0)


# ----------------------------------------------------------- plate pressure

def test_t_zero_ideal_matches_casimir_force():
    res = plate_pressure(100e-9, 0.0, IDEAL, IDEAL)
    exact = math.pi**2 * sc.hbar * sc.c / (240 * (100e-9) ** 4)
    assert res.pressure == pytest.approx(exact, rel=5e-3)
    assert res.pressure == pytest.approx(exact, rel=1e-6)


def test_classical_limit_ideal_metal():
    # Independent oracle: only the half-weighted n = 0 term survives at
    # k_B T = 10 hbar c / a; with both polarizations fully reflecting it
    # integrates to zeta(3) k_B T / (4 pi a^3).
    a = 100e-9
    temp = 10 * sc.hbar * sc.c / (a * sc.Boltzmann)
    res = plate_pressure(a, temp, IDEAL, IDEAL)
    assert res.pressure == pytest.approx(
        ZETA3 * sc.Boltzmann * temp / (4 * math.pi * a**3), rel=1e-2
    )


def test_classical_limit_drude():
    # Drude loses the TE zero mode: the classical limit is the TM-only
    # value zeta(3) k_B T / (8 pi a^3).
    a = 100e-9
    temp = 10 * sc.hbar * sc.c / (a * sc.Boltzmann)
    res = plate_pressure(a, temp, DRUDE, DRUDE)
    assert res.pressure == pytest.approx(
        ZETA3 * sc.Boltzmann * temp / (8 * math.pi * a**3), rel=1e-2
    )


def test_half_weight_regression():
    # At high temperature the entire pressure IS the half-weighted n = 0
    # term, so dropping the half weight must add exactly that classical
    # contribution once more.
    a, num = 100e-9, LifshitzNumerics()
    temp = 10 * sc.hbar * sc.c / (a * sc.Boltzmann)
    res = plate_pressure(a, temp, IDEAL, IDEAL, num)
    term0, _ = _k_integrals_adaptive(IDEAL, IDEAL, 0.0, a, temp, num)
    classical = 0.5 * sc.Boltzmann * temp / math.pi * float(term0[0])
    assert res.pressure == pytest.approx(classical, rel=1e-10)
    full_weight = res.pressure + classical
    assert full_weight == pytest.approx(2 * res.pressure, rel=1e-10)


def test_plasma_exceeds_drude_at_cryogenic_point():
    p_plasma = plate_pressure(100e-9, 1.0, PLASMA, PLASMA).pressure
    p_drude = plate_pressure(100e-9, 1.0, DRUDE, DRUDE).pressure
    assert p_plasma > p_drude


def test_pressure_decreases_with_gap():
    for model in (IDEAL, DRUDE):
        gaps = (50e-9, 100e-9, 200e-9, 500e-9)
        vals = [plate_pressure(g, 1.0, model, model).pressure for g in gaps]
        assert all(b < a for a, b in zip(vals, vals[1:]))


def test_truncation_invariant():
    num = LifshitzNumerics(rel_tol_series=1e-6)
    res = plate_pressure(150e-9, 2.0, DRUDE, DRUDE, num)
    assert res.truncation_estimate <= num.rel_tol_series * res.pressure


def test_quadrature_estimate_bounds_tolerance_change():
    coarse = LifshitzNumerics(rel_tol_quadrature=2e-8)
    fine = LifshitzNumerics(rel_tol_quadrature=1e-8)
    res_coarse = plate_pressure(120e-9, 2.0, DRUDE, DRUDE, coarse)
    res_fine = plate_pressure(120e-9, 2.0, DRUDE, DRUDE, fine)
    assert abs(res_fine.pressure - res_coarse.pressure) <= res_coarse.quadrature_estimate


def test_sub_millikelvin_routes_to_integral_branch():
    num = LifshitzNumerics(t_zero_nodes=96)
    res = plate_pressure(100e-9, 5e-4, IDEAL, IDEAL, num)
    assert res.terms_used == 2 * num.t_zero_nodes
    assert res.pressure == pytest.approx(ideal_pressure_closed_form(100e-9), rel=1e-5)


def test_t_zero_node_doubling_converges():
    few = plate_pressure(100e-9, 0.0, DRUDE, DRUDE,
                         LifshitzNumerics(t_zero_nodes=64))
    many = plate_pressure(100e-9, 0.0, DRUDE, DRUDE,
                          LifshitzNumerics(t_zero_nodes=128))
    assert few.pressure == pytest.approx(many.pressure, rel=1e-7)


def test_convergence_error_carries_partial():
    num = LifshitzNumerics(max_matsubara_terms=10)
    with pytest.raises(ConvergenceError) as excinfo:
        plate_pressure(100e-9, 1.0, IDEAL, IDEAL, num)
    partial = excinfo.value.partial
    assert partial is not None
    assert 0.0 < partial.pressure < 20.0
    assert math.isinf(partial.truncation_estimate)


def test_pressure_rejects_bad_arguments():
    with pytest.raises(DomainError):
        plate_pressure(0.0, 1.0, IDEAL, IDEAL)
    with pytest.raises(DomainError):
        plate_pressure(100e-9, -1.0, IDEAL, IDEAL)


def test_numerics_validation():
    with pytest.raises(DomainError):
        LifshitzNumerics(rel_tol_series=1e-2)
    with pytest.raises(DomainError):
        LifshitzNumerics(max_matsubara_terms=5)


# -------------------------------------------------------------- differential

def test_differential_identical_pairs_is_zero():
    assert differential_pressure(100e-9, 1.0, DRUDE, DRUDE, (DRUDE, DRUDE)) == 0.0


def test_differential_plasma_minus_drude_positive():
    diff = differential_pressure(100e-9, 1.0, PLASMA, PLASMA, (DRUDE, DRUDE))
    assert diff > 0.0


def test_two_fluid_at_tc_matches_drude():
    num = LifshitzNumerics(rel_tol_series=1e-6)
    diff = differential_pressure(100e-9, 0.9, TWOFLUID, TWOFLUID,
                                 (DRUDE, DRUDE), num)
    scale = plate_pressure(100e-9, 0.9, DRUDE, DRUDE, num).pressure
    assert abs(diff) <= 2 * num.rel_tol_series * scale


# -------------------------------------------------- quadrature mode-sum oracle

def test_k_integral_against_mode_sum():
    # Ideal plates at zero frequency: the engine's k-integral equals the
    # brute-force round-trip mode sum (1/8a^3) * 2 * sum_m 2/m^3.
    a = 100e-9
    val = float(_k_integrals(IDEAL, IDEAL, 0.0, a, 0.0, 256)[0])
    brute = 2.0 * sum(2.0 / m**3 for m in range(1, 4000)) / (8 * a**3)
    assert val == pytest.approx(brute, rel=1e-6)


def test_k_integral_against_scipy_quad_for_drude():
    # One finite-frequency Matsubara term, reproduced independently with
    # scipy quadrature and locally written Fresnel formulas.
    a, temp, n = 150e-9, 1.3, 7
    xi = 2 * math.pi * n * sc.Boltzmann * temp / sc.hbar
    eps = 1.0 + OMEGA_P**2 / (xi * (xi + GAMMA))

    def integrand(y):
        kappa = y / (2 * a)
        kappa_m = math.sqrt(kappa**2 + (eps - 1.0) * (xi / sc.c) ** 2)
        r_te = (kappa - kappa_m) / (kappa + kappa_m)
        r_tm = (eps * kappa - kappa_m) / (eps * kappa + kappa_m)
        total = 0.0
        for r in (r_te, r_tm):
            t = r * r * math.exp(-y)
            total += t / (1.0 - t)
        return y * y * total

    y_lo = 2 * a * xi / sc.c
    brute, _ = quad(integrand, y_lo, 60.0, limit=300)
    brute /= 8 * a**3
    val = float(_k_integrals(DRUDE, DRUDE, xi, a, temp, 256)[0])
    assert val == pytest.approx(brute, rel=1e-9)


# ----------------------------------------------------------------------- PFA

def make_face(gap=100e-9, jitter=10e-9):
    return BeamFaceGeometry(face_height=350e-9, face_length=220e-6,
                            gap=gap, parallelism_jitter=jitter)


def test_pfa_degenerate_jitter_matches_plate():
    face = make_face(jitter=0.0)
    res = beam_pfa_pressure(face, 1.0, (DRUDE, DRUDE))
    plain = plate_pressure(100e-9, 1.0, DRUDE, DRUDE)
    assert res.pressure == plain.pressure


def test_pfa_jitter_raises_pressure_by_convexity():
    face = make_face(jitter=10e-9)
    res = beam_pfa_pressure(face, 1.0, (DRUDE, DRUDE))
    plain = plate_pressure(100e-9, 1.0, DRUDE, DRUDE).pressure
    assert res.pressure > plain
    # 3-point Gauss-Legendre oracle over the uniform gap distribution.
    nodes, weights = np.polynomial.legendre.leggauss(3)
    oracle = sum(
        0.5 * w * plate_pressure(100e-9 + x * 10e-9, 1.0, DRUDE, DRUDE).pressure
        for x, w in zip(nodes, weights)
    )
    assert res.pressure == pytest.approx(oracle, rel=2e-3)


def test_pfa_eta_scales_linearly():
    face = make_face(jitter=5e-9)
    full = beam_pfa_pressure(face, 1.0, (DRUDE, DRUDE), eta=1.0)
    tenth = beam_pfa_pressure(face, 1.0, (DRUDE, DRUDE), eta=0.1)
    assert tenth.pressure == pytest.approx(0.1 * full.pressure, rel=1e-12)


def test_pfa_warns_when_gap_exceeds_face_height():
    face = BeamFaceGeometry(face_height=350e-9, face_length=220e-6,
                            gap=400e-9, parallelism_jitter=0.0)
    with pytest.warns(UserWarning, match="PFA validity"):
        beam_pfa_pressure(face, 1.0, (DRUDE, DRUDE))


def test_pfa_rejects_bad_eta():
    with pytest.raises(DomainError):
        beam_pfa_pressure(make_face(), 1.0, (DRUDE, DRUDE), eta=0.0)


def test_face_geometry_validation():
    with pytest.raises(DomainError):
        BeamFaceGeometry(350e-9, 220e-6, gap=4e-9, parallelism_jitter=0.0)
    with pytest.raises(DomainError):
        BeamFaceGeometry(350e-9, 220e-6, gap=100e-9, parallelism_jitter=150e-9)
