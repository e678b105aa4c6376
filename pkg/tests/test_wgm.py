"""Whispering-gallery mode solver: roots, fields, boundary conditions and polarization."""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chiralwgm import wgm
from chiralwgm.errors import DomainError, NoRootInBracket
from conftest import SILICA

mpmath.mp.dps = 50


def mp_residual(spec: wgm.ModeSpec, k: float) -> float:
    """|P J'(u)/J(u) - Y'(v)/Y(v)| relative to the larger term, in 50-digit arithmetic."""
    u = mpmath.mpf(spec.n0) * k * spec.R
    v = mpmath.mpf(k) * spec.R
    lhs = spec.P * mpmath.besselj(spec.m, u, derivative=1) / mpmath.besselj(spec.m, u)
    rhs = mpmath.bessely(spec.m, v, derivative=1) / mpmath.bessely(spec.m, v)
    return float(abs(lhs - rhs) / max(abs(lhs), abs(rhs)))


def test_silica_resonance_satisfies_condition(silica_mode):
    assert silica_mode.residual < 1e-9
    assert mp_residual(silica_mode.spec, silica_mode.k_phi_r) < 1e-9
    # wavelength near the rubidium D2 line for this geometry
    wavelength = 2 * math.pi / silica_mode.k_phi_r
    assert 800e-9 < wavelength < 900e-9


def test_radial_orders_are_ordered_and_counted():
    specs = [wgm.ModeSpec(**SILICA, p=p) for p in range(4)]
    sols = [wgm.solve_resonance(s) for s in specs]
    fs = [s.f_p_m for s in sols]
    assert fs == sorted(fs) and len(set(fs)) == 4
    assert [wgm.interior_intensity_minima(s) for s in sols] == [0, 1, 2, 3]
    roots = wgm.find_roots(specs[3])
    assert np.allclose(roots, [s.k_phi_r for s in sols], rtol=1e-12)


@settings(max_examples=15, deadline=None)
@given(n0=st.floats(1.4, 3.5), m=st.integers(20, 400), p=st.integers(0, 3),
       pol=st.sampled_from(["TM", "TE"]))
def test_random_modes_have_small_residual(n0, m, p, pol):
    spec = wgm.ModeSpec(n0=n0, R=10e-6, m=m, p=p, polarization=pol)
    sol = wgm.solve_resonance(spec)
    assert sol.residual < 1e-9
    assert mp_residual(spec, sol.k_phi_r) < 1e-8


def test_te_and_tm_resonances_differ():
    tm = wgm.solve_resonance(wgm.ModeSpec(**SILICA, polarization="TM"))
    te = wgm.solve_resonance(wgm.ModeSpec(**SILICA, polarization="TE"))
    assert tm.k_phi_r != pytest.approx(te.k_phi_r, rel=1e-6)


def test_boundary_conditions_at_surface(silica_mode):
    R = SILICA["R"]
    eps = 1e-9
    inside = wgm.field_at(silica_mode, R * (1 - eps))
    outside = wgm.field_at(silica_mode, R * (1 + eps))
    # tangential E continuous; normal D continuous (TM: E in the r-phi plane)
    assert inside.E_phi == pytest.approx(outside.E_phi, rel=1e-6)
    assert SILICA["n0"] ** 2 * inside.E_r == pytest.approx(outside.E_r, rel=1e-6)
    assert abs(inside.E_z) == 0.0


def test_te_mode_is_polarized_along_axis():
    sol = wgm.solve_resonance(wgm.ModeSpec(**SILICA, polarization="TE"))
    f = wgm.field_at(sol, SILICA["R"] * 0.99)
    assert abs(f.E_r) == 0.0 and abs(f.E_phi) == 0.0 and abs(f.E_z) > 0
    ov = wgm.overlaps_at(sol, wgm.surface_radius(sol))
    assert abs(ov.alpha_pi) == pytest.approx(1.0)
    assert ov.O == pytest.approx(1.0)


@pytest.mark.parametrize("frac", [0.9, 0.97, 1.02, 1.05])
def test_gauss_law(silica_mode, frac):
    assert wgm.gauss_residual(silica_mode, SILICA["R"] * frac) < 1e-5


def test_gauss_residual_rejects_surface(silica_mode):
    with pytest.raises(DomainError):
        wgm.gauss_residual(silica_mode, SILICA["R"])


def test_mode_is_normalized_to_unit_peak(silica_mode):
    r = np.linspace(SILICA["R"] * 0.8, SILICA["R"], 4001)
    er, ephi, ez = wgm.field_components(silica_mode, r)
    peak = np.sqrt(np.max(np.abs(er) ** 2 + np.abs(ephi) ** 2 + np.abs(ez) ** 2))
    assert peak == pytest.approx(1.0, rel=1e-4)


def test_cw_field_is_time_reversed_ccw(silica_mode):
    r = SILICA["R"] * 1.001
    ccw = wgm.field_at(silica_mode, r, wgm.Direction.CCW).vector
    cw = wgm.field_at(silica_mode, r, wgm.Direction.CW).vector
    assert np.allclose(cw, np.conj(ccw))


def test_surface_overlaps(silica_overlaps):
    ov = silica_overlaps
    total = abs(ov.alpha_sigma_plus) ** 2 + abs(ov.alpha_pi) ** 2 + abs(ov.alpha_sigma_minus) ** 2
    assert total == pytest.approx(1.0, abs=1e-12)
    # time reversal maps σ+ ↔ σ-
    assert ov.beta_sigma_plus == pytest.approx(np.conj(ov.alpha_sigma_minus))
    assert ov.beta_sigma_minus == pytest.approx(np.conj(ov.alpha_sigma_plus))
    # strongly σ+ evanescent field, E_phi out of phase with E_r
    assert abs(ov.alpha_sigma_plus) ** 2 > 0.95
    assert 0.6 < ov.ratio_R < 0.8
    # for a field in the r-phi plane the spin density and overlap are tied together
    assert ov.S_z_norm == pytest.approx(abs(ov.alpha_sigma_plus) ** 2 - abs(ov.alpha_sigma_minus) ** 2)
    assert ov.O == pytest.approx(1 - ov.S_z_norm ** 2, rel=1e-10)


def test_overlap_of_pure_polarizations():
    sp = np.array([1, 1j, 0]) / math.sqrt(2)
    assert wgm.field_overlap(sp, np.conj(sp)) == pytest.approx(0.0, abs=1e-15)
    lin = np.array([1.0, 0.0, 0.0], dtype=complex)
    assert wgm.field_overlap(lin, lin) == pytest.approx(1.0)
    a_sp, a_pi, a_sm = wgm.polarization_overlaps(sp)
    assert abs(a_sp) == pytest.approx(1.0) and abs(a_sm) < 1e-15


def test_standing_wave_contrast():
    assert wgm.standing_wave_contrast(0.0) == 0.0
    assert wgm.standing_wave_contrast(0.25) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        wgm.standing_wave_contrast(1.5)


def test_radial_profile_columns(silica_mode):
    rows = wgm.radial_profile(silica_mode, -100, 100, 21)
    assert tuple(rows[0]) == wgm.PROFILE_COLUMNS
    surface = [r for r in rows if r["r_minus_R_nm"] == 0.0][0]
    assert surface["ratio_R"] == pytest.approx(0.6865, abs=1e-3)
    outside = [r["intensity_norm"] for r in rows if r["r_minus_R_nm"] > 0]
    assert all(a > b for a, b in zip(outside, outside[1:]))     # evanescent decay


@pytest.mark.parametrize("kwargs", [dict(n0=1.0, R=1e-5, m=10), dict(n0=1.5, R=-1.0, m=10),
                                    dict(n0=1.5, R=1e-5, m=0), dict(n0=1.5, R=1e-5, m=10, p=-1)])
def test_invalid_specs(kwargs):
    with pytest.raises(DomainError):
        wgm.ModeSpec(**kwargs)


def test_missing_root_raises():
    with pytest.raises(NoRootInBracket):
        wgm.solve_resonance(wgm.ModeSpec(n0=1.45, R=20e-6, m=206, p=80))
