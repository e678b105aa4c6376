"""Closed-form mode amplitudes and the chiral β-factor calculus."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chiralwgm import chiral
from chiralwgm.errors import DomainError, UnsupportedModel

MHZ = 2 * math.pi * 1e6
FIG9 = dict(g=20 * MHZ, gamma=3 * MHZ, kappa_0=5 * MHZ)
rates = st.floats(0.01, 50.0)


def inp(**kw):
    base = dict(g=20.0, gamma=1.0, kappa_0=1.0, kappa_ext=1.0)
    base.update(kw)
    return chiral.AnalyticInput(**base)


def test_unknown_model():
    with pytest.raises(UnsupportedModel):
        inp(model="Lambda")


def test_alpha_out_of_range():
    with pytest.raises(DomainError):
        inp(alpha_sp_sq=1.2)


def test_empty_resonator_limit_for_all_models():
    for model in chiral.Model:
        res = chiral.analytic_modes(inp(g=0.0, model=model, Delta_AP=0.3, Delta_RP=0.3, alpha_sp_sq=0.4))
        assert res.t == pytest.approx(chiral.empty_resonator(1.0, 1.0, 0.3))
        assert res.r == 0


def test_two_level_with_sigma_minus_field_is_invisible():
    deltas = np.linspace(-60, 60, 41)
    t, r = chiral.analytic_spectrum(inp(model="TwoLevelSigmaPlus", alpha_sp_sq=0.0), deltas)
    assert np.allclose(t, [chiral.empty_resonator(1, 1, d) for d in deltas], atol=1e-15)
    assert np.allclose(r, 0)


def test_misaligned_linear_dipole_is_invisible():
    res = chiral.analytic_modes(inp(model="LinearTwoLevel", alpha_sp_sq=0.5, dipole_axis="phi", Delta_AP=1.0,
                                    Delta_RP=1.0))
    assert res.t == pytest.approx(chiral.empty_resonator(1, 1, 1.0))


def test_v_system_circular_field_splits_by_2g():
    deltas = np.linspace(-30, 30, 6001)
    t, r = chiral.analytic_spectrum(inp(alpha_sp_sq=1.0), deltas)
    T = np.abs(t) ** 2
    minima = [deltas[i] for i in range(1, len(T) - 1) if T[i] < T[i - 1] and T[i] < T[i + 1]]
    assert minima == pytest.approx([-20.0, 20.0], abs=0.02)
    assert np.allclose(r, 0)


@pytest.mark.parametrize("model", list(chiral.Model))
def test_power_conservation(model):
    deltas = np.linspace(-70, 70, 301)
    for x in (0.0, 0.2, 0.5, 0.9, 1.0):
        t, r = chiral.analytic_spectrum(inp(model=model, alpha_sp_sq=x), deltas)
        assert np.all(np.abs(t) ** 2 + np.abs(r) ** 2 <= 1 + 1e-12)


def test_backward_probe_swaps_roles():
    fwd = chiral.analytic_modes(inp(alpha_sp_sq=0.8, Delta_AP=5, Delta_RP=5), "forward")
    bwd = chiral.analytic_modes(inp(alpha_sp_sq=0.2, Delta_AP=5, Delta_RP=5), "backward")
    assert fwd.t == pytest.approx(bwd.t) and abs(fwd.r) == pytest.approx(abs(bwd.r))
    with pytest.raises(ValueError):
        chiral.analytic_modes(inp(), "sideways")


# --- β calculus -----------------------------------------------------------------


def test_regime_endpoints():
    t_p, t_m, r_p, r_m = chiral.beta_to_tr(chiral.ChiralCoupling.single(0.5, 0.5))
    assert t_p == 0 and t_m == 0 and r_p ** 2 == 1
    t_p, t_m, r_p, _ = chiral.beta_to_tr(chiral.ChiralCoupling.single(0.5, 0.0))
    assert t_p == 0 and r_p == 0 and t_m == 1
    assert chiral.beta_to_tr(chiral.ChiralCoupling()) == (1, 1, 0, 0)


def test_two_transition_chiral_emitter():
    c = chiral.ChiralCoupling(beta_plus_1=0.25, beta_minus_2=0.25)
    t_p, t_m, r, _ = chiral.beta_to_tr(c)
    assert t_p == t_m == 0.5 and r == 0
    assert c.beta_total == 0.5


@pytest.mark.parametrize("values", [(1.2, 0, 0, 0), (-0.1, 0, 0, 0), (0.6, 0.6, 0, 0)])
def test_invalid_betas(values):
    with pytest.raises(DomainError):
        chiral.ChiralCoupling(*values)


def test_betas_from_rates():
    c = chiral.ChiralCoupling.from_rates(3.0, 1.0, 0.0)
    assert (c.beta_plus, c.beta_minus) == (0.75, 0.25)


def test_empty_resonator_betas():
    c = chiral.resonator_betas(0.0, 1.0, 1.0, 1.0, 0.8)
    assert c.beta_plus == 0.5 and c.beta_minus == 0.5
    assert c.beta_minus_1 == 0 and c.beta_plus_2 == 0
    assert chiral.beta_to_tr(c)[0] == 0


def test_perfectly_circular_betas():
    g, gamma, k0, ke = 3.0, 2.0, 1.0, 1.7
    c = chiral.resonator_betas(g, gamma, k0, ke, 1.0)
    assert c.beta_plus == pytest.approx(ke / (g * g / gamma + k0 + ke))
    assert c.beta_minus == pytest.approx(ke / (k0 + ke))


@settings(max_examples=100, deadline=None)
@given(g=rates, gamma=rates, k0=rates, ke=rates, anchor=st.sampled_from([0.0, 0.5, 1.0]))
def test_beta_route_reproduces_transmission_at_anchors(g, gamma, k0, ke, anchor):
    t_p, t_m, _, _ = chiral.beta_to_tr(chiral.resonator_betas(g, gamma, k0, ke, anchor))
    ref_p, ref_m = chiral.resonator_transmission(g, gamma, k0, ke, anchor)
    assert t_p == pytest.approx(ref_p, abs=1e-12) and t_m == pytest.approx(ref_m, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(g=rates, gamma=rates, k0=rates, ke=rates, x=st.floats(0, 1))
def test_mirror_identity(g, gamma, k0, ke, x):
    _, t_m = chiral.resonator_transmission(g, gamma, k0, ke, x)
    t_p, _ = chiral.resonator_transmission(g, gamma, k0, ke, 1 - x)
    assert t_m == pytest.approx(t_p, abs=1e-12)
    assert abs(t_m) <= 1 + 1e-12


@settings(max_examples=100, deadline=None)
@given(g=rates, gamma=rates, k0=rates, ke=rates)
def test_symmetric_forms_agree_with_general_transmission(g, gamma, k0, ke):
    t, _ = chiral.resonator_transmission(g, gamma, k0, ke, 0.5)
    assert chiral.symmetric_transmission(g, gamma, k0, ke) == pytest.approx(t, abs=1e-12)
    r = chiral.symmetric_reflection(g, gamma, k0, ke)
    assert 0 <= r <= 1 and t ** 2 + r ** 2 <= 1 + 1e-12


def test_symmetric_reflection_matches_linear_dipole_closed_form():
    """A linear dipole in a circularly polarized mode (|α_lin|² = 1/2) is the symmetric scatterer."""
    g, gamma, k0, ke = 2.0, 0.7, 1.0, 1.4
    res = chiral.analytic_modes(chiral.AnalyticInput(g=g, gamma=gamma, kappa_0=k0, kappa_ext=ke,
                                                     alpha_sp_sq=1.0, model="LinearTwoLevel"))
    assert abs(res.r) == pytest.approx(chiral.symmetric_reflection(g, gamma, k0, ke), rel=1e-12)
    assert res.t == pytest.approx(chiral.symmetric_transmission(g, gamma, k0, ke), rel=1e-12)


def test_symmetric_reflection_limits():
    assert chiral.symmetric_reflection(0.0, 1.0, 1.0, 1.0) == 0
    assert chiral.symmetric_reflection(5.0, 1.0, 1.0, 1e9) < 1e-6


def test_critical_points():
    g, gamma, k0 = FIG9["g"], FIG9["gamma"], FIG9["kappa_0"]
    G = g * g / gamma
    assert chiral.critical_kappa_ext(g, gamma, k0, 1.0) == pytest.approx(k0 + G, rel=1e-14)
    assert chiral.critical_kappa_ext(g, gamma, k0, 0.5) == pytest.approx(math.sqrt(k0 * (k0 + G)), rel=1e-14)
    k = chiral.critical_kappa_ext(g, gamma, k0, 0.97)
    assert abs(chiral.resonator_transmission(g, gamma, k0, k, 0.97)[0]) < 1e-12


def test_betas_differ_most_at_geometric_mean():
    g, gamma, k0 = 20.0, 3.0, 5.0
    ks = np.geomspace(0.1, 1000, 20001)
    diff = [abs(chiral.resonator_betas(g, gamma, k0, k, 1.0).beta_minus
                - chiral.resonator_betas(g, gamma, k0, k, 1.0).beta_plus) for k in ks]
    best = ks[int(np.argmax(diff))]
    assert best == pytest.approx(math.sqrt(k0 * (k0 + g * g / gamma)), rel=1e-3)


def test_intermediate_overlap_beta_route_misses_reflection():
    """Away from the anchors t = 1 - 2β still holds, but the β-route reflection is zero
    while the coupled modes do reflect (the atom scatters between them)."""
    g, gamma, k0, ke, x = 2.0, 1.0, 1.0, 1.5, 0.7
    c = chiral.resonator_betas(g, gamma, k0, ke, x)
    t_p, _, r_beta, _ = chiral.beta_to_tr(c)
    assert t_p == pytest.approx(chiral.resonator_transmission(g, gamma, k0, ke, x)[0], abs=1e-12)
    assert r_beta == 0
    full = chiral.analytic_modes(chiral.AnalyticInput(g=g, gamma=gamma, kappa_0=k0, kappa_ext=ke, alpha_sp_sq=x,
                                                      model="TwoLevelSigmaPlus"))
    assert full.t == pytest.approx(t_p, abs=1e-12)
    assert abs(full.r) > 0.1


def test_purcell_regime():
    assert chiral.purcell_regime(g=5, gamma=1, kappa_0=1, kappa_ext=10)
    assert not chiral.purcell_regime(g=5, gamma=1, kappa_0=1, kappa_ext=3)
