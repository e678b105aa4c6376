"""Self-checks run by ``chiralwgm validate``: oracle equivalences between independent paths."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import atom as atom_mod
from . import chiral, devices, lindblad
from .specfun import bessel_jy, wigner_3j


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.tolerance)


def _rel(a: complex, b: complex, floor: float = 1e-12) -> float:
    return abs(a - b) / max(abs(b), floor)


MODEL_ATOMS = {
    chiral.Model.VSystem: atom_mod.v_system,
    chiral.Model.TwoLevelSigmaPlus: atom_mod.two_level_sigma_plus,
    chiral.Model.LinearTwoLevel: lambda: atom_mod.linear_two_level("r"),
}


def master_vs_analytic(model: chiral.Model, samples: int, seed: int = 0) -> float:
    """Worst relative deviation of master-equation t, r from the closed forms."""
    rng = np.random.default_rng(seed)
    atom = MODEL_ATOMS[model]()
    worst = 0.0
    for _ in range(samples):
        g = float(10 ** rng.uniform(-1, math.log10(30)))
        x = float(rng.uniform())
        d = float(rng.uniform(-3 * g, 3 * g))
        p = lindblad.SystemParams.from_sigma_plus(x, g=g, gamma=1.0, kappa_0=1.0, kappa_ext=1.0,
                                                  Delta_AP=d, Delta_RP=d)
        s = lindblad.solve(atom, p)
        ref = chiral.analytic_modes(chiral.AnalyticInput(g=g, gamma=1.0, kappa_0=1.0, kappa_ext=1.0, Delta_AP=d,
                                                         Delta_RP=d, alpha_sp_sq=x, model=model))
        worst = max(worst, _rel(s.t, ref.t), _rel(s.r, ref.r))
    return worst


def run_checks(samples: int = 5) -> list[Check]:
    checks = []
    for model in chiral.Model:
        checks.append(Check(f"master_vs_analytic[{model.value}]", master_vs_analytic(model, samples), 1e-5))

    rng = np.random.default_rng(1)
    mirror = 0.0
    consistency = 0.0
    for _ in range(200):
        g, gamma, k0, ke = rng.uniform(0.0, 10.0), rng.uniform(0.1, 5.0), rng.uniform(0.1, 5.0), rng.uniform(0.0, 10.0)
        x = rng.uniform()
        tp, tm = chiral.resonator_transmission(g, gamma, k0, ke, x)
        tp2, _ = chiral.resonator_transmission(g, gamma, k0, ke, 1 - x)
        mirror = max(mirror, abs(tm - tp2))
        for anchor in (0.0, 0.5, 1.0):
            bt = chiral.beta_to_tr(chiral.resonator_betas(g, gamma, k0, ke, anchor))
            ref = chiral.resonator_transmission(g, gamma, k0, ke, anchor)
            consistency = max(consistency, abs(bt[0] - ref[0]), abs(bt[1] - ref[1]))
    checks.append(Check("mirror_identity", mirror, 1e-12))
    checks.append(Check("beta_consistency_anchors", consistency, 1e-12))

    wr = max(bessel_jy(m, x).wronskian_residual() for m in (0, 1, 10, 206, 500) for x in (0.5, 10.0, 300.0))
    checks.append(Check("bessel_wronskian", wr, 1e-10))
    checks.append(Check("wigner_3j_110_000", abs(wigner_3j(1, 1, 0, 0, 0, 0) + 1 / math.sqrt(3)), 1e-12))
    rb = atom_mod.preset("Rb85_D2_F3_F4")
    ratio = (atom_mod.dipole_strength(rb, 3, 1) / atom_mod.dipole_strength(rb, 3, -1)) ** 2
    checks.append(Check("rb85_strength_ratio", abs(ratio - 28) / 28, 1e-9))

    g, gamma, k0 = 20.0, 3.0, 5.0
    k_star = devices.sprint_critical_kappa(g, gamma, k0)
    checks.append(Check("sprint_critical_t", abs(devices.sprint(g, gamma, k0, k_star).t[(+1, -1)]), 1e-10))
    c_plus = devices.circulator(g, gamma, k0, 11.0, 11.0, spin=+1).M
    c_minus = devices.circulator(g, gamma, k0, 11.0, 11.0, spin=-1).M
    checks.append(Check("circulator_spin_transpose", float(np.max(np.abs(c_plus.T - c_minus))), 1e-12))
    return checks
