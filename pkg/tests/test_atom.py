"""Zeeman manifolds, dipole strengths and lowering operators."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import constants
from sympy import Rational, sqrt
from sympy.physics.wigner import wigner_3j as sym_3j
from sympy.physics.wigner import wigner_6j as sym_6j

from chiralwgm import atom
from chiralwgm.errors import InvalidAngularMomenta

RB = atom.preset("Rb85_D2_F3_F4")


@pytest.mark.parametrize("F,Fp,J,Jp,I,dim", [(0, 1, 0, 1, 0, 4), (3, 4, 0.5, 1.5, 2.5, 16),
                                             (0.5, 0.5, 0.5, 0.5, 0, 4)])
def test_scheme_dimensions(F, Fp, J, Jp, I, dim):
    scheme = atom.build_scheme(atom.AtomSpec(F=F, F_prime=Fp, J=J, J_prime=Jp, I=I))
    assert scheme.dim == dim
    assert sorted(scheme.index.values()) == list(range(dim))
    assert all(i < scheme.n_ground for key, i in scheme.index.items() if key[0] == "g")


@pytest.mark.parametrize("kwargs", [
    dict(F=0, F_prime=2, J=0, J_prime=1, I=0),        # |ΔF| > 1
    dict(F=0, F_prime=0, J=0, J_prime=1, I=0),        # 0 -> 0
    dict(F=3, F_prime=4, J=0.5, J_prime=1.5, I=0.5),  # (J, I, F) triangle
    dict(F=1, F_prime=1, J=0.5, J_prime=0.5, I=0.25),  # not a half-integer
])
def test_invalid_angular_momenta(kwargs):
    with pytest.raises(InvalidAngularMomenta):
        atom.AtomSpec(**kwargs)


def test_rb85_cycling_ratio():
    strong = atom.dipole_strength(RB, 3, +1)
    weak = atom.dipole_strength(RB, 3, -1)
    assert strong ** 2 / weak ** 2 == pytest.approx(28.0, rel=1e-12)
    assert abs(strong) == pytest.approx(1.0, rel=1e-12)   # stretched transition has unit strength


def test_v_system_equal_strengths():
    table = atom.dipole_table(atom.AtomSpec(F=0, F_prime=1, J=0, J_prime=1, I=0))
    assert table.strength(0, +1) == pytest.approx(table.strength(0, -1))
    assert abs(table.strength(0, +1)) == pytest.approx(1.0)


def test_out_of_manifold_entries_vanish():
    table = atom.dipole_table(atom.AtomSpec(F=1, F_prime=0, J=0.5, J_prime=0.5, I=0.5))
    assert table.strength(1, +1) == 0.0
    assert table.strength(-1, -1) == 0.0
    assert table.strength(1, -1) != 0.0


def _sympy_strength(spec, m, dm):
    F, Fp, J, Jp, I = (Rational(Fraction(x).numerator, Fraction(x).denominator)
                       for x in (spec.F, spec.F_prime, spec.J, spec.J_prime, spec.I))
    m = Rational(Fraction(m).numerator, Fraction(m).denominator)
    mp = m + dm
    if abs(mp) > Fp:
        return 0.0
    value = (sqrt((2 * Jp + 1) / (2 * J + 1)) * sqrt((2 * Fp + 1) * (2 * F + 1) * (2 * J + 1))
             * sym_3j(Fp, 1, F, mp, m - mp, -m) * sym_6j(J, Jp, 1, Fp, F, I))
    return float(value)


def _specs_up_to(limit=4):
    out = []
    halves = [Fraction(k, 2) for k in range(0, 2 * limit + 1)]
    for J, Jp in [(Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 2), Fraction(3, 2)), (0, 1), (1, 2)]:
        for I in [Fraction(k, 2) for k in range(0, 8)]:
            for F, Fp in itertools.product(halves, halves):
                try:
                    out.append(atom.AtomSpec(F=F, F_prime=Fp, J=J, J_prime=Jp, I=I))
                except InvalidAngularMomenta:
                    pass
    return out


SPECS = _specs_up_to()


def test_many_specs_are_enumerated():
    assert len(SPECS) > 40


@pytest.mark.parametrize("spec", SPECS[::3], ids=lambda s: f"F{s.F}-{s.F_prime}-J{s.J}-{s.J_prime}-I{s.I}")
def test_strengths_match_independent_racah(spec):
    for m in [Fraction(k, 2) - spec.F for k in range(0, int(4 * spec.F) + 1, 2)]:
        for dm in (-1, 0, 1):
            assert atom.dipole_strength(spec, m, dm) == pytest.approx(_sympy_strength(spec, m, dm), abs=1e-12)


@pytest.mark.parametrize("spec", SPECS[::3], ids=lambda s: f"F{s.F}-{s.F_prime}-J{s.J}-{s.J_prime}-I{s.I}")
def test_branching_sums_per_excited_state(spec):
    model = atom.atom_model(spec)
    totals = np.zeros(model.dim)
    for g, e, v in model.transitions:
        totals[e] += v * v
    # every excited sublevel decays with the same total strength
    # (2J'+1)(2F+1) {J J' 1; F' F I}²
    six = float(sym_6j(*(Rational(Fraction(x).numerator, Fraction(x).denominator)
                         for x in (spec.J, spec.J_prime, 1, spec.F_prime, spec.F, spec.I))))
    expected = (2 * spec.J_prime + 1) * (2 * spec.F + 1) * six ** 2
    assert np.allclose(totals[model.n_ground:], float(expected), atol=1e-12)


def test_lowering_operators_structure():
    scheme = atom.build_scheme(RB)
    ops = atom.lowering_ops(scheme, atom.dipole_table(RB))
    ng = scheme.n_ground
    for dm, op in ops.items():
        dense = op.toarray()
        assert np.all(dense[ng:, :] == 0) and np.all(dense[:, :ng] == 0)   # |g><e| block only
        assert np.allclose((op @ op).toarray(), 0)                         # nilpotent
    # d_{+1} from m_F=+3 to m_F'=+4
    g_idx = scheme.index[("g", Fraction(3), Fraction(3))]
    e_idx = scheme.index[("e", Fraction(4), Fraction(4))]
    assert ops[+1][g_idx, e_idx] == pytest.approx(atom.dipole_strength(RB, 3, +1))


def test_v_system_operators():
    model = atom.v_system()
    assert model.dim == 4 and model.n_ground == 1
    d0 = model.lowering[0].toarray()
    assert np.count_nonzero(d0) == 1 and d0[0, 2] != 0                    # m=0 -> m'=0


def test_zeeman_shifts():
    scheme = atom.build_scheme(RB)
    assert np.all(atom.zeeman_shifts(scheme, RB, 0.0) == 0)
    B = 1e-4
    shifts = atom.zeeman_shifts(scheme, RB, B)
    mu_b = constants.physical_constants["Bohr magneton"][0] / constants.hbar
    ground = shifts[: scheme.n_ground]
    assert np.allclose(np.diff(ground), mu_b * RB.g_F * B)
    zero = scheme.index[("e", Fraction(4), Fraction(0))]
    assert shifts[zero] == 0.0


def test_presets_round_trip(tmp_path):
    presets = atom.load_presets()
    assert {"Rb85_D2_F3_F4", "V_J0_J1"} <= set(presets)
    rb = presets["Rb85_D2_F3_F4"]
    assert rb.gamma == pytest.approx(2 * math.pi * 3e6)
    again = atom.AtomSpec.from_dict(rb.to_dict())
    assert again == rb


def test_linear_two_level_axes():
    r = atom.linear_two_level("r")
    phi = atom.linear_two_level("phi")
    assert r.lowering[1][0, 1] == pytest.approx(r.lowering[-1][0, 1])
    assert phi.lowering[1][0, 1] == pytest.approx(-phi.lowering[-1][0, 1])
    with pytest.raises(ValueError):
        atom.linear_two_level("z")
