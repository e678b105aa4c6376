r"""Hyperfine F -> F' transitions: Zeeman manifolds, dipole strengths, lowering operators.

Relative transition strengths are

.. math::
    \mu_{m_F}^{m_{F'}} = \sqrt{(2F'+1)(2F+1)(2J+1)}
    \begin{pmatrix} F' & 1 & F \\ m_{F'} & q & -m_F \end{pmatrix}
    \begin{Bmatrix} J & J' & 1 \\ F' & F & I \end{Bmatrix},

and every tabulated value already carries the factor
:math:`\sqrt{(2J'+1)/(2J+1)}`, so a stretched cycling transition has unit
strength.  The quantization axis is the resonator symmetry axis.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy import constants, sparse

from .errors import InvalidAngularMomenta
from .specfun.wigner import twice, wigner_3j_doubled, wigner_6j_doubled

#: Bohr magneton over hbar in rad s^-1 T^-1
MU_B_OVER_HBAR = constants.physical_constants["Bohr magneton"][0] / constants.hbar

MHZ = 2.0 * math.pi * 1e6


def _triangle2(a2, b2, c2):
    return (a2 + b2 + c2) % 2 == 0 and abs(a2 - b2) <= c2 <= a2 + b2


@dataclass(frozen=True)
class AtomSpec:
    """Quantum numbers and rates of a single F -> F' transition.

    Angular momenta may be given as ints, floats or Fractions; ``gamma`` is the
    atomic field (dipole) decay rate in rad/s.
    """

    F: Fraction
    F_prime: Fraction
    J: Fraction
    J_prime: Fraction
    I: Fraction
    g_F: float = 0.0
    g_F_prime: float = 0.0
    gamma: float = 0.0
    name: str = ""

    def __post_init__(self):
        for attr in ("F", "F_prime", "J", "J_prime", "I"):
            value = getattr(self, attr)
            object.__setattr__(self, attr, Fraction(twice(value), 2))
        F2, Fp2, J2, Jp2, I2 = (twice(getattr(self, a)) for a in ("F", "F_prime", "J", "J_prime", "I"))
        if min(F2, Fp2, J2, Jp2, I2) < 0:
            raise InvalidAngularMomenta("angular momenta must be non-negative")
        if abs(F2 - Fp2) > 2 or (F2 == 0 and Fp2 == 0):
            raise InvalidAngularMomenta(f"F={self.F} -> F'={self.F_prime} is not a dipole transition")
        if not _triangle2(J2, I2, F2):
            raise InvalidAngularMomenta(f"(J, I, F) = ({self.J}, {self.I}, {self.F}) violates the triangle rule")
        if not _triangle2(Jp2, I2, Fp2):
            raise InvalidAngularMomenta(
                f"(J', I, F') = ({self.J_prime}, {self.I}, {self.F_prime}) violates the triangle rule"
            )
        if self.gamma < 0:
            raise InvalidAngularMomenta("gamma must be non-negative")

    @classmethod
    def from_dict(cls, data: dict) -> "AtomSpec":
        """Build from the preset JSON layout (rates in MHz, converted to rad/s)."""
        return cls(
            F=data["F"], F_prime=data["Fp"], J=data["J"], J_prime=data["Jp"], I=data["I"],
            g_F=float(data.get("gF", 0.0)), g_F_prime=float(data.get("gFp", 0.0)),
            gamma=float(data.get("gamma_MHz", 0.0)) * MHZ, name=data.get("name", ""),
        )

    def to_dict(self) -> dict:
        def num(x):
            return int(x) if x.denominator == 1 else float(x)

        return {
            "name": self.name, "F": num(self.F), "Fp": num(self.F_prime), "J": num(self.J),
            "Jp": num(self.J_prime), "I": num(self.I), "gF": self.g_F, "gFp": self.g_F_prime,
            "gamma_MHz": self.gamma / MHZ,
        }


def load_presets(path=None) -> dict[str, AtomSpec]:
    """Atom presets from a JSON list (defaults to the bundled file)."""
    path = Path(path) if path else Path(__file__).with_name("presets.json")
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return {entry["name"]: AtomSpec.from_dict(entry) for entry in data}


def preset(name: str) -> AtomSpec:
    return load_presets()[name]


@dataclass(frozen=True)
class LevelScheme:
    """Zeeman basis: ground states first (m ascending), then excited states."""

    ground: tuple
    excited: tuple
    index: dict = field(compare=False)

    @property
    def dim(self) -> int:
        return len(self.ground) + len(self.excited)

    @property
    def n_ground(self) -> int:
        return len(self.ground)

    def labels(self) -> list[str]:
        def fmt(x):
            return str(x) if Fraction(x).denominator == 1 else f"{Fraction(x).numerator}/2"
        out = [f"g(F={fmt(F)},m={fmt(m)})" for F, m in self.ground]
        out += [f"e(F'={fmt(F)},m={fmt(m)})" for F, m in self.excited]
        return out


def _manifold(F: Fraction) -> tuple:
    F2 = twice(F)
    return tuple((F, Fraction(m2, 2)) for m2 in range(-F2, F2 + 1, 2))


def build_scheme(spec: AtomSpec) -> LevelScheme:
    """Complete ground and excited Zeeman manifolds of the transition."""
    ground = tuple(("g",) + s for s in _manifold(spec.F))
    excited = tuple(("e",) + s for s in _manifold(spec.F_prime))
    index = {s: i for i, s in enumerate(ground + excited)}
    return LevelScheme(
        ground=tuple(s[1:] for s in ground),
        excited=tuple(s[1:] for s in excited),
        index=index,
    )


@dataclass(frozen=True)
class DipoleTable:
    """``mu[(m_F, dm)]`` = strength of |F, m_F> <-> |F', m_F + dm>, prefactor included."""

    mu: dict

    def strength(self, m_F, dm: int) -> float:
        return self.mu.get((Fraction(m_F), int(dm)), 0.0)


def dipole_strength(spec: AtomSpec, m_F, dm: int) -> float:
    """Relative strength of the transition from ground ``m_F`` to excited ``m_F + dm``.

    The 3-j projection in the photon slot is ``m_F - m_F'``, the only value the
    selection rule admits; σ± light corresponds to ``dm = ±1``.
    """
    F2, Fp2 = twice(spec.F), twice(spec.F_prime)
    J2, Jp2, I2 = twice(spec.J), twice(spec.J_prime), twice(spec.I)
    m2 = twice(m_F)
    mp2 = m2 + 2 * int(dm)
    if abs(m2) > F2 or abs(mp2) > Fp2:
        return 0.0
    three_j = wigner_3j_doubled(Fp2, 2, F2, mp2, m2 - mp2, -m2)
    six_j = wigner_6j_doubled(J2, Jp2, 2, Fp2, F2, I2)
    pref = math.sqrt((Fp2 + 1) * (F2 + 1) * (J2 + 1))
    footnote = math.sqrt((Jp2 + 1) / (J2 + 1))
    return footnote * pref * three_j * six_j


def dipole_table(spec: AtomSpec) -> DipoleTable:
    mu = {}
    for _, m in _manifold(spec.F):
        for dm in (-1, 0, 1):
            mu[(m, dm)] = dipole_strength(spec, m, dm)
    return DipoleTable(mu=mu)


def lowering_ops(scheme: LevelScheme, table: DipoleTable) -> dict[int, sparse.csr_matrix]:
    """Atomic lowering operators d_{-1}, d_0, d_{+1} as sparse matrices on the scheme basis."""
    ops = {}
    for dm in (-1, 0, 1):
        rows, cols, vals = [], [], []
        for i, (F, m) in enumerate(scheme.ground):
            target = m + dm
            for j, (Fp, mp) in enumerate(scheme.excited):
                if mp == target:
                    value = table.strength(m, dm)
                    if value != 0.0:
                        rows.append(i)
                        cols.append(scheme.n_ground + j)
                        vals.append(value)
        ops[dm] = sparse.csr_matrix((vals, (rows, cols)), shape=(scheme.dim, scheme.dim))
    return ops


def zeeman_shifts(scheme: LevelScheme, spec: AtomSpec, B: float) -> np.ndarray:
    """mu_B g m B / hbar (rad/s) for every basis state; excited states use g_F'."""
    shifts = np.zeros(scheme.dim)
    for i, (_, m) in enumerate(scheme.ground):
        shifts[i] = MU_B_OVER_HBAR * spec.g_F * float(m) * B
    for j, (_, m) in enumerate(scheme.excited):
        shifts[scheme.n_ground + j] = MU_B_OVER_HBAR * spec.g_F_prime * float(m) * B
    return shifts


@dataclass(frozen=True)
class AtomModel:
    """What the master-equation builder needs from an atom.

    ``lowering`` maps Δm_F to the lowering operator driven by that
    polarization component; ``transitions`` lists every (ground, excited,
    strength) triple, each of which gets its own decay channel.
    """

    dim: int
    n_ground: int
    lowering: dict
    transitions: tuple
    zeeman: np.ndarray
    labels: tuple = ()

    @property
    def excited_projector(self) -> np.ndarray:
        diag = np.zeros(self.dim)
        diag[self.n_ground:] = 1.0
        return diag


def atom_model(spec: AtomSpec, B: float = 0.0) -> AtomModel:
    """Full Zeeman-resolved model of ``spec`` in magnetic field ``B`` (tesla)."""
    scheme = build_scheme(spec)
    table = dipole_table(spec)
    ops = lowering_ops(scheme, table)
    transitions = []
    for dm, op in ops.items():
        coo = op.tocoo()
        for i, j, v in zip(coo.row, coo.col, coo.data):
            transitions.append((int(i), int(j), float(v)))
    return AtomModel(
        dim=scheme.dim,
        n_ground=scheme.n_ground,
        lowering=ops,
        transitions=tuple(sorted(transitions)),
        zeeman=zeeman_shifts(scheme, spec, B),
        labels=tuple(scheme.labels()),
    )


def _custom(n_ground, n_excited, couplings, labels):
    dim = n_ground + n_excited
    ops = {}
    transitions = set()
    for dm in (-1, 0, 1):
        rows, cols, vals = [], [], []
        for (g, e, q), v in couplings.items():
            if q == dm:
                rows.append(g)
                cols.append(n_ground + e)
                vals.append(v)
        ops[dm] = sparse.csr_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=complex)
    # one decay channel per (g, e) pair, with the total strength of that pair
    pair = {}
    for (g, e, q), v in couplings.items():
        pair[(g, e)] = pair.get((g, e), 0.0) + abs(v) ** 2
    for (g, e), s in pair.items():
        transitions.add((g, n_ground + e, math.sqrt(s)))
    return AtomModel(
        dim=dim, n_ground=n_ground, lowering=ops, transitions=tuple(sorted(transitions)),
        zeeman=np.zeros(dim), labels=tuple(labels),
    )


def v_system() -> AtomModel:
    """F=0 -> F'=1 V-system (J=0 -> J'=1, I=0): equal σ± strengths, closed."""
    return atom_model(AtomSpec(F=0, F_prime=1, J=0, J_prime=1, I=0, name="V_J0_J1"))


def two_level_sigma_plus() -> AtomModel:
    """Effective two-level atom driven only by σ+ light."""
    return _custom(1, 1, {(0, 0, +1): 1.0}, ("g", "e"))


def linear_two_level(axis: str = "r") -> AtomModel:
    """Two-level atom with a linear dipole along ``e_r`` or ``e_phi``.

    ``e_r = (e_σ+ + e_σ-)/√2`` and ``e_phi = (e_σ+ - e_σ-)/√2``, so the single
    transition appears in d_{+1} and d_{-1} with weights ±1/√2 and the mode
    coupling reduces to the linear overlap.
    """
    if axis not in ("r", "phi"):
        raise ValueError("axis must be 'r' or 'phi'")
    sign = 1.0 if axis == "r" else -1.0
    c = 1.0 / math.sqrt(2.0)
    return _custom(1, 1, {(0, 0, +1): c, (0, 0, -1): sign * c}, ("g", "e"))
