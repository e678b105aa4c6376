r"""Device figures of merit built on the closed-form resonator responses.

* optical diode — one waveguide, atom-induced loss :math:`\Gamma = g^2/(\gamma + i\Delta)`
  only for the strongly coupled circulation sense;
* four-port circulator — two waveguides A (ports 1, 2) and B (ports 3, 4);
* single-photon Raman interaction with a Λ-atom (quasi-steady amplitudes);
* a one-dimensional coupling-rate optimizer for each figure of merit.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .atom import AtomSpec, dipole_strength
from .errors import DomainError, NonUnimodalWarning


def _check(**rates):
    for name, v in rates.items():
        if not math.isfinite(v) or v < 0:
            raise DomainError(f"{name} must be finite and non-negative, got {v}")


def atom_loss_rate(g: float, gamma: float, delta=0.0):
    """Additional resonator loss Γ = g² / (γ + iΔ) introduced by the atom."""
    delta = np.asarray(delta, dtype=float)
    if g == 0:
        return np.zeros_like(delta, dtype=complex)[()]
    den = gamma + 1j * delta
    if np.any(den == 0):
        raise DomainError("γ + iΔ vanishes; the atom-induced loss is undefined")
    return (g * g / den)[()]


# --- diode -------------------------------------------------------------------


@dataclass(frozen=True)
class DiodeResult:
    """Port 1→2 (CCW) and 2→1 (CW) power transmission spectra."""

    delta: np.ndarray
    T12: np.ndarray
    T21: np.ndarray
    T12_0: float
    T21_0: float
    isolation_dB: float


def diode_transmission(g: float, gamma: float, kappa_0: float, kappa_ext: float, delta=0.0):
    """|(Γ + κ_0 - κ_ext + iΔ) / (Γ + κ_0 + κ_ext + iΔ)|² for one circulation sense."""
    delta = np.asarray(delta, dtype=float)
    G = atom_loss_rate(g, gamma, delta)
    num = G + kappa_0 - kappa_ext + 1j * delta
    den = G + kappa_0 + kappa_ext + 1j * delta
    return (np.abs(num) ** 2 / np.abs(den) ** 2)[()]


def isolation_dB(T12: float, T21: float) -> float:
    """10 log10(T12/T21); +inf when T21 vanishes."""
    if T21 == 0:
        return math.inf if T12 > 0 else math.nan
    if T12 == 0:
        return -math.inf
    return 10.0 * math.log10(T12 / T21)


def diode(g_ccw: float, g_cw: float, gamma: float, kappa_0: float, kappa_ext: float, deltas=None) -> DiodeResult:
    """Optical-diode spectra and on-resonance isolation."""
    _check(g_ccw=g_ccw, g_cw=g_cw, gamma=gamma, kappa_0=kappa_0, kappa_ext=kappa_ext)
    deltas = np.zeros(1) if deltas is None else np.asarray(deltas, dtype=float)
    T12 = np.atleast_1d(diode_transmission(g_ccw, gamma, kappa_0, kappa_ext, deltas))
    T21 = np.atleast_1d(diode_transmission(g_cw, gamma, kappa_0, kappa_ext, deltas))
    T12_0 = float(diode_transmission(g_ccw, gamma, kappa_0, kappa_ext, 0.0))
    T21_0 = float(diode_transmission(g_cw, gamma, kappa_0, kappa_ext, 0.0))
    return DiodeResult(delta=deltas, T12=T12, T21=T21, T12_0=T12_0, T21_0=T21_0,
                       isolation_dB=isolation_dB(T12_0, T21_0))


def g_cw_from_dipoles(g_ccw: float, spec: AtomSpec, alpha_sm_sq: float | None = None) -> float:
    """Coupling of the weak circulation sense for an atom in the stretched state m_F = +F.

    By default the weak mode drives only the σ⁻ transition, so
    ``g_cw = g_ccw · |μ_weak/μ_strong|``.  Passing the residual overlap
    ``alpha_sm_sq = |α_σ-|²`` folds in the imperfect circular polarization:
    ``g_cw² = g_ccw² (|α_σ-|² μ_strong² + |α_σ+|² μ_weak²) / μ_strong²``.
    """
    m = spec.F
    strong = dipole_strength(spec, m, +1)
    weak = dipole_strength(spec, m, -1)
    if strong == 0:
        raise DomainError("the stretched σ+ transition has zero strength")
    if alpha_sm_sq is None:
        return abs(g_ccw * weak / strong)
    if not 0.0 <= alpha_sm_sq <= 1.0:
        raise DomainError("alpha_sm_sq must lie in [0, 1]")
    ratio = (alpha_sm_sq * strong ** 2 + (1.0 - alpha_sm_sq) * weak ** 2) / strong ** 2
    return abs(g_ccw) * math.sqrt(ratio)


# --- circulator --------------------------------------------------------------

#: target output port (0-based) of each input port for the (1→2→3→4→1) routing
ROUTING_PLUS = (1, 2, 3, 0)


@dataclass(frozen=True)
class CirculatorResult:
    """``M[i, j]`` = power transmitted from port i+1 to port j+1."""

    M: np.ndarray
    fidelity: float
    insertion_loss_dB: float
    routing: tuple = ROUTING_PLUS


def circulator_matrix(Gamma_ccw: complex, Gamma_cw: complex, kappa_0: float, kappa_A: float,
                      kappa_B: float, delta: float = 0.0) -> np.ndarray:
    """4×4 port transmission matrix for given atom-induced losses of both senses."""
    M = np.zeros((4, 4))

    def through(G, k_in, k_other):
        den = G + kappa_0 + k_in + k_other + 1j * delta
        return abs(G + kappa_0 + k_other - k_in + 1j * delta) ** 2 / abs(den) ** 2

    def drop(G):
        return 4.0 * kappa_A * kappa_B / abs(G + kappa_0 + kappa_A + kappa_B + 1j * delta) ** 2

    M[0, 1] = through(Gamma_ccw, kappa_A, kappa_B)   # 1→2
    M[1, 0] = through(Gamma_cw, kappa_A, kappa_B)    # 2→1
    M[2, 3] = through(Gamma_ccw, kappa_B, kappa_A)   # 3→4
    M[3, 2] = through(Gamma_cw, kappa_B, kappa_A)    # 4→3
    M[0, 3] = drop(Gamma_ccw)                        # 1→4
    M[2, 1] = drop(Gamma_ccw)                        # 3→2
    M[3, 0] = drop(Gamma_cw)                         # 4→1
    M[1, 2] = drop(Gamma_cw)                         # 2→3
    return M


def routing_fidelity(M: np.ndarray, routing=ROUTING_PLUS) -> float:
    """Mean over input ports of the fraction of the output power that reaches the target port."""
    fractions = []
    for i, j in enumerate(routing):
        total = M[i].sum()
        fractions.append(M[i, j] / total if total > 0 else 0.0)
    return float(np.mean(fractions))


def insertion_loss_dB(M: np.ndarray, routing=ROUTING_PLUS) -> float:
    mean = float(np.mean([M[i, j] for i, j in enumerate(routing)]))
    return math.inf if mean == 0 else -10.0 * math.log10(mean)


def circulator(g: float, gamma: float, kappa_0: float, kappa_A: float, kappa_B: float, spin: int = +1,
               delta: float = 0.0, g_weak: float = 0.0) -> CirculatorResult:
    """Atom-controlled circulator.

    ``spin=+1`` (atom in m_F = +F) loads the CCW mode with Γ = g²/(γ + iΔ) and
    the CW mode with ``g_weak``²/(γ + iΔ) (zero for a perfectly chiral
    scatterer); ``spin=-1`` interchanges the two senses.  Fidelity and loss are
    evaluated for the routing the spin state is meant to realize.
    """
    _check(g=g, gamma=gamma, kappa_0=kappa_0, kappa_A=kappa_A, kappa_B=kappa_B, g_weak=g_weak)
    if spin not in (+1, -1):
        raise DomainError("spin must be +1 or -1")
    strong = atom_loss_rate(g, gamma, delta)
    weak = atom_loss_rate(g_weak, gamma, delta)
    G_ccw, G_cw = (strong, weak) if spin == +1 else (weak, strong)
    M = circulator_matrix(G_ccw, G_cw, kappa_0, kappa_A, kappa_B, delta)
    # the reversed device routes 1→4→3→2→1
    routing = ROUTING_PLUS if spin == +1 else (3, 0, 1, 2)
    return CirculatorResult(M=M, fidelity=routing_fidelity(M, routing),
                            insertion_loss_dB=insertion_loss_dB(M, routing), routing=routing)


# --- single-photon Raman interaction -----------------------------------------


@dataclass(frozen=True)
class SprintResult:
    """Quasi-steady amplitudes keyed by (probe direction ±1, initial ground state m_F = ±1)."""

    t: dict = field(default_factory=dict)
    r: dict = field(default_factory=dict)

    @property
    def swap_efficiency(self) -> float:
        """|r|² for the interacting combination (forward probe, atom in m_F = -1)."""
        return abs(self.r[(+1, -1)]) ** 2


def sprint(g: float, gamma: float, kappa_0: float, kappa_ext: float) -> SprintResult:
    """Λ-atom with equal transition strengths in a perfectly chiral resonator.

    A forward photon interacts only with an atom in m_F = -1 (and vice versa);
    the interacting combination sees the doubled loss 2g²/γ in both numerator
    and denominator, the other one sees the empty resonator.
    """
    _check(g=g, gamma=gamma, kappa_0=kappa_0, kappa_ext=kappa_ext)
    kappa = kappa_0 + kappa_ext
    G2 = 2.0 * g * g / gamma if g else 0.0
    den = kappa + G2
    t_int = (kappa_0 + G2 * kappa_0 / kappa - kappa_ext) / den
    r_int = (G2 * kappa_ext / kappa) / den
    t_free = (kappa_0 - kappa_ext) / kappa
    t = {(+1, -1): t_int, (-1, +1): t_int, (-1, -1): t_free, (+1, +1): t_free}
    r = {(+1, -1): r_int, (-1, +1): r_int, (-1, -1): 0.0, (+1, +1): 0.0}
    return SprintResult(t=t, r=r)


def sprint_critical_kappa(g: float, gamma: float, kappa_0: float) -> float:
    """κ_ext = sqrt(κ_0 (κ_0 + 2g²/γ)), where the interacting transmission vanishes."""
    return math.sqrt(kappa_0 * (kappa_0 + 2.0 * g * g / gamma))


# --- optimizer ---------------------------------------------------------------


class Objective(str, enum.Enum):
    isolation = "isolation"
    circulator_fidelity = "circulator_fidelity"
    sprint_efficiency = "sprint_efficiency"


@dataclass(frozen=True)
class OptimizeResult:
    kappa: float
    value: float
    unimodal: bool
    grid_kappa: np.ndarray
    grid_values: np.ndarray


def objective_function(objective: Objective | str, fixed: dict):
    """Scalar objective of the variable coupling rate κ (rad/s) with other parameters fixed.

    ``isolation`` varies κ_ext of the diode; ``circulator_fidelity`` varies
    κ_A = κ_B; ``sprint_efficiency`` varies κ_ext and returns |r|².
    """
    objective = Objective(objective)
    g, gamma, kappa_0 = fixed["g"], fixed["gamma"], fixed["kappa_0"]
    if objective is Objective.isolation:
        g_cw = fixed.get("g_cw", 0.0)

        def f(k):
            T12 = float(diode_transmission(g, gamma, kappa_0, k))
            T21 = float(diode_transmission(g_cw, gamma, kappa_0, k))
            return 10.0 * math.log10(T12 / max(T21, 1e-300)) if T12 > 0 else -math.inf
    elif objective is Objective.circulator_fidelity:
        g_weak = fixed.get("g_weak", 0.0)

        def f(k):
            return circulator(g, gamma, kappa_0, k, k, spin=+1, g_weak=g_weak).fidelity
    else:
        def f(k):
            return sprint(g, gamma, kappa_0, k).swap_efficiency
    return f


def _local_maxima(values: np.ndarray) -> int:
    v = np.asarray(values)
    inner = (v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])
    count = int(inner.sum())
    count += int(v[0] > v[1]) + int(v[-1] > v[-2])
    return count


def optimize_kappa(objective: Objective | str, fixed: dict, kappa_range: tuple[float, float],
                   grid_points: int = 201, rtol: float = 1e-10) -> OptimizeResult:
    """Maximize a device objective over a coupling rate.

    A log-spaced grid pre-scan checks unimodality and brackets the maximum;
    a bounded scalar minimization in log κ then refines it.  A multimodal scan
    emits :class:`NonUnimodalWarning` and returns the grid argmax.
    """
    lo, hi = kappa_range
    if not (0 < lo < hi) or not math.isfinite(hi):
        raise DomainError("kappa_range must satisfy 0 < lo < hi < inf")
    f = objective_function(objective, fixed)
    grid = np.geomspace(lo, hi, grid_points)
    values = np.array([f(k) for k in grid])
    finite = np.where(np.isfinite(values), values, np.inf)
    i = int(np.argmax(finite))
    if _local_maxima(finite) != 1:
        warnings.warn(f"objective {objective} is not unimodal on the range; using the grid argmax",
                      NonUnimodalWarning, stacklevel=2)
        return OptimizeResult(kappa=float(grid[i]), value=float(values[i]), unimodal=False,
                              grid_kappa=grid, grid_values=values)
    a = math.log(grid[max(i - 1, 0)])
    b = math.log(grid[min(i + 1, grid_points - 1)])
    res = optimize.minimize_scalar(lambda u: -f(math.exp(u)), bounds=(a, b), method="bounded",
                                   options={"xatol": rtol})
    k_best = math.exp(res.x)
    return OptimizeResult(kappa=k_best, value=float(f(k_best)), unimodal=True, grid_kappa=grid, grid_values=values)
