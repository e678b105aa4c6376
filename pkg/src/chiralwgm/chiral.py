r"""Closed-form chiral light–matter models.

Two families live here:

* weak-drive steady states of the two resonator modes for three effective
  level schemes (V-system, σ⁺ two-level atom, linear dipole), valid for any
  detuning through the complex rates :math:`\tilde\gamma = \gamma + i\Delta_{AP}`
  and :math:`\tilde\kappa = \kappa_0 + \kappa_{ext} + i\Delta_{RP}`;
* the on-resonance β-factor calculus of an emitter (or an atom–resonator
  composite) coupled to a chiral waveguide, :math:`t = 1 - 2\beta`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedModel


class Model(str, enum.Enum):
    VSystem = "VSystem"
    TwoLevelSigmaPlus = "TwoLevelSigmaPlus"
    LinearTwoLevel = "LinearTwoLevel"


@dataclass(frozen=True)
class AnalyticInput:
    """Parameters of the closed-form steady states (rates in rad/s).

    ``alpha_sp`` / ``beta_sp`` are the complex σ⁺ overlaps of the CCW and CW
    modes; by default they are real, ``sqrt(x)`` and ``sqrt(1 - x)`` with
    ``x = alpha_sp_sq``.  For the linear dipole, ``alpha_lin`` / ``beta_lin``
    default to the projections onto ``e_r`` or ``e_phi`` (``dipole_axis``).
    """

    g: float
    gamma: float
    kappa_0: float
    kappa_ext: float
    Delta_AP: float = 0.0
    Delta_RP: float = 0.0
    alpha_sp_sq: float = 1.0
    model: Model = Model.VSystem
    alpha_sp: complex | None = None
    beta_sp: complex | None = None
    alpha_lin: complex | None = None
    beta_lin: complex | None = None
    dipole_axis: str = "r"

    def __post_init__(self):
        if not 0.0 <= self.alpha_sp_sq <= 1.0:
            raise DomainError("alpha_sp_sq must lie in [0, 1]")
        try:
            object.__setattr__(self, "model", Model(self.model))
        except ValueError as exc:
            raise UnsupportedModel(f"unknown model {self.model!r}") from exc
        if self.dipole_axis not in ("r", "phi"):
            raise DomainError("dipole_axis must be 'r' or 'phi'")

    @property
    def gamma_t(self) -> complex:
        return self.gamma + 1j * self.Delta_AP

    @property
    def kappa_t(self) -> complex:
        return self.kappa_0 + self.kappa_ext + 1j * self.Delta_RP

    def circular(self) -> tuple[complex, complex, complex, complex]:
        """(α_σ+, α_σ-, β_σ+, β_σ-) with β obtained by time reversal of α."""
        x = self.alpha_sp_sq
        ap = self.alpha_sp if self.alpha_sp is not None else math.sqrt(x)
        am = math.sqrt(1.0 - x)
        bp = self.beta_sp if self.beta_sp is not None else np.conj(am)
        return complex(ap), complex(am), complex(bp), complex(np.conj(ap))

    def linear(self) -> tuple[complex, complex]:
        """(α_lin, β_lin) for the configured dipole axis."""
        ap, am, bp, bm = self.circular()
        sign = 1.0 if self.dipole_axis == "r" else -1.0
        a_lin = self.alpha_lin if self.alpha_lin is not None else (ap + sign * am) / math.sqrt(2.0)
        b_lin = self.beta_lin if self.beta_lin is not None else (bp + sign * bm) / math.sqrt(2.0)
        return complex(a_lin), complex(b_lin)


@dataclass(frozen=True)
class ModeAmplitudes:
    """Steady-state mode amplitudes per unit input and waveguide amplitudes."""

    a: complex
    b: complex
    t: complex
    r: complex


def _driven(inp: AnalyticInput, x: float, ab: complex, lin: tuple[complex, complex]):
    """(driven-mode, other-mode) amplitudes per unit input for the selected model."""
    g2 = inp.g ** 2
    gt, kt = inp.gamma_t, inp.kappa_t
    c = math.sqrt(2.0 * inp.kappa_ext)
    if inp.model is Model.VSystem:
        den = gt * kt * (2 * g2 + gt * kt) + g2 ** 2 * (2 * x - 1) ** 2
        return -1j * c * gt * (g2 + gt * kt) / den, 1j * c * gt * 2 * g2 * ab / den
    if inp.model is Model.TwoLevelSigmaPlus:
        den = kt * (g2 + gt * kt)
        return -1j * c * ((1 - x) * g2 + gt * kt) / den, 1j * c * g2 * ab / den
    if inp.model is Model.LinearTwoLevel:
        a_lin, b_lin = lin
        w = abs(a_lin) ** 2
        den = kt * (2 * g2 * w + gt * kt)
        return -1j * c * (w * g2 + gt * kt) / den, 1j * c * g2 * np.conj(a_lin) * b_lin / den
    raise UnsupportedModel(f"unsupported model {inp.model!r}")  # pragma: no cover


def analytic_modes(inp: AnalyticInput, probe_direction: str = "forward", s_in: complex = 1.0) -> ModeAmplitudes:
    """Closed-form ⟨a⟩, ⟨b⟩, t and r for a weak probe in one direction.

    Forward probing drives the CCW mode ``a``; backward probing drives ``b``
    and interchanges the roles of the α and β overlaps.  No mode–mode coupling.
    """
    ap, am, bp, bm = inp.circular()
    a_lin, b_lin = inp.linear()
    c = math.sqrt(2.0 * inp.kappa_ext)
    if probe_direction == "forward":
        drv, oth = _driven(inp, abs(ap) ** 2, np.conj(ap) * bp, (a_lin, b_lin))
        a_mean, b_mean = drv * s_in, oth * s_in
    elif probe_direction == "backward":
        drv, oth = _driven(inp, abs(bp) ** 2, np.conj(bp) * ap, (b_lin, a_lin))
        b_mean, a_mean = drv * s_in, oth * s_in
    else:
        raise ValueError("probe_direction must be 'forward' or 'backward'")
    t = 1.0 - 1j * c * drv
    r = -1j * c * oth
    return ModeAmplitudes(a=complex(a_mean), b=complex(b_mean), t=complex(t), r=complex(r))


def analytic_spectrum(inp: AnalyticInput, deltas, probe_direction: str = "forward"):
    """(t, r) arrays for co-resonant detunings Δ_AP = Δ_RP = Δ."""
    from dataclasses import replace

    t = np.empty(len(deltas), dtype=complex)
    r = np.empty(len(deltas), dtype=complex)
    for i, d in enumerate(deltas):
        res = analytic_modes(replace(inp, Delta_AP=float(d), Delta_RP=float(d)), probe_direction)
        t[i], r[i] = res.t, res.r
    return t, r


def empty_resonator(kappa_0: float, kappa_ext: float, delta: float = 0.0) -> complex:
    """Waveguide transmission amplitude past the bare resonator."""
    return (kappa_0 - kappa_ext + 1j * delta) / (kappa_0 + kappa_ext + 1j * delta)


# --- β-factor calculus -------------------------------------------------------


@dataclass(frozen=True)
class ChiralCoupling:
    """Directional coupling parameters of up to two orthogonal transitions."""

    beta_plus_1: float = 0.0
    beta_minus_1: float = 0.0
    beta_plus_2: float = 0.0
    beta_minus_2: float = 0.0

    def __post_init__(self):
        values = (self.beta_plus_1, self.beta_minus_1, self.beta_plus_2, self.beta_minus_2)
        for v in values:
            if not (0.0 <= v <= 1.0) or not math.isfinite(v):
                raise DomainError(f"β-factors must lie in [0, 1], got {v}")
        for i in (1, 2):
            if getattr(self, f"beta_plus_{i}") + getattr(self, f"beta_minus_{i}") > 1.0 + 1e-12:
                raise DomainError(f"β_+ + β_- of transition {i} exceeds 1")

    @property
    def beta_plus(self) -> float:
        return self.beta_plus_1 + self.beta_plus_2

    @property
    def beta_minus(self) -> float:
        return self.beta_minus_1 + self.beta_minus_2

    @property
    def beta_total(self) -> float:
        return self.beta_plus + self.beta_minus

    @classmethod
    def single(cls, beta_plus: float, beta_minus: float) -> "ChiralCoupling":
        """A single transition (two-level emitter)."""
        return cls(beta_plus_1=beta_plus, beta_minus_1=beta_minus)

    @classmethod
    def from_rates(cls, Gamma_plus: float, Gamma_minus: float, gamma: float) -> "ChiralCoupling":
        """β_± = Γ_± / (Γ_+ + Γ_- + γ) for a two-level emitter."""
        total = Gamma_plus + Gamma_minus + gamma
        if total <= 0:
            return cls()
        return cls.single(Gamma_plus / total, Gamma_minus / total)


def beta_to_tr(coupling: ChiralCoupling) -> tuple[float, float, float, float]:
    """On-resonance (t_+, t_-, r_+, r_-) from the directional β-factors."""
    c = coupling
    t_plus = 1.0 - 2.0 * (c.beta_plus_1 + c.beta_plus_2)
    t_minus = 1.0 - 2.0 * (c.beta_minus_1 + c.beta_minus_2)
    r = -2.0 * math.sqrt(c.beta_plus_1 * c.beta_minus_1) - 2.0 * math.sqrt(c.beta_plus_2 * c.beta_minus_2)
    return t_plus, t_minus, r, r


def _check_rates(**rates):
    for name, v in rates.items():
        if v < 0 or not math.isfinite(v):
            raise DomainError(f"{name} must be finite and non-negative")


def resonator_betas(g: float, gamma: float, kappa_0: float, kappa_ext: float, alpha_sp_sq: float) -> ChiralCoupling:
    """β-factors of a σ⁺ two-level atom in a resonator side-coupled to a waveguide.

    The CCW resonator mode carries the forward direction (``beta_plus_1``), the
    CW mode the backward direction (``beta_minus_2``).  With ``g = 0`` the
    empty resonator gives β = κ_ext/(κ_0 + κ_ext) for its own direction and 0
    for the other.
    """
    _check_rates(g=g, gamma=gamma, kappa_0=kappa_0, kappa_ext=kappa_ext)
    if not 0.0 <= alpha_sp_sq <= 1.0:
        raise DomainError("alpha_sp_sq must lie in [0, 1]")
    kappa = kappa_0 + kappa_ext
    if kappa == 0:
        return ChiralCoupling()
    G = g * g / gamma if g else 0.0
    pref = kappa_ext / kappa
    beta_plus = pref * (G * (1.0 - alpha_sp_sq) + kappa) / (G + kappa)
    beta_minus = pref * (G * alpha_sp_sq + kappa) / (G + kappa)
    return ChiralCoupling(beta_plus_1=beta_plus, beta_minus_2=beta_minus)


def resonator_transmission(g: float, gamma: float, kappa_0: float, kappa_ext: float,
                           alpha_sp_sq: float) -> tuple[float, float]:
    """On-resonance forward and backward transmission amplitudes (t_+, t_-)."""
    _check_rates(g=g, gamma=gamma, kappa_0=kappa_0, kappa_ext=kappa_ext)
    kappa = kappa_0 + kappa_ext
    G = g * g / gamma if g else 0.0
    den = kappa * (kappa + G)
    chi = 2.0 * alpha_sp_sq - 1.0
    base = kappa_0 ** 2 - kappa_ext ** 2
    t_plus = (base + G * (chi * kappa_ext + kappa_0)) / den
    t_minus = (base + G * (-chi * kappa_ext + kappa_0)) / den
    return t_plus, t_minus


def symmetric_transmission(g: float, gamma: float, kappa_0: float, kappa_ext: float) -> float:
    """On-resonance t for symmetric (non-chiral) coupling, |α_σ+|² = 1/2."""
    _check_rates(g=g, gamma=gamma, kappa_0=kappa_0, kappa_ext=kappa_ext)
    kappa = kappa_0 + kappa_ext
    G = g * g / gamma if g else 0.0
    return (kappa_0 + G * kappa_0 / kappa - kappa_ext) / (kappa + G)


def symmetric_reflection(g: float, gamma: float, kappa_0: float, kappa_ext: float) -> float:
    """On-resonance reflection amplitude for symmetric coupling, |α_σ+|² = 1/2."""
    _check_rates(g=g, gamma=gamma, kappa_0=kappa_0, kappa_ext=kappa_ext)
    kappa = kappa_0 + kappa_ext
    G = g * g / gamma if g else 0.0
    return (G * kappa_ext / kappa) / (kappa + G)


def critical_kappa_ext(g: float, gamma: float, kappa_0: float, alpha_sp_sq: float = 1.0) -> float:
    """κ_ext giving zero forward on-resonance transmission.

    |α|² = 1: κ_0 + g²/γ; |α|² = 1/2: sqrt(κ_0 (κ_0 + g²/γ)); other values
    solve the quadratic numerator of t_+.
    """
    G = g * g / gamma if g else 0.0
    chi = 2.0 * alpha_sp_sq - 1.0
    # κ_ext² - G χ κ_ext - (κ_0² + G κ_0) = 0
    return 0.5 * (G * chi + math.sqrt((G * chi) ** 2 + 4.0 * (kappa_0 ** 2 + G * kappa_0)))


def purcell_regime(g: float, gamma: float, kappa_0: float, kappa_ext: float) -> bool:
    """True when κ_ext > g > max(κ_0, γ)."""
    return kappa_ext > g > max(kappa_0, gamma)


__all__ = [
    "Model", "AnalyticInput", "ModeAmplitudes", "analytic_modes", "analytic_spectrum", "empty_resonator",
    "ChiralCoupling", "beta_to_tr", "resonator_betas", "resonator_transmission", "symmetric_transmission",
    "symmetric_reflection", "critical_kappa_ext", "purcell_regime",
]
