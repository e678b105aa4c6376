r"""Whispering-gallery modes of a dielectric cylinder in its symmetry plane.

The radial problem is solved through a scalar potential: the axial magnetic
field :math:`H_z` for TM modes and the axial electric field :math:`E_z` for TE
modes.  Inside the resonator the potential is :math:`J_m(n_0 k r)`, outside
it is :math:`Y_m(k r)`, and the resonance condition is

.. math::
    P\,\frac{J_m'(n_0 k R)}{J_m(n_0 k R)} = \frac{Y_m'(kR)}{Y_m(kR)},
    \qquad P = 1/n_0\ \text{(TM)},\ n_0\ \text{(TE)}.

Time dependence is :math:`e^{i\omega t}`; the counter-clockwise (CCW) mode
varies as :math:`e^{-im\phi}` and the clockwise (CW) mode is its time reverse,
obtained by complex conjugation of the field components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import optimize

from .errors import DomainError, NoRootInBracket, ZeroField
from .specfun.bessel import bessel_jy_array

SCAN_STEPS = 2000
SCAN_WINDOW = (0.7, 1.3)
WIDE_WINDOW = (0.5, 2.0)
SURFACE_OFFSET = 1e-6   # r = R (1 + offset) is used as the "just outside" point
GAUSS_STEP = 1e-7       # finite-difference step in units of R


class Polarization(str, Enum):
    TM = "TM"
    TE = "TE"


class Direction(str, Enum):
    CCW = "CCW"
    CW = "CW"


@dataclass(frozen=True)
class ModeSpec:
    """Geometry and quantum numbers of a cylindrical WGM.

    ``R`` is in metres.  ``p`` counts radial nodes: the solver returns the
    (p+1)-th root of the resonance condition.
    """

    n0: float
    R: float
    m: int
    p: int = 0
    polarization: Polarization = Polarization.TM

    def __post_init__(self):
        object.__setattr__(self, "polarization", Polarization(self.polarization))
        if not self.n0 > 1.0:
            raise DomainError(f"refractive index must exceed 1, got {self.n0}")
        if not self.R > 0.0:
            raise DomainError(f"radius must be positive, got {self.R}")
        if int(self.m) != self.m or self.m < 1:
            raise DomainError(f"azimuthal number must be a positive integer, got {self.m}")
        if int(self.p) != self.p or self.p < 0:
            raise DomainError(f"radial number must be a non-negative integer, got {self.p}")

    @property
    def P(self) -> float:
        return 1.0 / self.n0 if self.polarization is Polarization.TM else self.n0


@dataclass(frozen=True)
class ModeSolution:
    """Resolved resonance.

    Field components are written as

    * interior: ``E_r = A["r"] J_m(n0 k r)/(k r)``, ``E_phi = A["phi"] J_m'(n0 k r)``,
      ``E_z = A["z"] J_m(n0 k r)``
    * exterior: the same with ``B`` and ``Y_m(k r)``.

    The coefficients may over- or underflow for extreme geometries; field
    evaluation goes through surface-normalised ratios and does not use them.
    """

    spec: ModeSpec
    k_phi_r: float
    f_p_m: float
    A: dict
    B: dict
    residual: float
    norm: float = 1.0
    _surface: tuple = field(default=(), repr=False, compare=False)


@dataclass(frozen=True)
class LocalField:
    r: float
    E_r: complex
    E_phi: complex
    E_z: complex
    direction: Direction

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.E_r, self.E_phi, self.E_z], dtype=complex)

    @property
    def intensity(self) -> float:
        return float(np.vdot(self.vector, self.vector).real)


@dataclass(frozen=True)
class OverlapSet:
    """Polarization overlaps of the CCW (alpha) and CW (beta) fields at one point."""

    alpha_sigma_plus: complex
    alpha_pi: complex
    alpha_sigma_minus: complex
    beta_sigma_plus: complex
    beta_pi: complex
    beta_sigma_minus: complex
    O: float
    S_z_norm: float
    ratio_R: float

    @property
    def alpha(self) -> dict:
        return {+1: self.alpha_sigma_plus, 0: self.alpha_pi, -1: self.alpha_sigma_minus}

    @property
    def beta(self) -> dict:
        return {+1: self.beta_sigma_plus, 0: self.beta_pi, -1: self.beta_sigma_minus}


# ---------------------------------------------------------------------------
# resonance condition


def _matching(spec: ModeSpec, k: np.ndarray):
    """Sign-carrying matching function and the relative residual of the log-derivative form.

    ``G = P J'(u) Y(v) - J(u) Y'(v)`` has the zeros of the resonance condition
    but none of its poles; it is evaluated on scaled mantissas, which only
    changes it by a positive factor.
    """
    u = spec.n0 * k * spec.R
    v = k * spec.R
    ju, _, jpu, _, _ = bessel_jy_array(spec.m, u)
    _, yv, _, ypv, _ = bessel_jy_array(spec.m, v)
    g = spec.P * jpu * yv - ju * ypv
    lhs = spec.P * jpu / ju
    rhs = ypv / yv
    rel = np.abs(lhs - rhs) / np.maximum(np.abs(lhs), np.abs(rhs))
    return g, rel


def matching_residual(spec: ModeSpec, k: float) -> float:
    """Relative residual of the resonance condition at wavenumber ``k``."""
    _, rel = _matching(spec, np.array([k]))
    return float(rel[0])


def _bracket_roots(spec: ModeSpec, window):
    k0 = spec.m / (spec.n0 * spec.R)
    ks = np.linspace(window[0] * k0, window[1] * k0, SCAN_STEPS + 1)
    g, _ = _matching(spec, ks)
    s = np.sign(g)
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    return [(ks[i], ks[i + 1]) for i in idx]


def _refine(spec: ModeSpec, lo: float, hi: float, rtol: float = 1e-12) -> float:
    # Brent's method keeps the bracket, so this is bisection with faster convergence
    return optimize.brentq(
        lambda k: float(_matching(spec, np.array([k]))[0][0]), lo, hi, xtol=rtol * lo, rtol=rtol
    )


def _brackets(spec: ModeSpec, need: int):
    brackets = _bracket_roots(spec, SCAN_WINDOW)
    if len(brackets) < need:
        brackets = _bracket_roots(spec, WIDE_WINDOW)
    if len(brackets) < need:
        raise NoRootInBracket(
            f"found {len(brackets)} roots for m={spec.m}, need {need} "
            f"(scan window widened to {WIDE_WINDOW})"
        )
    return brackets


def find_roots(spec: ModeSpec, count: int | None = None) -> list[float]:
    """The lowest ``count`` roots (default p+1) of the resonance condition, ascending in k."""
    need = spec.p + 1 if count is None else count
    return [_refine(spec, lo, hi) for lo, hi in _brackets(spec, need)[:need]]


def solve_resonance(spec: ModeSpec) -> ModeSolution:
    """Find the (p+1)-th resonance and fix the field amplitudes.

    Amplitudes follow from continuity of the potential at ``r = R`` and are
    normalised so that the peak interior ``|E|`` equals one.
    """
    k = _refine(spec, *_brackets(spec, spec.p + 1)[spec.p])
    residual = matching_residual(spec, k)
    u = spec.n0 * k * spec.R
    v = k * spec.R
    surf_j = bessel_jy_array(spec.m, np.array([u]))
    surf_y = bessel_jy_array(spec.m, np.array([v]))
    unnormalised = ModeSolution(
        spec=spec,
        k_phi_r=float(k),
        f_p_m=float(k * spec.n0 * spec.R / spec.m),
        A={},
        B={},
        residual=residual,
        norm=1.0,
        _surface=(float(surf_j[0][0]), float(surf_j[4][0]), float(surf_y[1][0]), float(surf_y[4][0])),
    )
    r = np.linspace(spec.R * 1e-3, spec.R, 8001)
    er, ephi, ez = _components(unnormalised, r)
    peak = float(np.sqrt(np.max(np.abs(er) ** 2 + np.abs(ephi) ** 2 + np.abs(ez) ** 2)))
    if peak == 0.0 or not np.isfinite(peak):
        raise ZeroField("interior field vanished while normalising the mode")
    A, B = _coefficients(spec, k, unnormalised._surface, peak)
    return ModeSolution(
        spec=spec,
        k_phi_r=float(k),
        f_p_m=unnormalised.f_p_m,
        A=A,
        B=B,
        residual=residual,
        norm=peak,
        _surface=unnormalised._surface,
    )


def _coefficients(spec, k, surface, peak):
    j_R, sj_R, y_R, sy_R = surface
    with np.errstate(over="ignore", under="ignore", divide="ignore"):
        cj = 1.0 / (j_R * math.exp(min(sj_R, 700.0)) * peak) if sj_R < 700 else 0.0
        cy = 1.0 / (y_R * math.exp(max(min(-sy_R, 700.0), -745.0)) * peak)
    n2 = spec.n0**2
    if spec.polarization is Polarization.TM:
        A = {"r": -spec.m * spec.n0 * cj / n2, "phi": 1j * spec.n0 * cj / n2, "z": 0.0}
        B = {"r": -spec.m * cy, "phi": 1j * cy, "z": 0.0}
    else:
        A = {"r": 0.0, "phi": 0.0, "z": cj}
        B = {"r": 0.0, "phi": 0.0, "z": cy}
    return A, B


def _components(sol: ModeSolution, r: np.ndarray):
    """CCW field components (E_r, E_phi, E_z) on an array of radii."""
    spec = sol.spec
    k = sol.k_phi_r
    j_R, sj_R, y_R, sy_R = sol._surface
    r = np.asarray(r, dtype=float)
    inside = r <= spec.R
    pot = np.zeros(r.shape)
    dpot = np.zeros(r.shape)   # d(potential)/dr
    with np.errstate(over="ignore", under="ignore"):
        if np.any(inside):
            j, _, jp, _, s = bessel_jy_array(spec.m, spec.n0 * k * r[inside])
            scale = np.exp(s - sj_R)
            pot[inside] = j / j_R * scale
            dpot[inside] = spec.n0 * k * jp / j_R * scale
        if np.any(~inside):
            _, y, _, yp, s = bessel_jy_array(spec.m, k * r[~inside])
            scale = np.exp(sy_R - s)
            pot[~inside] = y / y_R * scale
            dpot[~inside] = k * yp / y_R * scale
    pot /= sol.norm
    dpot /= sol.norm
    if spec.polarization is Polarization.TE:
        zero = np.zeros(r.shape, dtype=complex)
        return zero, zero.copy(), pot.astype(complex)
    eps = np.where(inside, spec.n0**2, 1.0)
    # curl H = i w eps E with H = H_z(r) exp(-i m phi); common factor 1/(w eps0) and k dropped
    e_r = -spec.m * pot / (eps * r) / k
    e_phi = 1j * dpot / eps / k
    return e_r.astype(complex), e_phi, np.zeros(r.shape, dtype=complex)


def field_components(sol: ModeSolution, r, direction=Direction.CCW):
    """Vectorised field evaluation; returns arrays (E_r, E_phi, E_z)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("radius must be positive")
    er, ephi, ez = _components(sol, r)
    if Direction(direction) is Direction.CW:
        er, ephi, ez = np.conj(er), np.conj(ephi), np.conj(ez)
    return er, ephi, ez


def field_at(sol: ModeSolution, r: float, direction=Direction.CCW) -> LocalField:
    """Electric field of the CCW or CW mode at radius ``r`` in the plane z = 0."""
    er, ephi, ez = field_components(sol, np.array([float(r)]), direction)
    return LocalField(
        r=float(r), E_r=complex(er[0]), E_phi=complex(ephi[0]), E_z=complex(ez[0]),
        direction=Direction(direction),
    )


_E_SIGMA_PLUS = np.array([1.0, 1j, 0.0]) / math.sqrt(2.0)
_E_SIGMA_MINUS = np.array([1.0, -1j, 0.0]) / math.sqrt(2.0)
_E_PI = np.array([0.0, 0.0, 1.0], dtype=complex)


def polarization_overlaps(vector: np.ndarray) -> tuple[complex, complex, complex]:
    """(sigma+, pi, sigma-) overlaps E . e_i^* / |E| of a field in (r, phi, z) components."""
    norm = np.linalg.norm(vector)
    if norm == 0.0:
        raise ZeroField("field vanishes; overlaps undefined")
    return tuple(complex(np.dot(vector, e.conj()) / norm) for e in (_E_SIGMA_PLUS, _E_PI, _E_SIGMA_MINUS))


def spin_density_norm(vector: np.ndarray) -> float:
    """Axial electric spin density Im[(E^* x E)_z] / |E|^2."""
    e_r, e_phi, _ = vector
    cross_z = np.conj(e_r) * e_phi - np.conj(e_phi) * e_r
    return float(cross_z.imag / np.vdot(vector, vector).real)


def field_overlap(e_plus: np.ndarray, e_minus: np.ndarray) -> float:
    """|E+ . (E-)^*|^2 / (|E+|^2 |E-|^2)."""
    num = abs(np.dot(e_plus, np.conj(e_minus))) ** 2
    return float(num / (np.vdot(e_plus, e_plus).real * np.vdot(e_minus, e_minus).real))


def overlaps_at(sol: ModeSolution, r: float) -> OverlapSet:
    """Polarization overlaps, counter-propagating overlap O and spin density at ``r``."""
    ccw = field_at(sol, r, Direction.CCW).vector
    cw = field_at(sol, r, Direction.CW).vector
    a_sp, a_pi, a_sm = polarization_overlaps(ccw)
    b_sp, b_pi, b_sm = polarization_overlaps(cw)
    overlap = abs(a_sp * np.conj(b_sp) + a_pi * np.conj(b_pi) + a_sm * np.conj(b_sm)) ** 2
    ratio = abs(ccw[1] / ccw[0]) if ccw[0] != 0 else math.inf
    return OverlapSet(
        alpha_sigma_plus=a_sp,
        alpha_pi=a_pi,
        alpha_sigma_minus=a_sm,
        beta_sigma_plus=b_sp,
        beta_pi=b_pi,
        beta_sigma_minus=b_sm,
        O=float(overlap),
        S_z_norm=spin_density_norm(ccw),
        ratio_R=float(ratio),
    )


def surface_radius(sol: ModeSolution) -> float:
    """Evaluation radius just outside the surface."""
    return sol.spec.R * (1.0 + SURFACE_OFFSET)


def gauss_residual(sol: ModeSolution, r: float) -> float:
    """|div E| / (|k| |E|) by central differences in cylindrical coordinates.

    The local wavenumber is ``n0 k`` inside and ``k`` outside.  Points within
    a few steps of the surface are rejected because the field is
    discontinuous there.
    """
    spec = sol.spec
    h = spec.R * GAUSS_STEP
    if abs(r - spec.R) <= 4 * h:
        raise DomainError("gauss_residual is undefined at the resonator surface")
    if r <= 2 * h:
        raise DomainError("radius too close to the axis")
    rs = np.array([r - h, r, r + h])
    er, ephi, ez = field_components(sol, rs, Direction.CCW)
    d_rEr = ((r + h) * er[2] - (r - h) * er[0]) / (2 * h)
    # exp(-i m phi): d/dphi -> -i m; the model field has no z dependence
    div = d_rEr / r + (-1j * spec.m) * ephi[1] / r
    k_local = sol.k_phi_r * (spec.n0 if r < spec.R else 1.0)
    mag = math.sqrt(abs(er[1]) ** 2 + abs(ephi[1]) ** 2 + abs(ez[1]) ** 2)
    if mag == 0.0:
        raise ZeroField("field vanishes at the requested radius")
    return float(abs(div) / (k_local * mag))


def standing_wave_contrast(O: float) -> float:
    """Intensity contrast I_max - I_min = sqrt(O) of two equal counter-propagating modes."""
    if not 0.0 <= O <= 1.0:
        raise DomainError(f"overlap must lie in [0, 1], got {O}")
    return math.sqrt(O)


def interior_intensity_minima(sol: ModeSolution, points: int = 20001, floor: float = 1e-6) -> int:
    """Number of local intensity minima inside the resonator.

    Minima are counted where the intensity exceeds ``floor`` times its peak so
    the evanescent core near the axis does not contribute.
    """
    r = np.linspace(sol.spec.R * 1e-3, sol.spec.R, points)
    er, ephi, ez = field_components(sol, r)
    inten = np.abs(er) ** 2 + np.abs(ephi) ** 2 + np.abs(ez) ** 2
    inner = inten[1:-1]
    is_min = (inner < inten[:-2]) & (inner < inten[2:]) & (inner > floor * inten.max())
    return int(np.count_nonzero(is_min))


PROFILE_COLUMNS = (
    "r_minus_R_nm", "intensity_norm", "abs_Er", "abs_Ephi", "arg_Er", "arg_Ephi",
    "alpha_sp_sq", "alpha_sm_sq", "O", "ratio_R",
)


def radial_profile(sol: ModeSolution, start_nm: float = -3000.0, stop_nm: float = 500.0,
                   points: int = 1401) -> list[dict]:
    """Rows of the radial profile table (CCW mode), one per radius.

    Radii are offsets from the surface in nanometres; the point ``0`` is
    moved just outside the surface.
    """
    offsets = np.linspace(start_nm, stop_nm, points)
    r = sol.spec.R + offsets * 1e-9
    r = np.where(offsets == 0.0, surface_radius(sol), r)
    er, ephi, ez = field_components(sol, r)
    inten = np.abs(er) ** 2 + np.abs(ephi) ** 2 + np.abs(ez) ** 2
    rows = []
    for i, off in enumerate(offsets):
        vec = np.array([er[i], ephi[i], ez[i]])
        if inten[i] > 0:
            a_sp, _, a_sm = polarization_overlaps(vec)
            cw = np.conj(vec)
            overlap = field_overlap(vec, cw)
        else:
            a_sp = a_sm = 0.0
            overlap = float("nan")
        rows.append({
            "r_minus_R_nm": float(off),
            "intensity_norm": float(inten[i]),
            "abs_Er": float(abs(er[i])),
            "abs_Ephi": float(abs(ephi[i])),
            "arg_Er": float(np.angle(er[i])),
            "arg_Ephi": float(np.angle(ephi[i])),
            "alpha_sp_sq": float(abs(a_sp) ** 2),
            "alpha_sm_sq": float(abs(a_sm) ** 2),
            "O": float(overlap),
            "ratio_R": float(abs(ephi[i]) / abs(er[i])) if er[i] != 0 else float("nan"),
        })
    return rows
