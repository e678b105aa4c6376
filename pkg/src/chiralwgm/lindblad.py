r"""Atom coupled to two counter-propagating resonator modes: master-equation steady state.

Conventions (all rates are field rates in rad/s):

* Hamiltonian

  .. math::
      H = \Delta_{RP}(a^\dagger a + b^\dagger b)
          + \sum_e (\Delta_{AP} + \delta^Z_e)|e\rangle\langle e| + \sum_g \delta^Z_g |g\rangle\langle g|
          + g(a d_a^\dagger + a^\dagger d_a) + g(b d_b^\dagger + b^\dagger d_b)
          + h(a^\dagger + b^\dagger)(a + b) + i(\epsilon_a^* a - \epsilon_a a^\dagger) + (a\to b)

  with :math:`d_a = \sum_q \alpha_q d_q`, :math:`d_b = \sum_q \beta_q d_q` and
  :math:`\epsilon = i\sqrt{2\kappa_{ext}}\,s_{in}`.
* Dissipators :math:`D[c]\rho = 2c\rho c^\dagger - \{c^\dagger c, \rho\}` with
  coefficient :math:`\kappa_0 + \kappa_{ext}` for each mode and :math:`\gamma`
  for each atomic transition weighted by its dipole strength, so that
  :math:`\dot a = -(\kappa_0+\kappa_{ext}+i\Delta_{RP})a + \dots` and atomic
  coherences decay at :math:`\gamma + i\Delta_{AP}`.
* Input-output: :math:`t = 1 - i\sqrt{2\kappa_{ext}}\langle a\rangle/s_{in}`,
  :math:`r = -i\sqrt{2\kappa_{ext}}\langle b\rangle/s_{in}`; probing backward
  interchanges the roles of ``a`` and ``b``.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg

from . import __version__
from .atom import AtomModel
from .errors import DimensionMismatch, NonConvergence, TruncationWarning

#: Largest Liouvillian (in matrix entries) accepted by the dense solver.
DENSE_LIMIT = 4 * 10**7
#: Default weak-drive amplitude relative to sqrt(kappa_0).
DEFAULT_DRIVE = 1e-4
DEFAULT_NMAX = 2
DEFAULT_POINTS = 401
RESIDUAL_TOL = 1e-9
TRUNCATION_TOL = 1e-6

_Q = (-1, 0, 1)


def _as_overlap(values) -> dict:
    if values is None:
        return {q: 0.0 for q in _Q}
    if isinstance(values, dict):
        return {q: complex(values.get(q, values.get(str(q), 0.0))) for q in _Q}
    seq = list(values)
    if len(seq) != 3:
        raise DimensionMismatch("overlaps need three components ordered (q=-1, 0, +1)")
    return {q: complex(v) for q, v in zip(_Q, seq)}


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the atom-resonator-waveguide system.

    ``alpha`` and ``beta`` are the polarization overlaps of the CCW (``a``) and
    CW (``b``) modes with the spherical basis, keyed by q = -1, 0, +1.
    """

    g: float
    gamma: float
    kappa_0: float
    kappa_ext: float
    h: float = 0.0
    Delta_AP: float = 0.0
    Delta_RP: float = 0.0
    B: float = 0.0
    alpha: dict = field(default_factory=lambda: {-1: 0.0, 0: 0.0, 1: 1.0})
    beta: dict = field(default_factory=lambda: {-1: 1.0, 0: 0.0, 1: 0.0})

    def __post_init__(self):
        object.__setattr__(self, "alpha", _as_overlap(self.alpha))
        object.__setattr__(self, "beta", _as_overlap(self.beta))
        for name in ("g", "gamma", "kappa_0", "kappa_ext", "h", "Delta_AP", "Delta_RP", "B"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
        for name in ("gamma", "kappa_0", "kappa_ext"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        for name in ("alpha", "beta"):
            norm = sum(abs(v) ** 2 for v in getattr(self, name).values())
            if abs(norm - 1.0) > 1e-9:
                raise ValueError(f"{name} overlaps must be normalized (sum |.|^2 = {norm})")

    @classmethod
    def from_sigma_plus(cls, alpha_sp_sq: float, **kwargs) -> "SystemParams":
        """Real overlaps with |α_σ+|² = x, |α_σ-|² = 1 - x and time-reversed β."""
        if not 0.0 <= alpha_sp_sq <= 1.0:
            raise ValueError("alpha_sp_sq must lie in [0, 1]")
        ap, am = math.sqrt(alpha_sp_sq), math.sqrt(1.0 - alpha_sp_sq)
        return cls(alpha={1: ap, 0: 0.0, -1: am}, beta={1: am, 0: 0.0, -1: ap}, **kwargs)

    @classmethod
    def from_overlaps(cls, overlaps, **kwargs) -> "SystemParams":
        """Use the overlaps of a solved WGM (:class:`chiralwgm.wgm.OverlapSet`)."""
        return cls(alpha=dict(overlaps.alpha), beta=dict(overlaps.beta), **kwargs)

    @property
    def kappa(self) -> float:
        return self.kappa_0 + self.kappa_ext

    def co_resonant(self, delta: float) -> "SystemParams":
        return replace(self, Delta_AP=delta, Delta_RP=delta)

    def swapped(self) -> "SystemParams":
        """Interchange the roles of the two modes (backward probing)."""
        return replace(self, alpha=dict(self.beta), beta=dict(self.alpha))

    def to_dict(self) -> dict:
        out = asdict(self)
        for name in ("alpha", "beta"):
            out[name] = {str(q): [v.real, v.imag] for q, v in getattr(self, name).items()}
        return out


@dataclass(frozen=True)
class DriveSpec:
    """Coherent input amplitudes (sqrt(photons/s)) on the CCW and CW waveguide inputs."""

    s_in_a: complex = 0.0
    s_in_b: complex = 0.0

    @classmethod
    def weak(cls, params: SystemParams, direction: str = "forward", scale: float = DEFAULT_DRIVE):
        s = scale * math.sqrt(params.kappa_0 if params.kappa_0 > 0 else max(params.kappa, 1.0))
        return cls(s_in_a=s) if direction == "forward" else cls(s_in_b=s)

    def pump(self, kappa_ext: float) -> tuple[complex, complex]:
        """(ε_a, ε_b) with ε = i sqrt(2 κ_ext) s_in."""
        c = 1j * math.sqrt(2.0 * kappa_ext)
        return c * complex(self.s_in_a), c * complex(self.s_in_b)


class HilbertLayout:
    """Atom ⊗ two-mode Fock space truncated to n_a + n_b <= n_max.

    The composite index is ``atom_index * n_fock + fock_index``.
    """

    def __init__(self, atom_dim: int, n_max: int = DEFAULT_NMAX):
        if atom_dim < 1 or n_max < 1:
            raise ValueError("atom_dim and n_max must be positive")
        self.atom_dim = int(atom_dim)
        self.n_max = int(n_max)
        self.fock = [(na, n - na) for n in range(n_max + 1) for na in range(n, -1, -1)]
        self.fock_index = {s: i for i, s in enumerate(self.fock)}
        self.n_fock = len(self.fock)
        self.dim = self.atom_dim * self.n_fock
        a = sparse.lil_matrix((self.n_fock, self.n_fock))
        b = sparse.lil_matrix((self.n_fock, self.n_fock))
        for i, (na, nb) in enumerate(self.fock):
            if na > 0:
                a[self.fock_index[(na - 1, nb)], i] = math.sqrt(na)
            if nb > 0:
                b[self.fock_index[(na, nb - 1)], i] = math.sqrt(nb)
        eye_atom = sparse.identity(self.atom_dim, format="csr")
        self.a = sparse.kron(eye_atom, a.tocsr(), format="csr")
        self.b = sparse.kron(eye_atom, b.tocsr(), format="csr")
        self.top_shell = np.array([na + nb == n_max for na, nb in self.fock])

    def atom_op(self, op) -> sparse.csr_matrix:
        if op.shape != (self.atom_dim, self.atom_dim):
            raise DimensionMismatch(f"atomic operator shape {op.shape} does not match atom_dim={self.atom_dim}")
        return sparse.kron(sparse.csr_matrix(op), sparse.identity(self.n_fock), format="csr")

    def index(self, atom_index: int, na: int, nb: int) -> int:
        return atom_index * self.n_fock + self.fock_index[(na, nb)]


def composite_lowering(atom: AtomModel, overlaps: dict) -> sparse.csr_matrix:
    """Σ_q c_q d_q for overlap coefficients ``c``."""
    out = sparse.csr_matrix((atom.dim, atom.dim), dtype=complex)
    for q in _Q:
        if overlaps[q] != 0:
            out = out + overlaps[q] * atom.lowering[q]
    return out.tocsr()


def build_hamiltonian(atom: AtomModel, params: SystemParams, drive: DriveSpec, layout: HilbertLayout):
    """Full Hamiltonian (units of ħ, rad/s) on ``layout`` as a sparse matrix."""
    if layout.atom_dim != atom.dim:
        raise DimensionMismatch(f"layout atom_dim={layout.atom_dim} but atom has {atom.dim} states")
    a, b = layout.a, layout.b
    ad, bd = a.getH(), b.getH()
    diag = np.asarray(atom.zeeman, dtype=float).copy()
    diag[atom.n_ground:] += params.Delta_AP
    H = layout.atom_op(sparse.diags(diag))
    H = H + params.Delta_RP * (ad @ a + bd @ b)
    if params.g != 0:
        da = layout.atom_op(composite_lowering(atom, params.alpha))
        db = layout.atom_op(composite_lowering(atom, params.beta))
        H = H + params.g * (a @ da.getH() + ad @ da + b @ db.getH() + bd @ db)
    if params.h != 0:
        s = a + b
        H = H + params.h * (s.getH() @ s)
    eps_a, eps_b = drive.pump(params.kappa_ext)
    H = H + 1j * (np.conj(eps_a) * a - eps_a * ad) + 1j * (np.conj(eps_b) * b - eps_b * bd)
    return sparse.csr_matrix(H, dtype=complex)


def collapse_operators(atom: AtomModel, params: SystemParams, layout: HilbertLayout) -> list:
    """Jump operators C with Lindblad form CρC† - ½{C†C, ρ}."""
    ops = []
    kappa = params.kappa
    if kappa > 0:
        ops.append(math.sqrt(2.0 * kappa) * layout.a)
        ops.append(math.sqrt(2.0 * kappa) * layout.b)
    if params.gamma > 0:
        for g_idx, e_idx, strength in atom.transitions:
            sigma = sparse.csr_matrix(([strength], ([g_idx], [e_idx])), shape=(atom.dim, atom.dim))
            ops.append(math.sqrt(2.0 * params.gamma) * layout.atom_op(sigma))
    return ops


def liouvillian(H, collapse) -> sparse.csr_matrix:
    """Row-major vectorized generator: vec(AρB) = (A ⊗ Bᵀ) vec(ρ).

    Uses the effective Hamiltonian H_eff = H - (i/2) Σ C†C, so that
    L = -i(H_eff ⊗ 1 - 1 ⊗ H_eff*) + Σ C ⊗ C*.
    """
    n = H.shape[0]
    eye = sparse.identity(n, format="csr")
    H_eff = sparse.csr_matrix(H, dtype=complex)
    for c in collapse:
        H_eff = H_eff - 0.5j * (c.getH() @ c)
    L = -1j * (sparse.kron(H_eff, eye) - sparse.kron(eye, H_eff.conj()))
    for c in collapse:
        L = L + sparse.kron(c, c.conj())
    return sparse.csr_matrix(L)


@dataclass
class SteadyState:
    """Steady-state density operator with its hygiene diagnostics and readout."""

    rho: np.ndarray
    layout: HilbertLayout
    a_mean: complex
    b_mean: complex
    residual: float
    t: complex | None = None
    r: complex | None = None
    atom_populations: np.ndarray | None = None

    @property
    def trace_error(self) -> float:
        return abs(np.trace(self.rho) - 1.0)

    @property
    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T)).min())

    @property
    def top_shell_population(self) -> float:
        diag = np.real(np.diag(self.rho)).reshape(self.layout.atom_dim, self.layout.n_fock)
        return float(diag[:, self.layout.top_shell].sum())

    @property
    def photon_number(self) -> float:
        n = (self.layout.a.getH() @ self.layout.a + self.layout.b.getH() @ self.layout.b)
        return float(np.real(np.sum(n.multiply(self.rho.T))))

    def hygiene(self) -> dict:
        return {
            "trace_error": self.trace_error,
            "hermiticity_error": self.hermiticity_error,
            "min_eigenvalue": self.min_eigenvalue,
            "top_shell_population": self.top_shell_population,
            "residual": self.residual,
        }


def _expect(op, rho) -> complex:
    # Tr(op ρ) = Σ_ij op_ij ρ_ji
    return complex(np.sum(op.multiply(rho.T)))


def steady_state(H, collapse, layout: HilbertLayout, method: str = "sparse") -> SteadyState:
    """Solve L[ρ] = 0 with Tr ρ = 1 by trace-row replacement.

    ``method="sparse"`` (default) uses a direct sparse LU with a fixed column
    ordering; ``"dense"`` uses LAPACK and is refused above
    :data:`DENSE_LIMIT` matrix entries.  Both pivot deterministically.
    Raises :class:`NonConvergence` when the relative residual exceeds the
    tolerance and warns with :class:`TruncationWarning` when the top Fock
    shell is populated.
    """
    n = layout.dim
    if H.shape != (n, n):
        raise DimensionMismatch(f"Hamiltonian shape {H.shape} does not match layout dim {n}")
    if method not in ("sparse", "dense"):
        raise ValueError("method must be 'sparse' or 'dense'")
    L = liouvillian(sparse.csr_matrix(H), collapse)
    scale = float(np.max(np.abs(L.data))) if L.nnz else 1.0
    keep = np.ones(n * n)
    keep[0] = 0.0
    trace_row = sparse.csr_matrix(
        (np.ones(n, dtype=complex), (np.zeros(n, dtype=int), np.arange(n) * (n + 1))), shape=(n * n, n * n)
    )
    A = sparse.diags(keep) @ (L / scale) + trace_row
    rhs = np.zeros(n * n, dtype=complex)
    rhs[0] = 1.0
    if method == "dense":
        if (n * n) ** 2 > DENSE_LIMIT:
            raise ValueError(f"dense solve refused for a {n * n}-dimensional Liouvillian")
        vec = np.linalg.solve(A.toarray(), rhs)
    else:
        vec = splinalg.spsolve(A.tocsc(), rhs, permc_spec="COLAMD")
    if not np.all(np.isfinite(vec)):
        raise NonConvergence("steady-state solve produced non-finite values", residual=float("inf"))
    rho = vec.reshape(n, n)
    L_norm = splinalg.norm(L)
    residual = float(np.linalg.norm(L @ vec) / L_norm) if L_norm > 0 else 0.0
    if residual > RESIDUAL_TOL:
        raise NonConvergence(f"steady-state residual {residual:.3e} exceeds {RESIDUAL_TOL}", residual=residual)
    state = SteadyState(
        rho=rho, layout=layout, a_mean=_expect(layout.a, rho), b_mean=_expect(layout.b, rho), residual=residual,
    )
    state.atom_populations = np.real(np.diag(rho)).reshape(layout.atom_dim, layout.n_fock).sum(axis=1)
    top = state.top_shell_population
    if top > TRUNCATION_TOL:
        warnings.warn(f"top Fock shell population {top:.2e} exceeds {TRUNCATION_TOL}", TruncationWarning,
                      stacklevel=2)
    return state


def readout(state: SteadyState, params: SystemParams, drive: DriveSpec) -> tuple[complex, complex]:
    """(t, r) from the input-output relations for the driven input."""
    c = math.sqrt(2.0 * params.kappa_ext)
    if drive.s_in_a != 0 and drive.s_in_b == 0:
        s, fwd, back = drive.s_in_a, state.a_mean, state.b_mean
    elif drive.s_in_b != 0 and drive.s_in_a == 0:
        s, fwd, back = drive.s_in_b, state.b_mean, state.a_mean
    else:
        raise ValueError("readout needs exactly one driven input")
    return 1.0 - 1j * c * fwd / s, -1j * c * back / s


def solve(atom: AtomModel, params: SystemParams, drive: DriveSpec | None = None, n_max: int = DEFAULT_NMAX,
          direction: str = "forward", method: str = "sparse") -> SteadyState:
    """Build and solve the master equation for one parameter set; fills ``t`` and ``r``."""
    drive = drive if drive is not None else DriveSpec.weak(params, direction)
    layout = HilbertLayout(atom.dim, n_max)
    H = build_hamiltonian(atom, params, drive, layout)
    state = steady_state(H, collapse_operators(atom, params, layout), layout, method)
    state.t, state.r = readout(state, params, drive)
    return state


def linearity_deviation(atom: AtomModel, params: SystemParams, drive: DriveSpec | None = None,
                        n_max: int = DEFAULT_NMAX) -> float:
    """Relative change of ⟨a⟩/s and ⟨b⟩/s when the drive amplitude is doubled."""
    drive = drive if drive is not None else DriveSpec.weak(params)
    double = DriveSpec(2 * drive.s_in_a, 2 * drive.s_in_b)
    s1, s2 = solve(atom, params, drive, n_max), solve(atom, params, double, n_max)
    ref = max(abs(s1.a_mean), abs(s1.b_mean))
    if ref == 0:
        return 0.0
    return max(abs(2 * s1.a_mean - s2.a_mean), abs(2 * s1.b_mean - s2.b_mean)) / (2 * ref)


@dataclass(frozen=True)
class SpectrumResult:
    """Transmission and reflection versus detuning Δ (rad/s) for one probe direction."""

    delta: np.ndarray
    t: np.ndarray
    r: np.ndarray
    direction: str
    params: SystemParams

    @property
    def T(self) -> np.ndarray:
        return np.abs(self.t) ** 2

    @property
    def R(self) -> np.ndarray:
        return np.abs(self.r) ** 2


def default_grid(params: SystemParams, points: int = DEFAULT_POINTS) -> np.ndarray:
    span = 3.0 * params.g if params.g > 0 else 3.0 * max(params.kappa, params.gamma, 1.0)
    return np.linspace(-span, span, points)


def spectrum(atom: AtomModel, params: SystemParams, deltas=None, direction: str = "forward",
             n_max: int = DEFAULT_NMAX, drive_scale: float = DEFAULT_DRIVE, threads: int = 1,
             co_resonant: bool = True) -> SpectrumResult:
    """Sweep the probe detuning.

    With ``co_resonant`` (default) Δ is applied to both Δ_AP and Δ_RP;
    otherwise only the resonator-probe detuning Δ_RP is swept.
    Points are independent solves and may be spread over ``threads`` workers.
    """
    if direction not in ("forward", "backward"):
        raise ValueError("direction must be 'forward' or 'backward'")
    deltas = default_grid(params) if deltas is None else np.asarray(deltas, dtype=float)

    def point(delta):
        p = params.co_resonant(delta) if co_resonant else replace(params, Delta_RP=delta)
        s = solve(atom, p, DriveSpec.weak(p, direction, drive_scale), n_max)
        return s.t, s.r

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(point, deltas))
    else:
        results = [point(d) for d in deltas]
    t = np.array([x[0] for x in results], dtype=complex)
    r = np.array([x[1] for x in results], dtype=complex)
    return SpectrumResult(delta=deltas, t=t, r=r, direction=direction, params=params)


def manifest(params: SystemParams, **extra) -> dict:
    """Reproducibility record of a master-equation run."""
    return {"library": "chiralwgm", "version": __version__, "params": params.to_dict(), **extra}
