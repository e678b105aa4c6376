r"""Bessel functions :math:`J_m(x)` and :math:`Y_m(x)` of integer order.

``J`` is obtained from Miller's downward recurrence normalised with
:math:`J_0 + 2\sum_k J_{2k} = 1`; ``Y`` from upward recurrence seeded with
:math:`Y_0` and :math:`Y_1`.  Both recurrences run on ratios of successive
orders and accumulate logarithms, so the deep sub-barrier regime
(:math:`x \ll m`), where :math:`J_m` underflows and :math:`Y_m` overflows
double precision, still yields usable results.  Values are returned in a
scaled form,

.. math::
    J_m(x) = j\,e^{s}, \qquad Y_m(x) = y\,e^{-s},

with ``s = 0`` whenever both functions are representable.  Products such as
the Wronskian and logarithmic derivatives are independent of ``s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from ..errors import NonFinite, OrderTooLarge

MAX_ORDER = 1000

# exp() of anything beyond this is not representable as a double
_LOG_LIMIT = 700.0


@dataclass(frozen=True)
class BesselPair:
    """J, Y and their derivatives at one (order, argument), scaled by ``log_scale``."""

    order: int
    argument: float
    j: float
    y: float
    j_prime: float
    y_prime: float
    log_scale: float = 0.0

    @property
    def J(self) -> float:
        return _unscale(self.j, self.log_scale)

    @property
    def Y(self) -> float:
        return _unscale(self.y, -self.log_scale)

    @property
    def J_prime(self) -> float:
        return _unscale(self.j_prime, self.log_scale)

    @property
    def Y_prime(self) -> float:
        return _unscale(self.y_prime, -self.log_scale)

    @property
    def j_log_derivative(self) -> float:
        """J'_m(x) / J_m(x)."""
        return self.j_prime / self.j

    @property
    def y_log_derivative(self) -> float:
        """Y'_m(x) / Y_m(x)."""
        return self.y_prime / self.y

    def wronskian_residual(self) -> float:
        """Relative deviation of J Y' - J' Y from 2/(pi x)."""
        w = self.j * self.y_prime - self.j_prime * self.y
        target = 2.0 / (math.pi * self.argument)
        return abs(w - target) / target


def _unscale(mantissa: float, log_scale: float) -> float:
    if mantissa == 0.0:
        return 0.0
    lg = math.log(abs(mantissa)) + log_scale
    if lg > _LOG_LIMIT + 9.0:
        return math.copysign(math.inf, mantissa)
    if lg < -_LOG_LIMIT - 45.0:
        return 0.0
    return mantissa * math.exp(log_scale)


def _check(m: int, x) -> np.ndarray:
    if int(m) != m or m < 0:
        raise ValueError(f"order must be a non-negative integer, got {m!r}")
    if m > MAX_ORDER:
        raise OrderTooLarge(f"order {m} exceeds supported maximum {MAX_ORDER}")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x <= 0.0):
        raise NonFinite("Bessel argument must be finite and > 0")
    return x


def _miller_start(m: int, xmax: float) -> int:
    top = max(float(m), xmax)
    n = int(top) + 40 + int(12.0 * top ** (1.0 / 3.0))
    return n + (n % 2)


def _log_j(m: int, x: np.ndarray):
    """log|J_k| and sign(J_k) for k = m-1, m, m+1 (k=-1 mapped via J_-1 = -J_1)."""
    n_start = _miller_start(m + 1, float(x.max()))
    tiny = 1e-300
    inv_h = np.zeros_like(x)          # J_{k+1}/J_k, zero above the start order
    lg = np.zeros_like(x)             # log|J_k| up to a common constant
    sg = np.ones_like(x)
    # running signed log-sum-exp of J_0 + 2*sum J_{2k}
    s_mant = np.zeros_like(x)
    s_lg = np.full_like(x, -np.inf)
    saved = {}

    def accumulate(weight):
        nonlocal s_mant, s_lg
        bigger = lg > s_lg
        scale_old = np.where(bigger, np.exp(np.where(bigger, s_lg - lg, 0.0)), 1.0)
        scale_new = np.where(bigger, 1.0, np.exp(np.where(bigger, 0.0, lg - s_lg)))
        s_mant = s_mant * scale_old + weight * sg * scale_new
        s_lg = np.where(bigger, lg, s_lg)

    for k in range(n_start, 0, -1):
        if k in (m - 1, m, m + 1):
            saved[k] = (lg.copy(), sg.copy())
        if k % 2 == 0:
            accumulate(2.0)
        h = 2.0 * k / x - inv_h       # J_{k-1}/J_k
        h = np.where(h == 0.0, tiny, h)
        lg = lg + np.log(np.abs(h))
        sg = sg * np.sign(h)
        inv_h = 1.0 / h
    saved[0] = (lg.copy(), sg.copy())
    accumulate(1.0)
    if m - 1 < 0:
        lg1, sg1 = saved[1]
        saved[-1] = (lg1, -sg1)
    norm_lg = s_lg + np.log(np.abs(s_mant))
    norm_sg = np.sign(s_mant)
    return {
        k: (saved[k][0] - norm_lg, saved[k][1] * norm_sg) for k in (m - 1, m, m + 1)
    }


def _log_y(m: int, x: np.ndarray):
    """log|Y_k| and sign(Y_k) for k = m-1, m, m+1 by upward recurrence."""
    y0 = special.y0(x)
    y1 = special.y1(x)
    lg = {0: np.log(np.abs(y0)), 1: np.log(np.abs(y1))}
    sg = {0: np.sign(y0), 1: np.sign(y1)}
    out = {}
    for k in (0, 1):
        if k in (m - 1, m, m + 1):
            out[k] = (lg[k], sg[k])
    cur_lg, cur_sg = lg[1], sg[1]
    ratio = y1 / y0                    # Y_1/Y_0
    for n in range(1, m + 1):
        ratio = 2.0 * n / x - 1.0 / ratio   # Y_{n+1}/Y_n
        cur_lg = cur_lg + np.log(np.abs(ratio))
        cur_sg = cur_sg * np.sign(ratio)
        if n + 1 in (m - 1, m, m + 1):
            out[n + 1] = (cur_lg, cur_sg)
    if m == 0:
        out[-1] = (lg[1], -sg[1])
    return out


def _log_j_scalar(m: int, x: float):
    """Pure-Python twin of :func:`_log_j` for a single argument."""
    n_start = _miller_start(m + 1, x)
    inv_h = 0.0
    lg = 0.0
    sg = 1.0
    s_mant = 0.0
    s_lg = -math.inf
    saved = {}
    for k in range(n_start, -1, -1):
        if k in (m - 1, m, m + 1):
            saved[k] = (lg, sg)
        if k % 2 == 0:
            weight = 2.0 if k else 1.0
            if lg > s_lg:
                s_mant = s_mant * math.exp(s_lg - lg) + weight * sg
                s_lg = lg
            else:
                s_mant += weight * sg * math.exp(lg - s_lg)
        if k == 0:
            break
        h = 2.0 * k / x - inv_h
        if h == 0.0:
            h = 1e-300
        lg += math.log(abs(h))
        if h < 0:
            sg = -sg
        inv_h = 1.0 / h
    if m == 0:
        lg1, sg1 = saved[1]
        saved[-1] = (lg1, -sg1)
    norm_lg = s_lg + math.log(abs(s_mant))
    norm_sg = math.copysign(1.0, s_mant)
    return {k: (np.array([saved[k][0] - norm_lg]), np.array([saved[k][1] * norm_sg]))
            for k in (m - 1, m, m + 1)}


def _log_y_scalar(m: int, x: float):
    y0 = float(special.y0(x))
    y1 = float(special.y1(x))
    vals = {0: (math.log(abs(y0)), math.copysign(1.0, y0)),
            1: (math.log(abs(y1)), math.copysign(1.0, y1))}
    out = {k: vals[k] for k in (0, 1) if k in (m - 1, m, m + 1)}
    lg, sg = vals[1]
    ratio = y1 / y0
    for n in range(1, m + 1):
        ratio = 2.0 * n / x - 1.0 / ratio
        lg += math.log(abs(ratio))
        if ratio < 0:
            sg = -sg
        if n + 1 in (m - 1, m, m + 1):
            out[n + 1] = (lg, sg)
    if m == 0:
        out[-1] = (vals[1][0], -vals[1][1])
    return {k: (np.array([v[0]]), np.array([v[1]])) for k, v in out.items()}


def bessel_jy_array(m: int, x):
    """Vectorised core of :func:`bessel_jy`.

    Returns ``(j, y, j_prime, y_prime, log_scale)`` arrays with the scaling
    convention documented at module level.
    """
    x = _check(m, x)
    shape = x.shape
    x = np.atleast_1d(x).ravel()
    if x.size == 1:
        jv = _log_j_scalar(m, float(x[0]))
        yv = _log_y_scalar(m, float(x[0]))
    else:
        jv = _log_j(m, x)
        yv = _log_y(m, x)
    lj, sj = jv[m]
    ly, sy = yv[m]
    need = (np.abs(lj) > _LOG_LIMIT) | (np.abs(ly) > _LOG_LIMIT)
    s = np.where(need, 0.5 * (lj - ly), 0.0)

    def mant(pair, shift):
        lgv, sgv = pair
        return sgv * np.exp(lgv - shift)

    j = mant(jv[m], s)
    y = mant(yv[m], -s)
    j_prime = mant(jv[m - 1], s) - (m / x) * j
    y_prime = mant(yv[m - 1], -s) - (m / x) * y
    return (
        j.reshape(shape),
        y.reshape(shape),
        j_prime.reshape(shape),
        y_prime.reshape(shape),
        s.reshape(shape),
    )


def bessel_jy(m: int, x: float) -> BesselPair:
    """J_m(x), Y_m(x) and derivatives for integer ``0 <= m <= 1000`` and ``x > 0``.

    Raises
    ------
    NonFinite
        If ``x <= 0`` or not finite.
    OrderTooLarge
        If ``m > 1000``.
    """
    j, y, jp, yp, s = bessel_jy_array(m, float(x))
    return BesselPair(
        order=int(m),
        argument=float(x),
        j=float(j),
        y=float(y),
        j_prime=float(jp),
        y_prime=float(yp),
        log_scale=float(s),
    )
