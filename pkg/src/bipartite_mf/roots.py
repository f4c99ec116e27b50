"""Bracketed solvers for the transcendental scalar equations of the symmetric model.

Three equations appear:

* ``x = tanh(x / t)``, the anti-diagonal magnetization ``x_tilde``;
* ``t * atanh(x) = (1 + 2b) x``, the diagonal magnetization ``x_hat``;
* ``t * atanh(s) / s = 1 + 2b`` with ``s = sqrt(1 - t)``, the threshold
  temperature ``t_check`` below which four asymmetric critical points exist.

Each is solved by bisection down to a narrow bracket followed by a Newton
polish that falls back to bisection whenever a step leaves the bracket.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from . import tolerances as tol
from .errors import (
    DomainError,
    NoPositiveRootError,
    SolverFailure,
    UnsupportedCaseError,
)

# largest double below one; tanh(x/t) saturates there for small t
_ONE_MINUS = float(np.nextafter(1.0, 0.0))


@dataclass(frozen=True)
class RootResult:
    root: float
    residual: float
    iterations: int
    bracket: tuple[float, float]


def _hybrid(
    fn: Callable[[float], float],
    dfn: Callable[[float], float],
    lo: float,
    hi: float,
    residual: Callable[[float], float],
    branch: str,
) -> RootResult:
    flo, fhi = fn(lo), fn(hi)
    if flo == 0.0:
        return RootResult(lo, residual(lo), 0, (lo, hi))
    if fhi == 0.0:
        return RootResult(hi, residual(hi), 0, (lo, hi))
    if np.sign(flo) == np.sign(fhi):
        raise SolverFailure(f"no sign change on [{lo}, {hi}]", branch)
    bracket = (lo, hi)
    it = 0
    while hi - lo > tol.BISECT_WIDTH and it < tol.BISECT_MAX_ITER:
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
        it += 1

    x = 0.5 * (lo + hi)
    for _ in range(tol.NEWTON_MAX_ITER):
        it += 1
        fx = fn(x)
        if fx == 0.0:
            break
        if np.sign(fx) == np.sign(flo):
            lo, flo = x, fx
        else:
            hi = x
        d = dfn(x)
        step = fx / d if d != 0.0 else math.inf
        nxt = x - step
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if nxt == x or hi - lo <= 2.0 * np.spacing(x):
            x = nxt
            break
        x = nxt
        if abs(step) <= 4.0 * np.spacing(x) and residual(x) < tol.ROOT_RESIDUAL:
            break

    res = residual(x)
    if not res < tol.ROOT_RESIDUAL:
        raise SolverFailure(f"residual {res:.3e} above {tol.ROOT_RESIDUAL:.0e}", branch)
    return RootResult(float(x), float(res), it, bracket)


def positive_tanh_root(gain: float, branch: str = "tanh") -> RootResult:
    """Positive root of ``x = tanh(gain * x)`` for ``gain > 1``.

    Solved as ``v(x) = atanh(x)/gain - x = 0``.  ``v`` is negative between
    0 and its minimum at ``sqrt(1 - 1/gain)``, which is used as the lower
    end of the bracket.  When the root lies closer to 1 than double precision
    resolves, the largest double below 1 is returned.
    """
    if not gain > 1.0:
        raise NoPositiveRootError(f"x = tanh({gain} x) has no positive root (gain <= 1)")
    s = 1.0 / gain
    lo = max(math.sqrt(1.0 - s), 1e-300)

    def v(x):
        return s * math.atanh(x) - x

    def dv(x):
        return s / (1.0 - x * x) - 1.0

    def residual(x):
        return abs(x - math.tanh(gain * x))

    hi = 1.0 - 1e-12
    if v(hi) <= 0.0:
        hi = _ONE_MINUS
        if v(hi) <= 0.0:
            return RootResult(hi, residual(hi), 0, (lo, 1.0))
    return _hybrid(v, dv, lo, hi, residual, branch)


def solve_x_tilde(t: float) -> RootResult:
    """Positive solution of ``x = tanh(x / t)``; exists only for ``0 < t < 1``."""
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t}")
    if t >= 1.0:
        raise NoPositiveRootError(f"x = tanh(x/t) has only the zero solution for t = {t} >= 1")
    return positive_tanh_root(1.0 / t, branch="x_tilde")


def solve_x_hat(t: float, b: float) -> RootResult:
    """Positive solution of ``t * atanh(x) = (1 + 2b) x`` for ``0 < t < 1 + 2b``."""
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t}")
    if not b < 0.0:
        raise DomainError(f"b must be negative, got {b}")
    slope = 1.0 + 2.0 * b
    if slope <= 0.0:
        raise UnsupportedCaseError(f"1 + 2b = {slope} <= 0: no diagonal branch")
    if t >= slope:
        raise NoPositiveRootError(f"t = {t} >= 1 + 2b = {slope}: no positive root")
    return positive_tanh_root(slope / t, branch="x_hat")


def solve_t_check(b: float) -> RootResult:
    """Threshold ``t`` solving ``t * atanh(sqrt(1-t)) / sqrt(1-t) = 1 + 2b``."""
    c = 1.0 + 2.0 * b
    if not 0.0 < c < 1.0:
        raise DomainError(f"1 + 2b = {c} must lie in (0, 1)")

    def phi(tau):
        s = math.sqrt(1.0 - tau)
        return tau * math.atanh(s) / s - c

    def dphi(tau):
        s = math.sqrt(1.0 - tau)
        at = math.atanh(s)
        return at / s - (s - tau * at) / (2.0 * s**3)

    def residual(tau):
        return abs(phi(tau))

    lo = tol.T_CHECK_MARGIN
    hi = c - tol.T_CHECK_MARGIN
    return _hybrid(phi, dphi, lo, hi, residual, "t_check")
