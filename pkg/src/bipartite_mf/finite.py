"""Exact finite-size pressure by summation over magnetization sectors.

A configuration of the two populations is summarised by the up-spin counts
``(k1, k2)``; the energy depends only on the sector magnetizations, so the
partition function is a double sum of binomial multiplicities times
``exp(beta N g)``.  Everything is accumulated in log space.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import gammaln, logsumexp

from . import tolerances as tol
from .errors import DomainError, ResourceError
from .model import ModelParams, entropy

# rows of the (n1 + 1) x (n2 + 1) sector grid reduced per task; fixed so the
# merge order, and hence the result, does not depend on the thread count
_ROW_CHUNK = 256


@dataclass(frozen=True)
class FiniteModel:
    """Two populations of ``n1`` and ``n2`` Ising spins.

    The weight ``alpha1`` used in the energy is ``n1 / (n1 + n2)``, whatever
    ``params.alpha1`` says; :attr:`effective_params` carries that override.
    """

    n1: int
    n2: int
    params: ModelParams
    size_cap: int = tol.SIZE_CAP

    def __post_init__(self):
        for name in ("n1", "n2"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise DomainError(f"{name} must be a positive integer, got {v}")
        if self.n1 + self.n2 > self.size_cap:
            raise ResourceError(f"N = {self.n1 + self.n2} exceeds the size cap {self.size_cap}")

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def effective_params(self) -> ModelParams:
        return replace(self.params, alpha1=self.n1 / self.n)


@dataclass(frozen=True)
class SectorCount:
    """Sector of ``k`` up spins out of ``n``: magnetization and log multiplicity."""

    k: int
    mu: float
    log_count: float


def log_binomial(n: int, k) -> np.ndarray:
    """``log C(n, k)`` via log-gamma."""
    k = np.asarray(k, dtype=float)
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def sector_counts(n: int) -> list[SectorCount]:
    k = np.arange(n + 1)
    mu = (2.0 * k - n) / n
    logs = log_binomial(n, k)
    return [SectorCount(int(ki), float(m), float(lc)) for ki, m, lc in zip(k, mu, logs)]


def _log_terms(fm: FiniteModel):
    """Per-axis pieces of the summand ``log A1 + log A2 + beta N g``.

    ``beta N g`` splits as ``r1(mu1) + r2(mu2) + c mu1 mu2``.
    """
    p = fm.effective_params
    n = fm.n
    a1, a2 = p.alpha1, p.alpha2
    k1 = np.arange(fm.n1 + 1)
    k2 = np.arange(fm.n2 + 1)
    mu1 = (2.0 * k1 - fm.n1) / fm.n1
    mu2 = (2.0 * k2 - fm.n2) / fm.n2
    bn = p.beta * n
    row = log_binomial(fm.n1, k1) + bn * (0.5 * a1 * a1 * p.j11 * mu1 * mu1 + a1 * p.h1 * mu1)
    col = log_binomial(fm.n2, k2) + bn * (0.5 * a2 * a2 * p.j22 * mu2 * mu2 + a2 * p.h2 * mu2)
    cross = bn * a1 * a2 * p.j12
    return row, col, cross, mu1, mu2


def exact_pressure(fm: FiniteModel, threads: int | None = None) -> float:
    """``p_N = (1/N) log Z_N`` summed exactly over all sectors.

    Parameters
    ----------
    fm : FiniteModel
    threads : int, optional
        Worker threads for the row chunks; defaults to the CPU count.  The
        result is bitwise independent of this value.
    """
    row, col, cross, mu1, mu2 = _log_terms(fm)
    starts = range(0, len(row), _ROW_CHUNK)

    def reduce_rows(s):
        sl = slice(s, s + _ROW_CHUNK)
        block = row[sl, None] + col[None, :] + cross * np.multiply.outer(mu1[sl], mu2)
        return logsumexp(block)

    workers = threads or os.cpu_count() or 1
    if workers == 1 or len(starts) == 1:
        partial = [reduce_rows(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partial = list(pool.map(reduce_rows, starts))
    return float(logsumexp(np.array(partial)) / fm.n)


def brute_force_pressure(fm: FiniteModel) -> float:
    """Literal sum over all ``2^N`` spin configurations; only for tiny N."""
    if fm.n > 20:
        raise ResourceError(f"brute force over 2^{fm.n} configurations refused")
    p = fm.effective_params
    n = fm.n
    spins = 1 - 2 * ((np.arange(2**n)[:, None] >> np.arange(n)) & 1)
    s1 = spins[:, : fm.n1].sum(axis=1)
    s2 = spins[:, fm.n1:].sum(axis=1)
    # H = -(1/2N) sum_ij J_ij s_i s_j - sum_i h_i s_i with block-constant J and h
    energy = (0.5 / n) * (p.j11 * s1 * s1 + 2.0 * p.j12 * s1 * s2 + p.j22 * s2 * s2) + p.h1 * s1 + p.h2 * s2
    return float(logsumexp(p.beta * energy) / n)


# --- multiplicity bounds ------------------------------------------------------


@dataclass(frozen=True)
class Lemma1Report:
    """Worst-case slacks of the two-sided multiplicity bound.

    ``upper_slack`` is ``min(n log 2 - n I(mu) - log A)`` and ``lower_slack``
    is ``min(log A - n log 2 + log(n)/2 + n I(mu) + log C)``, both over the
    sectors with ``|mu| < 1``.  A violation is a slack below ``-LEMMA1_SLACK``.
    """

    n_max: int
    C: float
    upper_slack: float
    lower_slack: float
    upper_violations: int
    lower_violations: int

    @property
    def passed(self) -> bool:
        return self.upper_violations == 0 and self.lower_violations == 0


def _lemma1_gaps(n: int):
    """``(upper gap, lower gap without log C)`` for every interior sector of size ``n``."""
    k = np.arange(1, n)
    mu = (2.0 * k - n) / n
    log_a = log_binomial(n, k)
    bound = n * math.log(2.0) - n * entropy(mu)
    return bound - log_a, log_a - bound + 0.5 * math.log(n)


def check_lemma1_bounds(n: int, C: float = 2.0) -> Lemma1Report:
    """Check the multiplicity bounds for a single size ``n``."""
    return check_lemma1_range(n, C, n_min=n)


def check_lemma1_range(n_max: int, C: float = 2.0, n_min: int = 1) -> Lemma1Report:
    """Check the multiplicity bounds for every size ``n_min <= n <= n_max``."""
    if n_min < 1 or n_max < n_min:
        raise DomainError(f"need 1 <= n_min <= n_max, got {n_min}, {n_max}")
    if not C > 0.0:
        raise DomainError(f"C must be positive, got {C}")
    log_c = math.log(C)
    up_min = lo_min = math.inf
    up_bad = lo_bad = 0
    for n in range(max(n_min, 2), n_max + 1):
        up, lo = _lemma1_gaps(n)
        lo = lo + log_c
        up_min = min(up_min, float(up.min()))
        lo_min = min(lo_min, float(lo.min()))
        up_bad += int(np.count_nonzero(up < -tol.LEMMA1_SLACK))
        lo_bad += int(np.count_nonzero(lo < -tol.LEMMA1_SLACK))
    return Lemma1Report(n_max, C, up_min, lo_min, up_bad, lo_bad)


def smallest_lemma1_constant(n_max: int = 1000) -> int:
    """Smallest integer ``C`` for which the lower bound holds for all ``n <= n_max``."""
    worst = max(float(-_lemma1_gaps(n)[1].min()) for n in range(2, n_max + 1))
    c = max(1, math.ceil(math.exp(worst)))
    while check_lemma1_range(n_max, c).lower_violations != 0:
        c += 1
    return c


# --- convergence --------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    n1: int
    n2: int
    p_n: float
    p_limit: float
    residual: float
    envelope: float


def sandwich_envelope(n1: int, n2: int, C: float) -> float:
    """``(ln((n1+1)(n2+1)) + ln(n1 n2)/2 + ln C) / N``."""
    n = n1 + n2
    return (math.log((n1 + 1) * (n2 + 1)) + 0.5 * math.log(n1 * n2) + math.log(C)) / n


def split_sizes(n: int, alpha1: float) -> tuple[int, int]:
    """Nearest-integer split of ``n`` with both populations non-empty."""
    n1 = min(max(round(alpha1 * n), 1), n - 1)
    return n1, n - n1


def convergence_study(
    p: ModelParams,
    sizes,
    C: float = 2.0,
    p_limit: float | None = None,
    threads: int | None = None,
) -> list[ConvergenceRow]:
    """``p_N`` against the limit pressure for increasing ``N``.

    ``p_limit`` defaults to :func:`bipartite_mf.thermo.limit_pressure`.
    """
    sizes = [int(s) for s in sizes]
    if any(s < 2 for s in sizes) or sizes != sorted(sizes):
        raise DomainError(f"sizes must be ascending integers >= 2, got {sizes}")
    if p_limit is None:
        from .thermo import limit_pressure

        p_limit = limit_pressure(p).pressure
    rows = []
    for n in sizes:
        n1, n2 = split_sizes(n, p.alpha1)
        p_n = exact_pressure(FiniteModel(n1, n2, p), threads)
        rows.append(ConvergenceRow(n, n1, n2, p_n, p_limit, p_n - p_limit, sandwich_envelope(n1, n2, C)))
    return rows
