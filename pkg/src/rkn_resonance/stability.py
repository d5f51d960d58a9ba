"""Schur-Cohn stability tests, constant-step limits and (h, eps) stability charts."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._linalg import det2, spectral_radius2, trace2
from .errors import SingularMatrixError
from .tableau import RknTableau
from .transition import StepPattern, _phases, compose, composed_transition, step_sequence, transition_batch

__all__ = [
    "SC_TOL",
    "schur_cohn_stable",
    "constant_step_limit",
    "ChartSpec",
    "ChartResult",
    "stability_chart",
    "growth_factor",
]

SC_TOL = 1e-12


def _schur_cohn(tr, det, tol):
    return (np.abs(tr) - 1.0 <= det + tol) & (det <= 1.0 + tol)


def schur_cohn_stable(R, tol: float = SC_TOL) -> bool:
    """``|trace R| - 1 <= det R <= 1``, each side relaxed by ``tol``."""
    R = np.asarray(R, dtype=float)
    return bool(_schur_cohn(trace2(R), det2(R), tol))


def constant_step_limit(
    tab: RknTableau,
    h_cap: float = 1e3,
    tol: float = 1e-12,
    sc_tol: float = SC_TOL,
    n_scan: int = 10_000,
    max_bisect: int = 60,
) -> float | None:
    """Largest ``h <= h_cap`` up to which constant steps are stable.

    The interval ``[0, h_cap]`` is scanned at ``n_scan`` points; the first
    failing sample is refined by bisection. Returns ``None`` when no failure
    is found, i.e. the method is R-stable up to ``h_cap``.
    """
    if not h_cap > 0:
        raise ValueError("h_cap must be positive")
    hs = np.linspace(0.0, h_cap, n_scan + 1)
    R = transition_batch(tab, hs)
    ok = _schur_cohn(trace2(R), det2(R), sc_tol)
    if ok.all():
        return None
    k = int(np.argmin(ok))
    if k == 0:
        return 0.0
    lo, hi = float(hs[k - 1]), float(hs[k])
    for _ in range(max_bisect):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if schur_cohn_stable(transition_batch(tab, [mid])[0], sc_tol):
            lo = mid
        else:
            hi = mid
    return lo


def growth_factor(tab: RknTableau, pat: StepPattern) -> float:
    """Per-step growth ``rho(composed)^(1/p)`` over one period of ``pat``."""
    rho = float(spectral_radius2(composed_transition(tab, step_sequence(pat))))
    return rho ** (1.0 / pat.p)


@dataclass(frozen=True)
class ChartSpec:
    p: int
    h_min: float = 0.0
    h_max: float = 2.0
    eps_min: float = 0.0
    eps_max: float = 0.5
    nh: int = 400
    neps: int = 400

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 1:
            raise ValueError("p must be a positive integer")
        if self.h_min < 0 or self.eps_min < 0:
            raise ValueError("h_min and eps_min must be nonnegative")
        if not (self.h_max > self.h_min and self.eps_max >= self.eps_min):
            raise ValueError("degenerate chart range")
        if self.nh < 1 or self.neps < 1:
            raise ValueError("grid resolutions must be positive")
        if self.eps_max == self.eps_min and self.neps != 1:
            raise ValueError("degenerate eps range needs neps == 1")

    @property
    def h_grid(self) -> np.ndarray:
        return np.linspace(self.h_min, self.h_max, self.nh)

    @property
    def eps_grid(self) -> np.ndarray:
        return np.linspace(self.eps_min, self.eps_max, self.neps)


@dataclass
class ChartResult:
    """Per-cell verdicts of a stability chart.

    Arrays have shape ``(neps, nh)``: row ``j`` is ``eps_grid[j]`` and column
    ``i`` is ``h_grid[i]``, so row-major iteration runs over ``h`` fastest.
    ``valid`` is False where ``eps >= h`` (nonpositive steps); those cells
    carry ``stable=False`` and ``growth=nan``. ``singular`` cells hit a
    singular stage matrix and carry ``growth=inf``.
    """

    spec: ChartSpec
    stable: np.ndarray
    growth: np.ndarray
    valid: np.ndarray
    singular: np.ndarray

    @property
    def unstable(self) -> np.ndarray:
        return self.valid & ~self.stable

    def cells(self):
        """Yield ``(h, eps, stable, growth)`` for valid cells, row-major."""
        hg, eg = self.spec.h_grid, self.spec.eps_grid
        for j in range(self.spec.neps):
            for i in range(self.spec.nh):
                if self.valid[j, i]:
                    yield float(hg[i]), float(eg[j]), bool(self.stable[j, i]), float(self.growth[j, i])


def _chart_row(tab, hg, eps, phases, p, tol):
    n = hg.shape[0]
    stable = np.zeros(n, dtype=bool)
    growth = np.full(n, np.nan)
    singular = np.zeros(n, dtype=bool)
    valid = hg - eps > 0
    idx = np.flatnonzero(valid)
    if idx.size == 0:
        return stable, growth, valid, singular
    steps = hg[idx, None] + eps * phases[None, :]
    try:
        mats = transition_batch(tab, steps.ravel()).reshape(idx.size, p, 2, 2)
        good = np.ones(idx.size, dtype=bool)
    except SingularMatrixError:
        # fall back to per-cell evaluation to isolate singular cells
        mats = np.zeros((idx.size, p, 2, 2))
        good = np.ones(idx.size, dtype=bool)
        for k in range(idx.size):
            try:
                mats[k] = transition_batch(tab, steps[k])
            except SingularMatrixError:
                good[k] = False
    comp = compose(mats)
    st = _schur_cohn(trace2(comp), det2(comp), tol)
    gr = spectral_radius2(comp) ** (1.0 / p)
    stable[idx] = st & good
    growth[idx] = np.where(good, gr, np.inf)
    singular[idx] = ~good
    return stable, growth, valid, singular


def stability_chart(
    tab: RknTableau, spec: ChartSpec, tol: float = SC_TOL, threads: int = 1
) -> ChartResult:
    """Evaluate the composed-method Schur-Cohn test on the ``(h, eps)`` grid.

    ``threads > 1`` splits rows across a thread pool; each cell is computed
    by the same elementwise operations either way, so results are identical.
    """
    hg, eg = spec.h_grid, spec.eps_grid
    phases = _phases(spec.p)
    shape = (spec.neps, spec.nh)

    def row(j):
        return _chart_row(tab, hg, float(eg[j]), phases, spec.p, tol)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(row, range(spec.neps)))
    else:
        rows = [row(j) for j in range(spec.neps)]

    stable, growth, valid, singular = (np.zeros(shape, dtype=d) for d in (bool, float, bool, bool))
    for j, (st, gr, va, sg) in enumerate(rows):
        stable[j], growth[j], valid[j], singular[j] = st, gr, va, sg
    return ChartResult(spec=spec, stable=stable, growth=growth, valid=valid, singular=singular)


def is_r_stable(tab: RknTableau, h_cap: float = 1e3) -> bool:
    return constant_step_limit(tab, h_cap) is None


def classify(limit: float | None) -> str:
    if limit is None:
        return "R-stable"
    if limit == 0.0 or math.isclose(limit, 0.0):
        return "unstable"
    return "conditionally stable"
