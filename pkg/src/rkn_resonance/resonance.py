"""Resonance analysis: rotation angle, critical step sizes and instability wedges.

For a method whose transition matrix has eigenvalues ``exp(+-i omega(h))``,
small step oscillation of period ``p`` resonates when ``omega(h) = pi/p``
(low branch) or ``omega(h) = pi - pi/p`` (high branch). Near such a critical
step ``h0`` the base step is strained as ``h = h0 + h1*eps`` and the composed
transition matrix is expanded as ``R0 + eps*R1``. Because ``R0 = +-I`` and
``det`` of the composed matrix is 1, the composed method is unstable to first
order exactly where ``det R1(h1) < 0``; the roots of that quadratic in ``h1``
are the wedge boundary slopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._linalg import det2, matmul2, spectral_radius2, trace2
from .errors import NoUnitModulusAngle, NoWedgeError, OutOfRangeError, UnsupportedMethodError
from .stability import constant_step_limit
from .tableau import RknTableau
from .transition import _phases, compose, derivative_batch, transition_batch, transition_matrix

__all__ = [
    "Branch",
    "CriticalPoint",
    "omega",
    "critical_step_size",
    "r0_matrix",
    "r1_matrix",
    "wedge_halfwidth",
    "wedge_boundary_numeric",
    "small_step_asymptote",
    "critical_point",
]

OMEGA_TOL = 1e-9
TRACE_TOL = 1e-8


class Branch(str, Enum):
    LOW = "low"
    HIGH = "high"

    def target(self, p: int) -> float:
        return math.pi / p if self is Branch.LOW else math.pi - math.pi / p


@dataclass(frozen=True)
class CriticalPoint:
    p: int
    branch: Branch
    h0: float | None
    h1_minus: float | None = None
    h1_plus: float | None = None
    note: str = ""


def _omega_from(tr, det, h, tol):
    if np.any(np.abs(det - 1.0) > tol):
        bad = np.flatnonzero(np.abs(det - 1.0) > tol)[0]
        raise NoUnitModulusAngle(
            f"det R(h) = {float(det[bad])!r} at h={float(h[bad])!r}; the method is damped "
            "and has no unit-modulus rotation angle"
        )
    if np.any(np.abs(tr) > 2.0 + tol):
        bad = np.flatnonzero(np.abs(tr) > 2.0 + tol)[0]
        raise OutOfRangeError(f"real eigenvalues at h={float(h[bad])!r} (trace {float(tr[bad])!r})")
    half = 0.5 * tr
    return np.arctan2(np.sqrt(np.maximum(0.0, 1.0 - half * half)), half)


def omega(tab: RknTableau, h: float, tol: float = OMEGA_TOL) -> float:
    """Rotation angle in ``[0, pi]`` of the eigenvalues of ``R(h)``.

    ``det R(h)`` must equal 1 and ``|trace R(h)|`` must not exceed 2, both
    to within ``tol``.
    """
    R = transition_matrix(tab, h)
    h_arr = np.array([h], dtype=float)
    return float(_omega_from(trace2(R)[None], det2(R)[None], h_arr, tol)[0])


def _omega_batch(tab, hs, tol):
    R = transition_batch(tab, hs)
    return _omega_from(trace2(R), det2(R), hs, tol)


def critical_step_size(
    tab: RknTableau,
    p: int,
    branch: Branch | str = Branch.LOW,
    tol: float = 1e-14,
    h_cap: float = 1e3,
    n_samples: int = 10_000,
    omega_tol: float = OMEGA_TOL,
) -> float | None:
    """Smallest ``h > 0`` with ``omega(h)`` equal to the branch target.

    The search interval is ``(0, h_sup]`` with ``h_sup`` the constant-step
    stability limit, or ``h_cap`` for R-stable methods. Returns ``None`` when
    the angle never reaches the target there.
    """
    if p < 2:
        raise ValueError("period p must be at least 2")
    branch = Branch(branch)
    target = branch.target(p)
    h_sup = constant_step_limit(tab, h_cap)
    if h_sup is None:
        h_sup = h_cap
    hs = np.linspace(0.0, h_sup, n_samples + 1)[1:]
    f = _omega_batch(tab, hs, omega_tol) - target
    hits = np.flatnonzero(f == 0.0)
    cross = np.flatnonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0)
    if hits.size and (not cross.size or hits[0] <= cross[0]):
        return float(hs[hits[0]])
    if not cross.size:
        return None
    k = cross[0]
    lo, hi = float(hs[k]), float(hs[k + 1])
    f_lo = f[k]
    for _ in range(200):
        if hi - lo <= tol * max(1.0, hi):
            break
        mid = 0.5 * (lo + hi)
        f_mid = omega(tab, mid, omega_tol) - target
        if f_mid == 0.0:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def small_step_asymptote(p: int) -> float:
    if p < 2:
        raise ValueError("period p must be at least 2")
    return math.pi / p


def r0_matrix(tab: RknTableau, h0: float, p: int) -> np.ndarray:
    """``R(h0)^p``, the composed matrix at zero oscillation amplitude."""
    return compose(np.repeat(transition_matrix(tab, h0)[None], p, axis=0))


def _r1_parts(tab, h0, p):
    # R1(h1) = S_cos + h1 * S_one, with
    #   S_w = sum_k w_k R^(p-1-k) R' R^k
    R = transition_matrix(tab, h0)
    dR = derivative_batch(tab, [h0])[0]
    powers = [np.eye(2)]
    for _ in range(p - 1):
        powers.append(matmul2(R, powers[-1]))
    terms = np.array([matmul2(powers[p - 1 - k], matmul2(dR, powers[k])) for k in range(p)])
    w = _phases(p)
    s_cos = np.zeros((2, 2))
    s_one = np.zeros((2, 2))
    for k in range(p):
        s_cos = s_cos + w[k] * terms[k]
        s_one = s_one + terms[k]
    return s_cos, s_one


def r1_matrix(tab: RknTableau, h0: float, h1: float, p: int) -> np.ndarray:
    """First-order coefficient of the composed matrix in the oscillation amplitude.

    With steps ``h_n = h0 + eps*(h1 + cos(2 pi n/p))`` the composed matrix is
    ``R0 + eps*R1 + O(eps^2)`` where::

        R1 = sum_k (cos(2 pi k/p) + h1) R(h0)^(p-1-k) R'(h0) R(h0)^k
    """
    if not h0 > 0:
        raise ValueError("h0 must be positive")
    if p < 2:
        raise ValueError("period p must be at least 2")
    s_cos, s_one = _r1_parts(tab, h0, p)
    return s_cos + h1 * s_one


def _check_critical(tab, p, h0, tol=1e-6):
    w = omega(tab, h0) * p
    if min(abs(w - math.pi), abs(w - (p - 1) * math.pi)) > tol * p:
        raise ValueError(f"h0={h0!r} is not a critical step size for p={p} (p*omega = {w!r})")


def wedge_halfwidth(tab: RknTableau, p: int, h0: float) -> tuple[float, float]:
    """Boundary slopes ``(h1_minus, h1_plus)`` of the wedge at a critical step.

    ``det R1(h1)`` is a quadratic in ``h1``; it is reconstructed from its
    values at ``h1 = -1, 0, 1`` and its two real roots returned in ascending
    order. First-order instability holds where ``det R1 < 0``.
    """
    _check_critical(tab, p, h0)
    q = {h1: float(det2(r1_matrix(tab, h0, h1, p))) for h1 in (-1.0, 0.0, 1.0)}
    a = 0.5 * (q[1.0] + q[-1.0]) - q[0.0]
    b = 0.5 * (q[1.0] - q[-1.0])
    c = q[0.0]
    scale = max(abs(a), abs(b), abs(c), 1e-300)
    if abs(a) <= 1e-12 * scale:
        raise NoWedgeError(f"det R1 is not quadratic in h1 at p={p}, h0={h0!r}")
    disc = b * b - 4.0 * a * c
    if disc < 0:
        raise NoWedgeError(f"complex wedge slopes at p={p}, h0={h0!r} (discriminant {disc!r})")
    sq = math.sqrt(disc)
    # numerically stable pair of roots
    qq = -0.5 * (b + math.copysign(sq, b))
    r1 = qq / a
    r2 = c / qq if qq != 0.0 else -r1
    lo, hi = sorted((r1, r2))
    for root in (lo, hi):
        tr = float(trace2(r1_matrix(tab, h0, root, p)))
        if abs(tr) > TRACE_TOL:
            raise UnsupportedMethodError(
                f"trace R1 = {tr!r} at h1={root!r} (p={p}); first-order wedge condition does not apply"
            )
    return lo, hi


def _growth(tab, p, h, eps, phases):
    h = np.atleast_1d(np.asarray(h, dtype=float))
    steps = h[:, None] + eps * phases[None, :]
    mats = transition_batch(tab, steps.ravel()).reshape(h.size, p, 2, 2)
    return spectral_radius2(compose(mats)) ** (1.0 / p)


def wedge_boundary_numeric(
    tab: RknTableau,
    p: int,
    h0: float,
    eps: float = 1e-3,
    growth_tol: float = 1e-9,
    n_iter: int = 100,
) -> tuple[float, float] | None:
    """Boundary slopes of the wedge measured directly from the growth factor.

    At amplitude ``eps`` the instability interval in ``h`` around ``h0`` is
    located by bisection on ``growth > 1 + growth_tol`` and returned as
    ``((h_lo - h0)/eps, (h_hi - h0)/eps)``. ``None`` means no instability was
    found within ``h0 +- eps``.
    """
    phases = _phases(p)

    def unstable(h):
        return bool(_growth(tab, p, h, eps, phases)[0] > 1.0 + growth_tol)

    centre = h0
    if not unstable(centre):
        probe = h0 + eps * np.linspace(-1.0, 1.0, 401)
        probe = probe[probe - eps > 0]
        g = _growth(tab, p, probe, eps, phases)
        k = int(np.argmax(g))
        if not g[k] > 1.0 + growth_tol:
            return None
        centre = float(probe[k])

    def edge(direction):
        inside = centre
        width = eps
        outside = centre + direction * width
        while unstable(outside):
            inside = outside
            width *= 2.0
            outside = centre + direction * width
            if outside - eps <= 0 or width > 1e3:
                raise NoWedgeError("instability region does not close")
        for _ in range(n_iter):
            mid = 0.5 * (inside + outside)
            if mid in (inside, outside):
                break
            if unstable(mid):
                inside = mid
            else:
                outside = mid
        return 0.5 * (inside + outside)

    h_lo = edge(-1.0)
    h_hi = edge(+1.0)
    return (h_lo - h0) / eps, (h_hi - h0) / eps


def critical_point(tab: RknTableau, p: int, branch: Branch | str = Branch.LOW, **kw) -> CriticalPoint:
    """Critical step size and wedge slopes, with failures recorded in ``note``."""
    branch = Branch(branch)
    h0 = critical_step_size(tab, p, branch, **kw)
    if h0 is None:
        return CriticalPoint(p, branch, None, note="no critical step size")
    try:
        lo, hi = wedge_halfwidth(tab, p, h0)
    except (NoWedgeError, UnsupportedMethodError, ValueError) as exc:
        return CriticalPoint(p, branch, h0, note=str(exc))
    return CriticalPoint(p, branch, h0, lo, hi)
