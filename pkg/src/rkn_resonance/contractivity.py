"""Weighted-norm contractivity of Runge-Kutta steps on linear systems.

A Hurwitz system ``y' = A y`` is contractive in the norm ``|y|_W =
sqrt(y^T W y)`` where ``A^T W + W A = -I``. A-stable Runge-Kutta methods
preserve euclidean contractivity, and the stepping map commutes with a
constant change of variables, so such methods are contractive in the
``W``-norm for every sequence of positive step sizes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import PIVOT_RTOL, lu_solve_batched
from .errors import PoleError, RknError, SingularMatrixError
from .tableau import RknTableau, RkTableau
from .transition import transition_batch

__all__ = [
    "LinearSystem",
    "MODEL_PROBLEM",
    "is_hurwitz",
    "lyapunov_solve",
    "rk_step_linear",
    "stability_function",
    "a_stable_check",
    "w_norm",
    "ContractivityReport",
    "contractivity_trace",
]


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """The linear constant-coefficient ODE ``y' = A y``."""

    A: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got shape {A.shape}")
        if not np.all(np.isfinite(A)):
            raise ValueError("A has non-finite entries")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @property
    def n(self) -> int:
        return self.A.shape[0]


# x'' + x = 0 as a first-order system in (x, x')
MODEL_PROBLEM = LinearSystem([[0.0, 1.0], [-1.0, 0.0]])


def _as_system(sys) -> LinearSystem:
    return sys if isinstance(sys, LinearSystem) else LinearSystem(sys)


def is_hurwitz(sys, tol: float = 0.0) -> bool:
    """True iff every eigenvalue of ``A`` has real part below ``-tol``."""
    A = _as_system(sys).A
    try:
        ev = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise RknError(f"eigenvalue computation failed: {exc}") from exc
    return bool(np.all(ev.real < -tol))


def lyapunov_solve(sys) -> np.ndarray:
    """Symmetric ``W`` with ``A^T W + W A = -I`` for Hurwitz ``A``.

    The equation is assembled as a dense linear system in the ``n(n+1)/2``
    upper-triangular entries of ``W``.
    """
    sys = _as_system(sys)
    if not is_hurwitz(sys):
        raise ValueError("lyapunov_solve needs a Hurwitz matrix")
    A, n = sys.A, sys.n
    iu = np.triu_indices(n)
    m = iu[0].size
    col = np.full((n, n), -1, dtype=int)
    col[iu] = np.arange(m)
    col[iu[1], iu[0]] = np.arange(m)
    # (A^T W + W A)_ij = sum_k A_ki W_kj + W_ik A_kj, one equation per i <= j
    L = np.zeros((m, m))
    for r, (i, j) in enumerate(zip(*iu)):
        for k in range(n):
            L[r, col[k, j]] += A[k, i]
            L[r, col[i, k]] += A[k, j]
    rhs = -(iu[0] == iu[1]).astype(float)
    x, singular = lu_solve_batched(L[None], rhs[None, :, None])
    if singular[0]:
        raise RknError("Lyapunov system is numerically singular")
    W = np.empty((n, n))
    W[iu] = x[0, :, 0]
    W[iu[1], iu[0]] = x[0, :, 0]
    return W


def rk_step_linear(rk: RkTableau, sys, h: float, y) -> np.ndarray:
    """One Runge-Kutta step of size ``h`` on ``y' = A y``.

    Solves ``(I - h a (x) A) g = e (x) y`` for the stacked stage values and
    returns ``y + h sum_j b_j A g_j``.
    """
    A = _as_system(sys).A
    n, s = A.shape[0], rk.s
    y = np.asarray(y, dtype=float)
    K = np.eye(s * n) - h * np.kron(rk.a, A)
    g, singular = lu_solve_batched(K[None], np.tile(y, s)[None, :, None])
    if singular[0]:
        raise SingularMatrixError(h, "RK stage system")
    g = g[0, :, 0].reshape(s, n)
    return y + h * (A @ (rk.b @ g))


def _stability_batch(rk, zs):
    zs = np.asarray(zs, dtype=complex)
    s = rk.s
    M = np.eye(s)[None] - zs[:, None, None] * rk.a[None]
    x, singular = lu_solve_batched(M, np.ones((zs.size, s, 1), dtype=complex))
    return 1.0 + zs * (x[:, :, 0] @ rk.b), singular


def stability_function(rk: RkTableau, z: complex) -> complex:
    """``R(z) = 1 + z b^T (I - z a)^-1 e``."""
    r, singular = _stability_batch(rk, [complex(z)])
    if singular[0]:
        raise PoleError(complex(z))
    return complex(r[0])


def a_stable_check(
    rk: RkTableau, y_max: float = 1e6, n_samples: int = 2000, tol: float = 1e-12
) -> bool:
    """Sampled A-stability certificate.

    Checks ``|R(iy)| <= 1 + tol`` on log- and linearly spaced ``y`` in
    ``[0, y_max]`` plus a far point standing in for ``y -> infinity``, and
    that every pole ``1/lambda`` (``lambda`` a nonzero eigenvalue of ``a``)
    lies in the open right half-plane. Not a proof.
    """
    if n_samples < 10:
        raise ValueError("n_samples must be at least 10")
    lam = np.linalg.eigvals(rk.a)
    for ev in lam:
        if abs(ev) > PIVOT_RTOL and not (1.0 / ev).real > 0:
            return False
    ys = np.concatenate(
        [
            [0.0],
            np.logspace(-6, np.log10(y_max), n_samples),
            np.linspace(0.0, y_max, n_samples),
            [1e6 * y_max],
        ]
    )
    zs = np.concatenate([1j * ys, -1j * ys])
    r, singular = _stability_batch(rk, zs)
    return bool(not singular.any() and np.all(np.abs(r) <= 1.0 + tol))


def w_norm(y, W) -> float:
    y = np.asarray(y, dtype=float)
    W = np.asarray(W, dtype=float)
    if W.shape != (y.shape[0], y.shape[0]):
        raise ValueError(f"dimension mismatch: y has {y.shape[0]} entries, W is {W.shape}")
    return float(np.sqrt(y @ W @ y))


@dataclass
class ContractivityReport:
    """Per-step ``W``-norms of a trajectory.

    ``norms[0]`` is the initial norm; ``ratios[n] = norms[n+1]/norms[n]``.
    ``increases`` lists step indices whose ratio exceeded ``1 + rtol``.
    """

    steps: np.ndarray
    norms: np.ndarray
    ratios: np.ndarray
    increases: list
    rtol: float

    @property
    def contractive(self) -> bool:
        return not self.increases


def contractivity_trace(stepper, W, y0, steps, rtol: float = 1e-12) -> ContractivityReport:
    """Track ``|y_n|_W`` along a trajectory.

    ``stepper`` is either an :class:`RknTableau` (stepped on the model
    problem through its transition matrix) or an ``(RkTableau, system)``
    pair stepped with :func:`rk_step_linear`.
    """
    steps = np.atleast_1d(np.asarray(steps, dtype=float))
    W = np.asarray(W, dtype=float)
    y = np.asarray(y0, dtype=float)
    norms = np.empty(steps.size + 1)
    norms[0] = w_norm(y, W)
    if isinstance(stepper, RknTableau):
        mats = transition_batch(stepper, steps)
        advance = lambda n, y: mats[n] @ y  # noqa: E731
    else:
        rk, sys = stepper
        advance = lambda n, y: rk_step_linear(rk, sys, steps[n], y)  # noqa: E731
    for n in range(steps.size):
        y = advance(n, y)
        norms[n + 1] = w_norm(y, W)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = norms[1:] / norms[:-1]
    increases = [int(k) for k in np.flatnonzero(ratios > 1.0 + rtol)]
    return ContractivityReport(steps=steps, norms=norms, ratios=ratios, increases=increases, rtol=rtol)
