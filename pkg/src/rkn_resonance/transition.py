"""Transition matrices of RKN methods on the undamped oscillator ``x'' + x = 0``.

One step maps the state ``y = (x, x')`` to ``R(h) y`` with::

    M = (I + h^2 abar)^-1
    R(h) = [[1 - h^2 bbar.M e,  h - h^3 bbar.M c],
            [  - h   b.M e,     1 - h^2   b.M c]]

Evaluated literally, the O(1) entries come out as differences of terms
carrying ``h^2`` machine epsilons of absolute error. Each entry is a rational
function of ``t = h^2`` with denominator ``det(I + t abar)``, so the default
route computes the numerator and denominator polynomial coefficients once per
tableau in exact rational arithmetic and evaluates them by Horner's rule.
The literal formula is kept as :func:`transition_batch_lu` and
:func:`derivative_batch_lu` (dense LU with partial pivoting) for
cross-checking.

Matrices are plain ``(2, 2)`` float arrays; the ``*_batch`` variants take an
array of step sizes and return a ``(N, 2, 2)`` stack.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._linalg import lu_solve_batched, matmul2
from .errors import SingularMatrixError
from .tableau import RknTableau

__all__ = [
    "StepPattern",
    "transition_matrix",
    "transition_derivative",
    "transition_batch",
    "derivative_batch",
    "transition_batch_lu",
    "derivative_batch_lu",
    "step_sequence",
    "composed_transition",
    "compose",
]


def _dot(w, v):
    # fixed summation order over stages; keeps results batch-independent
    acc = w[0] * v[..., 0]
    for i in range(1, w.shape[0]):
        acc = acc + w[i] * v[..., i]
    return acc


def _stage_solve(tab: RknTableau, h, with_derivative=False):
    h = np.asarray(h, dtype=float)
    h2 = (h * h)[:, None, None]
    s = tab.s
    mat = np.eye(s) + h2 * tab.abar
    rhs = np.broadcast_to(np.stack([np.ones(s), tab.c], axis=1), (h.shape[0], s, 2))
    uv, singular = lu_solve_batched(mat, rhs)
    if singular.any():
        bad = float(h[np.argmax(singular)])
        raise SingularMatrixError(bad, "I + h^2 abar")
    u, v = uv[..., 0], uv[..., 1]
    if not with_derivative:
        return h, u, v, None, None
    # dM/dh = -2h M abar M
    au = np.einsum("ij,nj->ni", tab.abar, u)
    av = np.einsum("ij,nj->ni", tab.abar, v)
    duv, _ = lu_solve_batched(mat, np.stack([au, av], axis=2))
    du = -2.0 * h[:, None] * duv[..., 0]
    dv = -2.0 * h[:, None] * duv[..., 1]
    return h, u, v, du, dv


def transition_batch_lu(tab: RknTableau, hs) -> np.ndarray:
    """Literal stage-solve formula for ``R(h)``; shape ``(N, 2, 2)``."""
    hs = np.atleast_1d(np.asarray(hs, dtype=float))
    h, u, v, _, _ = _stage_solve(tab, hs)
    h2 = h * h
    out = np.empty((h.shape[0], 2, 2))
    out[:, 0, 0] = 1.0 - h2 * _dot(tab.bbar, u)
    out[:, 0, 1] = h - h2 * h * _dot(tab.bbar, v)
    out[:, 1, 0] = -h * _dot(tab.b, u)
    out[:, 1, 1] = 1.0 - h2 * _dot(tab.b, v)
    return out


def derivative_batch_lu(tab: RknTableau, hs) -> np.ndarray:
    """``dR/dh`` from ``dM/dh = -2h M abar M``; shape ``(N, 2, 2)``."""
    hs = np.atleast_1d(np.asarray(hs, dtype=float))
    h, u, v, du, dv = _stage_solve(tab, hs, with_derivative=True)
    h2 = h * h
    bbar, b = tab.bbar, tab.b
    out = np.empty((h.shape[0], 2, 2))
    out[:, 0, 0] = -2.0 * h * _dot(bbar, u) - h2 * _dot(bbar, du)
    out[:, 0, 1] = 1.0 - 3.0 * h2 * _dot(bbar, v) - h2 * h * _dot(bbar, dv)
    out[:, 1, 0] = -_dot(b, u) - h * _dot(b, du)
    out[:, 1, 1] = -2.0 * h * _dot(b, v) - h2 * _dot(b, dv)
    return out


# --- exact rational-function route ------------------------------------------


def _frac_solve(X, cols):
    """Exact Gaussian elimination; returns (det, X^-1 @ cols) or (0, None)."""
    n = len(X)
    a = [row[:] + [col[i] for col in cols] for i, row in enumerate(X)]
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return Fraction(0), None
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det *= a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    m = len(cols)
    sol = [[Fraction(0)] * m for _ in range(n)]
    for i in range(n - 1, -1, -1):
        for j in range(m):
            acc = a[i][n + j] - sum(a[i][k] * sol[k][j] for k in range(i + 1, n))
            sol[i][j] = acc / a[i][i]
    return det, sol


def _interpolate(ts, vals):
    """Exact ascending coefficients of the polynomial through (ts, vals)."""
    n = len(ts)
    V = [[t**k for k in range(n)] for t in ts]
    _, sol = _frac_solve(V, [vals])
    return [row[0] for row in sol]


def _poly_mul_t(coef):
    return [Fraction(0)] + list(coef)


def _poly_sub(p, q):
    n = max(len(p), len(q))
    p = list(p) + [Fraction(0)] * (n - len(p))
    q = list(q) + [Fraction(0)] * (n - len(q))
    return [x - y for x, y in zip(p, q)]


def _poly_der(coef):
    return [k * c for k, c in enumerate(coef)][1:] or [Fraction(0)]


class _RationalForm:
    """Polynomial coefficients (in t = h^2) of the transition matrix entries.

    ``R11 = n11/D``, ``R12 = h n12/D``, ``R21 = -h n21/D``, ``R22 = n22/D``.
    """

    def __init__(self, tab: RknTableau):
        s = tab.s
        F = Fraction
        abar = [[F(float(x)) for x in row] for row in tab.abar]
        bbar = [F(float(x)) for x in tab.bbar]
        b = [F(float(x)) for x in tab.b]
        c = [F(float(x)) for x in tab.c]
        e = [F(1)] * s
        ts, D, P, Q, S, T = [], [], [], [], [], []
        t = 0
        while len(ts) < s + 1:
            X = [[(F(1) if i == j else F(0)) + t * abar[i][j] for j in range(s)] for i in range(s)]
            det, sol = _frac_solve(X, [e, c])
            if det != 0:
                u = [row[0] for row in sol]
                v = [row[1] for row in sol]
                ts.append(F(t))
                D.append(det)
                P.append(det * sum(x * y for x, y in zip(bbar, u)))
                Q.append(det * sum(x * y for x, y in zip(bbar, v)))
                S.append(det * sum(x * y for x, y in zip(b, u)))
                T.append(det * sum(x * y for x, y in zip(b, v)))
            t += 1
        D, P, Q, S, T = (_interpolate(ts, vals) for vals in (D, P, Q, S, T))
        exact = {
            "den": D,
            "n11": _poly_sub(D, _poly_mul_t(P)),
            "n12": _poly_sub(D, _poly_mul_t(Q)),
            "n21": S,
            "n22": _poly_sub(D, _poly_mul_t(T)),
        }
        self.coef = {k: np.array([float(x) for x in v]) for k, v in exact.items()}
        self.dcoef = {k: np.array([float(x) for x in _poly_der(v)]) for k, v in exact.items()}
        self.abs_den = np.abs(self.coef["den"])


def _horner(coef, t):
    acc = np.full_like(t, coef[-1])
    for ck in coef[-2::-1]:
        acc = acc * t + ck
    return acc


_FORMS: "weakref.WeakKeyDictionary[RknTableau, _RationalForm]" = weakref.WeakKeyDictionary()


def _form(tab: RknTableau) -> _RationalForm:
    form = _FORMS.get(tab)
    if form is None:
        form = _FORMS[tab] = _RationalForm(tab)
    return form


def _evaluate(tab, hs, derivative=False):
    hs = np.atleast_1d(np.asarray(hs, dtype=float))
    form = _form(tab)
    t = hs * hs
    den = _horner(form.coef["den"], t)
    bad = np.abs(den) <= 1e-14 * _horner(form.abs_den, t)
    if bad.any():
        raise SingularMatrixError(float(hs[np.argmax(bad)]), "I + h^2 abar")
    q = {k: _horner(form.coef[k], t) / den for k in ("n11", "n12", "n21", "n22")}
    out = np.empty((hs.shape[0], 2, 2))
    if not derivative:
        out[:, 0, 0] = q["n11"]
        out[:, 0, 1] = hs * q["n12"]
        out[:, 1, 0] = -hs * q["n21"]
        out[:, 1, 1] = q["n22"]
        return out
    # d/dt (n/D) = (n' - (n/D) D') / D ; d/dh = 2h d/dt
    dden = _horner(form.dcoef["den"], t)
    dq = {k: (_horner(form.dcoef[k], t) - q[k] * dden) / den for k in q}
    out[:, 0, 0] = 2.0 * hs * dq["n11"]
    out[:, 0, 1] = q["n12"] + 2.0 * t * dq["n12"]
    out[:, 1, 0] = -(q["n21"] + 2.0 * t * dq["n21"])
    out[:, 1, 1] = 2.0 * hs * dq["n22"]
    return out


def transition_batch(tab: RknTableau, hs) -> np.ndarray:
    """Transition matrices for every step size in ``hs``; shape ``(N, 2, 2)``."""
    return _evaluate(tab, hs)


def derivative_batch(tab: RknTableau, hs) -> np.ndarray:
    """Analytic ``dR/dh`` for every step size in ``hs``; shape ``(N, 2, 2)``."""
    return _evaluate(tab, hs, derivative=True)


def transition_matrix(tab: RknTableau, h: float) -> np.ndarray:
    """One-step transition matrix ``R(h)``.

    Raises :class:`SingularMatrixError` if ``I + h^2 abar`` is singular.
    """
    return transition_batch(tab, [h])[0]


def transition_derivative(tab: RknTableau, h: float) -> np.ndarray:
    return derivative_batch(tab, [h])[0]


@dataclass(frozen=True)
class StepPattern:
    """Periodic steps ``h_n = h + eps*cos(2 pi n / p)``."""

    h: float
    eps: float = 0.0
    p: int = 1

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.h, self.eps)):
            raise ValueError("h and eps must be finite")
        if int(self.p) != self.p or self.p < 1:
            raise ValueError(f"period p must be a positive integer, got {self.p!r}")
        if self.eps < 0:
            raise ValueError(f"eps must be nonnegative, got {self.eps}")
        if self.h - self.eps <= 0:
            raise ValueError(f"nonpositive steps: h={self.h}, eps={self.eps}")
        object.__setattr__(self, "p", int(self.p))


def _phases(p: int) -> np.ndarray:
    return np.cos(2.0 * np.pi * np.arange(p) / p)


def step_sequence(pat: StepPattern) -> np.ndarray:
    return pat.h + pat.eps * _phases(pat.p)


def compose(mats: np.ndarray) -> np.ndarray:
    """Ordered product ``mats[-1] @ ... @ mats[0]`` along axis -3.

    Works on ``(p, 2, 2)`` or batched ``(..., p, 2, 2)`` input.
    """
    out = mats[..., 0, :, :]
    for k in range(1, mats.shape[-3]):
        out = matmul2(mats[..., k, :, :], out)
    return np.array(out)


def composed_transition(tab: RknTableau, steps) -> np.ndarray:
    """Transition matrix over a sequence of steps, first step applied first."""
    steps = np.atleast_1d(np.asarray(steps, dtype=float))
    if steps.size == 0:
        raise ValueError("need at least one step")
    if np.any(steps < 0):
        raise ValueError("steps must be nonnegative")
    return compose(transition_batch(tab, steps))
