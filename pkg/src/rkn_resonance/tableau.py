"""Runge-Kutta-Nystrom tableaus and the built-in method catalog.

An s-stage RKN method for ``x'' = f(t, x)`` is given by abscissae ``c``, the
position coupling matrix ``abar``, and the weights ``bbar`` (position) and
``b`` (velocity)::

    k_i     = f(t + c_i h, x + c_i h x' + h^2 sum_j abar_ij k_j)
    x_new   = x + h x' + h^2 sum_i bbar_i k_i
    x'_new  = x' + h sum_i b_i k_i
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CatalogError, TableauError

__all__ = [
    "RknTableau",
    "RkTableau",
    "SDIRK_ALPHA",
    "builtin_rkn",
    "builtin_rk",
    "newmark",
    "verify_rk_equivalence",
    "parse_tableau",
    "load_tableau",
    "resolve_method",
    "RKN_CATALOG",
    "RK_CATALOG",
]

SDIRK_ALPHA = (3.0 + math.sqrt(3.0)) / 6.0


def _frozen(x, shape, what, name):
    arr = np.array(x, dtype=float)
    if arr.shape != shape:
        raise TableauError(f"{name}: {what} has shape {arr.shape}, expected {shape}")
    if not np.all(np.isfinite(arr)):
        raise TableauError(f"{name}: {what} has non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RknTableau:
    name: str
    c: np.ndarray
    abar: np.ndarray
    bbar: np.ndarray
    b: np.ndarray
    s: int = field(init=False)

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        s = c.shape[0]
        if s < 1:
            raise TableauError(f"{self.name}: need at least one stage")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "c", _frozen(c, (s,), "c", self.name))
        object.__setattr__(self, "abar", _frozen(self.abar, (s, s), "abar", self.name))
        object.__setattr__(self, "bbar", _frozen(self.bbar, (s,), "bbar", self.name))
        object.__setattr__(self, "b", _frozen(self.b, (s,), "b", self.name))

    @property
    def explicit(self) -> bool:
        return bool(np.all(np.triu(self.abar) == 0.0))

    def __repr__(self):
        return f"RknTableau(name={self.name!r}, s={self.s})"


@dataclass(frozen=True, eq=False)
class RkTableau:
    name: str
    c: np.ndarray
    a: np.ndarray
    b: np.ndarray
    s: int = field(init=False)

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        s = c.shape[0]
        if s < 1:
            raise TableauError(f"{self.name}: need at least one stage")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "c", _frozen(c, (s,), "c", self.name))
        object.__setattr__(self, "a", _frozen(self.a, (s, s), "a", self.name))
        object.__setattr__(self, "b", _frozen(self.b, (s,), "b", self.name))

    def __repr__(self):
        return f"RkTableau(name={self.name!r}, s={self.s})"


def newmark(beta: float, gamma: float, name: str | None = None) -> RknTableau:
    """Newmark(beta, gamma) written as a two-stage RKN method.

    Parameters outside ``beta >= 0``, ``0 <= gamma <= 1`` are accepted with a
    ``RuntimeWarning``.
    """
    beta = float(beta)
    gamma = float(gamma)
    if not (math.isfinite(beta) and math.isfinite(gamma)):
        raise TableauError(f"newmark parameters must be finite, got beta={beta}, gamma={gamma}")
    if beta < 0 or not 0 <= gamma <= 1:
        warnings.warn(
            f"Newmark parameters beta={beta}, gamma={gamma} outside beta>=0, 0<=gamma<=1",
            RuntimeWarning,
            stacklevel=2,
        )
    w = (1.0 - 2.0 * beta) / 2.0
    return RknTableau(
        name=name or f"newmark({beta:g},{gamma:g})",
        c=[0.0, 1.0],
        abar=[[0.0, 0.0], [w, beta]],
        bbar=[w, beta],
        b=[1.0 - gamma, gamma],
    )


def _nystrom4():
    return RknTableau(
        name="nystrom4",
        c=[0.0, 0.5, 1.0],
        abar=[[0.0, 0.0, 0.0], [1 / 8, 0.0, 0.0], [0.0, 0.5, 0.0]],
        bbar=[1 / 6, 1 / 3, 0.0],
        b=[1 / 6, 4 / 6, 1 / 6],
    )


def _sdirk3rkn():
    al = SDIRK_ALPHA
    return RknTableau(
        name="sdirk3rkn",
        c=[al, 1.0 - al],
        abar=[[al * al, 0.0], [2.0 * al - 4.0 * al * al, al * al]],
        bbar=[(1.0 - al) / 2.0, al / 2.0],
        b=[0.5, 0.5],
    )


RKN_CATALOG = {
    "nystrom4": _nystrom4,
    "sdirk3rkn": _sdirk3rkn,
    "central_difference": lambda: newmark(0.0, 0.5, name="central_difference"),
    "newmark_half": lambda: newmark(0.5, 0.5, name="newmark_half"),
    "trapezoid": lambda: newmark(0.25, 0.5, name="trapezoid"),
}

RK_CATALOG = {
    "explicit_euler": lambda: RkTableau("explicit_euler", c=[0.0], a=[[0.0]], b=[1.0]),
    "implicit_midpoint": lambda: RkTableau("implicit_midpoint", c=[0.5], a=[[0.5]], b=[1.0]),
    "trapezoid": lambda: RkTableau(
        "trapezoid", c=[0.0, 1.0], a=[[0.0, 0.0], [0.5, 0.5]], b=[0.5, 0.5]
    ),
    "sdirk3": lambda: RkTableau(
        "sdirk3",
        c=[SDIRK_ALPHA, 1.0 - SDIRK_ALPHA],
        a=[[SDIRK_ALPHA, 0.0], [1.0 - 2.0 * SDIRK_ALPHA, SDIRK_ALPHA]],
        b=[0.5, 0.5],
    ),
}


def builtin_rkn(name: str) -> RknTableau:
    try:
        return RKN_CATALOG[name]()
    except KeyError:
        raise CatalogError(name, RKN_CATALOG) from None


def builtin_rk(name: str) -> RkTableau:
    try:
        return RK_CATALOG[name]()
    except KeyError:
        raise CatalogError(name, RK_CATALOG) from None


def verify_rk_equivalence(rkn: RknTableau, rk: RkTableau, tol: float = 1e-12) -> bool:
    """Check that ``rkn`` is the Nystrom form of the Runge-Kutta method ``rk``.

    The conditions are ``abar = a @ a``, ``bbar = b @ a`` and equal abscissae,
    each to absolute tolerance ``tol`` in the max-norm.
    """
    if rkn.s != rk.s:
        raise TableauError(f"stage counts differ: {rkn.name} has {rkn.s}, {rk.name} has {rk.s}")
    err_a = np.max(np.abs(rkn.abar - rk.a @ rk.a))
    err_b = np.max(np.abs(rkn.bbar - rk.b @ rk.a))
    err_c = np.max(np.abs(rkn.c - rk.c))
    return bool(max(err_a, err_b, err_c) <= tol)


# --- tableau files ---------------------------------------------------------

_KEYS = ("name", "s", "c", "abar", "bbar", "b")


def _number(tok: str) -> float:
    try:
        return float(tok)
    except ValueError:
        pass
    try:
        return float(Fraction(tok))
    except (ValueError, ZeroDivisionError):
        raise TableauError(f"not a number: {tok!r}") from None


def parse_tableau(text: str) -> RknTableau:
    """Parse the plain-text tableau format.

    Keys are ``name``, ``s``, ``c``, ``abar``, ``bbar``, ``b``; each key is
    followed by its whitespace-separated values, which may continue over
    following lines until the next key. ``abar`` holds ``s*s`` numbers in
    row-major order. ``#`` starts a comment. Values may be decimals or
    fractions such as ``1/6``.
    """
    fields: dict[str, list[str]] = {}
    current = None
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        for tok in line.split():
            if tok in _KEYS:
                if tok in fields:
                    raise TableauError(f"duplicate key {tok!r}")
                current = tok
                fields[current] = []
            elif current is None:
                raise TableauError(f"value {tok!r} before any key")
            else:
                fields[current].append(tok)
    missing = [k for k in _KEYS if k not in fields]
    if missing:
        raise TableauError(f"missing keys: {', '.join(missing)}")
    if len(fields["name"]) != 1 or len(fields["s"]) != 1:
        raise TableauError("'name' and 's' take exactly one value")
    try:
        s = int(fields["s"][0])
    except ValueError:
        raise TableauError(f"s must be an integer, got {fields['s'][0]!r}") from None
    if s < 1:
        raise TableauError("s must be positive")
    vals = {k: [_number(t) for t in fields[k]] for k in ("c", "abar", "bbar", "b")}
    for k, n in (("c", s), ("abar", s * s), ("bbar", s), ("b", s)):
        if len(vals[k]) != n:
            raise TableauError(f"{k}: expected {n} values, got {len(vals[k])}")
    return RknTableau(
        name=fields["name"][0],
        c=vals["c"],
        abar=np.reshape(vals["abar"], (s, s)),
        bbar=vals["bbar"],
        b=vals["b"],
    )


def load_tableau(path) -> RknTableau:
    with open(path, encoding="utf-8") as fh:
        return parse_tableau(fh.read())


def resolve_method(spec: str) -> RknTableau:
    """Builtin name first, then a tableau file path."""
    if spec in RKN_CATALOG:
        return builtin_rkn(spec)
    if os.path.isfile(spec):
        return load_tableau(spec)
    raise CatalogError(spec, RKN_CATALOG)
