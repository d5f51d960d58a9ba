"""Minimal SVG output for charts and amplitude plots."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 480
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 40, 55


def _num(x):
    return f"{x:.2f}"


def _ticks(lo, hi, n=5):
    return np.linspace(lo, hi, n)


class _Frame:
    def __init__(self, xlim, ylim):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        if self.x1 == self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 == self.y0:
            self.y1 = self.y0 + 1.0
        self.pw = WIDTH - LEFT - RIGHT
        self.ph = HEIGHT - TOP - BOTTOM

    def px(self, x):
        return LEFT + (x - self.x0) / (self.x1 - self.x0) * self.pw

    def py(self, y):
        return TOP + (1.0 - (y - self.y0) / (self.y1 - self.y0)) * self.ph


def _axes(fr: _Frame, title, xlabel, ylabel):
    out = [
        f'<rect x="{LEFT}" y="{TOP}" width="{fr.pw}" height="{fr.ph}" fill="none" stroke="black"/>',
        f'<text x="{WIDTH / 2:.1f}" y="{TOP - 14}" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<text x="{LEFT + fr.pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle" font-size="13">{escape(xlabel)}</text>',
        f'<text x="18" y="{TOP + fr.ph / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 18 {TOP + fr.ph / 2:.1f})">{escape(ylabel)}</text>',
    ]
    for t in _ticks(fr.x0, fr.x1):
        x = fr.px(t)
        y = TOP + fr.ph
        out.append(f'<line x1="{_num(x)}" y1="{y}" x2="{_num(x)}" y2="{y + 5}" stroke="black"/>')
        out.append(f'<text x="{_num(x)}" y="{y + 18}" text-anchor="middle" font-size="11">{t:.4g}</text>')
    for t in _ticks(fr.y0, fr.y1):
        y = fr.py(t)
        out.append(f'<line x1="{LEFT - 5}" y1="{_num(y)}" x2="{LEFT}" y2="{_num(y)}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{_num(y + 4)}" text-anchor="end" font-size="11">{t:.4g}</text>')
    return out


def _document(body):
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', *body, "</svg>"]) + "\n"


def chart_svg(result, title: str) -> str:
    """Unstable cells of a :class:`ChartResult` as filled rectangles."""
    spec = result.spec
    hg, eg = spec.h_grid, spec.eps_grid
    dh = (hg[1] - hg[0]) if hg.size > 1 else (spec.h_max - spec.h_min)
    de = (eg[1] - eg[0]) if eg.size > 1 else 1.0
    fr = _Frame((hg[0] - dh / 2, hg[-1] + dh / 2), (eg[0] - de / 2, eg[-1] + de / 2))
    w = fr.pw / hg.size
    hgt = fr.ph / eg.size
    body = []
    for j, i in zip(*np.nonzero(result.unstable)):
        x = fr.px(hg[i] - dh / 2)
        y = fr.py(eg[j] + de / 2)
        body.append(f'<rect x="{_num(x)}" y="{_num(y)}" width="{_num(w)}" height="{_num(hgt)}" fill="#b22222"/>')
    body.extend(_axes(fr, title, "h (mean step size)", "eps (step oscillation amplitude)"))
    return _document(body)


def amplitude_svg(times, amplitudes, title: str) -> str:
    """``log10`` amplitude against time as a polyline."""
    t = np.asarray(times, dtype=float)
    with np.errstate(divide="ignore"):
        la = np.log10(np.asarray(amplitudes, dtype=float))
    finite = np.isfinite(la)
    t, la = t[finite], la[finite]
    lo, hi = (float(la.min()), float(la.max())) if la.size else (0.0, 1.0)
    pad = 0.05 * (hi - lo) if hi > lo else 0.5
    fr = _Frame((float(t[0]), float(t[-1])) if t.size else (0.0, 1.0), (lo - pad, hi + pad))
    pts = " ".join(f"{_num(fr.px(a))},{_num(fr.py(b))}" for a, b in zip(t, la))
    body = [f'<polyline points="{pts}" fill="none" stroke="#1f4e9c" stroke-width="1"/>']
    body.extend(_axes(fr, title, "t", "log10 amplitude"))
    return _document(body)
