"""Hand-emitted SVG plots: line/point/text primitives only, fixed float
formatting so identical inputs always produce identical bytes."""
from __future__ import annotations

import math

_W, _H = 640, 480
_ML, _MR, _MT, _MB = 70, 20, 40, 50


def _fmt(v: float) -> str:
    return f"{v:.2f}"


class _Canvas:
    def __init__(self, title: str):
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}">',
            f'<rect width="{_W}" height="{_H}" fill="white"/>',
            f'<text x="{_W // 2}" y="24" text-anchor="middle" font-size="16" '
            f'font-family="sans-serif">{title}</text>',
        ]

    def line(self, x1, y1, x2, y2, color="black", width=1.0, dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{color}" stroke-width="{width}"{d}/>'
        )

    def point(self, x, y, color="black", r=4.0):
        self.parts.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{r}" fill="{color}"/>'
        )

    def text(self, x, y, s, size=12, anchor="middle", color="black"):
        self.parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" text-anchor="{anchor}" '
            f'font-size="{size}" font-family="sans-serif" fill="{color}">{s}</text>'
        )

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"])


def _mapper(lo, hi, out_lo, out_hi):
    span = hi - lo if hi > lo else 1.0

    def f(v):
        return out_lo + (v - lo) / span * (out_hi - out_lo)

    return f


def sweep_plot(rows, fit, predicted_slope, title: str) -> str:
    """Log-log mixing-time plot: points, OLS line, predicted-slope guide,
    and a banner with |slope_fit - slope_pred|.

    ``rows`` are (kappa, T, censored) triples; censored points are drawn
    hollow-red and excluded from the fit shown.
    """
    pts = [(math.log10(k), math.log10(t)) for k, t, _ in rows]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    pad_x = 0.08 * (max(xs) - min(xs) or 1.0)
    pad_y = 0.08 * (max(ys) - min(ys) or 1.0)
    fx = _mapper(min(xs) - pad_x, max(xs) + pad_x, _ML, _W - _MR)
    fy = _mapper(min(ys) - pad_y, max(ys) + pad_y, _H - _MB, _MT)
    cv = _Canvas(title)
    # axes
    cv.line(_ML, _H - _MB, _W - _MR, _H - _MB)
    cv.line(_ML, _MT, _ML, _H - _MB)
    cv.text((_ML + _W - _MR) / 2, _H - 14, "log10 kappa")
    cv.text(16, (_MT + _H - _MB) / 2, "log10 T", anchor="middle")
    for xv in sorted({round(v) for v in xs}):
        cv.line(fx(xv), _H - _MB, fx(xv), _H - _MB + 5)
        cv.text(fx(xv), _H - _MB + 18, f"{xv:g}", size=11)
    for yv in sorted({round(v) for v in ys}):
        cv.line(_ML - 5, fy(yv), _ML, fy(yv))
        cv.text(_ML - 10, fy(yv) + 4, f"{yv:g}", size=11, anchor="end")
    # OLS line in natural logs: log10 T = (slope * ln k + intercept)/ln 10
    ln10 = math.log(10.0)
    x0, x1 = min(xs), max(xs)
    for xa, xb, color, dash, label in (
        (x0, x1, "steelblue", None, f"fit slope {fit.slope:+.3f}"),
        (x0, x1, "gray", "6,4", f"predicted {predicted_slope:+.3f}"),
    ):
        if color == "steelblue":
            ya = (fit.slope * xa * ln10 + fit.intercept) / ln10
            yb = (fit.slope * xb * ln10 + fit.intercept) / ln10
        else:
            # guide with predicted slope through the data centroid
            cx = sum(xs) / len(xs)
            cy = sum(ys) / len(ys)
            ya = cy + predicted_slope * (xa - cx)
            yb = cy + predicted_slope * (xb - cx)
        cv.line(fx(xa), fy(ya), fx(xb), fy(yb), color=color, width=1.5, dash=dash)
    cv.text(_W - _MR - 4, _MT + 16, f"fit {fit.slope:+.4f}", size=12, anchor="end", color="steelblue")
    cv.text(_W - _MR - 4, _MT + 32, f"pred {predicted_slope:+.4f}", size=12, anchor="end", color="gray")
    cv.text(
        _W - _MR - 4, _MT + 48,
        f"|slope_fit - slope_pred| = {abs(fit.slope - predicted_slope):.4f}",
        size=12, anchor="end",
    )
    for (k, t, censored) in rows:
        x, y = fx(math.log10(k)), fy(math.log10(t))
        if censored:
            cv.parts.append(
                f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="4.0" fill="none" stroke="red"/>'
            )
        else:
            cv.point(x, y, color="black")
    return cv.render()
