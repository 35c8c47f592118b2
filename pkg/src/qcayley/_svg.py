"""Minimal SVG line plots for scan output (no plotting dependency)."""

from __future__ import annotations

import math

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]

_W, _H = 900, 620
_ML, _MR, _MT, _MB = 70, 20, 30, 45
_PANEL_GAP = 55


def _ticks(lo: float, hi: float, n: int = 6):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    out = []
    t = first
    while t <= hi + 1e-12 * step:
        out.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return out


class _Panel:
    def __init__(self, y_top: float, height: float, xlo, xhi, ylo, yhi):
        self.y_top = y_top
        self.height = height
        self.xlo, self.xhi = xlo, xhi
        self.ylo, self.yhi = ylo, yhi

    def px(self, x):
        return _ML + (x - self.xlo) / (self.xhi - self.xlo) * (_W - _ML - _MR)

    def py(self, y):
        frac = (y - self.ylo) / (self.yhi - self.ylo)
        return self.y_top + (1.0 - frac) * self.height


def _polyline_segments(panel, xs, ys):
    segs, cur = [], []
    for x, y in zip(xs, ys):
        if y is None or not math.isfinite(y):
            if len(cur) > 1:
                segs.append(cur)
            cur = []
            continue
        yy = min(max(y, panel.ylo), panel.yhi)
        cur.append((panel.px(x), panel.py(yy)))
        if yy != y and len(cur) > 1:  # clipping break keeps spikes visible
            pass
    if len(cur) > 1:
        segs.append(cur)
    return segs


def _panel_svg(parts, panel, title, ylabel, series, bands, xlabel=None):
    x0, x1 = panel.px(panel.xlo), panel.px(panel.xhi)
    y0, y1 = panel.y_top, panel.y_top + panel.height
    for (blo, bhi) in bands:
        blo = max(blo, panel.xlo)
        bhi = min(bhi, panel.xhi)
        if bhi > blo:
            parts.append(
                f'<rect x="{panel.px(blo):.2f}" y="{y0:.2f}" '
                f'width="{panel.px(bhi) - panel.px(blo):.2f}" '
                f'height="{panel.height:.2f}" fill="#cccccc" opacity="0.45"/>')
    parts.append(f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{x1 - x0:.2f}" '
                 f'height="{panel.height:.2f}" fill="none" stroke="#333"/>')
    for t in _ticks(panel.xlo, panel.xhi):
        px = panel.px(t)
        parts.append(f'<line x1="{px:.2f}" y1="{y1:.2f}" x2="{px:.2f}" '
                     f'y2="{y1 + 4:.2f}" stroke="#333"/>')
        parts.append(f'<text x="{px:.2f}" y="{y1 + 16:.2f}" font-size="11" '
                     f'text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(panel.ylo, panel.yhi, 5):
        py = panel.py(t)
        parts.append(f'<line x1="{x0 - 4:.2f}" y1="{py:.2f}" x2="{x0:.2f}" '
                     f'y2="{py:.2f}" stroke="#333"/>')
        parts.append(f'<text x="{x0 - 7:.2f}" y="{py + 4:.2f}" font-size="11" '
                     f'text-anchor="end">{t:.4g}</text>')
    for k, (name, xs, ys) in enumerate(series):
        color = _COLORS[k % len(_COLORS)]
        for seg in _polyline_segments(panel, xs, ys):
            pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in seg)
            parts.append(f'<polyline points="{pts}" fill="none" '
                         f'stroke="{color}" stroke-width="1.2"/>')
        parts.append(f'<text x="{x1 - 8 - 90 * k:.2f}" y="{y0 + 14:.2f}" '
                     f'font-size="11" fill="{color}" text-anchor="end">'
                     f'{name}</text>')
    parts.append(f'<text x="{(x0 + x1) / 2:.2f}" y="{y0 - 8:.2f}" '
                 f'font-size="13" text-anchor="middle">{title}</text>')
    parts.append(f'<text x="16" y="{(y0 + y1) / 2:.2f}" font-size="12" '
                 f'transform="rotate(-90 16 {(y0 + y1) / 2:.2f})" '
                 f'text-anchor="middle">{ylabel}</text>')
    if xlabel:
        parts.append(f'<text x="{(x0 + x1) / 2:.2f}" y="{y1 + 34:.2f}" '
                     f'font-size="12" text-anchor="middle">{xlabel}</text>')


def render_scan_svg(samples, bands, abscissa: str, title: str) -> str:
    """Two stacked panels: multiplier arguments and log10 magnitudes."""
    import cmath

    sqrt_mode = abscissa == "sqrt_sigma"
    xs = [math.sqrt(s.sigma) if sqrt_mode else s.sigma for s in samples]
    M = max(len(s.mu_plus) for s in samples)
    xlabel = "sqrt(sigma)" if sqrt_mode else "sigma"

    arg_series, mag_series = [], []
    mags_all = []
    for m in range(M):
        args, mags = [], []
        for s in samples:
            if m >= len(s.mu_plus) or not cmath.isfinite(s.mu_plus[m]):
                args.append(None)
                mags.append(None)
                continue
            v = s.mu_plus[m]
            args.append(cmath.phase(v))
            mag = math.log10(abs(v)) if abs(v) > 0 else None
            mags.append(mag)
            if mag is not None:
                mags_all.append(mag)
        arg_series.append((f"arg mu_{m + 1}", xs, args))
        mag_series.append((f"log10|mu_{m + 1}|", xs, mags))

    band_x = [(math.sqrt(b.lower), math.sqrt(b.upper)) if sqrt_mode
              else (b.lower, b.upper) for b in bands]
    xlo, xhi = min(xs), max(xs)
    mlo = min(mags_all) if mags_all else -1.0
    mhi = max(mags_all) if mags_all else 0.0
    pad = 0.05 * (mhi - mlo) or 0.1

    panel_h = (_H - _MT - _MB - _PANEL_GAP) / 2
    p1 = _Panel(_MT, panel_h, xlo, xhi, -math.pi * 1.05, math.pi * 1.05)
    p2 = _Panel(_MT + panel_h + _PANEL_GAP, panel_h, xlo, xhi,
                mlo - pad, mhi + pad)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" '
             f'height="{_H}" viewBox="0 0 {_W} {_H}">',
             f'<rect width="{_W}" height="{_H}" fill="white"/>']
    _panel_svg(parts, p1, title, "argument", arg_series, band_x)
    _panel_svg(parts, p2, "", "log10 magnitude", mag_series, band_x,
               xlabel=xlabel)
    parts.append("</svg>")
    return "\n".join(parts)
