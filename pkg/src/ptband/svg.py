"""Minimal self-contained SVG line plots (no plotting library needed)."""

from xml.sax.saxutils import escape

import numpy as np

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]


def _fmt(x):
    return f"{x:.4g}"


def line_plot(path, x, series, title="", xlabel="", ylabel="", width=640, height=400):
    """Write one panel with a polyline per entry of ``series`` (``{label: y}``)."""
    x = np.asarray(x, dtype=float)
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    finite = np.concatenate([y[np.isfinite(y)] for y in ys.values()] or [np.zeros(1)])
    ymin, ymax = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    if ymax - ymin < 1e-12:
        ymin, ymax = ymin - 0.5, ymax + 0.5
    xmin, xmax = float(x.min()), float(x.max())
    if xmax - xmin < 1e-300:
        xmax = xmin + 1.0
    left, right, top, bottom = 70, 20, 40, 50
    pw, ph = width - left - right, height - top - bottom

    def sx(v):
        return left + (v - xmin) / (xmax - xmin) * pw

    def sy(v):
        return top + (ymax - v) / (ymax - ymin) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{width / 2}" y="20" text-anchor="middle">{escape(title)}</text>',
        f'<text x="{left + pw / 2}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="15" y="{top + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 15 {top + ph / 2})">{escape(ylabel)}</text>',
    ]
    for frac in np.linspace(0.0, 1.0, 5):
        xv = xmin + frac * (xmax - xmin)
        yv = ymin + frac * (ymax - ymin)
        out.append(f'<text x="{sx(xv):.1f}" y="{top + ph + 16}" text-anchor="middle">{_fmt(xv)}</text>')
        out.append(f'<text x="{left - 6}" y="{sy(yv) + 4:.1f}" text-anchor="end">{_fmt(yv)}</text>')
    for i, (label, y) in enumerate(ys.items()):
        color = _COLORS[i % len(_COLORS)]
        ok = np.isfinite(y)
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x[ok], y[ok]))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        out.append(f'<text x="{left + pw - 6}" y="{top + 16 + 14 * i}" text-anchor="end" '
                   f'fill="{color}">{escape(label)}</text>')
    out.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")


def stacked_profiles(path, sites, profiles, labels, reference=None, title="", width=640,
                     height=520):
    """Site profiles offset vertically, one row per snapshot, optional dashed reference."""
    profiles = np.asarray(profiles, dtype=float)
    n = len(profiles)
    scale = float(np.max(profiles)) or 1.0
    series = {}
    for i in range(n):
        series[labels[i]] = profiles[i] / scale + (n - 1 - i)
    if reference is not None:
        ref = np.asarray(reference, dtype=float)
        for i in range(n):
            series[labels[i] + " (h_e)"] = ref[i] / scale + (n - 1 - i)
    line_plot(path, sites, series, title=title, xlabel="site", ylabel="|psi|^2 (offset)",
              width=width, height=height)
