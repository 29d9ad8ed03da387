"""Plain SVG 1.1 figures: complex-plane spectra and state profiles.

Output is built from strings so it is deterministic and needs no plotting
library.
"""
from __future__ import annotations

import numpy as np

from .classify import LABELS, Classification

WIDTH, HEIGHT = 640, 480
MARGIN = 60
MAX_LOOP_VERTICES = 4000

COLORS = {"skin": "#222222", "defect": "#1f6fd1", "hybrid": "#d1261f",
          "edge": "#e08a00", "extended": "#8a8a8a"}
LOOP_COLOR = "#d1261f"


def _num(x: float) -> str:
    s = f"{x:.2f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Frame:
    """Affine map from data coordinates to the plot box (y axis upward)."""

    def __init__(self, xs, ys):
        xs, ys = np.asarray(xs, float), np.asarray(ys, float)
        x0, x1 = (xs.min(), xs.max()) if xs.size else (0.0, 1.0)
        y0, y1 = (ys.min(), ys.max()) if ys.size else (0.0, 1.0)
        px = 0.05 * (x1 - x0) or 0.5
        py = 0.05 * (y1 - y0) or 0.5
        self.x0, self.x1, self.y0, self.y1 = x0 - px, x1 + px, y0 - py, y1 + py

    def x(self, v):
        return MARGIN + (np.asarray(v) - self.x0) / (self.x1 - self.x0) * (WIDTH - 2 * MARGIN)

    def y(self, v):
        return HEIGHT - MARGIN - (np.asarray(v) - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2 * MARGIN)


def _ticks(lo, hi, n=5):
    step = (hi - lo) / n
    mag = 10 ** np.floor(np.log10(step))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= step), default=step)
    start = np.ceil(lo / step) * step
    return [t for t in np.arange(start, hi + 1e-12, step)]


def _axes(f: _Frame, xlabel: str, ylabel: str) -> list[str]:
    left, right = MARGIN, WIDTH - MARGIN
    top, bottom = MARGIN, HEIGHT - MARGIN
    out = ['<g id="axes" stroke="#000" stroke-width="1" fill="none">',
           f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}"/>']
    labels = ['<g id="ticks" font-family="sans-serif" font-size="11" fill="#000">']
    for t in _ticks(f.x0, f.x1):
        px = _num(float(f.x(t)))
        out.append(f'<line x1="{px}" y1="{bottom}" x2="{px}" y2="{bottom + 5}"/>')
        labels.append(f'<text x="{px}" y="{bottom + 18}" text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(f.y0, f.y1):
        py = _num(float(f.y(t)))
        out.append(f'<line x1="{left - 5}" y1="{py}" x2="{left}" y2="{py}"/>')
        labels.append(f'<text x="{left - 8}" y="{py}" text-anchor="end" dy="4">{t:.3g}</text>')
    out.append("</g>")
    labels.append("</g>")
    cx, cy = (left + right) / 2, (top + bottom) / 2
    labels += [
        f'<text x="{_num(cx)}" y="{HEIGHT - 15}" font-family="sans-serif" font-size="14" '
        f'text-anchor="middle">{xlabel}</text>',
        f'<text x="18" y="{_num(cy)}" font-family="sans-serif" font-size="14" text-anchor="middle" '
        f'transform="rotate(-90 18 {_num(cy)})">{ylabel}</text>',
    ]
    return out + labels


def _document(body: list[str]) -> str:
    head = ('<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">')
    return "\n".join([head, f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#fff"/>', *body, "</svg>"]) + "\n"


def _thin(verts: np.ndarray, limit: int) -> np.ndarray:
    if len(verts) <= limit:
        return verts
    idx = np.unique(np.linspace(0, len(verts) - 1, limit).round().astype(int))
    return verts[idx]


def spectrum_svg(result: Classification) -> str:
    """OBC eigenvalues coloured by label over the closed loops of the twist sweep."""
    loops = result.loop.loops()
    ev = result.spectrum.eigenvalues
    allz = np.concatenate([ev, *loops]) if loops else ev
    f = _Frame(allz.real, allz.imag)
    body = _axes(f, "Re E", "Im E")
    body.append(f'<g id="loops" fill="none" stroke="{LOOP_COLOR}" stroke-width="1">')
    per_loop = max(8, MAX_LOOP_VERTICES // max(1, len(loops)))
    for i, verts in enumerate(loops):
        v = _thin(verts, per_loop)
        xs, ys = f.x(v.real), f.y(v.imag)
        d = "M" + " L".join(f"{_num(a)} {_num(b)}" for a, b in zip(xs, ys)) + " Z"
        body.append(f'<path class="loop" id="loop-{i}" d="{d}"/>')
    body.append("</g>")
    body.append('<g id="states" stroke="none">')
    for r in result.records:
        body.append(f'<circle class="state {r.label}" cx="{_num(float(f.x(r.energy.real)))}" '
                    f'cy="{_num(float(f.y(r.energy.imag)))}" r="3" fill="{COLORS[r.label]}"/>')
    body.append("</g>")
    body.append('<g id="legend" font-family="sans-serif" font-size="11">')
    for i, lab in enumerate(LABELS):
        y = MARGIN + 14 + 14 * i
        body.append(f'<circle cx="{WIDTH - MARGIN - 70}" cy="{y - 4}" r="3" fill="{COLORS[lab]}"/>'
                    f'<text x="{WIDTH - MARGIN - 62}" y="{y}">{lab}</text>')
    body.append("</g>")
    return _document(body)


def profiles_svg(result: Classification, indices) -> str:
    """``|psi_n|`` against site index for the selected OBC states.

    An empty selection gives axes and an empty ``profiles`` group.
    """
    indices = list(indices)
    vecs = result.spectrum.eigenvectors
    n = vecs.shape[0]
    amps = [np.abs(vecs[:, i]) / np.linalg.norm(vecs[:, i]) for i in indices]
    top = max((float(a.max()) for a in amps), default=1.0)
    f = _Frame([1, n], [0.0, top])
    body = _axes(f, "site index", "|psi_n|")
    body.append('<g id="profiles" fill="none" stroke-width="1.5">')
    sites = np.arange(1, n + 1)
    for i, a in zip(indices, amps):
        r = result.records[i]
        pts = " ".join(f"{_num(x)},{_num(y)}" for x, y in zip(f.x(sites), f.y(a)))
        body.append(f'<polyline class="profile {r.label}" data-index="{i}" '
                    f'data-energy="{r.energy.real:.6g}{r.energy.imag:+.6g}i" '
                    f'stroke="{COLORS[r.label]}" points="{pts}"/>')
    body.append("</g>")
    return _document(body)
