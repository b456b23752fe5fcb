"""Procedural glyph alphabet.

Glyphs are synthetic characters drawn as polyline strokes on a unit square.
Each codepoint maps to a fixed stroke set derived from a registry seed that is
independent of any corpus seed, so the canonical rendering of a label is
stable everywhere it is used (content images, previews, classifier targets).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

# Lattice the stroke endpoints snap to. A coarse lattice keeps glyphs crisp
# and makes accidental near-duplicates between codepoints unlikely.
_LATTICE = 5
_REGISTRY_SEED = 0x9D0C5EED


def default_labels(n: int) -> List[str]:
    """Single-character labels for the first ``n`` codepoints.

    Uses A..Z, then a..z, then CJK ideographs so labels stay single glyphs
    for any practical alphabet size.
    """
    labels = []
    for k in range(n):
        if k < 26:
            labels.append(chr(ord("A") + k))
        elif k < 52:
            labels.append(chr(ord("a") + k - 26))
        else:
            labels.append(chr(0x4E00 + k - 52))
    return labels


Stroke = Tuple[Tuple[float, float], ...]  # polyline in unit-square coords


def _sample_strokes(rng: np.random.Generator) -> List[Stroke]:
    """Draw a random stroke set on the lattice: 3-5 polylines, 2-3 points each."""
    n_strokes = int(rng.integers(3, 6))
    lattice = np.linspace(0.08, 0.92, _LATTICE)
    strokes: List[Stroke] = []
    for _ in range(n_strokes):
        n_pts = int(rng.integers(2, 4))
        pts: List[Tuple[float, float]] = []
        while len(pts) < n_pts:
            p = (float(rng.choice(lattice)), float(rng.choice(lattice)))
            if pts and abs(p[0] - pts[-1][0]) < 1e-9 and abs(p[1] - pts[-1][1]) < 1e-9:
                continue
            pts.append(p)
        strokes.append(tuple(pts))
    return strokes


def _stroke_signature(strokes: Sequence[Stroke]) -> Tuple:
    return tuple(sorted(tuple(np.round(np.asarray(s), 3).ravel()) for s in strokes))


@dataclass
class GlyphAlphabet:
    """Registry mapping codepoints/labels to drawing procedures.

    The stroke sets are derived deterministically from ``registry_seed`` and the
    codepoint index, never from a corpus seed.
    """

    size: int
    registry_seed: int = _REGISTRY_SEED
    labels: List[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.size < 2:
            raise ValueError(f"alphabet size must be >= 2, got {self.size}")
        if not self.labels:
            self.labels = default_labels(self.size)
        if len(self.labels) != self.size:
            raise ValueError("labels length must equal alphabet size")
        self._label_to_index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._label_to_index) != self.size:
            raise ValueError("labels must be unique")
        self._strokes = self._build_strokes()
        self._render_cache: Dict[Tuple[int, int, int], np.ndarray] = {}

    def _build_strokes(self) -> List[List[Stroke]]:
        strokes: List[List[Stroke]] = []
        seen = set()
        for k in range(self.size):
            rng = np.random.default_rng([self.registry_seed, k])
            s = _sample_strokes(rng)
            # extremely unlikely collision between codepoints; resample if hit
            while _stroke_signature(s) in seen:
                s = _sample_strokes(rng)
            seen.add(_stroke_signature(s))
            strokes.append(s)
        return strokes

    def __contains__(self, label: str) -> bool:
        return label in self._label_to_index

    def index_of(self, label: str) -> int:
        try:
            return self._label_to_index[label]
        except KeyError:
            raise KeyError(f"label {label!r} is not in the alphabet") from None

    def strokes_of(self, index: int) -> List[Stroke]:
        return self._strokes[index]

    def render(self, label: str, height: int, width: int, pad_frac: float = 0.1) -> np.ndarray:
        """Canonical ink-coverage map for ``label``, shape (height, width) in [0, 1].

        1.0 is full ink. The glyph is scaled to fit the box with ``pad_frac``
        padding on every side. Deterministic and cached per (label, h, w).
        """
        idx = self.index_of(label)
        key = (idx, int(height), int(width))
        cached = self._render_cache.get(key)
        if cached is not None:
            return cached
        out = rasterize_strokes(
            self._strokes[idx],
            height,
            width,
            pad_frac=pad_frac,
            rel_width=0.11,
        )
        self._render_cache[key] = out
        return out


def rasterize_strokes(
    strokes: Sequence[Stroke],
    height: int,
    width: int,
    pad_frac: float = 0.1,
    rel_width: float = 0.11,
    shear: float = 0.0,
) -> np.ndarray:
    """Rasterize polyline strokes into an (height, width) ink-coverage map.

    Coverage is computed from the distance to each segment with ~1 px of
    anti-aliasing; overlapping strokes combine by max. ``shear`` slants the
    glyph horizontally (style variation; 0 gives the canonical upright form).
    """
    h, w = int(height), int(width)
    if h < 1 or w < 1:
        raise ValueError("glyph box must be at least 1x1")
    ys, xs = np.mgrid[0:h, 0:w]
    px = xs + 0.5
    py = ys + 0.5
    pad_x = pad_frac * w
    pad_y = pad_frac * h
    sx = w - 2.0 * pad_x
    sy = h - 2.0 * pad_y
    half = 0.5 * max(rel_width * min(h, w), 0.9)
    cov = np.zeros((h, w), dtype=np.float64)
    for stroke in strokes:
        for (u0, v0), (u1, v1) in zip(stroke[:-1], stroke[1:]):
            # unit coords -> pixel coords (v is the vertical axis), with shear
            ax = pad_x + (u0 + shear * (1.0 - v0)) * sx
            ay = pad_y + v0 * sy
            bx = pad_x + (u1 + shear * (1.0 - v1)) * sx
            by = pad_y + v1 * sy
            dx, dy = bx - ax, by - ay
            denom = dx * dx + dy * dy
            if denom < 1e-12:
                dist = np.hypot(px - ax, py - ay)
            else:
                t = np.clip(((px - ax) * dx + (py - ay) * dy) / denom, 0.0, 1.0)
                dist = np.hypot(px - (ax + t * dx), py - (ay + t * dy))
            cov = np.maximum(cov, np.clip(half + 0.5 - dist, 0.0, 1.0))
    return cov
