"""Toy corpus synthesis, annotated-page loading, and patch cropping.

The toy generator stands in for real annotated historical pages: procedural
glyphs laid out in text lines over textured paper, with per-page style
variation and exact character bounding boxes. All boxes use the half-open
convention [x0, x1) x [y0, y1).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np

from .glyphs import GlyphAlphabet, rasterize_strokes
from .images import load_image, luminance, save_image

logger = logging.getLogger("docrepair.corpus")

# Luminance below this counts as ink (used by patch filtering and degradations).
INK_THRESHOLD = 0.5

_STYLE_SEED = 0x57E1E


@dataclass(frozen=True)
class CharAnnotation:
    """One annotated character: half-open pixel bbox plus its alphabet label."""

    bbox: Tuple[int, int, int, int]  # (x0, y0, x1, y1)
    label: str

    def validate(self, width: int, height: int) -> None:
        x0, y0, x1, y1 = self.bbox
        if not (0 <= x0 < x1 <= width and 0 <= y0 < y1 <= height):
            raise ValueError(f"bbox {self.bbox} out of bounds for {width}x{height} patch")
        if not self.label:
            raise ValueError("annotation label is empty")


@dataclass
class PatchSample:
    """A fixed-size annotated document patch."""

    image: np.ndarray  # HxWx3 float in [0, 1]
    annotations: List[CharAnnotation]
    source_id: str
    seed: int


@dataclass
class ToyCorpusConfig:
    alphabet_size: int = 20
    glyph_styles: int = 4
    patch_size: int = 64
    pages: int = 500
    patches_per_page: int = 4
    background_palette: List[Tuple[float, float, float]] = field(
        default_factory=lambda: [(0.93, 0.89, 0.80), (0.90, 0.85, 0.72), (0.88, 0.86, 0.82)]
    )
    rows_range: Tuple[int, int] = (2, 5)  # inclusive
    cols_range: Tuple[int, int] = (3, 6)  # inclusive
    seed: int = 0

    def validate(self) -> None:
        if self.alphabet_size < 2:
            raise ValueError(f"alphabet_size must be >= 2, got {self.alphabet_size}")
        if self.patch_size < 32 or self.patch_size % 8 != 0:
            raise ValueError(f"patch_size must be >= 32 and divisible by 8, got {self.patch_size}")
        if self.pages < 1 or self.patches_per_page < 1:
            raise ValueError("pages and patches_per_page must be positive")
        if self.glyph_styles < 1:
            raise ValueError("glyph_styles must be positive")
        for lo, hi in (self.rows_range, self.cols_range):
            if lo < 1 or hi < lo:
                raise ValueError("rows/cols ranges must satisfy 1 <= lo <= hi")
        if not self.background_palette:
            raise ValueError("background_palette must be non-empty")


def _style_params(style_index: int) -> Tuple[float, float, float]:
    """(stroke width multiplier, shear, ink luminance) for one rendering style."""
    rng = np.random.default_rng([_STYLE_SEED, style_index])
    width_mult = float(rng.uniform(0.85, 1.35))
    shear = float(rng.uniform(-0.18, 0.18))
    ink_level = float(rng.uniform(0.08, 0.32))
    return width_mult, shear, ink_level


def _paper_background(
    rng: np.random.Generator, size: int, base: Tuple[float, float, float]
) -> np.ndarray:
    coarse_n = max(2, size // 8)
    coarse = rng.uniform(-0.025, 0.025, size=(coarse_n, coarse_n))
    # bilinear upsample of the coarse grid
    yi = np.linspace(0, coarse_n - 1, size)
    xi = np.linspace(0, coarse_n - 1, size)
    y0 = np.clip(yi.astype(int), 0, coarse_n - 2)
    x0 = np.clip(xi.astype(int), 0, coarse_n - 2)
    fy = (yi - y0)[:, None]
    fx = (xi - x0)[None, :]
    tex = (
        coarse[np.ix_(y0, x0)] * (1 - fy) * (1 - fx)
        + coarse[np.ix_(y0 + 1, x0)] * fy * (1 - fx)
        + coarse[np.ix_(y0, x0 + 1)] * (1 - fy) * fx
        + coarse[np.ix_(y0 + 1, x0 + 1)] * fy * fx
    )
    grain = rng.uniform(-0.012, 0.012, size=(size, size))
    img = np.asarray(base, dtype=np.float64)[None, None, :] + (tex + grain)[:, :, None]
    return np.clip(img, 0.0, 1.0)


def _render_patch(
    rng: np.random.Generator,
    alphabet: GlyphAlphabet,
    config: ToyCorpusConfig,
    style: Tuple[float, float, float],
    vertical: bool,
    base_color: Tuple[float, float, float],
) -> Tuple[np.ndarray, List[CharAnnotation]]:
    size = config.patch_size
    width_mult, shear, ink_level = style
    img = _paper_background(rng, size, base_color)

    rows = int(rng.integers(config.rows_range[0], config.rows_range[1] + 1))
    cols = int(rng.integers(config.cols_range[0], config.cols_range[1] + 1))
    if vertical:
        rows, cols = cols, rows  # vertical text lines: more cells per column

    margin = max(2, int(round(0.04 * size)))
    area = size - 2 * margin
    cell_h = area / rows
    cell_w = area / cols
    inner = 0.12  # fraction of the cell kept as whitespace around the glyph

    annotations: List[CharAnnotation] = []
    for r in range(rows):
        for c in range(cols):
            cy0 = margin + r * cell_h
            cx0 = margin + c * cell_w
            gx0 = int(round(cx0 + inner * cell_w))
            gy0 = int(round(cy0 + inner * cell_h))
            gx1 = int(round(cx0 + (1 - inner) * cell_w))
            gy1 = int(round(cy0 + (1 - inner) * cell_h))
            gx1 = min(gx1, size)
            gy1 = min(gy1, size)
            if gx1 - gx0 < 5 or gy1 - gy0 < 5:
                continue
            label = alphabet.labels[int(rng.integers(0, alphabet.size))]
            cov = rasterize_strokes(
                alphabet.strokes_of(alphabet.index_of(label)),
                gy1 - gy0,
                gx1 - gx0,
                pad_frac=0.1,
                rel_width=0.11 * width_mult,
                shear=shear,
            )
            ink = np.asarray(
                [
                    ink_level * float(rng.uniform(0.85, 1.15)),
                    ink_level * 0.9,
                    ink_level * 0.8,
                ]
            )
            ink = np.clip(ink, 0.02, 0.4)
            region = img[gy0:gy1, gx0:gx1]
            img[gy0:gy1, gx0:gx1] = region * (1 - cov[:, :, None]) + ink[None, None, :] * cov[:, :, None]
            annotations.append(CharAnnotation(bbox=(gx0, gy0, gx1, gy1), label=label))
    return np.clip(img, 0.0, 1.0).astype(np.float32), annotations


def generate_toy_corpus(config: ToyCorpusConfig) -> List[PatchSample]:
    """Generate ``pages * patches_per_page`` annotated patches, deterministically.

    Each page fixes a rendering style (stroke width, slant, ink tone, text
    direction, paper color); patches within the page vary layout and content.
    """
    config.validate()
    alphabet = GlyphAlphabet(config.alphabet_size)
    root = np.random.SeedSequence(config.seed)
    page_seqs = root.spawn(config.pages)

    samples: List[PatchSample] = []
    for p, page_seq in enumerate(page_seqs):
        page_rng = np.random.default_rng(page_seq)
        style = _style_params(int(page_rng.integers(0, config.glyph_styles)))
        vertical = bool(page_rng.integers(0, 2))
        base_color = config.background_palette[int(page_rng.integers(0, len(config.background_palette)))]
        patch_seqs = page_seq.spawn(config.patches_per_page)
        for q, patch_seq in enumerate(patch_seqs):
            seed = int(patch_seq.generate_state(1, dtype=np.uint64)[0])
            rng = np.random.default_rng(patch_seq)
            image, annotations = _render_patch(rng, alphabet, config, style, vertical, base_color)
            if not annotations:
                # tiny layouts can drop all cells; reroll with denser grid
                image, annotations = _render_patch(rng, alphabet, config, style, False, base_color)
            samples.append(
                PatchSample(
                    image=image,
                    annotations=annotations,
                    source_id=f"page{p:05d}/patch{q}",
                    seed=seed,
                )
            )
    return samples


def filter_patch(patch: PatchSample, min_chars: int, min_ink_fraction: float) -> bool:
    """True iff the patch has enough characters and enough ink coverage."""
    if len(patch.annotations) < min_chars:
        return False
    ink_frac = float(np.mean(luminance(patch.image) < INK_THRESHOLD))
    return ink_frac >= min_ink_fraction


def crop_patches(
    page: np.ndarray,
    annotations: Sequence[CharAnnotation],
    patch_size: int,
    stride: int,
    min_chars: int = 1,
    min_ink_fraction: float = 0.0,
    source_id: str = "page",
) -> List[PatchSample]:
    """Crop fixed-size windows from a page in row-major sliding order.

    A character is assigned to a window iff its box is fully contained in it
    (coordinates re-based to the window); partially clipped characters are
    dropped. Windows that fail the patch filter are not emitted.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    h, w = page.shape[:2]
    if patch_size > min(h, w):
        logger.warning(
            "page %s (%dx%d) smaller than patch size %d; no patches", source_id, w, h, patch_size
        )
        return []
    out: List[PatchSample] = []
    window_index = 0
    for wy in range(0, h - patch_size + 1, stride):
        for wx in range(0, w - patch_size + 1, stride):
            contained = [
                CharAnnotation(
                    bbox=(a.bbox[0] - wx, a.bbox[1] - wy, a.bbox[2] - wx, a.bbox[3] - wy),
                    label=a.label,
                )
                for a in annotations
                if a.bbox[0] >= wx
                and a.bbox[1] >= wy
                and a.bbox[2] <= wx + patch_size
                and a.bbox[3] <= wy + patch_size
            ]
            seed = int(
                np.random.SeedSequence(
                    [abs(hash(source_id)) % (2**32), window_index]
                ).generate_state(1, dtype=np.uint64)[0]
            )
            patch = PatchSample(
                image=np.ascontiguousarray(page[wy : wy + patch_size, wx : wx + patch_size]),
                annotations=contained,
                source_id=f"{source_id}#w{window_index}",
                seed=seed,
            )
            if filter_patch(patch, min_chars, min_ink_fraction):
                out.append(patch)
            window_index += 1
    return out


def write_corpus(samples: Sequence[PatchSample], root: str | Path) -> None:
    """Write corpus/{images,annotations}/ with one PNG + JSON per patch."""
    root = Path(root)
    (root / "images").mkdir(parents=True, exist_ok=True)
    (root / "annotations").mkdir(parents=True, exist_ok=True)
    for i, s in enumerate(samples):
        name = f"{i:06d}"
        save_image(root / "images" / f"{name}.png", s.image)
        record = {
            "image": f"images/{name}.png",
            "source_id": s.source_id,
            "seed": s.seed,
            "chars": [{"bbox": list(a.bbox), "label": a.label} for a in s.annotations],
        }
        (root / "annotations" / f"{name}.json").write_text(json.dumps(record))


def load_annotated_pages(
    path: str | Path, fmt: str = "json"
) -> List[Tuple[np.ndarray, List[CharAnnotation]]]:
    """Load pages and their character annotations from the corpus layout.

    Expects ``path/annotations/*.json`` records pointing at images relative to
    ``path``. Boxes partially outside the page are clipped (with a warning);
    boxes fully outside are rejected per record.
    """
    if fmt != "json":
        raise ValueError(f"unsupported annotation format {fmt!r}")
    root = Path(path)
    ann_dir = root / "annotations"
    if not ann_dir.is_dir():
        raise FileNotFoundError(f"no annotations directory under {root}")
    pages: List[Tuple[np.ndarray, List[CharAnnotation]]] = []
    for ann_path in sorted(ann_dir.glob("*.json")):
        try:
            record = json.loads(ann_path.read_text())
        except json.JSONDecodeError as e:
            raise ValueError(f"{ann_path.name}: invalid JSON: {e}") from e
        image_rel = record.get("image")
        if not image_rel:
            raise ValueError(f"{ann_path.name}: missing 'image' field")
        image = load_image(root / image_rel)
        h, w = image.shape[:2]
        annotations: List[CharAnnotation] = []
        for idx, rec in enumerate(record.get("chars", [])):
            try:
                x0, y0, x1, y1 = (int(v) for v in rec["bbox"])
                label = str(rec["label"])
            except (KeyError, TypeError, ValueError) as e:
                raise ValueError(f"{ann_path.name}: chars[{idx}]: malformed record ({e})") from e
            if x1 <= x0 or y1 <= y0 or not label:
                raise ValueError(
                    f"{ann_path.name}: chars[{idx}]: invalid bbox {x0, y0, x1, y1} or empty label"
                )
            if x1 <= 0 or y1 <= 0 or x0 >= w or y0 >= h:
                logger.warning("%s: chars[%d]: box fully outside page, rejected", ann_path.name, idx)
                continue
            cx0, cy0, cx1, cy1 = max(0, x0), max(0, y0), min(w, x1), min(h, y1)
            if (cx0, cy0, cx1, cy1) != (x0, y0, x1, y1):
                logger.warning("%s: chars[%d]: box clipped to page bounds", ann_path.name, idx)
            annotations.append(CharAnnotation(bbox=(cx0, cy0, cx1, cy1), label=label))
        if not annotations:
            logger.warning("%s: page has zero annotations", ann_path.name)
        pages.append((image, annotations))
    return pages
