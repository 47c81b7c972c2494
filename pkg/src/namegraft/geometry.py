"""Bounding-box arithmetic and attention-grid geometry.

Boxes are integer pixel rectangles [x, x+w) x [y, y+h). The attention grid
divides an image into g x g equal cells enumerated row-major, matching a
flattened conv feature map; attention weights over those cells are mapped
onto pixel boxes by fractional cell overlap rather than binary membership,
so coarse grids do not add avoidable quantization error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from namegraft.errors import GeometryError

__all__ = [
    "BoundingBox",
    "Rect",
    "AttentionMap",
    "ROW_SUM_TOLERANCE",
    "iou",
    "nms",
    "cell_rect",
    "attention_mass_in_box",
]

# Attention rows are softmax outputs; they must sum to 1 within this slack.
ROW_SUM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned integer pixel box with top-left corner and extents."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.x < 0 or self.y < 0:
            raise GeometryError(f"box origin must be non-negative, got ({self.x}, {self.y})")
        if self.w < 1 or self.h < 1:
            raise GeometryError(f"box extents must be >= 1, got {self.w}x{self.h}")

    @property
    def x2(self) -> int:
        return self.x + self.w

    @property
    def y2(self) -> int:
        return self.y + self.h

    @property
    def area(self) -> int:
        return self.w * self.h

    def fits_within(self, image_width: int, image_height: int) -> bool:
        return self.x2 <= image_width and self.y2 <= image_height


@dataclass(frozen=True)
class Rect:
    """Real-valued rectangle used for grid cells; same (x, y, w, h) layout."""

    x: float
    y: float
    w: float
    h: float

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    @property
    def area(self) -> float:
        return self.w * self.h


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union; 0.0 for disjoint boxes."""
    iw = min(a.x2, b.x2) - max(a.x, b.x)
    ih = min(a.y2, b.y2) - max(a.y, b.y)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return inter / (a.area + b.area - inter)


def nms(boxes: Sequence[tuple[BoundingBox, float]],
        iou_threshold: float) -> list[tuple[BoundingBox, float]]:
    """Greedy non-maximum suppression.

    Keeps the highest-scoring box, discards remaining boxes overlapping it
    with IoU strictly above the threshold, and repeats. Score ties keep the
    earlier input entry. The result is sorted by descending score.
    """
    if not 0.0 < iou_threshold < 1.0:
        raise GeometryError(f"iou_threshold must be in (0, 1), got {iou_threshold}")
    for _, score in boxes:
        if not math.isfinite(score):
            raise GeometryError(f"scores must be finite, got {score}")

    order = sorted(range(len(boxes)), key=lambda i: (-boxes[i][1], i))
    kept: list[int] = []
    for i in order:
        if all(iou(boxes[i][0], boxes[k][0]) <= iou_threshold for k in kept):
            kept.append(i)
    return [boxes[i] for i in kept]


def cell_rect(cell_index: int, grid_size: int,
              image_width: float, image_height: float) -> Rect:
    """Pixel rectangle of a row-major grid cell; cells tile the image exactly."""
    if grid_size < 1:
        raise GeometryError(f"grid_size must be >= 1, got {grid_size}")
    if cell_index < 0 or cell_index >= grid_size * grid_size:
        raise GeometryError(
            f"cell_index {cell_index} outside grid of {grid_size * grid_size} cells")
    if image_width <= 0 or image_height <= 0:
        raise GeometryError(
            f"image dims must be positive, got {image_width}x{image_height}")
    row, col = divmod(cell_index, grid_size)
    cell_w = image_width / grid_size
    cell_h = image_height / grid_size
    return Rect(col * cell_w, row * cell_h, cell_w, cell_h)


@dataclass(frozen=True)
class AttentionMap:
    """Per-token attention over a g x g grid: one row-stochastic row per
    generated caption token, cells enumerated row-major."""

    rows: tuple[tuple[float, ...], ...]
    grid_size: int

    def __post_init__(self):
        if self.grid_size < 1:
            raise GeometryError(f"grid_size must be >= 1, got {self.grid_size}")
        cells = self.grid_size * self.grid_size
        for t, row in enumerate(self.rows):
            if len(row) != cells:
                raise GeometryError(
                    f"attention row {t} has {len(row)} cells, expected {cells}")
            total = 0.0
            for weight in row:
                if not math.isfinite(weight) or weight < 0:
                    raise GeometryError(
                        f"attention row {t} has invalid weight {weight!r}")
                total += weight
            if abs(total - 1.0) > ROW_SUM_TOLERANCE:
                raise GeometryError(f"attention row {t} sums to {total!r}, not 1")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[float]], grid_size: int) -> "AttentionMap":
        return cls(tuple(tuple(float(w) for w in row) for row in rows), grid_size)

    @property
    def token_count(self) -> int:
        return len(self.rows)


def _overlap_fraction(cell: Rect, box: BoundingBox) -> float:
    """Fraction of the cell's area covered by the box."""
    iw = min(cell.x2, box.x2) - max(cell.x, box.x)
    ih = min(cell.y2, box.y2) - max(cell.y, box.y)
    if iw <= 0 or ih <= 0:
        return 0.0
    return (iw * ih) / cell.area


def attention_mass_in_box(attention: AttentionMap, token_indices: Iterable[int],
                          box: BoundingBox, image_width: float,
                          image_height: float) -> float:
    """Mean attention mass the given token rows place inside a pixel box.

    Each cell contributes its weight scaled by the fraction of the cell
    overlapping the box, so the whole image always yields 1.0 per row.
    """
    indices = sorted(set(token_indices))
    if not indices:
        raise GeometryError("no tokens in chunk span")
    if indices[0] < 0 or indices[-1] >= attention.token_count:
        raise GeometryError(
            f"token indices {indices[0]}..{indices[-1]} outside "
            f"{attention.token_count} attention rows")

    cells = attention.grid_size * attention.grid_size
    fractions = [
        _overlap_fraction(cell_rect(i, attention.grid_size, image_width, image_height), box)
        for i in range(cells)
    ]
    total = 0.0
    for t in indices:
        row = attention.rows[t]
        total += sum(w * f for w, f in zip(row, fractions))
    return total / len(indices)
