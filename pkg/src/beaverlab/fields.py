"""Runtime fields: a grey ramp with red for the maximum, packed on a Hilbert curve.

Machine ``i`` lands on cell ``curve_point(order, i)`` of a ``2**order``
square grid, so machines close in the enumeration stay close on the image.
Non-halting machines are pure white; grid cells past the last machine are a
light background grey so the two are never confused.

Coordinates are ``(x, y)`` with ``x`` the column and ``y`` the row, row 0 at
the top of the written image.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

WHITE = (255, 255, 255)
RED = (255, 0, 0)
BACKGROUND = (245, 245, 245)
NONHALTING = 0

RGB = tuple[int, int, int]


def color_of(t: int | None, S: int) -> RGB:
    """Colour for halting time ``t`` (``None`` or 0 for non-halting) under maximum ``S``."""
    if S < 1:
        raise ValueError("S must be positive")
    if t is None or t == NONHALTING:
        return WHITE
    if not 1 <= t <= S:
        raise ValueError(f"t={t} outside 1..{S}")
    if t == S:
        return RED
    span = max(S - 2, 1)
    # round half up, exactly
    g = 230 - (400 * (t - 1) + span) // (2 * span)
    return (g, g, g)


def palette(S: int) -> np.ndarray:
    """Lookup table indexed by time: row 0 is non-halting, row ``t`` is ``color_of(t, S)``."""
    return np.array([color_of(t, S) for t in range(S + 1)], dtype=np.uint8)


def curve_point(order: int, d: int) -> tuple[int, int]:
    """Position of index ``d`` on the Hilbert curve filling a ``2**order`` grid."""
    if order < 0:
        raise ValueError("order must be non-negative")
    if not 0 <= d < 4**order:
        raise ValueError(f"index {d} outside 0..{4**order - 1}")
    x = y = 0
    s = 1
    while s < 1 << order:
        rx = 1 & (d // 2)
        ry = 1 & (d ^ rx)
        if ry == 0:
            if rx == 1:
                x, y = s - 1 - x, s - 1 - y
            x, y = y, x
        x += s * rx
        y += s * ry
        d //= 4
        s *= 2
    return x, y


def curve_points(order: int, d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`curve_point` over an integer array."""
    d = np.asarray(d, dtype=np.int64).copy()
    if d.size and (d.min() < 0 or d.max() >= 4**order):
        raise ValueError("index outside the grid")
    x = np.zeros_like(d)
    y = np.zeros_like(d)
    s = 1
    while s < 1 << order:
        rx = 1 & (d // 2)
        ry = 1 & (d ^ rx)
        flip = (ry == 0) & (rx == 1)
        x = np.where(flip, s - 1 - x, x)
        y = np.where(flip, s - 1 - y, y)
        swap = ry == 0
        x, y = np.where(swap, y, x), np.where(swap, x, y)
        x += s * rx
        y += s * ry
        d //= 4
        s *= 2
    return x, y


@dataclass(frozen=True)
class FieldImage:
    """Row-major RGB pixels; ``order`` is None for direct (non-curve) layouts."""

    pixels: np.ndarray
    order: int | None = None

    def __post_init__(self) -> None:
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3 or self.pixels.dtype != np.uint8:
            raise ValueError("pixels must be an (h, w, 3) uint8 array")
        if self.order is not None and self.pixels.shape[:2] != (1 << self.order, 1 << self.order):
            raise ValueError("curve images must be 2**order square")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def count(self, rgb: RGB) -> int:
        return int(np.all(self.pixels == np.array(rgb, dtype=np.uint8), axis=2).sum())

    def histogram(self) -> dict[RGB, int]:
        colors, counts = np.unique(self.pixels.reshape(-1, 3), axis=0, return_counts=True)
        return {tuple(int(v) for v in c): int(k) for c, k in zip(colors, counts)}

    def crop(self, x: int, y: int, width: int, height: int) -> "FieldImage":
        if width < 1 or height < 1 or x < 0 or y < 0 or x + width > self.width or y + height > self.height:
            raise ValueError(f"crop {width}x{height}+{x}+{y} outside {self.width}x{self.height}")
        return FieldImage(self.pixels[y : y + height, x : x + width].copy())

    def to_ppm(self) -> bytes:
        header = f"P6\n{self.width} {self.height}\n255\n".encode("ascii")
        return header + np.ascontiguousarray(self.pixels).tobytes()

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_ppm())


def read_ppm(data: bytes) -> FieldImage:
    """Parse the binary PPM written by :meth:`FieldImage.to_ppm` (no comments)."""
    parts = data.split(b"\n", 3)
    if len(parts) != 4 or parts[0] != b"P6" or parts[2] != b"255":
        raise ValueError("not a P6/255 PPM")
    width, height = map(int, parts[1].split())
    body = np.frombuffer(parts[3], dtype=np.uint8)
    if body.size != width * height * 3:
        raise ValueError("pixel data length does not match header")
    return FieldImage(body.reshape(height, width, 3).copy())


def min_order(count: int) -> int:
    """Smallest order whose grid holds ``count`` cells."""
    order = 0
    while 4**order < count:
        order += 1
    return order


def render_field(runtimes: Sequence[int] | np.ndarray, S: int, order: int | None = None) -> FieldImage:
    """Colour index-ordered runtimes (0 = non-halting) onto a Hilbert grid."""
    times = np.asarray(runtimes, dtype=np.int64)
    if order is None:
        order = min_order(len(times))
    if len(times) > 4**order:
        raise ValueError(f"{len(times)} cells do not fit a {1 << order}x{1 << order} grid")
    if times.size and (times.min() < 0 or times.max() > S):
        raise ValueError(f"runtimes must lie in 0..{S}")
    side = 1 << order
    pixels = np.empty((side, side, 3), dtype=np.uint8)
    pixels[:] = BACKGROUND
    x, y = curve_points(order, np.arange(len(times)))
    pixels[y, x] = palette(S)[times]
    return FieldImage(pixels, order)


def render_matrix(times: Sequence[Sequence[int]] | np.ndarray, S: int) -> FieldImage:
    """Direct layout: ``times[r][c]`` becomes pixel (c, r)."""
    grid = np.asarray(times, dtype=np.int64)
    if grid.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if grid.size and (grid.min() < 0 or grid.max() > S):
        raise ValueError(f"times must lie in 0..{S}")
    return FieldImage(palette(S)[grid])


def render_spectrum_legend(S: int) -> FieldImage:
    """One row: ``t = 1..S`` then non-halting."""
    if S < 2:
        raise ValueError("legend needs S >= 2")
    row = list(range(1, S + 1)) + [NONHALTING]
    return render_matrix([row], S)


def luminance(rgb: RGB) -> float:
    r, g, b = rgb
    return 0.2126 * r + 0.7152 * g + 0.0722 * b


def field_filename(n: int, order: int) -> str:
    return f"field_{n}x2_order{order}.ppm"
