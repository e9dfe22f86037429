"""Map ingestion and preprocessing.

Grayscale imagery comes in as PGM (P2 ASCII or P5 binary), passes through an
edge-extraction + erosion pipeline, and leaves as an occupancy grid shared by
the planner, raycaster, and collision checks.  The module also owns the
equirectangular geodetic <-> local-metric conversion used to place GPS
waypoints on the grid.

All functions here are pure: they never mutate their inputs and hold no
module-level state.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np
from scipy import ndimage

from .errors import BadMagic, MaxvalUnsupported, TruncatedData

EARTH_RADIUS_M = 6_371_000.0

# 5x5 Gaussian, sigma 1.4 — the default smoothing stage ahead of the Sobel
# gradients.  Built once at import.
_BLUR_SIGMA_DEFAULT = 1.4


@dataclass(frozen=True)
class GrayImage:
    """Row-major 8-bit grayscale raster."""

    width: int
    height: int
    pixels: np.ndarray  # shape (height, width), uint8

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be >= 1")
        if self.pixels.shape != (self.height, self.width):
            raise ValueError("pixel buffer does not match declared dimensions")


class CellState(IntEnum):
    FREE = 0
    OCCUPIED = 1
    UNKNOWN = 2


@dataclass(frozen=True)
class Pose2D:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0


@dataclass(frozen=True)
class OccupancyGrid:
    """Rasterized world: cell (col, row) spans metric space at `resolution`.

    `origin` is the local-frame pose of cell (0, 0)'s lower corner; cell
    centers sit at origin + (col + 0.5, row + 0.5) * resolution.
    """

    width: int
    height: int
    resolution: float
    origin: Pose2D = field(default_factory=Pose2D)
    cells: np.ndarray = None  # shape (height, width), uint8 CellState values

    def __post_init__(self):
        if self.resolution <= 0:
            raise ValueError("resolution must be > 0")
        if self.cells is None:
            object.__setattr__(
                self, "cells", np.zeros((self.height, self.width), dtype=np.uint8)
            )
        if self.cells.shape != (self.height, self.width):
            raise ValueError("cell buffer does not match declared dimensions")

    # -- coordinate helpers -------------------------------------------------

    def world_to_cell(self, x: float, y: float) -> tuple[int, int]:
        col = int(math.floor((x - self.origin.x) / self.resolution))
        row = int(math.floor((y - self.origin.y) / self.resolution))
        return col, row

    def cell_to_world(self, col: int, row: int) -> tuple[float, float]:
        x = self.origin.x + (col + 0.5) * self.resolution
        y = self.origin.y + (row + 0.5) * self.resolution
        return x, y

    def in_bounds(self, col: int, row: int) -> bool:
        return 0 <= col < self.width and 0 <= row < self.height

    def is_blocked(self, col: int, row: int) -> bool:
        """Occupied or Unknown (the planner treats Unknown conservatively)."""
        if not (0 <= col < self.width and 0 <= row < self.height):
            return True
        return self.cells[row, col] != 0  # CellState.FREE; hot path, no enum

    def occupied_mask(self) -> np.ndarray:
        """Boolean (h, w) mask of cells that block motion (Occupied|Unknown)."""
        return self.cells != 0

    # -- serialization --------------------------------------------------------

    def to_json(self) -> str:
        flat = self.cells.reshape(-1)
        runs: list[list[int]] = []
        if flat.size:
            change = np.flatnonzero(np.diff(flat)) + 1
            starts = np.concatenate(([0], change))
            ends = np.concatenate((change, [flat.size]))
            runs = [[int(flat[s]), int(e - s)] for s, e in zip(starts, ends)]
        return json.dumps(
            {
                "width": self.width,
                "height": self.height,
                "resolution": self.resolution,
                "origin": {"x": self.origin.x, "y": self.origin.y, "theta": self.origin.theta},
                "cells": runs,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "OccupancyGrid":
        doc = json.loads(text)
        runs = doc["cells"]
        total = doc["width"] * doc["height"]
        flat = np.empty(total, dtype=np.uint8)
        pos = 0
        for value, count in runs:
            flat[pos : pos + count] = value
            pos += count
        if pos != total:
            raise ValueError("run-length data does not cover the grid")
        origin = doc.get("origin", {})
        return cls(
            width=doc["width"],
            height=doc["height"],
            resolution=doc["resolution"],
            origin=Pose2D(
                origin.get("x", 0.0), origin.get("y", 0.0), origin.get("theta", 0.0)
            ),
            cells=flat.reshape(doc["height"], doc["width"]),
        )


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self):
        if abs(self.lat) > 90.0 or abs(self.lon) > 180.0:
            raise ValueError("geodetic coordinates out of range")


@dataclass(frozen=True)
class LocalFrame:
    """Equirectangular tangent frame anchored at `origin`.

    Adequate for mission footprints well under the ~2 km scale where Earth
    curvature would start to matter.
    """

    origin: GeoPoint
    meters_per_deg_lat: float
    meters_per_deg_lon: float

    @classmethod
    def at(cls, origin: GeoPoint) -> "LocalFrame":
        per_deg = EARTH_RADIUS_M * math.pi / 180.0
        m_lon = per_deg * math.cos(math.radians(origin.lat))
        return cls(origin=origin, meters_per_deg_lat=per_deg, meters_per_deg_lon=m_lon)

    def __post_init__(self):
        if self.meters_per_deg_lat <= 0 or self.meters_per_deg_lon <= 0:
            raise ValueError("conversion factors must be positive")


def geo_to_local(frame: LocalFrame, p: GeoPoint) -> tuple[float, float]:
    """East/north offset in meters of `p` from the frame origin."""
    x = (p.lon - frame.origin.lon) * frame.meters_per_deg_lon
    y = (p.lat - frame.origin.lat) * frame.meters_per_deg_lat
    return x, y


def local_to_geo(frame: LocalFrame, x: float, y: float) -> GeoPoint:
    return GeoPoint(
        lat=frame.origin.lat + y / frame.meters_per_deg_lat,
        lon=frame.origin.lon + x / frame.meters_per_deg_lon,
    )


# ---------------------------------------------------------------------------
# PGM codec
# ---------------------------------------------------------------------------


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Pull `count` whitespace-separated tokens, skipping '#' comments.

    Returns the tokens and the offset one byte past the final separator.
    """
    tokens: list[bytes] = []
    i = 0
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i < n and data[i] == ord("#"):
            while i < n and data[i] not in (0x0A, 0x0D):
                i += 1
            continue
        start = i
        while i < n and not data[i : i + 1].isspace() and data[i] != ord("#"):
            i += 1
        if start == i:
            raise TruncatedData("header ended early")
        tokens.append(data[start:i])
    # single whitespace byte separates the header from a binary raster
    if i < n and data[i : i + 1].isspace():
        i += 1
    return tokens, i


def load_pgm(data: bytes) -> GrayImage:
    """Decode a P2 (ASCII) or P5 (binary) PGM payload.

    Raises BadMagic for other magics, MaxvalUnsupported for maxval > 255,
    and TruncatedData when the raster is short or malformed.
    """
    if len(data) < 2:
        raise BadMagic("payload too short for a magic number")
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise BadMagic(f"unsupported magic {magic!r}")
    try:
        tokens, offset = _header_tokens(data[2:], 3)
    except TruncatedData:
        raise
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise TruncatedData("non-numeric header field") from exc
    if width < 1 or height < 1:
        raise TruncatedData("degenerate dimensions")
    if maxval > 255:
        raise MaxvalUnsupported(f"maxval {maxval} > 255")
    if maxval < 1:
        raise TruncatedData("maxval must be >= 1")
    body = data[2 + offset :]
    total = width * height
    if magic == b"P5":
        if len(body) < total:
            raise TruncatedData(f"raster has {len(body)} of {total} bytes")
        pixels = np.frombuffer(body[:total], dtype=np.uint8).reshape(height, width)
    else:
        try:
            values, _ = _header_tokens(body, total)
        except TruncatedData as exc:
            raise TruncatedData("ASCII raster ended early") from exc
        try:
            arr = np.array([int(v) for v in values], dtype=np.int64)
        except ValueError as exc:
            raise TruncatedData("non-numeric sample") from exc
        if arr.min() < 0 or arr.max() > maxval:
            raise TruncatedData("sample out of range")
        pixels = arr.astype(np.uint8).reshape(height, width)
    return GrayImage(width=width, height=height, pixels=pixels.copy())


def write_pgm(img: GrayImage, binary: bool = True) -> bytes:
    """Encode an image; `load_pgm(write_pgm(img))` is the identity."""
    header = f"{'P5' if binary else 'P2'}\n{img.width} {img.height}\n255\n".encode()
    if binary:
        return header + img.pixels.astype(np.uint8).tobytes()
    rows = "\n".join(" ".join(str(int(v)) for v in row) for row in img.pixels)
    return header + rows.encode() + b"\n"


# ---------------------------------------------------------------------------
# Edge extraction (Gaussian blur -> Sobel -> non-maximum suppression ->
# hysteresis) and morphology
# ---------------------------------------------------------------------------


def _gaussian_kernel(sigma: float, radius: int = 2) -> np.ndarray:
    ax = np.arange(-radius, radius + 1, dtype=float)
    xx, yy = np.meshgrid(ax, ax)
    k = np.exp(-(xx**2 + yy**2) / (2.0 * sigma**2))
    return k / k.sum()

_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=float)
_SOBEL_Y = np.array([[-1, -2, -1], [0, 0, 0], [1, 2, 1]], dtype=float)


def extract_edges(
    img: GrayImage, low: float, high: float, blur_sigma: float = _BLUR_SIGMA_DEFAULT
) -> np.ndarray:
    """Binary edge mask of `img` with hysteresis thresholds (`low`, `high`).

    Thresholds are on the 0-255 scale and compared against the gradient
    magnitude normalized so the strongest edge in the image reads 255.
    A constant image therefore yields an empty mask for any thresholds.
    """
    if not (0 <= low <= high <= 255):
        raise ValueError("thresholds must satisfy 0 <= low <= high <= 255")
    gray = img.pixels.astype(float)
    smooth = ndimage.convolve(gray, _gaussian_kernel(blur_sigma), mode="nearest")
    gx = ndimage.convolve(smooth, _SOBEL_X, mode="nearest")
    gy = ndimage.convolve(smooth, _SOBEL_Y, mode="nearest")
    mag = np.hypot(gx, gy)
    peak = mag.max()
    if peak <= 0.0:
        return np.zeros_like(mag, dtype=bool)
    mag = mag * (255.0 / peak)

    # Quantize gradient direction to 0/45/90/135 degrees and keep local maxima
    # along it.  Ties break toward the earlier pixel so a symmetric two-pixel
    # ridge thins to a single line.
    angle = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    padded = np.pad(mag, 1, mode="constant")

    def shifted(dr: int, dc: int) -> np.ndarray:
        return padded[1 + dr : 1 + dr + mag.shape[0], 1 + dc : 1 + dc + mag.shape[1]]

    sector = np.zeros(mag.shape, dtype=int)
    sector[(angle >= 22.5) & (angle < 67.5)] = 1
    sector[(angle >= 67.5) & (angle < 112.5)] = 2
    sector[(angle >= 112.5) & (angle < 157.5)] = 3
    ahead = [shifted(0, 1), shifted(1, 1), shifted(1, 0), shifted(1, -1)]
    behind = [shifted(0, -1), shifted(-1, -1), shifted(-1, 0), shifted(-1, 1)]
    keep = np.zeros(mag.shape, dtype=bool)
    for s in range(4):
        sel = sector == s
        keep |= sel & (mag > ahead[s]) & (mag >= behind[s])
    nms = np.where(keep, mag, 0.0)

    strong = nms > high
    weak = nms > low
    if not strong.any():
        return np.zeros_like(strong)
    # hysteresis: keep weak components that touch a strong pixel
    labels, n = ndimage.label(weak, structure=np.ones((3, 3), dtype=int))
    keep_ids = np.unique(labels[strong])
    keep_ids = keep_ids[keep_ids != 0]
    return np.isin(labels, keep_ids)


def erode(mask: np.ndarray, radius: int) -> np.ndarray:
    """Binary erosion with a square (2*radius+1) structuring element.

    Pixels outside the mask count as unset, so set regions shrink away from
    the border too.  Radius 0 is the identity.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    mask = np.asarray(mask, dtype=bool)
    if radius == 0:
        return mask.copy()
    side = 2 * radius + 1
    return ndimage.binary_erosion(
        mask, structure=np.ones((side, side), dtype=bool), border_value=0
    )


def to_grid(
    mask: np.ndarray, resolution: float, origin: Pose2D = Pose2D()
) -> OccupancyGrid:
    """Set mask pixels become Occupied cells, all others Free."""
    if resolution <= 0:
        raise ValueError("resolution must be > 0")
    mask = np.asarray(mask, dtype=bool)
    cells = np.where(mask, np.uint8(CellState.OCCUPIED), np.uint8(CellState.FREE))
    h, w = mask.shape
    return OccupancyGrid(width=w, height=h, resolution=resolution, origin=origin, cells=cells)
