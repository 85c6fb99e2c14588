"""Single-band raster grids and the GIS operations built on them.

Grids are georeferenced in a projected CRS (coordinates and cellsize in
meters), stored row-major with the first row northernmost. Cells equal to
the grid's nodata sentinel are missing for every operation and never turn
into finite values.

File format is the ESRI-style ASCII grid: six header lines (ncols, nrows,
xllcorner, yllcorner, cellsize, nodata_value), then nrows lines of ncols
whitespace-separated numbers. Keys are case-insensitive on read; the writer
emits canonical lowercase keys with a single space and shortest round-trip
number formatting, so write-then-read is the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence

import numpy as np
from scipy import ndimage

from . import geometry
from .geometry import Polygon

DEFAULT_NODATA = -9999.0

_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value")
# Accepted spellings on read; canonical form is plain lowercase.
_HEADER_ALIASES = {"nodata": "nodata_value"}


class GridFormatError(ValueError):
    """Malformed ASCII grid document."""


class GridAlignmentError(ValueError):
    """Operation inputs do not share georeferencing."""


class ReclassTableError(ValueError):
    """Invalid reclassification table."""


def format_number(v: float) -> str:
    """Shortest decimal that round-trips to the same double; integral values lose the dot."""
    f = float(v)
    if math.isfinite(f) and f == int(f) and abs(f) < 1e16:
        return str(int(f))
    return repr(f)


@dataclass(frozen=True, eq=False)
class Grid:
    """Georeferenced single-band raster; values array is read-only after construction."""

    ncols: int
    nrows: int
    xllcorner: float
    yllcorner: float
    cellsize: float
    nodata_value: float
    values: np.ndarray

    def __post_init__(self):
        if self.ncols <= 0 or self.nrows <= 0:
            raise ValueError(f"grid dimensions must be positive, got {self.ncols}x{self.nrows}")
        if not self.cellsize > 0:
            raise ValueError(f"cellsize must be > 0, got {self.cellsize}")
        if not math.isfinite(self.nodata_value):
            raise ValueError("nodata_value must be finite")
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.size != self.ncols * self.nrows:
            raise ValueError(
                f"value count {arr.size} does not match {self.nrows} rows x {self.ncols} cols"
            )
        arr = arr.reshape(self.nrows, self.ncols).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return (
            self.ncols == other.ncols
            and self.nrows == other.nrows
            and self.xllcorner == other.xllcorner
            and self.yllcorner == other.yllcorner
            and self.cellsize == other.cellsize
            and self.nodata_value == other.nodata_value
            and np.array_equal(self.values, other.values)
        )

    @property
    def valid(self) -> np.ndarray:
        """Boolean mask of non-nodata cells."""
        return self.values != self.nodata_value

    def with_values(self, values: np.ndarray, nodata_value: float | None = None) -> "Grid":
        """New grid with the same georeferencing and the given cell values."""
        return Grid(
            ncols=self.ncols,
            nrows=self.nrows,
            xllcorner=self.xllcorner,
            yllcorner=self.yllcorner,
            cellsize=self.cellsize,
            nodata_value=self.nodata_value if nodata_value is None else nodata_value,
            values=values,
        )

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        """Map coordinates of the cell center; row 0 is the northernmost row."""
        x = self.xllcorner + (col + 0.5) * self.cellsize
        y = self.yllcorner + (self.nrows - row - 0.5) * self.cellsize
        return x, y

    def same_georeferencing(self, other: "Grid", tol: float = 1e-9) -> bool:
        return (
            self.ncols == other.ncols
            and self.nrows == other.nrows
            and abs(self.xllcorner - other.xllcorner) <= tol
            and abs(self.yllcorner - other.yllcorner) <= tol
            and abs(self.cellsize - other.cellsize) <= tol
        )


def require_aligned(*grids: Grid, what: str = "grids") -> None:
    first = grids[0]
    for g in grids[1:]:
        if not first.same_georeferencing(g):
            raise GridAlignmentError(
                f"{what} are not aligned: "
                f"{first.ncols}x{first.nrows}@({first.xllcorner},{first.yllcorner},{first.cellsize}) vs "
                f"{g.ncols}x{g.nrows}@({g.xllcorner},{g.yllcorner},{g.cellsize})"
            )


# ---------------------------------------------------------------------------
# ASCII grid IO


def read_ascii_grid(source: str | bytes | IO) -> Grid:
    """Parse an ESRI-style ASCII grid from text, bytes, or a file object."""
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")

    lines = text.splitlines()
    header: dict[str, float] = {}
    data_start = None
    for lineno, line in enumerate(lines, start=1):
        tokens = line.split()
        if not tokens:
            continue
        key = tokens[0].lower()
        key = _HEADER_ALIASES.get(key, key)
        if key in _HEADER_KEYS:
            if key in header:
                raise GridFormatError(f"line {lineno}: duplicate header key '{tokens[0]}'")
            if len(tokens) != 2:
                raise GridFormatError(f"line {lineno}: header '{tokens[0]}' needs exactly one value")
            try:
                header[key] = float(tokens[1])
            except ValueError:
                raise GridFormatError(
                    f"line {lineno}: non-numeric header value '{tokens[1]}'"
                ) from None
        else:
            data_start = lineno
            break
    missing = [k for k in _HEADER_KEYS if k not in header]
    if missing:
        raise GridFormatError(f"missing header key(s): {', '.join(missing)}")

    ncols = int(header["ncols"])
    nrows = int(header["nrows"])
    if header["ncols"] != ncols or header["nrows"] != nrows:
        raise GridFormatError("ncols and nrows must be integers")

    flat: list[float] = []
    if data_start is not None:
        for lineno in range(data_start, len(lines) + 1):
            tokens = lines[lineno - 1].split()
            for tok in tokens:
                try:
                    flat.append(float(tok))
                except ValueError:
                    raise GridFormatError(f"line {lineno}: non-numeric token '{tok}'") from None
    expected = ncols * nrows
    if len(flat) != expected:
        raise GridFormatError(f"expected {expected} values, found {len(flat)}")

    return Grid(
        ncols=ncols,
        nrows=nrows,
        xllcorner=header["xllcorner"],
        yllcorner=header["yllcorner"],
        cellsize=header["cellsize"],
        nodata_value=header["nodata_value"],
        values=np.array(flat, dtype=np.float64),
    )


def write_ascii_grid(grid: Grid) -> str:
    """Canonical text form; read(write(g)) reproduces g exactly."""
    out = [
        f"ncols {grid.ncols}",
        f"nrows {grid.nrows}",
        f"xllcorner {format_number(grid.xllcorner)}",
        f"yllcorner {format_number(grid.yllcorner)}",
        f"cellsize {format_number(grid.cellsize)}",
        f"nodata_value {format_number(grid.nodata_value)}",
    ]
    for row in grid.values:
        out.append(" ".join(format_number(v) for v in row))
    return "\n".join(out) + "\n"


def load_ascii_grid(path) -> Grid:
    with open(path, "r", encoding="utf-8") as fh:
        return read_ascii_grid(fh)


def save_ascii_grid(path, grid: Grid) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(write_ascii_grid(grid))


# ---------------------------------------------------------------------------
# Reclassification


@dataclass(frozen=True)
class ReclassTable:
    """Maps cell values to outputs, either by [lower, upper) range or by class.

    Exactly one of `ranges` and `categories` is set. Unmatched valid cells get
    `default_output`; None means nodata.
    """

    ranges: tuple[tuple[float, float, float], ...] | None = None
    categories: Mapping[float, float] | None = None
    default_output: float | None = None

    def __post_init__(self):
        if (self.ranges is None) == (self.categories is None):
            raise ReclassTableError("table needs exactly one of ranges or categories")
        if self.ranges is not None:
            rs = tuple((float(a), float(b), float(c)) for a, b, c in self.ranges)
            for lo, hi, _ in rs:
                if not lo < hi:
                    raise ReclassTableError(f"empty range [{lo}, {hi})")
            for (_, hi_prev, _), (lo, _, _) in zip(rs, rs[1:]):
                if lo < hi_prev:
                    raise ReclassTableError(
                        f"ranges overlap or are unsorted at boundary {hi_prev}/{lo}"
                    )
            object.__setattr__(self, "ranges", rs)
        else:
            object.__setattr__(
                self, "categories", {float(k): float(v) for k, v in self.categories.items()}
            )

    def outputs(self) -> list[float]:
        if self.ranges is not None:
            outs = [out for _, _, out in self.ranges]
        else:
            outs = list(self.categories.values())
        if self.default_output is not None:
            outs.append(float(self.default_output))
        return outs

    @staticmethod
    def identity(classes: Iterable[float]) -> "ReclassTable":
        return ReclassTable(categories={float(c): float(c) for c in classes})


def reclassify(grid: Grid, table: ReclassTable) -> Grid:
    """Map every valid cell through the table; nodata cells stay nodata."""
    vals = grid.values
    valid = grid.valid
    default = grid.nodata_value if table.default_output is None else float(table.default_output)
    out = np.full_like(vals, grid.nodata_value)
    out[valid] = default
    if table.ranges is not None:
        for lo, hi, res in table.ranges:
            sel = valid & (vals >= lo) & (vals < hi)
            out[sel] = res
    else:
        for cls, res in table.categories.items():
            sel = valid & (vals == cls)
            out[sel] = res
    return grid.with_values(out)


# ---------------------------------------------------------------------------
# Terrain derivatives (Horn 3x3 kernel)


def _horn_gradients(dem: Grid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eastward and northward surface gradients on interior cells.

    Returns (gx, gy, ok) shaped like the full grid; ok marks interior cells
    whose whole 3x3 window is valid. gy is positive where elevation rises
    northward.
    """
    z = dem.values
    valid = dem.valid
    gx = np.zeros_like(z)
    gy = np.zeros_like(z)
    ok = np.zeros(z.shape, dtype=bool)
    if dem.nrows < 3 or dem.ncols < 3:
        return gx, gy, ok

    nw, n, ne = z[:-2, :-2], z[:-2, 1:-1], z[:-2, 2:]
    w, c, e = z[1:-1, :-2], z[1:-1, 1:-1], z[1:-1, 2:]
    sw, s, se = z[2:, :-2], z[2:, 1:-1], z[2:, 2:]
    window_ok = (
        valid[:-2, :-2] & valid[:-2, 1:-1] & valid[:-2, 2:]
        & valid[1:-1, :-2] & valid[1:-1, 1:-1] & valid[1:-1, 2:]
        & valid[2:, :-2] & valid[2:, 1:-1] & valid[2:, 2:]
    )
    eight_cs = 8.0 * dem.cellsize
    gx[1:-1, 1:-1] = ((ne + 2.0 * e + se) - (nw + 2.0 * w + sw)) / eight_cs
    gy[1:-1, 1:-1] = ((nw + 2.0 * n + ne) - (sw + 2.0 * s + se)) / eight_cs
    ok[1:-1, 1:-1] = window_ok
    return gx, gy, ok


#: Gradient magnitudes at or below this are treated as flat for aspect.
FLAT_TOLERANCE = 1e-12

#: Aspect value assigned to flat cells.
FLAT_ASPECT = -1.0


def slope(dem: Grid) -> Grid:
    """Steepest-descent slope in degrees [0, 90].

    Border cells and cells with any nodata neighbor are nodata. Grids smaller
    than 3x3 come back all nodata.
    """
    gx, gy, ok = _horn_gradients(dem)
    out = np.full(dem.values.shape, dem.nodata_value)
    mag = np.hypot(gx[ok], gy[ok])
    out[ok] = np.degrees(np.arctan(mag))
    return dem.with_values(out)


def aspect(dem: Grid) -> Grid:
    """Downslope compass direction in degrees [0, 360), clockwise from north.

    Flat cells (gradient magnitude <= FLAT_TOLERANCE) get FLAT_ASPECT. Border
    and nodata-adjacent cells are nodata, as for slope().
    """
    gx, gy, ok = _horn_gradients(dem)
    out = np.full(dem.values.shape, dem.nodata_value)
    gxo, gyo = gx[ok], gy[ok]
    flat = np.hypot(gxo, gyo) <= FLAT_TOLERANCE
    deg = np.degrees(np.arctan2(-gxo, -gyo)) % 360.0
    deg[deg == 360.0] = 0.0
    deg[flat] = FLAT_ASPECT
    out[ok] = deg
    return dem.with_values(out)


# ---------------------------------------------------------------------------
# Proximity


def proximity(mask: Grid) -> Grid:
    """Euclidean distance in meters from each cell center to the nearest feature cell.

    Feature cells are those equal to 1; everything else, nodata included, is
    background. Feature cells map to 0. A mask with no features yields an
    all-nodata grid.
    """
    features = mask.values == 1.0
    if not features.any():
        return mask.with_values(np.full(mask.values.shape, mask.nodata_value))
    dist = ndimage.distance_transform_edt(
        ~features, sampling=(mask.cellsize, mask.cellsize)
    )
    return mask.with_values(dist)


# ---------------------------------------------------------------------------
# Change detection


@dataclass(frozen=True)
class ChangeMatrix:
    """Class-transition counts between two epochs of a categorical raster."""

    classes_a: tuple[float, ...]
    classes_b: tuple[float, ...]
    counts: np.ndarray
    cell_area: float

    def count(self, class_a: float, class_b: float) -> int:
        ia = self.classes_a.index(class_a)
        ib = self.classes_b.index(class_b)
        return int(self.counts[ia, ib])

    def total(self) -> int:
        return int(self.counts.sum())

    def loss_area(self, cls: float) -> float:
        """Area in m2 that left `cls` between epochs."""
        if cls not in self.classes_a:
            return 0.0
        ia = self.classes_a.index(cls)
        off_diag = sum(
            int(self.counts[ia, ib]) for ib, cb in enumerate(self.classes_b) if cb != cls
        )
        return off_diag * self.cell_area

    def gain_area(self, cls: float) -> float:
        """Area in m2 that became `cls` between epochs."""
        if cls not in self.classes_b:
            return 0.0
        ib = self.classes_b.index(cls)
        off_diag = sum(
            int(self.counts[ia, ib]) for ia, ca in enumerate(self.classes_a) if ca != cls
        )
        return off_diag * self.cell_area


def change_matrix(epoch_a: Grid, epoch_b: Grid) -> ChangeMatrix:
    """Full transition counts over cells valid in both epochs."""
    require_aligned(epoch_a, epoch_b, what="change epochs")
    both = epoch_a.valid & epoch_b.valid
    va = epoch_a.values[both]
    vb = epoch_b.values[both]
    classes_a = tuple(np.unique(va).tolist())
    classes_b = tuple(np.unique(vb).tolist())
    counts = np.zeros((len(classes_a), len(classes_b)), dtype=np.int64)
    ia = np.searchsorted(classes_a, va)
    ib = np.searchsorted(classes_b, vb)
    np.add.at(counts, (ia, ib), 1)
    return ChangeMatrix(
        classes_a=classes_a,
        classes_b=classes_b,
        counts=counts,
        cell_area=epoch_a.cellsize * epoch_a.cellsize,
    )


# ---------------------------------------------------------------------------
# Zonal statistics


@dataclass(frozen=True)
class ZoneStats:
    count: int
    mean: float
    min: float
    max: float
    sum: float
    fraction_above: float


def zonal_stats(value: Grid, zones: Grid, threshold: float = 0.5) -> dict[int, ZoneStats]:
    """Per-zone summaries of `value`, grouped by integer zone id.

    Only cells valid in both grids contribute; zones with no valid value
    cells are absent from the result. fraction_above is the share of a
    zone's contributing cells strictly above `threshold`.
    """
    require_aligned(value, zones, what="value and zone grids")
    both = value.valid & zones.valid
    if not both.any():
        return {}
    zv = zones.values[both]
    if not np.all(zv == np.floor(zv)):
        raise ValueError("zone grid must contain integer zone ids")
    ids = zv.astype(np.int64)
    vals = value.values[both]
    uniq, inv = np.unique(ids, return_inverse=True)
    counts = np.bincount(inv)
    sums = np.bincount(inv, weights=vals)
    above = np.bincount(inv, weights=(vals > threshold).astype(np.float64))
    out: dict[int, ZoneStats] = {}
    for k, zone_id in enumerate(uniq.tolist()):
        sel = vals[inv == k]
        out[int(zone_id)] = ZoneStats(
            count=int(counts[k]),
            mean=float(sums[k] / counts[k]),
            min=float(sel.min()),
            max=float(sel.max()),
            sum=float(sums[k]),
            fraction_above=float(above[k] / counts[k]),
        )
    return out


# ---------------------------------------------------------------------------
# Polygon rasterization


def rasterize_polygons(
    polygons: Sequence[tuple[int, Polygon]], template: Grid
) -> Grid:
    """Burn polygons into a grid of zone ids on the template's georeferencing.

    A cell takes the id of the polygon containing its center (even-odd rule,
    boundary counts as inside); where several polygons claim a center the
    lowest id wins. Uncovered cells are nodata.
    """
    for zone_id, rings in polygons:
        for ring in rings:
            if len(ring) < 3:
                raise ValueError(f"polygon for zone {zone_id} has a ring with <3 vertices")

    out = np.full((template.nrows, template.ncols), template.nodata_value)
    cs = template.cellsize
    x0 = template.xllcorner
    y0 = template.yllcorner
    nrows, ncols = template.nrows, template.ncols

    for zone_id, rings in sorted(polygons, key=lambda p: p[0], reverse=True):
        minx, miny, maxx, maxy = geometry.ring_bbox(rings)
        # Candidate cells whose centers can fall inside the bbox.
        c_lo = max(0, int(math.floor((minx - x0) / cs - 0.5)))
        c_hi = min(ncols - 1, int(math.ceil((maxx - x0) / cs - 0.5)))
        r_lo = max(0, int(math.floor((y0 + nrows * cs - maxy) / cs - 0.5)))
        r_hi = min(nrows - 1, int(math.ceil((y0 + nrows * cs - miny) / cs - 0.5)))
        for r in range(r_lo, r_hi + 1):
            cy = y0 + (nrows - r - 0.5) * cs
            if cy < miny or cy > maxy:
                continue
            for c in range(c_lo, c_hi + 1):
                cx = x0 + (c + 0.5) * cs
                if cx < minx or cx > maxx:
                    continue
                if geometry.point_in_rings(cx, cy, rings) != geometry.OUTSIDE:
                    # Iterating ids high-to-low makes the lowest id win ties.
                    out[r, c] = float(zone_id)
    return template.with_values(out)
