"""Smooth Jacobi sets of analytic form pairs and discrete-to-smooth distances.

Two plane 1-forms F = P dx + Q dy and G = R dx + S dy are linearly dependent
exactly where the coefficient determinant D = P S - Q R vanishes, so the
smooth Jacobi set is the zero contour of D.  This module extracts that
contour by marching squares and measures how far the midpoints of discrete
Jacobi edges sit from it.

The three field pairs used by the reproduction commands are built in: the
``fig2`` function pair (compared through its gradient forms), the ``fig4``
affine pair and the ``fig6`` cubic pair.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import EmptyContourError, FormFormatError
from .forms import AnalyticForm

BUILTIN_PAIRS = ("fig2", "fig4", "fig6")

#: evaluation window for the built-in experiments (the visible features of
#: all three determinant loci fit inside)
DEFAULT_BBOX = (-2.0, -2.0, 2.0, 2.0)
FIG2_BBOX = (-2.0, -1.5, 2.0, 2.0)
FIG2_STEP = 1.0 / 6.0


@dataclass(frozen=True)
class AnalyticFormPair:
    """Pair of analytic plane 1-forms with evaluable coefficients."""

    F: AnalyticForm
    G: AnalyticForm
    name: str = "custom"


def determinant_field(pair: AnalyticFormPair):
    """The function D(x, y) = P S - Q R whose zero locus is the Jacobi set."""

    def det(x, y):
        p, q = pair.F.coefficients(x, y)
        r, s = pair.G.coefficients(x, y)
        return p * s - q * r

    return det


# -- built-in fields ----------------------------------------------------------


def fig2_functions():
    """The two scalar functions of the zigzag example, as (f, g) callables."""

    def f(x, y):
        return ((x - 1.0) ** 2 + y**2) * ((x + 1.0) ** 2 + y**2)

    def g(x, y):
        return (x - 1.0) ** 2 + (y - 1.0) ** 2

    return f, g


def _fig2_gradient_pair() -> AnalyticFormPair:
    # df and dg with hand-derived partials (cross-checked symbolically in the
    # test suite)
    def fx(x, y):
        a = (x - 1.0) ** 2 + y**2
        b = (x + 1.0) ** 2 + y**2
        return 2.0 * (x - 1.0) * b + 2.0 * (x + 1.0) * a

    def fy(x, y):
        a = (x - 1.0) ** 2 + y**2
        b = (x + 1.0) ** 2 + y**2
        return 2.0 * y * (a + b)

    def gx(x, y):
        return 2.0 * (x - 1.0) + 0.0 * y

    def gy(x, y):
        return 2.0 * (y - 1.0) + 0.0 * x

    return AnalyticFormPair(AnalyticForm(fx, fy), AnalyticForm(gx, gy), "fig2")


def _fig4_pair() -> AnalyticFormPair:
    F = AnalyticForm(lambda x, y: y + 1.0, lambda x, y: 2.0 * (x + 1.0))
    G = AnalyticForm(lambda x, y: 2.0 * x - 3.0 * y, lambda x, y: 2.0 * x + 3.0 * y)
    return AnalyticFormPair(F, G, "fig4")


def _fig6_pair() -> AnalyticFormPair:
    F = AnalyticForm(
        lambda x, y: y * (x**2 + y**2 + 1.0),
        lambda x, y: -x * (x**2 + y**2 - 1.0),
    )
    G = AnalyticForm(
        lambda x, y: 2.0 * x - 3.0 * y - 6.0,
        lambda x, y: 2.0 * x - 3.0 * y,
    )
    return AnalyticFormPair(F, G, "fig6")


def builtin_pair(name: str) -> AnalyticFormPair:
    """One of the built-in pairs ``fig2`` (gradients), ``fig4`` or ``fig6``."""
    if name == "fig2":
        return _fig2_gradient_pair()
    if name == "fig4":
        return _fig4_pair()
    if name == "fig6":
        return _fig6_pair()
    raise FormFormatError(f"unknown builtin pair {name!r}, expected {BUILTIN_PAIRS}")


# -- marching squares ---------------------------------------------------------


@dataclass
class ContourSet:
    """Polyline approximation of a zero contour on a sampled box."""

    polylines: list
    bbox: tuple
    resolution: int
    degenerate_cells: int = 0

    @property
    def n_points(self) -> int:
        return sum(len(p) for p in self.polylines)

    def is_empty(self) -> bool:
        return not self.polylines

    def segments(self) -> np.ndarray:
        """All polyline segments as an (m, 2, 2) array, zero-length dropped."""
        segs = []
        for poly in self.polylines:
            if len(poly) < 2:
                continue
            s = np.stack([poly[:-1], poly[1:]], axis=1)
            keep = np.any(s[:, 0] != s[:, 1], axis=1)
            segs.append(s[keep])
        if not segs:
            return np.empty((0, 2, 2))
        return np.concatenate(segs)


# cell-edge pairs to connect, indexed by the corner sign code
# (bit k set = corner k positive; corners 00, 10, 11, 01; edges B, R, T, L)
_CASES = {
    1: [("L", "B")],
    2: [("B", "R")],
    3: [("L", "R")],
    4: [("T", "R")],
    6: [("B", "T")],
    7: [("L", "T")],
    8: [("T", "L")],
    9: [("B", "T")],
    11: [("T", "R")],
    12: [("L", "R")],
    13: [("B", "R")],
    14: [("L", "B")],
}


def marching_squares(D, bbox, resolution: int = 512) -> ContourSet:
    """Zero contour of D on the box, by cell-crossing linear interpolation.

    ``resolution`` counts cells per axis (at least 8).  Ambiguous saddle
    cells are resolved by sampling D at the cell center.  Zero samples count
    as positive; cells whose four corners are all exactly zero carry no
    crossing and are tallied as degenerate (a D = 0 patch has no meaningful
    contour).
    """
    if resolution < 8:
        raise ValueError("resolution must be at least 8 cells per axis")
    xmin, ymin, xmax, ymax = (float(b) for b in bbox)
    if not (xmax > xmin and ymax > ymin):
        raise ValueError("bbox is degenerate")
    xs = np.linspace(xmin, xmax, resolution + 1)
    ys = np.linspace(ymin, ymax, resolution + 1)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    vals = np.asarray(D(gx, gy), dtype=np.float64)
    if vals.shape != gx.shape:
        raise FormFormatError("determinant function is not vectorized over the grid")
    pos = vals >= 0.0  # zero counts as positive

    # one interpolated crossing point per sign-changing lattice edge
    points: list[tuple[float, float]] = []
    hx_id = {}
    vy_id = {}

    def _crossing(store, key, p0, p1, d0, d1):
        cid = store.get(key)
        if cid is None:
            t = d0 / (d0 - d1)
            cid = len(points)
            points.append((p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])))
            store[key] = cid
        return cid

    code = (
        pos[:-1, :-1].astype(np.int8)
        | (pos[1:, :-1].astype(np.int8) << 1)
        | (pos[1:, 1:].astype(np.int8) << 2)
        | (pos[:-1, 1:].astype(np.int8) << 3)
    )
    degenerate = int(
        np.count_nonzero(
            (vals[:-1, :-1] == 0)
            & (vals[1:, :-1] == 0)
            & (vals[1:, 1:] == 0)
            & (vals[:-1, 1:] == 0)
        )
    )

    segs: list[tuple[int, int]] = []
    active = np.nonzero((code != 0) & (code != 15))
    for i, j in zip(*active):
        i, j = int(i), int(j)
        c = int(code[i, j])
        if c in (5, 10):
            center = float(
                D(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]))
            )
            if c == 5:
                pairs = [("B", "R"), ("T", "L")] if center >= 0 else [("B", "L"), ("T", "R")]
            else:
                pairs = [("B", "L"), ("T", "R")] if center >= 0 else [("B", "R"), ("T", "L")]
        else:
            pairs = _CASES[c]

        def edge_cid(name):
            if name == "B":
                return _crossing(
                    hx_id, (i, j), (xs[i], ys[j]), (xs[i + 1], ys[j]),
                    vals[i, j], vals[i + 1, j],
                )
            if name == "T":
                return _crossing(
                    hx_id, (i, j + 1), (xs[i], ys[j + 1]), (xs[i + 1], ys[j + 1]),
                    vals[i, j + 1], vals[i + 1, j + 1],
                )
            if name == "L":
                return _crossing(
                    vy_id, (i, j), (xs[i], ys[j]), (xs[i], ys[j + 1]),
                    vals[i, j], vals[i, j + 1],
                )
            return _crossing(
                vy_id, (i + 1, j), (xs[i + 1], ys[j]), (xs[i + 1], ys[j + 1]),
                vals[i + 1, j], vals[i + 1, j + 1],
            )

        for e1, e2 in pairs:
            segs.append((edge_cid(e1), edge_cid(e2)))

    polylines = _stitch(points, segs)
    return ContourSet(polylines, (xmin, ymin, xmax, ymax), resolution, degenerate)


def _stitch(points, segs) -> list:
    """Chain crossing-id segments into polylines.

    Walks stop at crossings whose total degree differs from 2, so junctions
    (several contour branches through one point) terminate polylines instead
    of being threaded through arbitrarily.
    """
    adj = defaultdict(list)
    for k, (a, b) in enumerate(segs):
        adj[a].append((b, k))
        adj[b].append((a, k))
    used = [False] * len(segs)
    pts = np.asarray(points) if points else np.empty((0, 2))

    def walk(start):
        path = [start]
        cur = start
        while True:
            step = next(((nb, k) for nb, k in adj[cur] if not used[k]), None)
            if step is None:
                break
            used[step[1]] = True
            cur = step[0]
            path.append(cur)
            if len(adj[cur]) != 2:
                break
        return path

    polylines = []
    # open curves and junction branches first, then leftover closed loops
    for start in sorted(adj):
        if len(adj[start]) != 2:
            while any(not used[k] for _, k in adj[start]):
                polylines.append(walk(start))
    for start in sorted(adj):
        while any(not used[k] for _, k in adj[start]):
            polylines.append(walk(start))
    return [pts[np.array(p, dtype=np.intp)] for p in polylines]


# -- distances ----------------------------------------------------------------


@dataclass
class DistanceReport:
    """Distances from discrete Jacobi edge midpoints to the smooth contour."""

    distances: np.ndarray
    median: float
    mean: float
    max: float
    threshold: float
    n_edges: int
    n_beyond: int

    @property
    def fraction_beyond(self) -> float:
        return self.n_beyond / self.n_edges if self.n_edges else 0.0

    def summary(self) -> dict:
        return {
            "n_edges": self.n_edges,
            "median": self.median,
            "mean": self.mean,
            "max": self.max,
            "threshold": self.threshold,
            "n_beyond": self.n_beyond,
            "fraction_beyond": self.fraction_beyond,
        }


def _segment_distances(mids: np.ndarray, segs: np.ndarray) -> np.ndarray:
    """Min distance from each midpoint to any segment, chunked for memory."""
    a = segs[:, 0]
    d = segs[:, 1] - segs[:, 0]
    dd = np.einsum("ij,ij->i", d, d)
    dd[dd == 0.0] = 1.0  # zero-length guard; t clamps to the endpoint anyway
    out = np.empty(len(mids))
    chunk = max(1, int(2e6 // max(1, len(segs))))
    for lo in range(0, len(mids), chunk):
        p = mids[lo : lo + chunk]
        w = p[:, None, :] - a[None, :, :]
        t = np.clip(np.einsum("mkj,kj->mk", w, d) / dd[None, :], 0.0, 1.0)
        diff = w - t[:, :, None] * d[None, :, :]
        out[lo : lo + chunk] = np.sqrt(
            np.min(np.einsum("mkj,mkj->mk", diff, diff), axis=1)
        )
    return out


def distance_report(j, positions, contour: ContourSet, threshold: float) -> DistanceReport:
    """Per-edge midpoint distances to the contour with summary statistics.

    ``j`` is a JacobiSet or a plain ``(m, 2)`` edge array; ``positions`` the
    vertex coordinates those ids index.  An empty contour raises
    EmptyContour; an empty edge set yields NaN statistics.
    """
    edges = np.asarray(getattr(j, "edges", j), dtype=np.int64)
    segs = contour.segments()
    if len(segs) == 0:
        raise EmptyContourError("contour has no segments to measure against")
    positions = np.asarray(positions, dtype=np.float64)
    if len(edges) == 0:
        nan = float("nan")
        return DistanceReport(np.empty(0), nan, nan, nan, threshold, 0, 0)
    mids = 0.5 * (positions[edges[:, 0]] + positions[edges[:, 1]])
    dist = _segment_distances(mids, segs)
    return DistanceReport(
        distances=dist,
        median=float(np.median(dist)),
        mean=float(np.mean(dist)),
        max=float(np.max(dist)),
        threshold=float(threshold),
        n_edges=len(dist),
        n_beyond=int(np.count_nonzero(dist > threshold)),
    )


# -- contour files ------------------------------------------------------------

CONTOUR_HEADER = "polyline,x,y"


def write_contour_csv(contour: ContourSet, path) -> None:
    """One row per polyline point: ``polyline,x,y``."""
    with open(path, "w") as fh:
        fh.write(CONTOUR_HEADER + "\n")
        for pid, poly in enumerate(contour.polylines):
            for x, y in poly:
                fh.write(f"{pid},{float(x)!r},{float(y)!r}\n")


def read_contour_csv(path) -> ContourSet:
    """Read a contour CSV; bbox is recovered from the points."""
    polys = defaultdict(list)
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CONTOUR_HEADER:
            raise FormFormatError(f"{path}: unexpected header {header!r}")
        for ln, raw in enumerate(fh, 2):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise FormFormatError(f"{path}:{ln}: expected 3 columns")
            try:
                pid = int(parts[0])
                x, y = float(parts[1]), float(parts[2])
            except ValueError as exc:
                raise FormFormatError(f"{path}:{ln}: malformed row") from exc
            polys[pid].append((x, y))
    polylines = [np.asarray(polys[pid]) for pid in sorted(polys)]
    if polylines:
        allp = np.concatenate(polylines)
        bbox = (
            float(allp[:, 0].min()),
            float(allp[:, 1].min()),
            float(allp[:, 0].max()),
            float(allp[:, 1].max()),
        )
    else:
        bbox = (0.0, 0.0, 0.0, 0.0)
    return ContourSet(polylines, bbox, 0)
