"""Triangulated 2-/3-manifold complexes and regular plane triangulation generators.

A :class:`SimplicialComplex` stores vertex positions, canonically oriented
edges (low id -> high id) and top cells (triangles or tetrahedra), and answers
star/link queries.  Complexes are immutable after construction; all query
methods are safe under concurrent read-only access.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BoundaryEdgeError,
    MeshFormatError,
    NonManifoldError,
    StepTooLargeError,
)

GRID_SCHEMES = ("T1", "T2", "T3")


@dataclass(frozen=True)
class EdgeLink:
    """Link of an interior edge.

    For a surface mesh the link is the unordered pair of vertices opposite the
    edge; for a volume mesh it is a closed vertex cycle ``a_0 .. a_{k-1}``
    (``a_k = a_0`` implied).  The cycle is reported starting from its smallest
    vertex id, walking first toward the smaller-id neighbour; downstream edge
    tests are invariant under reversal of this choice.
    """

    dim: int
    vertices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.vertices)


class SimplicialComplex:
    """Triangulated 2- or 3-manifold (with boundary) with adjacency indexes.

    Attributes
    ----------
    dim : int
        Top-cell dimension, 2 (triangles) or 3 (tetrahedra).
    positions : np.ndarray
        Vertex coordinates, shape ``(nv, 2)`` or ``(nv, 3)``.
    cells : np.ndarray
        Top cells as vertex-id tuples, shape ``(nc, dim + 1)``.
    edges : np.ndarray
        Canonical edges (u < v), lexicographically sorted, shape ``(ne, 2)``.
    boundary_edge_mask, boundary_vertex_mask : np.ndarray
        Boolean masks over edges / vertices.
    dangling_vertices : list[int]
        Vertices that appear in no top cell (reported, not fatal).
    """

    def __init__(self, positions, cells):
        positions = np.ascontiguousarray(positions, dtype=np.float64)
        cells = np.ascontiguousarray(cells, dtype=np.int64)
        if positions.ndim != 2 or positions.shape[1] not in (2, 3):
            raise MeshFormatError("positions must be an (nv, 2) or (nv, 3) array")
        if cells.ndim != 2 or cells.shape[1] not in (3, 4):
            raise MeshFormatError("cells must be an (nc, 3) or (nc, 4) array")
        nv = positions.shape[0]
        if cells.size and (cells.min() < 0 or cells.max() >= nv):
            raise MeshFormatError("cell vertex id out of range")
        # repeated vertex inside a cell makes it degenerate
        sc = np.sort(cells, axis=1)
        if cells.size and np.any(sc[:, 1:] == sc[:, :-1]):
            raise MeshFormatError("degenerate cell with repeated vertex")

        self.positions = positions
        self.cells = cells
        self.dim = cells.shape[1] - 1
        self.nv = nv
        self.nc = cells.shape[0]

        self._build_edges()
        if self.dim == 2:
            self._build_2d()
        else:
            self._build_3d()

        used = np.zeros(nv, dtype=bool)
        used[cells.ravel()] = True
        self.dangling_vertices = [int(i) for i in np.nonzero(~used)[0]]

        self.positions.setflags(write=False)
        self.cells.setflags(write=False)
        self.edges.setflags(write=False)

    # -- construction helpers ------------------------------------------------

    def _encode(self, pairs: np.ndarray) -> np.ndarray:
        lo = np.minimum(pairs[:, 0], pairs[:, 1])
        hi = np.maximum(pairs[:, 0], pairs[:, 1])
        return lo * np.int64(self.nv) + hi

    def _build_edges(self) -> None:
        k = self.dim + 1
        idx = [(i, j) for i in range(k) for j in range(i + 1, k)]
        pairs = self.cells[:, idx]  # (nc, n_pairs, 2)
        flat = pairs.reshape(-1, 2)
        keys = self._encode(flat)
        ukeys, inverse = np.unique(keys, return_inverse=True)
        self._edge_keys = ukeys
        self.edges = np.column_stack([ukeys // self.nv, ukeys % self.nv])
        self.ne = self.edges.shape[0]
        self._cell_edge_ids = inverse.reshape(self.nc, len(idx))
        self._cell_pair_index = idx

    def _build_2d(self) -> None:
        # per-triangle edge list with the opposite vertex of each edge
        eids = self._cell_edge_ids.ravel()
        opp_slot = [3 - i - j for i, j in self._cell_pair_index]
        opps = self.cells[:, opp_slot].ravel()

        counts = np.bincount(eids, minlength=self.ne)
        if counts.max(initial=0) > 2:
            bad = int(np.argmax(counts))
            u, v = self.edges[bad]
            raise NonManifoldError(
                f"edge ({u}, {v}) is shared by {int(counts[bad])} triangles"
            )
        order = np.argsort(eids, kind="stable")
        starts = np.searchsorted(eids[order], np.arange(self.ne))
        opposite = np.full((self.ne, 2), -1, dtype=np.int64)
        opposite[:, 0] = opps[order][starts]
        two = counts == 2
        opposite[two, 1] = opps[order][starts[two] + 1]

        self.edge_cell_count = counts
        self.opposite = opposite
        self.boundary_edge_mask = counts == 1
        bmask = np.zeros(self.nv, dtype=bool)
        bmask[self.edges[self.boundary_edge_mask].ravel()] = True
        self.boundary_vertex_mask = bmask
        self.n_faces = self.nc

    def _build_3d(self) -> None:
        # codim-1 faces are triangles; at most two tetrahedra may share one
        fidx = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
        faces = np.sort(self.cells[:, fidx], axis=2).reshape(-1, 3)
        fkeys = (faces[:, 0] * np.int64(self.nv) + faces[:, 1]) * np.int64(
            self.nv
        ) + faces[:, 2]
        ufkeys, finv = np.unique(fkeys, return_inverse=True)
        fcounts = np.bincount(finv)
        if fcounts.max(initial=0) > 2:
            raise NonManifoldError("a triangle face is shared by more than 2 tetrahedra")
        self.n_faces = len(ufkeys)

        boundary_face = fcounts == 1
        first_occurrence = np.zeros(len(ufkeys), dtype=np.int64)
        first_occurrence[finv[::-1]] = np.arange(len(fkeys) - 1, -1, -1)
        bverts = faces[first_occurrence[boundary_face]].ravel()
        bmask = np.zeros(self.nv, dtype=bool)
        bmask[bverts] = True
        self.boundary_vertex_mask = bmask

        # an edge is a boundary edge iff it lies in some boundary face
        bface_edges = np.concatenate(
            [
                faces[first_occurrence[boundary_face]][:, [0, 1]],
                faces[first_occurrence[boundary_face]][:, [0, 2]],
                faces[first_occurrence[boundary_face]][:, [1, 2]],
            ]
        )
        self.boundary_edge_mask = np.zeros(self.ne, dtype=bool)
        if bface_edges.size:
            eids = np.searchsorted(self._edge_keys, self._encode(bface_edges))
            self.boundary_edge_mask[eids] = True

        self.edge_cell_count = np.bincount(
            self._cell_edge_ids.ravel(), minlength=self.ne
        )

        # per edge, the opposite vertex pair in each incident tetrahedron
        opp_slot = [
            tuple(s for s in range(4) if s not in (i, j))
            for i, j in self._cell_pair_index
        ]
        link_pairs = np.stack(
            [self.cells[:, [a for a, _ in opp_slot]], self.cells[:, [b for _, b in opp_slot]]],
            axis=2,
        ).reshape(-1, 2)
        eids = self._cell_edge_ids.ravel()
        order = np.argsort(eids, kind="stable")
        self._edge_link_pairs = link_pairs[order]
        self._edge_link_starts = np.searchsorted(eids[order], np.arange(self.ne + 1))

        self._links: dict[int, tuple[int, ...]] = {}
        for e in range(self.ne):
            if not self.boundary_edge_mask[e]:
                self._links[e] = self._link_cycle(e)

    def _link_cycle(self, eid: int) -> tuple[int, ...]:
        lo, hi = self._edge_link_starts[eid], self._edge_link_starts[eid + 1]
        pairs = self._edge_link_pairs[lo:hi]
        adj: dict[int, list[int]] = {}
        for a, b in pairs:
            adj.setdefault(int(a), []).append(int(b))
            adj.setdefault(int(b), []).append(int(a))
        u, v = self.edges[eid]
        if any(len(nb) != 2 for nb in adj.values()):
            raise NonManifoldError(
                f"link of interior edge ({u}, {v}) is not a closed cycle"
            )
        start = min(adj)
        cycle = [start, min(adj[start])]
        while cycle[-1] != start:
            a, b = adj[cycle[-1]]
            cycle.append(a if a != cycle[-2] else b)
        cycle.pop()
        if len(cycle) != len(adj):
            raise NonManifoldError(
                f"link of interior edge ({u}, {v}) has more than one component"
            )
        return tuple(cycle)

    # -- queries -------------------------------------------------------------

    def edge_id(self, u: int, v: int) -> int:
        """Id of the canonical edge {u, v}; raises ``KeyError`` if absent."""
        lo, hi = (u, v) if u < v else (v, u)
        key = lo * self.nv + hi
        pos = int(np.searchsorted(self._edge_keys, key))
        if pos >= self.ne or self._edge_keys[pos] != key:
            raise KeyError(f"no edge ({u}, {v}) in complex")
        return pos

    def edge_ids(self, pairs) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized edge lookup for oriented vertex pairs.

        Returns ``(ids, signs)`` where ``signs`` is +1 where the pair is in
        canonical orientation (first id smaller) and -1 where reversed.
        """
        pairs = np.asarray(pairs, dtype=np.int64)
        keys = self._encode(pairs)
        pos = np.searchsorted(self._edge_keys, keys)
        pos = np.minimum(pos, self.ne - 1)
        if not np.all(self._edge_keys[pos] == keys):
            bad = pairs[self._edge_keys[pos] != keys][0]
            raise KeyError(f"no edge ({bad[0]}, {bad[1]}) in complex")
        signs = np.where(pairs[:, 0] < pairs[:, 1], 1.0, -1.0)
        return pos, signs

    def interior_edge_ids(self) -> np.ndarray:
        return np.nonzero(~self.boundary_edge_mask)[0]

    def is_boundary_edge(self, u: int, v: int) -> bool:
        return bool(self.boundary_edge_mask[self.edge_id(u, v)])

    def edge_link(self, u: int, v: int) -> EdgeLink:
        """Link of the interior edge {u, v}.

        Raises
        ------
        BoundaryEdgeError
            If the edge lies on the boundary (callers decide policy).
        """
        eid = self.edge_id(u, v)
        if self.boundary_edge_mask[eid]:
            raise BoundaryEdgeError(f"edge ({u}, {v}) is a boundary edge")
        if self.dim == 2:
            a, b = self.opposite[eid]
            return EdgeLink(2, (int(a), int(b)))
        return EdgeLink(3, self._links[eid])

    def euler_characteristic(self) -> int:
        chi = self.nv - self.ne + self.n_faces
        if self.dim == 3:
            chi -= self.nc
        return chi

    def bbox(self) -> tuple[float, ...]:
        mins = self.positions.min(axis=0)
        maxs = self.positions.max(axis=0)
        return tuple(mins) + tuple(maxs)

    def __repr__(self) -> str:  # pragma: no cover
        return (
            f"SimplicialComplex(dim={self.dim}, nv={self.nv}, "
            f"ne={self.ne}, nc={self.nc})"
        )


def build_complex(positions, top_cells) -> SimplicialComplex:
    """Build a complex from vertex positions and top-cell vertex tuples.

    Populates the canonical edge table, builds adjacency indexes and runs the
    manifold-with-boundary checks.  Dangling vertices are recorded on the
    result, not rejected.
    """
    return SimplicialComplex(positions, top_cells)


def edge_link(c: SimplicialComplex, edge) -> EdgeLink:
    """Module-level alias for :meth:`SimplicialComplex.edge_link`."""
    u, v = edge
    return c.edge_link(int(u), int(v))


# -- regular plane triangulations -------------------------------------------


def _axis_cells(extent: float, step: float) -> int:
    n_real = extent / step
    n = int(round(n_real))
    if n < 1 or abs(n_real - n) > 1e-6 * max(1.0, n_real):
        n = int(math.floor(n_real))
    return n


def generate_grid(scheme: str, bbox, step: float) -> SimplicialComplex:
    """Generate one of the regular plane triangulations T1, T2 or T3.

    T1 is a square lattice with one uniform diagonal per cell (all diagonals
    run from (i, j) to (i+1, j+1)), T2 a square lattice with an extra center
    vertex and four triangles per cell, T3 an equilateral lattice clipped to
    the box (outside vertices and partial cells dropped).  Cell counts are
    anchored at (xmin, ymin); a box that is not a whole multiple of the step
    is covered by the largest step-multiple sub-box.

    Raises
    ------
    StepTooLargeError
        If fewer than 2 cells fit along either axis.
    """
    if scheme not in GRID_SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}, expected one of {GRID_SCHEMES}")
    xmin, ymin, xmax, ymax = (float(b) for b in bbox)
    if not (xmax > xmin and ymax > ymin):
        raise ValueError("bbox is degenerate")
    if not step > 0:
        raise ValueError("step must be positive")

    if scheme == "T3":
        return _generate_t3((xmin, ymin, xmax, ymax), step)

    nx = _axis_cells(xmax - xmin, step)
    ny = _axis_cells(ymax - ymin, step)
    if nx < 2 or ny < 2:
        raise StepTooLargeError(
            f"step {step} leaves {nx}x{ny} cells in box; need at least 2 per axis"
        )

    ii, jj = np.meshgrid(np.arange(nx + 1), np.arange(ny + 1), indexing="xy")
    gx = xmin + ii.ravel() * step
    gy = ymin + jj.ravel() * step

    def vid(i, j):
        return j * (nx + 1) + i

    ci, cj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="xy")
    ci, cj = ci.ravel(), cj.ravel()
    v00 = vid(ci, cj)
    v10 = vid(ci + 1, cj)
    v01 = vid(ci, cj + 1)
    v11 = vid(ci + 1, cj + 1)

    if scheme == "T1":
        positions = np.column_stack([gx, gy])
        tris = np.concatenate(
            [
                np.column_stack([v00, v10, v11]),
                np.column_stack([v00, v11, v01]),
            ]
        )
        return SimplicialComplex(positions, tris)

    # T2: center vertex per cell, ids appended after the lattice vertices
    centers = np.column_stack(
        [xmin + (ci + 0.5) * step, ymin + (cj + 0.5) * step]
    )
    positions = np.concatenate([np.column_stack([gx, gy]), centers])
    cid = (nx + 1) * (ny + 1) + np.arange(nx * ny)
    tris = np.concatenate(
        [
            np.column_stack([v00, v10, cid]),
            np.column_stack([v10, v11, cid]),
            np.column_stack([v11, v01, cid]),
            np.column_stack([v01, v00, cid]),
        ]
    )
    return SimplicialComplex(positions, tris)


def _generate_t3(bbox, step: float) -> SimplicialComplex:
    xmin, ymin, xmax, ymax = bbox
    dy = step * math.sqrt(3.0) / 2.0
    tol = 1e-9 * step

    rows: list[np.ndarray] = []
    row_start: list[int] = []
    positions = []
    j = 0
    while ymin + j * dy <= ymax + tol:
        y = ymin + j * dy
        x0 = xmin + (0.5 * step if j % 2 else 0.0)
        m = int(math.floor((xmax - x0) / step + tol)) + 1
        if m < 1:
            m = 0
        xs = x0 + np.arange(m) * step
        row_start.append(len(positions))
        rows.append(np.arange(len(positions), len(positions) + m))
        positions.extend((x, y) for x in xs)
        j += 1
    nrows = len(rows)
    if nrows < 3 or min((len(r) for r in rows), default=0) < 3:
        raise StepTooLargeError(
            f"step {step} leaves too few equilateral cells in box"
        )

    tris = []
    for j in range(nrows - 1):
        lower, upper = rows[j], rows[j + 1]
        ml, mu = len(lower), len(upper)
        if j % 2 == 0:
            # upper row shifted right by step/2
            for i in range(min(ml - 1, mu)):
                tris.append((lower[i], lower[i + 1], upper[i]))
            for i in range(min(mu - 1, ml - 1)):
                tris.append((upper[i], upper[i + 1], lower[i + 1]))
        else:
            # upper row shifted left by step/2
            for i in range(min(ml - 1, mu - 1)):
                tris.append((lower[i], lower[i + 1], upper[i + 1]))
            for i in range(min(mu - 1, ml)):
                tris.append((upper[i], upper[i + 1], lower[i]))
    return SimplicialComplex(np.asarray(positions), np.asarray(tris, dtype=np.int64))


# -- plain-text mesh files ---------------------------------------------------


def write_mesh(c: SimplicialComplex, path) -> None:
    """Write ``dim nv nc`` header, coordinate lines, then cell lines."""
    with open(path, "w") as fh:
        fh.write(f"{c.dim} {c.nv} {c.nc}\n")
        for p in c.positions:
            fh.write(" ".join(repr(float(x)) for x in p) + "\n")
        for cell in c.cells:
            fh.write(" ".join(str(int(v)) for v in cell) + "\n")


def read_mesh(path) -> SimplicialComplex:
    """Read a mesh written by :func:`write_mesh`."""
    with open(path) as fh:
        lines = [ln for ln in (raw.strip() for raw in fh) if ln]
    if not lines:
        raise MeshFormatError(f"{path}: empty mesh file")
    head = lines[0].split()
    if len(head) != 3:
        raise MeshFormatError(f"{path}: header must be 'dim nv nc'")
    try:
        dim, nv, nc = (int(x) for x in head)
    except ValueError as exc:
        raise MeshFormatError(f"{path}: bad header {lines[0]!r}") from exc
    if dim not in (2, 3):
        raise MeshFormatError(f"{path}: unsupported dimension {dim}")
    if len(lines) != 1 + nv + nc:
        raise MeshFormatError(
            f"{path}: expected {1 + nv + nc} lines, found {len(lines)}"
        )
    try:
        positions = np.array(
            [[float(x) for x in ln.split()] for ln in lines[1 : 1 + nv]]
        )
        cells = np.array(
            [[int(x) for x in ln.split()] for ln in lines[1 + nv :]], dtype=np.int64
        )
    except ValueError as exc:
        raise MeshFormatError(f"{path}: malformed coordinate or cell line") from exc
    if nc and cells.shape[1] != dim + 1:
        raise MeshFormatError(
            f"{path}: cells have {cells.shape[1]} vertices, expected {dim + 1}"
        )
    return SimplicialComplex(positions, cells)
