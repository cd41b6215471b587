"""Scalar fields, discrete 1-forms, and edge discretization rules.

A discrete 1-form stores one real value per canonical oriented edge
(low id -> high id); access by an oriented vertex pair applies the sign, so
antisymmetry ``Y(uv) = -Y(vu)`` is exact for every access path.  Three
constructions are provided: the coboundary of a vertex function, the midpoint
rule for sampled vector fields, and Gauss-Legendre edge quadrature for
analytic forms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    FormFormatError,
    MissingEdgeValueError,
    SampleMissingError,
)
from .mesh import SimplicialComplex


class ScalarField:
    """One real value per vertex of a bound complex."""

    def __init__(self, complex: SimplicialComplex, values):
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.shape != (complex.nv,):
            raise FormFormatError(
                f"expected {complex.nv} vertex values, got shape {values.shape}"
            )
        self.complex = complex
        self.values = values
        self.values.setflags(write=False)

    def __getitem__(self, vertex: int) -> float:
        return float(self.values[vertex])


class OneForm:
    """Antisymmetric real values on oriented edges of a bound complex."""

    def __init__(self, complex: SimplicialComplex, values):
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.shape != (complex.ne,):
            raise FormFormatError(
                f"expected {complex.ne} edge values, got shape {values.shape}"
            )
        self.complex = complex
        self.values = values  # canonical orientation (low id -> high id)
        self.values.setflags(write=False)

    @classmethod
    def from_edge_dict(cls, complex: SimplicialComplex, mapping) -> "OneForm":
        """Build from a ``{(u, v): value}`` dict in either orientation."""
        values = np.zeros(complex.ne)
        seen = np.zeros(complex.ne, dtype=bool)
        for (u, v), val in mapping.items():
            try:
                eid = complex.edge_id(u, v)
            except KeyError:
                raise FormFormatError(f"({u}, {v}) is not an edge of the complex")
            values[eid] = val if u < v else -val
            seen[eid] = True
        if not seen.all():
            missing = complex.edges[~seen][0]
            raise MissingEdgeValueError(
                f"{int((~seen).sum())} edges without a value, "
                f"first missing ({missing[0]}, {missing[1]})"
            )
        return cls(complex, values)

    def value(self, u: int, v: int) -> float:
        """Value on the oriented edge u -> v (sign resolved by orientation)."""
        val = float(self.values[self.complex.edge_id(u, v)])
        return val if u < v else -val

    def values_on(self, pairs) -> np.ndarray:
        """Vectorized :meth:`value` over an ``(m, 2)`` array of oriented pairs."""
        ids, signs = self.complex.edge_ids(pairs)
        return signs * self.values[ids]


@dataclass(frozen=True)
class AnalyticForm:
    """Plane 1-form ``p dx + q dy`` with vectorized coefficient callables."""

    p: Callable
    q: Callable

    def coefficients(self, x, y):
        return self.p(x, y), self.q(x, y)

    def as_vector_field(self) -> Callable:
        """The vector field with the same components (Euclidean pairing)."""
        return lambda x, y: (self.p(x, y), self.q(x, y))


class VectorSampleGrid:
    """Vector samples on a regular plane lattice.

    ``u_comp``/``v_comp`` are ``(nx, ny)`` arrays indexed by lattice position;
    sample ``(ix, iy)`` sits at ``origin + (ix * step_x, iy * step_y)``.
    """

    #: vertex-to-sample matches farther than this (absolute) fall back to the
    #: nearest sample, with a warning
    MATCH_TOL = 1e-9

    def __init__(self, origin, step, u_comp, v_comp):
        self.origin = np.asarray(origin, dtype=np.float64)
        step = np.broadcast_to(np.asarray(step, dtype=np.float64), (2,))
        if np.any(step <= 0):
            raise FormFormatError("lattice step must be positive")
        self.step = np.array(step)
        self.u_comp = np.ascontiguousarray(u_comp, dtype=np.float64)
        self.v_comp = np.ascontiguousarray(v_comp, dtype=np.float64)
        if self.u_comp.shape != self.v_comp.shape or self.u_comp.ndim != 2:
            raise FormFormatError("component arrays must share an (nx, ny) shape")

    @classmethod
    def from_points(cls, points, vectors) -> "VectorSampleGrid":
        """Build from ``(m, 2)`` sample points that fill a regular lattice."""
        points = np.asarray(points, dtype=np.float64)
        vectors = np.asarray(vectors, dtype=np.float64)
        xs = np.unique(points[:, 0])
        ys = np.unique(points[:, 1])
        nx, ny = len(xs), len(ys)
        if nx < 2 or ny < 2 or nx * ny != len(points):
            raise FormFormatError("sample points do not fill a regular lattice")
        sx = np.diff(xs)
        sy = np.diff(ys)
        if np.ptp(sx) > 1e-9 * sx[0] or np.ptp(sy) > 1e-9 * sy[0]:
            raise FormFormatError("sample lattice spacing is not uniform")
        origin = np.array([xs[0], ys[0]])
        step = np.array([sx[0], sy[0]])
        ix = np.rint((points[:, 0] - origin[0]) / step[0]).astype(int)
        iy = np.rint((points[:, 1] - origin[1]) / step[1]).astype(int)
        u_comp = np.zeros((nx, ny))
        v_comp = np.zeros((nx, ny))
        u_comp[ix, iy] = vectors[:, 0]
        v_comp[ix, iy] = vectors[:, 1]
        return cls(origin, step, u_comp, v_comp)

    def sample_at(self, points) -> np.ndarray:
        """Vectors at the given points; exact lattice match expected.

        Points off the lattice (beyond ``MATCH_TOL``) use the nearest sample
        and emit a single warning.  Points outside the lattice raise
        :class:`SampleMissingError`.
        """
        points = np.asarray(points, dtype=np.float64)
        frac = (points - self.origin) / self.step
        idx = np.rint(frac)
        mismatch = np.abs(frac - idx) * self.step > self.MATCH_TOL
        nx, ny = self.u_comp.shape
        ix = idx[:, 0].astype(int)
        iy = idx[:, 1].astype(int)
        outside = (ix < 0) | (ix >= nx) | (iy < 0) | (iy >= ny)
        if np.any(outside):
            p = points[outside][0]
            raise SampleMissingError(
                f"vertex at ({p[0]}, {p[1]}) has no sample on the lattice"
            )
        n_near = int(np.count_nonzero(mismatch.any(axis=1)))
        if n_near:
            warnings.warn(
                f"{n_near} vertices matched no sample exactly; "
                "nearest samples used",
                stacklevel=2,
            )
        return np.column_stack([self.u_comp[ix, iy], self.v_comp[ix, iy]])


def coboundary(f: ScalarField, c: SimplicialComplex | None = None) -> OneForm:
    """The 1-form ``Y(uv) = f(v) - f(u)``; closed on every triangle."""
    if c is None:
        c = f.complex
    vals = f.values[c.edges[:, 1]] - f.values[c.edges[:, 0]]
    return OneForm(c, vals)


def _vectors_at(field, positions: np.ndarray) -> np.ndarray:
    if isinstance(field, VectorSampleGrid):
        return field.sample_at(positions)
    if isinstance(field, AnalyticForm):
        comps = field.coefficients(positions[:, 0], positions[:, 1])
    else:
        comps = field(positions[:, 0], positions[:, 1])
    out = np.empty_like(positions)
    for k, comp in enumerate(comps):
        out[:, k] = comp
    return out


def discretize_midpoint(field, c: SimplicialComplex) -> OneForm:
    """Midpoint rule ``Y(uv) = 1/2 (X_u + X_v) . (v - u)``.

    ``field`` is a :class:`VectorSampleGrid`, an :class:`AnalyticForm`
    (components read as a vector field), or a callable mapping coordinate
    arrays to component arrays.  Exact for fields with affine components.
    """
    pos = c.positions
    vec = _vectors_at(field, pos)
    pu = pos[c.edges[:, 0]]
    pv = pos[c.edges[:, 1]]
    mean = 0.5 * (vec[c.edges[:, 0]] + vec[c.edges[:, 1]])
    vals = np.einsum("ij,ij->i", mean, pv - pu)
    return OneForm(c, vals)


def discretize_quadrature(form: AnalyticForm, c: SimplicialComplex, order: int = 3) -> OneForm:
    """Gauss-Legendre approximation of the straight-segment edge integrals.

    Exact for polynomial coefficient functions of degree <= 2*order - 1 along
    each edge.
    """
    if order < 1:
        raise ValueError("quadrature order must be >= 1")
    if c.positions.shape[1] != 2:
        raise FormFormatError("edge quadrature of a plane form needs 2-d positions")
    nodes, weights = np.polynomial.legendre.leggauss(order)
    t = 0.5 * (nodes + 1.0)  # map to (0, 1)
    w = 0.5 * weights
    pu = c.positions[c.edges[:, 0]]
    pv = c.positions[c.edges[:, 1]]
    d = pv - pu
    vals = np.zeros(c.ne)
    for ti, wi in zip(t, w):
        pts = pu + ti * d
        p, q = form.coefficients(pts[:, 0], pts[:, 1])
        vals += wi * (np.asarray(p) * d[:, 0] + np.asarray(q) * d[:, 1])
    return OneForm(c, vals)


# -- plain-text field/form files ---------------------------------------------


def write_scalar_field(f: ScalarField, path) -> None:
    """``vertex_id value`` lines."""
    with open(path, "w") as fh:
        for i, val in enumerate(f.values):
            fh.write(f"{i} {float(val)!r}\n")


def read_scalar_field(c: SimplicialComplex, path) -> ScalarField:
    values = np.full(c.nv, np.nan)
    with open(path) as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            try:
                vid, val = int(parts[0]), float(parts[1])
            except (IndexError, ValueError) as exc:
                raise FormFormatError(f"{path}:{ln}: expected 'vertex_id value'") from exc
            if not 0 <= vid < c.nv:
                raise FormFormatError(f"{path}:{ln}: vertex id {vid} out of range")
            values[vid] = val
    if np.isnan(values).any():
        missing = int(np.isnan(values).sum())
        raise FormFormatError(f"{path}: {missing} vertices without a value")
    return ScalarField(c, values)


def write_one_form(form: OneForm, path) -> None:
    """``u v value`` lines in canonical orientation."""
    edges = form.complex.edges
    with open(path, "w") as fh:
        for (u, v), val in zip(edges, form.values):
            fh.write(f"{u} {v} {float(val)!r}\n")


def read_one_form(c: SimplicialComplex, path) -> OneForm:
    """Read a 1-form file; every mesh edge must receive a value."""
    values = np.zeros(c.ne)
    seen = np.zeros(c.ne, dtype=bool)
    with open(path) as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            try:
                u, v, val = int(parts[0]), int(parts[1]), float(parts[2])
            except (IndexError, ValueError) as exc:
                raise FormFormatError(f"{path}:{ln}: expected 'u v value'") from exc
            try:
                eid = c.edge_id(u, v)
            except KeyError as exc:
                raise FormFormatError(
                    f"{path}:{ln}: ({u}, {v}) is not an edge of the mesh"
                ) from exc
            values[eid] = val if u < v else -val
            seen[eid] = True
    if not seen.all():
        missing = c.edges[~seen][0]
        raise MissingEdgeValueError(
            f"{path}: {int((~seen).sum())} mesh edges without a value, "
            f"first missing ({missing[0]}, {missing[1]})"
        )
    return OneForm(c, values)


def write_vector_samples(grid: VectorSampleGrid, path) -> None:
    """``x y u v`` lines, row-major over the lattice."""
    nx, ny = grid.u_comp.shape
    with open(path, "w") as fh:
        for iy in range(ny):
            for ix in range(nx):
                x = float(grid.origin[0] + ix * grid.step[0])
                y = float(grid.origin[1] + iy * grid.step[1])
                fh.write(
                    f"{x!r} {y!r} {float(grid.u_comp[ix, iy])!r} "
                    f"{float(grid.v_comp[ix, iy])!r}\n"
                )


def read_vector_samples(path) -> VectorSampleGrid:
    pts = []
    vecs = []
    with open(path) as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 4:
                raise FormFormatError(f"{path}:{ln}: expected 'x y u v'")
            try:
                x, y, u, v = (float(p) for p in parts)
            except ValueError as exc:
                raise FormFormatError(f"{path}:{ln}: malformed sample line") from exc
            pts.append((x, y))
            vecs.append((u, v))
    if not pts:
        raise FormFormatError(f"{path}: empty sample file")
    return VectorSampleGrid.from_points(np.asarray(pts), np.asarray(vecs))
