"""Jacobi-set edge tests for pairs of 1-forms and pairs of vertex functions.

For an interior edge uv the combination H = F + lambda* G with
lambda* = F(uv)/G(vu) vanishes on the edge; the edge belongs to the Jacobi
set when the link heights h(w) = (H(uw) + H(vw))/2 make uv critical: in 2D
both link heights share a sign, in 3D the lower link of the cycle has a
nonzero reduced-Betti sum abs(beta0 - 1).

Membership is a sign condition, so it is decided division-free on the
homogeneous sums G(vu) H(uw) = G(vu) F(uw) + F(uv) G(uw).  Each sign is
certified: a float evaluation with a running error bound decides the generic
case, and the rare uncertain cases escalate to exact rational arithmetic.
Edges with G(uv) = 0 (lambda* undefined) and boundary edges are skipped and
reported in diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    BoundaryEdgeError,
    DimensionUnsupportedError,
    FormFormatError,
    ZeroLinkValueError,
)
from .forms import OneForm, ScalarField, coboundary
from .mesh import SimplicialComplex

#: float sums with |sum| <= GAMMA * (sum of |terms|) get an exact recount
GAMMA = 16.0 * np.finfo(np.float64).eps


# -- certified sign evaluation -----------------------------------------------


def _sign(x) -> int:
    return int(x > 0) - int(x < 0)


def _certified_sum_signs(terms: list[np.ndarray]) -> np.ndarray:
    """Exact signs of elementwise sums of product terms.

    ``terms`` holds arrays ``x0, y0, x1, y1, ...``; the target quantity per
    row is ``sum_k x_k * y_k`` over the float values read as exact rationals.
    Generic rows are decided in float arithmetic; rows inside the error bound
    are recomputed with Fraction.
    """
    prods = [terms[k] * terms[k + 1] for k in range(0, len(terms), 2)]
    s = prods[0].copy()
    theta = np.abs(prods[0])
    for p in prods[1:]:
        s += p
        theta += np.abs(p)
    signs = np.sign(s).astype(np.int8)
    unsure = np.abs(s) <= GAMMA * theta
    for i in np.nonzero(unsure)[0]:
        exact = sum(
            Fraction(float(terms[k][i])) * Fraction(float(terms[k + 1][i]))
            for k in range(0, len(terms), 2)
        )
        signs[i] = _sign(exact)
    return signs


def _certified_pair_sign(pairs) -> int:
    """Exact sign of ``sum_k x_k * y_k`` for one scalar configuration."""
    s = 0.0
    theta = 0.0
    for x, y in pairs:
        p = x * y
        s += p
        theta += abs(p)
    if abs(s) > GAMMA * theta:
        return _sign(s)
    exact = sum(Fraction(x) * Fraction(y) for x, y in pairs)
    return _sign(exact)


def _certified_link_sign_fn(f, g, u: int, v: int, w: int) -> int:
    """Exact sign of dg(vu) dh(uw) = dg(vu) df(uw) + df(uv) dg(uw).

    Floats use the rounded vertex differences; escalation recomputes the
    differences exactly from the vertex values, so the decided sign is the
    true sign for the given fields.
    """
    dgvu = g[u] - g[v]
    dfuw = f[w] - f[u]
    dfuv = f[v] - f[u]
    dguw = g[w] - g[u]
    p1 = dgvu * dfuw
    p2 = dfuv * dguw
    s = p1 + p2
    if abs(s) > GAMMA * (abs(p1) + abs(p2)):
        return _sign(s)
    exact = (Fraction(g[u]) - Fraction(g[v])) * (Fraction(f[w]) - Fraction(f[u])) + (
        Fraction(f[v]) - Fraction(f[u])
    ) * (Fraction(g[w]) - Fraction(g[u]))
    return _sign(exact)


# -- per-edge quantities ------------------------------------------------------


def lambda_star(F: OneForm, G: OneForm, edge) -> float | None:
    """The coefficient with F(uv) + lambda* G(uv) = 0, or None if G(uv) = 0.

    Edges with an undefined lambda* are disregarded by the set assembly.
    """
    u, v = edge
    guv = G.value(u, v)
    if guv == 0.0:
        return None
    return -F.value(u, v) / guv


def link_height(F: OneForm, G: OneForm, edge, w: int) -> float:
    """h(w) = (H(uw) + H(vw)) / 2 for H = F + lambda* G.

    Requires lambda*(edge) defined.  For coboundary inputs F = df, G = dg
    this equals h(w) - h(u) with h = f + lambda* g.
    """
    u, v = edge
    lam = lambda_star(F, G, edge)
    if lam is None:
        raise ZeroDivisionError(f"lambda* undefined on edge ({u}, {v})")
    huw = F.value(u, w) + lam * G.value(u, w)
    hvw = F.value(v, w) + lam * G.value(v, w)
    return 0.5 * (huw + hvw)


def multiplicity_from_link_signs(signs) -> int:
    """abs(beta0 - 1) for a cyclic sign vector of link heights.

    beta0 counts the negative-to-positive transitions around the cycle; the
    result equals the sum of reduced Betti numbers of the lower link (1 for
    the empty and the full circle, number of arcs minus 1 otherwise).
    """
    signs = np.asarray(signs)
    if np.any(signs == 0):
        raise ZeroLinkValueError(
            "link sign vector contains a zero; resolve ties first"
        )
    nxt = np.roll(signs, -1)
    beta0 = int(np.count_nonzero((signs < 0) & (nxt > 0)))
    return abs(beta0 - 1)


def _tie_broken_sign(sigma: int, w: int, u: int, v: int) -> int:
    # symbolic perturbation: h(w) = 0 counts as negative iff id(w) precedes
    # both edge endpoints
    if sigma != 0:
        return sigma
    return -1 if w < min(u, v) else 1


def _link_signs_forms(F: OneForm, G: OneForm, u: int, v: int, cycle):
    fuv = F.value(u, v)
    guv = G.value(u, v)
    gsign = _sign(-guv)
    signs = []
    ties = False
    for w in cycle:
        sigma = _certified_pair_sign(
            [
                (-guv, F.value(u, w)),
                (fuv, G.value(u, w)),
                (-guv, F.value(v, w)),
                (fuv, G.value(v, w)),
            ]
        )
        sigma *= gsign
        if sigma == 0:
            ties = True
        signs.append(_tie_broken_sign(sigma, w, u, v))
    return signs, ties


def edge_multiplicity_2d(
    F: OneForm, G: OneForm, edge, link=None, epsilon: float = 0.0
) -> tuple[int, bool]:
    """Eq.-style 2D test on the two unhalved sums H(uw) + H(vw).

    Returns ``(multiplicity, epsilon_triggered)``: multiplicity 1 when the
    product of the sums is strictly positive, or when ``epsilon > 0`` and
    either sum is below ``epsilon`` in magnitude (then the flag is set).
    """
    c = F.complex
    u, v = int(edge[0]), int(edge[1])
    if link is None:
        link = c.edge_link(u, v).vertices
    a, b = link
    fuv = F.value(u, v)
    guv = G.value(u, v)
    if guv == 0.0:
        return 0, False
    sums = {}
    sigmas = {}
    for w in (a, b):
        terms = [
            (-guv, F.value(u, w)),
            (fuv, G.value(u, w)),
            (-guv, F.value(v, w)),
            (fuv, G.value(v, w)),
        ]
        sigmas[w] = _certified_pair_sign(terms)
        sums[w] = sum(x * y for x, y in terms)
    if sigmas[a] * sigmas[b] > 0:
        return 1, False
    if epsilon > 0:
        bound = epsilon * abs(guv)
        if abs(sums[a]) < bound or abs(sums[b]) < bound:
            return 1, True
    return 0, False


def edge_multiplicity_3d(F: OneForm, G: OneForm, edge, cycle=None) -> int:
    """abs(beta0 - 1) over the certified link-height signs of a 3D edge.

    Zero heights are resolved by the deterministic id perturbation, so the
    result is always defined; degeneracies surface in the set diagnostics.
    """
    c = F.complex
    u, v = int(edge[0]), int(edge[1])
    if cycle is None:
        cycle = c.edge_link(u, v).vertices
    if G.value(u, v) == 0.0:
        return 0
    signs, _ = _link_signs_forms(F, G, u, v, cycle)
    return multiplicity_from_link_signs(signs)


@dataclass(frozen=True)
class EdgeTestResult:
    """Full record of one edge test (diagnostic companion to the set ops)."""

    edge: tuple[int, int]
    lambda_star: float | None
    link_values: tuple[float, ...]
    multiplicity: int
    epsilon_triggered: bool


def edge_test(
    c: SimplicialComplex, F: OneForm, G: OneForm, edge, epsilon: float = 0.0
) -> EdgeTestResult:
    """Run the dimension-appropriate test on one interior edge."""
    u, v = int(edge[0]), int(edge[1])
    link = c.edge_link(u, v)  # raises BoundaryEdgeError on the boundary
    lam = lambda_star(F, G, (u, v))
    if lam is None:
        return EdgeTestResult((u, v), None, (), 0, False)
    heights = tuple(link_height(F, G, (u, v), w) for w in link.vertices)
    if c.dim == 2:
        mult, trig = edge_multiplicity_2d(F, G, (u, v), link.vertices, epsilon)
    else:
        mult, trig = edge_multiplicity_3d(F, G, (u, v), link.vertices), False
    return EdgeTestResult((u, v), lam, heights, mult, trig)


# -- whole-complex assembly ---------------------------------------------------


@dataclass
class JacobiDiagnostics:
    """Edges excluded from or flagged by the set assembly."""

    dim: int
    epsilon: float
    n_interior_edges: int
    boundary_edges: np.ndarray
    skipped_edges: np.ndarray  # G(uv) = 0, lambda* undefined
    degenerate_edges: np.ndarray  # an exactly zero sum or link height


@dataclass
class JacobiSet:
    """Edges of nonzero multiplicity together with their endpoints."""

    complex: SimplicialComplex
    edges: np.ndarray  # (m, 2), canonical order, lexicographically sorted
    multiplicities: np.ndarray
    lambda_stars: np.ndarray
    epsilon_triggered: np.ndarray
    diagnostics: JacobiDiagnostics

    @property
    def vertices(self) -> np.ndarray:
        return np.unique(self.edges)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.edges}

    def degrees(self) -> dict[int, int]:
        """Vertex degrees in the subcomplex, each edge counted once."""
        ids, counts = np.unique(self.edges, return_counts=True)
        return {int(i): int(n) for i, n in zip(ids, counts)}

    def __len__(self) -> int:
        return len(self.edges)


def _empty_pairs() -> np.ndarray:
    return np.empty((0, 2), dtype=np.int64)


def _jacobi_2d_forms(c: SimplicialComplex, F: OneForm, G: OneForm, epsilon: float):
    inter = c.interior_edge_ids()
    u = c.edges[inter, 0]
    v = c.edges[inter, 1]
    a = c.opposite[inter, 0]
    b = c.opposite[inter, 1]
    fuv = F.values[inter]
    guv = G.values[inter]
    gvu = -guv

    # one batched lookup for the eight cross-edge values
    pairs = np.concatenate(
        [
            np.column_stack([u, a]),
            np.column_stack([v, a]),
            np.column_stack([u, b]),
            np.column_stack([v, b]),
        ]
    )
    ids, signs = c.edge_ids(pairs)
    m = len(inter)
    fua, fva, fub, fvb = (signs * F.values[ids]).reshape(4, m)
    gua, gva, gub, gvb = (signs * G.values[ids]).reshape(4, m)

    keep = guv != 0.0
    sig_a = np.zeros(m, dtype=np.int8)
    sig_b = np.zeros(m, dtype=np.int8)
    sig_a[keep] = _certified_sum_signs(
        [t[keep] for t in (gvu, fua, fuv, gua, gvu, fva, fuv, gva)]
    )
    sig_b[keep] = _certified_sum_signs(
        [t[keep] for t in (gvu, fub, fuv, gub, gvu, fvb, fuv, gvb)]
    )

    member = keep & (sig_a * sig_b > 0)
    triggered = np.zeros(m, dtype=bool)
    if epsilon > 0:
        sum_a = gvu * fua + fuv * gua + gvu * fva + fuv * gva
        sum_b = gvu * fub + fuv * gub + gvu * fvb + fuv * gvb
        bound = epsilon * np.abs(guv)
        near = keep & ~member & (
            (np.abs(sum_a) < bound) | (np.abs(sum_b) < bound)
        )
        member |= near
        triggered = near

    degen = keep & ((sig_a == 0) | (sig_b == 0))
    mult = member.astype(np.int64)

    lam = np.full(m, np.nan)
    np.divide(-fuv, guv, out=lam, where=keep)

    diags = JacobiDiagnostics(
        dim=2,
        epsilon=epsilon,
        n_interior_edges=m,
        boundary_edges=c.edges[c.boundary_edge_mask],
        skipped_edges=c.edges[inter[~keep]],
        degenerate_edges=c.edges[inter[degen]],
    )
    sel = member
    return JacobiSet(
        complex=c,
        edges=c.edges[inter[sel]],
        multiplicities=mult[sel],
        lambda_stars=lam[sel],
        epsilon_triggered=triggered[sel],
        diagnostics=diags,
    )


def _jacobi_3d_forms(c: SimplicialComplex, F: OneForm, G: OneForm, epsilon: float):
    inter = c.interior_edge_ids()
    rows = []
    skipped = []
    degenerate = []
    for eid in inter:
        u, v = (int(x) for x in c.edges[eid])
        guv = float(G.values[eid])
        if guv == 0.0:
            skipped.append((u, v))
            continue
        cycle = c._links[eid]
        signs, ties = _link_signs_forms(F, G, u, v, cycle)
        if ties:
            degenerate.append((u, v))
        mult = multiplicity_from_link_signs(signs)
        if mult >= 1:
            rows.append((u, v, mult, -float(F.values[eid]) / guv))
    edges = (
        np.array([(r[0], r[1]) for r in rows], dtype=np.int64)
        if rows
        else _empty_pairs()
    )
    diags = JacobiDiagnostics(
        dim=3,
        epsilon=epsilon,
        n_interior_edges=len(inter),
        boundary_edges=c.edges[c.boundary_edge_mask],
        skipped_edges=np.array(skipped, dtype=np.int64) if skipped else _empty_pairs(),
        degenerate_edges=np.array(degenerate, dtype=np.int64)
        if degenerate
        else _empty_pairs(),
    )
    return JacobiSet(
        complex=c,
        edges=edges,
        multiplicities=np.array([r[2] for r in rows], dtype=np.int64),
        lambda_stars=np.array([r[3] for r in rows]),
        epsilon_triggered=np.zeros(len(rows), dtype=bool),
        diagnostics=diags,
    )


def jacobi_set(
    c: SimplicialComplex, F: OneForm, G: OneForm, epsilon: float = 0.0
) -> JacobiSet:
    """All interior edges of nonzero multiplicity for the 1-form pair.

    Edges with G(uv) = 0 are skipped (lambda* undefined), boundary edges are
    excluded; both are listed in the diagnostics.  ``epsilon`` widens the 2D
    test per the near-degenerate variant; the 3D multiplicity has no epsilon
    analogue and ignores it.
    """
    if F.complex is not c or G.complex is not c:
        raise FormFormatError("forms are not bound to the given complex")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    if c.dim == 2:
        return _jacobi_2d_forms(c, F, G, epsilon)
    if c.dim == 3:
        return _jacobi_3d_forms(c, F, G, epsilon)
    raise DimensionUnsupportedError(f"dimension {c.dim} not supported")


def _jacobi_2d_fn(c: SimplicialComplex, f: ScalarField, g: ScalarField):
    fv = f.values
    gv = g.values
    inter = c.interior_edge_ids()
    u = c.edges[inter, 0]
    v = c.edges[inter, 1]
    a = c.opposite[inter, 0]
    b = c.opposite[inter, 1]

    dgvu = gv[u] - gv[v]
    dfuv = fv[v] - fv[u]
    keep = dgvu != 0.0

    m = len(inter)
    sig = {}
    for name, w in (("a", a), ("b", b)):
        terms = [dgvu, fv[w] - fv[u], dfuv, gv[w] - gv[u]]
        s = np.zeros(m, dtype=np.int8)
        prods = [terms[0] * terms[1], terms[2] * terms[3]]
        tot = prods[0] + prods[1]
        theta = np.abs(prods[0]) + np.abs(prods[1])
        s[keep] = np.sign(tot[keep]).astype(np.int8)
        unsure = keep & (np.abs(tot) <= GAMMA * theta)
        for i in np.nonzero(unsure)[0]:
            s[i] = _certified_link_sign_fn(fv, gv, int(u[i]), int(v[i]), int(w[i]))
        sig[name] = s

    member = keep & (sig["a"] * sig["b"] > 0)
    degen = keep & ((sig["a"] == 0) | (sig["b"] == 0))
    lam = np.full(m, np.nan)
    np.divide(dfuv, dgvu, out=lam, where=keep)

    diags = JacobiDiagnostics(
        dim=2,
        epsilon=0.0,
        n_interior_edges=m,
        boundary_edges=c.edges[c.boundary_edge_mask],
        skipped_edges=c.edges[inter[~keep]],
        degenerate_edges=c.edges[inter[degen]],
    )
    return JacobiSet(
        complex=c,
        edges=c.edges[inter[member]],
        multiplicities=member.astype(np.int64)[member],
        lambda_stars=lam[member],
        epsilon_triggered=np.zeros(int(member.sum()), dtype=bool),
        diagnostics=diags,
    )


def _jacobi_3d_fn(c: SimplicialComplex, f: ScalarField, g: ScalarField):
    fv = f.values
    gv = g.values
    inter = c.interior_edge_ids()
    rows = []
    skipped = []
    degenerate = []
    for eid in inter:
        u, v = (int(x) for x in c.edges[eid])
        if gv[u] == gv[v]:
            skipped.append((u, v))
            continue
        dgsign = _sign(gv[u] - gv[v])
        signs = []
        ties = False
        for w in c._links[eid]:
            sigma = _certified_link_sign_fn(fv, gv, u, v, w) * dgsign
            if sigma == 0:
                ties = True
            signs.append(_tie_broken_sign(sigma, w, u, v))
        if ties:
            degenerate.append((u, v))
        mult = multiplicity_from_link_signs(signs)
        if mult >= 1:
            rows.append((u, v, mult, (fv[v] - fv[u]) / (gv[u] - gv[v])))
    edges = (
        np.array([(r[0], r[1]) for r in rows], dtype=np.int64)
        if rows
        else _empty_pairs()
    )
    diags = JacobiDiagnostics(
        dim=3,
        epsilon=0.0,
        n_interior_edges=len(inter),
        boundary_edges=c.edges[c.boundary_edge_mask],
        skipped_edges=np.array(skipped, dtype=np.int64) if skipped else _empty_pairs(),
        degenerate_edges=np.array(degenerate, dtype=np.int64)
        if degenerate
        else _empty_pairs(),
    )
    return JacobiSet(
        complex=c,
        edges=edges,
        multiplicities=np.array([r[2] for r in rows], dtype=np.int64),
        lambda_stars=np.array([r[3] for r in rows]),
        epsilon_triggered=np.zeros(len(rows), dtype=bool),
        diagnostics=diags,
    )


def jacobi_set_functions(
    c: SimplicialComplex, f: ScalarField, g: ScalarField
) -> JacobiSet:
    """Function-case Jacobi set, tested directly on vertex differences.

    Uses lambda* = df(uv)/dg(vu) and the signs of dh on the link with
    h = f + lambda* g; edges with g(u) = g(v) are disregarded.  For generic
    inputs the result coincides edge-for-edge with
    ``jacobi_set(coboundary(f), coboundary(g), 0)``.
    """
    if f.complex is not c or g.complex is not c:
        raise FormFormatError("fields are not bound to the given complex")
    if c.dim == 2:
        return _jacobi_2d_fn(c, f, g)
    if c.dim == 3:
        return _jacobi_3d_fn(c, f, g)
    raise DimensionUnsupportedError(f"dimension {c.dim} not supported")


# -- degrees ------------------------------------------------------------------


@dataclass
class DegreeReport:
    """Vertex degrees in the Jacobi subcomplex, with parity flags.

    Degrees count each edge once (multiplicity disregarded), matching the
    statement of the even-degree lemma.  The lemma applies to vertices whose
    star lies fully in the mesh, so parity is additionally summarized over
    interior vertices.
    """

    degrees: dict[int, int]
    odd_vertices: list[int]
    odd_interior_vertices: list[int]
    n_even: int
    n_odd: int


def degree_report(j: JacobiSet) -> DegreeReport:
    degrees = j.degrees()
    odd = sorted(v for v, d in degrees.items() if d % 2)
    bmask = j.complex.boundary_vertex_mask
    odd_interior = [v for v in odd if not bmask[v]]
    return DegreeReport(
        degrees=degrees,
        odd_vertices=odd,
        odd_interior_vertices=odd_interior,
        n_even=len(degrees) - len(odd),
        n_odd=len(odd),
    )


# -- CSV and sidecar report ---------------------------------------------------

CSV_HEADER = "u,v,multiplicity,lambda_star,epsilon_triggered"


def write_jacobi_csv(j: JacobiSet, path) -> None:
    """One row per Jacobi edge: ``u,v,multiplicity,lambda_star,epsilon_triggered``."""
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for (u, v), mult, lam, trig in zip(
            j.edges, j.multiplicities, j.lambda_stars, j.epsilon_triggered
        ):
            fh.write(
                f"{u},{v},{mult},{float(lam)!r},{'true' if trig else 'false'}\n"
            )


def read_jacobi_csv(path) -> list[tuple[int, int, int, float, bool]]:
    """Rows of a Jacobi CSV written by :func:`write_jacobi_csv`."""
    rows = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise FormFormatError(f"{path}: unexpected header {header!r}")
        for ln, raw in enumerate(fh, 2):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 5:
                raise FormFormatError(f"{path}:{ln}: expected 5 columns")
            try:
                u, v, mult = int(parts[0]), int(parts[1]), int(parts[2])
                lam = float(parts[3])
                trig = parts[4].strip().lower() in ("true", "1")
            except ValueError as exc:
                raise FormFormatError(f"{path}:{ln}: malformed row") from exc
            rows.append((u, v, mult, lam, trig))
    return rows


def _write_pair_section(fh, name: str, pairs: np.ndarray) -> None:
    fh.write(f"[{name}] {len(pairs)}\n")
    for u, v in pairs:
        fh.write(f"{u} {v}\n")


def write_report(j: JacobiSet, path) -> None:
    """Sidecar diagnostics: skipped/boundary/degenerate edges, odd vertices."""
    rep = degree_report(j)
    d = j.diagnostics
    bmask = j.complex.boundary_vertex_mask
    with open(path, "w") as fh:
        fh.write(f"dim {d.dim}\n")
        fh.write(f"epsilon {d.epsilon!r}\n")
        fh.write(f"interior_edges {d.n_interior_edges}\n")
        fh.write(f"jacobi_edges {len(j)}\n")
        fh.write(f"jacobi_vertices {len(j.vertices)}\n")
        fh.write(f"epsilon_triggered {int(np.count_nonzero(j.epsilon_triggered))}\n")
        fh.write(f"even_degree_vertices {rep.n_even}\n")
        fh.write(f"odd_degree_vertices {rep.n_odd}\n")
        fh.write(f"odd_interior_vertices {len(rep.odd_interior_vertices)}\n")
        _write_pair_section(fh, "skipped_edges", d.skipped_edges)
        _write_pair_section(fh, "degenerate_edges", d.degenerate_edges)
        _write_pair_section(fh, "boundary_edges", d.boundary_edges)
        fh.write(f"[odd_degree_vertices] {rep.n_odd}\n")
        for vtx in rep.odd_vertices:
            kind = "boundary" if bmask[vtx] else "interior"
            fh.write(f"{vtx} {kind}\n")
