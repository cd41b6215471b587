"""Shared mesh builders and independent reference oracles for the tests."""

import numpy as np

import pljacobi as pj


def butterfly():
    """Two triangles glued along the interior edge (0, 1); link is {2, 3}."""
    pos = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 1.0], [0.5, -1.0]])
    tris = np.array([[0, 1, 2], [0, 1, 3]])
    return pj.build_complex(pos, tris)


def octahedron():
    """Closed surface: 6 vertices, 8 triangles, every edge interior."""
    pos = np.array(
        [
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ]
    )
    tris = np.array(
        [
            [0, 2, 4],
            [2, 1, 4],
            [1, 3, 4],
            [3, 0, 4],
            [2, 0, 5],
            [1, 2, 5],
            [3, 1, 5],
            [0, 3, 5],
        ]
    )
    return pj.build_complex(pos, tris)


def bipyramid(k):
    """3D star of the axis edge (0, 1): k tetrahedra sharing it cyclically.

    Vertices 0 and 1 are the poles; 2..k+1 form the equatorial ring, so the
    link of the interior edge (0, 1) is a k-cycle.
    """
    ang = 2.0 * np.pi * np.arange(k) / k
    pos = np.zeros((k + 2, 3))
    pos[0, 2] = 1.0
    pos[1, 2] = -1.0
    pos[2:, 0] = np.cos(ang)
    pos[2:, 1] = np.sin(ang)
    tets = np.array([[0, 1, 2 + i, 2 + (i + 1) % k] for i in range(k)])
    return pj.build_complex(pos, tets)


def s4_boundary():
    """Boundary of the 4-simplex: the smallest closed 3-manifold complex."""
    pos = np.array(
        [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 1.0, 1.0],
        ]
    )
    tets = np.array(
        [[0, 1, 2, 3], [0, 1, 2, 4], [0, 1, 3, 4], [0, 2, 3, 4], [1, 2, 3, 4]]
    )
    return pj.build_complex(pos, tets)


def butterfly_forms(sum_a, sum_b, guv=-1.0):
    """Forms on the butterfly pinning the link sums for edge (0, 1).

    F(01) = 0 forces lambda* = 0, so the homogeneous sum at a link vertex w
    reduces to G(10) * (F(0w) + F(1w)).  With G(01) = -1 and F(1w) = 0 the
    sums are exactly the prescribed values.
    """
    c = butterfly()
    F = pj.OneForm.from_edge_dict(
        c,
        {
            (0, 1): 0.0,
            (0, 2): float(sum_a),
            (1, 2): 0.0,
            (0, 3): float(sum_b),
            (1, 3): 0.0,
        },
    )
    G = pj.OneForm.from_edge_dict(
        c, {(0, 1): float(guv), (0, 2): 1.0, (1, 2): 1.0, (0, 3): 1.0, (1, 3): 1.0}
    )
    return c, F, G


def bipyramid_forms(link_values, guv=-1.0):
    """Forms on a bipyramid pinning the link height signs for edge (0, 1).

    Same lambda* = 0 construction as butterfly_forms: the sign of h at ring
    vertex 2+i equals sign(link_values[i]).
    """
    k = len(link_values)
    c = bipyramid(k)
    fd = {(0, 1): 0.0}
    gd = {(0, 1): float(guv)}
    for i, s in enumerate(link_values):
        w = 2 + i
        fd[(0, w)] = float(s)
        fd[(1, w)] = 0.0
        gd[(0, w)] = 1.0
        gd[(1, w)] = 1.0
    for i in range(k):
        a, b = 2 + i, 2 + (i + 1) % k
        fd[(min(a, b), max(a, b))] = 0.0
        gd[(min(a, b), max(a, b))] = 1.0
    return c, pj.OneForm.from_edge_dict(c, fd), pj.OneForm.from_edge_dict(c, gd)


def brute_multiplicity(signs):
    """Reduced Betti sum of the lower link, computed structurally.

    Builds the subcomplex of the link circle spanned by the negative
    vertices, counts its connected components with union-find, and adds the
    top reduced Betti number (1 only when the whole circle survives).  The
    empty lower link contributes 1 through the degree -1 term.
    """
    k = len(signs)
    verts = [i for i in range(k) if signs[i] < 0]
    if not verts:
        return 1
    edges = [
        (i, (i + 1) % k)
        for i in range(k)
        if signs[i] < 0 and signs[(i + 1) % k] < 0
    ]
    parent = {v: v for v in verts}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        parent[find(a)] = find(b)
    comps = len({find(v) for v in verts})
    full_circle = len(verts) == k and len(edges) == k
    return (comps - 1) + (1 if full_circle else 0)


def random_function_pair(c, rng):
    """Uniform [0,1] vertex fields with exact edge ties rejected."""
    e = c.edges
    while True:
        fv = rng.uniform(size=c.nv)
        gv = rng.uniform(size=c.nv)
        if np.all(fv[e[:, 0]] != fv[e[:, 1]]) and np.all(gv[e[:, 0]] != gv[e[:, 1]]):
            return pj.ScalarField(c, fv), pj.ScalarField(c, gv)


def random_forms(c, rng):
    """Standard normal canonical edge values, resampled until all nonzero."""
    while True:
        fv = rng.standard_normal(c.ne)
        gv = rng.standard_normal(c.ne)
        if np.all(fv != 0.0) and np.all(gv != 0.0):
            break
    F = pj.OneForm.from_edge_dict(
        c, {(int(u), int(v)): float(x) for (u, v), x in zip(c.edges, fv)}
    )
    G = pj.OneForm.from_edge_dict(
        c, {(int(u), int(v)): float(x) for (u, v), x in zip(c.edges, gv)}
    )
    return F, G
