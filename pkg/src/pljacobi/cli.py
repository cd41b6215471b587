"""Command-line driver: meshes, discretization, Jacobi sets, oracle, export.

Every subcommand echoes its configuration as JSON next to its primary output
and fails with a one-line diagnostic and nonzero exit on malformed input.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import FormFormatError, PLJacobiError
from .forms import (
    AnalyticForm,
    ScalarField,
    discretize_midpoint,
    discretize_quadrature,
    read_one_form,
    read_scalar_field,
    read_vector_samples,
    write_one_form,
    write_scalar_field,
)
from .jacobi import (
    JacobiDiagnostics,
    JacobiSet,
    degree_report,
    jacobi_set,
    jacobi_set_functions,
    read_jacobi_csv,
    write_jacobi_csv,
    write_report,
)
from .mesh import GRID_SCHEMES, generate_grid, read_mesh, write_mesh
from .oracle import (
    BUILTIN_PAIRS,
    DEFAULT_BBOX,
    FIG2_BBOX,
    FIG2_STEP,
    AnalyticFormPair,
    builtin_pair,
    determinant_field,
    distance_report,
    fig2_functions,
    marching_squares,
    read_contour_csv,
    write_contour_csv,
)
from .plotting import ExportStyle, export_overlay_svg

TABLE1_STEPS = (0.1, 0.05, 0.01)
TABLE1_EPSILONS = (0.0, 0.00005, 0.0001, 0.001, 0.005)


def _config_dict(args: argparse.Namespace, extra=None) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    cfg["version"] = __version__
    if extra:
        cfg.update(extra)
    return cfg


def _write_config(cfg: dict, path: Path) -> None:
    with open(path, "w") as fh:
        json.dump(cfg, fh, sort_keys=True, indent=2, default=str)
        fh.write("\n")


def _echo_config(args: argparse.Namespace, anchor: Path, extra=None) -> None:
    _write_config(_config_dict(args, extra), anchor.parent / (anchor.name + ".config.json"))


def _lambdify(expr_text: str):
    import sympy

    x, y = sympy.symbols("x y")
    expr = sympy.sympify(expr_text)
    bad = expr.free_symbols - {x, y}
    if bad:
        raise FormFormatError(f"expression {expr_text!r} uses unknown symbols {bad}")
    fn = sympy.lambdify((x, y), expr, "numpy")

    def wrapped(px, py):
        return np.broadcast_to(
            np.asarray(fn(px, py), dtype=np.float64), np.shape(px)
        )

    return wrapped


def _parse_form_exprs(text: str, n: int) -> list:
    parts = [p.strip() for p in text.split(";")]
    if len(parts) != n or not all(parts):
        raise FormFormatError(
            f"expected {n} semicolon-separated expressions, got {text!r}"
        )
    return [_lambdify(p) for p in parts]


def _parse_field_spec(spec: str):
    """A field for discretize: builtin ``figN:F|G``, ``expr:P;Q`` or a sample file."""
    head, _, rest = spec.partition(":")
    if head == "expr" and rest:
        p, q = _parse_form_exprs(rest, 2)
        return AnalyticForm(p, q)
    if head in BUILTIN_PAIRS and rest:
        pair = builtin_pair(head)
        if rest not in ("F", "G"):
            raise FormFormatError(f"builtin component must be F or G, got {rest!r}")
        return pair.F if rest == "F" else pair.G
    return read_vector_samples(spec)


def _parse_bbox(tokens) -> tuple[float, float, float, float] | None:
    """Accept ``--bbox xmin,ymin,xmax,ymax`` or four space-separated numbers."""
    if tokens is None:
        return None
    parts: list[str] = []
    for t in tokens:
        parts.extend(t.replace(",", " ").split())
    if len(parts) != 4:
        raise FormFormatError(f"bbox needs 4 numbers, got {' '.join(tokens)!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise FormFormatError(f"malformed bbox {' '.join(tokens)!r}") from exc


def _parse_rule(rule: str) -> tuple[str, int]:
    if rule == "midpoint":
        return "midpoint", 0
    if rule.startswith("quad") and rule[4:].isdigit():
        order = int(rule[4:])
        if order >= 1:
            return "quad", order
    raise FormFormatError(f"unknown rule {rule!r}, expected midpoint or quadN")


def _empty_diagnostics(c, epsilon: float) -> JacobiDiagnostics:
    empty = np.empty((0, 2), dtype=np.int64)
    return JacobiDiagnostics(
        dim=c.dim,
        epsilon=epsilon,
        n_interior_edges=int(len(c.interior_edge_ids())),
        boundary_edges=c.edges[c.boundary_edge_mask],
        skipped_edges=empty,
        degenerate_edges=empty,
    )


def _jacobi_set_from_csv(c, path) -> JacobiSet:
    rows = read_jacobi_csv(path)
    edges = np.array([(r[0], r[1]) for r in rows], dtype=np.int64).reshape(-1, 2)
    return JacobiSet(
        complex=c,
        edges=edges,
        multiplicities=np.array([r[2] for r in rows], dtype=np.int64),
        lambda_stars=np.array([r[3] for r in rows]),
        epsilon_triggered=np.array([r[4] for r in rows], dtype=bool),
        diagnostics=_empty_diagnostics(c, 0.0),
    )


# -- subcommands --------------------------------------------------------------


def _cmd_gen_mesh(args) -> int:
    c = generate_grid(args.scheme, _parse_bbox(args.bbox), args.step)
    out = Path(args.out)
    write_mesh(c, out)
    _echo_config(args, out)
    print(f"gen-mesh: {args.scheme} nv={c.nv} ne={c.ne} nc={c.nc} -> {out}")
    return 0


def _cmd_discretize(args) -> int:
    c = read_mesh(args.mesh)
    field = _parse_field_spec(args.field)
    kind, order = _parse_rule(args.rule)
    if kind == "midpoint":
        form = discretize_midpoint(field, c)
    else:
        if not isinstance(field, AnalyticForm):
            raise FormFormatError(
                "quadrature needs an analytic field (builtin or expr), not samples"
            )
        form = discretize_quadrature(field, c, order)
    out = Path(args.out)
    write_one_form(form, out)
    _echo_config(args, out)
    print(f"discretize: {args.rule} on {c.ne} edges -> {out}")
    return 0


def _write_set_outputs(jset: JacobiSet, out: Path) -> None:
    write_jacobi_csv(jset, out)
    write_report(jset, out.parent / (out.name + ".report"))


def _cmd_jacobi(args) -> int:
    c = read_mesh(args.mesh)
    F = read_one_form(c, args.formF)
    G = read_one_form(c, args.formG)
    jset = jacobi_set(c, F, G, args.eps)
    out = Path(args.out)
    _write_set_outputs(jset, out)
    _echo_config(args, out)
    d = jset.diagnostics
    print(
        f"jacobi: {len(jset)} edges "
        f"({int(np.count_nonzero(jset.epsilon_triggered))} epsilon-triggered), "
        f"{len(d.skipped_edges)} skipped, {len(d.boundary_edges)} boundary -> {out}"
    )
    return 0


def _cmd_jacobi_fn(args) -> int:
    c = read_mesh(args.mesh)
    f = read_scalar_field(c, args.f)
    g = read_scalar_field(c, args.g)
    jset = jacobi_set_functions(c, f, g)
    out = Path(args.out)
    _write_set_outputs(jset, out)
    _echo_config(args, out)
    d = jset.diagnostics
    print(
        f"jacobi-fn: {len(jset)} edges, {len(d.skipped_edges)} skipped, "
        f"{len(d.boundary_edges)} boundary -> {out}"
    )
    return 0


def _oracle_pair(args) -> AnalyticFormPair:
    if args.pair == "custom":
        if not args.forms:
            raise FormFormatError("--pair custom requires --forms 'P;Q;R;S'")
        p, q, r, s = _parse_form_exprs(args.forms, 4)
        return AnalyticFormPair(AnalyticForm(p, q), AnalyticForm(r, s), "custom")
    return builtin_pair(args.pair)


def _cmd_oracle(args) -> int:
    pair = _oracle_pair(args)
    bbox = _parse_bbox(args.bbox) or (
        FIG2_BBOX if args.pair == "fig2" else DEFAULT_BBOX
    )
    contour = marching_squares(determinant_field(pair), bbox, args.res)
    out = Path(args.out)
    write_contour_csv(contour, out)
    _echo_config(args, out)
    degen = (
        f", {contour.degenerate_cells} degenerate cells"
        if contour.degenerate_cells
        else ""
    )
    print(
        f"oracle: {pair.name} -> {len(contour.polylines)} polylines, "
        f"{contour.n_points} points{degen} -> {out}"
    )
    return 0


def _cmd_compare(args) -> int:
    c = read_mesh(args.mesh)
    jset = _jacobi_set_from_csv(c, args.jacobi)
    contour = read_contour_csv(args.contour)
    rep = distance_report(jset, c.positions, contour, args.threshold)
    out = Path(args.out)
    with open(out, "w") as fh:
        json.dump(rep.summary(), fh, sort_keys=True, indent=2)
        fh.write("\n")
    _echo_config(args, out)
    print(
        f"compare: median={rep.median:.6g} mean={rep.mean:.6g} max={rep.max:.6g} "
        f"beyond {args.threshold:g}: {rep.n_beyond}/{rep.n_edges} -> {out}"
    )
    return 0


def _cmd_degrees(args) -> int:
    c = read_mesh(args.mesh)
    jset = _jacobi_set_from_csv(c, args.jacobi)
    rep = degree_report(jset)
    bmask = c.boundary_vertex_mask
    if args.out:
        out = Path(args.out)
        with open(out, "w") as fh:
            fh.write("vertex degree parity location\n")
            for vtx in sorted(rep.degrees):
                deg = rep.degrees[vtx]
                fh.write(
                    f"{vtx} {deg} {'odd' if deg % 2 else 'even'} "
                    f"{'boundary' if bmask[vtx] else 'interior'}\n"
                )
        _echo_config(args, out)
    print(
        f"degrees: {len(rep.degrees)} vertices, {rep.n_odd} odd "
        f"({len(rep.odd_interior_vertices)} interior)"
    )
    return 0


def _cmd_export(args) -> int:
    c = read_mesh(args.mesh)
    jset = _jacobi_set_from_csv(c, args.jacobi) if args.jacobi else None
    contour = read_contour_csv(args.contour) if args.contour else None
    style = ExportStyle(show_mesh=not args.no_mesh, title=args.title)
    out = Path(args.out)
    export_overlay_svg(c, jset, contour, out, style)
    _echo_config(args, out)
    print(f"export: -> {out}")
    return 0


# -- figure reproduction ------------------------------------------------------


def _repro_fig2(outdir: Path) -> list[str]:
    c = generate_grid("T1", FIG2_BBOX, FIG2_STEP)
    f_fn, g_fn = fig2_functions()
    f = ScalarField(c, f_fn(c.positions[:, 0], c.positions[:, 1]))
    g = ScalarField(c, g_fn(c.positions[:, 0], c.positions[:, 1]))
    write_scalar_field(f, outdir / "fig2_f.txt")
    write_scalar_field(g, outdir / "fig2_g.txt")
    jset = jacobi_set_functions(c, f, g)
    _write_set_outputs(jset, outdir / "fig2.csv")
    contour = marching_squares(determinant_field(builtin_pair("fig2")), FIG2_BBOX, 512)
    write_contour_csv(contour, outdir / "fig2_contour.csv")
    export_overlay_svg(c, jset, contour, outdir / "fig2.svg", ExportStyle(title="fig2"))
    return [
        "fig2_f.txt", "fig2_g.txt", "fig2.csv", "fig2.csv.report",
        "fig2_contour.csv", "fig2.svg",
    ]


def _repro_fig4(outdir: Path) -> list[str]:
    pair = builtin_pair("fig4")
    contour = marching_squares(determinant_field(pair), DEFAULT_BBOX, 512)
    write_contour_csv(contour, outdir / "fig4_contour.csv")
    files = ["fig4_contour.csv"]
    for scheme in GRID_SCHEMES:
        c = generate_grid(scheme, DEFAULT_BBOX, 0.1)
        F = discretize_midpoint(pair.F, c)
        G = discretize_midpoint(pair.G, c)
        jset = jacobi_set(c, F, G, 0.0)
        stem = f"fig4_{scheme}"
        _write_set_outputs(jset, outdir / f"{stem}.csv")
        export_overlay_svg(
            c, jset, contour, outdir / f"{stem}.svg",
            ExportStyle(title=f"fig4 {scheme} h=0.1"),
        )
        files += [f"{stem}.csv", f"{stem}.csv.report", f"{stem}.svg"]
    return files


def _repro_fig6(outdir: Path) -> list[str]:
    pair = builtin_pair("fig6")
    contour = marching_squares(determinant_field(pair), DEFAULT_BBOX, 512)
    write_contour_csv(contour, outdir / "fig6_contour.csv")
    c = generate_grid("T1", DEFAULT_BBOX, 0.05)
    F = discretize_quadrature(pair.F, c, 3)
    G = discretize_quadrature(pair.G, c, 3)
    jset = jacobi_set(c, F, G, 0.0)
    _write_set_outputs(jset, outdir / "fig6.csv")
    export_overlay_svg(
        c, jset, contour, outdir / "fig6.svg", ExportStyle(title="fig6 T1 h=0.05")
    )
    return ["fig6_contour.csv", "fig6.csv", "fig6.csv.report", "fig6.svg"]


def _repro_table1(outdir: Path) -> list[str]:
    pair = builtin_pair("fig6")
    contour = marching_squares(determinant_field(pair), DEFAULT_BBOX, 512)
    write_contour_csv(contour, outdir / "table1_contour.csv")
    files = ["table1_contour.csv"]
    for h in TABLE1_STEPS:
        c = generate_grid("T1", DEFAULT_BBOX, h)
        F = discretize_quadrature(pair.F, c, 3)
        G = discretize_quadrature(pair.G, c, 3)
        for eps in TABLE1_EPSILONS:
            jset = jacobi_set(c, F, G, eps)
            stem = f"table1_h{h:.2f}_eps{eps:.5f}"
            _write_set_outputs(jset, outdir / f"{stem}.csv")
            export_overlay_svg(
                c, jset, contour, outdir / f"{stem}.svg",
                ExportStyle(title=f"table1 h={h:g} eps={eps:g}"),
            )
            files += [f"{stem}.csv", f"{stem}.csv.report", f"{stem}.svg"]
    return files


def _cmd_repro(args) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    recipes = {
        "fig2": _repro_fig2,
        "fig4": _repro_fig4,
        "fig6": _repro_fig6,
        "table1": _repro_table1,
    }
    files = recipes[args.recipe](outdir)
    _write_config(
        _config_dict(args, {"files": sorted(files)}), outdir / "config.json"
    )
    print(f"repro {args.recipe}: {len(files)} files in {outdir}")
    return 0


# -- parser -------------------------------------------------------------------


def _allow_negative_values(parser: argparse.ArgumentParser) -> None:
    # let bbox values like -2,-2,2,2 or bare -2 pass as arguments
    parser._negative_number_matcher = re.compile(r"^-[\d.]")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pljacobi",
        description="Piecewise linear Jacobi sets of function and 1-form pairs.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("gen-mesh", help="generate a regular triangulation")
    _allow_negative_values(p)
    p.add_argument("--scheme", choices=GRID_SCHEMES, required=True)
    p.add_argument(
        "--bbox", nargs="+", required=True, metavar="XMIN,YMIN,XMAX,YMAX",
        help="four numbers, comma- or space-separated",
    )
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_mesh)

    p = sub.add_parser("discretize", help="turn a vector field into a 1-form")
    p.add_argument("--mesh", required=True)
    p.add_argument(
        "--field", required=True,
        help="sample file (x y u v), figN:F, figN:G, or expr:P;Q",
    )
    p.add_argument("--rule", default="midpoint", help="midpoint or quadN")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_discretize)

    p = sub.add_parser("jacobi", help="Jacobi set of two 1-form files")
    p.add_argument("--mesh", required=True)
    p.add_argument("--formF", required=True)
    p.add_argument("--formG", required=True)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_jacobi)

    p = sub.add_parser("jacobi-fn", help="Jacobi set of two vertex-function files")
    p.add_argument("--mesh", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_jacobi_fn)

    p = sub.add_parser("oracle", help="smooth Jacobi set as a determinant contour")
    _allow_negative_values(p)
    p.add_argument("--pair", choices=BUILTIN_PAIRS + ("custom",), required=True)
    p.add_argument("--forms", help="custom coefficients 'P;Q;R;S'")
    p.add_argument("--bbox", nargs="+", metavar="XMIN,YMIN,XMAX,YMAX")
    p.add_argument("--res", type=int, default=512)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("compare", help="distance report discrete vs smooth")
    p.add_argument("--jacobi", required=True)
    p.add_argument("--mesh", required=True)
    p.add_argument("--contour", required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("degrees", help="vertex degrees and parity of a Jacobi CSV")
    p.add_argument("--jacobi", required=True)
    p.add_argument("--mesh", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_degrees)

    p = sub.add_parser("export", help="SVG overlay of mesh, contour, Jacobi edges")
    p.add_argument("--mesh", required=True)
    p.add_argument("--jacobi")
    p.add_argument("--contour")
    p.add_argument("--no-mesh", action="store_true")
    p.add_argument("--title")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("repro", help="reproduce a figure or table end to end")
    p.add_argument("recipe", choices=("fig2", "fig4", "fig6", "table1"))
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=_cmd_repro)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PLJacobiError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
