"""Command line entry point: ``projmoduli verify|connection|geodesic|weyl|reproduce``.

Exit codes: 0 all checks pass, 1 a numeric check failed its tolerance, 2 bad input.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from typing import List

import click
import numpy as np

from .cech import split_cocycle
from .config import ConfigError, load_config
from .family import COVER_PARAMS, FamilyInvariantError, OutsideValidityError, normal_bundle_degree
from .projconn import PipelineField, geodesic_integrate, pipeline_connection
from .report import COMPUTED, DERIVED, Row, jsonable, reproduce_report

EXIT_OK, EXIT_NUMERIC, EXIT_INPUT = 0, 1, 2


class InputError(click.ClickException):
    exit_code = EXIT_INPUT


def _parse_vector(text: str, name: str) -> np.ndarray:
    try:
        return np.array([complex(x.strip().replace(" ", "")) for x in text.split(",")])
    except ValueError:
        raise InputError(f"--{name}: expected comma-separated numbers, got {text!r}") from None


def _load(path: str):
    try:
        return load_config(path)
    except (ConfigError, FamilyInvariantError) as exc:
        raise InputError(str(exc)) from None


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        click.echo(text)


def _rows_json(rows: List[Row], extra: dict | None = None) -> str:
    doc = {**(extra or {}), "pass": all(r.passed for r in rows), "rows": [r.as_dict() for r in rows]}
    return json.dumps(jsonable(doc), indent=2)


def _rows_csv(rows: List[Row]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["quantity", "residual", "tolerance", "pass", "provenance", "error"])
    for r in rows:
        w.writerow([r.quantity, r.residual, r.tolerance, r.passed, r.provenance, r.error])
    return buf.getvalue()


def _check_t(fam, t):
    if t.shape != (fam.m,):
        raise InputError(f"--t: expected {fam.m} values, got {t.size}")
    try:
        fam.check_t(t)
    except OutsideValidityError as exc:
        raise InputError(str(exc)) from None


@click.group()
def main():
    """Projective structures on moduli of compact complex hypersurfaces."""


@main.command()
@click.argument("config")
@click.option("--tol", type=float, default=None, help="override the pass tolerance of every row")
@click.option("--grid", type=int, default=2, show_default=True, help="points per axis for the cocycle checks")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
def verify(config, tol, grid, out, fmt):
    """Check family invariants and the cocycle / splitting pipeline."""
    cfg = _load(config)
    fam, tols = cfg.family, cfg.tolerances
    rows: List[Row] = []
    deg = normal_bundle_degree(fam, fam.t0)
    rows.append(Row("normal bundle degree", list(fam.t0), deg, None, None, None, True, DERIVED))
    from .report import grid_points

    pts = grid_points(fam.t0, 0.5 * fam.radius, grid)
    z = fam.sample_z(32)
    for t in pts:
        try:
            j = fam.jets(z, t)
            r = j.compatibility_residual
            lim = tol or tols["compatibility"]
            rows.append(Row("chart compatibility", list(t), None, None, r, lim, r < lim, COMPUTED))
            _, diag = split_cocycle(fam, t, tol=tols["split_residual"], tail_tol=tols["tail"])
            lim = tol or tols["split_residual"]
            rows.append(Row("cocycle split residual", list(t), None, None, diag.residual, lim,
                            diag.residual < lim, COMPUTED))
            G = pipeline_connection(fam, t)
            lim = tol or tols["extract"]
            rows.append(Row("extraction residual", list(t), None, None, G.residual, lim, G.residual < lim, COMPUTED))
        except (ArithmeticError, ValueError) as exc:
            rows.append(Row("pipeline", list(t), None, None, None, None, False, COMPUTED,
                            error=f"{type(exc).__name__}: {exc}"))
    _emit(_rows_json(rows, {"family": fam.name}) if fmt == "json" else _rows_csv(rows), out)
    sys.exit(EXIT_OK if all(r.passed for r in rows) else EXIT_NUMERIC)


@main.command()
@click.argument("config")
@click.option("--t", "t_text", required=True, help="parameter point, comma separated")
@click.option("--tol", type=float, default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
def connection(config, t_text, tol, out, fmt):
    """Christoffel symbols of the extracted connection at one point."""
    cfg = _load(config)
    fam = cfg.family
    t = _parse_vector(t_text, "t")
    _check_t(fam, t)
    lim = tol or cfg.tolerances["extract"]
    try:
        G = pipeline_connection(fam, t)
    except ArithmeticError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_NUMERIC)
    entries = [{"gamma": g, "alpha": a, "beta": b, "value": G.G[g, a, b]}
               for g in range(fam.m) for a in range(fam.m) for b in range(a, fam.m)]
    if fmt == "json":
        doc = {"family": fam.name, "params": list(fam.params), "t": t, "entries": entries,
               "residual": G.residual, "tolerance": lim, "pass": G.residual < lim, "provenance": COMPUTED}
        text = json.dumps(jsonable(doc), indent=2)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["gamma", "alpha", "beta", "value_re", "value_im"])
        for e in entries:
            w.writerow([e["gamma"], e["alpha"], e["beta"], repr(float(e["value"].real)), repr(float(e["value"].imag))])
        text = buf.getvalue()
    _emit(text, out)
    sys.exit(EXIT_OK if G.residual < lim else EXIT_NUMERIC)


@main.command()
@click.argument("config")
@click.option("--t", "t_text", required=True, help="start point")
@click.option("--v", "v_text", required=True, help="initial velocity")
@click.option("--smax", type=float, default=1.0, show_default=True)
@click.option("--samples", type=int, default=101, show_default=True)
@click.option("--tol", type=float, default=1e-10, show_default=True, help="integrator relative tolerance")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="csv", show_default=True)
def geodesic(config, t_text, v_text, smax, samples, tol, out, fmt):
    """Integrate a geodesic of the extracted connection; CSV of (s, t, dt/ds)."""
    fam = _load(config).family
    t = _parse_vector(t_text, "t")
    v = _parse_vector(v_text, "v")
    _check_t(fam, t)
    if v.shape != (fam.m,) or not np.any(v):
        raise InputError(f"--v: expected {fam.m} values, not all zero")
    try:
        path = geodesic_integrate(PipelineField(fam), t, v, smax, rtol=tol, center=fam.t0, radius=fam.radius)
    except ArithmeticError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_NUMERIC)
    s = np.linspace(0, smax, samples)
    ts, vs = path.at(s)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        head = ["s"] + [f"t{k}_{p}" for k in range(fam.m) for p in ("re", "im")] \
            + [f"v{k}_{p}" for k in range(fam.m) for p in ("re", "im")]
        w.writerow(head)
        for i, si in enumerate(s):
            row = [repr(float(si))]
            for arr in (ts[i], vs[i]):
                for x in arr:
                    row += [repr(float(x.real)), repr(float(x.imag))]
            w.writerow(row)
        text = buf.getvalue()
    else:
        text = json.dumps(jsonable({"family": fam.name, "s": s, "t": ts, "v": vs, "nfev": path.nfev}), indent=2)
    _emit(text, out)


@main.command()
@click.argument("config")
@click.option("--t", "t_text", required=True)
@click.option("--tol", type=float, default=None, help="Einstein-Weyl residual tolerance (default 1e-6)")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
def weyl(config, t_text, tol, out, fmt):
    """Metric, a, b, omega, Weyl connection and Einstein-Weyl residual at one point."""
    from .weyl import einstein_weyl_residual, metric_closed_form, solve_ab, weyl_from_connection

    cfg = _load(config)
    fam = cfg.family
    if fam.params != COVER_PARAMS or fam.m != 3:
        raise InputError("weyl needs the (t0, t1, t2) branched-cover parameterization (no metric for this family)")
    t = _parse_vector(t_text, "t")
    _check_t(fam, t)
    g = metric_closed_form()
    field_ = PipelineField(fam)
    try:
        ab = solve_ab(field_, g, t, tol=None)
        W = weyl_from_connection(field_, g, tol=cfg.tolerances["ab"])
        ew = einstein_weyl_residual(W, t)
    except ArithmeticError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_NUMERIC)
    lim = tol or 1e-6
    rows = [
        Row("solve_ab residual", list(t), None, None, ab.residual, cfg.tolerances["ab"],
            ab.residual < cfg.tolerances["ab"], COMPUTED),
        Row("Weyl compatibility", list(t), None, None, W.compatibility_residual(t), 1e-8,
            W.compatibility_residual(t) < 1e-8, COMPUTED),
        Row("Einstein-Weyl residual", list(t), None, None, ew, lim, ew < lim, COMPUTED),
    ]
    if fmt == "json":
        doc = {"family": fam.name, "t": t, "g": g(t), "a": ab.a, "b": ab.b, "omega": ab.omega,
               "D": W.at(t).G, "einstein_weyl_residual": ew}
        text = _rows_json(rows, doc)
    else:
        text = _rows_csv(rows)
    _emit(text, out)
    sys.exit(EXIT_OK if all(r.passed for r in rows) else EXIT_NUMERIC)


@main.command()
@click.argument("builder")
@click.option("--grid", type=int, default=3, show_default=True, help="points per axis")
@click.option("--half-width", type=float, default=0.15, show_default=True)
@click.option("--tol", type=float, default=None, help="override the extraction tolerance")
@click.option("--no-ew", is_flag=True, help="skip the Einstein-Weyl rows")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="write the JSON report here")
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "table"]), default="table", show_default=True)
def reproduce(builder, grid, half_width, tol, no_ew, out, fmt):
    """Reproduction report for a builder family ("quadric-11" or "branched-cover-12")."""
    from .family import BUILDERS

    if builder not in BUILDERS:
        raise InputError(f"unknown builder {builder!r}; expected one of {sorted(BUILDERS)}")
    if grid < 1:
        raise InputError("--grid must be positive")
    report = reproduce_report(builder, half_width, grid, tolerances={"extract": tol} if tol else None,
                              ew=not no_ew)
    if out:
        _emit(report.to_json(), out)
    if fmt == "json":
        click.echo(report.to_json())
    elif fmt == "csv":
        click.echo(_rows_csv(report.rows), nl=False)
    else:
        click.echo(report.table())
    sys.exit(EXIT_OK if report.passed else EXIT_NUMERIC)


if __name__ == "__main__":  # pragma: no cover
    main()
