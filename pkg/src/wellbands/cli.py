"""Command-line client for the solver service.

Every data command builds a request from defaults, an optional JSON
config file and explicit flags (later sources win), posts it to the
service (in-process by default, a remote base URL with --server) and
renders the JSON reply as CSV or JSON.

Exit codes: 1 bad configuration, 2 numerical failure or transport
error, 3 resolution failure (grid too coarse), 4 verification
mismatch.
"""

from __future__ import annotations

import asyncio
import csv
import io
import json
import sys
from pathlib import Path
from typing import Literal

import click
import httpx
from pydantic import BaseModel, ConfigDict, ValidationError

from .potential import DEFAULT_MASS

_EXIT_BY_CATEGORY = {"config": 1, "numerical": 2, "resolution": 3}
_EXIT_BY_STATUS = {400: 1, 422: 1, 409: 3, 500: 2}
_PROBLEM_KEYS = (
    "v1",
    "v2",
    "n_cells",
    "mass",
    "rel_tol",
    "abs_tol",
    "tail_phase_tol",
    "scan_points",
)
# Keys whose values are energies, printed at 4 decimals under --paper.
_ENERGY_KEYS = {"energy", "energy_phase", "energy_fd", "abs_diff"}


class RunConfig(BaseModel):
    """Schema of the --config JSON file."""

    model_config = ConfigDict(extra="forbid")

    v1: float
    v2: float
    n_cells: int = 2
    mass: float = DEFAULT_MASS
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    tail_phase_tol: float = 1e-12
    scan_points: int = 400
    format: Literal["csv", "json"] = "csv"
    output: str | None = None


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_config(config_path: str | None, overrides: dict) -> RunConfig:
    merged: dict = {}
    if config_path is not None:
        try:
            merged.update(json.loads(Path(config_path).read_text(encoding="utf-8")))
        except OSError as exc:
            _fail(1, f"cannot read config file: {exc}")
        except json.JSONDecodeError as exc:
            _fail(1, f"config file is not valid JSON: {exc}")
        if not isinstance(merged, dict):
            _fail(1, "config file must hold a JSON object")
    merged.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig(**merged)
    except ValidationError as exc:
        lines = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
            for err in exc.errors()
        )
        _fail(1, f"bad configuration: {lines}")
        raise AssertionError("unreachable")


def _post(server: str | None, path: str, body: dict) -> httpx.Response:
    async def _go() -> httpx.Response:
        if server:
            async with httpx.AsyncClient(base_url=server, timeout=600.0) as client:
                return await client.post(path, json=body)
        from .service.app import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://service", timeout=600.0
        ) as client:
            return await client.post(path, json=body)

    try:
        response = asyncio.run(_go())
    except httpx.HTTPError as exc:
        _fail(2, f"request failed: {exc}")
    if response.status_code != 200:
        try:
            envelope = response.json()
            category = envelope["category"]
            message = envelope["message"]
        except Exception:
            category, message = "numerical", response.text
        code = _EXIT_BY_CATEGORY.get(
            category, _EXIT_BY_STATUS.get(response.status_code, 2)
        )
        _fail(code, f"[{category}] {message}")
    return response


def _fmt(value: float | None, paper: bool) -> str:
    if value is None:
        return ""
    return f"{value:.4f}" if paper else f"{value:.10g}"


def _round_energies(obj, paper: bool):
    if not paper:
        return obj
    if isinstance(obj, dict):
        return {
            k: round(v, 4)
            if k in _ENERGY_KEYS and isinstance(v, float)
            else _round_energies(v, paper)
            for k, v in obj.items()
        }
    if isinstance(obj, list):
        return [_round_energies(v, paper) for v in obj]
    return obj


def _render_csv(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8", newline="")
    else:
        click.echo(text, nl=False)


def _render_json(data: dict, paper: bool) -> str:
    return json.dumps(_round_energies(data, paper), indent=2) + "\n"


def _band_rows(bands: list[dict], paper: bool) -> list[list[str]]:
    return [
        [
            str(b["band_index"]),
            _fmt(b["well_depth"], paper),
            _fmt(b["lower"]["energy"], paper),
            _fmt(b["upper"]["energy"], paper),
        ]
        for b in bands
    ]


def _problem_options(fn):
    opts = [
        click.option("--config", "config_path", default=None,
                     help="JSON file with run configuration."),
        click.option("--v1", type=float, default=None,
                     help="Depth of the left well train."),
        click.option("--v2", type=float, default=None,
                     help="Depth of the right well train."),
        click.option("--n-cells", type=int, default=None,
                     help="Total number of wells (even, >= 2)."),
        click.option("--mass", type=float, default=None,
                     help=f"Particle mass (default {DEFAULT_MASS})."),
        click.option("--rel-tol", type=float, default=None),
        click.option("--abs-tol", type=float, default=None),
        click.option("--tail-phase-tol", type=float, default=None),
        click.option("--scan-points", type=int, default=None,
                     help="Energy scan resolution for level search."),
        click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                     default=None, help="Output format (default csv)."),
        click.option("--output", default=None,
                     help="Write output to this file instead of stdout."),
        click.option("--paper", is_flag=True,
                     help="Print energies rounded to 4 decimal places."),
        click.option("--server", default=None,
                     help="Base URL of a running service; default is in-process."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _gather(config_path, output, fmt, **overrides) -> RunConfig:
    overrides["format"] = fmt
    overrides["output"] = output
    return _load_config(config_path, overrides)


def _problem_body(cfg: RunConfig) -> dict:
    return {k: getattr(cfg, k) for k in _PROBLEM_KEYS}


@click.group()
def main() -> None:
    """Bound levels and energy bands of finite trains of sinusoidal wells."""


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("wellbands.service.app:app", host=host, port=port)


@main.command()
@_problem_options
def levels(config_path, v1, v2, n_cells, mass, rel_tol, abs_tol,
           tail_phase_tol, scan_points, fmt, output, paper, server) -> None:
    """Bound levels of one configuration, with band-edge context rows."""
    cfg = _gather(config_path, output, fmt, v1=v1, v2=v2, n_cells=n_cells,
                  mass=mass, rel_tol=rel_tol, abs_tol=abs_tol,
                  tail_phase_tol=tail_phase_tol, scan_points=scan_points)
    data = _post(server, "/levels", _problem_body(cfg)).json()
    if cfg.format == "json":
        _emit(_render_json(data, paper), cfg.output)
        return
    entries = []
    for lv in data["levels"]:
        entries.append((lv["energy"], 1, [
            "level",
            str(lv["index_j"]),
            _fmt(lv["energy"], paper),
            "" if lv["band_index"] is None else str(lv["band_index"]),
            _fmt(lv["alpha"], paper),
            _fmt(lv["beta"], paper),
        ]))
    for band in data["bands"]:
        for side in ("lower", "upper"):
            entries.append((band[side]["energy"], 0, [
                "edge",
                "",
                _fmt(band[side]["energy"], paper),
                str(band["band_index"]),
                "",
                "",
            ]))
    entries.sort(key=lambda e: (e[0], e[1]))
    header = ["kind", "index_j", "energy", "band_index", "alpha", "beta"]
    _emit(_render_csv(header, [e[2] for e in entries]), cfg.output)


@main.command()
@_problem_options
def bands(config_path, v1, v2, n_cells, mass, rel_tol, abs_tol,
          tail_phase_tol, scan_points, fmt, output, paper, server) -> None:
    """Ground energy band of each distinct well depth."""
    cfg = _gather(config_path, output, fmt, v1=v1, v2=v2, n_cells=n_cells,
                  mass=mass, rel_tol=rel_tol, abs_tol=abs_tol,
                  tail_phase_tol=tail_phase_tol, scan_points=scan_points)
    data = _post(server, "/bands", _problem_body(cfg)).json()
    if cfg.format == "json":
        _emit(_render_json(data, paper), cfg.output)
        return
    header = ["band_index", "well_depth", "lower_energy", "upper_energy"]
    _emit(_render_csv(header, _band_rows(data["bands"], paper)), cfg.output)


@main.command()
@_problem_options
@click.option("--n-values", default="2,4,6", show_default=True,
              help="Comma-separated list of well counts.")
def sweep(config_path, v1, v2, n_cells, mass, rel_tol, abs_tol,
          tail_phase_tol, scan_points, fmt, output, paper, server,
          n_values) -> None:
    """Levels across several well counts, plus the shared band edges.

    CSV output is two tables: the long-form level table and the band
    table. With --output FILE the bands go to FILE with an "-edges"
    suffix before the extension; on stdout they follow a blank line.
    """
    cfg = _gather(config_path, output, fmt, v1=v1, v2=v2, n_cells=n_cells,
                  mass=mass, rel_tol=rel_tol, abs_tol=abs_tol,
                  tail_phase_tol=tail_phase_tol, scan_points=scan_points)
    try:
        parsed = [int(part) for part in n_values.split(",") if part.strip()]
    except ValueError:
        _fail(1, f"--n-values must be comma-separated integers, got {n_values!r}")
    body = _problem_body(cfg)
    body["n_values"] = parsed
    data = _post(server, "/sweep", body).json()
    if cfg.format == "json":
        _emit(_render_json(data, paper), cfg.output)
        return
    rows = [
        [
            str(r["n_cells"]),
            str(r["index_j"]),
            _fmt(r["energy"], paper),
            "" if r["band_index"] is None else str(r["band_index"]),
        ]
        for r in data["rows"]
    ]
    level_csv = _render_csv(["n_cells", "index_j", "energy", "band_index"], rows)
    edge_csv = _render_csv(
        ["band_index", "well_depth", "lower_energy", "upper_energy"],
        _band_rows(data["bands"], paper),
    )
    if cfg.output:
        target = Path(cfg.output)
        _emit(level_csv, cfg.output)
        _emit(edge_csv, str(target.with_name(target.stem + "-edges" + target.suffix)))
    else:
        _emit(level_csv + "\n" + edge_csv, None)


@main.command()
@_problem_options
@click.option("--index-j", default=0, show_default=True, type=int,
              help="Level index within the configuration.")
@click.option("--x-min", type=float, default=None)
@click.option("--x-max", type=float, default=None)
@click.option("--samples", default=801, show_default=True, type=int)
def wavefunction(config_path, v1, v2, n_cells, mass, rel_tol, abs_tol,
                 tail_phase_tol, scan_points, fmt, output, paper, server,
                 index_j, x_min, x_max, samples) -> None:
    """Sampled wavefunction of one bound level."""
    cfg = _gather(config_path, output, fmt, v1=v1, v2=v2, n_cells=n_cells,
                  mass=mass, rel_tol=rel_tol, abs_tol=abs_tol,
                  tail_phase_tol=tail_phase_tol, scan_points=scan_points)
    body = _problem_body(cfg)
    body.update(index_j=index_j, x_min=x_min, x_max=x_max, n_samples=samples)
    data = _post(server, "/wavefunction", body).json()
    if cfg.format == "json":
        _emit(_render_json(data, paper), cfg.output)
        return
    rows = [
        [_fmt(x, False), _fmt(f, False)]
        for x, f in zip(data["xs"], data["values"])
    ]
    _emit(_render_csv(["x", "f"], rows), cfg.output)


@main.command()
@_problem_options
@click.option("--oracle-points", default=8000, show_default=True, type=int,
              help="Interior grid points for the finite-difference check.")
@click.option("--padding", default=12.0, show_default=True, type=float,
              help="Free region kept on each side of the wells.")
@click.option("--tolerance", default=2e-3, show_default=True, type=float,
              help="Largest per-level disagreement accepted.")
def verify(config_path, v1, v2, n_cells, mass, rel_tol, abs_tol,
           tail_phase_tol, scan_points, fmt, output, paper, server,
           oracle_points, padding, tolerance) -> None:
    """Cross-check the levels against an independent discretisation.

    Exits 4 when the two methods disagree beyond the tolerance.
    """
    cfg = _gather(config_path, output, fmt, v1=v1, v2=v2, n_cells=n_cells,
                  mass=mass, rel_tol=rel_tol, abs_tol=abs_tol,
                  tail_phase_tol=tail_phase_tol, scan_points=scan_points)
    body = _problem_body(cfg)
    body.update(
        oracle_points=oracle_points, oracle_padding=padding, tolerance=tolerance
    )
    data = _post(server, "/verify", body).json()
    if cfg.format == "json":
        _emit(_render_json(data, paper), cfg.output)
    else:
        rows = [
            [
                str(r["index_j"]),
                _fmt(r["energy_phase"], paper),
                _fmt(r["energy_fd"], paper),
                f"{r['abs_diff']:.3e}",
            ]
            for r in data["rows"]
        ]
        header = ["index_j", "energy_phase", "energy_fd", "abs_diff"]
        _emit(_render_csv(header, rows), cfg.output)
    for warning in data["warnings"]:
        click.echo(f"warning: {warning}", err=True)
    max_diff = data["max_abs_diff"]
    summary = (
        f"verify: {'PASS' if data['passed'] else 'FAIL'} "
        f"({data['count_phase']} vs {data['count_fd']} levels"
        + (f", max |dE| = {max_diff:.3e}" if max_diff is not None else "")
        + f", tolerance {data['tolerance']:g})"
    )
    click.echo(summary, err=True)
    if not data["passed"]:
        sys.exit(4)


if __name__ == "__main__":
    main()
