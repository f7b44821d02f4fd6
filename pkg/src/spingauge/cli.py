"""Command-line front end.

Exit codes: 0 all checks pass, 1 golden/verdict mismatch, 2 usage or
config error, 3 numerical failure.  All configuration goes through flags
and config files; the environment is never consulted for physics.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import tables
from .coherent import make_fiducial
from .dynamics import (
    ConstantGauge,
    LinearGauge,
    TabulatedGauge,
    compare_case,
    compare_evolutions,
)
from .errors import ConsistencyError, IntegrationError, NoSolutionError
from .hamiltonians import CustomHamiltonian, NmrHamiltonian, NqrHamiltonian
from .spin import EulerAngles, Spin
from .symmetry import classify_fiducial, gauss_residual, symmetry_report

DEFAULT_TOLERANCES = {
    "table": 1e-10,       # neighbor-coherence / sweep threshold in table checks
    "coincide": 1e-6,     # max ray distance below which evolutions coincide
    "classify_standard": 1e-10,
    "classify_orbit": 1e-8,
}

_NUMERICAL_ERRORS = (NoSolutionError, IntegrationError, ConsistencyError)


class ConfigError(Exception):
    pass


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def render_markdown(headers, rows) -> str:
    def cell(value):
        return _fmt(value).replace("|", "\\|")

    lines = ["| " + " | ".join(headers) + " |",
             "| " + " | ".join("---" for _ in headers) + " |"]
    for row in rows:
        lines.append("| " + " | ".join(cell(row[h]) for h in headers) + " |")
    return "\n".join(lines) + "\n"


def render_csv(headers, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(headers)
    for row in rows:
        writer.writerow([_fmt(row[h]) for h in headers])
    return buf.getvalue()


def render_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def emit_report(headers, rows, fmt: str, meta=None) -> str:
    if fmt == "json":
        payload = {"rows": rows}
        if meta:
            payload.update(meta)
        return render_json(payload)
    if fmt == "csv":
        return render_csv(headers, rows)
    return render_markdown(headers, rows)


def _parse_tol_overrides(pairs, config_tols=None) -> dict:
    tols = dict(DEFAULT_TOLERANCES)
    if config_tols is not None:
        if not isinstance(config_tols, dict):
            raise ConfigError("tolerances must be an object of KEY: value")
        for key, value in config_tols.items():
            if key not in tols:
                raise ConfigError(
                    f"unknown tolerance {key!r}; known keys: {', '.join(sorted(tols))}"
                )
            tols[key] = float(value)
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or key not in tols:
            raise ConfigError(
                f"bad --tol-override {pair!r}; known keys: {', '.join(sorted(tols))}"
            )
        try:
            tols[key] = float(value)
        except ValueError as exc:
            raise ConfigError(f"bad --tol-override value in {pair!r}") from exc
    return tols


def common_options(f):
    f = click.option(
        "--output", "fmt", type=click.Choice(["md", "csv", "json"]),
        default=None, help="report format on stdout [default: md, or the "
        "config file's 'output' key]",
    )(f)
    f = click.option(
        "--out-dir", type=click.Path(file_okay=False, path_type=Path),
        default=None, help="directory for emitted data files",
    )(f)
    f = click.option(
        "--tol-override", "tol_overrides", multiple=True, metavar="KEY=VAL",
        help="override a named tolerance (repeatable)",
    )(f)
    return f


def _complex_list(entries, what):
    out = []
    for item in entries:
        if not (isinstance(item, (list, tuple)) and len(item) == 2):
            raise ConfigError(f"{what} entries must be [re, im] pairs, got {item!r}")
        out.append(complex(float(item[0]), float(item[1])))
    return out


def _load_config(path: Path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def _fiducial_from_config(cfg):
    try:
        spin = Spin(int(cfg["spin"]))
        raw_fv = cfg["fv"]
    except KeyError as exc:
        raise ConfigError(f"config missing key {exc}") from exc
    amplitudes = _complex_list(raw_fv, "fv")
    if len(amplitudes) != spin.dim:
        raise ConfigError(
            f"fv must have {spin.dim} amplitudes for twice_spin={spin.twice}, "
            f"got {len(amplitudes)}"
        )
    norm = float(np.linalg.norm(amplitudes))
    if norm == 0.0:
        raise ConfigError("fv must not be the zero vector")
    if abs(norm - 1.0) > 1e-9:
        click.echo(f"warning: fv norm {norm:.12g} != 1; normalizing", err=True)
    return make_fiducial(spin, amplitudes)


def _hamiltonian_from_config(cfg):
    ham = cfg.get("hamiltonian")
    if not isinstance(ham, dict) or "type" not in ham:
        raise ConfigError("config needs hamiltonian: {type: nmr|nqr|custom, ...}")
    kind = ham["type"]
    try:
        if kind == "nmr":
            return NmrHamiltonian(float(ham["mu"]), tuple(ham["B"]))
        if kind == "nqr":
            return NqrHamiltonian(float(ham["omega_q"]), tuple(ham["B"]))
        if kind == "custom":
            rows = ham["matrix"]
            matrix = np.array([_complex_list(row, "matrix") for row in rows])
            return CustomHamiltonian(matrix)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad hamiltonian section: {exc}") from exc
    raise ConfigError(f"unknown hamiltonian type {kind!r}")


def _gauge_from_config(section):
    if section is None:
        return ConstantGauge()
    if not isinstance(section, dict) or "type" not in section:
        raise ConfigError("gauge must be {type: constant|linear|tabulated, ...}")
    kind = section["type"]
    try:
        if kind == "constant":
            return ConstantGauge()
        if kind == "linear":
            return LinearGauge(float(section["rate"]))
        if kind == "tabulated":
            samples = section["samples"]
            return TabulatedGauge(
                tuple(float(s[0]) for s in samples),
                tuple(float(s[1]) for s in samples),
            )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad gauge section: {exc}") from exc
    raise ConfigError(f"unknown gauge type {kind!r}")


def _resolve_format(fmt, cfg=None):
    if fmt is not None:
        return fmt
    value = (cfg or {}).get("output", "md")
    if value not in ("md", "csv", "json"):
        raise ConfigError(f"config output must be md, csv or json, got {value!r}")
    return value


def _dynamics_from_config(cfg):
    dyn = cfg.get("dynamics", {})
    if not isinstance(dyn, dict):
        raise ConfigError("dynamics must be an object")
    omega0 = dyn.get("omega0", [0.0, np.pi / 3.0, 0.4])
    if not (isinstance(omega0, (list, tuple)) and len(omega0) == 3):
        raise ConfigError("dynamics.omega0 must be [phi, theta, psi]")
    t_final = float(dyn.get("t_final", 10.0))
    gauge = _gauge_from_config(dyn.get("gauge"))
    return EulerAngles(*(float(x) for x in omega0)), t_final, gauge


@click.group()
def main():
    """Coherent-state gauge-symmetry toolkit."""


def _finish(text: str, mismatches, out_dir: Path | None, name: str):
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / name).write_text(text, encoding="utf-8")
    click.echo(text, nl=False)
    if mismatches:
        for line in mismatches:
            click.echo(f"MISMATCH: {line}", err=True)
        sys.exit(1)


@main.command()
@common_options
def table1(fmt, out_dir, tol_overrides):
    """Reproduce the built-in gauge-symmetry survey table."""
    try:
        tols = _parse_tol_overrides(tol_overrides)
        fmt = _resolve_format(fmt)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    try:
        rows, mismatches = tables.build_table1(tol=tols["table"])
    except _NUMERICAL_ERRORS as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(3)
    text = emit_report(tables.TABLE1_HEADERS, rows, fmt, meta={"table": "survey"})
    _finish(text, mismatches, out_dir, f"table1.{fmt}")


@main.command()
@common_options
def table2(fmt, out_dir, tol_overrides):
    """Reproduce the built-in isotropy-subgroup table."""
    try:
        _parse_tol_overrides(tol_overrides)
        fmt = _resolve_format(fmt)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    try:
        rows, mismatches = tables.build_table2()
    except _NUMERICAL_ERRORS as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(3)
    text = emit_report(tables.TABLE2_HEADERS, rows, fmt, meta={"table": "isotropy"})
    _finish(text, mismatches, out_dir, f"table2.{fmt}")


CLASSIFY_HEADERS = (
    "verdict", "m", "axis", "residual", "gauss_residual",
    "a0", "a0_is_half_integer", "a0_zero_exceptional",
)


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=False, path_type=Path))
@common_options
def classify(config_path, fmt, out_dir, tol_overrides):
    """Classify the configured fiducial vector (standard / orbit / generic)."""
    try:
        cfg = _load_config(config_path)
        tols = _parse_tol_overrides(tol_overrides, cfg.get("tolerances"))
        fmt = _resolve_format(fmt, cfg)
        fv = _fiducial_from_config(cfg)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    try:
        result = classify_fiducial(
            fv,
            standard_tol=tols["classify_standard"],
            orbit_tol=tols["classify_orbit"],
        )
        residual = gauss_residual(fv, EulerAngles(0.0, 0.0, 0.0))
    except _NUMERICAL_ERRORS as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(3)
    row = {
        "verdict": result.verdict,
        "m": "" if result.m is None else _fmt(result.m),
        "axis": "" if result.axis is None else "[" + " ".join(
            _fmt(float(x)) for x in result.axis) + "]",
        "residual": result.residual,
        "gauss_residual": residual,
        "a0": result.a0,
        "a0_is_half_integer": result.a0_is_half_integer,
        "a0_zero_exceptional": result.a0_zero_exceptional,
    }
    text = emit_report(CLASSIFY_HEADERS, [row], fmt)
    _finish(text, [], out_dir, f"classify.{fmt}")


SYMMETRY_HEADERS = (
    "a0", "a3_present", "topological_weak_symmetry",
    "hamiltonian_psi_invariant", "total_weak_symmetry",
)


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=False, path_type=Path))
@common_options
def symmetry(config_path, fmt, out_dir, tol_overrides):
    """Audit the weak gauge symmetry of the configured (fv, Hamiltonian) pair."""
    try:
        cfg = _load_config(config_path)
        tols = _parse_tol_overrides(tol_overrides, cfg.get("tolerances"))
        fmt = _resolve_format(fmt, cfg)
        fv = _fiducial_from_config(cfg)
        ham = _hamiltonian_from_config(cfg)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    try:
        report = symmetry_report(fv, ham, tol=tols["table"])
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except _NUMERICAL_ERRORS as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(3)
    row = {
        "a0": report.a0,
        "a3_present": report.a3_present,
        "topological_weak_symmetry": report.topological_weak_symmetry,
        "hamiltonian_psi_invariant": report.hamiltonian_psi_invariant,
        "total_weak_symmetry": report.total_weak_symmetry,
    }
    text = emit_report(SYMMETRY_HEADERS, [row], fmt)
    _finish(text, [], out_dir, f"symmetry.{fmt}")


EVOLVE_CSV_HEADERS = ("t", "phi", "theta", "psi", "fidelity", "ray_distance")


def _write_evolve_outputs(result, out_dir: Path | None, label: str):
    out_dir = out_dir if out_dir is not None else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_lines = [",".join(EVOLVE_CSV_HEADERS)]
    for i, t in enumerate(result.times):
        phi, theta, psi = result.omegas[i]
        csv_lines.append(",".join(
            _fmt(float(x))
            for x in (t, phi, theta, psi, result.fidelity[i], result.ray_distance[i])
        ))
    csv_path = out_dir / f"evolve_{label}_timeseries.csv"
    csv_path.write_text("\n".join(csv_lines) + "\n", encoding="utf-8")

    summary = {
        "case": result.case,
        "max_ray_distance": result.max_ray_distance,
        "verdict": result.verdict,
        "t_final": float(result.times[-1]),
        "samples": int(len(result.times)),
        "integrator": {k: int(v) for k, v in result.stats.items()},
    }
    json_path = out_dir / f"evolve_{label}_summary.json"
    json_path.write_text(render_json(summary), encoding="utf-8")
    return summary, csv_path, json_path


@main.command()
@click.option("--case", "case_id", type=click.Choice(["i", "ii", "v"]), default=None,
              help="run a built-in worked case")
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None,
              help="run a custom evolution from a config file")
@click.option("--gauge-rate", type=float, default=None,
              help="override: drive psi at this constant rate (built-in cases)")
@click.option("--t-final", type=float, default=None, help="override end time")
@common_options
def evolve(case_id, config_path, gauge_rate, t_final, fmt, out_dir, tol_overrides):
    """Evolve semiclassically and exactly; write a time series and summary."""
    if (case_id is None) == (config_path is None):
        click.echo("error: give exactly one of --case or --config", err=True)
        sys.exit(2)

    try:
        if case_id is not None:
            tols = _parse_tol_overrides(tol_overrides)
            fmt = _resolve_format(fmt)
            kwargs = {"coincide_tol": tols["coincide"]}
            if gauge_rate is not None:
                kwargs["gauge"] = LinearGauge(gauge_rate)
            if t_final is not None:
                kwargs["t_final"] = t_final
            result = compare_case(case_id, **kwargs)
            label = f"case_{case_id}"
        else:
            cfg = _load_config(config_path)
            tols = _parse_tol_overrides(tol_overrides, cfg.get("tolerances"))
            fmt = _resolve_format(fmt, cfg)
            fv = _fiducial_from_config(cfg)
            ham = _hamiltonian_from_config(cfg)
            omega0, cfg_t_final, gauge = _dynamics_from_config(cfg)
            result = compare_evolutions(
                fv, omega0, ham,
                t_final if t_final is not None else cfg_t_final,
                gauge=gauge, coincide_tol=tols["coincide"],
            )
            label = config_path.stem
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except IntegrationError as exc:
        click.echo(f"numerical failure at t={exc.t}: {exc}", err=True)
        sys.exit(3)
    except _NUMERICAL_ERRORS as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(3)

    summary, csv_path, json_path = _write_evolve_outputs(result, out_dir, label)
    if fmt == "json":
        click.echo(render_json(summary), nl=False)
    else:
        click.echo(f"case: {summary['case']}")
        click.echo(f"max_ray_distance: {_fmt(summary['max_ray_distance'])}")
        click.echo(f"verdict: {summary['verdict']}")
        click.echo(f"timeseries: {csv_path}")
        click.echo(f"summary: {json_path}")


if __name__ == "__main__":
    main()
