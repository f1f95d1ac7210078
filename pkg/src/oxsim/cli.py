"""Command-line front end: evaluate / sweep / optimize.

Config, grid, constraints, and profile files are sectioned key = value text
(INI). Unknown sections or keys are hard errors. All outputs are written
atomically (temp file + rename) and embed a RunManifest; identical inputs
produce byte-identical files (set SOURCE_DATE_EPOCH to stamp a real time).
"""
from __future__ import annotations

import argparse
import configparser
import dataclasses
import hashlib
import os
import sys
from dataclasses import dataclass, fields
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .dse import Constraints, SweepGrid, optimize, sweep
from .errors import ConfigError, EvaluationError, InfeasibleError, OxsimError, TopologyError
from .perf import evaluate
from .reports import CSV_COLUMNS, SCHEMA_VERSION, dump_json, flat_row, json_payload
from .tech import (
    CalibrationProfile,
    apply_overrides,
    apply_profile,
    builtin_profiles,
    default_tech_params,
    get_profile,
)
from .workload import ChipConfig

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_TOPOLOGY = 2
EXIT_EVAL = 3
EXIT_INFEASIBLE = 4

_INT_LIST = lambda s: tuple(int(x) for x in s.split())
_FLOAT_LIST = lambda s: tuple(float(x) for x in s.split())


@dataclass(frozen=True)
class RunManifest:
    tool_version: str
    command: str
    config_hash: str
    profile: str
    topology_hash: str
    timestamp: str

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def _deterministic_timestamp() -> str:
    epoch = int(os.environ.get("SOURCE_DATE_EPOCH", "0"))
    return datetime.fromtimestamp(epoch, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _read_ini(path: Path, allowed_sections: set[str]) -> configparser.ConfigParser:
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keys are case-sensitive field names
    try:
        parser.read_string(path.read_text(), source=str(path))
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    for section in parser.sections():
        if section not in allowed_sections:
            raise ConfigError(
                f"{path}: unknown section [{section}]; allowed: "
                f"{', '.join(sorted(allowed_sections))}"
            )
    return parser


def _coerce_fields(cls, items: dict[str, str], source: str) -> dict:
    by_name = {f.name: f for f in fields(cls)}
    out = {}
    for key, raw in items.items():
        if key not in by_name:
            raise ConfigError(f"{source}: unknown key {key!r}")
        want = by_name[key].type
        try:
            if want in ("int", int):
                out[key] = int(float(raw))
            else:
                out[key] = float(raw)
        except ValueError as exc:
            raise ConfigError(f"{source}: key {key!r}: {exc}") from exc
    return out


def _chip_from_section(parser: configparser.ConfigParser, source: str,
                       section: str = "chip") -> ChipConfig:
    items = dict(parser[section]) if parser.has_section(section) else {}
    try:
        return ChipConfig(**_coerce_fields(ChipConfig, items, f"{source} [{section}]"))
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"{source} [{section}]: {exc}") from exc


def load_profile(spec: str | None) -> CalibrationProfile:
    """A built-in profile name, or a profile file with [profile]/[overrides]."""
    if not spec:
        return get_profile("paper-default")
    if spec in builtin_profiles():
        return get_profile(spec)
    path = Path(spec)
    if not path.exists():
        raise ConfigError(
            f"profile {spec!r} is neither a built-in "
            f"({', '.join(sorted(builtin_profiles()))}) nor a file"
        )
    parser = _read_ini(path, {"profile", "overrides", "notes"})
    name = parser.get("profile", "name", fallback=path.stem)
    try:
        overrides = {k: float(v) for k, v in (parser["overrides"].items()
                                              if parser.has_section("overrides") else [])}
    except ValueError as exc:
        raise ConfigError(f"{path} [overrides]: {exc}") from exc
    notes = dict(parser["notes"]) if parser.has_section("notes") else {}
    return CalibrationProfile(name=name, overrides=overrides, notes=notes)


def load_run_inputs(config_path: str | None, profile_spec: str | None):
    """Resolve (ChipConfig, TechParams, hashes) from CLI arguments."""
    tech = default_tech_params()
    profile = load_profile(profile_spec)
    tech = apply_profile(tech, profile)
    if config_path:
        path = Path(config_path)
        parser = _read_ini(path, {"chip", "tech"})
        cfg = _chip_from_section(parser, str(path))
        if parser.has_section("tech"):
            try:
                tech_over = {k: float(v) for k, v in parser["tech"].items()}
            except ValueError as exc:
                raise ConfigError(f"{path} [tech]: {exc}") from exc
            tech = apply_overrides(tech, tech_over, source=f"{path} [tech]")
        config_hash = _sha256_file(path)
    else:
        cfg = ChipConfig()
        config_hash = _sha256_text(repr(cfg))
    return cfg, tech, profile, config_hash


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _manifest(command: str, config_hash: str, profile: str, topology: Path) -> RunManifest:
    return RunManifest(
        tool_version=__version__,
        command=command,
        config_hash=config_hash,
        profile=profile,
        topology_hash=_sha256_file(topology),
        timestamp=_deterministic_timestamp(),
    )


def _csv_text(rows: list[dict], manifest: RunManifest) -> str:
    lines = [f"# {k} = {v}" for k, v in sorted(manifest.as_dict().items())]
    lines.append(",".join(CSV_COLUMNS))
    for row in rows:
        lines.append(",".join(_fmt(row.get(col, "")) for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _resolve_topology(spec: str) -> tuple[list, Path]:
    from .workload import bundled_topology_path, parse_topology

    p = Path(spec)
    if p.exists():
        return parse_topology(p), p
    path = bundled_topology_path(spec)
    return parse_topology(path), path


def cmd_evaluate(args) -> int:
    cfg, tech, profile, config_hash = load_run_inputs(args.config, args.profile)
    layers, topo_path = _resolve_topology(args.topology)
    if not layers:
        raise TopologyError(f"topology {topo_path} contains no layers")
    try:
        report = evaluate(layers, cfg, tech)
    except OxsimError:
        raise
    except Exception as exc:
        raise EvaluationError(str(exc)) from exc

    manifest = _manifest("evaluate", config_hash, profile.name, topo_path)
    out_dir = Path(args.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    _atomic_write(out_dir / "report.json",
                  dump_json(json_payload(cfg, report, manifest.as_dict())))
    _atomic_write(out_dir / "report.csv", _csv_text([flat_row(cfg, report)], manifest))
    print(
        f"ips={report.ips:.1f} ips_per_w={report.ips_per_w:.1f} "
        f"power_w={report.power_w:.3f} area_mm2={report.area_mm2:.2f} "
        f"(rows={cfg.rows} cols={cfg.cols} cores={cfg.cores} batch={cfg.batch}, "
        f"profile={profile.name})"
    )
    print(f"wrote {out_dir / 'report.json'} and {out_dir / 'report.csv'}")
    return EXIT_OK


def _grid_from_file(path: Path) -> SweepGrid:
    parser = _read_ini(path, {"grid", "chip"})
    template = _chip_from_section(parser, str(path))
    axes = dict(parser["grid"]) if parser.has_section("grid") else {}
    known = {"rows", "cols", "batch", "input_sram_mb", "cores"}
    for key in axes:
        if key not in known:
            raise ConfigError(f"{path} [grid]: unknown axis {key!r}; allowed: "
                              f"{', '.join(sorted(known))}")
    try:
        return SweepGrid(
            template=template,
            rows=_INT_LIST(axes.get("rows", "")),
            cols=_INT_LIST(axes.get("cols", "")),
            batch=_INT_LIST(axes.get("batch", "")),
            input_sram_mb=_FLOAT_LIST(axes.get("input_sram_mb", "")),
            cores=_INT_LIST(axes.get("cores", "")),
        )
    except ValueError as exc:
        raise ConfigError(f"{path} [grid]: {exc}") from exc


def cmd_sweep(args) -> int:
    _, tech, profile, _ = load_run_inputs(None, args.profile)
    grid_path = Path(args.grid)
    grid = _grid_from_file(grid_path)
    layers, topo_path = _resolve_topology(args.topology)
    if not layers:
        raise TopologyError(f"topology {topo_path} contains no layers")
    results = sweep(grid, layers, tech, threads=args.threads)
    manifest = _manifest("sweep", _sha256_file(grid_path), profile.name, topo_path)
    rows = [flat_row(cfg, report) for cfg, report in results]
    out_path = Path(args.out or "sweep.csv")
    out_path.parent.mkdir(parents=True, exist_ok=True)
    _atomic_write(out_path, _csv_text(rows, manifest))
    print(f"evaluated {len(rows)} configs; wrote {out_path}")
    return EXIT_OK


def _constraints_from_file(path: Path) -> Constraints:
    parser = _read_ini(path, {"constraints", "chip"})
    template = _chip_from_section(parser, str(path))
    items = dict(parser["constraints"]) if parser.has_section("constraints") else {}
    kwargs: dict = {"template": template}
    converters = {
        "area_cap_mm2": float,
        "batch_candidates": _INT_LIST,
        "array_rows": _INT_LIST,
        "array_cols": _INT_LIST,
        "sram_step_mb": float,
        "hiding_eps": float,
        "tie_tol": float,
    }
    for key, raw in items.items():
        if key not in converters:
            raise ConfigError(f"{path} [constraints]: unknown key {key!r}")
        try:
            kwargs[key] = converters[key](raw)
        except ValueError as exc:
            raise ConfigError(f"{path} [constraints]: key {key!r}: {exc}") from exc
    return Constraints(**kwargs)


def cmd_optimize(args) -> int:
    _, tech, profile, _ = load_run_inputs(None, args.profile)
    if args.constraints:
        cons_path = Path(args.constraints)
        cons = _constraints_from_file(cons_path)
        cons_hash = _sha256_file(cons_path)
    else:
        cons = Constraints()
        cons_hash = _sha256_text(repr(cons))
    layers, topo_path = _resolve_topology(args.topology)
    if not layers:
        raise TopologyError(f"topology {topo_path} contains no layers")

    result = optimize(layers, tech, cons)
    manifest = _manifest("optimize", cons_hash, profile.name, topo_path)
    audit = {
        "schema_version": SCHEMA_VERSION,
        "manifest": manifest.as_dict(),
        "chosen_config": dataclasses.asdict(result.config),
        "metrics": {
            "ips": result.report.ips,
            "ips_per_w": result.report.ips_per_w,
            "power_w": result.report.power_w,
            "area_mm2": result.report.area_mm2,
        },
        "steps": [
            {"step": s.step, "candidates": list(s.candidates), "chosen": s.chosen}
            for s in result.steps
        ],
    }
    out_path = Path(args.out or "optimize_audit.json")
    out_path.parent.mkdir(parents=True, exist_ok=True)
    _atomic_write(out_path, dump_json(audit))
    cfg = result.config
    print(
        f"chosen: rows={cfg.rows} cols={cfg.cols} batch={cfg.batch} "
        f"input_sram_mb={cfg.sram_input_mb} cores={cfg.cores}"
    )
    print(
        f"ips={result.report.ips:.1f} ips_per_w={result.report.ips_per_w:.1f} "
        f"power_w={result.report.power_w:.3f} area_mm2={result.report.area_mm2:.2f}"
    )
    print(f"wrote {out_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oxsim",
        description="Coherent optical crossbar accelerator simulator",
    )
    parser.add_argument("--version", action="version", version=f"oxsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evaluate", help="evaluate one configuration on a network")
    ev.add_argument("--config", help="chip config file ([chip]/[tech] sections)")
    ev.add_argument("--topology", required=True,
                    help="topology CSV path or bundled name (resnet50_v15, toy3)")
    ev.add_argument("--profile", help="calibration profile name or file")
    ev.add_argument("--out", help="output directory (default: .)")
    ev.set_defaults(func=cmd_evaluate)

    sw = sub.add_parser("sweep", help="evaluate a Cartesian grid of configurations")
    sw.add_argument("--grid", required=True, help="grid file ([grid]/[chip] sections)")
    sw.add_argument("--topology", required=True)
    sw.add_argument("--profile")
    sw.add_argument("--out", help="output CSV path (default: sweep.csv)")
    sw.add_argument("--threads", type=int, default=1)
    sw.set_defaults(func=cmd_sweep)

    op = sub.add_parser("optimize", help="run the batch -> SRAM -> array flow")
    op.add_argument("--constraints", help="constraints file ([constraints]/[chip])")
    op.add_argument("--topology", required=True)
    op.add_argument("--profile")
    op.add_argument("--out", help="audit JSON path (default: optimize_audit.json)")
    op.set_defaults(func=cmd_optimize)

    for p in (ev, sw, op):
        p.add_argument("--seed", type=int, default=0,
                       help="reserved; the model is deterministic")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TopologyError as exc:
        print(f"topology error: {exc}", file=sys.stderr)
        return EXIT_TOPOLOGY
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except EvaluationError as exc:
        print(f"evaluation error: {exc}", file=sys.stderr)
        return EXIT_EVAL


if __name__ == "__main__":
    sys.exit(main())
