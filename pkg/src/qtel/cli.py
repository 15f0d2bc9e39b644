"""Command line front end.

Subcommands:
  probs     mixture detection distribution for one configuration
  tables    recompute the published resolution tables, with deltas
  curve     export a sweep (Fisher vs phase, or resolution vs baseline)
  optimize  locate the baseline attenuations minimizing the resolution
  verify    cross-check the simulation against the closed-form catalog

Every subcommand accepts --config FILE (flat key = value lines) plus the
equivalent individual flags; flags override file values.  CSV output uses
'.' decimals, ',' separators and 17 significant digits, and repeated runs
produce byte-identical files; timestamps appear only in the manifest
written next to each output file.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from datetime import datetime, timezone
from typing import Dict, List, Optional, Sequence, Tuple

from . import __version__
from .errors import (
    CapacityExceededError,
    ConfigInvalidError,
    DomainError,
    NoMinimumError,
    UnknownModeError,
    ZeroInformationError,
)
from .protocol import ExperimentConfig, NuPolicy, branch_tables, mixture_port_trig, port_text
from .resolution import curve_export, optimize_alpha
from .tables import compute_table_rows
from .verify import verify_catalog

CONFIG_KEYS = ("N", "epsilon", "indist", "nu_policy", "lambda_nm", "L0_km", "alpha", "phi")


def fmt(value) -> str:
    """One canonical text rendering per value type (17 significant digits)."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def parse_config_file(path: str) -> Dict[str, str]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise ConfigInvalidError(f"cannot read config file {path}: {exc}") from exc
    data: Dict[str, str] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigInvalidError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigInvalidError(
                f"{path}:{lineno}: unknown key {key!r} (known: {', '.join(CONFIG_KEYS)})"
            )
        data[key] = value
    return data


def _parse_indist(raw: str, photons: int) -> Tuple[float, ...]:
    parts = [piece.strip() for piece in str(raw).split(",") if piece.strip()]
    if not parts:
        raise ConfigInvalidError("indist must hold at least one value")
    values = tuple(float(piece) for piece in parts)
    if len(values) == 1 and photons > 2:
        values = values * (photons - 1)
    return values


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    """Merge config file values and flag overrides into one configuration."""
    values: Dict[str, object] = {}
    if getattr(args, "config", None):
        values.update(parse_config_file(args.config))
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    try:
        photons = int(values.get("N", 2))
        policy_name = str(values.get("nu_policy", "distinct")).strip().upper()
        if policy_name not in NuPolicy.__members__:
            raise ConfigInvalidError(f"nu_policy must be distinct or shared, got {values['nu_policy']!r}")
        indist = None
        if "indist" in values:
            indist = _parse_indist(values["indist"], photons)
        return ExperimentConfig(
            photons=photons,
            epsilon=float(values.get("epsilon", 1.0)),
            indist=indist,
            nu_policy=NuPolicy[policy_name],
            wavelength_m=float(values.get("lambda_nm", 628.0)) * 1e-9,
            attenuation_length_m=float(values.get("L0_km", 10.0)) * 1e3,
            alpha=float(values.get("alpha", 0.0)),
            phi=float(values.get("phi", 0.0)),
        )
    except ValueError as exc:
        raise ConfigInvalidError(f"bad config value: {exc}") from exc


def config_echo(config: ExperimentConfig) -> Dict[str, object]:
    # unit conversions are rounded so the echo does not pick up float noise
    return {
        "N": config.photons,
        "epsilon": config.epsilon,
        "indist": ",".join(fmt(x) for x in config.indist),
        "nu_policy": config.nu_policy.name.lower(),
        "lambda_nm": round(config.wavelength_m * 1e9, 9),
        "L0_km": round(config.attenuation_length_m / 1e3, 9),
        "alpha": config.alpha,
        "phi": config.phi,
    }


def render_csv(header: Dict[str, object], fieldnames: Sequence[str], records: List[dict]) -> str:
    lines = [f"# {key} = {fmt(value)}" for key, value in header.items()]
    lines.append(",".join(fieldnames))
    for record in records:
        lines.append(",".join(fmt(record[name]) for name in fieldnames))
    return "\n".join(lines) + "\n"


def render_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def sha256_of(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(primary: str, command: str, echo: Dict[str, object], outputs: List[str]) -> str:
    manifest = {
        "command": command,
        "version": __version__,
        "generated_utc": datetime.now(timezone.utc).isoformat(),
        "config": {key: fmt(value) for key, value in echo.items()},
        "outputs": [{"path": path, "sha256": sha256_of(path)} for path in outputs],
    }
    path = primary + ".manifest.json"
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(render_json(manifest))
    return path


def emit(
    args: argparse.Namespace,
    command: str,
    echo: Dict[str, object],
    fieldnames: Sequence[str],
    records: List[dict],
    default_out: Optional[str],
    json_extra: Optional[dict] = None,
) -> List[str]:
    """Write records as CSV or JSON to --out (or stdout), plus the manifest.

    Returns the list of files written so callers can append figures before
    the manifest is sealed; when printing to stdout nothing is written and
    no manifest is produced.
    """
    fmt_kind = getattr(args, "format", None) or "csv"
    out = getattr(args, "out", None)
    if out is None and default_out is not None:
        stem = default_out.rsplit(".", 1)[0]
        out = f"{stem}.{fmt_kind}"
    if fmt_kind == "json":
        payload = {"command": command, "config": {k: fmt(v) for k, v in echo.items()}}
        if json_extra:
            payload.update(json_extra)
        payload["rows"] = records
        text = render_json(payload)
    else:
        header = {"command": command, **echo}
        text = render_csv(header, fieldnames, records)
    if out is None:
        sys.stdout.write(text)
        return []
    with open(out, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    return [out]


def _figure_path(outputs: List[str]) -> str:
    return outputs[0].rsplit(".", 1)[0] + ".png"


def cmd_probs(args: argparse.Namespace) -> int:
    config = build_config(args)
    tables = branch_tables(config)
    records = []
    for ports, tp in sorted(mixture_port_trig(tables, config.epsilon).items()):
        if tp.a < 1e-15 and tp.swing < 1e-15:
            continue
        records.append(
            {
                "signature": port_text(ports),
                "detected": sum(count for _, count in ports),
                "a": tp.a,
                "b": tp.b,
                "c": tp.c,
                "probability": tp.value(config.phi),
            }
        )
    echo = config_echo(config)
    outputs = emit(args, "probs", echo, ("signature", "detected", "a", "b", "c", "probability"), records, None)
    if outputs:
        write_manifest(outputs[0], "probs", echo, outputs)
    return 0


def cmd_tables(args: argparse.Namespace) -> int:
    config = build_config(args)
    rows = compute_table_rows(
        args.tables,
        wavelength_m=config.wavelength_m,
        attenuation_length_m=config.attenuation_length_m,
    )
    records = [row.as_dict() for row in rows]
    fieldnames = tuple(records[0].keys())
    echo = {
        "tables": args.tables,
        "lambda_nm": round(config.wavelength_m * 1e9, 9),
        "L0_km": round(config.attenuation_length_m / 1e3, 9),
    }
    outputs = emit(args, "tables", echo, fieldnames, records, "qtel_tables.csv")
    if outputs:
        if not args.no_plot:
            from .plotting import save_tables_figure

            figure = _figure_path(outputs)
            save_tables_figure(rows, figure)
            outputs.append(figure)
        write_manifest(outputs[0], "tables", echo, outputs)
    return 0


def cmd_curve(args: argparse.Namespace) -> int:
    config = build_config(args)
    rows = curve_export(
        config,
        args.sweep,
        args.samples,
        alpha_range=(args.alpha_min, args.alpha_max),
        phi=config.phi,
    )
    records = [{"x": x, "y": y} for x, y in rows]
    echo = {**config_echo(config), "sweep": args.sweep, "samples": args.samples}
    outputs = emit(args, "curve", echo, ("x", "y"), records, "qtel_curve.csv")
    if outputs:
        if not args.no_plot:
            from .plotting import save_curve_figure

            figure = _figure_path(outputs)
            title = f"N={config.photons}, epsilon={config.epsilon:g}"
            save_curve_figure(rows, args.sweep, title, figure)
            outputs.append(figure)
        write_manifest(outputs[0], "curve", echo, outputs)
    return 0


def cmd_optimize(args: argparse.Namespace) -> int:
    config = build_config(args)
    optima = optimize_alpha(
        config,
        alpha_range=(args.alpha_min, args.alpha_max),
        engine=args.engine,
        phi=config.phi,
    )
    records = [
        {
            "alpha": opt.alpha,
            "delta_theta_uas": opt.delta_theta_uas,
            "fisher": opt.fisher,
            "is_global": opt.is_global,
        }
        for opt in optima
    ]
    echo = {**config_echo(config), "engine": args.engine, "alpha_min": args.alpha_min, "alpha_max": args.alpha_max}
    outputs = emit(args, "optimize", echo, ("alpha", "delta_theta_uas", "fisher", "is_global"), records, None)
    if outputs:
        write_manifest(outputs[0], "optimize", echo, outputs)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    report = verify_catalog(quick=(args.grid == "quick"))
    echo = {"grid": args.grid}
    fmt_kind = getattr(args, "format", None) or "json"
    out = args.out or f"qtel_verify.{fmt_kind}"
    if fmt_kind == "json":
        text = render_json({"command": "verify", "grid": args.grid, **report.as_dict()})
    else:
        records = [
            {
                "catalog": entry.catalog,
                "asserted": entry.asserted,
                "tolerance": entry.tolerance,
                "points": entry.points,
                "max_deviation": entry.max_deviation,
                "passed": entry.passed,
            }
            for entry in report.entries
        ]
        text = render_csv(
            {"command": "verify", **echo},
            ("catalog", "asserted", "tolerance", "points", "max_deviation", "passed"),
            records,
        )
    with open(out, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    write_manifest(out, "verify", echo, [out])
    print(report.text())
    return 0 if report.passed else 1


def _add_config_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key = value config file")
    sub.add_argument("--N", type=int, dest="N", help="total photon count including the reference (2..5)")
    sub.add_argument("--epsilon", type=float, help="reference-mode occupancy in [0, 1]")
    sub.add_argument("--indist", help="comma list of ground-photon overlaps, or one value for all")
    sub.add_argument("--nu-policy", dest="nu_policy", choices=("distinct", "shared"),
                     help="noise-mode bookkeeping for partially distinguishable photons")
    sub.add_argument("--lambda-nm", dest="lambda_nm", type=float, help="wavelength in nm (default 628)")
    sub.add_argument("--L0-km", dest="L0_km", type=float, help="attenuation length in km (default 10)")
    sub.add_argument("--alpha", type=float, help="baseline in attenuation lengths")
    sub.add_argument("--phi", type=float, help="interferometric phase in rad")


def _add_output_flags(sub: argparse.ArgumentParser, default_format: str = "csv") -> None:
    sub.add_argument("--out", help="output path (default depends on the command)")
    sub.add_argument("--format", choices=("csv", "json"), default=default_format)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtel",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"qtel {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    probs = commands.add_parser("probs", help="mixture detection distribution with A,B,C per signature")
    _add_config_flags(probs)
    _add_output_flags(probs)
    probs.set_defaults(func=cmd_probs)

    tables = commands.add_parser(
        "tables",
        help="recompute the published resolution tables by brute force",
        description="Row parameters come from the published tables themselves; "
        "of the config flags only --lambda-nm and --L0-km affect the result.",
    )
    _add_config_flags(tables)
    _add_output_flags(tables)
    tables.add_argument("--tables", choices=("I", "II", "both"), default="both")
    tables.add_argument("--no-plot", action="store_true", help="skip the comparison figure")
    tables.set_defaults(func=cmd_tables)

    curve = commands.add_parser("curve", help="export one sweep as (x, y) rows")
    _add_config_flags(curve)
    _add_output_flags(curve)
    curve.add_argument("--sweep", choices=("fisher-phi", "resolution-alpha"), required=True)
    curve.add_argument("--samples", type=int, default=201)
    curve.add_argument("--alpha-min", dest="alpha_min", type=float, default=0.5)
    curve.add_argument("--alpha-max", dest="alpha_max", type=float, default=12.0)
    curve.add_argument("--no-plot", action="store_true", help="skip the rendered figure")
    curve.set_defaults(func=cmd_curve)

    optimize = commands.add_parser("optimize", help="find baseline attenuations minimizing the resolution")
    _add_config_flags(optimize)
    _add_output_flags(optimize)
    optimize.add_argument("--engine", choices=("simulation", "closed-form"), default="simulation")
    optimize.add_argument("--alpha-min", dest="alpha_min", type=float, default=0.5)
    optimize.add_argument("--alpha-max", dest="alpha_max", type=float, default=12.0)
    optimize.set_defaults(func=cmd_optimize)

    verify = commands.add_parser(
        "verify",
        help="sweep the closed-form catalog against the simulation",
        description="Config flags are accepted for interface uniformity but the "
        "verification grid is fixed; exit status 1 flags any asserted failure.",
    )
    _add_config_flags(verify)
    _add_output_flags(verify, default_format="json")
    verify.add_argument("--grid", choices=("full", "quick"), default="full")
    verify.set_defaults(func=cmd_verify)

    return parser


def main(cli_args: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(cli_args)
    try:
        return args.func(args)
    except (ConfigInvalidError, DomainError, UnknownModeError, CapacityExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NoMinimumError, ZeroInformationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
