"""Command-line experiment runner.

Subcommands: simulate, analyze, isoperimetry, hairs, vershik, oracle.
Each run writes into an output directory: the fully resolved config
(config.json), data files (NDJSON / CSV with a schema-version header line),
a summary.json, and metadata.json. Timestamps live only in metadata.json so
reruns with the same config are byte-identical everywhere else.

Config values come from an optional JSON file (--config) and are overridden
by command-line flags. Exit codes: 0 success, 1 invalid config or input,
2 a built-in check failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, _kernels
from .model import HeightField, ModelParams, energy, volume
from .sampler import SamplerConfig, run_chain, volume_floor
from .levelsets import DegenerateFieldError, facet_report
from .hairs import default_c1, extract_hairs, max_deviation_in_f2, scale_table
from .isoperimetry import (certify_transfer, iso_decompose, min_perimeter,
                           min_perimeter_oracle, perimeter_gain,
                           sqrt_bounds_check, sqrt_bounds_scan)
from .partitions import (deviation_from_multiplicities, enumerate_partitions,
                         monolayer_constant, monolayer_residual,
                         sample_partitions, solve_monolayer_x, vershik_curve)

_SCHEMA = 1


class ConfigError(ValueError):
    pass


def _load_config(args: argparse.Namespace, defaults: dict) -> dict:
    cfg = dict(defaults)
    if getattr(args, "config", None):
        try:
            cfg.update(json.loads(Path(args.config).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}")
    for key in defaults:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    unknown = set(cfg) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return cfg


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _open_run_dir(out: str) -> Path:
    p = Path(out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _write_metadata(run_dir: Path, command: str) -> None:
    _write_json(run_dir / "metadata.json", {
        "command": command,
        "version": __version__,
        "backend": _kernels.BACKEND,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    })


def _csv_writer(path: Path, name: str, columns: list):
    f = path.open("w", newline="")
    f.write(f"# schema=sosfacet/{name}/v{_SCHEMA}\n")
    w = csv.writer(f)
    w.writerow(columns)
    return f, w


def _analyze_fields(fields, params: ModelParams, samples_path: Path) -> dict:
    """Per-field facet/hair analysis into NDJSON; returns the summary."""
    f2_hits = 0
    count = 0
    f1_sizes = []
    deviations = []
    levels = []
    with samples_path.open("w") as out:
        for idx, field in fields:
            row = {"sample": idx, "n": field.n, "energy": energy(field),
                   "volume": volume(field)}
            try:
                rep = facet_report(field, params)
                dev = max_deviation_in_f2(field, params)
                hair_list = extract_hairs(field, params)
                row["facet"] = rep.to_record()
                row["max_deviation_in_f2"] = dev
                row["hairs"] = {
                    "count": len(hair_list),
                    "max_up": max((h.length for h in hair_list
                                   if h.direction == "up"), default=0),
                    "max_down": max((h.length for h in hair_list
                                     if h.direction == "down"), default=0),
                }
                f1_sizes.append(rep.f1_area)
                deviations.append(dev)
                levels.append(rep.level)
                if rep.f2_area >= (1 - params.a) * field.n ** 2:
                    f2_hits += 1
            except DegenerateFieldError:
                row["facet"] = None
            out.write(json.dumps(row, sort_keys=True) + "\n")
            count += 1
    summary = {"samples": count}
    if f1_sizes:
        devs = np.array(deviations)
        summary.update({
            "f2_large_fraction": f2_hits / count,
            "f1_median": float(np.median(f1_sizes)),
            "level_min": min(levels),
            "level_max": max(levels),
            "max_deviation_quantiles": {
                q: float(np.quantile(devs, float(q)))
                for q in ("0.5", "0.9", "0.99", "1.0")
            },
        })
    return summary


def cmd_simulate(args) -> int:
    defaults = {"n": 16, "beta": 3.0, "lam": 0.5, "a": 0.1, "k_large": 10.0,
                "sweeps": 1000, "burn_in": 200, "thin": 10, "seed": 0,
                "save_fields": False}
    cfg = _load_config(args, defaults)
    params = ModelParams(cfg["beta"], cfg["lam"], cfg["a"], cfg["k_large"])
    sampler = SamplerConfig(params, cfg["sweeps"], cfg["burn_in"],
                            cfg["thin"], cfg["seed"])
    run_dir = _open_run_dir(args.out)
    _write_json(run_dir / "config.json", cfg)

    fields_file = (run_dir / "fields.ndjson").open("w") if cfg["save_fields"] else None

    def gen():
        for s in run_chain(sampler, cfg["n"]):
            if fields_file:
                fields_file.write(s.field.to_json() + "\n")
            yield s.sweep_index, s.field

    summary = _analyze_fields(gen(), params, run_dir / "samples.ndjson")
    if fields_file:
        fields_file.close()
    summary["volume_floor"] = volume_floor(cfg["lam"], cfg["n"])
    _write_json(run_dir / "summary.json", summary)
    _write_metadata(run_dir, "simulate")
    return 0


def _read_fields(path: str):
    with Path(path).open() as f:
        for idx, line in enumerate(f):
            if line.strip():
                yield idx, HeightField.from_json(line)


def cmd_analyze(args) -> int:
    defaults = {"beta": 3.0, "lam": 0.5, "a": 0.1, "k_large": 10.0}
    cfg = _load_config(args, defaults)
    params = ModelParams(cfg["beta"], cfg["lam"], cfg["a"], cfg["k_large"])
    run_dir = _open_run_dir(args.out)
    _write_json(run_dir / "config.json", cfg)
    summary = _analyze_fields(_read_fields(args.fields), params,
                              run_dir / "samples.ndjson")
    _write_json(run_dir / "summary.json", summary)
    _write_metadata(run_dir, "analyze")
    return 0


def cmd_isoperimetry(args) -> int:
    defaults = {"table_max": 12, "scan_max": 1_000_000,
                "grid_n": [50, 100, 200], "rho": 0.1}
    cfg = _load_config(args, defaults)
    run_dir = _open_run_dir(args.out)
    _write_json(run_dir / "config.json", cfg)

    ok = True
    f, w = _csv_writer(run_dir / "perimeter_table.csv", "perimeter",
                       ["v", "L", "r", "p", "oracle", "bounds_ok"])
    for v in range(1, cfg["table_max"] + 1):
        l, r = iso_decompose(v)
        p = min_perimeter(v)
        oracle = min_perimeter_oracle(v)
        ok &= p == oracle
        w.writerow([v, l, r, p, oracle, sqrt_bounds_check(v)])
    f.close()

    violations = sqrt_bounds_scan(cfg["scan_max"])
    ok &= violations == 0

    f, w = _csv_writer(run_dir / "transfer.csv", "transfer",
                       ["n", "rho", "step", "triples", "min_gain", "kappa",
                        "v1", "v2", "d", "negatives"])
    reports = []
    for n in cfg["grid_n"]:
        rep = certify_transfer(n, cfg["rho"])
        reports.append(rep.to_record())
        w.writerow([rep.n, rep.rho, rep.step, rep.triples, rep.min_gain,
                    f"{rep.kappa:.6f}", *rep.argmin, rep.negatives])
        ok &= rep.min_gain > 0 and rep.kappa > 0.01
    f.close()

    control_gain = perimeter_gain(4, 4, 1)
    _write_json(run_dir / "summary.json", {
        "oracle_match": all(min_perimeter(v) == min_perimeter_oracle(v)
                            for v in range(1, cfg["table_max"] + 1)),
        "sqrt_bound_violations": violations,
        "transfer": reports,
        "negative_control": {"triple": [4, 4, 1], "gain": control_gain,
                             "hypothesis_violating": True},
        "pass": bool(ok),
    })
    _write_metadata(run_dir, "isoperimetry")
    return 0 if ok else 2


def cmd_hairs(args) -> int:
    defaults = {"beta": 3.0, "lam": 0.5, "a": 0.1, "k_large": 10.0,
                "scale_n": [100, 10000], "c2": 80.0}
    cfg = _load_config(args, defaults)
    params = ModelParams(cfg["beta"], cfg["lam"], cfg["a"], cfg["k_large"])
    c1 = default_c1(cfg["k_large"])
    run_dir = _open_run_dir(args.out)
    _write_json(run_dir / "config.json", cfg)

    if args.fields:
        f, w = _csv_writer(run_dir / "hairs.csv", "hairs",
                           ["sample", "direction", "length", "first_area"])
        for idx, field in _read_fields(args.fields):
            for h in extract_hairs(field, params):
                w.writerow([idx, h.direction, h.length,
                            h.contours[0].interior_area])
        f.close()

    f, w = _csv_writer(run_dir / "scales.csv", "scales",
                       ["n", "r", "v_r", "h_r", "r_prime", "c3"])
    for n in cfg["scale_n"]:
        t = scale_table(n, cfg["a"], c1, cfg["c2"])
        for r in range(t.r_max + 1):
            w.writerow([n, r, f"{t.v_r[r]:.9g}", f"{t.h_r[r]:.9g}",
                        f"{t.r_prime:.9g}", f"{t.c3:.9g}"])
    f.close()
    _write_json(run_dir / "summary.json", {"c1": c1, "c2": cfg["c2"]})
    _write_metadata(run_dir, "hairs")
    return 0


def cmd_vershik(args) -> int:
    defaults = {"n": 10000, "samples": 200, "seed": 0,
                "monolayer_k": [100, 1000, 10000, 100000, 1000000],
                "curve_points": 200}
    cfg = _load_config(args, defaults)
    run_dir = _open_run_dir(args.out)
    _write_json(run_dir / "config.json", cfg)

    mult = sample_partitions(cfg["n"], cfg["samples"], cfg["seed"])
    devs = [deviation_from_multiplicities(mult[i], cfg["n"])
            for i in range(cfg["samples"])]
    f, w = _csv_writer(run_dir / "deviations.csv", "deviations",
                       ["sample", "deviation"])
    for i, d in enumerate(devs):
        w.writerow([i, f"{d:.9g}"])
    f.close()

    f, w = _csv_writer(run_dir / "curve.csv", "curve", ["u", "v"])
    umax = 3.0
    for i in range(1, cfg["curve_points"] + 1):
        u = umax * i / cfg["curve_points"]
        w.writerow([f"{u:.9g}", f"{vershik_curve(u):.9g}"])
    f.close()

    f, w = _csv_writer(run_dir / "monolayer.csv", "monolayer",
                       ["k", "x", "residual"])
    for k in cfg["monolayer_k"]:
        x = solve_monolayer_x(k)
        w.writerow([k, mpf_str(x), f"{monolayer_residual(k, x):.3g}"])
    f.close()

    _write_json(run_dir / "summary.json", {
        "n": cfg["n"],
        "mean_deviation": float(np.mean(devs)),
        "max_deviation": float(np.max(devs)),
        "monolayer_constant": monolayer_constant(),
    })
    _write_metadata(run_dir, "vershik")
    return 0


def mpf_str(x) -> str:
    return f"{float(x):.12g}"


def cmd_oracle(args) -> int:
    defaults = {"n": 8, "draws": 100000, "seed": 0}
    cfg = _load_config(args, defaults)
    run_dir = _open_run_dir(args.out)
    _write_json(run_dir / "config.json", cfg)
    n = cfg["n"]
    if n > 12:
        raise ConfigError("uniformity oracle supports n <= 12")
    parts = enumerate_partitions(n)
    index = {p: i for i, p in enumerate(parts)}
    counts = np.zeros(len(parts), dtype=np.int64)
    mult = sample_partitions(n, cfg["draws"], cfg["seed"])
    for row in mult:
        key = tuple(int(k) for k in range(n, 0, -1) for _ in range(row[k - 1]))
        counts[index[key]] += 1
    f, w = _csv_writer(run_dir / "frequencies.csv", "frequencies",
                       ["partition", "count", "frequency", "uniform"])
    uniform = 1.0 / len(parts)
    for p, c in zip(parts, counts):
        w.writerow(["+".join(map(str, p)), int(c),
                    f"{c / cfg['draws']:.6f}", f"{uniform:.6f}"])
    f.close()
    max_dev = float(np.abs(counts / cfg["draws"] - uniform).max())
    _write_json(run_dir / "summary.json", {
        "n": n, "partitions": len(parts), "draws": cfg["draws"],
        "max_abs_deviation": max_dev,
    })
    _write_metadata(run_dir, "oracle")
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", required=True, help="output run directory")
    p.add_argument("--config", help="JSON config file; flags override it")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sosfacet",
                                 description="constrained SOS crystal toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a constrained Metropolis chain")
    _add_common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--lam", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--k-large", dest="k_large", type=float)
    p.add_argument("--sweeps", type=int)
    p.add_argument("--burn-in", dest="burn_in", type=int)
    p.add_argument("--thin", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--save-fields", dest="save_fields", action="store_const",
                   const=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="re-analyze stored fields")
    _add_common(p)
    p.add_argument("--fields", required=True, help="NDJSON of height fields")
    p.add_argument("--beta", type=float)
    p.add_argument("--lam", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--k-large", dest="k_large", type=float)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("isoperimetry", help="perimeter table and transfer scan")
    _add_common(p)
    p.add_argument("--table-max", dest="table_max", type=int)
    p.add_argument("--scan-max", dest="scan_max", type=int)
    p.add_argument("--grid-n", dest="grid_n", type=int, nargs="+")
    p.add_argument("--rho", type=float)
    p.set_defaults(func=cmd_isoperimetry)

    p = sub.add_parser("hairs", help="hair report and scale tables")
    _add_common(p)
    p.add_argument("--fields", help="NDJSON of height fields (optional)")
    p.add_argument("--beta", type=float)
    p.add_argument("--lam", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--k-large", dest="k_large", type=float)
    p.add_argument("--scale-n", dest="scale_n", type=int, nargs="+")
    p.add_argument("--c2", type=float)
    p.set_defaults(func=cmd_hairs)

    p = sub.add_parser("vershik", help="partition profiles and monolayer table")
    _add_common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_vershik)

    p = sub.add_parser("oracle", help="partition uniformity frequency table")
    _add_common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--draws", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_oracle)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
