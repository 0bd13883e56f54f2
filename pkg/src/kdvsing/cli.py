"""Command-line front end.

    kdvsing analyze  --q 3 --a 1 --b 1 --k 4
    kdvsing express  --q 5 --regime nonintegrable
    kdvsing dyndeg   --q 2 --a 1 --b 2 --iters 28
    kdvsing degrees  --q 3 --a 1 --b 2 --mode generic_line --n 3
    kdvsing lattice  --staircase fig2.json --a 1 --b 1 --format ascii
    kdvsing sweep    --q-range 2:8 --a 1 --b 2

Any flag may also come from a ``--config`` file of ``key = value`` lines
(``#`` starts a comment; keys use the flag names with or without dashes).
Flags given on the command line win. Reports go to ``--output``, else to
``$KDVSING_OUTPUT_DIR/<command>-<digest>.json`` when that variable is set,
else to stdout.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import jsonschema
import sympy

from . import __version__
from .degree import (
    GENERIC_LINE,
    SINGLE_VARIABLE,
    LAMBDA,
    ValueCountPattern,
    confined_reduction_pattern,
    degree_sequence,
    diophantine_degree,
    express,
    unconfined_reduction_pattern,
)
from .errors import ConfigInvalid, KdVSingError
from .exactnum import qq, qstr
from .lattice import (
    CASE1,
    CASE2,
    CASE3,
    CASE4,
    CASE5,
    NE,
    SW,
    Staircase,
    case_scenario,
    classify_interaction,
    evolve,
    render_pattern,
)
from .mapping import MapParams
from .singularity import classify_pattern, enumerate_codim1_singularities

ENV_OUTPUT_DIR = "KDVSING_OUTPUT_DIR"
SCHEMA_VERSION = "kdvsing-report/1"
COMMANDS = ("analyze", "express", "dyndeg", "degrees", "lattice", "sweep")

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "tool", "config", "results", "timing"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "tool": {
            "type": "object",
            "required": ["name", "version"],
            "properties": {"name": {"type": "string"}, "version": {"type": "string"}},
        },
        "config": {
            "type": "object",
            "required": ["command", "seed"],
            "properties": {
                "command": {"enum": list(COMMANDS)},
                "seed": {"type": "integer"},
                "a": {"type": ["string", "null"]},
                "b": {"type": ["string", "null"]},
            },
        },
        "results": {"type": ["object", "array"]},
        "timing": {
            "type": "object",
            "required": ["seconds"],
            "properties": {"seconds": {"type": "string"}},
        },
    },
}

# flag name -> (type, default)
DEFAULTS = {
    "a": (str, "1"),
    "b": (str, "1"),
    "q": (int, 2),
    "q_range": (str, None),
    "k": (int, None),
    "window": (int, None),
    "iters": (int, 34),
    "n": (int, 8),
    "seed": (int, 0),
    "probes": (int, 3),
    "mode": (str, SINGLE_VARIABLE),
    "regime": (str, None),
    "pattern": (str, None),
    "tol": (str, "1e-12"),
    "staircase": (str, None),
    "case": (str, None),
    "direction": (str, NE),
    "format": (str, "ascii"),
    "glyphs": (str, None),
    "workers": (int, 1),
    "output": (str, None),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kdvsing",
        description="Singularity patterns and dynamical degrees of discrete KdV reductions.",
    )
    parser.add_argument("--version", action="version", version=f"kdvsing {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value file supplying any flag")
        p.add_argument("--seed", type=int, help="RNG seed (default 0)")
        p.add_argument("--output", help="report path (default: $%s or stdout)" % ENV_OUTPUT_DIR)

    def params(p):
        p.add_argument("--a", help='coefficient a as "p/q" (default 1)')
        p.add_argument("--b", help='coefficient b as "p/q" (default 1)')
        p.add_argument("--q", type=int, help="reduction width q (default 2)")

    p = sub.add_parser("analyze", help="classify the pattern of u_k = 0 under phi_q")
    common(p)
    params(p)
    p.add_argument("--k", type=int, help="seeded coordinate (default q+1)")
    p.add_argument("--window", type=int, help="iteration window (default 6q+10)")
    p.add_argument("--probes", type=int, help="resamples per coordinate (default 3)")

    p = sub.add_parser("express", help="characteristic polynomial of a value-count pattern")
    common(p)
    params(p)
    p.add_argument("--regime", choices=["integrable", "nonintegrable"])
    p.add_argument("--pattern", help="JSON value-count pattern (overrides --regime)")
    p.add_argument("--tol", help="bracket width for the root, a decimal (default 1e-12)")

    p = sub.add_parser("dyndeg", help="height-growth estimate of the dynamical degree")
    common(p)
    params(p)
    p.add_argument("--iters", type=int, help="orbit length (default 34)")

    p = sub.add_parser("degrees", help="exact degrees of x_{q+1}, ..., x_{q+n}")
    common(p)
    params(p)
    p.add_argument("--mode", choices=[SINGLE_VARIABLE, GENERIC_LINE])
    p.add_argument("--n", type=int, help="number of iterates (default 8)")

    p = sub.add_parser("lattice", help="evolve a staircase and render its pattern")
    common(p)
    p.add_argument("--a", help='coefficient a as "p/q" (default 1)')
    p.add_argument("--b", help='coefficient b as "p/q" (default 1)')
    p.add_argument("--staircase", help="JSON file {steps: [{width, values}], anchor: [m, n]}")
    p.add_argument("--case", choices=[CASE1, CASE2, CASE3, CASE4, CASE5])
    p.add_argument("--direction", choices=[NE, SW])
    p.add_argument("--format", choices=["ascii", "json", "svg"])
    p.add_argument("--glyphs", help='JSON object overriding glyphs, e.g. {"inf": "*"}')

    p = sub.add_parser("sweep", help="analyze every singular hypersurface over a q-range")
    common(p)
    p.add_argument("--a", help='coefficient a as "p/q" (default 1)')
    p.add_argument("--b", help='coefficient b as "p/q" (default 1)')
    p.add_argument("--q-range", dest="q_range", help="inclusive range lo:hi (default 2:8)")
    p.add_argument("--window", type=int)
    p.add_argument("--probes", type=int)
    p.add_argument("--workers", type=int, help="parallel worker processes (default 1)")
    return parser


def read_config_file(path: str) -> dict:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigInvalid("config", f"cannot read {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigInvalid("config", f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in DEFAULTS:
            raise ConfigInvalid(key, f"unknown key in {path} (line {lineno})")
        out[key] = value
    return out


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge defaults < config file < flags and validate the result."""
    cfg = {"command": args.command}
    from_file = read_config_file(args.config) if getattr(args, "config", None) else {}
    for key, (typ, default) in DEFAULTS.items():
        value = getattr(args, key, None)
        if value is None and key in from_file:
            try:
                value = typ(from_file[key])
            except ValueError as exc:
                raise ConfigInvalid(key, f"bad value {from_file[key]!r}") from exc
        cfg[key] = default if value is None else value
    validate_config(cfg)
    return cfg


def _rational(field: str, text: str):
    try:
        return qq(str(text))
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigInvalid(field, f'expected an exact rational "p/q", got {text!r}') from exc


def validate_config(cfg: dict) -> None:
    cmd = cfg["command"]
    if cmd not in COMMANDS:
        raise ConfigInvalid("command", f"unknown command {cmd!r}")
    a, b = _rational("a", cfg["a"]), _rational("b", cfg["b"])
    if a == 0:
        raise ConfigInvalid("a", "must be nonzero")
    if b == 0:
        raise ConfigInvalid("b", "must be nonzero")
    cfg["a"], cfg["b"] = qstr(a), qstr(b)
    if cfg["q"] < 1:
        raise ConfigInvalid("q", "must be >= 1")
    if cmd == "analyze":
        if cfg["k"] is None:
            cfg["k"] = cfg["q"] + 1
        if not 2 <= cfg["k"] <= cfg["q"] + 1:
            raise ConfigInvalid("k", f"must lie in 2..q+1 = 2..{cfg['q'] + 1}")
    if cfg["window"] is not None and cfg["window"] < 1:
        raise ConfigInvalid("window", "must be positive")
    if cfg["probes"] < 1:
        raise ConfigInvalid("probes", "must be positive")
    if cfg["n"] < 1:
        raise ConfigInvalid("n", "must be positive")
    if cfg["workers"] < 1:
        raise ConfigInvalid("workers", "must be positive")
    try:
        tol = float(cfg["tol"])
    except ValueError as exc:
        raise ConfigInvalid("tol", f"not a decimal: {cfg['tol']!r}") from exc
    if not tol > 0:
        raise ConfigInvalid("tol", "must be positive")
    if cmd == "sweep":
        cfg["q_range"] = cfg["q_range"] or "2:8"
        _q_range(cfg["q_range"])
    if cmd == "express" and cfg["pattern"] is None and cfg["regime"] is None:
        cfg["regime"] = "integrable" if a == b else "nonintegrable"
    if cmd == "lattice" and cfg["staircase"] is None and cfg["case"] is None:
        raise ConfigInvalid("staircase", "give --staircase FILE or --case CaseN")


def _q_range(text: str) -> range:
    try:
        lo, hi = (int(s) for s in text.split(":"))
    except ValueError as exc:
        raise ConfigInvalid("q_range", f'expected "lo:hi", got {text!r}') from exc
    if lo < 1 or hi < lo:
        raise ConfigInvalid("q_range", "need 1 <= lo <= hi")
    return range(lo, hi + 1)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _params(cfg) -> MapParams:
    return MapParams(cfg["a"], cfg["b"], cfg["q"])


def _express_record(result) -> dict:
    out = result.to_dict()
    factors = sympy.factor_list(result.polynomial.as_sympy().as_expr(), LAMBDA)
    out["factorization"] = [
        {"factor": str(f).replace("lambda", "λ").replace("**", "^"), "multiplicity": m}
        for f, m in factors[1]
    ]
    return out


def cmd_analyze(cfg) -> dict:
    p = _params(cfg)
    pat = classify_pattern(p, cfg["k"], window=cfg["window"], seed=cfg["seed"], probe_count=cfg["probes"])
    rec = pat.to_record()
    try:
        vcp = ValueCountPattern.from_singularity_pattern(pat)
        rec["express"] = _express_record(express(vcp, float(cfg["tol"])))
    except KdVSingError as exc:
        rec["express"] = {"skipped": str(exc)}
    return rec


def cmd_express(cfg) -> dict:
    q = cfg["q"]
    if cfg["pattern"] is not None:
        try:
            data = json.loads(cfg["pattern"])
            vcp = ValueCountPattern(**data)
        except (ValueError, TypeError) as exc:
            raise ConfigInvalid("pattern", f"not a value-count pattern: {exc}") from exc
    elif cfg["regime"] == "integrable":
        vcp = confined_reduction_pattern(q)
    elif cfg["regime"] == "nonintegrable":
        vcp = unconfined_reduction_pattern(q)
    else:
        raise ConfigInvalid("regime", "must be integrable or nonintegrable")
    rec = _express_record(express(vcp, float(cfg["tol"])))
    rec["tolerance"] = cfg["tol"]
    return rec


def cmd_dyndeg(cfg) -> dict:
    p = _params(cfg)
    est = diophantine_degree(p, n_iters=cfg["iters"], seed=cfg["seed"])
    rec = est.to_dict()
    rec["lambda_hat"] = f"{est.lambda_hat:.6f}"
    rec["lambda_linear"] = f"{est.lambda_linear:.6f}"
    rec["poly_exponent"] = f"{est.poly_exponent:.4f}"
    rec["slope"] = f"{est.slope:.8f}"
    rec["residual"] = f"{est.residual:.3e}"
    rec["heights"] = [f"{h:.4f}" for h in est.series.heights]
    vcp = confined_reduction_pattern(p.q) if p.integrable else unconfined_reduction_pattern(p.q)
    root = express(vcp).root
    rec["express_root"] = root.decimal()
    rec["relative_gap"] = f"{abs(est.lambda_hat - root.value) / root.value:.4e}"
    return rec


def cmd_degrees(cfg) -> dict:
    p = _params(cfg)
    degs = degree_sequence(p, mode=cfg["mode"], n=cfg["n"], seed=cfg["seed"])
    return {
        "mode": cfg["mode"],
        "indices": [p.q + j for j in range(1, cfg["n"] + 1)],
        "degrees": degs,
    }


def _load_staircase(path: str) -> Staircase:
    try:
        data = json.loads(Path(path).read_text())
        return Staircase(tuple(data["steps"]), tuple(data.get("anchor", (0, 0))))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigInvalid("staircase", f"cannot load {path}: {exc}") from exc


def cmd_lattice(cfg) -> dict:
    p = MapParams(cfg["a"], cfg["b"], 1)
    if cfg["staircase"] is not None:
        stair = _load_staircase(cfg["staircase"])
    else:
        stair = case_scenario(cfg["case"], seed=cfg["seed"])
    glyphs = None
    if cfg["glyphs"]:
        try:
            glyphs = json.loads(cfg["glyphs"])
        except ValueError as exc:
            raise ConfigInvalid("glyphs", f"not JSON: {exc}") from exc
    grid = evolve(stair, p, cfg["direction"])
    pm = grid.pattern(glyphs)
    pm.cases = [i.to_dict() for i in classify_interaction(stair, p)]
    rec = pm.to_dict()
    rec["rendering"] = {"format": cfg["format"], "text": render_pattern(pm, cfg["format"])}
    return rec


def _sweep_one(job):
    a, b, q, k, window, probes, seed = job
    cfg = {"a": a, "b": b, "q": q, "k": k, "window": window, "probes": probes, "seed": seed, "tol": "1e-12"}
    return cmd_analyze(cfg)


def cmd_sweep(cfg) -> list:
    jobs = []
    for q in _q_range(cfg["q_range"]):
        p = MapParams(cfg["a"], cfg["b"], q)
        for k in enumerate_codim1_singularities(p):
            jobs.append((cfg["a"], cfg["b"], q, k, cfg["window"], cfg["probes"], cfg["seed"]))
    if cfg["workers"] > 1:
        with ProcessPoolExecutor(max_workers=cfg["workers"]) as pool:
            return list(pool.map(_sweep_one, jobs))
    return [_sweep_one(j) for j in jobs]


HANDLERS = {
    "analyze": cmd_analyze,
    "express": cmd_express,
    "dyndeg": cmd_dyndeg,
    "degrees": cmd_degrees,
    "lattice": cmd_lattice,
    "sweep": cmd_sweep,
}


def run(cfg: dict) -> dict:
    """Execute a validated config and wrap the results in a report envelope."""
    start = time.perf_counter()
    results = HANDLERS[cfg["command"]](cfg)
    report = {
        "schema": SCHEMA_VERSION,
        "tool": {"name": "kdvsing", "version": __version__},
        "config": {k: v for k, v in cfg.items() if k != "output"},
        "results": results,
        "timing": {"seconds": f"{time.perf_counter() - start:.3f}"},
    }
    jsonschema.validate(report, REPORT_SCHEMA)
    return report


def results_bytes(report: dict) -> bytes:
    """Canonical serialisation of the deterministic part of a report."""
    return json.dumps(report["results"], sort_keys=True, ensure_ascii=False).encode()


def _output_path(cfg: dict, report: dict) -> Path | None:
    if cfg.get("output"):
        return Path(cfg["output"])
    env = os.environ.get(ENV_OUTPUT_DIR)
    if env:
        digest = hashlib.sha256(
            json.dumps(report["config"], sort_keys=True).encode()
        ).hexdigest()[:12]
        return Path(env) / f"{cfg['command']}-{digest}.json"
    return None


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        report = run(cfg)
    except ConfigInvalid as exc:
        print(f"kdvsing: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except KdVSingError as exc:
        print(f"kdvsing: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    text = json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    path = _output_path(cfg, report)
    if path is None:
        sys.stdout.write(text)
        return 0
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    if cfg["command"] == "lattice":
        ext = {"ascii": ".txt", "json": ".pattern.json", "svg": ".svg"}[cfg["format"]]
        path.with_suffix(ext).write_text(report["results"]["rendering"]["text"])
    print(str(path))
    return 0


if __name__ == "__main__":
    sys.exit(main())
