"""Command-line entry point: ``eightvsos compute|verify|sample``."""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .coeffs import substituted
from .determinant import rep_partition
from .errors import ConfigError, ParseError, SOSError, ValidationError
from .lattice import MAX_ENUM_L, ModelParams, partition_enum
from .theta import ThetaContext
from .verification import (DEFAULT_THRESHOLDS, FAMILIES, run_suite,
                           sample_params)

SCHEMA_VERSION = 1
METHODS = ("enum", "repA", "repD")
SUITES = {
    "all": FAMILIES,
    "goldens": ("golden",),
    "equations": ("eqA", "eqD", "modA", "modD", "unfolded"),
    "determinants": ("hz", "hzsys", "ztoz"),
    "reps": ("repA", "repD"),
    "kernel": ("theta_props",),
}

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    L: int
    p: float
    gamma: complex | None = None
    tau: complex | None = None
    x: list | None = None
    mu: list | None = None
    x0: complex | None = None
    x0bar: complex | None = None
    seed: int = 0
    draws: int = 20
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))
    method: str = "enum"
    index: int = 0
    L_list: list | None = None

    @property
    def ctx(self) -> ThetaContext:
        return ThetaContext(self.p)


def _complex(value, name):
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
            isinstance(t, (int, float)) and not isinstance(t, bool) for t in value):
        z = complex(value[0], value[1])
        if math.isfinite(z.real) and math.isfinite(z.imag):
            return z
    raise ValidationError(f"{name} must be a finite [re, im] pair", field=name)


def _int(value, name, lo=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{name} must be an integer", field=name)
    if lo is not None and value < lo:
        raise ValidationError(f"{name} must be >= {lo}", field=name)
    return value


_KNOWN = {"L", "p", "gamma", "tau", "x", "mu", "x0", "x0bar", "seed", "draws",
          "tolerances", "method", "index", "L_list"}


def config_from_dict(data) -> RunConfig:
    if not isinstance(data, dict):
        raise ValidationError("config must be a JSON object")
    extra = set(data) - _KNOWN
    if extra:
        name = sorted(extra)[0]
        raise ValidationError(f"unknown field {name!r}", field=name)
    for name in ("L", "p"):
        if name not in data:
            raise ValidationError(f"missing required field {name!r}", field=name)
    L = _int(data["L"], "L", 1)
    if L > MAX_ENUM_L:
        raise ValidationError(f"L must be <= {MAX_ENUM_L}", field="L")
    p = data["p"]
    if isinstance(p, bool) or not isinstance(p, (int, float)) or not 0 < p < 1:
        raise ValidationError("p must be a number in (0, 1)", field="p")
    cfg = RunConfig(L=L, p=float(p))
    for name in ("gamma", "tau", "x0", "x0bar"):
        if data.get(name) is not None:
            setattr(cfg, name, _complex(data[name], name))
    for name in ("x", "mu"):
        if data.get(name) is not None:
            vals = data[name]
            if not isinstance(vals, list):
                raise ValidationError(f"{name} must be a list of [re, im] pairs", field=name)
            if len(vals) != L:
                raise ValidationError(f"{name} has length {len(vals)}, expected L={L}", field=name)
            setattr(cfg, name, [_complex(v, f"{name}[{k}]") for k, v in enumerate(vals)])
    cfg.seed = _int(data.get("seed", 0), "seed")
    cfg.draws = _int(data.get("draws", 20), "draws", 1)
    tol = data.get("tolerances", {})
    if not isinstance(tol, dict):
        raise ValidationError("tolerances must be an object", field="tolerances")
    for key, val in tol.items():
        if key not in DEFAULT_THRESHOLDS:
            raise ValidationError(f"unknown tolerance class {key!r}", field="tolerances")
        if isinstance(val, bool) or not isinstance(val, (int, float)) or not val > 0:
            raise ValidationError(f"tolerance {key!r} must be positive", field="tolerances")
        cfg.tolerances[key] = float(val)
    method = data.get("method", "enum")
    if method not in METHODS:
        raise ValidationError(f"method must be one of {METHODS}", field="method")
    cfg.method = method
    cfg.index = _int(data.get("index", 0), "index", 0)
    if cfg.index > L:
        raise ValidationError(f"index must lie in 0..{L}", field="index")
    if data.get("L_list") is not None:
        ll = data["L_list"]
        if not isinstance(ll, list) or not ll:
            raise ValidationError("L_list must be a non-empty list", field="L_list")
        cfg.L_list = [_int(v, "L_list", 1) for v in ll]
        if max(cfg.L_list) > MAX_ENUM_L:
            raise ValidationError(f"L_list entries must be <= {MAX_ENUM_L}", field="L_list")
    return cfg


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", line=exc.lineno) from None
    return config_from_dict(data)


def _pair(z):
    return [z.real, z.imag]


def config_to_dict(cfg: RunConfig) -> dict:
    out = {"L": cfg.L, "p": cfg.p}
    for name in ("gamma", "tau", "x0", "x0bar"):
        val = getattr(cfg, name)
        if val is not None:
            out[name] = _pair(val)
    for name in ("x", "mu"):
        val = getattr(cfg, name)
        if val is not None:
            out[name] = [_pair(z) for z in val]
    out.update(seed=cfg.seed, draws=cfg.draws, tolerances=dict(cfg.tolerances),
               method=cfg.method, index=cfg.index)
    if cfg.L_list is not None:
        out["L_list"] = list(cfg.L_list)
    return out


def params_from_config(cfg: RunConfig) -> ModelParams:
    """ModelParams for ``compute``; x0/x0bar are drawn from the seed if absent."""
    missing = [n for n in ("gamma", "tau", "x", "mu") if getattr(cfg, n) is None]
    if missing:
        raise ValidationError(f"compute needs field {missing[0]!r}", field=missing[0])
    rng = np.random.default_rng([cfg.seed, cfg.L, 11])
    x0, xb = cfg.x0, cfg.x0bar
    for _ in range(1000):
        a = x0 if x0 is not None else complex(rng.uniform(-1, 1), rng.uniform(-0.5, 0.5))
        b = xb if xb is not None else complex(rng.uniform(-1, 1), rng.uniform(-0.5, 0.5))
        params = ModelParams(cfg.L, cfg.gamma, cfg.tau, cfg.x, cfg.mu, a, b, cfg.ctx)
        if (x0 is not None and xb is not None) or params.guard_margin() >= 1.0:
            return params
    return params


def _num(r):
    return r if math.isfinite(r) else None


def run_compute(cfg: RunConfig, methods=None, timings: bool = False) -> dict:
    methods = [cfg.method] if not methods else list(methods)
    params = params_from_config(cfg)
    doc = {"schema_version": SCHEMA_VERSION, "command": "compute",
           "config": config_to_dict(cfg),
           "resolved": {"x0": _pair(params.x0), "x0bar": _pair(params.x0bar)},
           "results": [], "values": {}}
    limit = cfg.tolerances["ratio"]
    values = {}
    for m in methods:
        t0 = time.perf_counter()
        entry = {"check": f"compute({m})"}
        try:
            params.check_guard()
            if m == "enum":
                v = params.variables()
                z = partition_enum(params.replace(x=substituted(v, cfg.index)))
            else:
                z = rep_partition(m[-1], cfg.index, params.variables())
            values[m] = z
            doc["values"][m] = _pair(z)
            entry.update(residual=0.0, threshold=limit, passed=True)
        except (SOSError, ArithmeticError, ValueError) as exc:
            entry.update(residual=None, threshold=limit, passed=False,
                         error=f"{type(exc).__name__}: {exc}")
        if timings:
            entry["millis"] = 1e3 * (time.perf_counter() - t0)
        doc["results"].append(entry)
    names = [m for m in methods if m in values]
    for a in range(len(names)):
        for b in range(a + 1, len(names)):
            za, zb = values[names[a]], values[names[b]]
            dev = abs(za - zb) / max(abs(zb), 1e-300)
            doc["results"].append({"check": f"agreement({names[a]},{names[b]})",
                                   "residual": dev, "threshold": limit,
                                   "passed": dev <= limit})
    doc["passed"] = all(r["passed"] for r in doc["results"])
    return doc


def resolve_suite(selector: str) -> tuple:
    fams = []
    for part in selector.split(","):
        part = part.strip()
        if part in SUITES:
            fams += SUITES[part]
        elif part in FAMILIES:
            fams.append(part)
        else:
            raise ValueError(f"unknown check selector {part!r}")
    return tuple(f for f in FAMILIES if f in fams)


def run_verify(cfg: RunConfig, checks: str = "all", timings: bool = False) -> dict:
    families = resolve_suite(checks)
    L_list = cfg.L_list or [cfg.L]
    rep = run_suite(L_list, cfg.draws, cfg.seed, families, cfg.tolerances, cfg.ctx)
    results = []
    for r in rep.results:
        entry = {"check": r.check, "L": r.L, "draw": r.draw,
                 "residual": _num(r.residual), "threshold": r.threshold,
                 "passed": r.passed}
        if r.error:
            entry["error"] = r.error
        if timings:
            entry["millis"] = r.millis
        results.append(entry)
    draws = {f"L={L},draw={k}": _params_doc(p) for (L, k), p in rep.params.items()}
    return {"schema_version": SCHEMA_VERSION, "command": "verify",
            "config": config_to_dict(cfg), "suite": list(families),
            "params": draws, "results": results,
            "worst": {k: _num(v) for k, v in rep.worst().items()},
            "passed": rep.passed}


def _params_doc(p: ModelParams) -> dict:
    return {"gamma": _pair(p.gamma), "tau": _pair(p.tau),
            "x": [_pair(z) for z in p.x], "mu": [_pair(z) for z in p.mu],
            "x0": _pair(p.x0), "x0bar": _pair(p.x0bar)}


def sample_config(L: int, seed: int, p: float = 0.1) -> dict:
    params = sample_params(L, seed, ThetaContext(p))
    doc = {"L": L, "p": p}
    doc.update(_params_doc(params))
    doc["seed"] = seed
    return doc


def dumps(doc) -> str:
    # floats use repr, the shortest string that round-trips the double exactly
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eightvsos",
                                 description="Elliptic SOS domain-wall partition function.")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="evaluate the partition function")
    c.add_argument("--config", required=True)
    c.add_argument("--method", help="enum, repA, repD or a comma-separated list")
    c.add_argument("--index", type=int, help="substitute x0 for x_index (0 keeps X)")
    c.add_argument("--seed", type=int)
    c.add_argument("--out")
    c.add_argument("--timings", action="store_true", help="include wall times")

    v = sub.add_parser("verify", help="run the identity checks")
    v.add_argument("--config", required=True)
    v.add_argument("--suite", default="all",
                   help="all, goldens, equations, determinants, reps, kernel, "
                        "symmetry or check family names, comma-separated")
    v.add_argument("--seed", type=int)
    v.add_argument("--draws", type=int)
    v.add_argument("--out")
    v.add_argument("--timings", action="store_true", help="include wall times")

    s = sub.add_parser("sample", help="emit a guard-passing config")
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--p", type=float, default=0.1)
    s.add_argument("--out")
    return ap


def _emit(doc, out):
    text = dumps(doc)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "sample":
            if args.L < 1 or not 0 < args.p < 1:
                ap.error("--L must be >= 1 and --p in (0, 1)")
            _emit(sample_config(args.L, args.seed, args.p), args.out)
            return EXIT_PASS
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.command == "compute":
            methods = None
            if args.method:
                methods = [m.strip() for m in args.method.split(",")]
                bad = [m for m in methods if m not in METHODS]
                if bad:
                    ap.error(f"unknown method {bad[0]!r}")
            if args.index is not None:
                if not 0 <= args.index <= cfg.L:
                    ap.error(f"--index must lie in 0..{cfg.L}")
                cfg.index = args.index
            doc = run_compute(cfg, methods, args.timings)
        else:
            if args.draws is not None:
                if args.draws < 1:
                    ap.error("--draws must be >= 1")
                cfg.draws = args.draws
            try:
                resolve_suite(args.suite)
            except ValueError as exc:
                ap.error(str(exc))
            doc = run_verify(cfg, args.suite, args.timings)
    except ConfigError as exc:
        where = f" (field {exc.field})" if exc.field else ""
        where += f" (line {exc.line})" if exc.line else ""
        print(f"eightvsos: config error: {exc}{where}", file=sys.stderr)
        return EXIT_USAGE
    _emit(doc, args.out)
    return EXIT_PASS if doc["passed"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
