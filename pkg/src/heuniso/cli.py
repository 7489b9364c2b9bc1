"""Command-line front end: ``heuniso <command> [--config file.json] [flags]``.

Every command builds a job configuration (config file first, flags on top),
validates it against the command's schema, looks it up in the store and
otherwise runs it and stores the result. Exit codes: 0 ok, 1 input error,
2 numeric failure, 3 store or file error.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from . import __version__
from .errors import (
    EventShortfall,
    HeunisoError,
    InputError,
    NumericError,
    SchemaError,
    StoreError,
)
from .heun_family import HeunSpec, cjson

log = logging.getLogger("heuniso")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3

# allowed keys per command
SCHEMA: dict[str, set[str]] = {
    "stokes": {"family", "params", "a", "q", "order", "seed_radius", "rel_tol"},
    "monodromy": {"family", "params", "a", "q", "basepoint", "rel_tol"},
    "trace": {"kind", "params", "x0", "y0", "v0", "yp0", "x1", "crossing", "window_hi", "csv"},
    "isoset": {"preset", "kind", "params", "x0", "y0", "v0", "yp0", "interval", "count", "variant",
               "invariants"},
    "accessory": {"kind", "params", "a", "b", "event", "branch", "variant", "x0", "y0", "v0", "yp0", "x1"},
    "asym": {"regime", "n", "alpha", "beta", "sigma", "s", "theta0", "theta1", "thetainf", "mu"},
    "verify": {"suite"},
}

PRESETS = {
    # exact solutions: y = -1/x for PII(mu=1), y = -2x for PIV(theta0 = theta_inf = 1/2)
    "pii-rational": {"kind": "P2", "params": {"mu": 1.0}, "x0": 1.0, "y0": -1.0, "yp0": 1.0,
                     "interval": [-1.0, 1.0], "count": 1},
    "piv-rational": {"kind": "P4", "params": {"theta0": 0.5, "thetainf": 0.5}, "x0": 1.0, "y0": -2.0,
                     "yp0": -2.0, "interval": [-1.0, 1.0], "count": 1},
}


def parse_complex(s) -> complex:
    if isinstance(s, (list, tuple)) and len(s) == 2:
        return complex(float(s[0]), float(s[1]))
    if isinstance(s, (int, float, complex)):
        return complex(s)
    try:
        return complex(str(s).replace(" ", "").replace("i", "j"))
    except ValueError:
        raise InputError(f"not a complex number: {s!r}") from None


def parse_range(s) -> list[int]:
    if isinstance(s, list):
        return [int(v) for v in s]
    txt = str(s)
    try:
        if ".." in txt:
            lo, hi = txt.split("..")
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(v) for v in txt.split(",")]
    except ValueError:
        raise SchemaError(f"malformed range {s!r}; use N, N,M or N..M") from None


def parse_interval(s) -> tuple[float, float]:
    if isinstance(s, (list, tuple)) and len(s) == 2:
        return float(s[0]), float(s[1])
    try:
        lo, hi = str(s).split(":")
        return float(lo), float(hi)
    except ValueError:
        raise SchemaError(f"malformed interval {s!r}; use LO:HI") from None


def _kv_params(items) -> dict:
    out = {}
    for it in items or []:
        if "=" not in it:
            raise SchemaError(f"parameter {it!r} must be NAME=VALUE")
        k, v = it.split("=", 1)
        out[k] = v
    return out


def validate(command: str, cfg: dict) -> dict:
    allowed = SCHEMA.get(command)
    if allowed is None:
        raise SchemaError(f"unknown command {command!r}")
    extra = set(cfg) - allowed - {"seed"}
    if extra:
        raise SchemaError(f"unknown keys for {command}: {sorted(extra)}")
    return cfg


def _jsonable(cfg: dict) -> dict:
    """Normalized config (complex numbers as [re, im]) used for hashing."""
    def norm(v):
        if isinstance(v, complex):
            return cjson(v)
        if isinstance(v, dict):
            return {k: norm(x) for k, x in sorted(v.items())}
        if isinstance(v, (list, tuple)):
            return [norm(x) for x in v]
        return v
    return norm(cfg)


# ---------------------------------------------------------------------------
# commands

def _spec(cfg) -> HeunSpec:
    if "family" not in cfg:
        raise SchemaError("a Heun family is required (--family)")
    params = {k: parse_complex(v) for k, v in (cfg.get("params") or {}).items()}
    return HeunSpec(cfg["family"], params, parse_complex(cfg.get("a", 0)), parse_complex(cfg.get("q", 0)))


def _icfg(cfg):
    from .complex_core import IntegratorConfig

    if "rel_tol" not in cfg:
        return None
    r = float(cfg["rel_tol"])
    return IntegratorConfig(rel_tol=r, abs_tol=r * 1e-2)


def cmd_stokes(cfg) -> dict:
    from .monodromy import MatchPlan, compute_stokes

    spec = _spec(cfg)
    plan = MatchPlan(seed_radius=cfg.get("seed_radius"), order=int(cfg.get("order", 20)))
    data = compute_stokes(spec, plan, _icfg(cfg))
    return {"spec": spec.to_json(), "monodromy": data.to_json(), "residual": data.residual}


def cmd_monodromy(cfg) -> dict:
    from .monodromy import compute_fuchsian_monodromy

    spec = _spec(cfg)
    if spec.family != "he":
        return cmd_stokes(cfg)
    bp = parse_complex(cfg["basepoint"]) if "basepoint" in cfg else None
    data = compute_fuchsian_monodromy(spec, bp, cfg=_icfg(cfg))
    return {"spec": spec.to_json(), "monodromy": data.to_json(), "residual": data.residual}


def _kind(cfg):
    from .painleve import PainleveKind

    if "kind" not in cfg:
        raise SchemaError("a Painleve equation is required (--kind)")
    name = str(cfg["kind"]).upper()
    params = {k: parse_complex(v) for k, v in (cfg.get("params") or {}).items()}
    return PainleveKind.make(name, **params)


def _init(cfg):
    from .painleve import InitialData

    if "y0" not in cfg:
        raise SchemaError("initial data needs y0")
    v0 = parse_complex(cfg["v0"]) if "v0" in cfg else None
    yp0 = parse_complex(cfg["yp0"]) if "yp0" in cfg else None
    if v0 is None and yp0 is None:
        raise SchemaError("initial data needs v0 or yp0")
    return InitialData(parse_complex(cfg.get("x0", 0)), parse_complex(cfg["y0"]), yp0, v0)


def _trace(cfg, kind, init):
    from .complex_core import Path
    from .painleve import DetourOptions, integrate_painleve

    if "x1" not in cfg:
        raise SchemaError("trace needs an end point x1")
    opts = DetourOptions(crossing=cfg.get("crossing", "detour"),
                         window_hi=float(cfg["window_hi"]) if "window_hi" in cfg else None)
    return integrate_painleve(kind, init, Path.line(init.x0, parse_complex(cfg["x1"])), options=opts)


def cmd_trace(cfg) -> dict:
    kind = _kind(cfg)
    init = _init(cfg)
    traj = _trace(cfg, kind, init)
    if cfg.get("csv"):
        try:
            with open(cfg["csv"], "w") as fh:
                traj.to_csv(fh)
        except OSError as e:
            raise StoreError(f"cannot write {cfg['csv']}: {e}") from None
    return {
        "kind": kind.to_json(),
        "samples": len(traj.xs),
        "final_x": cjson(traj.xs[-1]),
        "final_state": [cjson(v) for v in traj.states[-1]],
        "events": [e.to_json() for e in traj.events],
    }


def cmd_accessory(cfg) -> dict:
    from .accessory import accessory_from_expansion
    from .painleve import LocalExpansion, branches

    kind = _kind(cfg)
    variant = cfg.get("variant")
    if "y0" in cfg:
        traj = _trace(cfg, kind, _init(cfg))
        return {"pairs": [accessory_from_expansion(kind, e, traj, variant).to_json() for e in traj.events]}
    for k in ("a", "b", "event", "branch"):
        if k not in cfg:
            raise SchemaError(f"accessory needs {k} (or initial data to trace)")
    ev, label = cfg["event"], cfg["branch"]
    br = [b for b in branches(kind, ev) if b.label == label]
    if not br:
        raise InputError(f"{kind.name} has no {ev} branch {label!r}")
    a, b = parse_complex(cfg["a"]), parse_complex(cfg["b"])
    exp = LocalExpansion(ev, label, abs(br[0].val), a, b, 0.0,
                         complex(br[0].datum(a)) if br[0].free is not None else b, math.inf, kind=kind)
    return {"pairs": [accessory_from_expansion(kind, exp, None, variant).to_json()]}


def cmd_isoset(cfg) -> dict:
    from .accessory import (
        accessory_from_expansion,
        attach_invariants,
        isomonodromy_set,
    )
    from .monodromy import invariants_distance
    from .painleve import scan_trajectories

    count = int(cfg.get("count", 2))
    if count < 0:
        raise InputError("count must be non-negative")
    if count == 0:
        return {"pairs": [], "distance": []}
    kind = _kind(cfg)
    init = _init(cfg)
    if "interval" not in cfg:
        raise SchemaError("isoset needs an interval (--interval LO:HI)")
    events, trajs = scan_trajectories(kind, init, parse_interval(cfg["interval"]))
    if not events:
        raise EventShortfall(f"found 0 of {count} events", partial=[])
    owner = {id(e): t for t in trajs for e in t.events}
    first = events[0]
    head = accessory_from_expansion(kind, first, owner[id(first)], cfg.get("variant"))
    pairs = isomonodromy_set(head.spec(), trajs, count, kind=kind, variant=cfg.get("variant"),
                             check_first=False)
    pairs.sort(key=lambda p: p.painleve_a.real)
    dist = []
    if cfg.get("invariants", True) and len(pairs) > 1:
        attach_invariants(pairs)
        dist = [[invariants_distance(p.invariants, r.invariants) for r in pairs] for p in pairs]
    return {"kind": kind.to_json(), "pairs": [p.to_json() for p in pairs], "distance": dist}


def cmd_asym(cfg) -> dict:
    from . import asymptotics as A

    regime = str(cfg.get("regime", "")).lower()
    ns = parse_range(cfg.get("n", "3..5"))
    if not ns or min(ns) < 1:
        raise SchemaError("n must be positive")
    rows = []
    if regime == "rbhe":
        al, be = float(cfg.get("alpha", 0)), parse_complex(cfg.get("beta", 0))
        for n in ns:
            p = A.rbhe_zero_asymptotic(n, al, be)
            m = abs(A.rbhe_synthetic_zero(n, al, be))
            rows.append({"n": n, "predicted": p.abs_a, "q": cjson(p.q), "measured": m,
                         "rel_err": abs(p.abs_a - m) / m})
    elif regime == "che":
        args = [parse_complex(cfg.get(k, 0)) for k in ("sigma", "s", "theta0", "theta1", "thetainf")]
        for n in ns:
            p = A.che_pole_asymptotic(n, *args)
            rows.append({"n": n, "predicted": p.log_abs_a, "arg": p.arg_a, "a": cjson(p.a), "q": cjson(p.q)})
    elif regime == "dhe":
        mu = float(cfg.get("mu", 1.0))
        for n in ns:
            a, q = A.dhe_zero_asymptotic(n, mu)
            m = A.mtw_root(mu, a)
            rows.append({"n": n, "predicted": a, "q": q, "measured": m, "rel_err": abs(a - m) / m})
    else:
        raise SchemaError("regime must be rbhe, che or dhe")
    return {"regime": regime, "rows": rows}


def cmd_verify(cfg) -> dict:
    from . import verify

    suite = cfg.get("suite", "quick")
    if suite not in ("quick", "full"):
        raise SchemaError("suite must be quick or full")
    res = verify.run(suite)
    return {"suite": suite, "checks": [{"name": n, "passed": bool(ok), "detail": d} for n, ok, d in res]}


COMMANDS = {
    "stokes": cmd_stokes,
    "monodromy": cmd_monodromy,
    "trace": cmd_trace,
    "isoset": cmd_isoset,
    "accessory": cmd_accessory,
    "asym": cmd_asym,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="heuniso", description="Isomonodromy toolkit for Heun class equations")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with the job configuration")
        p.add_argument("--store", help="store directory (default: $HEUNISO_STORE)")
        p.add_argument("--no-cache", action="store_true", help="recompute even if stored")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("-v", "--verbose", action="store_true")
        p.add_argument("--param", action="append", metavar="NAME=VALUE", help="fixed parameter (repeatable)")
        p.add_argument("--seed", type=int, help="seed recorded with the job (randomized grids)")
        return p

    for name in ("stokes", "monodromy"):
        p = common(sub.add_parser(name))
        p.add_argument("--family")
        p.add_argument("--a")
        p.add_argument("--q")
        if name == "stokes":
            p.add_argument("--order", type=int)
            p.add_argument("--seed-radius", type=float, dest="seed_radius")
        else:
            p.add_argument("--basepoint")
        p.add_argument("--rel-tol", type=float, dest="rel_tol")

    for name in ("trace", "isoset", "accessory"):
        p = common(sub.add_parser(name))
        p.add_argument("--kind")
        p.add_argument("--x0")
        p.add_argument("--y0")
        p.add_argument("--v0")
        p.add_argument("--yp0")
        if name in ("trace", "accessory"):
            p.add_argument("--x1")
        if name == "trace":
            p.add_argument("--crossing", choices=("detour", "expansion"))
            p.add_argument("--window-hi", type=float, dest="window_hi")
            p.add_argument("--csv")
        if name == "isoset":
            p.add_argument("--preset", choices=sorted(PRESETS))
            p.add_argument("--interval")
            p.add_argument("--count", type=int)
            p.add_argument("--no-invariants", dest="invariants", action="store_const", const=False)
        if name in ("isoset", "accessory"):
            p.add_argument("--variant")
        if name == "accessory":
            p.add_argument("--a")
            p.add_argument("--b")
            p.add_argument("--event")
            p.add_argument("--branch")

    p = common(sub.add_parser("asym"))
    p.add_argument("--regime")
    p.add_argument("--n")
    for k in ("alpha", "beta", "sigma", "s", "theta0", "theta1", "thetainf", "mu"):
        p.add_argument(f"--{k}")

    p = common(sub.add_parser("verify"))
    p.add_argument("--suite", choices=("quick", "full"))
    return ap


_META = {"config", "store", "no_cache", "format", "verbose", "param", "command"}


def job_config(args) -> dict:
    cfg: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except OSError as e:
            raise StoreError(f"cannot read config {args.config}: {e}") from None
        except ValueError as e:
            raise SchemaError(f"config {args.config} is not valid JSON: {e}") from None
        if not isinstance(cfg, dict):
            raise SchemaError("config file must hold a JSON object")
    for k, v in vars(args).items():
        if k in _META or v is None:
            continue
        cfg[k] = v
    if args.param:
        params = dict(cfg.get("params") or {})
        params.update(_kv_params(args.param))
        cfg["params"] = params
    validate(args.command, cfg)
    if "preset" in cfg:
        # expand here so the job hash covers the actual inputs
        name = cfg.pop("preset")
        if name not in PRESETS:
            raise SchemaError(f"unknown preset {name!r}; have {sorted(PRESETS)}")
        cfg = {**PRESETS[name], **cfg}
    return cfg


def _emit(payload, fmt: str, out=None):
    out = out or sys.stdout
    if fmt == "csv" and isinstance(payload, dict) and "rows" in payload:
        import csv

        rows = payload["rows"]
        cols = list(rows[0].keys()) if rows else ["n"]
        w = csv.writer(out, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([json.dumps(r[c]) if isinstance(r[c], list) else r[c] for c in cols])
        return
    out.write(json.dumps(payload, sort_keys=True, indent=1) + "\n")


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    from .store import Store

    try:
        cfg = _jsonable(job_config(args))
        store = Store(args.store)
        rec = None if args.no_cache else store.lookup(args.command, cfg)
        if rec is not None:
            log.info("cache hit %s", rec.hash)
        else:
            status, code = "ok", EXIT_OK
            try:
                payload = COMMANDS[args.command](cfg)
            except EventShortfall as e:
                payload = {"error": str(e), "pairs": [p.to_json() for p in (e.partial or [])]}
                status, code = "shortfall", EXIT_NUMERIC
            if args.command == "verify" and not all(c["passed"] for c in payload["checks"]):
                status, code = "failed", EXIT_NUMERIC
            rec = store.new_record(args.command, cfg, payload, status)
            store.put(rec)
            if code != EXIT_OK:
                _emit({"hash": rec.hash, "status": status, "payload": payload}, "json")
                return code
        if rec.status != "ok":
            _emit({"hash": rec.hash, "status": rec.status, "payload": rec.payload}, "json")
            return EXIT_NUMERIC
        if args.format == "csv":
            _emit(rec.payload, "csv")
        else:
            _emit({"hash": rec.hash, "cached": rec.cached, "status": rec.status, "payload": rec.payload}, "json")
        return EXIT_OK
    except StoreError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except InputError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except NumericError as e:
        print(f"numeric error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except HeunisoError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
