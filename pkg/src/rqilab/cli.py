"""Command-line front end: ``rqilab <command> [options]``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, replace
from pathlib import Path
from typing import Optional

import jsonschema

from . import __version__
from .costs import cost_from_name

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_ACCEPT = 0, 1, 2, 3

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "n": {"type": "number", "exclusiveMinimum": 1},
        "n_grid": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 1}, "minItems": 1},
        "cost": {"type": "string"},
        "digit": {"type": "integer", "minimum": 1},
        "w_grid": {"type": "array", "items": {"type": "number"}},
        "D": {"type": "integer", "minimum": 4},
        "M_t": {"type": "integer", "minimum": 10},
        "digit_cap": {"type": ["integer", "null"], "minimum": 1},
        "M": {"type": "array", "items": {"type": "integer", "minimum": 2}, "minItems": 1},
        "k": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "s": {"type": "array", "items": {"type": "number"}},
        "w": {"type": "array", "items": {"type": "number"}},
        "cutoff": {"type": "integer", "minimum": 1},
        "threads": {"type": "integer", "minimum": 1},
        "out": {"type": "string"},
        "format": {"enum": ["json", "csv"]},
    },
}

DEFAULTS = {
    "n": 1000.0, "n_grid": [1e2, 1e3, 1e4], "cost": "unit", "digit": None,
    "w_grid": [-0.1, -0.05, -0.02, 0.02, 0.05, 0.1], "D": 48, "M_t": 100000,
    "digit_cap": None, "M": [2, 5, 10, 20, 50, 100], "k": [1, 2, 3], "s": [2.4, 3.0],
    "w": [0.0, 0.05], "cutoff": 10000, "threads": 1, "out": None, "format": "json",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, help="worker pool size")
    common.add_argument("--out", help="output directory (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--config", help="JSON config file (schema validated)")

    p = _Parser(prog="rqilab", description=__doc__, parents=[common])
    p.add_argument("--version", action="version", version=f"rqilab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cost_args(sp):
        sp.add_argument("--cost", help="unit, chi, chiN or binlen")
        sp.add_argument("--digit", type=int, help="digit for the chi cost")

    sp = sub.add_parser("enumerate", parents=[common], help="count and summarize P_N")
    sp.add_argument("--n", type=float)
    cost_args(sp)
    sp.add_argument("--digit-cap", type=int, dest="digit_cap")
    sp.add_argument("--w-grid", type=float, nargs="*", dest="w_grid")
    sp.add_argument("--audit", action="store_true", help="also write one CSV row per rqi")

    sp = sub.add_parser("constants", parents=[common], help="spectral Gaussian constants")
    cost_args(sp)
    sp.add_argument("--D", type=int)
    sp.add_argument("--M-t", type=int, dest="M_t")

    sp = sub.add_parser("dimension", parents=[common], help="bounded-digit dimensions")
    sp.add_argument("--M", type=int, nargs="+")
    sp.add_argument("--D", type=int)
    sp.add_argument("--cycle-check", action="store_true", dest="cycle_check")

    sp = sub.add_parser("traces", parents=[common], help="trace identity audit")
    sp.add_argument("--k", type=int, nargs="+")
    sp.add_argument("--s", type=float, nargs="+")
    sp.add_argument("--w", type=float, nargs="+")
    sp.add_argument("--cutoff", type=int)
    sp.add_argument("--matrix", action="store_true", help="also evaluate the collocation traces")
    cost_args(sp)

    sp = sub.add_parser("study", parents=[common], help="empirical statistics against constants")
    sp.add_argument("--n-grid", type=float, nargs="+", dest="n_grid")
    cost_args(sp)

    sp = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    sp.add_argument("--quick", action="store_true")
    sp.add_argument("--only", type=int, nargs="+")
    sp.add_argument("--json", dest="json_path", help="write the report to this file")
    return p


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, the config file and explicit flags (in that order)."""
    conf = dict(DEFAULTS)
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        try:
            jsonschema.validate(data, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise UsageError(f"config invalid at {path}: {exc.message}") from None
        conf.update(data)
    for k, v in vars(args).items():
        if v is not None and k not in ("config", "command"):
            conf[k] = v
    if conf["threads"] < 1:
        raise UsageError("--threads must be >= 1")
    return conf


def _cost(conf):
    try:
        return cost_from_name(conf["cost"], conf.get("digit"))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _spectral_cfg(conf):
    from .spectral import SpectralConfig
    return SpectralConfig(D=int(conf["D"]), M_t=int(conf["M_t"]))


def _clean(x):
    """JSON-safe copy: NaN becomes null and numpy scalars become floats."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag} if x.imag else _clean(x.real)
    if hasattr(x, "item"):
        return _clean(x.item())
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _emit(conf, name: str, payload: dict, rows=None, header=None) -> None:
    if conf["format"] == "csv" and rows is not None:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(header)
        wr.writerows(rows)
        text, ext = buf.getvalue(), "csv"
    else:
        echo = {k: conf[k] for k in sorted(conf) if k not in ("out", "format", "threads")}
        doc = {"provenance": {"version": __version__, "command": name, "config": echo}, **payload}
        text, ext = json.dumps(_clean(doc), sort_keys=True, indent=2) + "\n", "json"
    if conf["out"]:
        out = Path(conf["out"])
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.{ext}").write_text(text)
    else:
        sys.stdout.write(text)


def cmd_enumerate(conf, args) -> int:
    from .orbits import population, write_audit_csv
    cost = _cost(conf)
    sm = population(conf["n"], [cost], conf["w_grid"], conf["digit_cap"],
                    partitions=conf["threads"], threads=conf["threads"])
    payload = {"summary": sm.to_json()}
    if args.audit:
        if not conf["out"]:
            raise UsageError("--audit needs --out")
        Path(conf["out"]).mkdir(parents=True, exist_ok=True)
        n = write_audit_csv(Path(conf["out"]) / "audit.csv", conf["n"], conf["digit_cap"],
                            chi_digit=cost.n if cost.kind == "chi" else 1)
        payload["audit_rows"] = n
    rows = [[cid, sm.count, repr(float(sm.csum[k])), repr(float(sm.csq[k]))]
            for k, cid in enumerate(sm.cost_ids)]
    _emit(conf, "enumerate", payload, rows, ["cost", "count", "sum", "sum_sq"])
    return EXIT_OK


def cmd_constants(conf, args) -> int:
    from .spectral import entropy, gaussian_constants, lambda_partials
    cost, cfg = _cost(conf), _spectral_cfg(conf)
    gc = gaussian_constants(cost, cfg)
    ent = entropy(cfg)
    dw = float(lambda_partials(1.0, 0.0, cost, cfg).dw.real)
    js = gc.to_json()
    payload = {"cost": cost.id, "entropy_closed": ent.closed, "entropy_spectral": ent.spectral,
               "mean_cost": gc.diagnostics["mean_cost"], "mean_cost_spectral": dw,
               "mean_cost_gap": abs(dw - gc.diagnostics["mean_cost"]),
               "mu": gc.mu, "nu": gc.nu, "mu1": gc.mu1, "nu1": gc.nu1,
               "sigma_samples": js["sigma_samples"], "diagnostics": js["diagnostics"],
               "tolerances": {"eigen": cfg.tol, "w_step": cfg.w_step}}
    rows = [[cost.id, repr(gc.mu), repr(gc.nu), repr(gc.mu1), repr(gc.nu1)]]
    _emit(conf, "constants", payload, rows, ["cost", "mu", "nu", "mu1", "nu1"])
    return EXIT_OK


def cmd_dimension(conf, args) -> int:
    from .constrained import (DIM_CONFIG, cycle_expansion_dimension, hausdorff_dim,
                              two_term_expansion)
    cfg = replace(DIM_CONFIG, D=int(args.D)) if args.D else DIM_CONFIG
    out, rows = [], []
    for M in conf["M"]:
        r = hausdorff_dim(int(M), cfg)
        e = {"M": r.M, "sigma_M": r.sigma_M, "residual": r.residual, "drift": r.drift,
             "two_term": two_term_expansion(r.M)}
        if args.cycle_check and M <= 3:
            e["cycle_expansion"] = cycle_expansion_dimension(int(M))
        out.append(e)
        rows.append([r.M, repr(r.sigma_M), repr(r.residual), repr(e["two_term"])])
    _emit(conf, "dimension", {"dimensions": out}, rows,
          ["M", "sigma_M", "residual", "two_term"])
    return EXIT_OK


def cmd_traces(conf, args) -> int:
    from .traces import Yk
    cost = _cost(conf)
    cfg = _spectral_cfg(conf) if args.matrix else None
    out, rows = [], []
    for k in conf["k"]:
        for s in conf["s"]:
            for w in conf["w"]:
                r = Yk(int(k), float(s), float(w), cost, int(conf["cutoff"]), cfg)
                out.append({"k": r.k, "s": r.s, "w": r.w, "direct": r.direct,
                            "trace_form": r.trace_form, "gap": r.gap, "tail": r.tail,
                            "matrix_form": r.matrix_form, "matrix_gap": r.matrix_gap,
                            "matrix_err": r.matrix_err})
                rows.append([r.k, r.s, r.w, repr(r.direct.real), repr(r.trace_form.real),
                             repr(r.gap), repr(r.tail)])
    _emit(conf, "traces", {"cost": cost.id, "identities": out}, rows,
          ["k", "s", "w", "direct", "trace_form", "gap", "tail"])
    return EXIT_OK


def cmd_study(conf, args) -> int:
    from .spectral import gaussian_constants
    from .stats import log_epsilon_study, run_study
    cost, cfg = _cost(conf), _spectral_cfg(conf)
    gc = gaussian_constants(cost, cfg)
    st = run_study(conf["n_grid"], cost, gc.mu, gc.nu, conf["w_grid"],
                   partitions=conf["threads"], threads=conf["threads"])
    payload = st.to_json()
    if len(st.summaries) >= 3:
        le = log_epsilon_study(st.summaries)
        payload["log_epsilon"] = {"slope": asdict(le.slope), "var_ratio": le.var_ratio,
                                  "rows": [asdict(r) for r in le.rows]}
    if conf["out"]:
        Path(conf["out"]).mkdir(parents=True, exist_ok=True)
        st.write_histogram_csv(Path(conf["out"]) / "histogram.csv")
    ws = sorted(st.rows[0].mgf)
    rows = [[repr(r.N), r.count, repr(r.mean), repr(r.var), repr(r.ks)] + [repr(r.mgf[w]) for w in ws]
            for r in st.rows]
    _emit(conf, "study", payload, rows, ["N", "count", "mean", "var", "ks"] + [f"mgf@{w!r}" for w in ws])
    return EXIT_OK


def cmd_verify(conf, args) -> int:
    from .acceptance import report, run_acceptance
    results = run_acceptance(quick=args.quick, only=args.only, threads=conf["threads"],
                             echo=lambda s: print(s, file=sys.stderr))
    rep = _clean(report(results))
    rep["quick"] = bool(args.quick)
    if args.json_path:
        Path(args.json_path).write_text(json.dumps(rep, sort_keys=True, indent=2) + "\n")
    rows = [[r.number, r.title, "pass" if r.passed else "fail"] for r in results]
    _emit(conf, "verify", rep, rows, ["criterion", "title", "result"])
    return EXIT_OK if all(r.passed for r in results) else EXIT_ACCEPT


COMMANDS = {"enumerate": cmd_enumerate, "constants": cmd_constants, "dimension": cmd_dimension,
            "traces": cmd_traces, "study": cmd_study, "verify": cmd_verify}


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        conf = resolve(args)
        return COMMANDS[args.command](conf, args)
    except UsageError as exc:
        print(f"rqilab: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        print(f"rqilab: computation error: {exc!r}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
