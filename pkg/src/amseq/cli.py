"""Command-line front end: generate sequences, apply mean-calculus
operators, run verification suites.

Exit codes: 0 pass, 1 check failure, 2 usage error, 3 capability limit
(horizon exceeded / summable input).  Reports are byte-identical across
runs with the same flags when --no-timestamp is given.  The harmonic
cache honours AMSEQ_CACHE_DIR.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import sys
from dataclasses import dataclass

from .numerics import (
    NEG_INF,
    AmseqError,
    HorizonExceeded,
    Q,
    SummableError,
)
from . import seqcore
from .seqcore import (
    ConcavitySeq,
    RatioSeq,
    Seq,
    StepView,
    am_pow,
    ampliation,
    concavity_ratio,
    ratio_of_regularity,
    seq_from_json,
    seq_to_json,
)
from .regularity import (
    NotConcavitySequence,
    NotRatioSequence,
    hat,
    invert_am,
    mean_view,
    seq_from_concavity,
    seq_from_ratio,
)
from .stepseq import StepSeq
from .counterexamples import build_example6, build_omega_half
from . import verify

EXIT_PASS = 0
EXIT_CHECK_FAILURE = 1
EXIT_USAGE = 2
EXIT_CAPABILITY = 3

GEN_FAMILIES = ("omega-p", "log-power", "step", "from-ratio",
                "from-concavity", "example6", "omega-half")
TRANSFORM_OPS = ("am", "am2", "am-pow", "ampliation", "ratio", "concavity",
                 "hat", "invert-am")


@dataclass
class Config:
    numeric_mode: str = "log"
    horizon: int = 10 ** 4
    tolerance: float = verify.DEFAULT_TOLERANCE
    output: str | None = None
    format: str = "json"
    seed: int = 0
    timestamp: bool = True

    def __post_init__(self):
        if self.numeric_mode not in ("rational", "log"):
            raise ValueError("mode must be rational or log")
        if self.horizon < 10:
            raise ValueError("horizon must be >= 10")
        if not 0.0 < self.tolerance <= 1e-3:
            raise ValueError("tolerance must be in (0, 1e-3]")
        if self.format not in ("json", "csv"):
            raise ValueError("format must be json or csv")


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _timestamp(cfg: Config) -> str | None:
    if not cfg.timestamp:
        return None
    return datetime.datetime.now(tz=datetime.timezone.utc).isoformat()


def _load_values_file(path: str) -> list:
    """A ratio/concavity table: JSON array of numbers or 'p/q' strings."""
    with open(path) as fh:
        raw = json.load(fh)
    out = []
    for v in raw:
        if isinstance(v, str) and "/" in v:
            num, _, den = v.partition("/")
            out.append(Q(int(num), int(den)))
        else:
            out.append(Q(v) if isinstance(v, str) else v)
    return out


# ----------------------------------------------------------------------------
# gen
# ----------------------------------------------------------------------------

def cmd_gen(args, cfg: Config) -> int:
    family = args.family
    if family == "omega-p":
        if args.p is None or args.p <= 0:
            print("gen omega-p needs --p > 0", file=sys.stderr)
            return EXIT_USAGE
        doc = seq_to_json(seqcore.PowerSeq(args.p, cfg.horizon))
    elif family == "log-power":
        doc = seq_to_json(seqcore.LogPowerSeq(args.p or 1.0, args.q or 0.0, cfg.horizon))
    elif family == "step":
        if not args.file:
            print("gen step needs --file with {breakpoints, levels_log}", file=sys.stderr)
            return EXIT_USAGE
        with open(args.file) as fh:
            doc = seq_to_json(StepView(StepSeq.from_json(json.load(fh)),
                                       dense_horizon=cfg.horizon))
    elif family in ("from-ratio", "from-concavity"):
        if not args.file:
            print(f"gen {family} needs --file", file=sys.stderr)
            return EXIT_USAGE
        values = _load_values_file(args.file)
        exact = cfg.numeric_mode == "rational"
        horizon = min(cfg.horizon, len(values))
        try:
            if family == "from-ratio":
                seq = seq_from_ratio(RatioSeq.from_table(values), horizon, exact=exact)
            else:
                seq = seq_from_concavity(ConcavitySeq.from_table(values), horizon,
                                         exact=exact)
        except (NotRatioSequence, NotConcavitySequence) as exc:
            print(f"inadmissible input: {exc}", file=sys.stderr)
            return EXIT_USAGE
        doc = {"kind": seq.kind, "params": {"source": family,
                                            "log_values": [seq.log_value(n) for n in range(1, horizon + 1)]},
               "horizon": horizon, "warnings": list(seq.warnings)}
    elif family == "example6":
        doc = build_example6(args.stages or 8).to_json()
    elif family == "omega-half":
        doc = build_omega_half(args.stages or 4).to_json()
    else:  # pragma: no cover - argparse restricts choices
        return EXIT_USAGE
    _emit(json.dumps(doc, indent=2, sort_keys=True), cfg.output)
    return EXIT_PASS


# ----------------------------------------------------------------------------
# transform
# ----------------------------------------------------------------------------

def _dump_rows(s: Seq, upto: int) -> list[tuple[int, float, float | None]]:
    rows = []
    for n in range(1, upto + 1):
        lv = s.log_value(n)
        lin = math.exp(lv) if lv > -700.0 else (0.0 if lv == NEG_INF else None)
        rows.append((n, lv, lin))
    return rows


def _rows_to_text(rows, cfg: Config, header: str) -> str:
    ts = _timestamp(cfg)
    if cfg.format == "csv":
        lines = []
        if ts:
            lines.append(f"# generated {ts}")
        lines.append(header)
        for n, lv, lin in rows:
            lines.append(f"{n},{lv!r},{'' if lin is None else repr(lin)}")
        return "\n".join(lines) + "\n"
    doc = {"columns": header.split(","), "rows": [[n, lv, lin] for n, lv, lin in rows]}
    if ts:
        doc["timestamp"] = ts
    return json.dumps(doc, indent=2, sort_keys=True)


def cmd_transform(args, cfg: Config) -> int:
    with open(args.input) as fh:
        base = seq_from_json(json.load(fh))
    op = args.op
    try:
        if op in ("am", "am2", "am-pow", "ampliation", "invert-am"):
            if op == "am":
                out = mean_view(base)
            elif op == "am2":
                out = am_pow(base, 2)
            elif op == "am-pow":
                out = am_pow(base, args.p_int or 1)
            elif op == "ampliation":
                out = ampliation(base, args.m or 2)
            else:
                out = invert_am(base, horizon=min(cfg.horizon, base.dense_horizon))
            if args.dump:
                rows = _dump_rows(out, min(cfg.horizon, args.dump))
                _emit(_rows_to_text(rows, cfg, "n,log_value,value"), cfg.output)
            else:
                _emit(json.dumps(seq_to_json(out), indent=2, sort_keys=True)
                      if out.kind in ("mean", "ampliation")
                      else json.dumps({"kind": out.kind, "horizon": out.dense_horizon},
                                      indent=2, sort_keys=True),
                      cfg.output)
            return EXIT_PASS
        if op in ("ratio", "concavity"):
            view = (ratio_of_regularity if op == "ratio" else concavity_ratio)(base)
            upto = min(cfg.horizon, base.dense_horizon, args.dump or cfg.horizon)
            rows = [(n, math.log(view.value(n)), view.value(n)) for n in range(1, upto + 1)]
            _emit(_rows_to_text(rows, cfg, f"n,log_{op},{op}"), cfg.output)
            return EXIT_PASS
        if op == "hat":
            h = hat(base)
            upto = min(cfg.horizon, args.dump or 10 ** 3)
            rows = _dump_rows(h, upto)
            _emit(_rows_to_text(rows, cfg, "n,log_value,value"), cfg.output)
            return EXIT_PASS
    except SummableError as exc:
        print(f"capability: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except HorizonExceeded as exc:
        print(f"capability: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    return EXIT_USAGE  # pragma: no cover - argparse restricts choices


# ----------------------------------------------------------------------------
# check
# ----------------------------------------------------------------------------

def cmd_check(args, cfg: Config) -> int:
    try:
        reports = verify.run_suite(
            args.suite,
            subjects=args.subject or None,
            horizon=cfg.horizon,
            exact=cfg.numeric_mode == "rational",
            tol=cfg.tolerance,
            seed=cfg.seed,
            stages=args.stages,
        )
    except KeyError as exc:
        print(f"usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SummableError, HorizonExceeded) as exc:
        print(f"capability: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    ts = _timestamp(cfg)
    config_doc = {
        "suite": args.suite,
        "subjects": args.subject or [],
        "numeric_mode": cfg.numeric_mode,
        "horizon": cfg.horizon,
        "tolerance": cfg.tolerance,
        "seed": cfg.seed,
        "stages": args.stages,
    }
    if cfg.format == "csv":
        text = verify.reports_to_csv(reports, timestamp=ts)
    else:
        text = verify.reports_to_json(reports, config=config_doc, timestamp=ts)
    _emit(text, cfg.output)
    for r in reports:
        print(f"[{r.status:>6s}] {r.check_id} / {r.subject}"
              + (f" ({r.note})" if r.note else ""), file=sys.stderr)
    failures = sum(1 for r in reports if r.status == "fail")
    return EXIT_CHECK_FAILURE if failures else EXIT_PASS


# ----------------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    # common flags are accepted before or after the subcommand; the
    # SUPPRESS defaults keep a subcommand parse from clobbering values
    # given at the top level
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--mode", choices=("rational", "log"))
    common.add_argument("--horizon", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--out", dest="out")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--no-timestamp", action="store_true")
    common.add_argument("--seed", type=int)

    ap = argparse.ArgumentParser(prog="amseq", description=__doc__, parents=[common])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a sequence or construction",
                       parents=[common])
    g.add_argument("family", choices=GEN_FAMILIES)
    g.add_argument("--p", type=float, default=None)
    g.add_argument("--q", type=float, default=None)
    g.add_argument("--stages", type=int, default=None)
    g.add_argument("--file", default=None)

    t = sub.add_parser("transform", help="apply a mean-calculus operator",
                       parents=[common])
    t.add_argument("op", choices=TRANSFORM_OPS)
    t.add_argument("--in", dest="input", required=True)
    t.add_argument("--p-int", type=int, default=None, help="order for am-pow")
    t.add_argument("--m", type=int, default=None, help="ampliation factor")
    t.add_argument("--dump", type=int, default=None,
                   help="dense dump up to this index")

    c = sub.add_parser("check", help="run a verification suite", parents=[common])
    c.add_argument("suite")
    c.add_argument("--subject", action="append", default=None)
    c.add_argument("--stages", type=int, default=None)
    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:  # argparse uses its own exit code
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        # common flags default to SUPPRESS so either side of the
        # subcommand may set them; resolve the fallbacks here
        cfg = Config(
            numeric_mode=getattr(args, "mode", "log"),
            horizon=getattr(args, "horizon", 10 ** 4),
            tolerance=getattr(args, "tol", verify.DEFAULT_TOLERANCE),
            output=getattr(args, "out", None),
            format=getattr(args, "format", "json"),
            seed=getattr(args, "seed", 0),
            timestamp=not getattr(args, "no_timestamp", False),
        )
    except ValueError as exc:
        print(f"usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "gen":
            return cmd_gen(args, cfg)
        if args.command == "transform":
            return cmd_transform(args, cfg)
        if args.command == "check":
            return cmd_check(args, cfg)
    except FileNotFoundError as exc:
        print(f"usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AmseqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILURE
    return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
