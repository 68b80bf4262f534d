"""Command-line harness.

    babyserver simulate --alg ldc --d 2 --seq "BABABC" --trace
    babyserver worst --alg bal --d 5/2 --multiset A:7,B:10,C:3 --method cruel
    babyserver measure maxmax --alg greedy --d 2 --n 6
    babyserver sweep maxmax --alg ldc --alg-b greedy --d-list 3/2,2,5/2 --n-blocks 1

Exit codes: 0 ok, 2 usage or parse error, 3 budget exceeded.

Every JSON or CSV result embeds the tool version, the budgets and a
normalized config.  ``babyserver --config FILE`` replays a config (or a
previous JSON result) and reproduces the same bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import __version__
from .algorithms import ALGORITHM_NAMES, AlgorithmSpec, run, spec_from_name
from .core import (
    ProblemParams,
    RequestMultiset,
    SequenceSyntaxError,
    SequenceTooLong,
    format_rational,
    format_sequence,
    parse_rational,
    parse_sequence,
)
from .enumeration import BudgetExceeded, EnumerationBudget
from .measures import (
    EXPECTATION_OF_RATIO,
    RATIO_OF_EXPECTATIONS,
    adversary_family,
    average_compare,
    bijective_compare,
    canonical_worst_family,
    empirical_competitive,
    maxmax,
    random_order_ratio,
    rwo_relatedness,
    sequence_family,
)
from .worst_order import cruel_adversary_sequence, predicted_canonical_cost, worst_cost

EXIT_OK, EXIT_USAGE, EXIT_BUDGET = 0, 2, 3

CSV_FIELDS = ["measure", "alg_a", "alg_b", "d", "a", "n", "p", "value", "verdict", "exact", "seed", "samples"]
MEASURES = ("competitive", "maxmax", "random-order", "bijective", "average", "rwo")

# options that never change a result and stay out of the embedded config
_PRESENTATION = {"output", "config", "format", "jobs", "decimal"}


class UsageError(ValueError):
    pass


def _fmt(x):
    if x is None:
        return None
    if isinstance(x, Fraction):
        return format_rational(x)
    return x


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _alg_arg(text: str) -> str:
    name = text.split("@")[0].strip().lower()
    if name not in ALGORITHM_NAMES:
        raise argparse.ArgumentTypeError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHM_NAMES)}")
    return text


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (TypeError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _rational_list(text: str) -> list[Fraction]:
    return [_rational_arg(t) for t in text.split(",") if t.strip()]


def _pair_list(text: str) -> list[tuple[Fraction, Fraction]]:
    out = []
    for item in filter(None, (t.strip() for t in text.split(","))):
        if item.count(":") != 1:
            raise argparse.ArgumentTypeError(f"bad pair {item!r}; expected a:b")
        a, b = item.split(":")
        out.append((_rational_arg(a), _rational_arg(b)))
    return out


def _common(p: argparse.ArgumentParser, need_d: bool = True) -> None:
    if need_d:
        p.add_argument("--d", type=_rational_arg, required=True, help="B-C distance, p/q with d > 1")
    p.add_argument("--max-seqs", type=int, default=EnumerationBudget.max_sequences)
    p.add_argument("--max-perms", type=int, default=EnumerationBudget.max_permutations)
    p.add_argument("--seed", type=int, default=0, help="RNG seed (BSL_SEED overrides)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes; results do not depend on it")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--output", help="write to this file instead of stdout")
    p.add_argument("--decimal", action="store_true", help="add a decimal rendering of each value")


def _measure_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alg", type=_alg_arg, help="algorithm; speed variants take --a or name@a")
    p.add_argument("--a", type=_rational_arg, help="speed for a-dc / a-ldc")
    p.add_argument("--alg-a", type=_alg_arg)
    p.add_argument("--alg-b", type=_alg_arg)
    p.add_argument("--n", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--n-blocks", type=int, help="maxmax: use n = blocks * (2*floor(d) + 2)")
    p.add_argument("--seq", help="request sequence, e.g. (BA)^4")
    p.add_argument("--mode", choices=(RATIO_OF_EXPECTATIONS, EXPECTATION_OF_RATIO), default=RATIO_OF_EXPECTATIONS)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--family", default="canonical",
                   help="rwo families, comma separated: canonical (each algorithm's canonical worst "
                        "orderings), adversary-a, adversary-b, or a pattern such as BABABC")
    p.add_argument("--p-min", type=int, default=1)
    p.add_argument("--p-max", type=int)
    p.add_argument("--slack", type=_rational_arg, help="rwo additive slack, default 3d")
    p.add_argument("--method", choices=("auto", "brute", "cruel"), default="auto")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="babyserver", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="replay a JSON config or a previous JSON result")
    sub = parser.add_subparsers(dest="command")

    sim = sub.add_parser("simulate", help="run one algorithm on one sequence")
    sim.add_argument("--alg", type=_alg_arg, required=True)
    sim.add_argument("--a", type=_rational_arg)
    sim.add_argument("--seq", required=True)
    sim.add_argument("--trace", action="store_true")
    _common(sim)

    worst = sub.add_parser("worst", help="worst ordering of a request multiset")
    worst.add_argument("--alg", type=_alg_arg, required=True)
    worst.add_argument("--a", type=_rational_arg)
    worst.add_argument("--multiset", required=True, help="e.g. A:4,B:6,C:2")
    worst.add_argument("--method", choices=("auto", "brute", "cruel"), default="auto")
    _common(worst)

    meas = sub.add_parser("measure", help="evaluate a quality measure")
    meas.add_argument("measure", choices=MEASURES)
    _measure_flags(meas)
    _common(meas)

    sweep = sub.add_parser("sweep", help="a measure over a grid of d (and speed pairs)")
    sweep.add_argument("measure", choices=MEASURES)
    sweep.add_argument("--d-list", type=_rational_list, required=True)
    sweep.add_argument("--ab-list", type=_pair_list,
                       help="speed pairs a:b applied to --alg-a and --alg-b")
    _measure_flags(sweep)
    _common(sweep, need_d=False)
    return parser


# ---------------------------------------------------------------------------
# Config normalization and replay
# ---------------------------------------------------------------------------

def _normalize(value):
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, (list, tuple)):
        return [_normalize(v) for v in value]
    return value


def config_of(args: argparse.Namespace) -> dict:
    options = {
        k: _normalize(v)
        for k, v in sorted(vars(args).items())
        if k not in _PRESENTATION and k not in ("command", "measure") and v is not None and v is not False
    }
    cfg = {"command": args.command}
    if getattr(args, "measure", None):
        cfg["measure"] = args.measure
    cfg["options"] = options
    return cfg


def argv_from_config(cfg: dict) -> list[str]:
    if "config" in cfg and "command" not in cfg:
        cfg = cfg["config"]  # a previous result file
    argv = [cfg["command"]]
    if cfg.get("measure"):
        argv.append(cfg["measure"])
    for key, value in cfg.get("options", {}).items():
        flag = "--" + key.replace("_", "-")
        if value is True:
            argv.append(flag)
        elif isinstance(value, list):
            if key == "ab_list":
                value = [f"{a}:{b}" for a, b in value]
            argv += [flag, ",".join(str(v) for v in value)]
        else:
            argv += [flag, str(value)]
    return argv


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _budget(args) -> EnumerationBudget:
    return EnumerationBudget(args.max_seqs, args.max_perms, args.seed)


def _spec(name: str | None, a: Fraction | None, what: str) -> AlgorithmSpec:
    if name is None:
        raise UsageError(f"{what} is required")
    if "@" in name:
        name, inline = name.split("@", 1)
        if a is not None:
            raise UsageError("give the speed either as name@a or with --a, not both")
        a = parse_rational(inline)
    return spec_from_name(name, a)


def _record(measure, d, *, alg_a=None, alg_b=None, a=None, n=None, p=None, value=None,
            verdict=None, exact=True, seed=None, samples=None, **extra) -> dict:
    rec = {
        "measure": measure,
        "alg_a": alg_a.label() if alg_a else None,
        "alg_b": alg_b.label() if alg_b else None,
        "d": format_rational(d),
        "a": _fmt(a),
        "n": n,
        "p": p,
        "value": _fmt(value),
        "verdict": verdict,
        "exact": exact,
        "seed": seed,
        "samples": samples,
    }
    rec.update({k: _fmt(v) for k, v in extra.items()})
    return rec


def cmd_simulate(args) -> list[dict]:
    params = ProblemParams(args.d)
    spec = _spec(args.alg, args.a, "--alg")
    spec.validate(params)
    seq = parse_sequence(args.seq)
    report = run(spec, params, seq)
    extra = {}
    if args.trace:
        extra["trace"] = [
            {"request": m.request.value, "server": m.server, "distance": format_rational(m.distance)}
            for m in report.trace
        ]
    return [_record("simulate", params.d, alg_a=spec, a=spec.speed, n=len(seq), value=report.total, **extra)]


def cmd_worst(args) -> list[dict]:
    params = ProblemParams(args.d)
    spec = _spec(args.alg, args.a, "--alg")
    spec.validate(params)
    m = RequestMultiset.parse(args.multiset)
    budget = _budget(args)
    res = worst_cost(spec, params, m, budget, args.method)
    extra = {"multiset": str(m), "witness": format_sequence(res.witness), "method": res.method}
    p = None
    if res.method == "cruel_adversary":
        p = cruel_adversary_sequence(spec, params, m).p
        if spec.name in ("ldc", "a-ldc"):
            p_pred, lo, hi = predicted_canonical_cost(m, params.d, spec.speed)
            extra.update(predicted_p=p_pred, lower_bound=lo, upper_bound=hi)
    return [_record("worst", params.d, alg_a=spec, a=spec.speed, n=m.n, p=p, value=res.cost, **extra)]


def _measure_records(measure: str, args, d: Fraction, speeds=None) -> list[dict]:
    """Records for one measure at one grid point."""
    params = ProblemParams(d)
    budget = _budget(args)
    alg_a_name = args.alg_a or args.alg
    a_speed = args.a
    b_speed = None
    if speeds is not None:
        a_speed, b_speed = speeds

    if measure in ("competitive", "maxmax", "random-order"):
        spec = _spec(alg_a_name, a_speed, "--alg")
        spec.validate(params)
        if measure == "competitive":
            if args.n_max is None:
                raise UsageError("competitive needs --n-max")
            res = empirical_competitive(spec, params, args.n_max, budget, jobs=args.jobs)
            return [_record(measure, d, alg_a=spec, alg_b=None, a=spec.speed, n=args.n_max,
                            value=res.ratio, witness=format_sequence(res.witness))]
        if measure == "maxmax":
            n = args.n
            if args.n_blocks is not None:
                n = args.n_blocks * (2 * math.floor(d) + 2)
            if n is None:
                raise UsageError("maxmax needs --n or --n-blocks")
            res = maxmax(spec, params, n, budget)
            extra = {"ratio_vs_opt": res.ratio_vs_opt, "max_cost": res.max_cost, "opt_max_cost": res.opt_max_cost}
            value, other = res.M_value, None
            if args.alg_b:
                other = _spec(args.alg_b, b_speed, "--alg-b")
                other.validate(params)
                res_b = maxmax(other, params, n, budget)
                extra.update(M_a=res.M_value, M_b=res_b.M_value, bound=2 * d / (d + 1))
                value = res.M_value / res_b.M_value
            return [_record(measure, d, alg_a=spec, alg_b=other, a=spec.speed, n=n, value=value, **extra)]
        if args.seq is None:
            raise UsageError("random-order needs --seq")
        res = random_order_ratio(spec, params, parse_sequence(args.seq), args.mode, budget,
                                 samples=args.samples, seed=args.seed)
        return [_record(measure, d, alg_a=spec, a=spec.speed, n=len(parse_sequence(args.seq)),
                        value=res.value, exact=res.exact, seed=res.seed, samples=res.samples,
                        mode=res.mode, expected_alg=res.expected_alg, expected_opt=res.expected_opt,
                        arrangements=res.arrangements)]

    spec_a = _spec(alg_a_name, a_speed, "--alg-a")
    spec_b = _spec(args.alg_b, b_speed, "--alg-b")
    spec_a.validate(params)
    spec_b.validate(params)
    if measure in ("bijective", "average"):
        if args.n is None:
            raise UsageError(f"{measure} needs --n")
        if measure == "bijective":
            res = bijective_compare(spec_a, spec_b, params, args.n, budget)
            return [_record(measure, d, alg_a=spec_a, alg_b=spec_b, n=args.n, verdict=res.verdict,
                            strict=res.strict)]
        res = average_compare(spec_a, spec_b, params, args.n, budget)
        return [_record(measure, d, alg_a=spec_a, alg_b=spec_b, n=args.n, value=res.sum_a / res.sum_b,
                        verdict=res.verdict, sum_a=res.sum_a, sum_b=res.sum_b)]

    # rwo
    if args.p_max is None:
        raise UsageError("rwo needs --p-max")
    p_values = range(args.p_min, args.p_max + 1)
    families, seen = [], set()
    for token in filter(None, (t.strip() for t in args.family.split(","))):
        if token == "canonical":
            new = [canonical_worst_family(s, params, p_values) for s in (spec_a, spec_b)]
        elif token in ("adversary-a", "adversary-b"):
            new = [adversary_family(spec_a if token == "adversary-a" else spec_b, params, p_values)]
        else:
            parse_sequence(token)
            new = [sequence_family(token, p_values)]
        for fam in new:
            if fam.name not in seen:
                seen.add(fam.name)
                families.append(fam)
    if not families:
        raise UsageError("--family is empty")
    est = rwo_relatedness(spec_a, spec_b, params, families, args.slack, budget, args.method)
    out = [
        _record("rwo", d, alg_a=spec_a, alg_b=spec_b, n=pt.multiset.n, p=pt.p, value=pt.ratio_ab,
                exact=pt.method_a == pt.method_b == "brute_force", family=pt.family,
                multiset=str(pt.multiset), worst_a=pt.worst_a, worst_b=pt.worst_b, ratio_ba=pt.ratio_ba)
        for pt in est.series
    ]
    out.append(_record("rwo_summary", d, alg_a=spec_a, alg_b=spec_b, value=est.tail_ab, verdict=est.verdict,
                       exact=False, family=",".join(f.name for f in families), c_u_ab=est.c_u_ab, c_u_ba=est.c_u_ba,
                       tail_ab=est.tail_ab, tail_ba=est.tail_ba, slack=est.slack))
    return out


def cmd_measure(args) -> list[dict]:
    return _measure_records(args.measure, args, args.d)


def _sweep_point(job):
    measure, args, d, speeds = job
    return _measure_records(measure, args, d, speeds)


def cmd_sweep(args) -> list[dict]:
    if not args.d_list:
        raise UsageError("--d-list is empty")
    pairs = args.ab_list or [None]
    jobs = [(args.measure, args, d, sp) for d in args.d_list for sp in pairs]
    if args.jobs > 1 and len(jobs) > 1:
        inner = argparse.Namespace(**{**vars(args), "jobs": 1})
        jobs = [(m, inner, d, sp) for m, _, d, sp in jobs]
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            parts = list(pool.map(_sweep_point, jobs))
    else:
        parts = [_sweep_point(j) for j in jobs]
    return [rec for part in parts for rec in part]


COMMANDS = {"simulate": cmd_simulate, "worst": cmd_worst, "measure": cmd_measure, "sweep": cmd_sweep}


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _decimal(value) -> str | None:
    if value is None:
        return None
    return f"{float(Fraction(value)):.10g}"


def render(records: list[dict], args, cfg: dict) -> str:
    meta = {
        "tool": "babyserver",
        "version": __version__,
        "budgets": {"max_seqs": args.max_seqs, "max_perms": args.max_perms, "seed": args.seed},
        "config": cfg,
    }
    if args.decimal:
        for rec in records:
            rec["value_decimal"] = _decimal(rec["value"])
    if args.format == "json":
        return json.dumps({**meta, "records": records}, indent=2) + "\n"
    if args.format == "csv":
        buf = io.StringIO()
        buf.write("# " + json.dumps(meta, separators=(",", ":")) + "\n")
        fields = CSV_FIELDS + (["value_decimal"] if args.decimal else [])
        writer = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for rec in records:
            writer.writerow({k: "" if rec.get(k) is None else rec[k] for k in fields})
        return buf.getvalue()
    lines = []
    for rec in records:
        trace = rec.get("trace")
        parts = [f"{k}={v}" for k, v in rec.items() if v is not None and k != "trace"]
        lines.append(" ".join(parts))
        for i, mv in enumerate(trace or (), 1):
            lines.append(f"  {i:>4} {mv['request']} {mv['server'] or '-':<5} {mv['distance']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if known.config:
        try:
            with open(known.config, encoding="utf-8") as fh:
                argv = argv_from_config(json.load(fh)) + _presentation_flags(rest)
        except (OSError, ValueError, KeyError) as exc:
            print(f"error: cannot read config {known.config}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    env_seed = os.environ.get("BSL_SEED")
    if env_seed is not None:
        try:
            args.seed = int(env_seed)
        except ValueError:
            print(f"error: BSL_SEED must be an integer, got {env_seed!r}", file=sys.stderr)
            return EXIT_USAGE

    try:
        records = COMMANDS[args.command](args)
    except (BudgetExceeded, SequenceTooLong) as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, SequenceSyntaxError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    text = render(records, args, config_of(args))
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _presentation_flags(argv: list[str]) -> list[str]:
    """Keep only --format/--output/--jobs/--decimal from a replay command line."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--format", "--output", "--jobs") and i + 1 < len(argv):
            out += [tok, argv[i + 1]]
            i += 2
            continue
        if tok == "--decimal":
            out.append(tok)
        i += 1
    return out


if __name__ == "__main__":
    sys.exit(main())
