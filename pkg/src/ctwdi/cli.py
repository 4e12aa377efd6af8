"""Command-line interface: ``ctwdi <subcommand> ...``.

Every run writes a ``#``-prefixed header echoing the full run specification,
followed by CSV (or ``key=value`` lines for ``oracle``). Exit status is 0 on
success, 1 on a data error and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import io
import logging
import sys
from dataclasses import dataclass, field
from typing import Sequence

from . import __version__, analysis, oracle
from .estimators import CausalPair, EstimatorMethod, estimate_all, reverse_pair
from .ingest import (IngestError, align_series, load_csv_series, pair_to_csv, read_symbols_csv,
                     write_symbols_csv)
from .core import quantize_returns
from .sources import CoupledBsc, IidPair, IsiDelay, MarkovBsc, SourceConfig, generate

REFERENCE = "reference setup"
ARTIFACT = "artifact default"


class UsageError(Exception):
    pass


@dataclass
class RunSpec:
    subcommand: str
    params: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunSpec":
        params = {k: v for k, v in vars(args).items() if k not in ("func", "command", "verbose")}
        spec = cls(args.command, params)
        spec.validate()
        return spec

    def validate(self) -> None:
        p = self.params
        for key in ("p", "eps", "alpha", "beta", "q"):
            if p.get(key) is not None and not 0.0 <= p[key] <= 1.0:
                raise UsageError(f"--{key} must lie in [0, 1]")
        if p.get("depth") is not None and p["depth"] < 0:
            raise UsageError("--depth must be nonnegative")
        if p.get("n") is not None and p["n"] < 1:
            raise UsageError("--n must be positive")
        if p.get("seeds") is not None and p["seeds"] < 1:
            raise UsageError("--seeds must be positive")
        if p.get("threshold") is not None and p["threshold"] <= 0:
            raise UsageError("--threshold must be positive")

    def header(self) -> str:
        lines = [f"# ctwdi {__version__} {self.subcommand}"]
        for key in sorted(self.params):
            val = self.params[key]
            if val is None:
                continue
            if isinstance(val, (list, tuple)):
                val = ",".join(_fmt(v) for v in val)
            else:
                val = _fmt(val)
            lines.append(f"# {key}={val}")
        return "\n".join(lines) + "\n"


def _fmt(value) -> str:
    if isinstance(value, EstimatorMethod):
        return f"I{int(value)}"
    return str(value)


def _opt(parser, *flags, default=None, source=ARTIFACT, help="", **kw):
    """Add an option whose help states its default and where it comes from."""
    suffix = f" [default: {default}; {source}]" if default is not None else ""
    parser.add_argument(*flags, default=default, help=help + suffix, **kw)


def _method(value: str) -> EstimatorMethod:
    try:
        return EstimatorMethod.parse(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _method_list(value: str) -> list[EstimatorMethod]:
    if value.strip().lower() == "all":
        return list(EstimatorMethod)
    return [_method(v) for v in value.split(",")]


def _int_list(value: str) -> list[int]:
    try:
        return [int(float(v)) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {value!r}") from None


# --- source flags ----------------------------------------------------------

SOURCES = ("markov-bsc", "isi", "coupled-bsc", "iid", "files")


def _source_flags(parser, include_files: bool = True, delay_default: int = 2) -> None:
    g = parser.add_argument_group("synthetic source")
    _opt(g, "--p", type=float, default=0.3, source="reference setup for markov-bsc, artifact default for isi",
         help="flip probability of the Markov input chain")
    _opt(g, "--eps", type=float, default=None,
         help="channel crossover; markov-bsc 0.2 [reference setup], isi 0.1 [artifact default]")
    _opt(g, "--delay", type=int, default=delay_default, source=REFERENCE, help="ISI channel delay D'")
    _opt(g, "--alpha", type=float, default=0.1, source=REFERENCE, help="coupled BSC forward crossover")
    _opt(g, "--beta", type=float, default=0.2, source=REFERENCE, help="coupled BSC backward crossover")
    _opt(g, "--q", type=float, default=0.5, help="i.i.d. Bernoulli parameter")
    g.add_argument("--copy", action="store_true", help="i.i.d. source: Y is a copy of X")
    _opt(g, "--n", type=int, default=100000, help="sequence length")
    _opt(g, "--seed", type=int, default=0, help="RNG seed")
    if include_files:
        f = parser.add_argument_group("input files (source 'files')")
        _file_flags(f)


def _file_flags(g) -> None:
    g.add_argument("--x", help="path of the candidate cause X")
    g.add_argument("--y", help="path of the candidate effect Y")
    _opt(g, "--format", choices=("symbols", "prices"), default="symbols",
         help="symbols: one integer per line; prices: date,value rows quantized to returns")
    _opt(g, "--threshold", type=float, default=0.008, source=REFERENCE,
         help="return quantization threshold for --format prices")
    _opt(g, "--offset", type=int, default=0,
         help="pair X's return on day i with Y's return on day i-offset (prices)")
    g.add_argument("--log-returns", action="store_true",
                   help="quantize log returns instead of simple relative change")


def _config(args, source: str) -> SourceConfig:
    if source == "markov-bsc":
        variant = MarkovBsc(args.p, 0.2 if args.eps is None else args.eps)
    elif source == "isi":
        variant = IsiDelay(args.p, args.delay, 0.1 if args.eps is None else args.eps)
    elif source == "coupled-bsc":
        variant = CoupledBsc(args.alpha, args.beta)
    elif source == "iid":
        variant = IidPair(args.q, args.copy)
    else:
        raise UsageError(f"unknown source {source!r}")
    return SourceConfig(variant, args.n, args.seed)


def _load_pair(args) -> CausalPair:
    if not args.x or not args.y:
        raise UsageError("source 'files' needs --x and --y")
    if args.format == "prices":
        aligned = align_series(load_csv_series(args.x), load_csv_series(args.y),
                               args.threshold, args.offset, args.log_returns)
        logging.getLogger(__name__).info("dropped dates: x=%d y=%d", aligned.dropped_a, aligned.dropped_b)
        return CausalPair(aligned.x, aligned.y)
    return CausalPair(read_symbols_csv(args.x), read_symbols_csv(args.y))


def _pair(args) -> CausalPair:
    if args.source == "files":
        return _load_pair(args)
    return generate(_config(args, args.source))


# --- subcommands -----------------------------------------------------------

def cmd_estimate(args, out) -> None:
    pair = _load_pair(args)
    fwd = estimate_all(pair, args.depth, args.methods)
    rev = estimate_all(reverse_pair(pair), args.depth, args.methods)
    out.write("method,n,depth,di,reverse_di,mi\n")
    for m in args.methods:
        d, r = fwd[m].final, rev[m].final
        out.write(f"I{int(m)},{len(pair)},{args.depth},{d:.10f},{r:.10f},{d + r:.10f}\n")
    if args.trace:
        with open(args.trace, "w", encoding="utf-8", newline="") as fh:
            fh.write(fwd[args.methods[0]].to_csv(args.trace_every))


def cmd_simulate(args, out) -> None:
    pair = generate(_config(args, args.source))
    if args.out_x:
        write_symbols_csv(pair.x, args.out_x)
    if args.out_y:
        write_symbols_csv(pair.y, args.out_y)
    if not (args.out_x or args.out_y):
        out.write(pair_to_csv(pair.x, pair.y))


def cmd_delay_scan(args, out) -> None:
    pair = _pair(args)
    res = analysis.delay_scan(pair, args.d_max, args.method, args.depth, args.delay_threshold)
    out.write(res.to_csv())
    out.write(f"# detected_delay={'none' if res.detected is None else res.detected}\n")


def cmd_causality(args, out) -> None:
    pair = _pair(args)
    rep = analysis.causality_report(pair, args.method, args.depth, args.tau, args.rho)
    out.write(rep.csv_header() + "\n" + rep.csv_row() + "\n")
    out.write(f"# {rep.to_text()}\n")


def cmd_convergence(args, out) -> None:
    config = _config(args, args.source)
    grid = args.grid or _default_grid(args.n)
    if grid[-1] != args.n:
        grid = sorted(set(g for g in grid if g <= args.n) | {args.n})
    seeds = [args.seed + k for k in range(args.seeds)]
    res = analysis.convergence_run(config, args.methods, grid, args.depth, seeds)
    out.write(res.to_csv())


def _default_grid(n: int) -> list[int]:
    grid, g = [], 100
    while g < n:
        grid += [g, 2 * g, 5 * g]
        g *= 10
    return sorted(set(v for v in grid if v < n) | {n})


def cmd_quantize(args, out) -> None:
    a = load_csv_series(args.input)
    if args.pair:
        aligned = align_series(a, load_csv_series(args.pair), args.threshold, args.offset,
                               args.log_returns)
        out.write(f"# dropped_input={aligned.dropped_a} dropped_pair={aligned.dropped_b}\n")
        out.write(pair_to_csv(aligned.x, aligned.y, aligned.dates))
    else:
        out.write(write_symbols_csv(quantize_returns(a.values, args.threshold, args.log_returns),
                                    header="symbol"))


def cmd_oracle(args, out) -> None:
    d = args.digits
    if args.system == "coupled-bsc":
        r = oracle.coupled_bsc_rates(args.alpha, args.beta)
        out.write(f"di={r.di:.{d}f}\nrev={r.reverse_di:.{d}f}\nmi={r.mi:.{d}f}\n")
    elif args.system == "markov-bsc":
        out.write(f"di_y_to_x={oracle.markov_bsc_rate(args.p, args.eps):.{d}f}\n")
    elif args.system == "redundancy":
        out.write(f"bound={oracle.ctw_redundancy_bound(args.gamma, args.states, args.n):.{d}f}\n")
    elif args.system == "binary-entropy":
        out.write(f"h={oracle.binary_entropy(args.p):.{d}f}\n")


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctwdi",
        description="Universal directed information estimation with context-tree weighting.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND")
    sub.required = True

    def common(p, depth=3, depth_source=ARTIFACT, method_list=False):
        _opt(p, "--depth", type=int, default=depth, source=depth_source, help="context tree depth D")
        if method_list:
            _opt(p, "--methods", type=_method_list, default="all",
                 help="estimators: comma list of 1-4 or 'all'")
        else:
            _opt(p, "--method", type=_method, default="2", source=REFERENCE,
                 help="estimator 1, 2, 3 or 4")
        p.add_argument("--out", help="write output here instead of stdout")

    p = sub.add_parser("estimate", help="directed, reverse and mutual information of two files")
    _file_flags(p)
    common(p, method_list=True)
    p.add_argument("--trace", help="write the running X->Y estimate of the first method as CSV")
    _opt(p, "--trace-every", type=int, default=1, help="keep every k-th trace row")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("simulate", help="generate a synthetic (X, Y) pair")
    p.add_argument("source", choices=SOURCES[:-1])
    _source_flags(p, include_files=False)
    p.add_argument("--out-x", help="single-column file for X")
    p.add_argument("--out-y", help="single-column file for Y")
    p.add_argument("--out", help="write the two-column pair here instead of stdout")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("delay-scan", help="shifted directed information for d = 0..d_max")
    p.add_argument("source", choices=SOURCES)
    _source_flags(p)
    common(p, depth=6, depth_source=REFERENCE)
    _opt(p, "--d-max", type=int, default=5, help="largest shift d")
    _opt(p, "--delay-threshold", type=float, default=analysis.DEFAULT_DELAY_THRESHOLD,
         help="detected delay = first d whose estimate exceeds this (bits)")
    p.set_defaults(func=cmd_delay_scan)

    p = sub.add_parser("causality", help="classify the causal influence between X and Y")
    p.add_argument("source", choices=SOURCES)
    _source_flags(p)
    common(p)
    _opt(p, "--tau", type=float, default=analysis.DEFAULT_TAU,
         help="mutual information below this (bits) means independent")
    _opt(p, "--rho", type=float, default=analysis.DEFAULT_RHO,
         help="dominance ratio between directed and reverse directed information")
    p.set_defaults(func=cmd_causality)

    p = sub.add_parser("convergence", help="estimates along n for several seeds, with the analytic value")
    p.add_argument("source", choices=SOURCES[:-1])
    _source_flags(p, include_files=False)
    common(p, depth=3, depth_source=REFERENCE, method_list=True)
    _opt(p, "--seeds", type=int, default=3, source=REFERENCE, help="number of seeds, starting at --seed")
    p.add_argument("--grid", type=_int_list,
                   help="comma list of prefix lengths [default: 1-2-5 steps from 100 up to --n; "
                        f"{ARTIFACT}]")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("quantize", help="ternary quantization of daily returns")
    p.add_argument("--input", required=True, help="date,value CSV")
    p.add_argument("--pair", help="second date,value CSV; output is the aligned x,y pair")
    _opt(p, "--threshold", type=float, default=0.008, source=REFERENCE, help="return threshold")
    _opt(p, "--offset", type=int, default=0, help="pairing offset in days (with --pair)")
    p.add_argument("--log-returns", action="store_true", help="quantize log returns")
    p.add_argument("--out", help="write output here instead of stdout")
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("oracle", help="print analytic reference values")
    p.add_argument("system", choices=("coupled-bsc", "markov-bsc", "redundancy", "binary-entropy"))
    _opt(p, "--p", type=float, default=0.3, source=REFERENCE, help="Markov flip probability / entropy argument")
    _opt(p, "--eps", type=float, default=0.2, source=REFERENCE, help="BSC crossover")
    _opt(p, "--alpha", type=float, default=0.1, source=REFERENCE, help="forward crossover")
    _opt(p, "--beta", type=float, default=0.2, source=REFERENCE, help="backward crossover")
    _opt(p, "--gamma", type=int, default=2, help="alphabet size (redundancy)")
    _opt(p, "--states", type=int, default=1, help="Markov state count (redundancy)")
    _opt(p, "--n", type=int, default=1000, help="sequence length (redundancy)")
    _opt(p, "--digits", type=int, default=4, help="decimal places printed")
    p.add_argument("--out", help="write output here instead of stdout")
    p.set_defaults(func=cmd_oracle)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on usage errors
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        spec = RunSpec.from_args(args)
    except UsageError as exc:
        parser.error(str(exc))
    buf = io.StringIO()
    try:
        buf.write(spec.header())
        args.func(args, buf)
        if getattr(args, "out", None):
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(buf.getvalue())
        else:
            sys.stdout.write(buf.getvalue())
    except UsageError as exc:
        parser.error(str(exc))
    except (IngestError, ValueError, ArithmeticError, OSError) as exc:
        print(f"ctwdi: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
