"""Command-line interface: ``psrl ma|infer|experiment ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .automata import evaluate, evaluate_prefix, is_pseudo_stochastic, reduce, series_sum
from .baselines import DEFAULT_ALPHA, DEFAULT_GAMMA, alergia_infer, mdi_infer
from .dees import DeesConfig, dees_infer, format_trace
from .evalkit import sample_from
from .exceptions import PsrlError
from .experiments import builtin, custom, metadata, records_to_csv, run, write_meta
from .formats import format_ma, format_sample, read_ma, read_sample
from .psl import nr_mass, pr_evaluate

BUILTINS = ("exp-pa-fig3", "exp-random-pa", "exp-nonrational-fig2")


def _num(x: float) -> str:
    return f"{x:.12g}"


def _emit(text: str, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_ma(args) -> int:
    a = read_ma(args.file)
    if args.action == "check":
        cert = is_pseudo_stochastic(a)
        print(f"verdict {str(cert.verdict).lower()}")
        print(f"radius {_num(cert.spectral_radius_value)}")
        print(f"sum {_num(cert.series_total)}")
        print(f"dim {cert.reduced_dimension}")
    elif args.action in ("eval", "prefix"):
        if args.word is None:
            raise ValueError(f"'ma {args.action}' needs a word")
        word = a.alphabet.parse_word(args.word)
        if args.pr:
            value = pr_evaluate(a, word)[0 if args.action == "eval" else 1]
        elif args.action == "eval":
            value = evaluate(a, word)
        else:
            value = evaluate_prefix(a, word)
        print(_num(value))
    elif args.action == "sum":
        print(_num(series_sum(a)))
    elif args.action == "reduce":
        _emit(format_ma(reduce(a)), args.out)
    elif args.action == "sample":
        _emit(format_sample(sample_from(a, args.n, args.seed)), args.out)
    elif args.action == "nr":
        neg, d1, gap = nr_mass(a, args.max_len)
        print(f"negative {_num(neg)}")
        print(f"d1 {_num(d1)}")
        print(f"gap {_num(gap)}")
    return 0


def cmd_infer(args) -> int:
    sample = read_sample(args.sample)
    if len(sample) == 0:
        raise ValueError("the sample is empty")
    if args.algo == "dees":
        model, trace = dees_infer(sample, DeesConfig(epsilon=args.param))
        if args.trace:
            Path(args.trace).write_text(format_trace(trace, sample.alphabet), encoding="utf-8")
    elif args.algo == "alergia":
        model = alergia_infer(sample, DEFAULT_ALPHA if args.param is None else args.param)
    else:
        model = mdi_infer(sample, DEFAULT_GAMMA if args.param is None else args.param)
    _emit(format_ma(model), args.out)
    return 0


def _int_list(text: str):
    return tuple(int(t) for t in text.split(",") if t)


def cmd_experiment(args) -> int:
    sizes = _int_list(args.sizes) if args.sizes else None
    algos = tuple(args.algos.split(",")) if args.algos else None
    if args.spec in BUILTINS:
        spec = builtin(args.spec, args.seed, sizes=sizes, trials=args.trials, algos=algos,
                       max_states=args.max_states)
    elif Path(args.spec).is_file():
        spec = custom(read_ma(args.spec), Path(args.spec).stem, sizes, args.trials, algos,
                      args.max_len or 15)
    else:
        raise ValueError(f"unknown experiment {args.spec!r} (expected one of "
                         f"{', '.join(BUILTINS)} or an automaton file)")
    params = {}
    if args.alpha is not None:
        params["alergia"] = args.alpha
    if args.gamma is not None:
        params["mdi"] = args.gamma
    if args.epsilon is not None:
        params["dees"] = args.epsilon
    updates = dict(params=params)
    if args.max_len is not None:
        updates["max_len"] = args.max_len
    spec = replace(spec, **updates)
    timing = not args.no_timing

    def progress(done, total):
        if args.verbose:
            print(f"{done}/{total}", file=sys.stderr)

    records = run(spec, args.seed, jobs=args.jobs, timing=timing, progress=progress)
    _emit(records_to_csv(records), args.out)
    if args.out:
        write_meta(str(args.out) + ".meta.json", metadata(spec, args.seed, timing))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="psrl", description=__doc__)
    parser.add_argument("--version", action="version", version=f"psrl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    ma = sub.add_parser("ma", help="automaton utilities")
    ma.add_argument("action", choices=("check", "eval", "prefix", "sum", "reduce", "sample", "nr"))
    ma.add_argument("file")
    ma.add_argument("word", nargs="?", help="word for eval/prefix; '' or ε is the empty word")
    ma.add_argument("--pr", action="store_true", help="use the pruned distribution p_r")
    ma.add_argument("--n", type=int, default=1000, help="words to draw (sample)")
    ma.add_argument("--seed", type=int, default=0)
    ma.add_argument("--max-len", type=int, default=12, help="truncation length (nr)")
    ma.add_argument("--out")
    ma.set_defaults(func=cmd_ma)

    inf = sub.add_parser("infer", help="learn an automaton from a sample file")
    inf.add_argument("algo", choices=("dees", "alergia", "mdi"))
    inf.add_argument("sample")
    inf.add_argument("--param", type=float,
                     help="dees: epsilon; alergia: alpha; mdi: gamma")
    inf.add_argument("--trace", help="write the DEES decision trace here")
    inf.add_argument("--out")
    inf.set_defaults(func=cmd_infer)

    exp = sub.add_parser("experiment", help="run an experiment grid to CSV")
    exp_sub = exp.add_subparsers(dest="exp_command", required=True)
    er = exp_sub.add_parser("run")
    er.add_argument("spec", help=f"{', '.join(BUILTINS)} or a target automaton file")
    er.add_argument("--out")
    er.add_argument("--seed", type=int, default=0)
    er.add_argument("--trials", type=int)
    er.add_argument("--sizes", help="comma-separated sample sizes")
    er.add_argument("--algos", help="comma-separated subset of dees,alergia,mdi,empirical")
    er.add_argument("--max-states", type=int, help="largest random target (exp-random-pa)")
    er.add_argument("--max-len", type=int, help="truncation length for D1")
    er.add_argument("--alpha", type=float)
    er.add_argument("--gamma", type=float)
    er.add_argument("--epsilon", type=float)
    er.add_argument("--jobs", type=int, default=1)
    er.add_argument("--no-timing", action="store_true",
                    help="write 0 seconds so that output is byte-reproducible")
    er.add_argument("--verbose", action="store_true")
    er.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="psrl: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PsrlError, ValueError, OSError) as exc:
        print(f"psrl: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
