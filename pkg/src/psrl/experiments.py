"""Experiment grids: (target x algorithm x sample size x trial) -> CSV rows."""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .automata import WeightedAutomaton, validate_pa, words_up_to
from .baselines import DEFAULT_ALPHA, DEFAULT_GAMMA, alergia_infer, build_fpta, mdi_infer
from .dees import DeesConfig, dees_infer
from .evalkit import GENERATOR_NAME, d1_on_support, d1_truncated, empirical, random_pa, sample_from
from .exceptions import PsrlError
from .fixtures import golden_ma, nonrational_pair

log = logging.getLogger(__name__)

CSV_HEADER = ("experiment", "target", "algo", "param", "n", "trial", "states", "d1", "seconds")
DEFAULT_SIZES = (100, 500, 1000, 2000, 5000, 10000)
SUPPORT_DRAWS = 50_000
ALGORITHMS = ("dees", "alergia", "mdi", "empirical")


@dataclass(frozen=True)
class ExperimentRecord:
    experiment: str
    target: str
    algo: str
    param: float
    n: int
    trial: int
    states: int
    d1: float
    seconds: float

    def row(self) -> List[str]:
        return [self.experiment, self.target, self.algo, repr(float(self.param)), str(self.n),
                str(self.trial), str(self.states), repr(float(self.d1)), repr(float(self.seconds))]

    @classmethod
    def from_row(cls, row: Sequence[str]) -> "ExperimentRecord":
        if len(row) != len(CSV_HEADER):
            raise ValueError(f"expected {len(CSV_HEADER)} fields, got {len(row)}")
        e, t, a, p, n, k, s, d, sec = row
        return cls(e, t, a, float(p), int(n), int(k), int(s), float(d), float(sec))


def records_to_csv(records: Sequence[ExperimentRecord]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(r.row())
    return out.getvalue()


def parse_csv(text: str) -> List[ExperimentRecord]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if tuple(header or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    return [ExperimentRecord.from_row(row) for row in reader if row]


@dataclass(frozen=True)
class Target:
    name: str
    automaton: WeightedAutomaton
    # sizes may depend on the target (300 x states for random PAs)
    sizes: Tuple[int, ...]


@dataclass(frozen=True)
class ExperimentSpec:
    """A fully specified grid. ``d1_mode`` is ``"truncated"`` or ``"support"``."""

    name: str
    targets: Tuple[Target, ...]
    algos: Tuple[str, ...]
    trials: int
    d1_mode: str = "truncated"
    max_len: int = 15
    support_draws: int = SUPPORT_DRAWS
    target_pr: bool = False
    params: Dict[str, float] = field(default_factory=dict)


def derive_seed(root: int, *key: int) -> int:
    """Independent 64-bit seed for grid cell ``key`` (SeedSequence spawn key)."""
    ss = np.random.SeedSequence(root, spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def default_params() -> Dict[str, float]:
    return {"dees": 0.0, "alergia": DEFAULT_ALPHA, "mdi": DEFAULT_GAMMA, "empirical": 0.0}


def builtin(name: str, root_seed: int = 0, sizes: Optional[Sequence[int]] = None,
            trials: Optional[int] = None, algos: Optional[Sequence[str]] = None,
            max_states: Optional[int] = None, min_states: int = 2) -> ExperimentSpec:
    """One of ``exp-pa-fig3``, ``exp-nonrational-fig2`` or ``exp-random-pa``."""
    if name == "exp-pa-fig3":
        target = Target("fig3", golden_ma(), tuple(sizes or DEFAULT_SIZES))
        return ExperimentSpec(name, (target,), tuple(algos or ("dees", "alergia", "mdi")),
                              trials or 10, "truncated", 15)
    if name == "exp-nonrational-fig2":
        target = Target("fig2", nonrational_pair(), tuple(sizes or DEFAULT_SIZES))
        return ExperimentSpec(name, (target,), tuple(algos or ("dees", "alergia", "mdi")),
                              trials or 10, "support", target_pr=True)
    if name == "exp-random-pa":
        top = max_states or 25
        targets = []
        for k in range(min_states, top + 1):
            a = random_pa(k, 3, 0.15, seed=derive_seed(root_seed, 2, k))
            targets.append(Target(f"random{k}", a, tuple(sizes or (300 * k,))))
        return ExperimentSpec(name, tuple(targets), tuple(algos or ("dees", "alergia", "empirical")),
                              trials or 5, "support")
    raise ValueError(f"unknown experiment {name!r}")


def custom(target: WeightedAutomaton, name: str = "custom", sizes=None, trials=None,
           algos=None, max_len: int = 15) -> ExperimentSpec:
    """Grid over an arbitrary PA or pseudo-stochastic target."""
    mode = "truncated" if len(target.alphabet) <= 2 else "support"
    pr = not validate_pa(target)
    return ExperimentSpec(name, (Target(name, target, tuple(sizes or DEFAULT_SIZES)),),
                          tuple(algos or ("dees", "alergia", "mdi")), trials or 10, mode,
                          max_len, target_pr=pr)


def _learn(algo: str, sample, param: float):
    if algo == "dees":
        cfg = DeesConfig(epsilon=param or None)
        model, trace = dees_infer(sample, cfg)
        cert = trace.certificate
        return model, model.n_states, bool(cert is not None and cert.verdict)
    if algo == "alergia":
        model = alergia_infer(sample, param)
        return model, model.n_states, False
    if algo == "mdi":
        model = mdi_infer(sample, param)
        return model, model.n_states, False
    if algo == "empirical":
        return empirical(sample), len(build_fpta(sample)), False
    raise ValueError(f"unknown algorithm {algo!r}")


@dataclass(frozen=True)
class _Cell:
    spec: ExperimentSpec
    t_index: int
    n: int
    trial: int
    root_seed: int
    timing: bool


def _support(spec: ExperimentSpec, t_index: int, root_seed: int):
    # drawn once per process and target, memoised on the target itself
    target = spec.targets[t_index].automaton
    seed = derive_seed(root_seed, 1, t_index)
    key = ("support", spec.support_draws, seed)
    got = target._cache.get(key)
    if got is None:
        got = target._cache[key] = sample_from(target, spec.support_draws, seed)
    return got


def _run_cell(cell: _Cell) -> List[ExperimentRecord]:
    spec = cell.spec
    target = spec.targets[cell.t_index]
    sample = sample_from(target.automaton, cell.n,
                         derive_seed(cell.root_seed, 0, cell.t_index, cell.n, cell.trial))
    support = _support(spec, cell.t_index, cell.root_seed) if spec.d1_mode == "support" else None
    params = {**default_params(), **spec.params}
    out = []
    for algo in spec.algos:
        param = params[algo]
        start = time.perf_counter()
        try:
            model, states, pr = _learn(algo, sample, param)
        except PsrlError as exc:
            # recorded as an empty model: D1 is then the target's own mass
            log.warning("%s on %s n=%d trial=%d failed: %s", algo, target.name, cell.n, cell.trial, exc)
            model, states, pr = {}, 0, False
        elapsed = time.perf_counter() - start if cell.timing else 0.0
        if spec.d1_mode == "truncated":
            if isinstance(model, WeightedAutomaton):
                d1 = d1_truncated(target.automaton, model, spec.max_len, (spec.target_pr, pr))
            else:
                d1 = _truncated_vs_table(target.automaton, model, spec.max_len, spec.target_pr)
        else:
            d1 = d1_on_support(target.automaton, model, support, (spec.target_pr, pr))
        out.append(ExperimentRecord(spec.name, target.name, algo, float(param), cell.n,
                                    cell.trial, states, d1, elapsed))
    return out


def _truncated_vs_table(target, table, max_len, target_pr):
    words = list(words_up_to(len(target.alphabet), max_len))
    return d1_on_support(target, table, words, (target_pr, False))


def cells(spec: ExperimentSpec, root_seed: int, timing: bool = True) -> List[_Cell]:
    return [_Cell(spec, t, n, k, root_seed, timing)
            for t, target in enumerate(spec.targets)
            for n in target.sizes
            for k in range(spec.trials)]


def run(spec: ExperimentSpec, root_seed: int = 0, jobs: int = 1, timing: bool = True,
        progress: Optional[Callable[[int, int], None]] = None) -> List[ExperimentRecord]:
    """Run every cell; rows come back in grid order whatever ``jobs`` is."""
    grid = cells(spec, root_seed, timing)
    results: List[List[ExperimentRecord]] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for i, rows in enumerate(pool.map(_run_cell, grid)):
                results.append(rows)
                if progress:
                    progress(i + 1, len(grid))
    else:
        for i, c in enumerate(grid):
            results.append(_run_cell(c))
            if progress:
                progress(i + 1, len(grid))
    return [r for rows in results for r in rows]


def metadata(spec: ExperimentSpec, root_seed: int, timing: bool) -> dict:
    from . import __version__
    return {
        "experiment": spec.name,
        "root_seed": root_seed,
        "generator": GENERATOR_NAME,
        "seed_derivation": "SeedSequence(root_seed, spawn_key=(0, target, n, trial)) for samples; "
                           "(1, target) for the D1 support; (2, states) for random targets",
        "targets": [{"name": t.name, "states": t.automaton.n_states, "sizes": list(t.sizes)}
                    for t in spec.targets],
        "algos": list(spec.algos),
        "params": {**default_params(), **spec.params},
        "trials": spec.trials,
        "d1_mode": spec.d1_mode,
        "max_len": spec.max_len if spec.d1_mode == "truncated" else None,
        "support_draws": spec.support_draws if spec.d1_mode == "support" else None,
        "target_uses_pr": spec.target_pr,
        "timing": timing,
        "version": __version__,
    }


def write_meta(path, meta: dict):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
