"""DEES: inference of a prefix-closed multiplicity automaton from a sample.

States are sample prefixes. Frontier words are examined in length-lex
order; a word becomes a new state unless its empirical residual is, within
``epsilon`` on every factor, an affine combination of the residuals of the
states already built. In that case the combination coefficients become
transition weights.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .automata import PslCertificate, WeightedAutomaton, Word, is_pseudo_stochastic
from .evalkit import EmpiricalDistribution, Sample, empirical
from .exceptions import NoConvergence, PsrlError, StateCapExceeded, ZeroPrefixMass
from .numkit import ConstraintSystem, lp_feasible, lp_minimax


@dataclass(frozen=True)
class DeesConfig:
    """``epsilon=None`` means the sample-size rule ``|S| ** (-1/3)``."""

    epsilon: Optional[float] = None
    max_states: int = 200

    def __post_init__(self):
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_states < 1:
            raise ValueError("max_states must be at least 1")

    def resolve(self, sample_size: int) -> float:
        if self.epsilon is not None:
            return float(self.epsilon)
        return float(sample_size) ** (-1.0 / 3.0)


@dataclass(frozen=True)
class DeesDecision:
    word: Word
    basis: Tuple[Word, ...]
    n_rows: int
    new_state: bool
    coefficients: Optional[Tuple[float, ...]] = None


@dataclass
class DeesTrace:
    epsilon: float
    decisions: List[DeesDecision] = field(default_factory=list)
    certificate: Optional[PslCertificate] = None


def build_constraint_system(q: Sequence[Word], v: Word, dist: EmpiricalDistribution,
                            epsilon: float, return_rows: bool = False):
    """The inequality system testing whether ``v``'s residual is a combination of ``q``'s.

    One variable per word of ``q`` (length-lex order), one row
    ``|v^-1 P_S(w S*) - sum_u X_u u^-1 P_S(w S*)| <= epsilon`` per factor
    ``w`` of the sample (ε included), and the equality ``sum_u X_u = 1``.
    """
    q = sorted((tuple(u) for u in q), key=lambda w: (len(w), w))
    v = tuple(v)
    for u in q + [v]:
        if dist.prefix_count(u) == 0:
            raise ZeroPrefixMass(f"prefix {u} has no mass in the sample")
    rows = dist.factors()
    coef = np.array([[dist.residual(u, w) for u in q] for w in rows]).reshape(len(rows), len(q))
    target = np.array([dist.residual(v, w) for w in rows])
    system = ConstraintSystem(
        len(q), coef, target, np.full(len(rows), float(epsilon)),
        np.ones((1, len(q))), [1.0],
    )
    return (system, rows) if return_rows else system


class _Residuals:
    # Sparse empirical residuals u^-1 P_S(. S*) indexed by suffix ids, built
    # once per prefix. Only suffixes w with uw a sample prefix appear, so the
    # rows dropped from the full system are exactly the all-zero ones.

    def __init__(self, dist: EmpiricalDistribution):
        self.dist = dist
        self.ids: Dict[Word, int] = {}
        self.cache: Dict[Word, Tuple[np.ndarray, np.ndarray]] = {}

    def vector(self, u: Word):
        got = self.cache.get(u)
        if got is None:
            base = self.dist.prefix_count(u)
            if base == 0:
                raise ZeroPrefixMass(f"prefix {u} has no mass in the sample")
            ids, vals = [], []
            for w, c in self.dist.subtree(u):
                idx = self.ids.get(w)
                if idx is None:
                    idx = self.ids[w] = len(self.ids)
                ids.append(idx)
                vals.append(c / base)
            ids = np.array(ids, dtype=np.int64)
            order = np.argsort(ids)
            got = (ids[order], np.array(vals)[order])
            self.cache[u] = got
        return got

    def system(self, q: Sequence[Word], v: Word, epsilon: float) -> ConstraintSystem:
        vecs = [self.vector(u) for u in q]
        tv = self.vector(v)
        rows = np.unique(np.concatenate([tv[0]] + [ids for ids, _ in vecs]))
        coef = np.zeros((rows.size, len(q)))
        for j, (ids, vals) in enumerate(vecs):
            coef[np.searchsorted(rows, ids), j] = vals
        target = np.zeros(rows.size)
        target[np.searchsorted(rows, tv[0])] = tv[1]
        return ConstraintSystem(
            len(q), coef, target, np.full(rows.size, float(epsilon)),
            np.ones((1, len(q))), [1.0],
        )


def _coefficients(system: ConstraintSystem, fallback: np.ndarray) -> np.ndarray:
    # The phase-1 witness is an arbitrary vertex and often sits on the edge
    # of the epsilon band; the minimax point is centred in it.
    try:
        best = lp_minimax(system, start=fallback)
    except NoConvergence:
        return fallback
    if best.witness is not None and system.is_satisfied(best.witness, 1e-9):
        return best.witness
    return fallback


def _state_name(alphabet, word: Word) -> str:
    return alphabet.format_word(word, empty="ε")


def dees_infer(sample: Sample, config: DeesConfig = DeesConfig()):
    """Run DEES on ``sample``; return ``(automaton, trace)``.

    The automaton's states are named after their words (``"ε"`` for the
    empty word) and listed in the order they were created.
    """
    if len(sample) == 0:
        raise ValueError("DEES needs a nonempty sample")
    dist = empirical(sample)
    alphabet = sample.alphabet
    k = len(alphabet)
    eps = config.resolve(len(sample))
    res = _Residuals(dist)
    trace = DeesTrace(eps)

    states: List[Word] = [()]
    index = {(): 0}
    final = [dist.prob(())]
    trans: Dict[Tuple[int, int, int], float] = {}

    frontier = [(1, (x,)) for x in range(k) if dist.prefix_count((x,)) > 0]
    heapq.heapify(frontier)
    while frontier:
        _, v = heapq.heappop(frontier)
        u, x = v[:-1], v[-1]
        step = dist.prefix_count(v) / dist.prefix_count(u)
        basis = sorted(states, key=lambda w: (len(w), w))
        system = res.system(basis, v, eps)
        result = lp_feasible(system)
        if not result.feasible:
            if len(states) >= config.max_states:
                raise StateCapExceeded(f"more than {config.max_states} states needed")
            index[v] = len(states)
            states.append(v)
            final.append(dist.count(v) / dist.prefix_count(v))
            trans[(index[u], x, index[v])] = step
            for y in range(k):
                if dist.prefix_count(v + (y,)) > 0:
                    heapq.heappush(frontier, (len(v) + 1, v + (y,)))
            trace.decisions.append(DeesDecision(v, tuple(basis), system.n_abs, True))
        else:
            alpha = tuple(float(c) for c in _coefficients(system, result.witness))
            for w, c in zip(basis, alpha):
                if c != 0.0:
                    trans[(index[u], x, index[w])] = c * step
            trace.decisions.append(DeesDecision(v, tuple(basis), system.n_abs, False, alpha))

    init = np.zeros(len(states))
    init[0] = 1.0
    automaton = WeightedAutomaton(
        alphabet, [_state_name(alphabet, w) for w in states], init, final, trans)
    try:
        trace.certificate = is_pseudo_stochastic(automaton)
    except PsrlError:
        trace.certificate = None
    return automaton, trace


def recheck_trace(sample: Sample, trace: DeesTrace, tol: float = 1e-9) -> bool:
    """Re-solve nothing: rebuild each combination's system and check its witness."""
    res = _Residuals(empirical(sample))
    for d in trace.decisions:
        if d.new_state:
            continue
        system = res.system(list(d.basis), d.word, trace.epsilon)
        if not system.is_satisfied(np.array(d.coefficients), tol):
            return False
    return True


def format_trace(trace: DeesTrace, alphabet) -> str:
    """Line-oriented text rendering of a trace."""
    lines = ["dees-trace v1", f"epsilon {trace.epsilon!r}"]
    for d in trace.decisions:
        word = _state_name(alphabet, d.word)
        basis = ",".join(_state_name(alphabet, w) for w in d.basis)
        if d.new_state:
            lines.append(f"state {word} vars={len(d.basis)} rows={d.n_rows} basis={basis}")
        else:
            coefs = ",".join(repr(c) for c in d.coefficients)
            lines.append(f"combine {word} vars={len(d.basis)} rows={d.n_rows} basis={basis} alpha={coefs}")
    cert = trace.certificate
    if cert is None:
        lines.append("psl undecided")
    else:
        lines.append(f"psl verdict={str(cert.verdict).lower()} radius={cert.spectral_radius_value!r} "
                     f"sum={cert.series_total!r} dim={cert.reduced_dimension}")
    return "\n".join(lines) + "\n"
