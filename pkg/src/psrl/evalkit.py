"""Samples, empirical distributions, word generation and D1 distances."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np

from .automata import Alphabet, WeightedAutomaton, Word, is_pseudo_stochastic, validate_pa
from .exceptions import NotPseudoStochastic
from .psl import pr_levels, pr_sample_many, pr_values, series_levels, series_values

GENERATOR_NAME = "numpy.random.PCG64 seeded through numpy.random.SeedSequence"


@dataclass(frozen=True)
class Sample:
    """A multiset of words over an alphabet, stored with repetitions."""

    alphabet: Alphabet
    words: Tuple[Word, ...]

    def __post_init__(self):
        alphabet = self.alphabet
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(tuple(alphabet))
            object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "words", tuple(alphabet.check_word(w) for w in self.words))

    @classmethod
    def from_symbols(cls, alphabet, words: Iterable[Sequence[str]]) -> "Sample":
        """Build from words given as sequences of symbol names."""
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(tuple(alphabet))
        return cls(alphabet, tuple(alphabet.encode(w) for w in words))

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    def distinct(self) -> List[Word]:
        """Distinct words in first-occurrence order."""
        return list(dict.fromkeys(self.words))


class EmpiricalDistribution:
    """Word and prefix counts of a sample.

    ``prob(u)`` is ``P_S(u)`` and ``prefix_prob(u)`` is ``P_S(u Sigma*)``.
    """

    def __init__(self, sample: Sample):
        if len(sample) == 0:
            raise ValueError("empirical distribution of an empty sample")
        self.alphabet = sample.alphabet
        self.total = len(sample)
        self.word_counts: Dict[Word, int] = dict(Counter(sample.words))
        prefix_counts: Dict[Word, int] = {}
        for w, c in self.word_counts.items():
            for i in range(len(w) + 1):
                p = w[:i]
                prefix_counts[p] = prefix_counts.get(p, 0) + c
        self.prefix_counts = prefix_counts
        children: Dict[Word, List[Word]] = {}
        for p in sorted(prefix_counts, key=lambda w: (len(w), w)):
            if p:
                children.setdefault(p[:-1], []).append(p)
        self._children = children

    def count(self, u: Word) -> int:
        return self.word_counts.get(tuple(u), 0)

    def prefix_count(self, u: Word) -> int:
        return self.prefix_counts.get(tuple(u), 0)

    def prob(self, u: Word) -> float:
        return self.count(u) / self.total

    def prefix_prob(self, u: Word) -> float:
        return self.prefix_count(u) / self.total

    def residual(self, u: Word, w: Word) -> float:
        """``u^{-1} P_S(w Sigma*) = P_S(uw Sigma*) / P_S(u Sigma*)``."""
        base = self.prefix_count(u)
        if base == 0:
            raise ZeroDivisionError(f"prefix {u} has no mass in the sample")
        return self.prefix_count(tuple(u) + tuple(w)) / base

    def children(self, u: Word) -> List[Word]:
        return self._children.get(tuple(u), [])

    def subtree(self, u: Word):
        """Yield ``(w, prefix_count(uw))`` for every ``w`` with ``uw`` a sample prefix."""
        u = tuple(u)
        if u not in self.prefix_counts:
            return
        stack = [u]
        n = len(u)
        while stack:
            p = stack.pop()
            yield p[n:], self.prefix_counts[p]
            stack.extend(reversed(self.children(p)))

    def prefixes(self) -> List[Word]:
        return sorted(self.prefix_counts, key=lambda w: (len(w), w))

    def factors(self) -> List[Word]:
        """All factors of the sample words (including ε), length-lex sorted."""
        out = {()}
        for w in self.word_counts:
            n = len(w)
            for i in range(n):
                for j in range(i + 1, n + 1):
                    out.add(w[i:j])
        return sorted(out, key=lambda w: (len(w), w))


def empirical(sample: Sample) -> EmpiricalDistribution:
    return EmpiricalDistribution(sample)


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------

def _pa_tables(a: WeightedAutomaton):
    # per state: cumulative probabilities over [stop, (x, j), ...]
    outcomes = [[None] for _ in range(a.n_states)]
    probs = [[float(a.final[i])] for i in range(a.n_states)]
    for (i, x, j), w in sorted(a.transitions.items()):
        outcomes[i].append((x, j))
        probs[i].append(w)
    cums = [np.cumsum(p) for p in probs]
    return outcomes, cums


def _pa_walk(a: WeightedAutomaton, n: int, rng: np.random.Generator) -> List[Word]:
    outcomes, cums = _pa_tables(a)
    init_cum = np.cumsum(a.init)
    words = []
    for _ in range(n):
        q = min(int(np.searchsorted(init_cum, rng.random() * init_cum[-1], side="right")),
                a.n_states - 1)
        word = []
        while True:
            cum = cums[q]
            k = min(int(np.searchsorted(cum, rng.random() * cum[-1], side="right")), len(cum) - 1)
            if outcomes[q][k] is None:
                break
            x, q = outcomes[q][k]
            word.append(x)
        words.append(tuple(word))
    return words


def draw_seeds(seed, n: int) -> np.ndarray:
    """``n`` per-draw seeds derived deterministically from ``seed``."""
    return np.random.SeedSequence(seed).generate_state(n, dtype=np.uint64) if n else np.zeros(0, np.uint64)


def sample_from(a: WeightedAutomaton, n: int, seed) -> Sample:
    """Draw ``n`` i.i.d. words.

    Probabilistic automata are walked directly (stop with the stop weight,
    otherwise follow a transition with its weight). Any other
    pseudo-stochastic automaton is sampled from its pruned distribution.
    """
    if n == 0:
        return Sample(a.alphabet, ())
    if validate_pa(a):
        words = _pa_walk(a, n, np.random.default_rng(seed))
    elif is_pseudo_stochastic(a).verdict:
        words = pr_sample_many(a, [int(s) for s in draw_seeds(seed, n)])
    else:
        raise NotPseudoStochastic("can only sample from a PA or a pseudo-stochastic automaton")
    return Sample(a.alphabet, tuple(words))


def random_pa(n_states: int, alphabet: Union[Alphabet, int, Sequence[str]], density: float = 0.15,
              seed=None) -> WeightedAutomaton:
    """Random probabilistic automaton with every state reachable.

    Draw order (all from one PCG64 stream): for each state ``i >= 1`` a
    parent ``< i`` and a symbol for its tree edge; then one uniform per
    remaining ``(src, symbol, dst)`` triple in lexicographic order, kept if
    below ``density``; then per state a uniform for the stop weight (floored
    at 0.01) and one per outgoing transition, normalised to sum to one.
    """
    if n_states < 1:
        raise ValueError("n_states must be at least 1")
    if isinstance(alphabet, int):
        alphabet = Alphabet(tuple("abcdefghijklmnopqrstuvwxyz"[:alphabet]))
    elif not isinstance(alphabet, Alphabet):
        alphabet = Alphabet(tuple(alphabet))
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    k = len(alphabet)
    edges = set()
    for i in range(1, n_states):
        parent = int(rng.integers(0, i))
        sym = int(rng.integers(0, k))
        edges.add((parent, sym, i))
    for i in range(n_states):
        for x in range(k):
            for j in range(n_states):
                if (i, x, j) in edges:
                    continue
                if rng.random() < density:
                    edges.add((i, x, j))
    by_state = {i: sorted(e for e in edges if e[0] == i) for i in range(n_states)}
    final = np.zeros(n_states)
    trans = {}
    for i in range(n_states):
        stop = max(rng.random(), 0.01)
        raw = rng.random(len(by_state[i]))
        total = stop + raw.sum()
        final[i] = stop / total
        for e, w in zip(by_state[i], raw):
            trans[e] = w / total
    init = np.zeros(n_states)
    init[0] = 1.0
    return WeightedAutomaton(alphabet, [f"s{i}" for i in range(n_states)], init, final, trans)


# ---------------------------------------------------------------------------
# Distances
# ---------------------------------------------------------------------------

Model = Union[WeightedAutomaton, EmpiricalDistribution, Mapping[Word, float]]


def _check_alphabets(a, b):
    if a.alphabet.symbols != b.alphabet.symbols:
        raise ValueError(f"alphabets differ: {a.alphabet.symbols} vs {b.alphabet.symbols}")


def _levels(a: WeightedAutomaton, max_len: int, use_pr: bool):
    return pr_levels(a, max_len) if use_pr else series_levels(a, max_len)


def d1_truncated(a: WeightedAutomaton, b: WeightedAutomaton, max_len: int,
                 use_pr: Tuple[bool, bool] = (False, False)) -> float:
    """``sum |p_a(u) - p_b(u)|`` over every word of length at most ``max_len``.

    Each side contributes its raw series, or its pruned distribution when
    the matching ``use_pr`` flag is set.
    """
    _check_alphabets(a, b)
    total = 0.0
    for va, vb in zip(_levels(a, max_len, use_pr[0]), _levels(b, max_len, use_pr[1])):
        total += float(np.abs(va - vb).sum())
    return total


def model_values(model: Model, words: Sequence[Word], use_pr: bool = False) -> np.ndarray:
    """Probability (or series value) of each word under ``model``."""
    if isinstance(model, WeightedAutomaton):
        return pr_values(model, words) if use_pr else series_values(model, words)
    if isinstance(model, EmpiricalDistribution):
        return np.array([model.prob(w) for w in words], dtype=np.float64)
    return np.array([float(model.get(tuple(w), 0.0)) for w in words], dtype=np.float64)


def d1_on_support(a: Model, b: Model, support, use_pr: Tuple[bool, bool] = (False, False)) -> float:
    """``sum |p_a(u) - p_b(u)|`` over the distinct words of ``support``."""
    words = support.distinct() if isinstance(support, Sample) else list(dict.fromkeys(
        tuple(w) for w in support))
    if not words:
        return 0.0
    va = model_values(a, words, use_pr[0])
    vb = model_values(b, words, use_pr[1])
    return float(np.abs(va - vb).sum())
