"""The stochastic language ``p_r`` attached to a pseudo-stochastic series ``r``.

At each surviving prefix ``w`` the masses ``max(r(w), 0)`` (stop) and
``max(r(wx Sigma*), 0)`` (continue with ``x``) are normalised by their sum;
``p_r(w)`` is the running product of the chosen branch fractions times the
stop fraction. Prefixes whose continuation mass is not positive are pruned.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Tuple

import numpy as np

from . import numkit
from .automata import (
    WeightedAutomaton,
    Word,
    is_pseudo_stochastic,
    reduced_form,
    tail_sums,
)
from .exceptions import (
    DegenerateNormalizer,
    NotPseudoStochastic,
    ResourceLimitExceeded,
    Undecided,
)

MAX_SAMPLE_LENGTH = 1_000_000
MAX_ENUMERATION = 10_000_000


@dataclass(frozen=True)
class PrunedStep:
    prefix: Word
    stop_mass: float
    branch_masses: Tuple[float, ...]
    normalizer: float
    cumulative: float


class _PrModel:
    # Per-automaton tables for the p_r recursion: a forward start vector,
    # transition matrices, and ``table[:, 0] = final``,
    # ``table[:, 1 + x] = M_x s`` so that ``e @ table`` yields the raw stop
    # and branch masses in one product.
    __slots__ = ("init", "matrices", "table", "n_symbols")

    def __init__(self, a: WeightedAutomaton):
        self.init = a.init
        self.matrices = a.matrices
        s = tail_sums(a)
        self.table = np.column_stack([a.final] + [m @ s for m in a.matrices]) \
            if a.n_states else np.zeros((0, len(a.alphabet) + 1))
        self.n_symbols = len(a.alphabet)

    def masses(self, e):
        raw = e @ self.table
        return np.maximum(raw, 0.0)


def _model(a: WeightedAutomaton) -> _PrModel:
    model = a._cache.get("pr_model")
    if model is not None:
        return model
    cert = is_pseudo_stochastic(a)
    if not cert.verdict:
        raise NotPseudoStochastic(
            f"automaton does not compute a pseudo-stochastic language "
            f"(spectral radius {cert.spectral_radius_value:.6g}, total {cert.series_total!r})")
    # The recursion needs rho < 1 on the representation it runs on; a
    # non-reduced input may violate that while its reduced form cannot.
    try:
        direct = numkit.is_spectral_radius_lt_one(a.sigma_matrix)
    except Undecided:
        direct = False
    model = _PrModel(a if direct else reduced_form(a))
    a._cache["pr_model"] = model
    return model


def pr_steps(a: WeightedAutomaton, u) -> List[PrunedStep]:
    """Trace of the pruned recursion along ``u``, one step per prefix visited.

    The list stops early when the next symbol of ``u`` is pruned.
    """
    u = a.as_word(u)
    model = _model(a)
    e = model.init
    lam = 1.0
    steps = []
    for pos in range(len(u) + 1):
        masses = model.masses(e)
        sigma = float(masses.sum())
        if sigma <= 0.0:
            raise DegenerateNormalizer(f"all masses vanish at prefix {u[:pos]}")
        steps.append(PrunedStep(u[:pos], float(masses[0]), tuple(float(m) for m in masses[1:]),
                                sigma, lam))
        if pos == len(u):
            break
        x = u[pos]
        branch = masses[1 + x]
        if branch <= 0.0:
            break
        lam *= float(branch) / sigma
        e = e @ model.matrices[x]
    return steps


def pr_evaluate(a: WeightedAutomaton, u) -> Tuple[float, float]:
    """Return ``(p_r(u), p_r(u Sigma*))``."""
    u = a.as_word(u)
    steps = pr_steps(a, u)
    last = steps[-1]
    if last.prefix != u:
        return 0.0, 0.0
    return float(last.cumulative * last.stop_mass / last.normalizer), float(last.cumulative)


def pr_value(a: WeightedAutomaton, u) -> float:
    return pr_evaluate(a, u)[0]


def _draw(model: _PrModel, rng: np.random.Generator) -> Word:
    e = model.init
    word = []
    while True:
        masses = model.masses(e)
        sigma = masses.sum()
        if sigma <= 0.0:
            raise DegenerateNormalizer(f"all masses vanish at prefix {tuple(word)}")
        cum = np.cumsum(masses)
        choice = int(np.searchsorted(cum, rng.random() * sigma, side="right"))
        # guard against the draw landing on a zero-mass tail through rounding
        while choice > 0 and masses[min(choice, len(masses) - 1)] <= 0.0:
            choice -= 1
        choice = min(choice, len(masses) - 1)
        if choice == 0:
            return tuple(word)
        if len(word) >= MAX_SAMPLE_LENGTH:
            raise RuntimeError(f"sampled word exceeded {MAX_SAMPLE_LENGTH} symbols")
        x = choice - 1
        word.append(x)
        e = e @ model.matrices[x]


def pr_sample(a: WeightedAutomaton, seed) -> Word:
    """Draw one word from ``p_r``; deterministic given ``seed``."""
    return _draw(_model(a), np.random.default_rng(seed))


def pr_sample_many(a: WeightedAutomaton, seeds) -> List[Word]:
    model = _model(a)
    return [_draw(model, np.random.default_rng(s)) for s in seeds]


# ---------------------------------------------------------------------------
# Level-wise enumeration of all short words
# ---------------------------------------------------------------------------

def enumeration_size(n_symbols: int, max_len: int) -> int:
    return sum(n_symbols ** k for k in range(max_len + 1))


def check_enumeration(n_symbols: int, max_len: int):
    size = enumeration_size(n_symbols, max_len)
    if size > MAX_ENUMERATION:
        raise ResourceLimitExceeded(
            f"enumerating {size} words exceeds the limit of {MAX_ENUMERATION}")


def series_levels(a: WeightedAutomaton, max_len: int) -> Iterator[np.ndarray]:
    """Yield ``r(w)`` for every word of length 0..max_len, one array per length.

    Within a length, words are in lexicographic order of symbol indices.
    """
    check_enumeration(len(a.alphabet), max_len)
    n = a.n_states
    e = a.init.reshape(1, n)
    mats = a.matrices
    for depth in range(max_len + 1):
        yield e @ a.final
        if depth < max_len:
            e = np.einsum("wi,xij->wxj", e, mats).reshape(-1, n)


def pr_levels(a: WeightedAutomaton, max_len: int) -> Iterator[np.ndarray]:
    """Like :func:`series_levels` but yielding ``p_r(w)``."""
    check_enumeration(len(a.alphabet), max_len)
    model = _model(a)
    n = model.init.shape[0]
    e = model.init.reshape(1, n)
    lam = np.ones(1)
    for depth in range(max_len + 1):
        masses = model.masses(e)
        sigma = masses.sum(axis=1)
        alive = lam > 0.0
        if np.any(alive & (sigma <= 0.0)):
            raise DegenerateNormalizer(f"all masses vanish at some prefix of length {depth}")
        safe = np.where(alive, sigma, 1.0)
        frac = masses / safe[:, None]
        frac[~alive] = 0.0
        yield lam * frac[:, 0]
        if depth < max_len:
            lam = (lam[:, None] * frac[:, 1:]).reshape(-1)
            e = np.einsum("wi,xij->wxj", e, model.matrices).reshape(-1, n)


def nr_mass(a: WeightedAutomaton, max_len: int) -> Tuple[float, float, float]:
    """Truncated mass diagnostics over all words of length at most ``max_len``.

    Returns ``(negative mass, sum |r - p_r|, sum (r - p_r))`` where the
    negative mass is the total ``|r(u)|`` over words with ``r(u) <= 0``.
    """
    _model(a)
    neg = 0.0
    dist = 0.0
    gap = 0.0
    for r, p in zip(series_levels(a, max_len), pr_levels(a, max_len)):
        neg += float(np.abs(r[r <= 0.0]).sum())
        dist += float(np.abs(r - p).sum())
        gap += float((r - p).sum())
    return neg, dist, gap


# ---------------------------------------------------------------------------
# Batched evaluation on arbitrary word lists
# ---------------------------------------------------------------------------

def _extend(memo, w, step):
    # longest memoised prefix of w, then extend one symbol at a time
    k = len(w)
    while w[:k] not in memo:
        k -= 1
    cur = memo[w[:k]]
    for j in range(k, len(w)):
        cur = step(cur, w[j])
        memo[w[:j + 1]] = cur
    return cur


def series_values(a: WeightedAutomaton, words) -> np.ndarray:
    """``r(w)`` for each word, sharing forward vectors between common prefixes."""
    words = [a.as_word(w) for w in words]
    mats = a.matrices
    memo = {(): a.init}
    out = np.empty(len(words))
    for i, w in enumerate(words):
        out[i] = _extend(memo, w, lambda e, x: e @ mats[x]) @ a.final
    return out


def pr_values(a: WeightedAutomaton, words) -> np.ndarray:
    """``p_r(w)`` for each word, sharing the recursion between common prefixes."""
    words = [a.as_word(w) for w in words]
    model = _model(a)

    def node(e, lam):
        # (forward vector, normalised masses, running lambda) at one prefix
        if lam <= 0.0:
            return e, None, 0.0
        masses = model.masses(e)
        sigma = float(masses.sum())
        if sigma <= 0.0:
            raise DegenerateNormalizer("all masses vanish at a surviving prefix")
        return e, masses / sigma, lam

    def step(cur, x):
        e, frac, lam = cur
        if lam <= 0.0:
            return cur
        return node(e @ model.matrices[x], lam * float(frac[1 + x]))

    memo = {(): node(model.init, 1.0)}
    out = np.empty(len(words))
    for i, w in enumerate(words):
        _e, frac, lam = _extend(memo, w, step)
        out[i] = lam * frac[0] if lam > 0.0 else 0.0
    return out
