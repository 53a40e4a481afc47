"""Multiplicity automata over the reals and the analyses defined on them.

An automaton computes the series ``r(w) = init . M_{w1} ... M_{wn} . final``.
Words are tuples of symbol indices into an :class:`Alphabet`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Tuple, Union

import numpy as np

from . import numkit
from .exceptions import SpectralRadiusNotLtOne

Word = Tuple[int, ...]
EMPTY: Word = ()

REDUCE_TOL = 1e-9
SERIES_TOL = 1e-6
PA_TOL = 1e-9


@dataclass(frozen=True)
class Alphabet:
    symbols: Tuple[str, ...]

    def __post_init__(self):
        syms = tuple(self.symbols)
        if not syms:
            raise ValueError("alphabet must not be empty")
        if len(set(syms)) != len(syms):
            raise ValueError(f"duplicate symbols in alphabet {syms}")
        for s in syms:
            if not isinstance(s, str) or not s or any(c.isspace() for c in s):
                raise ValueError(f"invalid symbol {s!r}")
        object.__setattr__(self, "symbols", syms)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(syms)})

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise ValueError(f"symbol {symbol!r} not in alphabet {self.symbols}") from None

    def encode(self, symbols: Iterable[str]) -> Word:
        return tuple(self.index(s) for s in symbols)

    def decode(self, word: Word) -> Tuple[str, ...]:
        return tuple(self.symbols[i] for i in word)

    @property
    def single_char(self) -> bool:
        return all(len(s) == 1 for s in self.symbols)

    def parse_word(self, text: str) -> Word:
        """Parse user text: whitespace-separated symbols, or a plain string
        of one-character symbols. ``""`` and ``"ε"`` denote the empty word."""
        text = text.strip()
        if text in ("", "ε"):
            return EMPTY
        parts = text.split()
        if len(parts) > 1 or text in self._index:
            return self.encode(parts)
        if self.single_char:
            return self.encode(text)
        return self.encode(text.split("."))

    def format_word(self, word: Word, empty: str = "ε") -> str:
        if not word:
            return empty
        sep = "" if self.single_char else "."
        return sep.join(self.decode(word))

    def check_word(self, word) -> Word:
        word = tuple(int(i) for i in word)
        k = len(self.symbols)
        for i in word:
            if not 0 <= i < k:
                raise ValueError(f"symbol index {i} out of range for alphabet of size {k}")
        return word


def length_lex_key(word: Word):
    return (len(word), word)


def parse_weight(text: str) -> float:
    """Parse a decimal literal or an exact fraction ``p/q``."""
    text = text.strip()
    try:
        if "/" in text:
            return float(Fraction(text))
        value = float(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"invalid weight {text!r}") from None
    if not np.isfinite(value):
        raise ValueError(f"weight must be finite, got {text!r}")
    return value


WeightLike = Union[float, int, str, Fraction]


def _weight(w: WeightLike) -> float:
    return parse_weight(w) if isinstance(w, str) else float(w)


class WeightedAutomaton:
    """An immutable real multiplicity automaton.

    Transition weights are kept sparsely, keyed by ``(src, symbol, dst)``
    index triples; absent triples weigh zero. Dense per-symbol matrices are
    built on demand and cached, together with expensive analyses.
    """

    def __init__(
        self,
        alphabet: Union[Alphabet, Sequence[str]],
        states: Sequence[str],
        init: Sequence[WeightLike],
        final: Sequence[WeightLike],
        transitions: Mapping[Tuple[int, int, int], WeightLike] = MappingProxyType({}),
    ):
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(tuple(alphabet))
        states = tuple(str(s) for s in states)
        if len(set(states)) != len(states):
            raise ValueError("state names must be distinct")
        n = len(states)
        init_v = np.array([_weight(w) for w in init], dtype=np.float64).reshape(-1)
        final_v = np.array([_weight(w) for w in final], dtype=np.float64).reshape(-1)
        if init_v.shape[0] != n or final_v.shape[0] != n:
            raise ValueError("init and final need one weight per state")
        k = len(alphabet)
        trans = {}
        for (src, sym, dst), w in transitions.items():
            src, sym, dst = int(src), int(sym), int(dst)
            if not (0 <= src < n and 0 <= dst < n and 0 <= sym < k):
                raise ValueError(f"transition {(src, sym, dst)} references an unknown state or symbol")
            w = _weight(w)
            if w != 0.0:
                trans[(src, sym, dst)] = w
        if not (np.all(np.isfinite(init_v)) and np.all(np.isfinite(final_v))
                and all(np.isfinite(w) for w in trans.values())):
            raise ValueError("weights must be finite")
        init_v.setflags(write=False)
        final_v.setflags(write=False)
        self._alphabet = alphabet
        self._states = states
        self._init = init_v
        self._final = final_v
        self._trans = MappingProxyType(trans)
        self._cache = {}

    def __reduce__(self):
        # the cache is rebuilt lazily on the other side
        return (type(self), (self._alphabet, self._states, self._init, self._final, dict(self._trans)))

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_named(cls, alphabet, states, init=None, final=None, transitions=()):
        """Build from state names.

        ``init``/``final`` map state name to weight (missing names weigh 0);
        ``transitions`` is an iterable of ``(src, symbol, dst, weight)``.
        """
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(tuple(alphabet))
        states = tuple(states)
        idx = {s: i for i, s in enumerate(states)}
        init = init or {}
        final = final or {}
        for name in list(init) + list(final):
            if name not in idx:
                raise ValueError(f"unknown state {name!r}")
        trans = {}
        for src, sym, dst, w in transitions:
            if src not in idx or dst not in idx:
                raise ValueError(f"unknown state in transition {(src, sym, dst)}")
            key = (idx[src], alphabet.index(sym), idx[dst])
            trans[key] = trans.get(key, 0.0) + _weight(w)
        return cls(
            alphabet,
            states,
            [init.get(s, 0.0) for s in states],
            [final.get(s, 0.0) for s in states],
            trans,
        )

    @classmethod
    def from_dense(cls, alphabet, states, init, final, matrices):
        mats = np.asarray(matrices, dtype=np.float64)
        trans = {}
        for x, i, j in zip(*np.nonzero(mats)):
            trans[(int(i), int(x), int(j))] = float(mats[x, i, j])
        return cls(alphabet, states, init, final, trans)

    # -- accessors -----------------------------------------------------------

    @property
    def alphabet(self) -> Alphabet:
        return self._alphabet

    @property
    def states(self) -> Tuple[str, ...]:
        return self._states

    @property
    def n_states(self) -> int:
        return len(self._states)

    @property
    def init(self) -> np.ndarray:
        return self._init

    @property
    def final(self) -> np.ndarray:
        return self._final

    @property
    def transitions(self) -> Mapping[Tuple[int, int, int], float]:
        return self._trans

    def state_index(self, name: str) -> int:
        try:
            return self._states.index(name)
        except ValueError:
            raise KeyError(name) from None

    def weight(self, src: str, symbol: str, dst: str) -> float:
        key = (self.state_index(src), self._alphabet.index(symbol), self.state_index(dst))
        return self._trans.get(key, 0.0)

    def init_weight(self, name: str) -> float:
        return float(self._init[self.state_index(name)])

    def final_weight(self, name: str) -> float:
        return float(self._final[self.state_index(name)])

    @property
    def matrices(self) -> np.ndarray:
        """Array of shape ``(|alphabet|, n, n)`` holding one matrix per symbol."""
        mats = self._cache.get("matrices")
        if mats is None:
            n = self.n_states
            mats = np.zeros((len(self._alphabet), n, n))
            for (i, x, j), w in self._trans.items():
                mats[x, i, j] = w
            mats.setflags(write=False)
            self._cache["matrices"] = mats
        return mats

    @property
    def sigma_matrix(self) -> np.ndarray:
        """Letter-summed transition matrix ``[phi(q_i, Sigma, q_j)]``."""
        m = self._cache.get("sigma")
        if m is None:
            m = self.matrices.sum(axis=0) if self.n_states else np.zeros((0, 0))
            m.setflags(write=False)
            self._cache["sigma"] = m
        return m

    def with_weights(self, init=None, final=None) -> "WeightedAutomaton":
        return WeightedAutomaton(
            self._alphabet,
            self._states,
            self._init if init is None else init,
            self._final if final is None else final,
            self._trans,
        )

    def allclose(self, other: "WeightedAutomaton", atol=1e-12) -> bool:
        return (
            self._alphabet == other._alphabet
            and self._states == other._states
            and np.allclose(self._init, other._init, atol=atol, rtol=0)
            and np.allclose(self._final, other._final, atol=atol, rtol=0)
            and np.allclose(self.matrices, other.matrices, atol=atol, rtol=0)
        )

    def __repr__(self):
        return (f"WeightedAutomaton(alphabet={list(self._alphabet.symbols)}, "
                f"states={len(self._states)}, transitions={len(self._trans)})")

    def as_word(self, w) -> Word:
        if isinstance(w, str):
            return self._alphabet.parse_word(w)
        return self._alphabet.check_word(w)


# ---------------------------------------------------------------------------
# Series evaluation
# ---------------------------------------------------------------------------

def forward(a: WeightedAutomaton, w) -> np.ndarray:
    """Row vector ``init . M_w``."""
    e = a.init
    mats = a.matrices
    for x in a.as_word(w):
        e = e @ mats[x]
    return e


def evaluate(a: WeightedAutomaton, w) -> float:
    """``r_A(w)``: the weighted sum over all paths labelled ``w``."""
    return float(forward(a, w) @ a.final)


def _require_convergent(a: WeightedAutomaton):
    if not numkit.is_spectral_radius_lt_one(a.sigma_matrix):
        raise SpectralRadiusNotLtOne(
            f"spectral radius of the letter-summed matrix is not below 1 "
            f"({numkit.spectral_radius(a.sigma_matrix):.6g})")


def tail_sums(a: WeightedAutomaton) -> np.ndarray:
    """Per-state totals ``s_q = r_{A,q}(Sigma*)``, solving ``s = final + M s``."""
    s = a._cache.get("tail_sums")
    if s is None:
        _require_convergent(a)
        n = a.n_states
        s = numkit.solve_linear(np.eye(n) - a.sigma_matrix, a.final)
        s.setflags(write=False)
        a._cache["tail_sums"] = s
    return s


def evaluate_prefix(a: WeightedAutomaton, u) -> float:
    """``r_A(u Sigma*)``, the limit of the partial sums over extensions of ``u``."""
    s = tail_sums(a)
    return float(forward(a, u) @ s)


def series_sum(a: WeightedAutomaton) -> float:
    """``r_A(Sigma*)``."""
    return float(a.init @ tail_sums(a))


# ---------------------------------------------------------------------------
# Structural transformations
# ---------------------------------------------------------------------------

def _support_edges(a: WeightedAutomaton):
    succ = [set() for _ in range(a.n_states)]
    pred = [set() for _ in range(a.n_states)]
    for (i, _x, j) in a.transitions:
        succ[i].add(j)
        pred[j].add(i)
    return succ, pred


def _closure(seeds, edges):
    seen = set(seeds)
    todo = list(seeds)
    while todo:
        i = todo.pop()
        for j in edges[i]:
            if j not in seen:
                seen.add(j)
                todo.append(j)
    return seen


def subautomaton(a: WeightedAutomaton, keep: Sequence[int]) -> WeightedAutomaton:
    keep = sorted(keep)
    pos = {old: new for new, old in enumerate(keep)}
    trans = {(pos[i], x, pos[j]): w for (i, x, j), w in a.transitions.items()
             if i in pos and j in pos}
    return WeightedAutomaton(
        a.alphabet,
        [a.states[i] for i in keep],
        [a.init[i] for i in keep],
        [a.final[i] for i in keep],
        trans,
    )


def trim(a: WeightedAutomaton) -> WeightedAutomaton:
    """Drop states that are not both accessible and co-accessible."""
    succ, pred = _support_edges(a)
    acc = _closure([i for i in range(a.n_states) if a.init[i] != 0.0], succ)
    coacc = _closure([i for i in range(a.n_states) if a.final[i] != 0.0], pred)
    keep = acc & coacc
    if len(keep) == a.n_states:
        return a
    return subautomaton(a, keep)


def _span_basis(start: np.ndarray, maps: Sequence[np.ndarray], tol=REDUCE_TOL) -> np.ndarray:
    # Orthonormal basis of the smallest subspace containing ``start`` and
    # closed under ``v -> v @ M`` for every M in maps.
    n = start.shape[0]
    basis = np.zeros((0, n))
    queue = deque()

    def push(v):
        nonlocal basis
        norm = np.linalg.norm(v)
        if norm == 0.0 or not np.isfinite(norm):
            return
        r = v / norm
        for _ in range(2):
            r = r - basis.T @ (basis @ r)
        rn = np.linalg.norm(r)
        if rn > tol:
            r = r / rn
            basis = np.vstack([basis, r])
            queue.append(r)

    push(start)
    while queue and basis.shape[0] < n:
        b = queue.popleft()
        for m in maps:
            push(b @ m)
            if basis.shape[0] == n:
                break
    return basis


def reduce(a: WeightedAutomaton) -> WeightedAutomaton:
    """Return an equivalent automaton with linearly independent state series.

    Two passes: restrict to the span of the forward vectors ``init . M_u``,
    then to the span of the backward vectors ``M_u . final``.
    """
    mats = a.matrices
    fwd = _span_basis(a.init, list(mats))
    init1 = fwd @ a.init
    mats1 = np.einsum("ij,xjk,lk->xil", fwd, mats, fwd)
    final1 = fwd @ a.final
    bwd = _span_basis(final1, [m.T for m in mats1])
    init2 = bwd @ init1
    mats2 = np.einsum("ij,xjk,lk->xil", bwd, mats1, bwd)
    final2 = bwd @ final1
    k = bwd.shape[0]
    return WeightedAutomaton.from_dense(
        a.alphabet, [f"q{i}" for i in range(k)], init2, final2, mats2)


# ---------------------------------------------------------------------------
# Pseudo-stochastic decision and probabilistic automata
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PslCertificate:
    reduced_dimension: int
    spectral_radius_value: float
    series_total: float
    verdict: bool


def reduced_form(a: WeightedAutomaton) -> WeightedAutomaton:
    red = a._cache.get("reduced")
    if red is None:
        red = reduce(a)
        a._cache["reduced"] = red
    return red


def is_pseudo_stochastic(a: WeightedAutomaton) -> PslCertificate:
    """Decide whether ``a`` computes a pseudo-stochastic rational language.

    Reduce, check that the reduced letter-summed matrix has spectral radius
    below one, then check that the series sums to one.
    """
    cert = a._cache.get("certificate")
    if cert is not None:
        return cert
    red = reduced_form(a)
    rho = numkit.spectral_radius(red.sigma_matrix)
    if numkit.is_spectral_radius_lt_one(red.sigma_matrix):
        total = series_sum(red)
        verdict = abs(total - 1.0) <= SERIES_TOL
    else:
        total = float("nan")
        verdict = False
    cert = PslCertificate(red.n_states, rho, total, verdict)
    a._cache["certificate"] = cert
    return cert


def validate_pa(a: WeightedAutomaton, deterministic: bool = False, tol: float = PA_TOL) -> bool:
    """Check the probabilistic-automaton conditions (PDA if ``deterministic``).

    Weights lie in [0, 1], initial weights sum to 1, every state's stop
    weight plus outgoing mass is 1, and the automaton is trimmed.
    """
    if a.n_states == 0:
        return False
    weights = np.concatenate([a.init, a.final, np.fromiter(a.transitions.values(), float)])
    if np.any(weights < -tol) or np.any(weights > 1.0 + tol):
        return False
    if abs(a.init.sum() - 1.0) > tol:
        return False
    out = a.final + a.sigma_matrix.sum(axis=1)
    if np.any(np.abs(out - 1.0) > tol):
        return False
    if trim(a).n_states != a.n_states:
        return False
    if deterministic:
        if np.count_nonzero(a.init) != 1:
            return False
        seen = set()
        for (i, x, _j) in a.transitions:
            if (i, x) in seen:
                return False
            seen.add((i, x))
    return True


def is_pda(a: WeightedAutomaton, tol: float = PA_TOL) -> bool:
    return validate_pa(a, deterministic=True, tol=tol)


def words_up_to(k: int, max_len: int):
    """All words over ``k`` symbols of length at most ``max_len``, length-lex."""
    level = [EMPTY]
    for _ in range(max_len + 1):
        yield from level
        level = [w + (x,) for w in level for x in range(k)]
