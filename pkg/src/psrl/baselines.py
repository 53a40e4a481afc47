"""State-merging baselines: frequency prefix tree, ALERGIA and MDI.

Both learners start from the frequency prefix tree of the sample and
run the usual red/blue loop. Blue nodes are visited in length-lex order
of their prefixes; each is merged into the first compatible red node (also
length-lex) or promoted to red. The result is normalised into a
probabilistic deterministic automaton.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .automata import Alphabet, WeightedAutomaton, Word
from .evalkit import Sample


@dataclass
class TreeNode:
    word: Word
    passing: int = 0
    stop: int = 0
    child_counts: Dict[int, int] = field(default_factory=dict)


@dataclass
class FreqPrefixTree:
    """Prefix tree with pass-through, stop and per-symbol child counts."""

    alphabet: Alphabet
    nodes: Dict[Word, TreeNode]

    @property
    def root(self) -> TreeNode:
        return self.nodes[()]

    def __len__(self):
        return len(self.nodes)

    def to_automaton(self) -> WeightedAutomaton:
        """Frequency-normalised PDA whose distribution is the sample's."""
        order = sorted(self.nodes, key=lambda w: (len(w), w))
        index = {w: i for i, w in enumerate(order)}
        final = [self.nodes[w].stop / self.nodes[w].passing for w in order]
        trans = {}
        for w in order:
            node = self.nodes[w]
            for x, c in node.child_counts.items():
                trans[(index[w], x, index[w + (x,)])] = c / node.passing
        init = [1.0] + [0.0] * (len(order) - 1)
        names = [self.alphabet.format_word(w, empty="ε") for w in order]
        return WeightedAutomaton(self.alphabet, names, init, final, trans)


def build_fpta(sample: Sample) -> FreqPrefixTree:
    if len(sample) == 0:
        raise ValueError("cannot build a prefix tree from an empty sample")
    nodes: Dict[Word, TreeNode] = {(): TreeNode(())}
    for w in sample:
        node = nodes[()]
        node.passing += 1
        for i, x in enumerate(w):
            node.child_counts[x] = node.child_counts.get(x, 0) + 1
            prefix = w[:i + 1]
            node = nodes.get(prefix)
            if node is None:
                node = nodes[prefix] = TreeNode(prefix)
            node.passing += 1
        node.stop += 1
    return FreqPrefixTree(sample.alphabet, nodes)


class _Merger:
    # Mutable automaton over integer node ids. ``child[q][x]`` is the
    # target of q's x-transition and ``count[q][x]`` how many sample words
    # use it; ``passing[q]``/``stop[q]`` as in the prefix tree.

    def __init__(self, tree: FreqPrefixTree):
        order = sorted(tree.nodes, key=lambda w: (len(w), w))
        ids = {w: i for i, w in enumerate(order)}
        self.alphabet = tree.alphabet
        self.words = order
        self.passing = [tree.nodes[w].passing for w in order]
        self.stop = [tree.nodes[w].stop for w in order]
        self.count = [dict(tree.nodes[w].child_counts) for w in order]
        self.child = [{x: ids[w + (x,)] for x in tree.nodes[w].child_counts} for w in order]
        self.parent: List[Optional[Tuple[int, int]]] = [None] * len(order)
        for q, kids in enumerate(self.child):
            for x, c in kids.items():
                self.parent[c] = (q, x)
        self.red = [0]

    def blue(self) -> List[int]:
        reds = set(self.red)
        out = {c for q in self.red for c in self.child[q].values() if c not in reds}
        return sorted(out)

    def fold(self, r: int, b: int, log: Optional[list] = None):
        """Redirect b's parent edge to r and fold b's subtree into r.

        With ``log`` given, every overwritten value is recorded so that
        :meth:`undo` can restore the previous state.
        """
        p, x = self.parent[b]
        self._set(log, self.child[p], x, r)
        stack = [(r, b)]
        while stack:
            r, b = stack.pop()
            self._set_list(log, self.passing, r, self.passing[r] + self.passing[b])
            self._set_list(log, self.stop, r, self.stop[r] + self.stop[b])
            for y, c in self.count[b].items():
                self._set(log, self.count[r], y, self.count[r].get(y, 0) + c)
                bc = self.child[b][y]
                rc = self.child[r].get(y)
                if rc is None:
                    self._set(log, self.child[r], y, bc)
                    self._set_list(log, self.parent, bc, (r, y))
                else:
                    stack.append((rc, bc))

    @staticmethod
    def _set(log, d, key, value):
        if log is not None:
            log.append((d, key, d.get(key, _MISSING)))
        d[key] = value

    @staticmethod
    def _set_list(log, lst, i, value):
        if log is not None:
            log.append((lst, i, lst[i]))
        lst[i] = value

    @staticmethod
    def undo(log):
        for container, key, old in reversed(log):
            if old is _MISSING:
                del container[key]
            else:
                container[key] = old

    def reachable(self) -> List[int]:
        seen = {0}
        stack = [0]
        while stack:
            q = stack.pop()
            for c in self.child[q].values():
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return sorted(seen)

    def run(self, try_merge: Callable[[int, int], bool]):
        while True:
            blues = self.blue()
            if not blues:
                return
            b = blues[0]
            for r in self.red:
                if try_merge(r, b):
                    break
            else:
                self.red.append(b)
                self.red.sort()

    def to_automaton(self) -> WeightedAutomaton:
        states = self.reachable()
        index = {q: i for i, q in enumerate(states)}
        final = [self.stop[q] / self.passing[q] for q in states]
        trans = {}
        for q in states:
            for x, c in self.count[q].items():
                trans[(index[q], x, index[self.child[q][x]])] = c / self.passing[q]
        init = [1.0] + [0.0] * (len(states) - 1)
        names = [self.alphabet.format_word(self.words[q], empty="ε") for q in states]
        return WeightedAutomaton(self.alphabet, names, init, final, trans)


_MISSING = object()

DEFAULT_ALPHA = 0.05
# best mean truncated D1 on the golden-ratio target over sizes 500..10000
DEFAULT_GAMMA = 1e-4


def hoeffding_compatible(f1: int, n1: int, f2: int, n2: int, alpha: float) -> bool:
    """ALERGIA's frequency test; vacuous when either side has no data."""
    if n1 == 0 or n2 == 0:
        return True
    bound = (math.sqrt(1.0 / n1) + math.sqrt(1.0 / n2)) * math.sqrt(math.log(2.0 / alpha) / 2.0)
    return abs(f1 / n1 - f2 / n2) <= bound


def alergia_infer(sample: Sample, alpha: float = DEFAULT_ALPHA) -> WeightedAutomaton:
    """ALERGIA with the Hoeffding compatibility test at level ``alpha``."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    m = _Merger(build_fpta(sample))
    k = len(sample.alphabet)

    def compatible(r: int, b: int) -> bool:
        stack = [(r, b)]
        seen = set()
        while stack:
            r, b = stack.pop()
            if (r, b) in seen:
                continue
            seen.add((r, b))
            n1, n2 = m.passing[r], m.passing[b]
            if not hoeffding_compatible(m.stop[r], n1, m.stop[b], n2, alpha):
                return False
            for x in range(k):
                if not hoeffding_compatible(m.count[r].get(x, 0), n1, m.count[b].get(x, 0), n2, alpha):
                    return False
                if x in m.child[r] and x in m.child[b]:
                    stack.append((m.child[r][x], m.child[b][x]))
        return True

    def try_merge(r: int, b: int) -> bool:
        if not compatible(r, b):
            return False
        m.fold(r, b)
        return True

    m.run(try_merge)
    return m.to_automaton()


def _node_ll(m: _Merger, q: int) -> float:
    n = m.passing[q]
    if n == 0:
        return 0.0
    total = m.stop[q] * math.log(m.stop[q] / n) if m.stop[q] else 0.0
    for c in m.count[q].values():
        if c:
            total += c * math.log(c / n)
    return total


def mdi_infer(sample: Sample, gamma: float = DEFAULT_GAMMA) -> WeightedAutomaton:
    """MDI: accept a merge when divergence increase per state saved is below ``gamma``.

    The divergence increase is the drop in sample log-likelihood divided
    by the sample size; only the nodes touched by a merge are re-scored.
    """
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    tree = build_fpta(sample)
    if gamma == 0:
        # a ratio of nonnegative quantities is never below zero
        return _Merger(tree).to_automaton()
    m = _Merger(tree)
    size = len(sample)
    ll = [_node_ll(m, q) for q in range(len(m.passing))]

    def subtree(b: int) -> List[int]:
        out, stack = [], [b]
        while stack:
            q = stack.pop()
            out.append(q)
            stack.extend(m.child[q].values())
        return out

    def try_merge(r: int, b: int) -> bool:
        # the blue subtree is still a tree, so this enumerates it exactly
        removed = subtree(b)
        before = sum(ll[q] for q in removed)
        log: list = []
        m.fold(r, b, log)
        touched = {key for container, key, _old in log if container is m.passing}
        before += sum(ll[q] for q in touched)
        after_scores = {q: _node_ll(m, q) for q in touched}
        # blue nodes that were re-attached rather than folded stay states
        attached = {key for container, key, _old in log if container is m.parent}
        survivors = set()
        for q in attached:
            survivors.update(subtree(q))
        after = sum(after_scores.values()) + sum(ll[q] for q in survivors)
        saved = len(removed) - len(survivors)
        delta = (before - after) / size
        if delta < 1e-12:
            delta = 0.0
        if saved > 0 and delta / saved < gamma:
            for q in removed:
                if q not in survivors:
                    ll[q] = 0.0
            for q, v in after_scores.items():
                ll[q] = v
            return True
        m.undo(log)
        return False

    m.run(try_merge)
    return m.to_automaton()
