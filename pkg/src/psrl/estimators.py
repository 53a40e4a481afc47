"""scikit-learn style wrappers around the learners.

``X`` is a :class:`~psrl.evalkit.Sample` or a sequence of words, each word
being a sequence of symbol names or a whitespace-separated string.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .automata import Alphabet, WeightedAutomaton
from .baselines import DEFAULT_ALPHA, DEFAULT_GAMMA, alergia_infer, mdi_infer
from .dees import DeesConfig, dees_infer
from .evalkit import Sample, d1_on_support, empirical, model_values


def check_sample(X, alphabet: Optional[Sequence[str]] = None) -> Sample:
    """Coerce ``X`` into a nonempty :class:`Sample`.

    Without an explicit ``alphabet`` the symbols are collected from ``X``
    in first-seen order.
    """
    if isinstance(X, Sample):
        if alphabet is not None and tuple(alphabet) != X.alphabet.symbols:
            raise ValueError("sample alphabet does not match the estimator's")
        return X
    words = [w.split() if isinstance(w, str) else list(w) for w in X]
    if alphabet is None:
        alphabet = list(dict.fromkeys(s for w in words for s in w)) or ["a"]
    return Sample.from_symbols(Alphabet(tuple(alphabet)), words)


def check_words(X, alphabet: Alphabet):
    """Encode query words (strings, symbol lists or index tuples) against a fitted alphabet."""
    if isinstance(X, Sample):
        if X.alphabet != alphabet:
            raise ValueError("query alphabet does not match the fitted one")
        return list(X.words)
    out = []
    for w in X:
        if isinstance(w, str):
            out.append(alphabet.encode(w.split()))
        elif all(isinstance(x, (int, np.integer)) for x in w):
            # already encoded as symbol indices
            out.append(alphabet.check_word(w))
        else:
            out.append(alphabet.encode(w))
    return out


class _AutomatonLearner(BaseEstimator):

    def _learn(self, sample: Sample) -> WeightedAutomaton:
        raise NotImplementedError

    def _uses_pr(self) -> bool:
        return False

    def fit(self, X, y=None):
        sample = check_sample(X, self.alphabet)
        if len(sample) == 0:
            raise ValueError("cannot fit on an empty sample")
        self.automaton_ = self._learn(sample)
        self.alphabet_ = sample.alphabet
        self.n_states_ = self.automaton_.n_states
        return self

    def predict_proba(self, X) -> np.ndarray:
        """Probability the fitted model gives to each word of ``X``."""
        check_is_fitted(self, "automaton_")
        words = check_words(X, self.alphabet_)
        return model_values(self.automaton_, words, self._uses_pr())

    def score(self, X, y=None) -> float:
        """Negated D1 distance to the empirical distribution of ``X`` on its support."""
        check_is_fitted(self, "automaton_")
        sample = check_sample(X, self.alphabet_.symbols)
        return -d1_on_support(self.automaton_, empirical(sample), sample, (self._uses_pr(), False))


class DEES(_AutomatonLearner):
    """DEES; ``epsilon=None`` uses the sample-size rule."""

    def __init__(self, epsilon: Optional[float] = None, max_states: int = 200,
                 alphabet: Optional[Sequence[str]] = None):
        self.epsilon = epsilon
        self.max_states = max_states
        self.alphabet = alphabet

    def _learn(self, sample):
        automaton, self.trace_ = dees_infer(sample, DeesConfig(self.epsilon, self.max_states))
        cert = self.trace_.certificate
        self.pseudo_stochastic_ = bool(cert is not None and cert.verdict)
        return automaton

    def _uses_pr(self):
        # the pruned distribution exists only for pseudo-stochastic outputs
        return self.pseudo_stochastic_


class Alergia(_AutomatonLearner):
    def __init__(self, alpha: float = DEFAULT_ALPHA, alphabet: Optional[Sequence[str]] = None):
        self.alpha = alpha
        self.alphabet = alphabet

    def _learn(self, sample):
        return alergia_infer(sample, self.alpha)


class MDI(_AutomatonLearner):
    def __init__(self, gamma: float = DEFAULT_GAMMA, alphabet: Optional[Sequence[str]] = None):
        self.gamma = gamma
        self.alphabet = alphabet

    def _learn(self, sample):
        return mdi_infer(sample, self.gamma)
