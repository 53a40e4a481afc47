"""Small reference automata and samples used by tests, docs and experiments."""

from fractions import Fraction

from .automata import WeightedAutomaton


def two_state_negative():
    """Two-state prefix-closed MA over {a} with a negative back transition.

    States are the words ``ε`` and ``a``; ``r(Σ*) = 1`` and the letter-summed
    matrix has spectral radius 1/2.
    """
    return WeightedAutomaton.from_named(
        ["a"], ["ε", "a"],
        init={"ε": 1},
        final={"ε": "1/6", "a": "2/5"},
        transitions=[
            ("ε", "a", "a", "5/6"),
            ("a", "a", "a", "9/10"),
            ("a", "a", "ε", "-3/10"),
        ],
    )


def alternating_signs():
    """One state, ``a`` weighs 1 and ``b`` weighs -1: ``r(u) = (-1)^{|u|_b}``."""
    return WeightedAutomaton.from_named(
        ["a", "b"], ["q0"],
        init={"q0": 1}, final={"q0": 1},
        transitions=[("q0", "a", "q0", 1), ("q0", "b", "q0", -1)],
    )


def geometric(stop=Fraction(1, 2), symbol="a"):
    """One-state PA that stops with probability ``stop`` and otherwise emits ``symbol``."""
    stop = Fraction(stop)
    return WeightedAutomaton.from_named(
        [symbol], ["q0"],
        init={"q0": 1}, final={"q0": stop},
        transitions=[("q0", symbol, "q0", 1 - stop)],
    )


def nonrational_pair(rho=Fraction(3, 10), alpha=Fraction(3, 2), beta=Fraction(5, 4)):
    """Two diagonal states mixed with weights 3/2 and -1/2.

    State 1 loops on ``a`` with ``rho*alpha`` and on ``b`` with ``rho``; state 2
    loops on ``a`` with ``rho`` and on ``b`` with ``rho*beta``. Stop weights
    make each state's own series sum to one. With ``alpha > beta > 1`` the
    associated pruned distribution is not rational.
    """
    rho, alpha, beta = Fraction(rho), Fraction(alpha), Fraction(beta)
    tau1 = 1 - rho * (alpha + 1)
    tau2 = 1 - rho * (beta + 1)
    return WeightedAutomaton.from_named(
        ["a", "b"], ["q1", "q2"],
        init={"q1": Fraction(3, 2), "q2": Fraction(-1, 2)},
        final={"q1": tau1, "q2": tau2},
        transitions=[
            ("q1", "a", "q1", rho * alpha),
            ("q1", "b", "q1", rho),
            ("q2", "a", "q2", rho),
            ("q2", "b", "q2", rho * beta),
        ],
    )


def nonrational_closed_form(word, rho=0.3, alpha=1.5, beta=1.25):
    """Closed form of :func:`nonrational_pair` on a word of symbol indices (a=0, b=1)."""
    tau1 = 1 - rho * (alpha + 1)
    tau2 = 1 - rho * (beta + 1)
    na = sum(1 for x in word if x == 0)
    nb = len(word) - na
    return rho ** len(word) / 2 * (3 * alpha ** na * tau1 - beta ** nb * tau2)


def golden_ma():
    """Two-state MA with rational weights whose series is a PA distribution
    with irrational parameters (see :func:`golden_pa`)."""
    return WeightedAutomaton.from_named(
        ["a", "b"], ["ε", "a"],
        init={"ε": 1},
        final={"ε": "1/4", "a": "1/4"},
        transitions=[
            ("ε", "b", "ε", "3/4"),
            ("ε", "a", "a", "3/8"),
            ("ε", "b", "a", "-3/8"),
            ("a", "a", "ε", "-1/6"),
            ("a", "b", "ε", "1/6"),
            ("a", "a", "a", "3/4"),
        ],
    )


def golden_pa():
    """Two-state PA with weights built from the golden ratio ``g``.

    Each state starts with probability 1/2 and stops with 1/4; state 1 loops
    on ``a`` with ``g^2/4`` and on ``b`` with ``g^-2/4``, state 2 the other way.
    """
    g = (5 ** 0.5 + 1) / 2
    hi, lo = g ** 2 / 4, g ** -2 / 4
    return WeightedAutomaton.from_named(
        ["a", "b"], ["1", "2"],
        init={"1": 0.5, "2": 0.5},
        final={"1": 0.25, "2": 0.25},
        transitions=[
            ("1", "a", "1", hi), ("1", "b", "1", lo),
            ("2", "a", "2", lo), ("2", "b", "2", hi),
        ],
    )


def worked_sample_words():
    """Sample with ε x10, a x20, aa x20, aaa x10 (as symbol tuples)."""
    return [()] * 10 + [("a",)] * 20 + [("a", "a")] * 20 + [("a", "a", "a")] * 10
