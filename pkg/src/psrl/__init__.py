"""Multiplicity automata, pseudo-stochastic languages and the DEES learner."""

from .automata import (
    Alphabet,
    PslCertificate,
    WeightedAutomaton,
    evaluate,
    evaluate_prefix,
    is_pseudo_stochastic,
    reduce,
    series_sum,
    trim,
    validate_pa,
)
from .baselines import alergia_infer, build_fpta, mdi_infer
from .dees import DeesConfig, dees_infer
from .evalkit import Sample, d1_on_support, d1_truncated, empirical, random_pa, sample_from
from .exceptions import PsrlError
from .formats import read_ma, read_sample, write_ma, write_sample
from .psl import nr_mass, pr_evaluate, pr_sample

__version__ = "0.1.0"

__all__ = [
    "Alphabet", "PslCertificate", "WeightedAutomaton", "evaluate", "evaluate_prefix",
    "is_pseudo_stochastic", "reduce", "series_sum", "trim", "validate_pa",
    "alergia_infer", "build_fpta", "mdi_infer", "DeesConfig", "dees_infer",
    "Sample", "d1_on_support", "d1_truncated", "empirical", "random_pa", "sample_from",
    "PsrlError", "read_ma", "read_sample", "write_ma", "write_sample",
    "nr_mass", "pr_evaluate", "pr_sample",
]
