"""Universal estimation of directed information with context-tree weighting."""
from __future__ import annotations

__version__ = "0.1.0"

from .core import Alphabet, JointPmf, Pmf, SymbolSequence, quantize_returns
from .ctw import ContextTree, fit
from .estimators import (CausalPair, EstimatorMethod, EstimatorTrace, estimate_all, estimate_di,
                         mutual_info, reverse_di, shifted_di)
from .oracle import (JointProcessModel, binary_entropy, coupled_bsc_rates, exact_di,
                     markov_bsc_rate)
from .sources import SourceConfig, generate

__all__ = [
    "Alphabet", "JointPmf", "Pmf", "SymbolSequence", "quantize_returns",
    "ContextTree", "fit",
    "CausalPair", "EstimatorMethod", "EstimatorTrace", "estimate_all", "estimate_di",
    "mutual_info", "reverse_di", "shifted_di",
    "JointProcessModel", "binary_entropy", "coupled_bsc_rates", "exact_di", "markov_bsc_rate",
    "SourceConfig", "generate",
]
