"""Experiment drivers: delay scans, causality classification and convergence runs."""
from __future__ import annotations

import enum
import io
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import oracle
from .estimators import (ALL_METHODS, CausalPair, EstimatorMethod, EstimatorTrace,
                         estimate_all, reverse_pair, shifted_di)
from .sources import CoupledBsc, IidPair, MarkovBsc, SourceConfig, generate

log = logging.getLogger(__name__)

# Artifact defaults: no published numeric thresholds exist for these.
DEFAULT_TAU = 0.02
DEFAULT_RHO = 2.0
DEFAULT_DELAY_THRESHOLD = 0.02


@dataclass
class DelayScanResult:
    points: list[tuple[int, float]]
    threshold: float
    detected: int | None

    def to_csv(self) -> str:
        lines = ["d,bits"] + [f"{d},{v:.10f}" for d, v in self.points]
        return "\n".join(lines) + "\n"


def delay_scan(pair: CausalPair, d_max: int, method=EstimatorMethod.I2, depth: int = 6,
               threshold: float = DEFAULT_DELAY_THRESHOLD) -> DelayScanResult:
    """Shifted directed information for ``d = 0 .. d_max``.

    The detected delay is the first ``d`` whose estimate exceeds ``threshold``.
    """
    if d_max < 0:
        raise ValueError("empty scan range")
    if d_max + depth >= len(pair):
        raise ValueError(f"d_max={d_max} + depth={depth} must be below n={len(pair)}")
    points = [(d, shifted_di(pair, d, method, depth)) for d in range(d_max + 1)]
    detected = next((d for d, v in points if v > threshold), None)
    return DelayScanResult(points, threshold, detected)


class Causality(enum.Enum):
    X_CAUSES_Y = "XcausesY"
    Y_CAUSES_X = "YcausesX"
    MUTUAL = "Mutual"
    INDEPENDENT = "Independent"


@dataclass(frozen=True)
class CausalityReport:
    di: float
    reverse_di: float
    classification: Causality
    tau: float
    rho: float

    @property
    def mi(self) -> float:
        return self.di + self.reverse_di

    def to_text(self) -> str:
        return (f"di={self.di:.4f} rev={self.reverse_di:.4f} mi={self.mi:.4f} "
                f"class={self.classification.value} tau={self.tau} rho={self.rho}")

    def csv_header(self) -> str:
        return "di,reverse_di,mi,classification,tau,rho"

    def csv_row(self) -> str:
        return (f"{self.di:.10f},{self.reverse_di:.10f},{self.mi:.10f},"
                f"{self.classification.value},{self.tau},{self.rho}")


def classify_causality(di: float, reverse_di: float, tau: float = DEFAULT_TAU,
                       rho: float = DEFAULT_RHO) -> CausalityReport:
    """Label a (directed, reverse directed) estimate pair.

    Independent when the mutual information ``di + reverse_di`` is below
    ``tau``; otherwise one direction dominates when it exceeds ``rho`` times
    the other, else the influence is mutual.
    """
    mi = di + reverse_di
    if mi < tau:
        label = Causality.INDEPENDENT
    elif di > rho * reverse_di:
        label = Causality.X_CAUSES_Y
    elif reverse_di > rho * di:
        label = Causality.Y_CAUSES_X
    else:
        label = Causality.MUTUAL
    return CausalityReport(di, reverse_di, label, tau, rho)


def causality_report(pair: CausalPair, method=EstimatorMethod.I2, depth: int = 3,
                     tau: float = DEFAULT_TAU, rho: float = DEFAULT_RHO) -> CausalityReport:
    method = EstimatorMethod.parse(method)
    di = estimate_all(pair, depth, [method])[method].final
    rev = estimate_all(reverse_pair(pair), depth, [method])[method].final
    return classify_causality(di, rev, tau, rho)


# --- convergence runs ------------------------------------------------------

def target_pair(config: SourceConfig, pair: CausalPair) -> CausalPair:
    """Orientation estimated in a convergence run: Y -> X for the hidden-Markov
    system, X -> Y for everything else."""
    return pair.swapped() if isinstance(config.variant, MarkovBsc) else pair


def analytic_rate(config: SourceConfig) -> float | None:
    v = config.variant
    if isinstance(v, MarkovBsc):
        return oracle.markov_bsc_rate(v.p, v.eps)
    if isinstance(v, CoupledBsc):
        return oracle.coupled_bsc_rates(v.alpha, v.beta).di
    if isinstance(v, IidPair):
        return oracle.binary_entropy(v.q) if v.copy else 0.0
    return None


def total_variation(values: np.ndarray) -> float:
    return float(np.abs(np.diff(values)).sum())


@dataclass
class ConvergenceResult:
    config: SourceConfig
    depth: int
    analytic: float | None
    traces: dict[tuple[EstimatorMethod, int], EstimatorTrace] = field(repr=False)
    rows: list[tuple[str, int, int, float]] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("method,seed,n,bits,analytic\n")
        ref = "" if self.analytic is None else f"{self.analytic:.10f}"
        for method, seed, n, bits in self.rows:
            buf.write(f"{method},{seed},{n},{bits:.10f},{ref}\n")
        return buf.getvalue()

    def mean_abs_error(self, n: int) -> float:
        if self.analytic is None:
            raise ValueError("no analytic reference for this source")
        errs = [abs(b - self.analytic) for _, _, m, b in self.rows if m == n]
        return float(np.mean(errs))


def convergence_run(config: SourceConfig, methods: Iterable = ALL_METHODS,
                    n_grid: Sequence[int] | None = None, depth: int = 3,
                    seeds: Sequence[int] = (0, 1, 2)) -> ConvergenceResult:
    """Estimate on one long sample per seed and read the prefix estimates on ``n_grid``.

    CTW is sequential, so the running estimate at prefix length ``i`` equals
    the estimate on the first ``i`` symbols alone.
    """
    methods = [EstimatorMethod.parse(m) for m in methods]
    grid = list(n_grid) if n_grid else [config.n]
    if grid != sorted(grid):
        raise ValueError("n_grid must be sorted ascending")
    if grid[0] <= depth:
        raise ValueError("every grid point must exceed the tree depth")
    n_max = grid[-1]
    result = ConvergenceResult(config, depth, analytic_rate(config), {})
    for seed in seeds:
        cfg = SourceConfig(config.variant, n_max, seed)
        pair = target_pair(cfg, generate(cfg))
        traces = estimate_all(pair, depth, methods)
        for m in methods:
            tr = traces[m]
            result.traces[(m, seed)] = tr
            for n in grid:
                result.rows.append((f"I{int(m)}", seed, n, tr.at(n)))
    _log_smoothness(result)
    return result


def _log_smoothness(result: ConvergenceResult) -> None:
    """Diagnostic only: I2 and I4 paths are expected to be smoother than I1."""
    by_method: dict[EstimatorMethod, list[float]] = {}
    for (m, _seed), tr in result.traces.items():
        by_method.setdefault(m, []).append(total_variation(tr.values))
    for m, tvs in sorted(by_method.items()):
        log.info("trace total variation I%d: mean %.4f over %d seeds", int(m), np.mean(tvs), len(tvs))
    if EstimatorMethod.I1 in by_method:
        base = np.mean(by_method[EstimatorMethod.I1])
        for m in (EstimatorMethod.I2, EstimatorMethod.I4):
            if m in by_method and np.mean(by_method[m]) > base:
                log.info("I%d trace rougher than I1 on this run", int(m))
