"""Running FDP estimators and across-trial error metrics.

The three per-run traces share the denominator max(|R(t)|, 1):

* oracle: sums the levels spent on truly null steps (needs labels);
* naive:  sums every level, an upper bound on the oracle;
* candidate-discounted: sums alpha_j / (1 - lambda_j) over non-candidate
  steps only, the quantity the candidate-aware procedures keep below alpha.

``aggregate`` reduces a batch of trials to mean FDR/power with standard
errors; ``mfdr`` is the plug-in ratio of across-trial means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Sequence

import numpy as np

from .records import DecisionRecord, StreamTrace, TrialResult


@dataclass
class EstimatorTrace:
    """Per-step values of one estimator over a run; step t = position + 1."""

    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> float:
        return float(self.values[i])

    def items(self) -> Iterator[tuple[int, float]]:
        for i, v in enumerate(self.values):
            yield i + 1, float(v)

    def max(self) -> float:
        return float(self.values.max()) if len(self.values) else 0.0

    def to_csv(self, out: IO[str]) -> None:
        out.write("t,value\n")
        for t, v in self.items():
            out.write(f"{t},{v!r}\n")


def _arrays(records: Iterable[DecisionRecord] | StreamTrace):
    if isinstance(records, StreamTrace):
        return (
            np.asarray(records.pvalues, dtype=np.float64),
            np.asarray(records.alpha, dtype=np.float64),
            np.asarray(records.lam, dtype=np.float64),
            np.asarray(records.rejected, dtype=bool),
        )
    recs = list(records)
    return (
        np.array([r.p for r in recs], dtype=np.float64),
        np.array([r.alpha for r in recs], dtype=np.float64),
        np.array([r.lam for r in recs], dtype=np.float64),
        np.array([r.rejected for r in recs], dtype=bool),
    )


def _over_rejections(numerators: np.ndarray, rejected: np.ndarray) -> EstimatorTrace:
    den = np.maximum(np.cumsum(rejected), 1)
    return EstimatorTrace(np.cumsum(numerators) / den)


def fdp_oracle(
    records: Sequence[DecisionRecord] | StreamTrace, is_null: Sequence[bool]
) -> EstimatorTrace:
    """Levels spent on truly null steps over rejections (simulation only)."""
    _, alpha, _, rejected = _arrays(records)
    null = np.asarray(is_null, dtype=bool)
    if null.shape != alpha.shape:
        raise ValueError(
            f"length mismatch: {alpha.shape[0]} records vs {null.shape[0]} labels"
        )
    return _over_rejections(alpha * null, rejected)


def fdp_hat_lord(records: Sequence[DecisionRecord] | StreamTrace) -> EstimatorTrace:
    """All levels spent, over rejections; dominates the oracle pointwise."""
    _, alpha, _, rejected = _arrays(records)
    return _over_rejections(alpha, rejected)


def fdp_hat_saffron(records: Sequence[DecisionRecord] | StreamTrace) -> EstimatorTrace:
    """Candidate-discounted spend over rejections.

    Non-candidate steps contribute alpha_j / (1 - lambda_j); candidates
    contribute nothing.
    """
    p, alpha, lam, rejected = _arrays(records)
    contrib = np.where(p > lam, alpha / (1.0 - lam), 0.0)
    return _over_rejections(contrib, rejected)


@dataclass(frozen=True)
class TrialSummary:
    fdr: float
    power: float
    fdr_se: float
    power_se: float
    trials: int


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    n = len(x)
    mean = float(x.mean())
    se = float(x.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return mean, se


def aggregate(trials: Sequence[TrialResult]) -> TrialSummary:
    """Mean FDR and power across trials, with standard errors of the mean."""
    if not trials:
        raise ValueError("cannot aggregate an empty list of trials")
    fdr, fdr_se = _mean_se(np.array([t.fdp for t in trials]))
    power, power_se = _mean_se(np.array([t.power for t in trials]))
    return TrialSummary(fdr, power, fdr_se, power_se, len(trials))


def mfdr(trials: Sequence[TrialResult]) -> float:
    """Plug-in modified FDR: mean false discoveries over mean discoveries."""
    if not trials:
        raise ValueError("cannot compute mFDR of an empty list of trials")
    false = sum(t.fdp * t.rejections for t in trials)
    total = sum(t.rejections for t in trials)
    return false / total if total else 0.0
