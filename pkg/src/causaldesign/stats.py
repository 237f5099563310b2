"""Sample-based tests for causal experiments.

Closeness testing uses a collision-style two-sample statistic

    Z = sum_cells ((X_i - Y_i)^2 - X_i - Y_i) / (X_i + Y_i)

over equal-size count vectors, skipping empty cells. Its null distribution is
nearly pivotal, so the rejection threshold is calibrated once per (alphabet,
sample size, error level) by Monte-Carlo under a uniform null. The sample
budget follows the D^(3/4) / eps^2 * log(1/delta) law with a calibrated
leading constant (default 10).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2 as _chi2
from scipy.stats import norm as _norm

from .bayesnet import targets
from .divergence import power_divergence

__all__ = [
    "InsufficientSamples",
    "TestVerdict",
    "RunTestResult",
    "required_sample_count",
    "hellinger_closeness_test",
    "kpartite_influence_test",
    "power_divergence_gof",
    "ww_ate_run_test",
    "erl_estimate",
]

DEFAULT_BUDGET_CONSTANT = 10.0


class InsufficientSamples(RuntimeError):
    """The statistical contract needs more samples than were provided."""

    def __init__(self, required, available, what="closeness test"):
        self.required = int(required)
        self.available = int(available)
        super().__init__(
            f"{what} needs at least {required} samples per arm, got {available}"
        )


@dataclass(frozen=True)
class TestVerdict:
    reject_null: bool
    statistic: float
    threshold: float
    samples_used: int
    per_node: dict = None


@dataclass(frozen=True)
class RunTestResult:
    r: int
    u: int
    v: int
    expected_r: float
    var_r: float
    z: float
    p_value: float
    reject_null: bool


def required_sample_count(alphabet, eps, delta=1.0 / 3.0, c=DEFAULT_BUDGET_CONSTANT):
    """Per-arm budget c * D^(3/4) / eps^2 * log(1/delta)."""
    if alphabet < 2:
        raise ValueError("alphabet size must be at least 2")
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    return math.ceil(c * alphabet**0.75 / eps**2 * math.log(1.0 / delta))


def _closeness_statistic(x, y):
    total = x + y
    live = total > 0
    num = (x - y).astype(np.float64) ** 2 - x - y
    return float((num[live] / total[live]).sum())


_THRESHOLDS = {}
_CALIBRATION_TRIALS = 2000


def _calibrated_threshold(alphabet, m, delta):
    key = (alphabet, m, round(delta, 12))
    if key not in _THRESHOLDS:
        rng = np.random.default_rng([alphabet, m, 987654321])
        p = np.full(alphabet, 1.0 / alphabet)
        xs = rng.multinomial(m, p, size=_CALIBRATION_TRIALS)
        ys = rng.multinomial(m, p, size=_CALIBRATION_TRIALS)
        num = (xs - ys).astype(np.float64) ** 2 - xs - ys
        tot = (xs + ys).astype(np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(tot > 0, num / np.where(tot > 0, tot, 1.0), 0.0)
        stats = terms.sum(axis=1)
        _THRESHOLDS[key] = float(np.quantile(stats, 1.0 - delta))
    return _THRESHOLDS[key]


def hellinger_closeness_test(
    samples_p,
    samples_q,
    alphabet,
    eps,
    delta=1.0 / 3.0,
    c=DEFAULT_BUDGET_CONSTANT,
):
    """Distinguish P = Q from squared Hellinger divergence >= eps^2.

    Refuses outright (InsufficientSamples) when either arm is below the
    calibrated budget; accepting the null then would carry no guarantee.
    """
    samples_p = np.asarray(samples_p, dtype=np.int64).ravel()
    samples_q = np.asarray(samples_q, dtype=np.int64).ravel()
    for arr in (samples_p, samples_q):
        if arr.size and (arr.min() < 0 or arr.max() >= alphabet):
            raise ValueError("sample values must lie in [0, alphabet)")
    required = required_sample_count(alphabet, eps, delta, c)
    available = min(samples_p.size, samples_q.size)
    if available < required:
        raise InsufficientSamples(required, available)
    m = available
    x = np.bincount(samples_p[:m], minlength=alphabet)
    y = np.bincount(samples_q[:m], minlength=alphabet)
    statistic = _closeness_statistic(x, y)
    threshold = _calibrated_threshold(alphabet, m, delta)
    return TestVerdict(statistic > threshold, statistic, threshold, 2 * m)


def _draw(sampler, m, n_cols, what):
    rows = sampler(m) if callable(sampler) else np.asarray(sampler)
    rows = np.asarray(rows, dtype=np.int64)
    if rows.ndim != 2 or rows.shape[1] != n_cols:
        raise ValueError(f"{what} must yield an (m, {n_cols}) sample matrix")
    if rows.shape[0] < m:
        raise InsufficientSamples(m, rows.shape[0], what)
    return rows[:m]


def kpartite_influence_test(
    net,
    part,
    edges,
    eps,
    sampler_observational,
    sampler_interventional,
    delta=1.0 / 3.0,
    c=DEFAULT_BUDGET_CONSTANT,
):
    """Edge-influence test on a layered net via per-outcome closeness tests.

    Each intervention target in the bottom layer is tested on its
    {node + parents} block at the per-node threshold eps^2 / (2 omega); the
    intervention registers (reject_null=True) when any block test rejects.
    Targets outside the bottom layer are excluded with a warning. Samplers
    are callables m -> (m, n) matrices, or pre-drawn matrices.
    """
    edges = frozenset((int(p), int(c_)) for p, c_ in edges)
    bottom = part.k
    outcome = [t for t in targets(edges) if part.assignment[t] == bottom]
    skipped = [t for t in targets(edges) if part.assignment[t] != bottom]
    if skipped:
        names = ", ".join(net.names[t] for t in skipped)
        warnings.warn(
            f"targets outside the bottom layer are not tested: {names}", stacklevel=2
        )
    if not outcome:
        warnings.warn("no bottom-layer targets; test is vacuous", stacklevel=2)
        return TestVerdict(False, 0.0, math.inf, 0, {})
    omega = len(outcome)
    eps_node = math.sqrt(eps**2 / (2.0 * omega))
    per_node = {}
    used = 0
    best = None
    for t in outcome:
        block = net.parents[t] + (t,)
        dims = tuple(net.cards[v] for v in block)
        alphabet = int(np.prod(dims))
        m = required_sample_count(alphabet, eps_node, delta, c)
        obs = _draw(sampler_observational, m, net.n, "observational sampler")
        inter = _draw(sampler_interventional, m, net.n, "interventional sampler")
        codes_obs = np.ravel_multi_index(tuple(obs[:, v] for v in block), dims)
        codes_int = np.ravel_multi_index(tuple(inter[:, v] for v in block), dims)
        verdict = hellinger_closeness_test(codes_obs, codes_int, alphabet, eps_node, delta, c)
        per_node[net.names[t]] = verdict
        used += verdict.samples_used
        margin = verdict.statistic - verdict.threshold
        if best is None or margin > best[0]:
            best = (margin, verdict)
    top = best[1]
    return TestVerdict(
        any(v.reject_null for v in per_node.values()),
        top.statistic,
        top.threshold,
        used,
        per_node,
    )


def power_divergence_gof(counts, null_probs, lam=1.0, significance=0.05):
    """Goodness of fit via 2m * I^lambda(empirical || null).

    lambda = 1 reproduces Pearson's X^2 exactly; the threshold is the
    chi-square quantile with (cells - 1) degrees of freedom.
    """
    counts = np.asarray(counts, dtype=np.float64).ravel()
    null_probs = np.asarray(null_probs, dtype=np.float64).ravel()
    if counts.shape != null_probs.shape or counts.size < 2:
        raise ValueError("counts and null probabilities must align, with >= 2 cells")
    if (counts < 0).any():
        raise ValueError("counts must be non-negative")
    if (null_probs <= 0).any():
        raise ValueError("null cell probabilities must be positive")
    if abs(null_probs.sum() - 1.0) > 1e-9:
        raise ValueError("null probabilities must sum to 1")
    m = counts.sum()
    if m < 1:
        raise ValueError("need at least one observation")
    statistic = 2.0 * m * power_divergence(lam, counts / m, null_probs)
    threshold = float(_chi2.ppf(1.0 - significance, counts.size - 1))
    return TestVerdict(statistic > threshold, float(statistic), threshold, int(m))


def ww_ate_run_test(outcomes_treat, outcomes_ctrl, significance=0.05, alternative="two_sided"):
    """Runs test on the pooled outcomes, sorted in descending order.

    Few runs mean the two arms separate in level, evidence of a treatment
    effect. Ties across arms are ranked treatment-first and reported with a
    warning; the test assumes continuous outcomes.
    """
    if alternative not in ("two_sided", "low_runs"):
        raise ValueError("alternative must be 'two_sided' or 'low_runs'")
    t = np.asarray(outcomes_treat, dtype=np.float64).ravel()
    ctrl = np.asarray(outcomes_ctrl, dtype=np.float64).ravel()
    if t.size == 0 or ctrl.size == 0:
        raise ValueError("both outcome lists must be non-empty")
    if not (np.isfinite(t).all() and np.isfinite(ctrl).all()):
        raise ValueError("outcomes must be finite")
    values = np.concatenate([t, ctrl])
    labels = np.concatenate([np.zeros(t.size, dtype=np.int8), np.ones(ctrl.size, dtype=np.int8)])
    if np.ptp(values) == 0.0:
        raise ValueError("all outcomes are tied; the run test is degenerate")
    shared = np.intersect1d(t, ctrl)
    if shared.size:
        warnings.warn(
            f"{shared.size} outcome value(s) tied across arms; ties ranked treatment-first",
            stacklevel=2,
        )
    order = np.lexsort((labels, -values))
    symbols = labels[order]
    r = int(1 + (np.diff(symbols) != 0).sum())
    u, v = int(t.size), int(ctrl.size)
    total = u + v
    expected = 2.0 * u * v / total + 1.0
    var = 2.0 * u * v * (2.0 * u * v - u - v) / (total**2 * (total - 1))
    if var <= 0.0:
        raise ValueError("too few observations for the normal approximation")
    z = (r - expected) / math.sqrt(var)
    if alternative == "two_sided":
        p = 2.0 * float(_norm.sf(abs(z)))
    else:
        p = float(_norm.cdf(z))
    return RunTestResult(r, u, v, expected, var, z, p, p < significance)


def erl_estimate(outcomes, exposures, exposure_means, exposure_vars):
    """Exposure-reweighted linear ATE: (2/n) sum y_i (x_i - E x_i) / Var x_i."""
    y = np.asarray(outcomes, dtype=np.float64).ravel()
    x = np.asarray(exposures, dtype=np.float64).ravel()
    mu = np.asarray(exposure_means, dtype=np.float64).ravel()
    var = np.asarray(exposure_vars, dtype=np.float64).ravel()
    if not (y.shape == x.shape == mu.shape == var.shape) or y.size == 0:
        raise ValueError("all inputs must be non-empty and the same length")
    if (var <= 0.0).any():
        raise ValueError("exposure variances must be positive")
    return float(2.0 / y.size * (y * (x - mu) / var).sum())
