"""phi-divergences over discrete distributions.

D_phi(P || Q) = sum_i q_i phi(p_i / q_i) for convex phi with phi(1) = 0.
All divergences are in nats. Zero-probability conventions: a state with
p_i = q_i = 0 contributes nothing; q_i = 0 < p_i contributes
p_i * lim_{t->inf} phi(t)/t, which is infinite for KL and chi^2 but finite
for total variation and squared Hellinger.

The power family is generated by

    phi_lambda(t) = (t^(lambda+1) - t - lambda (t - 1)) / (lambda (lambda+1)),

with the lambda -> 0 and lambda -> -1 limits t log t - (t - 1) and
-log t + (t - 1) (forward and reverse KL). The directed family of exponent
beta uses the normalization 1 / (2^(beta-1) - 1); this is the constant that
makes the power/directed conversion identity exact and gives a finite
beta -> 1 limit (KL measured in bits). For beta <= 0 the generator is no
longer convex and the value may be negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DivergenceSpec",
    "ClosenessReport",
    "InequalityChain",
    "phi_divergence",
    "power_divergence",
    "directed_divergence",
    "power_phi",
    "inequality_chain",
    "closeness",
    "CLASSIC_TEST_LAMBDAS",
]

# Conventional power-family exponents for the classic goodness-of-fit
# statistics. Caveat: the log-likelihood-ratio statistic G^2 is frequently
# associated with the lambda -> 0 limit instead; both limits are implemented,
# this table keeps the -1 assignment used by the layered-testing pipeline.
CLASSIC_TEST_LAMBDAS = {
    "pearson_chi_sq": 1.0,
    "neyman_modified_chi_sq": -2.0,
    "log_likelihood_ratio": -1.0,
    "freeman_tukey": -0.5,
}

_FAMILIES = ("kl", "hellinger_sq", "total_variation", "chi_sq", "power", "directed", "custom")


@dataclass(frozen=True)
class DivergenceSpec:
    family: str
    lam: float = None
    beta: float = None
    phi_func: object = None
    custom_tail: float = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown divergence family {self.family!r}")

    @classmethod
    def kl(cls):
        return cls("kl")

    @classmethod
    def hellinger_sq(cls):
        return cls("hellinger_sq")

    @classmethod
    def total_variation(cls):
        return cls("total_variation")

    @classmethod
    def chi_sq(cls):
        return cls("chi_sq")

    @classmethod
    def power(cls, lam):
        return cls("power", lam=float(lam))

    @classmethod
    def directed(cls, beta):
        return cls("directed", beta=float(beta))

    @classmethod
    def custom(cls, phi_func, tail=None):
        return cls("custom", phi_func=phi_func, custom_tail=tail)

    @classmethod
    def from_name(cls, name, lam=None, beta=None):
        name = name.lower()
        aliases = {
            "kl": cls.kl,
            "h2": cls.hellinger_sq,
            "hellinger_sq": cls.hellinger_sq,
            "tv": cls.total_variation,
            "total_variation": cls.total_variation,
            "chi2": cls.chi_sq,
            "chi_sq": cls.chi_sq,
        }
        if name in aliases:
            return aliases[name]()
        if name == "power":
            if lam is None:
                raise ValueError("power family needs lambda")
            return cls.power(lam)
        if name == "directed":
            if beta is None:
                raise ValueError("directed family needs beta")
            return cls.directed(beta)
        raise ValueError(f"unknown divergence family {name!r}")

    def phi(self, t):
        """The generating convex function, vectorized over t >= 0."""
        t = np.asarray(t, dtype=np.float64)
        if self.family == "kl":
            with np.errstate(divide="ignore", invalid="ignore"):
                out = t * np.log(t)
            return np.where(t == 0.0, 0.0, out)
        if self.family == "hellinger_sq":
            return 0.5 * (np.sqrt(t) - 1.0) ** 2
        if self.family == "total_variation":
            return 0.5 * np.abs(t - 1.0)
        if self.family == "chi_sq":
            return (t - 1.0) ** 2
        if self.family == "power":
            return power_phi(self.lam, t)
        if self.family == "directed":
            return (t**self.beta - t) / (2.0 ** (self.beta - 1.0) - 1.0)
        return self.phi_func(t)

    def tail_slope(self):
        """lim_{t -> inf} phi(t)/t: the weight of mass where q vanishes."""
        if self.family in ("kl", "chi_sq"):
            return math.inf
        if self.family in ("hellinger_sq", "total_variation"):
            return 0.5
        if self.family == "power":
            lam = self.lam
            if lam >= 0.0:
                return math.inf
            if lam == -1.0:
                return 1.0
            return (-1.0 - lam) / (lam * (lam + 1.0))
        if self.family == "directed":
            den = 2.0 ** (self.beta - 1.0) - 1.0
            return math.inf if self.beta > 1.0 else -1.0 / den
        if self.custom_tail is not None:
            return self.custom_tail
        t = 1e12
        return float(self.phi_func(t) / t)

    def divergence(self, p, q):
        return phi_divergence(self, p, q)


def _pair(p, q):
    if hasattr(p, "probs"):
        if hasattr(q, "probs") and p.scope != q.scope:
            raise ValueError("distributions must share a scope")
        p = p.probs
    if hasattr(q, "probs"):
        q = q.probs
    p = np.asarray(p, dtype=np.float64).ravel()
    q = np.asarray(q, dtype=np.float64).ravel()
    if p.shape != q.shape:
        raise ValueError("distributions must share a state space")
    for v in (p, q):
        if (v < -1e-12).any():
            raise ValueError("probabilities must be non-negative")
        if abs(v.sum() - 1.0) > 1e-6:
            raise ValueError("probabilities must sum to 1")
    return np.clip(p, 0.0, None), np.clip(q, 0.0, None)


def phi_divergence(spec, p, q):
    """D_phi(P || Q); built-in families use their closed forms."""
    p, q = _pair(p, q)
    fam = spec.family
    if fam == "kl":
        if (q[p > 0] == 0.0).any():
            return math.inf
        mask = p > 0
        return float((p[mask] * np.log(p[mask] / q[mask])).sum())
    if fam == "hellinger_sq":
        return float(0.5 * ((np.sqrt(p) - np.sqrt(q)) ** 2).sum())
    if fam == "total_variation":
        return float(0.5 * np.abs(p - q).sum())
    if fam == "chi_sq":
        if (q[p > 0] == 0.0).any():
            return math.inf
        mask = q > 0
        return float(((p[mask] - q[mask]) ** 2 / q[mask]).sum())
    if fam == "power":
        return power_divergence(spec.lam, p, q)
    if fam == "directed":
        return directed_divergence(spec.beta, p, q)
    # generic path for custom generators
    total = 0.0
    mask = q > 0
    if mask.any():
        vals = q[mask] * np.asarray(spec.phi(p[mask] / q[mask]), dtype=np.float64)
        total += float(vals.sum())
    stranded = p[(q == 0.0) & (p > 0.0)].sum()
    if stranded > 0.0:
        slope = spec.tail_slope()
        if math.isinf(slope):
            return math.inf
        total += float(stranded) * slope
    return total


def power_phi(lam, t):
    """Generator of the power family, with the 0 and -1 limit branches."""
    t = np.asarray(t, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        if lam == 0.0:
            out = t * np.log(t) - (t - 1.0)
            return np.where(t == 0.0, 1.0, out)
        if lam == -1.0:
            out = -np.log(t) + (t - 1.0)
            return np.where(t == 0.0, np.inf, out)
        out = (t ** (lam + 1.0) - t - lam * (t - 1.0)) / (lam * (lam + 1.0))
    if lam < -1.0:
        out = np.where(t == 0.0, np.inf, out)
    else:
        out = np.where(t == 0.0, 1.0 / (lam + 1.0), out)
    return out


def power_divergence(lam, p, q):
    """Power divergence I^lambda(P || Q) in nats.

    Evaluated as the phi-divergence of its generator, so the zero conventions
    match the generic framework state for state. lambda = 1 gives chi^2 / 2;
    the 0 and -1 branches are the forward and reverse KL limits.
    """
    p, q = _pair(p, q)
    lam = float(lam)
    pos = q > 0
    stranded = float(p[~pos].sum())  # p-mass on states where q = 0
    if lam == 0.0:
        if stranded > 0.0:
            return math.inf
        mask = pos & (p > 0)
        return float((p[mask] * np.log(p[mask] / q[mask])).sum())
    if lam == -1.0:
        if (q[p == 0.0] > 0.0).any():
            return math.inf
        mask = pos & (p > 0)
        return float((q[mask] * np.log(q[mask] / p[mask])).sum())
    if stranded > 0.0 and lam > 0.0:
        return math.inf
    if lam < -1.0 and ((p == 0.0) & pos).any():
        return math.inf
    c = lam * (lam + 1.0)
    pm, qm = p[pos], q[pos]
    with np.errstate(divide="ignore", invalid="ignore"):
        core = (pm ** (lam + 1.0)) * (qm**-lam) - pm - lam * (pm - qm)
    core = np.where(pm == 0.0, lam * qm, core)  # phi(0) = lambda/c per state
    total = float(core.sum()) / c
    if stranded > 0.0:
        total += stranded * (-1.0 - lam) / c
    return total


def directed_divergence(beta, p, q):
    """Directed divergence of exponent beta.

    (sum_i p_i^beta q_i^(1-beta) - 1) / (2^(beta-1) - 1) for beta != 1; the
    beta -> 1 limit is KL / ln 2 and is dispatched automatically.
    """
    p, q = _pair(p, q)
    beta = float(beta)
    if beta == 1.0:
        kl = phi_divergence(DivergenceSpec.kl(), p, q)
        return kl / math.log(2.0)
    den = 2.0 ** (beta - 1.0) - 1.0
    both = (p > 0) & (q > 0)
    if beta > 1.0 and ((q == 0.0) & (p > 0.0)).any():
        return math.inf
    if beta < 0.0 and ((p == 0.0) & (q > 0.0)).any():
        return math.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        s = float(((p[both] ** beta) * (q[both] ** (1.0 - beta))).sum())
    return (s - 1.0) / den


@dataclass(frozen=True)
class InequalityChain:
    tv: float
    hellinger_dist: float  # sqrt of the squared Hellinger divergence
    sqrt_kl: float
    holds: bool


def inequality_chain(p, q):
    """Evaluate TV <= sqrt(2) H <= sqrt(KL) where H = sqrt(D_H2), KL in nats."""
    tv = phi_divergence(DivergenceSpec.total_variation(), p, q)
    h = math.sqrt(phi_divergence(DivergenceSpec.hellinger_sq(), p, q))
    kl = phi_divergence(DivergenceSpec.kl(), p, q)
    sqrt_kl = math.sqrt(kl) if not math.isinf(kl) else math.inf
    tol = 1e-12
    holds = tv <= math.sqrt(2.0) * h + tol and math.sqrt(2.0) * h <= sqrt_kl + tol
    return InequalityChain(tv, h, sqrt_kl, holds)


@dataclass(frozen=True)
class ClosenessReport:
    epsilon: float
    one_sided: bool
    two_sided: bool
    worst_state: int
    worst_ratio: float


def closeness(p, q, eps):
    """State-ratio closeness: one-sided if every p_i/q_i < 1 + eps, two-sided
    if additionally every ratio exceeds 1 - eps. States with p = q = 0 are
    skipped; p > 0 on a q-null state makes the ratio infinite."""
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    p, q = _pair(p, q)
    live = (p > 0) | (q > 0)
    if not live.any():
        raise ValueError("empty support")
    idx = np.flatnonzero(live)
    with np.errstate(divide="ignore"):
        ratios = np.where(q[idx] > 0, p[idx] / np.where(q[idx] > 0, q[idx], 1.0), np.inf)
    max_ratio = float(ratios.max())
    min_ratio = float(ratios.min())
    one_sided = max_ratio < 1.0 + eps
    two_sided = one_sided and min_ratio > 1.0 - eps
    with np.errstate(divide="ignore"):
        deviation = np.maximum(ratios, np.where(ratios > 0, 1.0 / ratios, np.inf))
    worst = int(np.argmax(deviation))
    return ClosenessReport(
        float(eps), one_sided, two_sided, int(idx[worst]), float(ratios[worst])
    )
