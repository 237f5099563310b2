"""Linear structural equation models with Gaussian noise.

X = A X + eps with A strictly lower triangular in the declared variable
order, so Sigma = (I - A)^-1 Sigma_eps (I - A)^-T. Severing an edge set S
splits A = A_S + A_rest; each severed coefficient is fed an independent copy
of its parent (variance = the parent's observational variance), giving

    Sigma_eps' = Sigma_eps + A_S diag(Sigma) A_S^T,
    Sigma_S    = (I - A_rest)^-1 Sigma_eps' (I - A_rest)^-T.

Closed-form Gaussian divergences compare the observational and intervened
distributions. Edges are (parent, child) pairs, 0-indexed in code.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import solve_triangular

from .influence import InfluenceResult

__all__ = [
    "LinearSem",
    "GaussianDist",
    "observational_cov",
    "intervened_cov",
    "gaussian_hellinger_sq",
    "gaussian_kl",
    "sem_kpartite_aci",
]


class LinearSem:
    __slots__ = ("n", "a_matrix", "noise_vars", "noise_means", "partition")

    def __init__(self, a_matrix, noise_vars, noise_means=None, partition=None):
        a = np.array(a_matrix, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("coefficient matrix must be square")
        n = a.shape[0]
        if np.triu(a).any():
            i, j = (int(v) for v in np.argwhere(np.triu(a))[0])
            raise ValueError(
                f"coefficient matrix must be strictly lower triangular; "
                f"A[{i + 1}][{j + 1}] is nonzero"
            )
        noise_vars = np.array(noise_vars, dtype=np.float64)
        if noise_vars.shape != (n,) or (noise_vars <= 0).any():
            raise ValueError("noise variances must be positive, one per variable")
        if noise_means is None:
            noise_means = np.zeros(n)
        noise_means = np.array(noise_means, dtype=np.float64)
        if noise_means.shape != (n,):
            raise ValueError("noise means must have one entry per variable")
        if partition is not None:
            layer = partition.assignment
            if len(layer) != n:
                raise ValueError("partition assignment length differs from variable count")
            for c, p in zip(*np.nonzero(a)):
                if layer[p] >= layer[c]:
                    raise ValueError(
                        f"coefficient {p + 1} -> {c + 1} does not ascend the layers"
                    )
        for arr in (a, noise_vars, noise_means):
            arr.setflags(write=False)
        self.n = n
        self.a_matrix = a
        self.noise_vars = noise_vars
        self.noise_means = noise_means
        self.partition = partition

    def edges(self):
        return [(int(p), int(c)) for c, p in zip(*np.nonzero(self.a_matrix))]


class GaussianDist:
    __slots__ = ("mean", "cov")

    def __init__(self, mean, cov):
        mean = np.array(mean, dtype=np.float64)
        cov = np.array(cov, dtype=np.float64)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or mean.shape != (cov.shape[0],):
            raise ValueError("mean and covariance shapes disagree")
        if np.abs(cov - cov.T).max() > 1e-10:
            raise ValueError("covariance must be symmetric")
        cov = 0.5 * (cov + cov.T)
        if np.linalg.eigvalsh(cov).min() <= 0.0:
            raise ValueError("covariance must be positive definite")
        mean.setflags(write=False)
        cov.setflags(write=False)
        self.mean = mean
        self.cov = cov

    @property
    def dim(self):
        return self.mean.shape[0]


def _solve_system(a_rest, noise_cov, noise_mean):
    n = a_rest.shape[0]
    lower = np.eye(n) - a_rest
    t1 = solve_triangular(lower, noise_cov, lower=True, unit_diagonal=True)
    cov = solve_triangular(lower, t1.T, lower=True, unit_diagonal=True).T
    mean = solve_triangular(lower, noise_mean, lower=True, unit_diagonal=True)
    return GaussianDist(mean, 0.5 * (cov + cov.T))


def observational_cov(sem):
    """Observational Gaussian: Sigma = (I - A)^-1 Sigma_eps (I - A)^-T."""
    return _solve_system(sem.a_matrix, np.diag(sem.noise_vars), sem.noise_means)


def _edge_mask(sem, edges):
    mask = np.zeros_like(sem.a_matrix, dtype=bool)
    for p, c in edges:
        p, c = int(p), int(c)
        if not (0 <= p < sem.n and 0 <= c < sem.n) or sem.a_matrix[c, p] == 0.0:
            raise ValueError(f"edge {p + 1} -> {c + 1} not present in the model")
        mask[c, p] = True
    return mask


def intervened_cov(sem, edges):
    """Gaussian after severing `edges` and feeding independent parent copies."""
    mask = _edge_mask(sem, edges)
    obs = observational_cov(sem)
    a_cut = np.where(mask, sem.a_matrix, 0.0)
    a_rest = sem.a_matrix - a_cut
    noise_cov = np.diag(sem.noise_vars) + a_cut @ np.diag(np.diag(obs.cov)) @ a_cut.T
    noise_mean = sem.noise_means + a_cut @ obs.mean
    return _solve_system(a_rest, noise_cov, noise_mean)


def _sym_solve(cov, rhs):
    return np.linalg.solve(cov, rhs)


def gaussian_hellinger_sq(p, q):
    """Squared Hellinger divergence between Gaussians, in [0, 1].

    1 - |S1|^(1/4) |S2|^(1/4) / |(S1+S2)/2|^(1/2) * exp(-(1/8) dm' Sbar^-1 dm).
    """
    if p.dim != q.dim:
        raise ValueError("dimension mismatch")
    sbar = 0.5 * (p.cov + q.cov)
    _, ld1 = np.linalg.slogdet(p.cov)
    _, ld2 = np.linalg.slogdet(q.cov)
    _, ldb = np.linalg.slogdet(sbar)
    dm = p.mean - q.mean
    quad = float(dm @ _sym_solve(sbar, dm))
    bc = math.exp(0.25 * ld1 + 0.25 * ld2 - 0.5 * ldb - 0.125 * quad)
    return min(max(1.0 - bc, 0.0), 1.0)


def gaussian_kl(p, q):
    """KL(P || Q) between Gaussians, in nats."""
    if p.dim != q.dim:
        raise ValueError("dimension mismatch")
    _, ldp = np.linalg.slogdet(p.cov)
    _, ldq = np.linalg.slogdet(q.cov)
    dm = p.mean - q.mean
    trace = float(np.trace(_sym_solve(q.cov, p.cov)))
    quad = float(dm @ _sym_solve(q.cov, dm))
    return 0.5 * (ldq - ldp - p.dim + trace + quad)


_SEM_FAMILIES = {"kl": gaussian_kl, "hellinger_sq": gaussian_hellinger_sq, "h2": gaussian_hellinger_sq}


def sem_kpartite_aci(sem, edges, family="kl", grouping="target"):
    """Layered average causal influence for a SEM.

    Edges are grouped per (layer, target) by default (or one group per edge
    with grouping="edge"); each group's term compares the observational
    Gaussian against the covariance with only that group severed. The aci
    field averages the group terms over |S|.
    """
    if sem.partition is None:
        raise ValueError("the SEM carries no layer partition")
    if family not in _SEM_FAMILIES:
        raise ValueError(f"unsupported family {family!r} (kl or hellinger_sq)")
    if grouping not in ("target", "edge"):
        raise ValueError("grouping must be 'target' or 'edge'")
    divergence = _SEM_FAMILIES[family]
    edges = sorted({(int(p), int(c)) for p, c in edges})
    _edge_mask(sem, edges)  # validation
    if not edges:
        return InfluenceResult(0.0, {}, "exact_sum", 0.0, {})
    obs = observational_cov(sem)
    layer = sem.partition.assignment
    groups = {}
    for p, c in edges:
        key = (layer[c], c) if grouping == "target" else (layer[c], c, p)
        groups.setdefault(key, []).append((p, c))
    per_target = {}
    per_layer = {}
    total = 0.0
    for key in sorted(groups):
        group_edges = groups[key]
        term = divergence(obs, intervened_cov(sem, group_edges))
        label = key[1] + 1 if grouping == "target" else f"{key[2] + 1}->{key[1] + 1}"
        per_target[label] = term
        per_layer.setdefault(key[0], {})[label] = term
        total += term
    return InfluenceResult(total, per_target, "exact_sum", total / len(edges), per_layer)
