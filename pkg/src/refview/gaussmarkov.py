"""When does in-network synthesis pay off: a Gauss-Markov chain analysis.

Views form a first-order chain where each view adds an independent zero-mean
Gaussian innovation to its neighbor. The precision (inverse covariance)
matrix of such a chain is tridiagonal with a closed form, and conditioning
keeps the corresponding principal block. Composing a new mid-chain reference
from its two neighbors reduces the noise variance it forwards, which is the
whole argument for synthesizing references at the network edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import IndexOutOfRange


@dataclass(frozen=True)
class GMChain:
    """First-order Gaussian chain given by its innovation variances.

    Entry v (1-based, v = 1..N) is the variance of the step from view v-1 to
    view v; the first entry is the marginal variance of view 1.
    """

    sigmas_sq: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.sigmas_sq) < 2:
            raise IndexOutOfRange("chain needs at least two views")
        if any(s <= 0 for s in self.sigmas_sq):
            raise IndexOutOfRange("innovation variances must be strictly positive")

    @property
    def n(self) -> int:
        return len(self.sigmas_sq)


def chain(sigmas_sq: Sequence[float]) -> GMChain:
    return GMChain(tuple(float(s) for s in sigmas_sq))


def precision_matrix(gm: GMChain) -> np.ndarray:
    """Exact tridiagonal precision matrix of the chain.

    Diagonal entry v is 1/sigma_v^2 + 1/sigma_{v+1}^2 (just 1/sigma_N^2 for
    the last view); the off-diagonals next to entry v are -1/sigma_{v+1}^2.
    """
    n = gm.n
    inv = np.array([1.0 / s for s in gm.sigmas_sq])
    q = np.zeros((n, n))
    for v in range(n):
        q[v, v] = inv[v] + (inv[v + 1] if v + 1 < n else 0.0)
        if v + 1 < n:
            q[v, v + 1] = -inv[v + 1]
            q[v + 1, v] = -inv[v + 1]
    return q


def covariance_matrix(gm: GMChain) -> np.ndarray:
    """Covariance built from the chain's unit-lower-bidiagonal structure;
    numerically the inverse of precision_matrix (used as a cross-check)."""
    n = gm.n
    f = np.eye(n)
    for v in range(1, n):
        f[v, v - 1] = -1.0
    finv = np.linalg.inv(f)
    return finv @ np.diag(gm.sigmas_sq) @ finv.T


def conditional_precision(gm: GMChain, target_indices: Iterable[int]) -> np.ndarray:
    """Precision of the target views given all the others.

    For a Gaussian, conditioning keeps the principal submatrix of the
    precision matrix, so this is a plain block read-off. Indices are 1-based
    chain positions.
    """
    idx = sorted(set(int(i) for i in target_indices))
    if not idx:
        raise IndexOutOfRange("target index set is empty")
    if idx[0] < 1 or idx[-1] > gm.n:
        raise IndexOutOfRange(f"indices {idx} outside 1..{gm.n}")
    q = precision_matrix(gm)
    sel = [i - 1 for i in idx]
    return q[np.ix_(sel, sel)]


def compare_synth_vs_direct(sigma2_sq: float, sigma3_sq: float, sigma4_sq: float) -> tuple[float, float]:
    """Precision of view 2 under the two delivery strategies on a 4-view chain.

    q_synth: views 1 and a mid-chain reference synthesized from views 2 and 4
    are delivered, so the right-hand noise variance shrinks to the parallel
    combination of sigma_3^2 and sigma_4^2 before the final hop.
    q_direct: views 1 and 4 are delivered and the right-hand path accumulates
    both step variances. q_synth >= q_direct for all positive variances, with
    equality only in the limit of an uninformative view 3.
    """
    if sigma2_sq <= 0 or sigma3_sq <= 0 or sigma4_sq <= 0:
        raise IndexOutOfRange("variances must be strictly positive")
    pooled = 1.0 / (1.0 / sigma3_sq + 1.0 / sigma4_sq)
    q_synth = 1.0 / sigma2_sq + 1.0 / (sigma3_sq + pooled)
    q_direct = 1.0 / sigma2_sq + 1.0 / (sigma3_sq + sigma4_sq)
    return q_synth, q_direct


def sample_chain(gm: GMChain, n_samples: int, rng: np.random.Generator) -> np.ndarray:
    """Draw chain realizations, one row per sample, columns are views 1..N."""
    steps = rng.standard_normal((n_samples, gm.n)) * np.sqrt(np.asarray(gm.sigmas_sq))
    return np.cumsum(steps, axis=1)


def mc_conditional_variance(targets: np.ndarray, given: np.ndarray) -> float:
    """Residual variance of targets after the best linear fit on given columns.

    For jointly Gaussian samples this estimates the conditional variance, so
    it serves as an independent check of the closed-form precisions.
    """
    x = np.column_stack([np.ones(len(targets)), given])
    coef, *_ = np.linalg.lstsq(x, targets, rcond=None)
    resid = targets - x @ coef
    return float(resid @ resid) / (len(targets) - x.shape[1])
