"""Synthetic inputs for scaling studies: hash-keyed edge maps, equicorrelated
covariance matrices, and discrete tables with a prescribed mean correlation.

Edge maps let the graph searches run at sizes where a real distribution is
unaffordable. Each edge value is a deterministic function of (attacked
tuple, removed tuple, child prior set), so the full and pruned searches see
byte-identical weights without materializing 2^n entries.
"""

from __future__ import annotations

import math
import warnings
from itertools import combinations

import numpy as np
from scipy.special import betaincinv

from .errors import InfeasibleCorrelation
from .model_discrete import JointDistribution, pearson_corr

_MIX = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def splitmix64(x):
    """SplitMix64 finalizer on uint64 scalars or arrays (wrapping arithmetic)."""
    z = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = z + _MIX
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        z = z ^ (z >> np.uint64(31))
    return z


class EdgeMap:
    """Deterministic synthetic edge weights with mean magnitude aver_corr.

    The edge for (i, child prior K, removed j) hashes the triple, maps the
    hash to a uniform variate, and applies the Beta(alpha, alpha(1-m)/m)
    quantile scaled by `scale`, where m = |aver_corr|; the Beta mean is
    exactly m for any alpha, so edge magnitudes average m * scale. The sign
    of aver_corr is the sign of every edge. m = 0 yields all-zero edges and
    m = 1 the constant sign * scale.

    alpha sets the edge spread (variance m^2 (1-m) / (alpha + m)). Pruned
    search overestimates the min-merged leakage by an amount that grows
    with that spread, so the default keeps the edges concentrated: at
    alpha=512 the pruned result lands within about 5% of the exhaustive
    one on 15-tuple graphs, versus over 100% for loose shapes like
    alpha=2. Pass a smaller alpha to stress pruning error deliberately.
    """

    def __init__(
        self,
        n: int,
        aver_corr: float,
        seed: int = 0,
        scale: float = 1.0,
        alpha: float = 512.0,
    ):
        if n < 1:
            raise ValueError("n must be >= 1")
        if not -1.0 <= aver_corr <= 1.0:
            raise ValueError("aver_corr must lie in [-1, 1]")
        if scale <= 0:
            raise ValueError("scale must be positive")
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        if n > 50:
            raise ValueError("edge keys support n <= 50")
        self.n = int(n)
        self.aver_corr = float(aver_corr)
        self.seed = int(seed)
        self.scale = float(scale)
        self.alpha = float(alpha)
        self._sign = math.copysign(1.0, aver_corr) if aver_corr else 0.0
        self._m = abs(aver_corr)
        self._base = splitmix64(np.uint64(self.seed & 0xFFFFFFFFFFFFFFFF))

    def values(self, i: int, child_masks: np.ndarray, j: int) -> np.ndarray:
        """Vectorized lookup; child_masks are bitmasks of the child's K."""
        if not (0 <= i < self.n and 0 <= j < self.n and i != j):
            raise ValueError("tuple indices out of range")
        masks = np.asarray(child_masks, dtype=np.uint64)
        if self._m == 0.0:
            return np.zeros(masks.shape)
        if self._m == 1.0:
            return np.full(masks.shape, self._sign * self.scale)
        key = (masks << np.uint64(12)) | np.uint64((i << 6) | j)
        h = splitmix64(key ^ self._base)
        u = ((h >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
        b = self.alpha * (1.0 - self._m) / self._m
        return self._sign * self.scale * betaincinv(self.alpha, b, u)

    def __call__(self, i: int, prior: tuple[int, ...], j: int) -> float:
        """Scalar lookup by explicit child prior set."""
        if j not in prior:
            raise ValueError("removed tuple j must belong to the child prior")
        mask = 0
        for t in prior:
            if not 0 <= t < self.n or t == i:
                raise ValueError("invalid prior set")
            mask |= 1 << t
        return float(self.values(i, np.asarray([mask], dtype=np.uint64), j)[0])


def gen_whg_edges(
    n: int, aver_corr: float, seed: int = 0, scale: float = 1.0, alpha: float = 512.0
) -> tuple[EdgeMap, dict[int, float]]:
    """Edge map plus homogeneous first-layer values (scale per attack).

    scale plays the role of GS/lam: strongest-adversary leakage and the
    edge magnitude unit.
    """
    edges = EdgeMap(n, aver_corr, seed=seed, scale=scale, alpha=alpha)
    return edges, {i: scale for i in range(n)}


def gen_covariance(n: int, aver_coeff: float, seed: int | None = None) -> np.ndarray:
    """Equicorrelated covariance: unit off-diagonals, diagonal 1/|aver_coeff|.

    Every pair then has correlation exactly aver_coeff. aver_coeff = 0 gives
    the identity matrix. Negative values are only feasible (positive
    semidefinite) for |aver_coeff| <= 1/(n-1); beyond that the requested
    matrix is not a covariance and InfeasibleCorrelation reports the range.
    `seed` is accepted for interface symmetry; the construction is
    deterministic.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not -1.0 <= aver_coeff <= 1.0:
        raise ValueError("aver_coeff must lie in [-1, 1]")
    if aver_coeff == 0.0 or n == 1:
        return np.eye(n)
    if aver_coeff < 0 and abs(aver_coeff) > 1.0 / (n - 1) + 1e-12:
        raise InfeasibleCorrelation(
            f"negative equicorrelation needs |aver_coeff| <= 1/(n-1) = "
            f"{1.0 / (n - 1):.6g} for n={n}, got {aver_coeff}"
        )
    sigma = np.full((n, n), math.copysign(1.0, aver_coeff))
    np.fill_diagonal(sigma, 1.0 / abs(aver_coeff))
    return sigma


def _orientations(n: int, negative: bool) -> np.ndarray:
    if not negative:
        return np.ones(n)
    # alternate signs; a balanced split minimizes the mean pairwise product
    return np.asarray([1.0 if t % 2 == 0 else -1.0 for t in range(n)])


def _mixture_table(n: int, s: int, w: float, orient: np.ndarray) -> np.ndarray:
    probs = np.full((s,) * n, (1.0 - w) / s**n)
    idx = np.arange(s)
    for v in range(s):
        cell = tuple(idx[v] if o > 0 else idx[s - 1 - v] for o in orient)
        probs[cell] += w / s
    return probs


def mean_pairwise_corr(dist: JointDistribution) -> float:
    """Average Pearson correlation over all tuple pairs."""
    pairs = list(combinations(range(dist.n), 2))
    if not pairs:
        raise ValueError("need at least two tuples")
    return float(np.mean([pearson_corr(dist, i, j) for i, j in pairs]))


def gen_discrete_corr(
    n: int, target_corr: float, domain_size: int, seed: int | None = None
) -> JointDistribution:
    """Joint table over domains {0..domain_size-1}^n with mean pairwise
    Pearson correlation steered to target_corr.

    The core is a mixture (1-w) * uniform + w * comonotone-diagonal, whose
    pairwise correlation is exactly w (marginals stay uniform under both
    components). Negative targets use the antitone diagonal for n = 2; for
    n >= 3 signs alternate across tuples, which caps the reachable mean at
    about -1/3, so far-negative targets are best-effort and raise a warning
    when the miss exceeds 0.1. A seed adds a small positive jitter table
    (skipped at |target| = 1 to preserve the exact degenerate table) and the
    mixture weight is re-tuned against the measured correlation.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if domain_size < 2:
        raise ValueError("domain_size must be >= 2")
    if not -1.0 <= target_corr <= 1.0:
        raise ValueError("target_corr must lie in [-1, 1]")
    domains = [np.arange(domain_size, dtype=float) for _ in range(n)]
    orient = _orientations(n, target_corr < 0)
    pair_mean = float(
        np.mean([orient[i] * orient[j] for i, j in combinations(range(n), 2)])
    )
    jitter = None
    if seed is not None and abs(target_corr) < 1.0:
        rng = np.random.default_rng(seed)
        jitter = rng.uniform(0.5, 1.5, (domain_size,) * n)
        jitter /= jitter.sum()

    def build(w: float) -> JointDistribution:
        probs = _mixture_table(n, domain_size, w, orient)
        if jitter is not None:
            eps = 0.02 * (1.0 - w)
            probs = (1.0 - eps) * probs + eps * jitter
        return JointDistribution(domains, probs)

    # without jitter the mean correlation is exactly w * pair_mean
    w = min(1.0, abs(target_corr) / abs(pair_mean)) if pair_mean else 0.0
    dist = build(w)
    if jitter is not None:
        lo, hi = 0.0, 1.0
        for _ in range(500):
            got = mean_pairwise_corr(dist)
            if abs(got - target_corr) <= 1e-9:
                break
            if (got - target_corr) * math.copysign(1.0, pair_mean) > 0:
                hi = w
            else:
                lo = w
            w = 0.5 * (lo + hi)
            dist = build(w)
    achieved = mean_pairwise_corr(dist)
    if abs(achieved - target_corr) > 0.1:
        warnings.warn(
            f"mean pairwise correlation {achieved:.3f} misses target "
            f"{target_corr:.3f}; the sign pattern caps the reachable range",
            stacklevel=2,
        )
    return dist
