"""Closed-form leakage for continuous data under a multivariate Gaussian model.

For x ~ N_n(mu, Sigma) and the Laplace-perturbed sum query, an adversary
attacking tuple i with prior knowledge of the tuples in K faces output
densities that are Laplace kernels convolved with the Gaussian law of the
sum of the unknown tuples given (x_i, x_K). That conditional sum is
N(mu0, sigma0^2) with mu0 affine in the conditioning values; writing mu0i
for the coefficient of x_i inside mu0, the leakage has the closed form

    l = (M / lambda) * |1 + mu0i|

where M bounds |x_i - x_i'|. The convolution kernel itself is

    G(x; b) = e^x (1 - Phi(x/b + b)) + e^{-x} Phi(x/b - b),

whose log-slope is bounded in (-1, 1) and saturates at the tails, which is
what makes the supremum over outputs equal the closed form above.

Indices are 0-based. Covariances may be positive SEMIdefinite: perfectly
correlated models are legal inputs and flow through the sigma0 = 0 branch;
blocks are only required to be invertible where they are actually inverted.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError
from scipy.special import erfcx

from .errors import SearchSpaceExceeded, SingularConditioning
from .report import AdversaryNode, LeakageReport

_LN2 = math.log(2.0)
# erfcx(z) for z < -25 is computed from its leading term 2*exp(z^2); the
# dropped erfcx(-z) correction is below 1e-270 relative there, and direct
# evaluation would overflow past z ~ -26.6.
_ERFCX_SWITCH = -25.0


@dataclass(frozen=True, eq=False)
class GaussianModel:
    """Multivariate Gaussian database model.

    Parameters
    ----------
    mu : sequence of float
        Mean vector, length n.
    sigma : array_like, shape (n, n)
        Covariance matrix; symmetric, positive semidefinite.
    M : float
        Bound on |x_i - x_i'| between the two hypothesized values of the
        attacked tuple. Must be positive.
    lam : float
        Laplace noise scale, positive.
    """

    mu: tuple[float, ...]
    sigma: np.ndarray = field(repr=False)
    M: float = 1.0
    lam: float = 1.0

    def __post_init__(self) -> None:
        mu = tuple(float(v) for v in self.mu)
        object.__setattr__(self, "mu", mu)
        S = np.asarray(self.sigma, dtype=float)
        n = len(mu)
        if S.shape != (n, n):
            raise ValueError(f"sigma shape {S.shape} does not match len(mu)={n}")
        scale = max(1.0, float(np.abs(S).max()))
        if np.abs(S - S.T).max() > 1e-10 * scale:
            raise ValueError("sigma must be symmetric")
        S = (S + S.T) / 2.0
        if float(np.linalg.eigvalsh(S).min()) < -1e-12 * scale:
            raise ValueError("sigma must be positive semidefinite")
        S.flags.writeable = False
        object.__setattr__(self, "sigma", S)
        object.__setattr__(self, "M", float(self.M))
        object.__setattr__(self, "lam", float(self.lam))
        if self.M <= 0:
            raise ValueError("M must be positive")
        if self.lam <= 0:
            raise ValueError("lambda must be positive")

    @property
    def n(self) -> int:
        return len(self.mu)


@dataclass(frozen=True)
class Mu0Expansion:
    """Affine expansion of the conditional mean of the unknown-tuple sum.

    mu0 = mu00 + coef_i * x_i + sum_k coef_k[k] * x_k, and the conditional
    variance of the sum is sigma0_sq. With no unknown tuples the convention
    is coef_i = 0, sigma0_sq = 0 (the output is pure Laplace noise).
    """

    mu00: float
    coef_i: float
    coef_k: Mapping[int, float]
    sigma0_sq: float


def _solve_block(S_CC: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """S_CC^{-1} rhs via Cholesky; SingularConditioning if not invertible."""
    if S_CC.shape == (1, 1):
        if S_CC[0, 0] <= 0.0:
            raise SingularConditioning("conditioning block is singular")
        return rhs / S_CC[0, 0]
    try:
        return cho_solve(cho_factor(S_CC, lower=True), rhs)
    except (LinAlgError, np.linalg.LinAlgError) as exc:
        raise SingularConditioning(f"conditioning block is singular: {exc}") from exc


def conditional_gaussian(
    model: GaussianModel,
    known_idx: Iterable[int],
    known_vals: Sequence[float],
) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian conditioning on exact values of a subset of tuples.

    Returns (mean, cov) of the remaining tuples (sorted index order):
    mean = mu_1 + S_12 S_22^{-1} (v - mu_2), cov = S_11 - S_12 S_22^{-1} S_21.

    Raises SingularConditioning when the known block is not invertible.
    """
    known = sorted(set(int(k) for k in known_idx))
    vals = np.asarray(list(known_vals), dtype=float)
    if len(known) != vals.size:
        raise ValueError("known_idx and known_vals lengths differ")
    unknown = [u for u in range(model.n) if u not in known]
    mu = np.asarray(model.mu)
    S = model.sigma
    if not known:
        return mu.copy(), S.copy()
    if not unknown:
        return np.empty(0), np.empty((0, 0))
    S22 = S[np.ix_(known, known)]
    S12 = S[np.ix_(unknown, known)]
    S11 = S[np.ix_(unknown, unknown)]
    # first column solves the mean shift, remaining columns solve S_22^{-1} S_21
    t = _solve_block(S22, np.column_stack([vals - mu[known], S12.T]))
    mean = mu[unknown] + S12 @ t[:, 0]
    cov = S11 - S12 @ t[:, 1:]
    cov = (cov + cov.T) / 2.0
    return mean, cov


def mu0_expand(model: GaussianModel, i: int, K: Iterable[int]) -> Mu0Expansion:
    """Expand the conditional mean/variance of the unknown-tuple sum.

    The sum s_U of tuples outside {i} | K, conditioned on (x_i, x_K), is
    N(mu0, sigma0_sq); mu0 is affine in the conditioning values and its
    coefficients are extracted here by linearity.
    """
    i = int(i)
    ks = sorted(set(int(k) for k in K))
    if i in ks:
        raise ValueError("attacked tuple cannot be in the prior set")
    if i >= model.n or (ks and ks[-1] >= model.n):
        raise ValueError("tuple index out of range")
    cond = [i] + ks
    unknown = [u for u in range(model.n) if u not in cond]
    if not unknown:
        return Mu0Expansion(0.0, 0.0, {k: 0.0 for k in ks}, 0.0)
    S = model.sigma
    mu = np.asarray(model.mu)
    S_CC = S[np.ix_(cond, cond)]
    S_UC = S[np.ix_(unknown, cond)]
    c = S_UC.sum(axis=0)  # 1^T S_UC
    w = np.atleast_1d(_solve_block(S_CC, c))
    mu00 = float(mu[unknown].sum() - w @ mu[cond])
    sigma0_sq = float(S[np.ix_(unknown, unknown)].sum() - c @ w)
    return Mu0Expansion(
        mu00=mu00,
        coef_i=float(w[0]),
        coef_k={k: float(w[1 + pos]) for pos, k in enumerate(ks)},
        sigma0_sq=max(0.0, sigma0_sq),
    )


def leakage_gaussian(model: GaussianModel, i: int, K: Iterable[int]) -> float:
    """Exact leakage of adversary (i, K): (M / lambda) * |1 + mu0i|."""
    exp = mu0_expand(model, i, K)
    return model.M / model.lam * abs(1.0 + exp.coef_i)


def weakest_adversary_leakage(model: GaussianModel, i: int) -> float:
    """Leakage of the no-prior adversary: |1 + sum_{j!=i} S_ij / S_ii| M/lambda.

    Same arithmetic as leakage_gaussian(model, i, ()), written out because the
    one-known-tuple conditioning reduces to this single ratio.
    """
    S = model.sigma
    if S[i, i] <= 0.0:
        raise SingularConditioning("attacked tuple has zero variance")
    coef = (float(S[i, :].sum()) - float(S[i, i])) / float(S[i, i])
    return model.M / model.lam * abs(1.0 + coef)


def _log_erfcx(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = z < _ERFCX_SWITCH
    out[~small] = np.log(erfcx(z[~small]))
    out[small] = z[small] ** 2 + _LN2
    return out


def log_g(x, b):
    """log G(x; b), overflow-safe for all x.

    Both terms of G share the exponent -(x^2/b^2 + b^2)/2 once written with
    the scaled complementary error function, so the whole computation runs
    in log space:

    log G = -(x^2/b^2 + b^2)/2 - log 2
            + logaddexp(log erfcx((x/b + b)/sqrt2), log erfcx((b - x/b)/sqrt2))
    """
    b = float(b)
    if b <= 0.0:
        raise ValueError("b must be positive")
    x = np.asarray(x, dtype=float)
    u = x / b
    z1 = (u + b) / math.sqrt(2.0)
    z2 = (b - u) / math.sqrt(2.0)
    val = -(u * u + b * b) / 2.0 - _LN2 + np.logaddexp(_log_erfcx(z1), _log_erfcx(z2))
    return val if val.ndim else float(val)


def g_function(x, b):
    """G(x; b) = e^x (1 - Phi(x/b + b)) + e^{-x} Phi(x/b - b).

    Positive and finite over the float range of its log (underflows to 0.0
    only when log G < ~-745, i.e. far outside any region of interest).
    """
    out = np.exp(log_g(x, b))
    return out if isinstance(out, np.ndarray) else float(out)


def max_leakage_gaussian(
    model: GaussianModel, cap: int = 20, force: bool = False
) -> LeakageReport:
    """Exact supremum of leakage_gaussian over all adversaries (i, K).

    Enumerates all n * 2^(n-1) prior sets; refuses above `cap` tuples unless
    force=True. Layers follow the graph convention: layer = n - |K|.
    """
    n = model.n
    if n > cap and not force:
        raise SearchSpaceExceeded(
            f"n={n} would enumerate {n * 2 ** (n - 1)} adversaries (cap {cap})"
        )
    t0 = time.perf_counter()
    layer_max: dict[int, float] = {}
    best = -math.inf
    best_node: AdversaryNode | None = None
    count = 0
    for i in range(n):
        others = [j for j in range(n) if j != i]
        for mask in range(2 ** len(others)):
            K = tuple(o for pos, o in enumerate(others) if (mask >> pos) & 1)
            val = leakage_gaussian(model, i, K)
            count += 1
            layer = n - len(K)
            if layer not in layer_max or val > layer_max[layer]:
                layer_max[layer] = val
            if val > best:
                best = val
                best_node = AdversaryNode(i, K)
    return LeakageReport(
        layer_max=layer_max,
        leakage=best,
        argmax=best_node,
        node_count=count,
        elapsed=time.perf_counter() - t0,
        algorithm="enumerate",
        metadata={"n": n, "cap": cap},
    )


def load_gaussian_model(data) -> GaussianModel:
    """Build a model from a dict or JSON string.

    Expected keys: "mu" (list), "sigma" (nested list), "M" (positive query
    coefficient bound), and "lambda" (noise scale; "lam" is accepted too).
    """
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    if not isinstance(data, Mapping):
        raise ValueError("gaussian model JSON must be an object")
    try:
        mu = data["mu"]
        sigma = data["sigma"]
        m_bound = data["M"]
    except KeyError as exc:
        raise ValueError(f"gaussian model JSON is missing key {exc}") from None
    lam = data.get("lambda", data.get("lam"))
    if lam is None:
        raise ValueError('gaussian model JSON is missing key "lambda"')
    return GaussianModel(mu=mu, sigma=sigma, M=float(m_bound), lam=float(lam))


def gaussian_model_to_json(model: GaussianModel) -> dict:
    return {
        "mu": list(model.mu),
        "sigma": np.asarray(model.sigma).tolist(),
        "M": model.M,
        "lambda": model.lam,
    }
