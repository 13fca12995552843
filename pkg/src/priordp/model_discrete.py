"""Discrete joint-distribution model of a correlated database.

A database is a vector of n numeric tuples x_0..x_{n-1} (0-based indices
throughout). Its correlation structure is captured by a dense joint
probability table over the product of the per-tuple domains. Everything
downstream (brute-force leakage oracle, graph chain rule) consumes the
conditional distributions, Pearson correlations and query sensitivities
derived here.

All types are immutable after construction and all operations are pure
functions, so values can be shared freely across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

from .errors import DegenerateVariable, ImpossibleCondition

# Conditioning events with less mass than this are treated as impossible;
# perfect-correlation tables produce exact zeros and near-zeros from rounding.
PROB_FLOOR = 1e-12

# Tables are validated at load within this tolerance, then renormalized once.
LOAD_TOL = 1e-9


def _as_sorted_values(values: Iterable[float]) -> tuple[float, ...]:
    vals = tuple(float(v) for v in values)
    if len(vals) < 1:
        raise ValueError("every tuple domain needs at least one value")
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ValueError(f"domain values must be strictly increasing, got {vals}")
    return vals


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Dense joint probability table over per-tuple numeric domains.

    Parameters
    ----------
    domains : sequence of sequences of float
        dom(x_i) for each tuple, strictly increasing values.
    probs : array_like
        Probability table with one axis per tuple, axis i indexed by
        dom(x_i). Must be nonnegative and sum to 1 within 1e-9; it is
        renormalized exactly once at construction.
    """

    domains: tuple[tuple[float, ...], ...]
    probs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        doms = tuple(_as_sorted_values(d) for d in self.domains)
        object.__setattr__(self, "domains", doms)
        table = np.asarray(self.probs, dtype=float)
        shape = tuple(len(d) for d in doms)
        if table.shape != shape:
            raise ValueError(
                f"probability table shape {table.shape} does not match "
                f"domain sizes {shape}"
            )
        if np.any(table < -PROB_FLOOR):
            raise ValueError("probabilities must be nonnegative")
        table = np.where(table < 0.0, 0.0, table)
        total = float(table.sum())
        if not math.isfinite(total) or abs(total - 1.0) > LOAD_TOL:
            raise ValueError(f"probabilities must sum to 1 (got {total!r})")
        table = table / total
        table.flags.writeable = False
        object.__setattr__(self, "probs", table)

    @property
    def n(self) -> int:
        """Number of tuples."""
        return len(self.domains)

    def value_index(self, i: int, value: float) -> int:
        """Index of `value` inside dom(x_i), matched within 1e-9."""
        dom = self.domains[i]
        k = int(np.argmin([abs(d - value) for d in dom]))
        if abs(dom[k] - value) > 1e-9 * max(1.0, abs(value)):
            raise ValueError(f"value {value!r} not in dom(x_{i}) = {dom}")
        return k


@dataclass(frozen=True, eq=False)
class ConditionalTable:
    """Pr(x_targets | given), normalized over the target domain product.

    `targets` is sorted ascending; `probs` has one axis per target in that
    order; `given` maps tuple index -> conditioned value.
    """

    targets: tuple[int, ...]
    given: Mapping[int, float]
    domains: tuple[tuple[float, ...], ...]
    probs: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class QuerySpec:
    """Linear query f(x) = sum_i a_i * x_i."""

    coefficients: tuple[float, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(float(a) for a in self.coefficients)
        if not any(a != 0.0 for a in coeffs):
            raise ValueError("linear query needs at least one nonzero coefficient")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def sum_query(cls, n: int) -> "QuerySpec":
        return cls((1.0,) * n)

    @classmethod
    def parse(cls, text: str) -> "QuerySpec":
        return cls(tuple(float(t) for t in text.split(",")))


def marginal(dist: JointDistribution, subset: Iterable[int]) -> JointDistribution:
    """Marginal distribution over `subset` (result axes in sorted order)."""
    keep = sorted(set(int(i) for i in subset))
    if not keep:
        raise ValueError("subset must be non-empty")
    if keep[0] < 0 or keep[-1] >= dist.n:
        raise ValueError(f"subset {keep} out of range for n={dist.n}")
    drop = tuple(i for i in range(dist.n) if i not in keep)
    table = dist.probs.sum(axis=drop) if drop else dist.probs
    return JointDistribution(tuple(dist.domains[i] for i in keep), table)


def conditional(
    dist: JointDistribution,
    targets: Iterable[int],
    given: Mapping[int, float],
) -> ConditionalTable:
    """Pr(x_targets | x_given), Bayes-normalized.

    Raises
    ------
    ImpossibleCondition
        If the conditioning event has probability below 1e-12. Callers
        taking suprema over conditioning contexts must skip those contexts.
    """
    tgt = tuple(sorted(set(int(i) for i in targets)))
    giv = {int(k): float(v) for k, v in given.items()}
    if not tgt:
        raise ValueError("targets must be non-empty")
    if set(tgt) & set(giv):
        raise ValueError("targets and given indices overlap")
    idx: list[object] = [slice(None)] * dist.n
    for k, v in giv.items():
        idx[k] = dist.value_index(k, v)
    sliced = dist.probs[tuple(idx)]
    remaining = [i for i in range(dist.n) if i not in giv]
    sum_axes = tuple(ax for ax, i in enumerate(remaining) if i not in tgt)
    table = sliced.sum(axis=sum_axes) if sum_axes else sliced
    mass = float(table.sum())
    if mass < PROB_FLOOR:
        raise ImpossibleCondition(f"Pr(given={giv}) = {mass!r} is (near) zero")
    return ConditionalTable(
        targets=tgt,
        given=giv,
        domains=tuple(dist.domains[i] for i in tgt),
        probs=table / mass,
    )


def _moments_2d(
    domains: tuple[tuple[float, ...], tuple[float, ...]], table: np.ndarray
) -> tuple[float, float, float, float, float]:
    xi = np.asarray(domains[0])
    xj = np.asarray(domains[1])
    pi = table.sum(axis=1)
    pj = table.sum(axis=0)
    ei = float(pi @ xi)
    ej = float(pj @ xj)
    vi = float(pi @ (xi - ei) ** 2)
    vj = float(pj @ (xj - ej) ** 2)
    cov = float((xi - ei) @ table @ (xj - ej))
    return ei, ej, vi, vj, cov


def pearson_corr(
    dist: JointDistribution,
    i: int,
    j: int,
    given: Mapping[int, float] | None = None,
) -> float:
    """Pearson correlation of x_i and x_j, optionally conditioned.

    Clamped to [-1, 1] against rounding. Raises DegenerateVariable when a
    conditional variance vanishes.
    """
    if i == j:
        raise ValueError("need two distinct tuple indices")
    cond = conditional(dist, (i, j), given or {})
    lo, hi = sorted((i, j))
    _, _, v_lo, v_hi, cov = _moments_2d(cond.domains, cond.probs)
    widths = [d[-1] - d[0] for d in cond.domains]
    floor = [1e-12 * w * w for w in widths]
    if v_lo <= floor[0] or v_hi <= floor[1]:
        raise DegenerateVariable(
            f"zero conditional variance for tuple {lo if v_lo <= floor[0] else hi}"
        )
    rho = cov / math.sqrt(v_lo * v_hi)
    rho = min(1.0, max(-1.0, rho))
    # moments were computed with axes (min(i,j), max(i,j)); order does not
    # change the value, so no swap correction is needed
    return rho


def corr_sign_2x2(
    dist: JointDistribution,
    i: int,
    j: int,
    given: Mapping[int, float] | None = None,
) -> str:
    """Sign of the correlation of two binary tuples from cell probabilities.

    Uses the cross-product criterion p00*p11 - p01*p10, which for 2x2 tables
    has exactly the sign of the Pearson correlation. Returns '+', '-' or '0'.
    """
    cond = conditional(dist, (i, j), given or {})
    if any(len(d) != 2 for d in cond.domains):
        raise ValueError("corr_sign_2x2 requires binary domains for both tuples")
    p = cond.probs
    cross = float(p[0, 0] * p[1, 1] - p[0, 1] * p[1, 0])
    if abs(cross) <= 1e-15:
        return "0"
    return "+" if cross > 0 else "-"


def local_sensitivity(dist: JointDistribution, query: QuerySpec, i: int) -> float:
    """LS_i(f): largest |f(x) - f(x')| over pairs differing only in tuple i.

    Computed by brute force over value pairs of dom(x_i); for a linear query
    the other coordinates cancel, so this is the exhaustive search.
    """
    if len(query.coefficients) != dist.n:
        raise ValueError("query length does not match number of tuples")
    a = query.coefficients[i]
    dom = dist.domains[i]
    best = 0.0
    for v, w in combinations(dom, 2):
        best = max(best, abs(a * (v - w)))
    return best


def global_sensitivity(dist: JointDistribution, query: QuerySpec) -> float:
    """GS(f) = max_i LS_i(f) for a sum-decomposable linear query."""
    return max(local_sensitivity(dist, query, i) for i in range(dist.n))


def transform_linear_query(
    dist: JointDistribution, query: QuerySpec
) -> JointDistribution:
    """Rewrite a linear query as a sum query over y_i = a_i * x_i.

    Domains are rescaled by a_i and re-sorted (axis flipped for negative
    coefficients); an a_i = 0 tuple collapses to the single value 0.0. The
    returned distribution together with the all-ones query is equivalent to
    (dist, query) for every leakage quantity computed by this package.
    """
    if len(query.coefficients) != dist.n:
        raise ValueError("query length does not match number of tuples")
    domains: list[tuple[float, ...]] = []
    table = dist.probs
    for i, a in enumerate(query.coefficients):
        if a == 0.0:
            domains.append((0.0,))
            table = table.sum(axis=i, keepdims=True)
        elif a > 0.0:
            domains.append(tuple(a * v for v in dist.domains[i]))
        else:
            domains.append(tuple(a * v for v in reversed(dist.domains[i])))
            table = np.flip(table, axis=i)
    return JointDistribution(tuple(domains), table)


def load_distribution(obj: Mapping | str) -> JointDistribution:
    """Build a JointDistribution from the JSON object format.

    Format: {"domains": [[v, ...], ...], "probs": [p, ...]} with probs
    flattened in row-major order over the domain product. A string argument
    is parsed as JSON text.
    """
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, Mapping) or "domains" not in obj or "probs" not in obj:
        raise ValueError('distribution JSON needs "domains" and "probs" keys')
    domains = [list(map(float, d)) for d in obj["domains"]]
    flat = np.asarray(obj["probs"], dtype=float).ravel()
    size = int(np.prod([len(d) for d in domains]))
    if flat.size != size:
        raise ValueError(
            f"probs length {flat.size} does not match domain product {size}"
        )
    table = flat.reshape(tuple(len(d) for d in domains))
    return JointDistribution(tuple(tuple(d) for d in domains), table)


def distribution_to_json(dist: JointDistribution) -> dict:
    """Inverse of load_distribution (row-major flattening)."""
    return {
        "domains": [list(d) for d in dist.domains],
        "probs": [float(p) for p in dist.probs.ravel()],
    }
