"""Weighted hierarchical graph of adversaries and the leakage chain rule.

Every adversary (i, K) — attack tuple i, prior knowledge of the tuples in
K — is a node; layer k holds the adversaries with |K| = n - k, so layer 1
is the strongest (knows all others) and layer n the weakest (knows none).
An edge connects a child (i, K) to its ancestor (i, K \\ {j}): the ancestor
no longer knows tuple j and pays a correlation-driven increment

    IC = log [ sum_xj Pr(xj | x_i = a, x_K') e^{-xj/lam}
             / sum_xj Pr(xj | x_i = b, x_K') e^{-xj/lam} ]

for some hypothesis pair (a, b). The ancestor leakage is |l_child + IC*|
where IC* maximizes that absolute value over the candidate set.

Candidate set: for each feasible hypothesis pair the e^{-xj/lam}-weighted
increment above (the r -> -inf output ray) and the negated e^{+xj/lam}
variant (the r -> +inf ray). For swap-symmetric tables the two coincide;
for asymmetric tables both orientations are needed to recover the exact
value on two-tuple unit-width instances. Reports record this as
metadata["edge_candidates"] = "two_sided".

The increments sample the output-density ratio only on its two tails, but
the true supremum over outputs can sit at an interior kink (an output equal
to an attainable query sum), which no ray sees. On unit-width binary
domains the ray values attain the supremum and the chain matches or bounds
the exact leakage; on instances mixing unequal domain widths the exact
supremum can exceed the chain value at any noise scale. The chain is the
scalable surrogate, the brute-force oracle the ground truth, and the gap
between them is a measured quantity, not an assumed sign.

Node leakage quantifies over prior-knowledge *values*: by default the max
over all positive-probability assignments of x_K' enters the candidate set
("max" mode); pass prior_values= to fix one concrete assignment instead.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import DegenerateVariable, ImpossibleCondition, SearchSpaceExceeded
from .model_discrete import (
    PROB_FLOOR,
    JointDistribution,
    QuerySpec,
    conditional,
    local_sensitivity,
    marginal,
    transform_linear_query,
)
from .report import AdversaryNode, LeakageReport, summarize_layers

_LOG_FLOOR = math.log(PROB_FLOOR)


@dataclass(frozen=True, eq=False)
class WeightedHierGraph:
    """Layered adversary graph with node leakages and edge increments.

    layers[k-1] maps the layer-k nodes to their leakage; edges maps
    (child node, removed tuple j) to the increment IC chosen for that edge.
    """

    n: int
    layers: tuple[Mapping[AdversaryNode, float], ...]
    edges: Mapping[tuple[AdversaryNode, int], float]

    def node_value(self, node: AdversaryNode) -> float:
        return self.layers[node.layer(self.n) - 1][node]

    def all_values(self) -> dict[AdversaryNode, float]:
        out: dict[AdversaryNode, float] = {}
        for layer in self.layers:
            out.update(layer)
        return out

    def to_json(self) -> dict:
        nodes = []
        for k, layer in enumerate(self.layers, start=1):
            for node in sorted(layer):
                nodes.append(
                    {"node": node.to_json(), "leakage": layer[node], "layer": k}
                )
        edges = [
            {"node": node.to_json(), "removed": j, "ic": ic}
            for (node, j), ic in sorted(
                self.edges.items(), key=lambda kv: (kv[0][0], kv[0][1])
            )
        ]
        return {"layers": nodes, "edges": edges}


def ic_pair(
    dist: JointDistribution,
    i: int,
    j: int,
    prior_assign: Mapping[int, float],
    x_im: float,
    x_in: float,
    lam: float,
    tail: str = "lower",
) -> float:
    """Correlation increment of tuple j for hypothesis pair (x_im, x_in).

    `dist` is taken with sum-query semantics (apply transform_linear_query
    first for general linear queries). tail="lower" weights the conditional
    of x_j by e^{-xj/lam} (the r -> -inf output ray); tail="upper" by
    e^{+xj/lam}. Antisymmetric under swapping the hypothesis pair.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if tail not in ("lower", "upper"):
        raise ValueError("tail must be 'lower' or 'upper'")
    sign = -1.0 if tail == "lower" else 1.0
    out = []
    for val in (x_im, x_in):
        cond = conditional(dist, [j], {i: val, **prior_assign})
        xj = np.asarray(cond.domains[0])
        out.append(float(logsumexp(sign * xj / lam, b=cond.probs)))
    return out[0] - out[1]


def gamma_set(
    dist: JointDistribution,
    i: int,
    j: int,
    prior_assign: Mapping[int, float],
    lam: float,
    tail: str = "lower",
) -> tuple[float, ...]:
    """Increment candidates over ordered hypothesis pairs m < n of dom(x_i).

    Pairs whose conditioning event has probability below 1e-12 are skipped;
    with every pair feasible the set has C(s, 2) elements for domain size s.
    """
    ks = sorted(prior_assign)
    joint = marginal(dist, [i] + ks)
    axes = sorted([i] + ks)
    feas = []
    for a in dist.domains[i]:
        vals = [a if t == i else prior_assign[t] for t in axes]
        idx = tuple(joint.value_index(pos, v) for pos, v in enumerate(vals))
        if float(joint.probs[idx]) >= PROB_FLOOR:
            feas.append(a)
    return tuple(
        ic_pair(dist, i, j, prior_assign, a, b, lam, tail)
        for a, b in combinations(feas, 2)
    )


def edge_value(l_child: float, gammas: Iterable[float]) -> float:
    """The increment gamma maximizing |l_child + gamma|.

    Ties break toward the larger gamma (then larger |gamma|), which keeps
    graphs deterministic across runs.
    """
    best: tuple[float, float, float] | None = None
    for g in gammas:
        key = (abs(l_child + g), g, abs(g))
        if best is None or key > best:
            best = key
    if best is None:
        raise ValueError("empty increment candidate set")
    return best[1]


def ancestor_leakage(l_child: float, ic: float) -> float:
    """Chain-rule step: leakage of the ancestor node, |l_child + ic|."""
    return abs(l_child + ic)


def ir_value(ic: float, ls_j: float, lam: float) -> float:
    """Increment ratio IC / (LS_j / lam), clamped to [-1, 1].

    The ratio is sign-linked to the conditional correlation of the attacked
    and removed tuples and never exceeds 1 in magnitude; the clamp only
    absorbs float rounding.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if ls_j <= 0:
        raise DegenerateVariable("removed tuple has zero local sensitivity")
    return float(np.clip(ic / (ls_j / lam), -1.0, 1.0))


def first_layer(
    dist: JointDistribution, query: QuerySpec, lam: float
) -> dict[AdversaryNode, float]:
    """Leakage of every strongest adversary: LS_i(f) / lam.

    With all other tuples known, the output density is the bare Laplace
    kernel, so the value depends only on the domain widths, never on the
    probability table.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    n = dist.n
    return {
        AdversaryNode(i, tuple(t for t in range(n) if t != i)): local_sensitivity(
            dist, query, i
        )
        / lam
        for i in range(n)
    }


def chain_rule_path(start: float, ics: Iterable[float]) -> float:
    """Nested-absolute-value accumulation of increments along a path."""
    value = abs(start)
    for ic in ics:
        value = abs(value + ic)
    return value


def _edge_candidates(
    y: JointDistribution,
    i: int,
    j: int,
    k_prime: tuple[int, ...],
    lam: float,
    prior_values: Mapping[int, float] | None,
) -> np.ndarray:
    """All increment candidates for the edge (i, K'+{j}) -> (i, K').

    Vectorized over prior assignments and hypothesis pairs: both ray
    orientations (lower-tail IC and negated upper-tail IC) for every
    feasible assignment of x_K' and ordered pair of x_i values.
    """
    axes = sorted((i, j, *k_prime))
    sub = marginal(y, axes)
    pos_i = axes.index(i)
    pos_j = axes.index(j)
    rest = [p for p in range(len(axes)) if p not in (pos_i, pos_j)]
    table = np.transpose(sub.probs, rest + [pos_i, pos_j])
    if prior_values is not None:
        sel: list[object] = []
        for p in rest:
            t = axes[p]
            if t not in prior_values:
                raise ValueError(f"prior_values is missing tuple {t}")
            sel.append(sub.value_index(p, prior_values[t]))
        table = table[tuple(sel)][None, ...]
    else:
        table = table.reshape(-1, table.shape[-2], table.shape[-1])
    with np.errstate(divide="ignore"):
        log_t = np.log(table)
    xj = np.asarray(y.domains[j])
    # L[v, a] = log sum_xj Pr(x_i=a, x_j, x_K'=v) e^{-+ xj/lam}; the joint
    # mass log m[v, a] cancels the conditional normalization
    log_m = logsumexp(log_t, axis=2)
    feasible = log_m >= _LOG_FLOOR
    with np.errstate(invalid="ignore"):
        # zero-mass rows yield -inf - -inf = nan; 'feasible' masks them out
        lo = logsumexp(log_t - xj / lam, axis=2) - log_m
        up = logsumexp(log_t + xj / lam, axis=2) - log_m
    cands: list[float] = []
    s = table.shape[1]
    for m, nn in combinations(range(s), 2):
        ok = feasible[:, m] & feasible[:, nn]
        if not ok.any():
            continue
        cands.extend(lo[ok, m] - lo[ok, nn])
        cands.extend(-(up[ok, m] - up[ok, nn]))
    return np.asarray(cands)


def _pick_edge(l_child: float, cands: np.ndarray) -> float:
    scores = np.abs(l_child + cands)
    return float(cands[scores == scores.max()].max())


def _search_distribution(
    dist: JointDistribution,
    query: QuerySpec,
    lam: float,
    *,
    fast: bool,
    prior_values: Mapping[int, float] | None = None,
    cap: int = 18,
    force: bool = False,
) -> tuple[WeightedHierGraph, LeakageReport]:
    y = transform_linear_query(dist, query)
    n = y.n
    if not fast and n > cap and not force:
        raise SearchSpaceExceeded(
            f"n={n} would materialize {n * 2 ** (n - 1)} nodes (cap {cap}); "
            "pass force=True to override"
        )
    if prior_values is not None:
        # searches run on the sum-query form; map the fixed values with it
        prior_values = {
            int(t): query.coefficients[int(t)] * float(v)
            for t, v in prior_values.items()
        }
    t0 = time.perf_counter()
    sum_q = QuerySpec.sum_query(n)
    layers: list[dict[AdversaryNode, float]] = [first_layer(y, sum_q, lam)]
    edges: dict[tuple[AdversaryNode, int], float] = {}
    expand = layers[0]
    for _ in range(1, n):
        nxt: dict[AdversaryNode, float] = {}
        for node in sorted(expand):
            l_child = expand[node]
            for j in node.prior:
                k_prime = tuple(t for t in node.prior if t != j)
                cands = _edge_candidates(y, node.attack, j, k_prime, lam, prior_values)
                if cands.size == 0:
                    continue
                ic = _pick_edge(l_child, cands)
                edges[(node, j)] = ic
                parent = AdversaryNode(node.attack, k_prime)
                val = ancestor_leakage(l_child, ic)
                if parent not in nxt or val < nxt[parent]:
                    nxt[parent] = val
        if not nxt:
            break
        layers.append(nxt)
        if fast:
            by_attack: dict[int, list[AdversaryNode]] = {}
            for node in nxt:
                by_attack.setdefault(node.attack, []).append(node)
            expand = {}
            for nodes in by_attack.values():
                nodes.sort(key=lambda nd: (-nxt[nd], nd))
                for nd in nodes[: min(n, len(nodes))]:
                    expand[nd] = nxt[nd]
        else:
            expand = nxt
    graph = WeightedHierGraph(n, tuple(layers), edges)
    values = graph.all_values()
    layer_max, best, argmax = summarize_layers(values, n)
    report = LeakageReport(
        layer_max=layer_max,
        leakage=best,
        argmax=argmax,
        node_count=len(values),
        elapsed=time.perf_counter() - t0,
        algorithm="fast" if fast else "full",
        metadata={
            "edge_candidates": "two_sided",
            "assignment_mode": "fixed" if prior_values is not None else "max",
            "lambda": lam,
        },
    )
    return graph, report


def full_space_search(
    dist: JointDistribution,
    query: QuerySpec,
    lam: float,
    *,
    prior_values: Mapping[int, float] | None = None,
    cap: int = 18,
    force: bool = False,
) -> tuple[WeightedHierGraph, LeakageReport]:
    """Materialize every adversary node layer by layer (exhaustive search).

    A node reachable through several removal orders keeps the minimum of the
    candidate leakages. Refuses n > cap (default 18) unless force=True.
    """
    return _search_distribution(
        dist, query, lam, fast=False, prior_values=prior_values, cap=cap, force=force
    )


def fast_search(
    dist: JointDistribution,
    query: QuerySpec,
    lam: float,
    *,
    prior_values: Mapping[int, float] | None = None,
) -> tuple[WeightedHierGraph, LeakageReport]:
    """Pruned search: per layer and attacked tuple, only the min(n, count)
    largest nodes are expanded further.

    Every computed node still enters the report, but pruning removes
    alternative paths whose minima could lower deeper node values, so
    fast leakage >= full leakage; with n <= 2 no pruning is possible and
    the result is identical to full_space_search.
    """
    return _search_distribution(dist, query, lam, fast=True, prior_values=prior_values)


EdgeValueFn = Callable[[int, np.ndarray, int], np.ndarray]


class _DictEdges:
    """Adapter exposing a {(i, K tuple, j): ic} mapping as a batch lookup."""

    def __init__(self, mapping: Mapping[tuple[int, tuple[int, ...], int], float], n: int):
        self.n = n
        self._map = {
            (int(i), tuple(sorted(int(t) for t in K)), int(j)): float(v)
            for (i, K, j), v in mapping.items()
        }

    def values(self, i: int, child_masks: np.ndarray, j: int) -> np.ndarray:
        out = np.empty(child_masks.size)
        for pos, mask in enumerate(child_masks):
            key = (i, _mask_to_tuple(int(mask)), j)
            if key not in self._map:
                raise KeyError(f"synthetic edge map is missing edge {key}")
            out[pos] = self._map[key]
        return out


def _mask_to_tuple(mask: int) -> tuple[int, ...]:
    out = []
    t = 0
    while mask:
        if mask & 1:
            out.append(t)
        mask >>= 1
        t += 1
    return tuple(out)


def load_synthetic_edges(
    records: Iterable[Mapping], n: int
) -> dict[tuple[int, tuple[int, ...], int], float]:
    """Parse a JSON edge list [{"i":.., "K":[..], "j":.., "ic":..}, ...]."""
    out = {}
    for rec in records:
        key = (int(rec["i"]), tuple(sorted(int(t) for t in rec["K"])), int(rec["j"]))
        if key[2] not in key[1]:
            raise ValueError(f"edge {key}: removed tuple j must belong to K")
        out[key] = float(rec["ic"])
    if not out:
        raise ValueError("synthetic edge list is empty")
    for (i, K, j) in out:
        if i in K or max((i, *K)) >= n:
            raise ValueError(f"edge ({i}, {K}, {j}) invalid for n={n}")
    return out


def search_synthetic(
    edges,
    first_layer_values: Mapping[int, float] | float,
    mode: str = "full",
    n: int | None = None,
) -> LeakageReport:
    """Run the exhaustive or pruned search over externally supplied edges.

    `edges` is either an object with attributes n and values(i, masks, j)
    (vectorized lookup by child-K bitmask) or a mapping keyed by
    (i, sorted K tuple, j). Node and edge semantics match the
    distribution-driven searches; values are already in leakage units, so
    no noise scale is involved here.
    """
    if mode not in ("full", "fast"):
        raise ValueError("mode must be 'full' or 'fast'")
    if isinstance(edges, Mapping):
        if n is None:
            raise ValueError("n is required with a mapping edge source")
        edges = _DictEdges(edges, n)
    n = edges.n
    if isinstance(first_layer_values, (int, float)):
        fl = {i: float(first_layer_values) for i in range(n)}
    else:
        fl = {int(i): float(v) for i, v in first_layer_values.items()}
        if sorted(fl) != list(range(n)):
            raise ValueError("first_layer_values must cover every attacked tuple")
    t0 = time.perf_counter()
    full_mask = (1 << n) - 1
    by_pc: list[list[int]] = [[] for _ in range(n + 1)]
    for mask in range(1 << n):
        by_pc[bin(mask).count("1")].append(mask)
    masks_pc = [np.asarray(m, dtype=np.int64) for m in by_pc]

    layer_max: dict[int, float] = {}
    best = -math.inf
    best_node: AdversaryNode | None = None
    node_count = 0

    def record(i: int, layer: int, masks: np.ndarray, vals: np.ndarray) -> None:
        nonlocal best, best_node, node_count
        node_count += vals.size
        if vals.size == 0:
            return
        top = float(vals.max())
        if layer not in layer_max or top > layer_max[layer]:
            layer_max[layer] = top
        if top > best:
            # smallest mask attaining the max keeps argmax deterministic
            best = top
            best_node = AdversaryNode(i, _mask_to_tuple(int(masks[vals == top].min())))

    values = np.empty(1 << n)
    for i in range(n):
        values.fill(np.inf)
        start = full_mask ^ (1 << i)
        values[start] = fl[i]
        record(i, 1, np.asarray([start]), np.asarray([fl[i]]))
        expand = np.asarray([start], dtype=np.int64)
        for layer in range(2, n + 1):
            for j in range(n):
                if j == i:
                    continue
                sel = expand[(expand >> j) & 1 == 1]
                if sel.size == 0:
                    continue
                ic = np.asarray(edges.values(i, sel, j), dtype=float)
                np.minimum.at(values, sel ^ (1 << j), np.abs(values[sel] + ic))
            pc = masks_pc[n - layer]
            parents = pc[(pc >> i) & 1 == 0]
            vals = values[parents]
            done = np.isfinite(vals)
            parents, vals = parents[done], vals[done]
            record(i, layer, parents, vals)
            if parents.size == 0:
                break
            if mode == "fast":
                keep = min(n, parents.size)
                order = np.lexsort((parents, -vals))[:keep]
                expand = parents[np.sort(order)]
            else:
                expand = parents
    return LeakageReport(
        layer_max=layer_max,
        leakage=best,
        argmax=best_node,
        node_count=node_count,
        elapsed=time.perf_counter() - t0,
        algorithm=mode,
        metadata={"synthetic": True, "n": n},
    )
