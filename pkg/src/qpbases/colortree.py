"""Sums over configurations organised along the Dynkin tree.

The character sums and the monomial census both weigh a configuration (one
partition per color) by a product of per-color factors times one factor
q^(-cross) per edge, an edge joining a color to a partner whose charges
enter its energy bound.  The partner graph is a tree, so the sum is
evaluated by passing messages from the leaves to a root: the message from
color c to its neighbour s maps each partition of s to a series in q and
the y's on c's side of the tree.

Only pairs of partitions that survive the projected search are visited.
Entries of the message from c at a partition r_s are kept up to degree
M - LB(r_s), where LB bounds from below the exponent carried by the colors
outside c's side (their squares and mutual cross terms) given r_s.  Every
weight has q-degree at least the exponent of its configuration, so nothing
that can land at degree <= M is dropped.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

from .forms import BlockForm, Projection, conditional_bound
from .series import FIELD_BITS, SeriesError, TruncatedSeries

# exponents inside messages may be negative; they are stored with this offset
_OFFSET = 1 << 40


class Weights(Protocol):
    def unary(self, color: int, r: tuple, limit: int) -> dict:
        """q-exponent -> coefficient for one color's factor, degrees <= limit."""

    def edge(self, partner: int, dependent: int, r_partner: tuple, r_dependent: tuple) -> int:
        """Exponent removed by the edge between the two colors."""


@dataclass
class TreeStats:
    root: int = 0
    partitions: dict = field(default_factory=dict)  # color -> number of candidate partitions
    pairs: dict = field(default_factory=dict)       # "s-c" -> number of candidate pairs
    largest_message: int = 0

    def to_dict(self) -> dict:
        return {"root": self.root, "partitions": dict(sorted(self.partitions.items())),
                "pairs": dict(sorted(self.pairs.items())),
                "largest_message": self.largest_message}


def _convolve(a: dict, b: dict, limit: int, ybits: int) -> dict:
    top = (limit + 2 * _OFFSET + 1) << ybits
    out: dict = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = ka + kb
            if k < top:
                out[k] = out.get(k, 0) + ca * cb
    shift = _OFFSET << ybits
    return {k - shift: c for k, c in out.items() if c}


def tree_sum(bf: BlockForm, weights: Weights, M: int, max_blocks: int | None = None,
             root: int | None = None, stats: TreeStats | None = None) -> TruncatedSeries:
    """Sum of the weights of all configurations, truncated at q^M.

    ``max_blocks`` caps the number of blocks (level k for standard and
    rectangular weights, where color i keeps at most nu_i*k entries).
    """
    if M < 0:
        raise SeriesError("truncation must be nonnegative")
    rs, plan = bf.rs, bf.plan
    l = rs.rank
    ybits = FIELD_BITS * l
    dependent_of = {}
    neighbours = {i: [] for i in plan.order}
    for c in plan.order:
        for s, _ in plan.partner_list(c):
            dependent_of[(s, c)] = True
            neighbours[s].append(c)
            neighbours[c].append(s)
    root = plan.order[0] if root is None else root
    parent = {root: None}
    order = [root]
    for u in order:
        for v in sorted(neighbours[u]):
            if v not in parent:
                parent[v] = u
                order.append(v)
    side = {}
    for c in reversed(order):
        side[c] = {c}.union(*(side[d] for d in neighbours[c] if parent.get(d) == c))
    if stats is not None:
        stats.root = root

    def ykey(color, n):
        return n << (FIELD_BITS * (l - color))

    def edge_weight(s, c, r_s, r_c):
        if (s, c) in dependent_of:
            return weights.edge(s, c, r_s, r_c)
        return weights.edge(c, s, r_c, r_s)

    messages: dict = {}
    for c in reversed(order):
        s = parent[c]
        kids = [d for d in neighbours[c] if parent.get(d) == c]
        if s is None:
            pairs = [(None, cfg[0]) for cfg in Projection(bf, (c,)).restrictions(M, max_blocks)]
            lower = {None: 0}
            crosses = [0] * len(pairs)
        else:
            pairs = Projection(bf, (s, c)).restrictions(M, max_blocks)
            outside = [i for i in plan.order if i not in side[c]]
            lb = conditional_bound(bf, outside, s)
            lower = {}
            for r_s, _ in pairs:
                if r_s not in lower:
                    lower[r_s] = lb(r_s)
            crosses = [edge_weight(s, c, r_s, r_c) for r_s, r_c in pairs]
        if stats is not None:
            if s is None:
                stats.partitions[c] = len(pairs)
            else:
                stats.pairs[f"{s}-{c}"] = len(pairs)
        need: dict = {}
        for (r_s, r_c), x in zip(pairs, crosses):
            v = M - lower[r_s] + x
            if need.get(r_c, v - 1) < v:
                need[r_c] = v

        inside: dict = {}
        out: dict = {}
        for (r_s, r_c), x in zip(pairs, crosses):
            a = inside.get(r_c)
            if a is None:
                a = inside[r_c] = _inside(c, r_c, need[r_c], kids, messages, weights,
                                          ykey, ybits)
            if not a:
                continue
            cut = (M - lower[r_s] + x + _OFFSET + 1) << ybits
            shift = x << ybits
            target = out.setdefault(r_s, {})
            for k, v in a.items():
                if k < cut:
                    k2 = k - shift
                    target[k2] = target.get(k2, 0) + v
        for d in kids:
            del messages[d]
        messages[c] = out
        if stats is not None and out:
            stats.largest_message = max(stats.largest_message, max(len(v) for v in out.values()))

    result = TruncatedSeries(l, M)
    ymask = (1 << ybits) - 1
    for k, v in messages[root].get(None, {}).items():
        e = (k >> ybits) - _OFFSET
        if e > M or not v:
            continue
        if e < 0:
            raise ArithmeticError(f"negative total q-degree {e} in a configuration sum")
        result.layers[e][k & ymask] = v
    return result


def _inside(c, r_c, limit, kids, messages, weights, ykey, ybits) -> dict:
    """Weight of color c's factor times its children's messages at r_c."""
    parts = []
    for d in kids:
        m = messages[d].get(r_c)
        if not m:
            return {}
        parts.append(m)
    mins = [(min(m) >> ybits) - _OFFSET for m in parts]
    y = ykey(c, sum(r_c))
    acc = {((e + _OFFSET) << ybits) | y: v
           for e, v in weights.unary(c, r_c, limit - sum(mins)).items() if v}
    for n, m in enumerate(parts):
        if not acc:
            break
        acc = _convolve(acc, m, limit - sum(mins[n + 1:]), ybits)
    return acc
