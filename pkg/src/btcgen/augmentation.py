"""Feasible pairs and the two augmentation operators (adding one leaf)."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

from .errors import (
    InfeasiblePairError,
    InvalidLabelError,
    InvalidPairMemberError,
    LabelClashError,
)
from .network import Network, topological_order


class LeafType(str, enum.Enum):
    T = "T"
    H = "H"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class FeasiblePair:
    """A candidate ``(S1, S2)``.

    ``s1`` is a multiset stored as a sorted tuple, ``s2`` an ordered tuple.
    Nothing is checked here; see :func:`is_feasible`.
    """

    kind: LeafType
    s1: Tuple[int, ...]
    s2: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", LeafType(self.kind))
        object.__setattr__(self, "s1", tuple(sorted(self.s1)))
        object.__setattr__(self, "s2", tuple(self.s2))

    @classmethod
    def t(cls, tau: int, s2: Iterable[int] = ()) -> "FeasiblePair":
        return cls(LeafType.T, (tau,), tuple(s2))

    @classmethod
    def h(cls, tau1: int, tau2: int, s2: Iterable[int] = ()) -> "FeasiblePair":
        return cls(LeafType.H, (tau1, tau2), tuple(s2))

    @property
    def hybrid_delta(self) -> int:
        """Number of hybrid nodes the augmentation adds."""
        return len(self.s2) + (self.kind is LeafType.H)

    def sort_key(self):
        return (self.kind is LeafType.H, len(self.s2), self.s1, self.s2)

    def mapped(self, mapping) -> "FeasiblePair":
        return FeasiblePair(
            self.kind, tuple(mapping[x] for x in self.s1), tuple(mapping[y] for y in self.s2)
        )


# The reduction's output has exactly the shape of an augmentation input.
RecoveringData = FeasiblePair


class PairContext:
    """Per-network data shared by feasibility checks, pair enumeration and
    pair counting.  Node sets are int bitmasks over node ids.

    ``free``: tree nodes with neither a hybrid parent nor a hybrid sibling.
    ``anc[u]``: proper ancestors of ``u``.
    ``sib[u]``: sibling of ``u`` or -1.
    ``free_pairs``: masks ``{a, b}`` of sibling nodes that are both free.
    """

    __slots__ = ("tree", "tree_mask", "free", "anc", "sib", "free_pairs")

    def __init__(self, net: Network):
        size = len(net.children)
        anc = [0] * size
        for u in topological_order(net):
            m = 0
            for p in net.parents[u]:
                m |= anc[p] | (1 << p)
            anc[u] = m
        tree = []
        tree_mask = 0
        free = 0
        sib = [-1] * size
        free_pairs = []
        for u in net.nodes():
            if not net.is_tree(u):
                continue
            tree.append(u)
            tree_mask |= 1 << u
            ps = net.parents[u]
            if not ps:
                free |= 1 << u
                continue
            p = ps[0]
            if net.is_hybrid(p):
                continue
            cs = net.children[p]
            s = cs[1] if cs[0] == u else cs[0]
            sib[u] = s
            if not net.is_hybrid(s):
                free |= 1 << u
        for u in net.nodes():
            cs = net.children[u]
            if len(cs) == 2 and (free >> cs[0] & 1) and (free >> cs[1] & 1):
                free_pairs.append((1 << cs[0]) | (1 << cs[1]))
        self.tree = tree
        self.tree_mask = tree_mask
        self.free = free
        self.anc = anc
        self.sib = sib
        self.free_pairs = free_pairs


def pair_context(net: Network) -> PairContext:
    """Cached :class:`PairContext`; any mutation of ``net`` drops the cache."""
    cache = net._cache
    if cache is None:
        cache = net._cache = {}
    ctx = cache.get("pairs")
    if ctx is None:
        ctx = cache["pairs"] = PairContext(net)
    return ctx


def is_feasible(net: Network, pair: FeasiblePair) -> bool:
    for x in pair.s1 + pair.s2:
        if not net.is_live(x) or not net.is_tree(x):
            raise InvalidPairMemberError(f"node {x!r} is not a tree node")
    ctx = pair_context(net)
    s1, s2 = pair.s1, pair.s2
    s1set = set(s1)
    if pair.kind is LeafType.T:
        if len(s1) != 1:
            return False
    else:
        if len(s1) != 2 or s1set.intersection(s2):
            return False
    if len(set(s2)) != len(s2):
        return False
    s2mask = 0
    for y in s2:
        s2mask |= 1 << y
    for y in s2:
        if y in s1set:
            continue
        if not ctx.free >> y & 1:
            return False
        s = ctx.sib[y]
        if s >= 0 and s not in s1set and s2mask >> s & 1:
            return False
    for tau in s1:
        if ctx.anc[tau] & s2mask:
            return False
    return True


def _check_label(net: Network, label: int) -> None:
    if not isinstance(label, int) or label < 1:
        raise InvalidLabelError(f"labels must be positive integers, got {label!r}")
    if label in net.labels.values():
        raise LabelClashError(f"label {label} already present")


def _require_feasible(net: Network, pair: FeasiblePair) -> None:
    if not is_feasible(net, pair):
        raise InfeasiblePairError(f"{pair} is not {pair.kind}-feasible")


def augment_T(net: Network, label: int, s1: Sequence[int], s2: Sequence[int] = ()) -> Network:
    _check_label(net, label)
    pair = FeasiblePair(LeafType.T, tuple(s1), tuple(s2))
    _require_feasible(net, pair)
    out = net.copy()
    us = [out.add_node() for _ in range(len(pair.s2) + 1)]
    for a, b in zip(us, us[1:]):
        out.add_arc(a, b)
    # splitting tau before the y_i gives the arc (w1, v_i) when tau == y_i
    w1 = out.split_above(pair.s1[0])
    out.add_arc(w1, us[0])
    for u, y in zip(us, pair.s2):
        out.add_arc(u, out.split_above(y))
    out.labels[us[-1]] = label
    return out


def augment_H(net: Network, label: int, s1: Sequence[int], s2: Sequence[int] = ()) -> Network:
    _check_label(net, label)
    pair = FeasiblePair(LeafType.H, tuple(s1), tuple(s2))
    _require_feasible(net, pair)
    out = net.copy()
    us = [out.add_node() for _ in range(len(pair.s2) + 2)]
    for a, b in zip(us, us[1:]):
        out.add_arc(a, b)
    tau1, tau2 = pair.s1
    # equal taus: the second split lands between the first one and tau
    out.add_arc(out.split_above(tau1), us[0])
    out.add_arc(out.split_above(tau2), us[0])
    for u, y in zip(us[1:], pair.s2):
        out.add_arc(u, out.split_above(y))
    out.labels[us[-1]] = label
    return out


def augment(net: Network, label: int, pair: FeasiblePair) -> Network:
    if len(pair.s1) == 1:
        return augment_T(net, label, pair.s1, pair.s2)
    if len(pair.s1) == 2:
        return augment_H(net, label, pair.s1, pair.s2)
    raise InfeasiblePairError(f"|S1| must be 1 or 2, got {len(pair.s1)}")

