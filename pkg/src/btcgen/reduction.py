"""TH-paths, leaf types and the leaf-removing reduction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .augmentation import FeasiblePair, LeafType, RecoveringData, augment
from .errors import (
    CannotReduceError,
    InvalidLabelingError,
    InvalidLeafError,
    NoParentError,
)
from .isocheck import mu_vectors, node_by_signature
from .network import Network, eliminate_elementary_inplace


@dataclass(frozen=True)
class THPath:
    nodes: Tuple[int, ...]  # u_1 ... u_r, ending at the leaf
    leaf_type: LeafType
    u0: Optional[int]  # the hybrid parent of u_1 (type H only)
    hybrids: Tuple[int, ...]  # v_1 ... v_{r-1}

    @property
    def r(self) -> int:
        return len(self.nodes)

    @property
    def extended(self) -> Tuple[int, ...]:
        """The nodes a reduction deletes (``u_0`` prepended for type H)."""
        return self.nodes if self.u0 is None else (self.u0,) + self.nodes

    @property
    def top(self) -> int:
        return self.extended[0]


def th_path(net: Network, leaf: int) -> THPath:
    """Maximal pre-TH-path ending at the leaf node ``leaf``."""
    net.check_node(leaf)
    if net.children[leaf] or leaf not in net.labels:
        raise InvalidLeafError(f"node {leaf} is not a leaf")
    if not net.parents[leaf]:
        raise NoParentError("the trivial network has no TH-path to extend")
    path = [leaf]
    hybrids: List[int] = []
    seen = set()
    while True:
        ps = net.parents[path[0]]
        if not ps:
            # impossible in a tree-child network
            raise NoParentError("TH-path reached the root; network is not tree-child")
        x = ps[0]
        if net.is_hybrid(x):
            return THPath(tuple(path), LeafType.H, x, tuple(hybrids))
        cs = net.children[x]
        other = cs[1] if cs[0] == path[0] else cs[0]
        if net.is_hybrid(other) and other not in seen:
            path.insert(0, x)
            hybrids.insert(0, other)
            seen.add(other)
            continue
        return THPath(tuple(path), LeafType.T, None, tuple(hybrids))


def leaf_type(net: Network, label: int) -> LeafType:
    return th_path(net, _leaf_node(net, label)).leaf_type


def _leaf_node(net: Network, label: int) -> int:
    for u, lab in net.labels.items():
        if lab == label:
            return u
    raise InvalidLeafError(f"no leaf labelled {label!r}")


def strip_th_path(net: Network, label: int) -> Tuple[Network, THPath, Tuple[int, ...]]:
    """First phase of the reduction: a copy of ``net`` with the extended
    TH-path of ``label`` deleted (ids kept, tombstoned), the path, and the
    severed parents ``w_j`` of its top node."""
    if len(net) <= 1:
        raise CannotReduceError("the trivial network cannot be reduced")
    path = th_path(net, _leaf_node(net, label))
    ws = tuple(net.parents[path.top])
    work = net.copy()
    for u in path.extended:
        work.remove_node(u)
    return work, path, ws


def reduce(net: Network, label: int) -> Tuple[Network, RecoveringData]:
    """Remove the leaf labelled ``label``; return the reduced network and
    the recovering data in the reduced network's node ids."""
    work, path, ws = strip_th_path(net, label)
    heirs = eliminate_elementary_inplace(work)
    reduced, mapping = work.compact()
    s1 = tuple(mapping[heirs[w]] for w in ws)
    s2 = tuple(mapping[heirs[v]] for v in path.hybrids)
    return reduced, FeasiblePair(path.leaf_type, s1, s2)


@dataclass(frozen=True)
class ReductionStep:
    """One link of a decomposition: ``network`` is the reduced network and
    ``pair`` its recovering data, expressed in ``network``'s ids."""

    label: int
    pair: FeasiblePair
    network: Network

    @property
    def kind(self) -> LeafType:
        return self.pair.kind

    def signature(self):
        """Id-independent form of the pair: each referenced node is replaced
        by its mu-vector (all referenced nodes are tree nodes)."""
        mu = mu_vectors(self.network)
        return (
            self.pair.kind,
            tuple(sorted(mu[x] for x in self.pair.s1)),
            tuple(mu[y] for y in self.pair.s2),
        )


def decompose(net: Network) -> List[ReductionStep]:
    """Reduce leaves n, n-1, ..., 2 in turn."""
    n = len(net.labels)
    if sorted(net.labels.values()) != list(range(1, n + 1)):
        raise InvalidLabelingError("leaf labels must be exactly 1..n")
    steps = []
    cur = net
    for label in range(n, 1, -1):
        reduced, pair = reduce(cur, label)
        steps.append(ReductionStep(label, pair, reduced))
        cur = reduced
    return steps


def replay(steps: List[ReductionStep]) -> Network:
    """Rebuild a network from its decomposition, starting from the trivial
    network and resolving every step's nodes through their mu-vectors."""
    cur = Network.trivial(1)
    for step in reversed(steps):
        kind, s1, s2 = step.signature()
        lookup = node_by_signature(cur)
        pair = FeasiblePair(
            kind, tuple(lookup["tree", m] for m in s1), tuple(lookup["tree", m] for m in s2)
        )
        cur = augment(cur, step.label, pair)
    return cur
