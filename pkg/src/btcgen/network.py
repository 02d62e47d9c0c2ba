"""Network data model, structural validation and graph surgery.

A :class:`Network` is a rooted DAG whose nodes are dense integer ids.  Each
node keeps an ordered child list and parent list; the order is only an
artifact of construction.  Deleted nodes are tombstoned (their adjacency is
set to ``None``) until :meth:`Network.compact` renumbers the survivors.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Optional, Tuple

from .errors import (
    EmptyNetworkError,
    InvalidLabelError,
    InvalidNodeError,
    NotADagError,
)

NodeId = int


class NodeKind(enum.Enum):
    ROOT = "root"
    INTERNAL_TREE = "internal-tree"
    LEAF = "leaf"
    HYBRID = "hybrid"
    ELEMENTARY = "elementary"
    INVALID = "invalid"

    @property
    def is_tree(self) -> bool:
        return self in _TREE_KINDS


_TREE_KINDS = frozenset({NodeKind.ROOT, NodeKind.INTERNAL_TREE, NodeKind.LEAF})

_KIND_BY_DEGREE = {
    (0, 2): NodeKind.ROOT,
    (1, 2): NodeKind.INTERNAL_TREE,
    (1, 0): NodeKind.LEAF,
    (0, 0): NodeKind.LEAF,  # the one-node network
    (2, 1): NodeKind.HYBRID,
    (1, 1): NodeKind.ELEMENTARY,
    (0, 1): NodeKind.ELEMENTARY,
}

_BTC_DEGREES = frozenset({(0, 2), (1, 2), (1, 0), (2, 1), (0, 0)})
_TREE_DEGREES = frozenset({(0, 2), (1, 2), (1, 0), (0, 0)})


class Network:
    """Rooted leaf-labelled DAG.

    ``children[u]`` and ``parents[u]`` are lists of node ids (``None`` for a
    deleted node); ``labels`` maps leaf ids to positive integers.
    """

    __slots__ = ("children", "parents", "labels", "_cache")

    def __init__(
        self,
        children: Optional[List[Optional[List[int]]]] = None,
        parents: Optional[List[Optional[List[int]]]] = None,
        labels: Optional[Dict[int, int]] = None,
    ):
        self.children = children if children is not None else []
        self.parents = parents if parents is not None else []
        self.labels = labels if labels is not None else {}
        self._cache = None

    # -- construction -----------------------------------------------------

    @classmethod
    def trivial(cls, label: int = 1) -> "Network":
        if not isinstance(label, int) or label < 1:
            raise InvalidLabelError(f"labels must be positive integers, got {label!r}")
        return cls([[]], [[]], {0: label})

    @classmethod
    def from_arcs(
        cls,
        arcs: Iterable[Tuple[Hashable, Hashable]],
        labels: Optional[Dict[Hashable, int]] = None,
        nodes: Iterable[Hashable] = (),
    ) -> "Network":
        """Build a network from arbitrary node names.

        Ids are assigned in order of first appearance (``nodes`` first, then
        arc endpoints).  ``labels`` maps node names to leaf labels.
        """
        index: Dict[Hashable, int] = {}
        net = cls()

        def node(name):
            if name not in index:
                index[name] = net.add_node()
            return index[name]

        for name in nodes:
            node(name)
        for u, v in arcs:
            net.add_arc(node(u), node(v))
        for name, label in (labels or {}).items():
            net.labels[node(name)] = label
        return net

    def copy(self) -> "Network":
        other = Network.__new__(Network)
        other.children = [c[:] if c is not None else None for c in self.children]
        other.parents = [p[:] if p is not None else None for p in self.parents]
        other.labels = dict(self.labels)
        other._cache = None
        return other

    def __getstate__(self):
        return (self.children, self.parents, self.labels)

    def __setstate__(self, state):
        self.children, self.parents, self.labels = state
        self._cache = None

    # -- inspection -------------------------------------------------------

    def __len__(self) -> int:
        return sum(1 for c in self.children if c is not None)

    def nodes(self) -> List[int]:
        return [u for u, c in enumerate(self.children) if c is not None]

    def arcs(self) -> List[Tuple[int, int]]:
        return [(u, v) for u, cs in enumerate(self.children) if cs is not None for v in cs]

    def is_live(self, u: int) -> bool:
        return isinstance(u, int) and 0 <= u < len(self.children) and self.children[u] is not None

    def check_node(self, u: int) -> None:
        if not self.is_live(u):
            raise InvalidNodeError(f"node {u!r} is not a live node of this network")

    def degree(self, u: int) -> Tuple[int, int]:
        return len(self.parents[u]), len(self.children[u])

    def kind(self, u: int) -> NodeKind:
        return _KIND_BY_DEGREE.get((len(self.parents[u]), len(self.children[u])), NodeKind.INVALID)

    def is_tree(self, u: int) -> bool:
        return (len(self.parents[u]), len(self.children[u])) in _TREE_DEGREES

    def is_hybrid(self, u: int) -> bool:
        return len(self.parents[u]) == 2 and len(self.children[u]) == 1

    def is_leaf(self, u: int) -> bool:
        return len(self.children[u]) == 0 and len(self.parents[u]) <= 1

    def leaves(self) -> List[int]:
        return [u for u, c in enumerate(self.children) if c is not None and not c]

    def tree_nodes(self) -> List[int]:
        return [u for u in self.nodes() if self.kind(u).is_tree]

    def hybrid_nodes(self) -> List[int]:
        return [u for u in self.nodes() if self.is_hybrid(u)]

    def roots(self) -> List[int]:
        return [u for u, p in enumerate(self.parents) if p is not None and not p]

    def root(self) -> int:
        roots = self.roots()
        if len(roots) != 1:
            raise InvalidNodeError(f"network has {len(roots)} roots")
        return roots[0]

    def leaf_by_label(self) -> Dict[int, int]:
        return {label: u for u, label in self.labels.items()}

    def label_set(self) -> frozenset:
        return frozenset(self.labels.values())

    @property
    def n_leaves(self) -> int:
        return len(self.labels)

    @property
    def n_hybrids(self) -> int:
        return sum(1 for p in self.parents if p is not None and len(p) == 2)

    def counts(self) -> Tuple[int, int, int]:
        """Return ``(n, t, h)``: leaves, tree nodes and hybrid nodes."""
        n = t = h = 0
        for u in self.nodes():
            k = self.kind(u)
            if k is NodeKind.HYBRID:
                h += 1
            elif k.is_tree:
                t += 1
                if k is NodeKind.LEAF:
                    n += 1
        return n, t, h

    def sibling(self, u: int) -> Optional[int]:
        """The other child of the (single) parent of ``u``, if any."""
        ps = self.parents[u]
        if len(ps) != 1:
            return None
        cs = self.children[ps[0]]
        if len(cs) != 2:
            return None
        return cs[1] if cs[0] == u else cs[0]

    # -- mutation ---------------------------------------------------------

    def add_node(self) -> int:
        self.children.append([])
        self.parents.append([])
        self._cache = None
        return len(self.children) - 1

    def add_arc(self, u: int, v: int) -> None:
        self.children[u].append(v)
        self.parents[v].append(u)
        self._cache = None

    def remove_node(self, u: int) -> None:
        """Delete ``u`` and its incident arcs (tombstone until compaction)."""
        self.check_node(u)
        for c in self.children[u]:
            self.parents[c].remove(u)
        for p in self.parents[u]:
            self.children[p].remove(u)
        self.children[u] = None
        self.parents[u] = None
        self.labels.pop(u, None)
        self._cache = None

    def split_above(self, u: int) -> int:
        """Insert a new node immediately above ``u`` and return it.

        Every arc ``(v, u)`` becomes ``(v, new)`` (keeping its position in
        ``v``'s child list) and the arc ``(new, u)`` is added.
        """
        self.check_node(u)
        new = self.add_node()
        for v in self.parents[u]:
            cs = self.children[v]
            cs[cs.index(u)] = new
        self.parents[new] = self.parents[u]
        self.parents[u] = [new]
        self.children[new] = [u]
        return new

    def compact(self) -> Tuple["Network", Dict[int, int]]:
        """Return a tombstone-free copy and the old-id -> new-id mapping."""
        mapping = {u: i for i, u in enumerate(self.nodes())}
        children = [[mapping[v] for v in self.children[u]] for u in mapping]
        parents = [[mapping[v] for v in self.parents[u]] for u in mapping]
        labels = {mapping[u]: lab for u, lab in self.labels.items()}
        return Network(children, parents, labels), mapping

    def relabeled(self, order: List[int]) -> "Network":
        """Copy with node ``order[i]`` renamed ``i`` (and child lists permuted
        accordingly); used to build id-permuted isomorphic copies."""
        pos = {u: i for i, u in enumerate(order)}
        children = [[pos[v] for v in reversed(self.children[u])] for u in order]
        parents = [[pos[v] for v in self.parents[u]] for u in order]
        labels = {pos[u]: lab for u, lab in self.labels.items()}
        return Network(children, parents, labels)

    # -- misc -------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return (
            sorted(self.arcs()) == sorted(other.arcs())
            and self.nodes() == other.nodes()
            and self.labels == other.labels
        )

    __hash__ = None  # mutable

    def __repr__(self) -> str:
        n, t, h = self.counts()
        return f"Network(n={n}, t={t}, h={h}, arcs={self.arcs()}, labels={self.labels})"


def new_trivial(label: int = 1) -> Network:
    return Network.trivial(label)


def split_above(net: Network, u: int) -> int:
    return net.split_above(u)


def topological_order(net: Network) -> List[int]:
    """Kahn's algorithm; raises :class:`NotADagError` on a cycle."""
    indeg = {u: len(net.parents[u]) for u in net.nodes()}
    stack = [u for u, d in indeg.items() if d == 0]
    order = []
    while stack:
        u = stack.pop()
        order.append(u)
        for v in net.children[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                stack.append(v)
    if len(order) != len(indeg):
        raise NotADagError("network contains a directed cycle")
    return order


class Reachability:
    """Descendant closure stored as one bitmask per node (bit ``v`` of
    ``desc[u]`` is set iff ``v`` is reachable from ``u``, including ``u``)."""

    __slots__ = ("desc",)

    def __init__(self, net: Network):
        desc = [0] * len(net.children)
        for u in reversed(topological_order(net)):
            m = 1 << u
            for v in net.children[u]:
                m |= desc[v]
            desc[u] = m
        self.desc = desc

    def is_descendant(self, a: int, b: int) -> bool:
        return bool(self.desc[b] >> a & 1)

    def is_proper_descendant(self, a: int, b: int) -> bool:
        """True iff a nontrivial directed path ``b -> ... -> a`` exists."""
        return a != b and bool(self.desc[b] >> a & 1)

    def descendants(self, u: int) -> List[int]:
        m, out, i = self.desc[u], [], 0
        while m:
            if m & 1:
                out.append(i)
            m >>= 1
            i += 1
        return out


def reachability(net: Network) -> Reachability:
    return Reachability(net)


def _elementary(net: Network, u: int) -> bool:
    return len(net.children[u]) == 1 and len(net.parents[u]) <= 1


def eliminate_elementary_inplace(net: Network) -> Dict[int, int]:
    """Eliminate every maximal elementary path of ``net`` in place.

    Returns a map from each removed node to its heir.  A path with a grantor
    is replaced by the arc grantor -> heir; a grantorless path is simply
    deleted, leaving its heir as a root.  Ids are left tombstoned.
    """
    elem = {u for u in net.nodes() if _elementary(net, u)}
    if not elem:
        return {}
    heirs: Dict[int, int] = {}
    limit = len(elem)
    for u in sorted(elem):
        if u in heirs:
            continue
        top, steps = u, 0
        while net.parents[top] and net.parents[top][0] in elem:
            top = net.parents[top][0]
            steps += 1
            if steps > limit:
                raise NotADagError("elementary nodes form a cycle")
        path = [top]
        x = top
        while True:
            c = net.children[x][0]
            if c not in elem:
                heir = c
                break
            path.append(c)
            x = c
            if len(path) > limit:
                raise NotADagError("elementary nodes form a cycle")
        grantor = net.parents[top][0] if net.parents[top] else None
        hp = net.parents[heir]
        if grantor is None:
            hp.remove(path[-1])
        else:
            hp[hp.index(path[-1])] = grantor
            gc = net.children[grantor]
            gc[gc.index(top)] = heir
        for p in path:
            net.children[p] = None
            net.parents[p] = None
            net.labels.pop(p, None)
            heirs[p] = heir
    net._cache = None
    if not any(c is not None for c in net.children):
        raise EmptyNetworkError("elimination removed every node")
    return heirs


def eliminate_elementary(net: Network) -> Network:
    """Copying form: eliminate all elementary paths and compact the ids."""
    work = net.copy()
    eliminate_elementary_inplace(work)
    return work.compact()[0]


@dataclass
class ValidationReport:
    violations: List[Tuple[str, frozenset]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def rules(self) -> List[str]:
        return [rule for rule, _ in self.violations]

    def add(self, rule: str, nodes: Iterable[int] = ()) -> None:
        self.violations.append((rule, frozenset(nodes)))

    def __bool__(self) -> bool:
        return self.ok


def validate_btc(net: Network) -> ValidationReport:
    """Check every BTC rule and report all violations (never raises)."""
    rep = ValidationReport()
    nodes = net.nodes()
    if not nodes:
        rep.add("empty")
        return rep
    roots = net.roots()
    if len(roots) != 1:
        rep.add("root-count", roots)
    bad_arcs = set()
    for u in nodes:
        cs = net.children[u]
        if u in cs or len(set(cs)) != len(cs):
            bad_arcs.add(u)
    if bad_arcs:
        rep.add("multi-arc", bad_arcs)
    try:
        topological_order(net)
    except NotADagError:
        # nodes not removable by Kahn's algorithm lie on or below a cycle
        indeg = {u: len(net.parents[u]) for u in nodes}
        stack = [u for u, d in indeg.items() if d == 0]
        seen = set()
        while stack:
            u = stack.pop()
            seen.add(u)
            for v in net.children[u]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    stack.append(v)
        rep.add("cycle", set(nodes) - seen)
    bad_degree = [u for u in nodes if net.degree(u) not in _BTC_DEGREES]
    if bad_degree:
        rep.add("degree", bad_degree)
    not_tc = [
        u for u in nodes
        if net.children[u] and not any(net.kind(c).is_tree for c in net.children[u])
    ]
    if not_tc:
        rep.add("tree-child", not_tc)
    leaves = set(net.leaves())
    bad_labels = set(leaves - set(net.labels))
    bad_labels |= {u for u in net.labels if u not in leaves}
    seen_labels: Dict[int, int] = {}
    for u, lab in net.labels.items():
        if not isinstance(lab, int) or lab < 1:
            bad_labels.add(u)
        elif lab in seen_labels:
            bad_labels.update((u, seen_labels[lab]))
        else:
            seen_labels[lab] = u
    if bad_labels:
        rep.add("labels", bad_labels)
    if not bad_degree:
        n, t, h = net.counts()
        if t - h != 2 * n - 1:
            rep.add("node-count")
        if h > n - 1:
            rep.add("hybrid-bound", net.hybrid_nodes())
    return rep

