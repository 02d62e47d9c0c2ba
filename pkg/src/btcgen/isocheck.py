"""Isomorphism oracle for leaf-labelled tree-child networks.

For tree-child networks, the multiset of per-node path-count vectors
(tagged with tree/hybrid) determines the network up to isomorphism.  A
plain backtracking search is kept alongside as an independent check.
"""

from __future__ import annotations

from collections import Counter
from typing import Dict, List, Optional, Tuple

from .errors import TooLargeError
from .network import Network, topological_order

Mu = Tuple[int, ...]


def mu_vectors(net: Network) -> Dict[int, Mu]:
    """``mu[u][i]`` = number of directed paths from ``u`` to the i-th
    smallest leaf label."""
    order = sorted(net.labels.values())
    pos = {lab: i for i, lab in enumerate(order)}
    width = len(order)
    mu: Dict[int, Mu] = {}
    for u in reversed(topological_order(net)):
        cs = net.children[u]
        if not cs:
            vec = [0] * width
            if u in net.labels:
                vec[pos[net.labels[u]]] = 1
            mu[u] = tuple(vec)
        elif len(cs) == 1:
            mu[u] = mu[cs[0]]
        else:
            mu[u] = tuple(map(sum, zip(*(mu[c] for c in cs))))
    return mu


def _kind_class(net: Network, u: int) -> str:
    return "hybrid" if len(net.parents[u]) >= 2 else "tree"


def mu_signatures(net: Network) -> Counter:
    """Multiset of ``(kind-class, mu)`` over all nodes."""
    mu = mu_vectors(net)
    return Counter((_kind_class(net, u), vec) for u, vec in mu.items())


def canonical_key(net: Network) -> tuple:
    """Hashable isomorphism invariant (complete for BTC networks)."""
    mu = mu_vectors(net)
    sig = sorted((_kind_class(net, u), vec) for u, vec in mu.items())
    return (tuple(sorted(net.labels.values())), tuple(sig))


def isomorphic(a: Network, b: Network) -> bool:
    if a.label_set() != b.label_set() or len(a) != len(b):
        return False
    return mu_signatures(a) == mu_signatures(b)


def node_by_signature(net: Network) -> Dict[Tuple[str, Mu], int]:
    """Inverse of the kind-tagged mu map (injective on BTC networks)."""
    mu = mu_vectors(net)
    return {(_kind_class(net, u), vec): u for u, vec in mu.items()}


def _invariants(net: Network):
    return (net.counts(), net.label_set(), len(net.arcs()))


def _search(a: Network, b: Network, max_nodes: int, find_all: bool) -> List[Dict[int, int]]:
    for net in (a, b):
        if len(net) > max_nodes:
            raise TooLargeError(f"brute-force search capped at {max_nodes} nodes")
    if _invariants(a) != _invariants(b):
        return []
    ra, rb = a.roots(), b.roots()
    if len(ra) != 1 or len(rb) != 1:
        return []
    # BFS order from the root: every node after the root has a placed parent
    order, seen = [ra[0]], {ra[0]}
    for u in order:
        for c in a.children[u]:
            if c not in seen:
                seen.add(c)
                order.append(c)
    if len(order) != len(a):
        return []

    def compatible(u: int, v: int) -> bool:
        return (
            a.degree(u) == b.degree(v)
            and a.labels.get(u) == b.labels.get(v)
        )

    phi: Dict[int, int] = {}
    used = set()
    found: List[Dict[int, int]] = []

    def consistent(u: int, v: int) -> bool:
        for p in a.parents[u]:
            if p in phi and phi[p] not in b.parents[v]:
                return False
        for c in a.children[u]:
            if c in phi and phi[c] not in b.children[v]:
                return False
        return True

    def extend(i: int) -> bool:
        if i == len(order):
            found.append(dict(phi))
            return not find_all
        u = order[i]
        if i == 0:
            candidates = rb
        else:
            p = next(p for p in a.parents[u] if p in phi)
            candidates = b.children[phi[p]]
        for v in candidates:
            if v in used or not compatible(u, v) or not consistent(u, v):
                continue
            phi[u] = v
            used.add(v)
            if extend(i + 1):
                return True
            del phi[u]
            used.discard(v)
        return False

    extend(0)
    return found


def brute_force_isomorphism(a: Network, b: Network, max_nodes: int = 20) -> Optional[Dict[int, int]]:
    found = _search(a, b, max_nodes, find_all=False)
    return found[0] if found else None


def brute_force_isomorphic(a: Network, b: Network, max_nodes: int = 20) -> bool:
    """Backtracking search for a label-preserving digraph isomorphism."""
    return brute_force_isomorphism(a, b, max_nodes) is not None


def automorphisms(net: Network, max_nodes: int = 20) -> List[Dict[int, int]]:
    return _search(net, net, max_nodes, find_all=True)
