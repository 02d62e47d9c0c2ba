"""Slow, independent reference implementations used only by tests.

Nothing here calls the library's feasibility, enumeration or isomorphism
code; each function re-derives its answer straight from the definitions.
"""

from __future__ import annotations

import itertools
import random
from typing import Dict, List, Set, Tuple

from btcgen import Network


def _ancestors(net: Network) -> Dict[int, Set[int]]:
    anc: Dict[int, Set[int]] = {}

    def up(u):
        if u not in anc:
            anc[u] = set()
            for p in net.parents[u]:
                anc[u] |= {p} | up(p)
        return anc[u]

    for u in net.nodes():
        up(u)
    return anc


def _is_hybrid(net: Network, u: int) -> bool:
    return len(net.parents[u]) == 2


def _sibling(net: Network, u: int):
    ps = net.parents[u]
    if len(ps) != 1:
        return None
    others = [c for c in net.children[ps[0]] if c != u]
    return others[0] if others else None


def _free(net: Network, u: int) -> bool:
    if any(_is_hybrid(net, p) for p in net.parents[u]):
        return False
    s = _sibling(net, u)
    return s is None or not _is_hybrid(net, s)


def conditions(net: Network, kind: str, s1: Tuple[int, ...], s2: Tuple[int, ...], anc=None) -> bool:
    """The four feasibility conditions, checked literally."""
    if anc is None:
        anc = _ancestors(net)
    if kind == "T" and len(s1) != 1:
        return False
    if kind == "H" and (len(s1) != 2 or set(s1) & set(s2)):
        return False
    # Condition 1
    if len(set(s2)) != len(s2):
        return False
    for a, b in itertools.combinations(s2, 2):
        if _sibling(net, a) == b and a not in s1 and b not in s1:
            return False
    # Condition 2
    for y in s2:
        if not _free(net, y) and y not in s1:
            return False
    # Condition 3
    for x in s1:
        for y in s2:
            if y in anc[x]:
                return False
    return True


def brute_feasible_pairs(net: Network, max_len: int = None) -> List[Tuple[str, Tuple[int, ...], Tuple[int, ...]]]:
    """Every feasible pair: each multiset S1, then every tuple S2 grown one
    node at a time.  All four conditions are hereditary (a prefix of a
    feasible S2 is feasible), so a failing prefix is never extended.

    ``max_len`` defaults to ``n - h``: a longer S2 would push the augmented
    network past ``n`` hybrids."""
    tree = [u for u in net.nodes() if not _is_hybrid(net, u)]
    n = sum(1 for u in net.nodes() if not net.children[u])
    h = sum(1 for u in net.nodes() if _is_hybrid(net, u))
    if max_len is None:
        max_len = n - h
    anc = _ancestors(net)
    s1s = [("T", (x,)) for x in tree]
    s1s += [("H", xy) for xy in itertools.combinations_with_replacement(tree, 2)]
    out = []

    def grow(kind, s1, s2):
        out.append((kind, s1, s2))
        if len(s2) == max_len:
            return
        for y in tree:
            t = s2 + (y,)
            if conditions(net, kind, s1, t, anc):
                grow(kind, s1, t)

    for kind, s1 in s1s:
        if conditions(net, kind, s1, (), anc):
            grow(kind, s1, ())
    return out


def brute_p(net: Network, k: int) -> int:
    """Tuples of k free tree nodes, pairwise distinct and non-sibling."""
    free = [u for u in net.nodes() if not _is_hybrid(net, u) and _free(net, u)]
    count = 0
    for tup in itertools.permutations(free, k):
        if all(_sibling(net, a) != b for a, b in itertools.combinations(tup, 2)):
            count += 1
    return count


def all_dags(n: int) -> List[Network]:
    """Every rooted DAG with at most ``3n-2`` tree nodes (leaves included),
    at most ``n-1`` nodes of indegree 2, outdegrees 2 / 1 / 0 for internal
    tree / indegree-2 / leaf nodes, and exactly ``n`` leaves, all labellings.

    Arcs are created by repeatedly filling the earliest open child slot with
    a new tree node, a new leaf, a new two-parent node (second parent still
    pending), or an already created node still waiting for its second parent.
    """
    t_max, h_max = 3 * n - 2, n - 1
    shapes: List[List[Tuple[int, int]]] = []

    # state: parents[node], open slots (parent ids, in order), kinds
    def rec(arcs, kinds, slots, pending, anc):
        if not slots:
            if not pending and kinds.count("L") == n:
                shapes.append(list(arcs))
            return
        leaves = kinds.count("L")
        trees = kinds.count("T") + leaves
        hybrids = kinds.count("H")
        p, rest = slots[0], slots[1:]
        new = len(kinds)

        def anc_of_new(parent):
            return anc[parent] | {parent}

        if trees < t_max and leaves < n:
            # internal tree node
            rec(arcs + [(p, new)], kinds + ["T"], rest + [new, new], pending, anc + [anc_of_new(p)])
            # leaf
            rec(arcs + [(p, new)], kinds + ["L"], rest, pending, anc + [anc_of_new(p)])
        if hybrids < h_max:
            rec(arcs + [(p, new)], kinds + ["H"], rest + [new], pending + [new], anc + [anc_of_new(p)])
        for hnode in pending:
            if hnode in anc[p] or hnode == p or (p, hnode) in arcs:
                continue
            # closing the hybrid: its descendants gain p's ancestry
            new_anc = list(anc)
            extra = anc[p] | {p}
            desc = {hnode}
            changed = True
            while changed:
                changed = False
                for a, b in arcs:
                    if a in desc and b not in desc:
                        desc.add(b)
                        changed = True
            if desc & extra:
                continue
            for d in desc:
                new_anc[d] = new_anc[d] | extra
            rec(arcs + [(p, hnode)], kinds, rest, [x for x in pending if x != hnode], new_anc)

    rec([], ["T"], [0, 0], [], [set()])
    # a single leaf is the only network without arcs
    nets = []
    if n == 1:
        nets.append(Network.trivial(1))
    for arcs in shapes:
        kinds_leaf = sorted({b for _, b in arcs} - {a for a, _ in arcs})
        for perm in itertools.permutations(range(1, n + 1)):
            nets.append(Network.from_arcs(arcs, dict(zip(kinds_leaf, perm)), nodes=[0]))
    return nets


def permuted(net: Network, seed: int) -> Network:
    """Copy of ``net`` with node ids shuffled and child lists reversed."""
    order = net.nodes()
    random.Random(seed).shuffle(order)
    return net.relabeled(order)
