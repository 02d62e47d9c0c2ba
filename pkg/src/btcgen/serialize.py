"""Extended Newick and edge-list formats.

Both writers walk the network depth first from the root, visiting children
by (smallest reachable leaf label, then mu-vector).  Siblings never share a
mu-vector in a tree-child network, so the walk, the node names and the text
depend only on the isomorphism class.

Edge-list document::

    # btc n=<n> h=<h>
    <parent> <child>            one line per arc
    <node>                      isolated node (one-leaf network only)

Nodes are named ``L<label>`` for leaves and ``T<j>`` / ``H<j>`` for the other
tree / hybrid nodes, numbered from 1 in walk order.  In eNewick, leaves are
written as their integer label and every hybrid appears twice as ``#H<j>``,
the first occurrence carrying its child.
"""

from __future__ import annotations

import re
from typing import Dict, List, Optional, Tuple

from .augmentation import FeasiblePair, LeafType
from .errors import NotBTCError, ParseError
from .isocheck import mu_vectors
from .network import Network, validate_btc

FORMATS = ("enewick", "edgelist")


def _child_order(net: Network) -> Dict[int, List[int]]:
    mu = mu_vectors(net)

    def key(u):
        vec = mu[u]
        first = next((i for i, x in enumerate(vec) if x), len(vec))
        return first, vec

    return {u: sorted(net.children[u], key=key) for u in net.nodes()}


def _walk(net: Network) -> Tuple[List[int], Dict[int, List[int]]]:
    """Preorder of first visits and the sorted child lists."""
    order = _child_order(net)
    seen = set()
    visit: List[int] = []
    stack = [net.root()]
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        visit.append(u)
        stack.extend(reversed(order[u]))
    return visit, order


def canonical_names(net: Network) -> Dict[int, str]:
    visit, _ = _walk(net)
    names = {}
    t = h = 0
    for u in visit:
        if not net.children[u]:
            names[u] = f"L{net.labels[u]}"
        elif len(net.parents[u]) >= 2:
            h += 1
            names[u] = f"H{h}"
        else:
            t += 1
            names[u] = f"T{t}"
    return names


def to_enewick(net: Network) -> str:
    _, order = _walk(net)
    names = canonical_names(net)
    done = set()

    def rec(u: int) -> str:
        if not net.children[u]:
            return str(net.labels[u])
        if len(net.parents[u]) >= 2:
            tag = "#" + names[u]
            if u in done:
                return tag
            done.add(u)
            return "(" + ",".join(rec(c) for c in order[u]) + ")" + tag
        return "(" + ",".join(rec(c) for c in order[u]) + ")"

    return rec(net.root()) + ";"


def to_edgelist(net: Network) -> str:
    visit, order = _walk(net)
    names = canonical_names(net)
    n, _, h = net.counts()
    lines = [f"# btc n={n} h={h}"]
    if len(visit) == 1:
        lines.append(names[visit[0]])
    for u in visit:
        for c in order[u]:
            lines.append(f"{names[u]} {names[c]}")
    return "\n".join(lines) + "\n"


def serialize(net: Network, fmt: str = "enewick") -> str:
    if fmt == "enewick":
        return to_enewick(net)
    if fmt == "edgelist":
        return to_edgelist(net)
    raise ValueError(f"unknown format {fmt!r}")


# -- parsing --------------------------------------------------------------


def _position(text: str, pos: int, line0: int = 1) -> Tuple[int, int]:
    line = line0 + text.count("\n", 0, pos)
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _ENewickReader:
    _tag = re.compile(r"#[A-Za-z]*\d+")
    _int = re.compile(r"\d+")

    def __init__(self, text: str, line0: int):
        self.text = text
        self.pos = 0
        self.line0 = line0
        self.net = Network()
        self.hybrids: Dict[str, Tuple[int, bool]] = {}

    def error(self, message: str):
        line, col = _position(self.text, self.pos, self.line0)
        raise ParseError(message, line, col)

    def ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def hybrid(self, has_children: bool) -> int:
        m = self._tag.match(self.text, self.pos)
        if not m:
            self.error("malformed hybrid tag")
        tag = m.group()
        if tag in self.hybrids:
            node, defined = self.hybrids[tag]
            if defined and has_children:
                self.error(f"hybrid {tag} carries a subtree twice")
            self.hybrids[tag] = (node, defined or has_children)
        else:
            node = self.net.add_node()
            self.hybrids[tag] = (node, has_children)
        self.pos = m.end()
        return node

    def subtree(self) -> int:
        c = self.peek()
        if c == "(":
            self.pos += 1
            kids = [self.subtree()]
            while self.peek() == ",":
                self.pos += 1
                kids.append(self.subtree())
            if self.peek() != ")":
                self.error("expected ',' or ')'")
            self.pos += 1
            node = self.hybrid(True) if self.peek() == "#" else self.net.add_node()
            for k in kids:
                self.net.add_arc(node, k)
            return node
        if c == "#":
            return self.hybrid(False)
        m = self._int.match(self.text, self.pos)
        if m:
            node = self.net.add_node()
            self.net.labels[node] = int(m.group())
            self.pos = m.end()
            return node
        self.error("expected '(', a leaf label or a hybrid tag")

    def document(self) -> Network:
        self.subtree()
        if self.peek() != ";":
            self.error("expected ';'")
        self.pos += 1
        if self.peek():
            self.error("unexpected text after ';'")
        return self.net


def _finish(net: Network, validate: bool) -> Network:
    if validate:
        rep = validate_btc(net)
        if not rep.ok:
            raise NotBTCError(rep)
    return net


def parse_enewick(text: str, validate: bool = True, line0: int = 1) -> Network:
    return _finish(_ENewickReader(text, line0).document(), validate)


_HEADER = re.compile(r"#\s*btc\s+n=(\d+)\s+h=(\d+)\s*$")
_NAME = re.compile(r"[LTH]\d+$")


def parse_edgelist(text: str, validate: bool = True, line0: int = 1) -> Network:
    lines = text.split("\n")
    header = None
    arcs = []
    isolated = []
    for i, raw in enumerate(lines):
        line = raw.strip()
        lineno = line0 + i
        if not line:
            continue
        if header is None:
            m = _HEADER.match(line)
            if not m:
                raise ParseError("expected header '# btc n=<n> h=<h>'", lineno, 1)
            header = (int(m.group(1)), int(m.group(2)), lineno)
            continue
        parts = line.split()
        for j, name in enumerate(parts):
            if not _NAME.match(name):
                col = raw.index(name) + 1 if j == 0 else raw.rindex(name) + 1
                raise ParseError(f"bad node name {name!r}", lineno, col)
        if len(parts) == 2:
            arcs.append((parts[0], parts[1]))
        elif len(parts) == 1:
            isolated.append(parts[0])
        else:
            raise ParseError("expected '<parent> <child>'", lineno, 1)
    if header is None:
        raise ParseError("empty document", line0, 1)
    names = isolated + [x for arc in arcs for x in arc]
    labels = {name: int(name[1:]) for name in names if name[0] == "L"}
    net = Network.from_arcs(arcs, labels, nodes=isolated)
    n, _, h = net.counts()
    if (n, h) != header[:2]:
        raise ParseError(f"header says n={header[0]} h={header[1]}, document has n={n} h={h}", header[2], 1)
    return _finish(net, validate)


def detect_format(text: str) -> str:
    return "edgelist" if text.lstrip().startswith("#") else "enewick"


def parse(text: str, fmt: Optional[str] = None, validate: bool = True) -> Network:
    fmt = fmt or detect_format(text)
    if fmt == "enewick":
        return parse_enewick(text, validate)
    if fmt == "edgelist":
        return parse_edgelist(text, validate)
    raise ValueError(f"unknown format {fmt!r}")


def parse_many(text: str, fmt: Optional[str] = None, validate: bool = True) -> List[Network]:
    """All networks of a file: one eNewick per line, or edge-list documents
    each starting at a header line."""
    fmt = fmt or detect_format(text)
    out = []
    lines = text.split("\n")
    if fmt == "enewick":
        for i, line in enumerate(lines):
            if line.strip():
                out.append(parse_enewick(line, validate, line0=i + 1))
        return out
    starts = [i for i, line in enumerate(lines) if line.strip().startswith("#")]
    if not starts or any(line.strip() for line in lines[: starts[0]]):
        raise ParseError("expected header '# btc n=<n> h=<h>'", 1, 1)
    for a, b in zip(starts, starts[1:] + [len(lines)]):
        out.append(parse_edgelist("\n".join(lines[a:b]), validate, line0=a + 1))
    return out


# -- recovering data / pair text ------------------------------------------


def format_pair(net: Network, pair: FeasiblePair) -> str:
    """``T: S1={a}; S2=(b,a)`` with canonical node names of ``net``."""
    names = canonical_names(net)
    rank = {u: i for i, u in enumerate(_walk(net)[0])}
    s1 = ",".join(names[x] for x in sorted(pair.s1, key=rank.__getitem__))
    s2 = ",".join(names[y] for y in pair.s2)
    return f"{pair.kind}: S1={{{s1}}}; S2=({s2})"


_PAIR = re.compile(r"\s*([TH])\s*:\s*S1\s*=\s*\{([^}]*)\}\s*;\s*S2\s*=\s*\(([^)]*)\)\s*$")


def parse_pair(net: Network, spec: str) -> FeasiblePair:
    m = _PAIR.match(spec)
    if not m:
        raise ParseError("expected 'T: S1={..}; S2=(..)' or 'H: S1={..,..}; S2=(..)'", 1, 1)
    lookup = {name: u for u, name in canonical_names(net).items()}

    def nodes(group: str, start: int) -> Tuple[int, ...]:
        out = []
        for name in (x.strip() for x in group.split(",")):
            if not name:
                continue
            if name not in lookup:
                raise ParseError(f"unknown node {name!r}", 1, start + 1)
            out.append(lookup[name])
        return tuple(out)

    s1 = nodes(m.group(2), m.start(2))
    s2 = nodes(m.group(3), m.start(3))
    return FeasiblePair(LeafType(m.group(1)), s1, s2)
