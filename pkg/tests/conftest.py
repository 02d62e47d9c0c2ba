import os
import sys
from functools import lru_cache

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from btcgen import FeasiblePair, GenerationConfig, Network, augment, generate_all  # noqa: E402


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", help="run the long n=6 / n=7 checks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow") or os.environ.get("BTCGEN_SLOW"):
        return
    skip = pytest.mark.skip(reason="long run; use --run-slow or BTCGEN_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running check, skipped by default")


@lru_cache(maxsize=None)
def level(n: int):
    return tuple(generate_all(GenerationConfig(n)))


def leaf(net: Network, label: int) -> int:
    return net.leaf_by_label()[label]


def node_above(net: Network, labels) -> int:
    """The lowest tree node whose leaf descendants are exactly ``labels``."""
    want = frozenset(labels)
    best = None
    for u in net.tree_nodes():
        seen, stack = set(), [u]
        while stack:
            x = stack.pop()
            if x in net.labels:
                seen.add(net.labels[x])
            stack.extend(net.children[x])
        if seen == want and (best is None or _depth(net, u) > _depth(net, best)):
            best = u
    return best


def _depth(net: Network, u: int) -> int:
    d = 0
    while net.parents[u]:
        u = net.parents[u][0]
        d += 1
    return d


def example_chain():
    """N1..N6 built by the five caption operations.  ``a`` is the parent of
    the split nodes above leaves 2 and 3 in N4, ``b`` the split above 3 and
    ``c`` the root of N5."""
    n1 = Network.trivial(1)
    n2 = augment(n1, 2, FeasiblePair.t(leaf(n1, 1)))
    n3 = augment(n2, 3, FeasiblePair.t(leaf(n2, 2)))
    n4 = augment(n3, 4, FeasiblePair.h(leaf(n3, 2), leaf(n3, 3)))
    a = node_above(n4, {2, 3, 4})
    b = n4.parents[leaf(n4, 3)][0]
    n5 = augment(n4, 5, FeasiblePair.t(a, (b, a)))
    c = n5.root()
    n6 = augment(n5, 6, FeasiblePair.h(c, c, (leaf(n5, 1),)))
    return {"chain": [n1, n2, n3, n4, n5, n6], "a": a, "b": b, "c": c}


@pytest.fixture(scope="session")
def chain6():
    return example_chain()


@pytest.fixture
def cherry():
    return Network.from_arcs([("r", "x"), ("r", "y")], {"x": 1, "y": 2})


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
