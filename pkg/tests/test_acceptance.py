"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are collected in ``RESULTS`` and repeated in the terminal summary.
The n=6 census (about a minute of counting) is enabled with ``--run-slow``
or ``BTCGEN_SLOW=1``.
"""

import io
import itertools
import random
import time
from contextlib import contextmanager

import pytest

from btcgen import (
    GenerationConfig,
    augment,
    bound_table,
    bound_total,
    brute_force_isomorphic,
    canonical_key,
    count_exact,
    decompose,
    enumerate_feasible_pairs,
    estimate_count,
    generate_all,
    isomorphic,
    parse,
    random_network,
    reduce,
    replay,
    serialize,
    validate_btc,
)
from btcgen.cli import main
from btcgen.isocheck import mu_vectors
from btcgen.serialize import format_pair

from conftest import example_chain, level
from oracles import permuted

RESULTS = []


@contextmanager
def criterion(number, title):
    start = time.perf_counter()
    notes = []
    try:
        yield notes
    except BaseException as exc:
        line = f"criterion {number} FAIL: {title} ({type(exc).__name__}: {exc})"
        RESULTS.append(line)
        print(line)
        raise
    elapsed = time.perf_counter() - start
    extra = "; ".join(notes)
    line = f"criterion {number} PASS: {title} [{elapsed:.1f}s]" + (f" {extra}" if extra else "")
    RESULTS.append(line)
    print(line)


def cli_count(n):
    out = io.StringIO()
    assert main(["generate", "-n", str(n), "--count-only", "--jobs", "1"], out=out) == 0
    return int(out.getvalue())


def test_criterion_01_exact_counts():
    with criterion(1, "generate --count-only gives 1, 3, 66, 4059, 496710") as notes:
        t0 = time.perf_counter()
        small = [cli_count(n) for n in (1, 2, 3, 4)]
        t_small = time.perf_counter() - t0
        assert small == [1, 3, 66, 4059]
        assert t_small < 10
        t0 = time.perf_counter()
        assert cli_count(5) == 496_710
        t5 = time.perf_counter() - t0
        assert t5 < 600
        # the same number by building every network of the level
        t0 = time.perf_counter()
        assert sum(1 for _ in generate_all(GenerationConfig(5))) == 496_710
        t_gen = time.perf_counter() - t0
        assert t_gen < 600
        notes.append(f"n<=4 in {t_small:.2f}s, n=5 in {t5:.2f}s (counted) / {t_gen:.1f}s (built)")


@pytest.mark.slow
def test_criterion_02_n6_count():
    with criterion(2, "n=6 count is 101833875"):
        assert sum(count_exact(6).values()) == 101_833_875


def test_criterion_03_bound_table():
    expected = [
        1, 3, 85, 7_442, 1_317_098, 387_405_870, 169_781_857_790, 103_409_407_515_286,
        83_400_205_845_281_275, 85_947_517_732_640_544_027,
    ]
    with criterion(3, "bound totals for n=1..10 are bit-exact") as notes:
        t0 = time.perf_counter()
        table = bound_table(10)
        got = [table.total(n) for n in range(1, 11)]
        elapsed = time.perf_counter() - t0
        assert got == expected
        assert [bound_total(n) for n in (1, 5, 6)] == [expected[0], expected[4], expected[5]]
        assert elapsed < 1
        notes.append(f"table in {elapsed * 1000:.0f}ms")


def test_criterion_04_dominance():
    with criterion(4, "bounds dominate exact counts per (n, h) for n<=5"):
        table = bound_table(5)
        for n in range(1, 6):
            exact = count_exact(n)
            for h in range(n):
                assert table[n, h] >= exact.get(h, 0)
        assert (table.total(2), sum(count_exact(2).values())) == (3, 3)
        assert table.total(3) == 85 >= sum(count_exact(3).values()) == 66
        assert table.total(4) == 7442 >= sum(count_exact(4).values()) == 4059


def _pair_signature(net, pair):
    mu = mu_vectors(net)
    return pair.kind, tuple(sorted(mu[x] for x in pair.s1)), tuple(mu[y] for y in pair.s2)


def test_criterion_05_round_trips():
    with criterion(5, "reduce/augment round trips") as notes:
        checked_a = 0
        for n in range(2, 5):
            for net in level(n):
                for label in range(1, n + 1):
                    reduced, pair = reduce(net, label)
                    assert isomorphic(augment(reduced, label, pair), net)
                    checked_a += 1
        checked_b = 0
        for net in level(3):
            for pair in enumerate_feasible_pairs(net):
                back, data = reduce(augment(net, 4, pair), 4)
                assert isomorphic(back, net)
                assert _pair_signature(back, data) == _pair_signature(net, pair)
                checked_b += 1
        assert checked_b == 4059
        notes.append(f"{checked_a} reductions, {checked_b} augmentations")


def test_criterion_06_unicity():
    with criterion(6, "no isomorphic duplicates; oracles agree") as notes:
        btc3 = level(3)
        pairs3 = list(itertools.combinations(btc3, 2))
        assert len(pairs3) == 2145
        assert not any(isomorphic(a, b) for a, b in pairs3)
        btc4 = level(4)
        rng = random.Random(4)
        sampled = 0
        for _ in range(20_000):
            a, b = rng.sample(range(len(btc4)), 2)
            assert not isomorphic(btc4[a], btc4[b])
            sampled += 1
        assert len({canonical_key(net) for net in btc4}) == 4059
        small = list(level(1)) + list(level(2)) + list(btc3)
        agree = 0
        for a, b in itertools.combinations_with_replacement(small, 2):
            assert isomorphic(a, b) == brute_force_isomorphic(a, b)
            agree += 1
        notes.append(f"{sampled} sampled BTC_4 pairs, {agree} oracle comparisons")


def _structural(net, n):
    nn, t, h = net.counts()
    rep = validate_btc(net)
    assert rep.ok, rep.rules
    assert nn == n and t - h == 2 * n - 1 and h <= n - 1
    assert len(net.roots()) == 1


def test_criterion_07_structural_invariants():
    with criterion(7, "t-h=2n-1, h<=n-1, single root, acyclic, tree-child") as notes:
        count = 0
        for n in range(1, 5):
            for net in level(n):
                _structural(net, n)
                count += 1
                if n > 1:
                    for label in range(2, n + 1):
                        reduced, _ = reduce(net, label)
                        _structural(reduced, n - 1)
                        count += 1
        for net in level(3):
            for pair in enumerate_feasible_pairs(net):
                _structural(augment(net, 4, pair), 4)
                count += 1
        for n in (5, 8, 12):
            for i in range(100):
                _structural(random_network(n, 7, i), n)
                count += 1
        for n, net in enumerate(example_chain()["chain"], 1):
            _structural(net, n)
            count += 1
        notes.append(f"{count} networks")


def test_criterion_08_example_chain():
    with criterion(8, "six-step example chain replays and decomposes"):
        chain = example_chain()["chain"]
        n6 = chain[5]
        assert n6.n_hybrids == 5
        steps = decompose(n6)
        ops = [
            f"N{s.label} = {s.kind.value}^-1(N{s.label - 1}, {s.label}; {format_pair(s.network, s.pair)})"
            for s in reversed(steps)
        ]
        assert ops == [
            "N2 = T^-1(N1, 2; T: S1={L1}; S2=())",
            "N3 = T^-1(N2, 3; T: S1={L2}; S2=())",
            "N4 = H^-1(N3, 4; H: S1={L2,L3}; S2=())",
            "N5 = T^-1(N4, 5; T: S1={T2}; S2=(T4,T2))",
            "N6 = H^-1(N5, 6; H: S1={T1,T1}; S2=(L1))",
        ]
        for step, expected in zip(reversed(steps), chain[:5]):
            assert isomorphic(step.network, expected)
        assert isomorphic(replay(steps), n6)


def test_criterion_09_estimator_exact_mode():
    with criterion("9a", "estimate_count in exact mode at n=3 gives 66"):
        rep = estimate_count(3)
        assert rep.exact and rep.estimate == 66


def test_criterion_09_estimator_n7():
    target = 3.15e10
    with criterion("9b", "advisory: n=7 estimate within 5% of 3.15e10") as notes:
        rep = estimate_count(7, 20_000, seed=1)
        notes.append(f"estimate {rep.estimate:.4g} +- {rep.stderr:.2g}")
        assert abs(rep.estimate - target) <= 0.05 * target


def test_criterion_10_serialization():
    with criterion(10, "serialization round trips and canonical form") as notes:
        count = 0
        for net in level(3):
            for fmt in ("enewick", "edgelist"):
                text = serialize(net, fmt)
                assert isomorphic(parse(text, fmt), net)
                assert serialize(permuted(net, count), fmt) == text
            count += 1
        for n in (5, 8, 12):
            for i in range(1000):
                net = random_network(n, 10, i)
                for fmt in ("enewick", "edgelist"):
                    text = serialize(net, fmt)
                    assert isomorphic(parse(text, fmt), net)
                    assert serialize(permuted(net, i), fmt) == text
                count += 1
        notes.append(f"{count} networks, both formats")
