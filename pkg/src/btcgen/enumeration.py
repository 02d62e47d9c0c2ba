"""Feasible-pair enumeration, offspring, exhaustive generation of BTC_n,
random construction and offspring-based count estimation.

Pairs of a network are enumerated directly from the feasibility conditions:
once ``S1`` is fixed, the admissible members of ``S2`` are the free tree
nodes (no hybrid parent, no hybrid sibling) that are not proper ancestors of
an ``S1`` node, plus ``tau`` itself for T-pairs; two siblings may not both
be chosen.  The same structure gives closed-form pair counts (used when only
the size of the last level is needed) and exact uniform sampling.
"""

from __future__ import annotations

import bisect
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .augmentation import FeasiblePair, LeafType, augment, pair_context
from .errors import InsufficientSamplesError
from .network import Network

SEED_MAX = 2**64 - 1


@dataclass(frozen=True)
class GenerationConfig:
    n: int
    h_filter: Optional[Tuple[int, int]] = None
    parallelism: int = 1
    order: str = "deterministic"

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if self.h_filter is not None:
            lo, hi = self.h_filter
            if not 0 <= lo <= hi <= self.n - 1:
                raise ValueError(f"hybrid range {lo}..{hi} not within 0..{self.n - 1}")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        if self.order not in ("deterministic", "any"):
            raise ValueError(f"unknown order {self.order!r}")

    @property
    def h_range(self) -> Tuple[int, int]:
        return self.h_filter if self.h_filter is not None else (0, self.n - 1)


# -- pair enumeration -----------------------------------------------------


def _bits(mask: int) -> List[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _tuples(cands: Sequence[int], sib: Sequence[int], k_max: int, exempt: int) -> List[List[tuple]]:
    """Ordered tuples of distinct candidates, no two of them siblings unless
    one is ``exempt``; grouped by length, lexicographic within a length."""
    by_len: List[List[tuple]] = [[] for _ in range(k_max + 1)]
    by_len[0].append(())
    if k_max == 0:
        return by_len

    def rec(prefix: list, used: set):
        k = len(prefix)
        for y in cands:
            if y in used:
                continue
            if y != exempt:
                s = sib[y]
                if s >= 0 and s in used and s != exempt:
                    continue
            prefix.append(y)
            by_len[k + 1].append(tuple(prefix))
            if k + 1 < k_max:
                used.add(y)
                rec(prefix, used)
                used.discard(y)
            prefix.pop()

    rec([], set())
    return by_len


def enumerate_feasible_pairs(net: Network, max_new_hybrids: Optional[int] = None) -> Iterator[FeasiblePair]:
    """Every feasible pair adding at most ``max_new_hybrids`` hybrids, once
    each, ordered by (T before H, |S2|, S1, S2)."""
    if max_new_hybrids is None:
        max_new_hybrids = len(net.children)
    if max_new_hybrids < 0:
        return iter(())
    ctx = pair_context(net)
    tree, sib, free, anc = ctx.tree, ctx.sib, ctx.free, ctx.anc
    found = []
    for tau in tree:
        allowed = free & ~anc[tau] & ~(1 << tau)
        cands = sorted(_bits(allowed) + [tau])
        for k, group in enumerate(_tuples(cands, sib, min(max_new_hybrids, len(cands)), tau)):
            for s2 in group:
                found.append((0, k, (tau,), s2))
    if max_new_hybrids >= 1:
        for i, t1 in enumerate(tree):
            for t2 in tree[i:]:
                allowed = free & ~(anc[t1] | anc[t2] | (1 << t1) | (1 << t2))
                cands = _bits(allowed)
                k_max = min(max_new_hybrids - 1, len(cands))
                for k, group in enumerate(_tuples(cands, sib, k_max, -1)):
                    for s2 in group:
                        found.append((1, k, (t1, t2), s2))
    found.sort()
    return (FeasiblePair(LeafType.H if h else LeafType.T, s1, s2) for h, _, s1, s2 in found)


# -- closed-form pair counting --------------------------------------------


@lru_cache(maxsize=None)
def _ordered_counts(singles: int, pairs: int) -> Tuple[int, ...]:
    """``c[k]`` = ordered k-tuples drawn from ``singles`` unconstrained nodes
    and ``pairs`` sibling pairs (at most one node per pair):
    ``k! [x^k] (1+x)^singles (1+2x)^pairs``."""
    size = singles + pairs
    coef = [0] * (size + 1)
    for j in range(pairs + 1):
        cj = math.comb(pairs, j) << j
        for i in range(singles + 1):
            coef[i + j] += cj * math.comb(singles, i)
    return tuple(c * math.factorial(k) for k, c in enumerate(coef))


def _structure(ctx, allowed: int) -> Tuple[int, int]:
    d = 0
    for m in ctx.free_pairs:
        if allowed & m == m:
            d += 1
    return allowed.bit_count() - 2 * d, d


def count_feasible_pairs(net: Network, max_new_hybrids: Optional[int] = None) -> Dict[int, int]:
    """Number of feasible pairs per hybrid delta, without listing them."""
    ctx = pair_context(net)
    tree, free, anc = ctx.tree, ctx.free, ctx.anc
    cap = len(net.children) + 1 if max_new_hybrids is None else max_new_hybrids
    out: Dict[int, int] = {}
    if cap < 0:
        return out
    for tau in tree:
        s, d = _structure(ctx, free & ~anc[tau] & ~(1 << tau))
        # tau itself may join S2 and frees its own sibling: one extra single
        for k, c in enumerate(_ordered_counts(s + 1, d)):
            if k > cap:
                break
            out[k] = out.get(k, 0) + c
    for i, t1 in enumerate(tree):
        for t2 in tree[i:]:
            s, d = _structure(ctx, free & ~(anc[t1] | anc[t2] | (1 << t1) | (1 << t2)))
            for k, c in enumerate(_ordered_counts(s, d)):
                if k + 1 > cap:
                    break
                out[k + 1] = out.get(k + 1, 0) + c
    return out


def offspring_count(net: Network, max_new_hybrids: Optional[int] = None) -> int:
    return sum(count_feasible_pairs(net, max_new_hybrids).values())


# -- uniform pair sampling ------------------------------------------------


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 generator for substream ``stream`` of ``seed``."""
    if not isinstance(seed, (int, np.integer)) or not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=stream)))


def uniform_below(rng: np.random.Generator, bound: int) -> int:
    """Uniform integer in ``[0, bound)`` for arbitrarily large ``bound``."""
    if bound <= 0:
        raise ValueError("bound must be positive")
    if bound < 2**63:
        return int(rng.integers(bound))
    nbits = bound.bit_length()
    nbytes = (nbits + 7) // 8
    mask = (1 << nbits) - 1
    while True:
        x = int.from_bytes(rng.bytes(nbytes), "little") & mask
        if x < bound:
            return x


def _sample_set(rng, singles: List[int], pairs: List[Tuple[int, int]], k: int) -> List[int]:
    weights = [
        math.comb(len(pairs), j) * (1 << j) * math.comb(len(singles), k - j)
        for j in range(min(k, len(pairs)) + 1)
    ]
    x = uniform_below(rng, sum(weights))
    j = 0
    while x >= weights[j]:
        x -= weights[j]
        j += 1
    chosen = []
    for idx in sorted(rng.choice(len(pairs), size=j, replace=False).tolist()) if j else []:
        chosen.append(pairs[idx][int(rng.integers(2))])
    if k - j:
        chosen.extend(singles[i] for i in sorted(rng.choice(len(singles), size=k - j, replace=False).tolist()))
    return [chosen[i] for i in rng.permutation(len(chosen)).tolist()]


def _groups(ctx, allowed: int):
    pair_list = []
    paired = 0
    for m in ctx.free_pairs:
        if allowed & m == m:
            a, b = _bits(m)
            pair_list.append((a, b))
            paired |= m
    return _bits(allowed & ~paired), pair_list


def sample_feasible_pair(net: Network, rng: np.random.Generator) -> FeasiblePair:
    """A feasible pair drawn uniformly among all feasible pairs of ``net``."""
    ctx = pair_context(net)
    tree, free, anc = ctx.tree, ctx.free, ctx.anc
    options = []  # (weight, kind, s1, allowed)
    for tau in tree:
        allowed = free & ~anc[tau] & ~(1 << tau)
        s, d = _structure(ctx, allowed)
        options.append((sum(_ordered_counts(s + 1, d)), LeafType.T, (tau,), allowed))
    for i, t1 in enumerate(tree):
        for t2 in tree[i:]:
            allowed = free & ~(anc[t1] | anc[t2] | (1 << t1) | (1 << t2))
            s, d = _structure(ctx, allowed)
            options.append((sum(_ordered_counts(s, d)), LeafType.H, (t1, t2), allowed))
    x = uniform_below(rng, sum(o[0] for o in options))
    for weight, kind, s1, allowed in options:
        if x < weight:
            break
        x -= weight
    singles, pairs = _groups(ctx, allowed)
    if kind is LeafType.T:
        singles = sorted(singles + [s1[0]])
    counts = _ordered_counts(len(singles), len(pairs))
    k = 0
    while x >= counts[k]:
        x -= counts[k]
        k += 1
    return FeasiblePair(kind, s1, tuple(_sample_set(rng, singles, pairs, k)))


# -- offspring and generation ---------------------------------------------


def offspring(net: Network, cap: Optional[int] = None) -> Iterator[Network]:
    label = max(net.labels.values()) + 1
    for pair in enumerate_feasible_pairs(net, cap):
        yield augment(net, label, pair)


def _expand(net: Network, k: int, n: int, hmax: int) -> Iterator[Network]:
    if k == n:
        yield net
        return
    cap = hmax - net.n_hybrids
    for pair in enumerate_feasible_pairs(net, cap):
        yield from _expand(augment(net, k + 1, pair), k + 1, n, hmax)


def _level(n: int, hmax: int) -> Iterator[Network]:
    return _expand(Network.trivial(1), 1, n, hmax)


def _split_level(n: int) -> int:
    # BTC_3 has 66 networks, BTC_4 4059: enough tasks to balance workers
    return min(n - 1, 3 if n <= 5 else 4)


def _chunks(items: List, size: int) -> List[List]:
    return [items[i:i + size] for i in range(0, len(items), size)]


def _tasks(cfg: GenerationConfig, jobs: int) -> Tuple[int, List[List[Network]]]:
    m = _split_level(cfg.n)
    hmax = cfg.h_range[1]
    roots = list(_level(m, hmax))
    size = max(1, math.ceil(len(roots) / (8 * jobs)))
    return m, _chunks(roots, size)


def _generate_task(args) -> List[Network]:
    nets, k, n, (lo, hi) = args
    return [
        out for net in nets for out in _expand(net, k, n, hi) if lo <= out.n_hybrids <= hi
    ]


def _ordered_map(fn, tasks: List, jobs: int) -> Iterator:
    """Parallel ``map`` yielding results in task order, with a bounded number
    of tasks in flight."""
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        pending = []
        it = iter(tasks)
        for task in it:
            pending.append(pool.submit(fn, task))
            if len(pending) >= 2 * jobs:
                break
        while pending:
            result = pending.pop(0).result()
            for task in it:
                pending.append(pool.submit(fn, task))
                break
            yield result


def generate_all(cfg: GenerationConfig) -> Iterator[Network]:
    """Stream BTC_n (optionally restricted to a hybrid range), each network
    exactly once.  Parallel mode yields the same sequence."""
    lo, hi = cfg.h_range
    if cfg.parallelism == 1 or cfg.n <= 2:
        for net in _level(cfg.n, hi):
            if net.n_hybrids >= lo:
                yield net
        return
    m, chunks = _tasks(cfg, cfg.parallelism)
    tasks = [(chunk, m, cfg.n, (lo, hi)) for chunk in chunks]
    for result in _ordered_map(_generate_task, tasks, cfg.parallelism):
        yield from result


def _count_task(args) -> Dict[int, int]:
    nets, k, n, (lo, hi) = args
    out: Dict[int, int] = {}
    for net in nets:
        for parent in _expand(net, k, n - 1, hi):
            h = parent.n_hybrids
            for delta, c in count_feasible_pairs(parent, hi - h).items():
                if h + delta >= lo:
                    out[h + delta] = out.get(h + delta, 0) + c
    return out


def count_exact(n: int, h_filter: Optional[Tuple[int, int]] = None, jobs: int = 1) -> Dict[int, int]:
    """Census of BTC_n by hybrid count.  The last level is counted from the
    pair structure of BTC_{n-1} instead of being built."""
    cfg = GenerationConfig(n, h_filter, jobs)
    lo, hi = cfg.h_range
    if n == 1:
        return {0: 1} if lo == 0 else {}
    if jobs == 1 or n <= 3:
        return dict(sorted(_count_task(([Network.trivial(1)], 1, n, (lo, hi))).items()))
    m, chunks = _tasks(GenerationConfig(n - 1, (0, min(hi, n - 2)), jobs), jobs)
    total: Dict[int, int] = {}
    for part in _ordered_map(_count_task, [(c, m, n, (lo, hi)) for c in chunks], jobs):
        for h, c in part.items():
            total[h] = total.get(h, 0) + c
    return dict(sorted(total.items()))


# -- random construction --------------------------------------------------


def random_network(n: int, seed: int, stream: int = 0) -> Network:
    """Grow a network over [n] from the trivial one, choosing each
    augmentation uniformly among the current feasible pairs.  Step ``i`` draws
    from substream ``(stream, i)`` of ``seed``.  Not uniform over BTC_n."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    net = Network.trivial(1)
    for i in range(1, n):
        net = augment(net, i + 1, sample_feasible_pair(net, make_rng(seed, stream, i)))
    return net


# -- count estimation -----------------------------------------------------


@dataclass
class EstimateReport:
    n: int
    estimate: float
    exact: bool
    samples: int
    base_level: int
    base_size: int  # exact |BTC_{base_level + 1}|
    mean_offspring: float  # mean offspring size over BTC_{n-1}
    stderr: float
    running: List[Tuple[int, float]] = field(default_factory=list)

    @property
    def stable_digits(self) -> int:
        """Leading significant digits shared by the last two running
        estimates."""
        if len(self.running) < 2:
            return 0
        a, b = self.running[-2][1], self.running[-1][1]
        if a == b:
            return 15
        return max(0, int(math.floor(-math.log10(abs(a - b) / max(abs(b), 1e-300)))))


def estimate_count(
    n: int,
    sample_budget: Optional[int] = None,
    seed: int = 0,
    base_level: Optional[int] = None,
    checkpoints: int = 20,
) -> EstimateReport:
    """Estimate |BTC_n| from offspring sizes.

    With ``sample_budget=None`` the whole of BTC_{n-1} is enumerated and the
    result is exact.  Otherwise BTC_{base_level} is enumerated (default
    ``n-2``), each sample picks one of its offspring uniformly over
    BTC_{base_level+1} (parent weighted by its offspring count, then a uniform
    pair), continues by uniform random augmentations up to n-1 leaves, and
    scores the offspring count of the result.  Scores are importance-weighted
    by the pair counts of the intermediate levels, so the sample mean is
    unbiased; when ``base_level == n-2`` it is exactly |BTC_{n-1}| times the
    mean offspring size of uniformly drawn members of BTC_{n-1}.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if sample_budget is None or n == 1:
        if n == 1:
            return EstimateReport(1, 1.0, True, 0, 0, 1, 0.0, 0.0, [(0, 1.0)])
        total = 0
        size = 0
        for net in _level(n - 1, n - 2):
            total += offspring_count(net)
            size += 1
        return EstimateReport(n, float(total), True, size, n - 1, size, total / size, 0.0, [(size, float(total))])
    if sample_budget <= 0:
        raise InsufficientSamplesError("sample budget must be positive")
    m = n - 2 if base_level is None else base_level
    if not 1 <= m <= n - 2:
        raise ValueError(f"base level must be within 1..{n - 2}")

    weights = [offspring_count(net) for net in _level(m, m - 1)]
    cumulative = list(np.cumsum(np.array(weights, dtype=object)))
    base_size = int(cumulative[-1])
    draws = []
    for s in range(sample_budget):
        rng = make_rng(seed, s, 0)
        x = uniform_below(rng, base_size)
        draws.append(bisect.bisect_right(cumulative, x))
    wanted = set(draws)
    picked = {i: net for i, net in enumerate(_level(m, m - 1)) if i in wanted}

    scores = []
    running = []
    step = max(1, sample_budget // checkpoints)
    acc = 0.0
    weight_sum = 0
    weighted_offspring = 0
    for s, idx in enumerate(draws):
        rng = make_rng(seed, s, 1)
        net = augment(picked[idx], m + 1, sample_feasible_pair(picked[idx], rng))
        weight = 1
        for k in range(m + 1, n - 1):
            weight *= offspring_count(net)
            net = augment(net, k + 1, sample_feasible_pair(net, rng))
        f = offspring_count(net)
        weight_sum += weight
        weighted_offspring += weight * f
        score = base_size * weight * f
        scores.append(score)
        acc += score
        if (s + 1) % step == 0 or s + 1 == sample_budget:
            running.append((s + 1, acc / (s + 1)))
    arr = np.array(scores, dtype=float)
    est = float(arr.mean())
    stderr = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else float("inf")
    mean_off = weighted_offspring / weight_sum
    return EstimateReport(n, est, False, sample_budget, m, base_size, mean_off, stderr, running)


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("BTCGEN_JOBS", "1")))
    except ValueError:
        return 1
