"""Slow-start constructions, random instances, and running-time maximization."""

from __future__ import annotations

import multiprocessing
import random
from dataclasses import dataclass
from itertools import combinations, permutations
from math import comb

from .hypergraph import BudgetError, Hypergraph, make_hypergraph
from .patterns import ExtensionPattern, extend, star_pattern
from .process import run, running_time

EXHAUSTIVE_SLOT_BUDGET = 20
EXHAUSTIVE_VERTEX_BUDGET = 10
# deterministic generator used for every seeded instance (documented in manifests)
GENERATOR_NAME = "mt19937-lex-v1"


@dataclass(frozen=True)
class SearchResult:
    """Outcome of a running-time search; the witness replays to best_tau exactly."""

    best_tau: int
    witness: Hypergraph
    explored: int
    method: str


def star_component_size(k: int, h: int) -> int:
    """Vertices of the k-extension of a star with h leaves: hub + leaves + padding."""
    return h + 1 + h * (k - 2)


def star_construction_min_n(k: int, t: int) -> int:
    return sum(star_component_size(k, h) for h in range(1, t - 1)) + k


def star_construction(k: int, t: int, n: int) -> Hypergraph:
    """Disjoint star extensions of every size 1..t-2 plus a pool of isolated vertices.

    Component h is a copy of the k-extension of the star with h leaves; its
    degree-h hub sits at the component's first vertex (see star_hubs).
    Components appear in increasing h, the isolated pool last.
    """
    if k < 3:
        raise ValueError("the construction needs uniformity k >= 3")
    if t < 3:
        raise ValueError("the construction needs t >= 3")
    need = star_construction_min_n(k, t)
    if n < need:
        raise ValueError(f"n={n} too small; need at least {need} vertices")
    edges = []
    offset = 0
    for h in range(1, t - 1):
        p = extend(star_pattern(h), k)
        edges.extend(tuple(v + offset for v in e) for e in p.f.edge_list)
        offset += p.f.n
    return make_hypergraph(n, k, edges)


def star_hubs(k: int, t: int) -> tuple[int, ...]:
    """The degree-h vertex of each component of star_construction, h = 1..t-2."""
    hubs = []
    offset = 0
    for h in range(1, t - 1):
        hubs.append(offset)
        offset += star_component_size(k, h)
    return tuple(hubs)


def random_hypergraph(n: int, k: int, edge_probability: float, seed: int) -> Hypergraph:
    """Include each k-set independently with the given probability.

    Reproducible across platforms: a Mersenne Twister stream consumed in
    lexicographic k-set order (generator "mt19937-lex-v1").
    """
    if not 0.0 <= edge_probability <= 1.0:
        raise ValueError("edge_probability must lie in [0, 1]")
    rng = random.Random(seed)
    edges = [e for e in combinations(range(n), k) if rng.random() < edge_probability]
    return make_hypergraph(n, k, edges)


# ---------------------------------------------------------------------------
# Exhaustive search with isomorph rejection.


def canonical_start_masks(n: int, k: int):
    """Yield one representative edge-set bitmask per isomorphism class.

    Sweeps masks in ascending order and marks whole orbits as seen, so each
    representative is the minimum mask of its class. Guarded so the sweep
    (2^C(n,k) masks, n! permutations) stays enumerable.
    """
    slots = list(combinations(range(n), k))
    s = len(slots)
    if s > EXHAUSTIVE_SLOT_BUDGET:
        raise BudgetError(f"C({n},{k})={s} exceeds the exhaustive budget of {EXHAUSTIVE_SLOT_BUDGET}")
    if n > EXHAUSTIVE_VERTEX_BUDGET:
        raise BudgetError(f"n={n} exceeds the exhaustive vertex budget of {EXHAUSTIVE_VERTEX_BUDGET}")
    slot_of = {e: i for i, e in enumerate(slots)}
    perm_tables = []
    for perm in permutations(range(n)):
        perm_tables.append(tuple(slot_of[tuple(sorted(perm[v] for v in e))] for e in slots))

    seen = bytearray(1 << s)
    for mask in range(1 << s):
        if seen[mask]:
            continue
        bits = [i for i in range(s) if mask >> i & 1]
        for table in perm_tables:
            image = 0
            for i in bits:
                image |= 1 << table[i]
            seen[image] = 1
        yield mask, slots


def _mask_to_hypergraph(mask: int, slots, n: int, k: int) -> Hypergraph:
    return make_hypergraph(n, k, [slots[i] for i in range(len(slots)) if mask >> i & 1])


_EX_STATE = None


def _init_exhaustive(p, n, k, slots, max_steps):
    global _EX_STATE
    _EX_STATE = (p, n, k, slots, max_steps)


def _eval_masks(masks):
    p, n, k, slots, max_steps = _EX_STATE  # type: ignore[misc]
    out = []
    for mask in masks:
        h0 = _mask_to_hypergraph(mask, slots, n, k)
        out.append((running_time(run(p, h0, max_steps=max_steps)), mask))
    return out


def exhaustive_max(k: int, n: int, p: ExtensionPattern, workers: int = 1) -> SearchResult:
    """Exact maximum running time over all starts on n vertices.

    Runs the process once per isomorphism class (canonical minimum-mask
    representatives); ties resolve to the smallest representative mask.
    """
    reps = list(canonical_start_masks(n, k))
    slots = reps[0][1] if reps else list(combinations(range(n), k))
    masks = [m for m, _ in reps]
    max_steps = comb(n, k)

    if workers > 1 and len(masks) > 64 and "fork" in multiprocessing.get_all_start_methods():
        size = max(16, len(masks) // (workers * 8))
        chunks = [masks[i : i + size] for i in range(0, len(masks), size)]
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers, initializer=_init_exhaustive, initargs=(p, n, k, slots, max_steps)) as pool:
            parts = pool.map(_eval_masks, chunks)
        scored = [item for part in parts for item in part]
    else:
        _init_exhaustive(p, n, k, slots, max_steps)
        scored = _eval_masks(masks)

    best_tau, best_mask = max(scored, key=lambda tm: (tm[0], -tm[1]))
    witness = _mask_to_hypergraph(best_mask, slots, n, k)
    replay = running_time(run(p, witness))
    if replay != best_tau:
        raise AssertionError(f"witness replay gave {replay}, expected {best_tau}")
    return SearchResult(best_tau=best_tau, witness=witness, explored=len(masks), method="exhaustive")


# ---------------------------------------------------------------------------
# Local search: hill climbing over single-edge toggles with plateau walks.


def _tau_of(p: ExtensionPattern, h: Hypergraph) -> int:
    return running_time(run(p, h))


def _restart_start(p: ExtensionPattern, n: int, k: int, restart: int, rng: random.Random) -> Hypergraph:
    if restart == 0:
        return make_hypergraph(n, k, [])
    if restart == 1 and k >= 3:
        # seed with the slow star construction whenever the pattern is a star
        leaves = p.g.star_leaf_count()
        if leaves is not None and leaves >= 2:
            t = leaves + 1
            if n >= star_construction_min_n(k, t):
                return star_construction(k, t, n)
    prob = rng.choice([0.02, 0.05, 0.1, 0.2])
    return random_hypergraph(n, k, prob, seed=rng.randrange(2**31))


_LS_STATE = None


def _init_local(p, n, k, moves, seed):
    global _LS_STATE
    _LS_STATE = (p, n, k, moves, seed)


def _climb(restart: int):
    p, n, k, moves, seed = _LS_STATE  # type: ignore[misc]
    slots = list(combinations(range(n), k))
    rng = random.Random(seed * 1_000_003 + restart)
    cur = _restart_start(p, n, k, restart, rng)
    cur_tau = _tau_of(p, cur)
    evals = 1
    for _ in range(moves):
        e = slots[rng.randrange(len(slots))]
        cand = Hypergraph(n, k, cur.edges - {e}) if e in cur.edges else cur.add_edges([e])
        cand_tau = _tau_of(p, cand)
        evals += 1
        if (cand_tau, -len(cand.edges)) >= (cur_tau, -len(cur.edges)):
            cur, cur_tau = cand, cand_tau
    return cur_tau, cur, evals


def local_search_max(
    k: int,
    n: int,
    p: ExtensionPattern,
    restarts: int = 10,
    moves: int = 100,
    seed: int = 0,
    workers: int = 1,
) -> SearchResult:
    """Seeded hill climbing for a lower bound on the maximum running time.

    Single-edge toggles, equal-tau plateau steps accepted, ties broken toward
    fewer starting edges. Each restart derives its own generator from (seed,
    restart index), so parallel and serial execution agree. The returned
    witness is replay-verified.
    """
    indices = list(range(max(1, restarts)))
    if workers > 1 and len(indices) > 1 and "fork" in multiprocessing.get_all_start_methods():
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(min(workers, len(indices)), initializer=_init_local, initargs=(p, n, k, moves, seed)) as pool:
            outcomes = pool.map(_climb, indices)
    else:
        _init_local(p, n, k, moves, seed)
        outcomes = [_climb(r) for r in indices]

    best_tau, witness, _ = min(
        outcomes, key=lambda o: (-o[0], len(o[1].edges), sorted(o[1].edges))
    )
    explored = sum(o[2] for o in outcomes)
    replay = _tau_of(p, witness)
    if replay != best_tau:
        raise AssertionError(f"witness replay gave {replay}, expected {best_tau}")
    return SearchResult(best_tau=best_tau, witness=witness, explored=explored, method="local")
