"""Copy detection for extension patterns: witness search, frontier computation, brute-force oracles.

A copy of an extension pattern in a host k-graph is identified by an injective
center map (images of the pattern-graph vertices) together with one pairwise
disjoint padding ("sleeve") set per pattern edge, all disjoint from the center
image. The optimized search exploits exactly this structure; the generic
subset-isomorphism oracle in this module is kept independent so the two routes
can be cross-validated.
"""

from __future__ import annotations

import heapq
import multiprocessing
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, permutations
from math import comb

from .hypergraph import BudgetError, Hypergraph, KSet, are_isomorphic, validate_kset
from .patterns import ExtensionPattern

ORACLE_SUBSET_BUDGET = 10**7
SLEEVE_NODE_BUDGET = 10**6
# frontier switches from near-copy seeding to a full candidate scan above this density
SPARSE_DENSITY = 0.05
_MIN_PARALLEL_CANDIDATES = 256


@dataclass(frozen=True)
class CopyWitness:
    """One concrete copy: center map plus one sleeve set per pattern edge.

    `center_map[i]` is the host vertex playing pattern-graph vertex i;
    `sleeves[j]` pads the j-th pattern pair (in lexicographic pair order).
    """

    pattern: ExtensionPattern
    center_map: tuple[int, ...]
    sleeves: tuple[KSet, ...]

    @cached_property
    def edge_set(self) -> tuple[KSet, ...]:
        """The hyperedges of this copy, one per pattern pair, in pattern edge order."""
        out = []
        for (u, v), sleeve in zip(self.pattern.g.edge_order, self.sleeves):
            out.append(tuple(sorted((self.center_map[u], self.center_map[v]) + sleeve)))
        return tuple(out)

    def center_pairs(self) -> tuple[tuple[int, int], ...]:
        pairs = []
        for u, v in self.pattern.g.edge_order:
            a, b = self.center_map[u], self.center_map[v]
            pairs.append((a, b) if a < b else (b, a))
        return tuple(pairs)

    def vertices(self) -> frozenset[int]:
        verts = set(self.center_map)
        for s in self.sleeves:
            verts.update(s)
        return frozenset(verts)

    def uses(self, edge) -> bool:
        return tuple(sorted(edge)) in self.edge_set

    def iso_map(self) -> dict[int, int]:
        """Map from pattern vertices (of the extension k-graph) to host vertices."""
        out = {v: self.center_map[v] for v in range(self.pattern.t)}
        sleeve_of = self.pattern.sleeve_of
        for j, pair in enumerate(self.pattern.g.edge_order):
            for slot_vertex, host_vertex in zip(sleeve_of[pair], self.sleeves[j]):
                out[slot_vertex] = host_vertex
        return out

    def problems(self, host: Hypergraph, extra_edge=None) -> list[str]:
        """Validation report; empty list means the witness is sound."""
        issues = []
        p = self.pattern
        if len(self.center_map) != p.t:
            issues.append("center map has wrong arity")
        if len(self.sleeves) != len(p.g.edge_order):
            issues.append("sleeve count differs from pattern edge count")
        verts = list(self.center_map)
        for s in self.sleeves:
            if len(s) != p.k - 2:
                issues.append(f"sleeve {s!r} has wrong size")
            verts.extend(s)
        if len(set(verts)) != len(verts):
            issues.append("vertex images are not injective")
        allowed = host.edges | ({tuple(sorted(extra_edge))} if extra_edge else set())
        for e in self.edge_set:
            if e not in allowed:
                issues.append(f"edge {e!r} is not available in the host")
        if len(set(self.edge_set)) != len(self.edge_set):
            issues.append("pattern edges collapse onto the same hyperedge")
        return issues


@dataclass(frozen=True)
class Frontier:
    """The absent k-sets whose insertion creates a new copy, with one witness each."""

    new_edges: tuple[KSet, ...]
    witnesses: dict[KSet, CopyWitness]


class _Embedder:
    """Backtracking search shared by witness lookup, streaming, and near-copy seeding."""

    def __init__(self, p: ExtensionPattern, host: Hypergraph):
        if p.k != host.k:
            raise ValueError(f"pattern uniformity {p.k} differs from host uniformity {host.k}")
        self.p = p
        self.host = host
        self.edge_order = p.g.edge_order
        self.q = len(self.edge_order)
        self.t = p.g.t
        # incidences of each pattern-graph vertex: (edge index, other endpoint)
        at: list[list[tuple[int, int]]] = [[] for _ in range(self.t)]
        for i, (u, v) in enumerate(self.edge_order):
            at[u].append((i, v))
            at[v].append((i, u))
        self.at = at
        self.deg = [p.g.degree(v) for v in range(self.t)]

    # -- center map search ---------------------------------------------------

    def center_maps(self, skip: int | None = None, preset: dict[int, int] | None = None):
        """Yield injective center maps in lexicographic order of the free slots.

        Every pattern pair except the `skip`-th must land on a covered host
        pair. `preset` pins pattern vertices to host vertices up front. Sleeve
        feasibility is NOT checked here.
        """
        host = self.host
        pair_index = host.pair_index
        partners = host.partners
        star_packing = host.star_packing
        skip_pair = self.edge_order[skip] if skip is not None else ()

        need = []
        for v in range(self.t):
            d = self.deg[v]
            if v in skip_pair:
                d -= 1
            need.append(d)

        sigma = [-1] * self.t
        used: set[int] = set()
        if preset:
            for gv, hv in preset.items():
                sigma[gv] = hv
                used.add(hv)
        at = self.at
        t = self.t
        n = host.n

        def assign(v: int):
            if v == t:
                yield tuple(sigma)
                return
            if sigma[v] >= 0:
                yield from assign(v + 1)
                return
            nbrs = [(i, sigma[u]) for i, u in at[v] if sigma[u] >= 0 and i != skip]
            if nbrs:
                cands = partners.get(nbrs[0][1], ())
            else:
                cands = range(n)
            d = need[v]
            for x in cands:
                if x in used:
                    continue
                if d > 0 and star_packing(x, d) < d:
                    continue
                ok = True
                for _, su in nbrs:
                    key = (x, su) if x < su else (su, x)
                    if key not in pair_index:
                        ok = False
                        break
                if not ok:
                    continue
                sigma[v] = x
                used.add(x)
                yield from assign(v + 1)
                used.discard(x)
                sigma[v] = -1

        yield from assign(0)

    # -- sleeve assignment ----------------------------------------------------

    def solve_sleeves(
        self,
        sigma: tuple[int, ...],
        skip: int | None = None,
        force: tuple[int, KSet] | None = None,
    ) -> tuple[KSet, ...] | None:
        """Lexicographically least pairwise disjoint sleeve assignment, or None.

        With `skip`, that pattern edge is exempt from the system and its slot
        holds an empty marker. With `force=(i, rest)`, edge i's sleeve is fixed
        to `rest` and the others must avoid it.
        """
        host = self.host
        pair_index = host.pair_index
        sigma_set = frozenset(sigma)
        q = self.q

        chosen: list[KSet | None] = [None] * q
        used: set[int] = set()
        fixed = skip
        if force is not None:
            i, rest = force
            if not sigma_set.isdisjoint(rest):
                return None
            chosen[i] = rest
            used.update(rest)
            fixed = i

        host_pairs = []
        for u, v in self.edge_order:
            a, b = sigma[u], sigma[v]
            host_pairs.append((a, b) if a < b else (b, a))

        nodes = 0

        def dfs(i: int) -> bool:
            nonlocal nodes
            nodes += 1
            if nodes > SLEEVE_NODE_BUDGET:
                raise BudgetError("sleeve assignment search exceeded its node budget")
            if i == q:
                return True
            if i == fixed:
                if chosen[i] is None:
                    chosen[i] = ()
                return dfs(i + 1)
            for comp in pair_index.get(host_pairs[i], ()):
                ok = True
                for x in comp:
                    if x in used or x in sigma_set:
                        ok = False
                        break
                if not ok:
                    continue
                chosen[i] = comp
                used.update(comp)
                if dfs(i + 1):
                    return True
                used.difference_update(comp)
            chosen[i] = None
            return False

        if dfs(0):
            return tuple(chosen)  # type: ignore[arg-type]
        return None

    # -- composite searches ----------------------------------------------------

    def embeddings(self, mu: KSet | None = None):
        """Stream one witness per center map, lexicographically by (map, sleeves).

        With `mu`, only copies whose edge set contains `mu` are produced; the
        search then anchors on which pattern edge plays `mu`, which prunes the
        center search to maps touching it.
        """
        if mu is None:
            for sigma in self.center_maps():
                sleeves = self.solve_sleeves(sigma)
                if sleeves is not None:
                    yield CopyWitness(self.p, sigma, sleeves)
            return

        # exactly one pattern edge maps onto mu in any witness using it, and a
        # given center map admits at most one such edge, so the per-anchor
        # streams are disjoint and each is lex-sorted: a heap merge restores
        # the global order
        streams = [
            self._anchored(idx, a, b, mu)
            for idx in range(self.q)
            for a, b in permutations(mu, 2)
        ]
        yield from heapq.merge(*streams, key=lambda w: (w.center_map, w.sleeves))

    def _anchored(self, idx: int, a: int, b: int, mu: KSet):
        """Witnesses whose `idx`-th pattern edge is mu with centers (a, b)."""
        u, v = self.edge_order[idx]
        host = self.host
        # the anchor supplies one edge at u and at v; the rest must be present
        if self.deg[u] > 1 and host.star_packing(a, self.deg[u] - 1) < self.deg[u] - 1:
            return
        if self.deg[v] > 1 and host.star_packing(b, self.deg[v] - 1) < self.deg[v] - 1:
            return
        rest = tuple(x for x in mu if x != a and x != b)
        rest_set = frozenset(rest)
        for sigma in self.center_maps(skip=idx, preset={u: a, v: b}):
            if not rest_set.isdisjoint(sigma):
                continue
            sleeves = self.solve_sleeves(sigma, force=(idx, rest))
            if sleeves is not None:
                yield CopyWitness(self.p, sigma, sleeves)

    def witness(self, mu: KSet | None = None) -> CopyWitness | None:
        return next(self.embeddings(mu), None)


def enumerate_extension_embeddings(p: ExtensionPattern, host: Hypergraph, must_use=None):
    """Stream one witness per center embedding, lexicographically by center map.

    Each emitted witness carries the lexicographically least sleeve assignment
    for its center map (sleeve multiplicity is collapsed on purpose: the copy
    structure downstream only depends on centers). With `must_use`, witnesses
    are restricted to copies whose edge set contains it.
    """
    mu = None
    if must_use is not None:
        mu = validate_kset(must_use, host.n, host.k)
        if mu in host.edges:
            raise ValueError(f"must_use edge {mu!r} is already present in the host")
    yield from _Embedder(p, host).embeddings(mu)


def creates_new_copy(p: ExtensionPattern, host: Hypergraph, e) -> CopyWitness | None:
    """A witness copy in host+e containing e, or None when adding e creates no copy."""
    edge = validate_kset(e, host.n, host.k)
    if edge in host.edges:
        raise ValueError(f"edge {edge!r} is already present")
    return _Embedder(p, host).witness(edge)


# -- frontier ------------------------------------------------------------------


def _edge_degree_profiles(p: ExtensionPattern) -> tuple[tuple[int, int], ...]:
    profiles = set()
    for u, v in p.g.edge_order:
        du, dv = p.g.degree(u), p.g.degree(v)
        profiles.add((max(du, dv), min(du, dv)))
    return tuple(sorted(profiles))


def _may_host(host: Hypergraph, e: KSet, profiles, cap: int) -> bool:
    """Cheap necessary condition: e must offer two vertices whose star packing
    supports the degrees of some pattern pair (minus the edge e itself supplies)."""
    vals = sorted((host.star_packing(v, cap) for v in e), reverse=True)
    top, second = vals[0], vals[1]
    for hi, lo in profiles:
        if top >= hi - 1 and second >= lo - 1:
            return True
    return False


def _near_copy_candidates(p: ExtensionPattern, host: Hypergraph) -> set[KSet]:
    """Absent k-sets supplied by center maps missing exactly one pattern edge.

    This is a superset of the frontier: every true frontier edge arises from
    such a near-copy, and spurious candidates are discarded by the exact
    witness check afterwards.
    """
    out: set[KSet] = set()
    emb = _Embedder(p, host)
    all_vertices = range(host.n)
    for miss in range(emb.q):
        u, v = emb.edge_order[miss]
        for sigma in emb.center_maps(skip=miss):
            if emb.solve_sleeves(sigma, skip=miss) is None:
                continue
            sigma_set = set(sigma)
            base = (sigma[u], sigma[v])
            pool = [x for x in all_vertices if x not in sigma_set]
            for s in combinations(pool, host.k - 2):
                cand = tuple(sorted(base + s))
                if cand not in host.edges:
                    out.add(cand)
    return out


_WORKER_STATE: tuple[ExtensionPattern, Hypergraph] | None = None


def _init_worker(p: ExtensionPattern, host: Hypergraph) -> None:
    global _WORKER_STATE
    _WORKER_STATE = (p, host)


def _eval_chunk(chunk: list[KSet]):
    p, host = _WORKER_STATE  # type: ignore[misc]
    emb = _Embedder(p, host)
    return [(e, emb.witness(e)) for e in chunk]


def _evaluate_candidates(p, host, candidates, workers: int):
    if (
        workers > 1
        and len(candidates) >= _MIN_PARALLEL_CANDIDATES
        and "fork" in multiprocessing.get_all_start_methods()
    ):
        size = max(64, len(candidates) // (workers * 8))
        chunks = [candidates[i : i + size] for i in range(0, len(candidates), size)]
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers, initializer=_init_worker, initargs=(p, host)) as pool:
            parts = pool.map(_eval_chunk, chunks)
        return [item for part in parts for item in part]
    emb = _Embedder(p, host)
    return [(e, emb.witness(e)) for e in candidates]


def frontier(
    p: ExtensionPattern, host: Hypergraph, workers: int = 1, strategy: str = "auto"
) -> Frontier:
    """All absent k-sets whose insertion creates a new copy, each with its witness.

    Witnesses are deterministic (lexicographically least center map, then
    least sleeves) and independent of the strategy and the worker count.
    `strategy` is "auto", "seeded" (near-copy candidate seeding, for sparse
    hosts) or "scan" (full absent-set scan).
    """
    if strategy == "auto":
        sparse = len(host.edges) <= SPARSE_DENSITY * host.max_edges()
        strategy = "seeded" if p.edge_count >= 2 and sparse else "scan"
    if strategy == "seeded":
        candidates = sorted(_near_copy_candidates(p, host))
    elif strategy == "scan":
        candidates = list(host.absent_ksets())
    else:
        raise ValueError(f"unknown frontier strategy {strategy!r}")

    cap = max(p.g.degrees()) - 1
    if cap > 0:
        profiles = _edge_degree_profiles(p)
        candidates = [e for e in candidates if _may_host(host, e, profiles, cap)]

    results = _evaluate_candidates(p, host, candidates, workers)
    new_edges = tuple(e for e, w in results if w is not None)
    witnesses = {e: w for e, w in results if w is not None}
    return Frontier(new_edges=new_edges, witnesses=witnesses)


# -- generic brute-force oracle -------------------------------------------------


def _pattern_hypergraph(p) -> Hypergraph:
    if isinstance(p, ExtensionPattern):
        return p.f
    if isinstance(p, Hypergraph):
        covered = set()
        for e in p.edges:
            covered.update(e)
        if covered != set(range(p.n)):
            raise ValueError("pattern hypergraphs must not have isolated vertices")
        return p
    raise TypeError(f"unsupported pattern type {type(p)!r}")


def count_copies_oracle(p, host: Hypergraph) -> int:
    """Exact number of edge subsets of the host spanning a subhypergraph
    isomorphic to the pattern, by exhaustive enumeration.

    Deliberately independent of the optimized embedding search; guarded by a
    subset budget so it is only usable on small instances.
    """
    pf = _pattern_hypergraph(p)
    if pf.k != host.k:
        raise ValueError("pattern and host uniformities differ")
    q = len(pf.edges)
    if comb(len(host.edges), q) > ORACLE_SUBSET_BUDGET:
        raise BudgetError("copy-count enumeration exceeds the oracle subset budget")
    count = 0
    for sub in combinations(host.edge_list, q):
        if _spanned_isomorphic(sub, pf, host.k):
            count += 1
    return count


def _spanned_isomorphic(sub: tuple[KSet, ...], pf: Hypergraph, k: int) -> bool:
    span: set[int] = set()
    for e in sub:
        span.update(e)
    if len(span) != pf.n:
        return False
    relabel = {v: i for i, v in enumerate(sorted(span))}
    sh = Hypergraph(pf.n, k, frozenset(tuple(sorted(relabel[x] for x in e)) for e in sub))
    return are_isomorphic(sh, pf)


def oracle_creates_new_copy(p, host: Hypergraph, e) -> bool:
    """Whether adding e raises the oracle copy count; enumerates only subsets through e."""
    pf = _pattern_hypergraph(p)
    edge = validate_kset(e, host.n, host.k)
    if edge in host.edges:
        raise ValueError(f"edge {edge!r} is already present")
    q = len(pf.edges)
    if q == 0 or comb(len(host.edges), q - 1) > ORACLE_SUBSET_BUDGET:
        raise BudgetError("oracle enumeration exceeds the subset budget")
    for rest in combinations(host.edge_list, q - 1):
        if _spanned_isomorphic(rest + (edge,), pf, host.k):
            return True
    return False


def brute_force_frontier(p, host: Hypergraph) -> tuple[KSet, ...]:
    """The frontier recomputed purely from the brute-force copy count oracle."""
    return tuple(e for e in host.absent_ksets() if oracle_creates_new_copy(p, host, e))
