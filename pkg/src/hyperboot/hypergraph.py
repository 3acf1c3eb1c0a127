"""k-uniform hypergraphs: validated construction, incidence indexes, canonical codes, HG1 text I/O."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, permutations
from pathlib import Path

# A k-set is a strictly increasing tuple of vertex indices.
KSet = tuple[int, ...]

CANONICAL_MAX_VERTICES = 10


class BudgetError(RuntimeError):
    """Raised when an operation refuses to run past its exactness budget."""


def validate_kset(edge, n: int, k: int) -> KSet:
    """Return the sorted tuple form of `edge`, or raise ValueError."""
    e = tuple(sorted(edge))
    if len(e) != k or len(set(e)) != k:
        raise ValueError(f"edge {tuple(edge)!r} is not a set of exactly {k} distinct vertices")
    if e[0] < 0 or e[-1] >= n:
        raise ValueError(f"edge {e!r} has a vertex outside 0..{n - 1}")
    return e


@dataclass(frozen=True)
class Hypergraph:
    """Immutable k-uniform hypergraph on the vertex set {0, ..., n-1}.

    Edges are stored as a hash set of sorted k-tuples; pair and vertex
    incidence indexes are built lazily and cached, so values stay cheap to
    copy-and-extend while inner loops get fast "which edges contain this
    pair" queries.
    """

    n: int
    k: int
    edges: frozenset[KSet]

    @cached_property
    def edge_list(self) -> tuple[KSet, ...]:
        """Edges in lexicographic order."""
        return tuple(sorted(self.edges))

    @cached_property
    def pair_index(self) -> dict[tuple[int, int], tuple[KSet, ...]]:
        """Map each covered vertex pair to the sorted (k-2)-sets completing it to an edge."""
        index: dict[tuple[int, int], list[KSet]] = {}
        for e in self.edge_list:
            for u, v in combinations(e, 2):
                rest = tuple(x for x in e if x != u and x != v)
                index.setdefault((u, v), []).append(rest)
        return {p: tuple(rests) for p, rests in index.items()}

    @cached_property
    def partners(self) -> dict[int, tuple[int, ...]]:
        """Map each covered vertex to the sorted vertices sharing an edge with it."""
        found: dict[int, set[int]] = {}
        for e in self.edges:
            for v in e:
                found.setdefault(v, set()).update(e)
        return {v: tuple(sorted(s - {v})) for v, s in found.items()}

    @cached_property
    def vertex_index(self) -> dict[int, tuple[KSet, ...]]:
        """Map each covered vertex to its incident edges in lexicographic order."""
        index: dict[int, list[KSet]] = {}
        for e in self.edge_list:
            for v in e:
                index.setdefault(v, []).append(e)
        return {v: tuple(es) for v, es in index.items()}

    @cached_property
    def _star_packing_cache(self) -> dict[tuple[int, int], int]:
        return {}

    def degree(self, v: int) -> int:
        return len(self.vertex_index.get(v, ()))

    def has_edge(self, edge) -> bool:
        return tuple(sorted(edge)) in self.edges

    def add_edges(self, new_edges) -> "Hypergraph":
        """Return a new hypergraph with the given edges inserted."""
        extra = {validate_kset(e, self.n, self.k) for e in new_edges}
        return Hypergraph(self.n, self.k, self.edges | extra)

    def absent_ksets(self):
        """Yield the k-subsets of the vertex set that are not edges, lexicographically."""
        present = self.edges
        for cand in combinations(range(self.n), self.k):
            if cand not in present:
                yield cand

    def max_edges(self) -> int:
        from math import comb

        return comb(self.n, self.k)

    def is_complete(self) -> bool:
        return len(self.edges) == self.max_edges()

    def star_packing(self, v: int, cap: int) -> int:
        """min(cap, maximum number of edges through v that pairwise meet in exactly {v}).

        Equivalently the maximum number of pairwise disjoint (k-1)-sets in the
        link of v, truncated at `cap`.
        """
        key = (v, cap)
        cache = self._star_packing_cache
        if key not in cache:
            links = [tuple(x for x in e if x != v) for e in self.vertex_index.get(v, ())]
            cache[key] = max_disjoint_sets(links, cap=cap)
        return cache[key]


def make_hypergraph(n: int, k: int, edges) -> Hypergraph:
    """Build a validated hypergraph; duplicate edges collapse silently."""
    if k < 2:
        raise ValueError(f"uniformity k={k} must be at least 2")
    if n < k:
        raise ValueError(f"need at least k={k} vertices, got n={n}")
    return Hypergraph(n, k, frozenset(validate_kset(e, n, k) for e in edges))


def complete_hypergraph(n: int, k: int) -> Hypergraph:
    """The k-graph containing every k-subset of {0, ..., n-1}."""
    if k < 2:
        raise ValueError(f"uniformity k={k} must be at least 2")
    if n < k:
        raise ValueError(f"need at least k={k} vertices, got n={n}")
    return Hypergraph(n, k, frozenset(combinations(range(n), k)))


def max_disjoint_sets(sets, cap: int | None = None, node_budget: int = 2_000_000) -> int:
    """Exact maximum size of a pairwise disjoint subfamily of `sets`.

    A greedy pass runs first; if it already reaches `cap` the capped value is
    returned, otherwise an exact include/exclude search finishes the job.
    Raises BudgetError if the search exceeds `node_budget` nodes.
    """
    family = sorted({tuple(sorted(s)) for s in sets})
    if not family:
        return 0
    bonus = 0
    if family and family[0] == ():
        # the empty set is disjoint from everything (k=2 links)
        bonus = 1
        family = family[1:]
    if not family:
        return min(bonus, cap) if cap is not None else bonus
    if all(len(s) == 1 for s in family):
        # singleton sets are pairwise disjoint iff distinct
        total = len(family) + bonus
        return min(total, cap) if cap is not None else total

    target = None if cap is None else cap - bonus
    # greedy pass in stored order; sufficient whenever it reaches the cap
    used: set[int] = set()
    greedy = 0
    for s in family:
        if used.isdisjoint(s):
            used.update(s)
            greedy += 1
            if target is not None and greedy >= target:
                return cap  # type: ignore[return-value]

    fsets = [frozenset(s) for s in family]
    m = len(fsets)
    best = greedy
    nodes = 0

    def search(i: int, picked: frozenset, count: int) -> None:
        nonlocal best, nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetError(f"disjoint-set search exceeded {node_budget} nodes")
        if count > best:
            best = count
        if target is not None and best >= target:
            return
        if i >= m or count + (m - i) <= best:
            return
        s = fsets[i]
        if picked.isdisjoint(s):
            search(i + 1, picked | s, count + 1)
            if target is not None and best >= target:
                return
        search(i + 1, picked, count)

    search(0, frozenset(), 0)
    total = best + bonus
    return min(total, cap) if cap is not None else total


def _encode_mask(h: Hypergraph, slot_of: dict[KSet, int], perm) -> int:
    m = 0
    for e in h.edges:
        m |= 1 << slot_of[tuple(sorted(perm[v] for v in e))]
    return m


def canonical_code(h: Hypergraph) -> bytes:
    """Deterministic code equal for two hypergraphs iff they are isomorphic.

    Implemented as the minimum edge-set encoding over all vertex relabelings,
    so it only supports n <= 10; larger inputs are refused rather than given
    an unsound code.
    """
    if h.n > CANONICAL_MAX_VERTICES:
        raise BudgetError(f"canonical_code supports n <= {CANONICAL_MAX_VERTICES}, got n={h.n}")
    slots = list(combinations(range(h.n), h.k))
    slot_of = {s: i for i, s in enumerate(slots)}
    best: int | None = None
    for perm in permutations(range(h.n)):
        m = _encode_mask(h, slot_of, perm)
        if best is None or m < best:
            best = m
    width = max(1, (len(slots) + 7) // 8)
    return bytes([h.k, h.n]) + (best or 0).to_bytes(width, "big")


def are_isomorphic(a: Hypergraph, b: Hypergraph) -> bool:
    """Exact isomorphism test by backtracking over degree-compatible vertex maps."""
    if a.n != b.n or a.k != b.k or len(a.edges) != len(b.edges):
        return False
    deg_a = [a.degree(v) for v in range(a.n)]
    deg_b = [b.degree(v) for v in range(b.n)]
    if sorted(deg_a) != sorted(deg_b):
        return False

    # map a-vertices in order of rarest degree first
    from collections import Counter

    freq = Counter(deg_a)
    order = sorted(range(a.n), key=lambda v: (freq[deg_a[v]], -deg_a[v], v))
    pos = {v: i for i, v in enumerate(order)}

    # a-edges become checkable once all their vertices are mapped
    ready_at: dict[int, list[KSet]] = {}
    for e in a.edges:
        last = max(pos[v] for v in e)
        ready_at.setdefault(last, []).append(e)

    image = [-1] * a.n
    used = [False] * b.n

    def extend(depth: int) -> bool:
        if depth == a.n:
            return True
        v = order[depth]
        for w in range(b.n):
            if used[w] or deg_b[w] != deg_a[v]:
                continue
            image[v] = w
            used[w] = True
            ok = all(
                tuple(sorted(image[x] for x in e)) in b.edges for e in ready_at.get(depth, ())
            )
            if ok and extend(depth + 1):
                return True
            used[w] = False
            image[v] = -1
        return False

    return extend(0)


# ---------------------------------------------------------------------------
# HG1 text format: header "k n m", then m lines of k increasing vertex
# indices; lines starting with '#' are comments.


def format_hg1(h: Hypergraph) -> str:
    lines = [f"{h.k} {h.n} {len(h.edges)}"]
    lines.extend(" ".join(str(v) for v in e) for e in h.edge_list)
    return "\n".join(lines) + "\n"


def parse_hg1(text: str) -> Hypergraph:
    rows = [ln.strip() for ln in text.splitlines()]
    rows = [ln for ln in rows if ln and not ln.startswith("#")]
    if not rows:
        raise ValueError("empty HG1 document")
    head = rows[0].split()
    if len(head) != 3:
        raise ValueError(f"HG1 header must be 'k n m', got {rows[0]!r}")
    k, n, m = (int(x) for x in head)
    body = rows[1:]
    if len(body) != m:
        raise ValueError(f"HG1 header promises {m} edges, found {len(body)}")
    edges = []
    for ln in body:
        vs = tuple(int(x) for x in ln.split())
        if list(vs) != sorted(set(vs)):
            raise ValueError(f"HG1 edge {ln!r} is not strictly increasing")
        edges.append(vs)
    return make_hypergraph(n, k, edges)


def load_hg1(path) -> Hypergraph:
    return parse_hg1(Path(path).read_text(encoding="utf-8"))


def dump_hg1(h: Hypergraph, path) -> None:
    Path(path).write_text(format_hg1(h), encoding="utf-8")
