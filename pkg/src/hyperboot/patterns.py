"""Pattern graphs and their k-extensions, with explicit center/sleeve role metadata."""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

from .hypergraph import Hypergraph, make_hypergraph, parse_hg1


@dataclass(frozen=True)
class PatternGraph:
    """A 2-graph on vertices 0..t-1 with no isolated vertices."""

    t: int
    pairs: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.t < 2:
            raise ValueError("pattern graph needs at least 2 vertices")
        if not self.pairs:
            raise ValueError("pattern graph needs at least one pair")
        covered = set()
        for u, v in self.pairs:
            if not (0 <= u < v < self.t):
                raise ValueError(f"pair ({u}, {v}) is not an increasing pair inside 0..{self.t - 1}")
            covered.update((u, v))
        if covered != set(range(self.t)):
            missing = sorted(set(range(self.t)) - covered)
            raise ValueError(f"isolated vertices are not allowed: {missing}")

    @property
    def edge_order(self) -> tuple[tuple[int, int], ...]:
        """Pairs in lexicographic order; the canonical edge numbering."""
        return tuple(sorted(self.pairs))

    def degree(self, v: int) -> int:
        return sum(1 for p in self.pairs if v in p)

    def degrees(self) -> tuple[int, ...]:
        return tuple(self.degree(v) for v in range(self.t))

    def star_leaf_count(self) -> int | None:
        """If this graph is a star K_{1,j}, return j; otherwise None."""
        degs = self.degrees()
        j = self.t - 1
        if j >= 1 and sorted(degs) == [1] * j + [j] and len(self.pairs) == j:
            return j
        return None


# Role of a vertex inside an extension pattern.
@dataclass(frozen=True)
class CenterPos:
    vertex: int  # the original pattern-graph vertex


@dataclass(frozen=True)
class SleevePos:
    pair: tuple[int, int]  # the pattern-graph edge this sleeve pads
    slot: int  # position within the (k-2) padding vertices


@dataclass(frozen=True)
class ExtensionPattern:
    """The k-graph obtained from a 2-graph g by padding each pair with k-2 fresh vertices.

    Vertex numbering is deterministic: g-vertices first (0..t-1), then the
    padding ("sleeve") vertices grouped by g-edge in lexicographic pair order.
    Roles are carried explicitly because low-degree center vertices are not
    distinguishable from sleeves by degree alone.
    """

    g: PatternGraph
    k: int
    f: Hypergraph
    roles: dict[int, CenterPos | SleevePos]

    def __eq__(self, other):
        if not isinstance(other, ExtensionPattern):
            return NotImplemented
        return self.g == other.g and self.k == other.k

    def __hash__(self):
        return hash((self.g, self.k))

    @property
    def t(self) -> int:
        return self.g.t

    @property
    def edge_count(self) -> int:
        return len(self.g.pairs)

    @property
    def sleeve_of(self) -> dict[tuple[int, int], tuple[int, ...]]:
        """Map each g-pair to its sleeve vertices inside f."""
        out: dict[tuple[int, int], list[int]] = {p: [] for p in self.g.edge_order}
        for v, role in self.roles.items():
            if isinstance(role, SleevePos):
                out[role.pair].append(v)
        return {p: tuple(sorted(vs)) for p, vs in out.items()}


@dataclass(frozen=True)
class PatternStats:
    vertices: int
    edges: int
    center_size: int


def extend(g: PatternGraph, k: int) -> ExtensionPattern:
    """Build the k-extension of g; for k=2 the extension is g itself."""
    if k < 2:
        raise ValueError(f"uniformity k={k} must be at least 2")
    t = g.t
    roles: dict[int, CenterPos | SleevePos] = {v: CenterPos(v) for v in range(t)}
    edges = []
    nxt = t
    for u, v in g.edge_order:
        sleeve = tuple(range(nxt, nxt + k - 2))
        for slot, w in enumerate(sleeve):
            roles[w] = SleevePos((u, v), slot)
        nxt += k - 2
        edges.append(tuple(sorted((u, v) + sleeve)))
    f = make_hypergraph(nxt, k, edges)
    return ExtensionPattern(g=g, k=k, f=f, roles=roles)


def pattern_stats(p: ExtensionPattern) -> PatternStats:
    return PatternStats(vertices=p.f.n, edges=len(p.f.edges), center_size=p.t)


# ---------------------------------------------------------------------------
# Named patterns and pattern files.


def star_pattern(leaves: int) -> PatternGraph:
    if leaves < 1:
        raise ValueError("a star needs at least one leaf")
    return PatternGraph(leaves + 1, frozenset((0, i) for i in range(1, leaves + 1)))


def path_pattern(edges: int) -> PatternGraph:
    if edges < 1:
        raise ValueError("a path needs at least one edge")
    return PatternGraph(edges + 1, frozenset((i, i + 1) for i in range(edges)))


def cycle_pattern(vertices: int) -> PatternGraph:
    if vertices < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    pairs = {(i, i + 1) for i in range(vertices - 1)} | {(0, vertices - 1)}
    return PatternGraph(vertices, frozenset(pairs))


def clique_pattern(vertices: int) -> PatternGraph:
    if vertices < 2:
        raise ValueError("a clique needs at least 2 vertices")
    return PatternGraph(vertices, frozenset(combinations(range(vertices), 2)))


_NAMED = {
    "edge": lambda: path_pattern(1),
    "triangle": lambda: cycle_pattern(3),
}

_PARAMETRIC = {
    "path": path_pattern,
    "star": star_pattern,
    "cycle": cycle_pattern,
    "clique": clique_pattern,
}


def named_pattern(name: str) -> PatternGraph:
    """Resolve built-in names: edge, triangle, path<j>, star<j>, cycle<j>, clique<j>.

    The suffix counts edges for path, leaves for star, and vertices for cycle
    and clique.
    """
    if name in _NAMED:
        return _NAMED[name]()
    m = re.fullmatch(r"([a-z]+)(\d+)", name)
    if m and m.group(1) in _PARAMETRIC:
        return _PARAMETRIC[m.group(1)](int(m.group(2)))
    raise ValueError(f"unknown pattern name {name!r}")


def pattern_from_hypergraph(h: Hypergraph) -> PatternGraph:
    if h.k != 2:
        raise ValueError(f"pattern files must be 2-uniform, got k={h.k}")
    return PatternGraph(h.n, frozenset(h.edges))


def pattern_from_hg1(text: str) -> PatternGraph:
    return pattern_from_hypergraph(parse_hg1(text))


def resolve_pattern(spec: str) -> PatternGraph:
    """Interpret `spec` as a built-in pattern name or a path to a 2-uniform HG1 file."""
    try:
        return named_pattern(spec)
    except ValueError:
        pass
    path = Path(spec)
    if path.exists():
        return pattern_from_hg1(path.read_text(encoding="utf-8"))
    raise ValueError(f"{spec!r} is neither a built-in pattern name nor an existing file")
