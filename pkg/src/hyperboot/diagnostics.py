"""Trace diagnostics: center families, matching degree, step classification,
essential pairs, vertex replacement, and executable observation checks."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .embedding import CopyWitness, _Embedder
from .hypergraph import BudgetError, Hypergraph, max_disjoint_sets
from .patterns import ExtensionPattern
from .process import Trace

DEFAULT_WITNESS_BUDGET = 10**6


@dataclass(frozen=True)
class Center:
    """The image of the pattern graph inside one copy: labeled vertices and pairs."""

    vertices: tuple[int, ...]
    pairs: frozenset[tuple[int, int]]
    source: CopyWitness | None = field(default=None, compare=False)


def center_of(w: CopyWitness) -> Center:
    return Center(
        vertices=tuple(sorted(w.center_map)),
        pairs=frozenset(w.center_pairs()),
        source=w,
    )


@dataclass(frozen=True)
class CenterFamily:
    """All centers of copies in one state, with the union of their pair sets.

    `complete` is False when the enumeration budget ran out; classification
    built on a partial family would be unsound, so consumers must check it.
    """

    step: int | None
    centers: tuple[Center, ...]
    pair_set: frozenset[tuple[int, int]]
    complete: bool


def center_family(
    p: ExtensionPattern,
    host: Hypergraph,
    budget: int = DEFAULT_WITNESS_BUDGET,
    step: int | None = None,
) -> CenterFamily:
    """Enumerate the centers realized by some copy, deduplicated as labeled graphs."""
    seen: dict[tuple, Center] = {}
    pair_set: set[tuple[int, int]] = set()
    count = 0
    complete = True
    for w in _Embedder(p, host).embeddings():
        count += 1
        if count > budget:
            complete = False
            break
        c = center_of(w)
        seen.setdefault((c.vertices, c.pairs), c)
        pair_set.update(c.pairs)
    centers = tuple(seen[key] for key in sorted(seen))
    return CenterFamily(step=step, centers=centers, pair_set=frozenset(pair_set), complete=complete)


def d_match(host: Hypergraph, pair, node_budget: int = 2_000_000) -> int:
    """Maximum number of pairwise disjoint (k-2)-sets completing `pair` to an edge.

    Exact: for k=3 the completions are distinct singletons so it is their
    count; for k=2 it is edge membership; for k >= 4 an exact branch-and-bound
    packs the link, guarded by `node_budget`.
    """
    u, v = sorted(pair)
    completions = host.pair_index.get((u, v), ())
    if not completions:
        return 0
    if host.k == 2:
        return 1
    if host.k == 3:
        return len(completions)
    return max_disjoint_sets(completions, node_budget=node_budget)


# ---------------------------------------------------------------------------
# Step classification and essential pairs along a trace.


def _pair_set_of_state(p: ExtensionPattern, host: Hypergraph, budget: int):
    pairs: set[tuple[int, int]] = set()
    count = 0
    for w in _Embedder(p, host).embeddings():
        count += 1
        if count > budget:
            return None
        pairs.update(w.center_pairs())
    return frozenset(pairs)


def trace_pair_sets(tr: Trace, p: ExtensionPattern, budget: int = DEFAULT_WITNESS_BUDGET):
    """Center-pair sets for every state H_0..H_last; None where the budget ran out."""
    return [_pair_set_of_state(p, tr.state_at(m), budget) for m in range(len(tr.steps) + 1)]


def classify_steps(
    tr: Trace, p: ExtensionPattern, budget: int = DEFAULT_WITNESS_BUDGET
) -> dict[int, str]:
    """Label each step "real" (its center-pair set grew), "fake", or "unknown" (budget)."""
    sets = trace_pair_sets(tr, p, budget)
    kinds: dict[int, str] = {}
    for m in range(1, len(tr.steps) + 1):
        if sets[m] is None or sets[m - 1] is None:
            kinds[m] = "unknown"
        elif sets[m] - sets[m - 1]:
            kinds[m] = "real"
        else:
            kinds[m] = "fake"
    return kinds


@dataclass(frozen=True)
class EssentialRecord:
    """The essential pair selected at one real step.

    `copy` is the lexicographically least witness whose center contributes a
    new pair, and `pair` minimizes the matching degree in the previous state
    over that copy's center pairs (ties broken lexicographically).
    """

    m: int
    pair: tuple[int, int]
    copy: CopyWitness
    dmatch_at_selection: int


def essential_pairs(
    tr: Trace, p: ExtensionPattern, budget: int = DEFAULT_WITNESS_BUDGET
) -> list[EssentialRecord]:
    """One record per real step; raises BudgetError if any family is partial."""
    sets = trace_pair_sets(tr, p, budget)
    out: list[EssentialRecord] = []
    for m in range(1, len(tr.steps) + 1):
        prev, cur = sets[m - 1], sets[m]
        if prev is None or cur is None:
            raise BudgetError(f"center family at step {m} exceeded the witness budget")
        if not (cur - prev):
            continue
        h_m = tr.state_at(m)
        h_prev = tr.state_at(m - 1)
        chosen = None
        count = 0
        for w in _Embedder(p, h_m).embeddings():
            count += 1
            if count > budget:
                raise BudgetError(f"witness scan at step {m} exceeded the budget")
            if any(pr not in prev for pr in w.center_pairs()):
                chosen = w
                break
        if chosen is None:
            raise AssertionError(f"real step {m} has no qualifying copy")
        scored = sorted((d_match(h_prev, pr), pr) for pr in set(chosen.center_pairs()))
        dmin, pair = scored[0]
        out.append(EssentialRecord(m=m, pair=pair, copy=chosen, dmatch_at_selection=dmin))
    return out


def good_vertices(fam: CenterFamily, c: int) -> set[int]:
    """Vertices paired with at least c distinct partners in the family's pair set."""
    deg: Counter[int] = Counter()
    for u, v in fam.pair_set:
        deg[u] += 1
        deg[v] += 1
    return {v for v, d in deg.items() if d >= c}


def replace_vertex(center: Center, x: int, y: int) -> Center:
    """The labeled graph obtained by substituting y for x, transferring incidences."""
    if x not in center.vertices:
        raise ValueError(f"vertex {x} is not in the center")
    if y in center.vertices:
        raise ValueError(f"vertex {y} is already in the center")
    pairs = set()
    for u, v in center.pairs:
        if x in (u, v):
            other = v if u == x else u
            pairs.add((min(other, y), max(other, y)))
        else:
            pairs.add((u, v))
    verts = tuple(sorted(set(center.vertices) - {x} | {y}))
    return Center(vertices=verts, pairs=frozenset(pairs), source=None)


def center_in_family(center: Center, fam: CenterFamily) -> bool:
    """True iff some family member equals `center` as a labeled graph."""
    return any(c == center for c in fam.centers)


# ---------------------------------------------------------------------------
# Hierarchy configuration and observation checks.


@dataclass(frozen=True)
class DiagnosticsConfig:
    """Desk-scale stand-ins for the asymptotic hierarchy constants.

    The strict chain ell < c < s < gamma2 < gamma1 < gamma is enforced; the
    ambient vertex count plays the role of the final constant and is reported
    from the run rather than configured.
    """

    ell: int = 4
    c: int = 6
    s: int = 8
    gamma2: int = 10
    gamma1: int = 12
    gamma: int = 16

    def __post_init__(self):
        chain = (self.ell, self.c, self.s, self.gamma2, self.gamma1, self.gamma)
        if any(x <= 0 for x in chain):
            raise ValueError("hierarchy constants must be positive")
        if any(a >= b for a, b in zip(chain, chain[1:])):
            raise ValueError("hierarchy constants must satisfy ell < c < s < gamma2 < gamma1 < gamma")


def parse_diagnostics_config(text: str) -> DiagnosticsConfig:
    """Parse a flat "key = value" document (comments start with '#')."""
    values: dict[str, int] = {}
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        if "=" not in ln:
            raise ValueError(f"bad config line {ln!r}")
        key, _, raw = ln.partition("=")
        values[key.strip()] = int(raw.strip())
    known = {"ell", "c", "s", "gamma2", "gamma1", "gamma"}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return DiagnosticsConfig(**values)


def load_diagnostics_config(path) -> DiagnosticsConfig:
    return parse_diagnostics_config(Path(path).read_text(encoding="utf-8"))


@dataclass
class CheckResult:
    name: str
    status: str  # pass | fail | not-applicable | incomplete | info
    detail: str = ""


@dataclass
class ObservationReport:
    n: int
    config: DiagnosticsConfig
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)


def _degree_check(tr: Trace, p: ExtensionPattern, samples: int, seed: int) -> CheckResult:
    name = "center-pair-degree"
    min_n = 3 * p.f.n
    if tr.h0.n < min_n:
        return CheckResult(name, "not-applicable", f"needs n >= {min_n}, trace has n={tr.h0.n}")
    rng = random.Random(seed)
    tau = len(tr.steps)
    checked = 0
    for m in range(1, tau + 1):
        h_next = tr.state_at(min(m + 1, tau))
        rec = tr.steps[m - 1]
        for e in rec.added:
            w = rec.witnesses.get(e)
            if w is None:
                continue
            body = w.vertices()
            pool = [x for x in range(tr.h0.n) if x not in body]
            pairs = set(w.center_pairs())
            for _ in range(samples):
                pad = tuple(sorted(rng.sample(pool, p.k - 2)))
                for a, b in pairs:
                    probe = tuple(sorted((a, b) + pad))
                    checked += 1
                    if probe not in h_next.edges:
                        return CheckResult(
                            name,
                            "fail",
                            f"step {m}: pair ({a},{b}) with pad {pad} missing from the next state",
                        )
    return CheckResult(name, "pass", f"{checked} sampled memberships verified")


def _window_check(kinds: dict[int, str], tau: int) -> CheckResult:
    name = "real-step-window"
    if any(kinds.get(m) == "unknown" for m in range(1, tau + 1)):
        return CheckResult(name, "incomplete", "some steps exceeded the family budget")
    for m in range(3, tau + 1):
        if not any(kinds[j] == "real" for j in (m - 2, m - 1, m)):
            return CheckResult(name, "fail", f"steps {m - 2}..{m} are all fake")
    return CheckResult(name, "pass", f"windows verified for 3 <= m <= {tau}")


def _twice_essential_check(records: list[EssentialRecord]) -> CheckResult:
    name = "twice-essential"
    counts = Counter(r.pair for r in records)
    worst = counts.most_common(1)
    if worst and worst[0][1] > 2:
        pair, times = worst[0]
        return CheckResult(name, "fail", f"pair {pair} selected {times} times")
    return CheckResult(name, "pass", f"{len(records)} essential selections, none thrice")


def _essential_load_check(records: list[EssentialRecord], cfg: DiagnosticsConfig) -> CheckResult:
    name = "essential-load"
    load: Counter[int] = Counter()
    for r in records:
        load[r.pair[0]] += 1
        load[r.pair[1]] += 1
    bound = cfg.c**3
    worst = load.most_common(1)
    if worst and worst[0][1] > bound:
        v, times = worst[0]
        # proven only under the asymptotic hierarchy; informational at desk scale
        return CheckResult(
            name, "info", f"vertex {v} carries {times} essential pairs > c^3={bound}; outside proven regime"
        )
    return CheckResult(name, "pass", f"per-vertex essential load within c^3={bound}")


def check_observations(
    tr: Trace,
    p: ExtensionPattern,
    cfg: DiagnosticsConfig | None = None,
    samples: int = 100,
    seed: int = 0,
    budget: int = DEFAULT_WITNESS_BUDGET,
) -> ObservationReport:
    """Run the executable observation checks over a terminated trace.

    Checks: sampled almost-full-degree of center pairs one step later, the
    real-step window, the at-most-twice essential rule, and the informational
    per-vertex essential load bound.
    """
    if not tr.terminated:
        raise ValueError("observation checks need a terminated trace")
    cfg = cfg or DiagnosticsConfig()
    tau = len(tr.steps)
    checks = [_degree_check(tr, p, samples, seed)]
    kinds = classify_steps(tr, p, budget)
    checks.append(_window_check(kinds, tau))
    try:
        records = essential_pairs(tr, p, budget)
    except BudgetError as exc:
        checks.append(CheckResult("twice-essential", "incomplete", str(exc)))
        checks.append(CheckResult("essential-load", "incomplete", str(exc)))
    else:
        checks.append(_twice_essential_check(records))
        checks.append(_essential_load_check(records, cfg))
    return ObservationReport(n=tr.h0.n, config=cfg, checks=checks)


def format_report(report: ObservationReport) -> str:
    cfg = report.config
    lines = [
        f"hierarchy: ell={cfg.ell} c={cfg.c} s={cfg.s} "
        f"gamma2={cfg.gamma2} gamma1={cfg.gamma1} gamma={cfg.gamma} n0={report.n}"
    ]
    for c in report.checks:
        lines.append(f"check {c.name} {c.status}" + (f" ({c.detail})" if c.detail else ""))
    lines.append("result " + ("pass" if report.passed else "fail"))
    return "\n".join(lines) + "\n"
