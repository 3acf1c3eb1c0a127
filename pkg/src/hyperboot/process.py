"""Fixed-point iteration of the pattern process, trace recording, and trace I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .embedding import CopyWitness, frontier
from .hypergraph import Hypergraph, KSet, make_hypergraph
from .patterns import ExtensionPattern, PatternGraph, extend

SNAPSHOT_EVERY = 8
TRACE_FORMAT = "hyperboot-trace"
TRACE_VERSION = 1


@dataclass
class StepRecord:
    """One process step: the edges added and one witness copy per edge."""

    index: int
    added: tuple[KSet, ...]
    witnesses: dict[KSet, CopyWitness]


@dataclass
class Trace:
    """The evolution H_0 subset H_1 subset ... up to the fixed point.

    Stores per-step deltas plus periodic full snapshots so that intermediate
    states can be reconstructed without quadratic memory. `tau` is set iff the
    process reached its fixed point within the step budget.
    """

    pattern_key: str
    pattern: ExtensionPattern
    h0: Hypergraph
    steps: list[StepRecord]
    tau: int | None
    terminated: bool
    final: Hypergraph
    snapshots: dict[int, Hypergraph] = field(repr=False, default_factory=dict)

    def state_at(self, m: int) -> Hypergraph:
        """The hypergraph after m steps (m = 0 is the initial state)."""
        if m < 0 or m > len(self.steps):
            raise ValueError(f"step index {m} outside 0..{len(self.steps)}")
        base = max(i for i in self.snapshots if i <= m)
        h = self.snapshots[base]
        for rec in self.steps[base:m]:
            h = h.add_edges(rec.added)
        return h


def pattern_key(p: ExtensionPattern) -> str:
    pairs = ",".join(f"{u}-{v}" for u, v in p.g.edge_order)
    return f"k={p.k};t={p.t};pairs={pairs}"


def step(
    p: ExtensionPattern, h: Hypergraph, workers: int = 1, index: int = 1, strategy: str = "auto"
) -> tuple[Hypergraph, StepRecord]:
    """Apply one update: insert every absent k-set that completes a new copy."""
    fr = frontier(p, h, workers=workers, strategy=strategy)
    nxt = h.add_edges(fr.new_edges) if fr.new_edges else h
    return nxt, StepRecord(index=index, added=fr.new_edges, witnesses=fr.witnesses)


def run(
    p: ExtensionPattern,
    h0: Hypergraph,
    max_steps: int | None = None,
    workers: int = 1,
    strategy: str = "auto",
) -> Trace:
    """Iterate the process from h0 until the fixed point or until max_steps.

    The default step budget is C(n, k), which always suffices because every
    recorded step adds at least one edge.
    """
    if p.k != h0.k:
        raise ValueError(f"pattern uniformity {p.k} differs from start uniformity {h0.k}")
    if max_steps is None:
        max_steps = h0.max_edges()
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")

    h = h0
    steps: list[StepRecord] = []
    snapshots = {0: h0}
    terminated = False
    for i in range(1, max_steps + 1):
        h_next, rec = step(p, h, workers=workers, index=i, strategy=strategy)
        if not rec.added:
            terminated = True
            break
        h = h_next
        steps.append(rec)
        if i % SNAPSHOT_EVERY == 0:
            snapshots[i] = h
    else:
        # budget exhausted after max_steps growing steps; the state may still
        # happen to be a fixed point, so check once before giving up
        fr = frontier(p, h, workers=workers, strategy=strategy)
        terminated = not fr.new_edges

    return Trace(
        pattern_key=pattern_key(p),
        pattern=p,
        h0=h0,
        steps=steps,
        tau=len(steps) if terminated else None,
        terminated=terminated,
        final=h,
        snapshots=snapshots,
    )


def running_time(tr: Trace) -> int:
    """The number of changing steps; defined only for traces that reached a fixed point."""
    if not tr.terminated or tr.tau is None:
        raise ValueError("trace did not reach a fixed point within its step budget")
    return tr.tau


# ---------------------------------------------------------------------------
# Trace serialization: line-delimited JSON with a versioned header, plus CSV.


def _edge_key(e: KSet) -> str:
    return " ".join(str(v) for v in e)


def _parse_edge_key(s: str) -> KSet:
    return tuple(int(x) for x in s.split())


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def trace_to_jsonl(tr: Trace, include_witnesses: bool = True) -> str:
    header = {
        "format": TRACE_FORMAT,
        "version": TRACE_VERSION,
        "k": tr.h0.k,
        "n": tr.h0.n,
        "pattern": {
            "t": tr.pattern.t,
            "pairs": [list(pr) for pr in tr.pattern.g.edge_order],
            "k": tr.pattern.k,
        },
        "pattern_key": tr.pattern_key,
        "initial_edges": [list(e) for e in tr.h0.edge_list],
    }
    lines = [_dump(header)]
    for rec in tr.steps:
        obj: dict = {"step": rec.index, "added": [list(e) for e in rec.added]}
        if include_witnesses:
            obj["witnesses"] = {
                _edge_key(e): {
                    "center_map": list(w.center_map),
                    "sleeves": [list(s) for s in w.sleeves],
                }
                for e, w in sorted(rec.witnesses.items())
            }
        lines.append(_dump(obj))
    lines.append(_dump({"tau": tr.tau, "terminated": tr.terminated}))
    return "\n".join(lines) + "\n"


def trace_from_jsonl(text: str) -> Trace:
    rows = [json.loads(ln) for ln in text.splitlines() if ln.strip()]
    if not rows or rows[0].get("format") != TRACE_FORMAT:
        raise ValueError("not a trace document")
    head = rows[0]
    if head.get("version") != TRACE_VERSION:
        raise ValueError(f"unsupported trace version {head.get('version')!r}")
    pat = head["pattern"]
    p = extend(PatternGraph(pat["t"], frozenset(tuple(pr) for pr in pat["pairs"])), pat["k"])
    h0 = make_hypergraph(head["n"], head["k"], [tuple(e) for e in head["initial_edges"]])

    steps: list[StepRecord] = []
    tau: int | None = None
    terminated = False
    h = h0
    snapshots = {0: h0}
    for obj in rows[1:]:
        if "step" in obj:
            added = tuple(tuple(e) for e in obj["added"])
            witnesses: dict[KSet, CopyWitness] = {}
            for key, wobj in obj.get("witnesses", {}).items():
                witnesses[_parse_edge_key(key)] = CopyWitness(
                    pattern=p,
                    center_map=tuple(wobj["center_map"]),
                    sleeves=tuple(tuple(s) for s in wobj["sleeves"]),
                )
            steps.append(StepRecord(index=obj["step"], added=added, witnesses=witnesses))
            h = h.add_edges(added)
            if obj["step"] % SNAPSHOT_EVERY == 0:
                snapshots[obj["step"]] = h
        else:
            tau = obj.get("tau")
            terminated = bool(obj.get("terminated"))
    return Trace(
        pattern_key=pattern_key(p),
        pattern=p,
        h0=h0,
        steps=steps,
        tau=tau,
        terminated=terminated,
        final=h,
        snapshots=snapshots,
    )


def write_trace_jsonl(tr: Trace, path, include_witnesses: bool = True) -> None:
    Path(path).write_text(trace_to_jsonl(tr, include_witnesses), encoding="utf-8")


def read_trace_jsonl(path) -> Trace:
    return trace_from_jsonl(Path(path).read_text(encoding="utf-8"))


def trace_to_csv(tr: Trace) -> str:
    lines = ["step,edges_added,cumulative_edges"]
    total = len(tr.h0.edges)
    for rec in tr.steps:
        total += len(rec.added)
        lines.append(f"{rec.index},{len(rec.added)},{total}")
    return "\n".join(lines) + "\n"


def write_trace_csv(tr: Trace, path) -> None:
    Path(path).write_text(trace_to_csv(tr), encoding="utf-8")


# ---------------------------------------------------------------------------
# Invariant checking, shared by the test suite and the reproduction commands.


def check_trace_invariants(tr: Trace, workers: int = 1) -> list[str]:
    """Validate a terminated-or-not trace against the process contracts.

    Returns a list of violation descriptions; an empty list means the trace is
    internally consistent: monotone growth, nonempty recorded steps, witness
    soundness, the trivial step bound, and fixed-point idempotence.
    """
    problems: list[str] = []
    h = tr.h0
    for pos, rec in enumerate(tr.steps, start=1):
        if rec.index != pos:
            problems.append(f"step record {pos} carries index {rec.index}")
        if not rec.added:
            problems.append(f"step {pos} added no edges but was recorded")
        if set(rec.witnesses) != set(rec.added):
            problems.append(f"step {pos} witnesses do not cover the added edges")
        for e in rec.added:
            if e in h.edges:
                problems.append(f"step {pos} re-adds existing edge {e}")
            w = rec.witnesses.get(e)
            if w is None:
                continue
            issues = w.problems(h, extra_edge=e)
            if issues:
                problems.append(f"step {pos} witness for {e} invalid: {issues[0]}")
            elif not w.uses(e):
                problems.append(f"step {pos} witness for {e} does not use it")
        h = h.add_edges(rec.added)
    if h.edges != tr.final.edges:
        problems.append("replayed final state differs from recorded final state")
    if tr.terminated:
        if tr.tau != len(tr.steps):
            problems.append(f"tau={tr.tau} but {len(tr.steps)} steps recorded")
        bound = tr.h0.max_edges() - len(tr.h0.edges)
        if tr.tau is not None and tr.tau > bound:
            problems.append(f"tau={tr.tau} exceeds the trivial bound {bound}")
        fr = frontier(tr.pattern, tr.final, workers=workers)
        if fr.new_edges:
            problems.append("final state is not a fixed point")
    return problems
