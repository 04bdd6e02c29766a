"""Byzantine agreement on preference rankings: node logic and run loops.

Three protocols share one round engine.  A *king round* has three phases:
every node broadcasts its current ranking; every node broadcasts the batch
of pairs supported by at least n-t of the rankings it received; then a
pre-scheduled dictator broadcasts its (adjusted) ranking, which a node adopts
unless the dictator value is malformed or omits one of the node's
well-supported pairs.

Pair thresholds are asymmetric on purpose.  A pair is *fixed* (merged into
the node's own ranking) once t+1 senders propose it — at least one of them
correct.  A pair is a *lock* (grounds for rejecting the dictator) only at
n-t receipts, which every pair unanimous among correct inputs reaches at
every correct node.  Running both tests at one common threshold breaks either
agreement or validity; the split keeps both.

With fewer than n/3 corruptions the fixed set of a correct node can still be
cyclic when n <= (L+1)*t for some cycle length L <= m: rotations of an
L-cycle can each clear t+1 receipts at one node.  Resolution drops the
lexicographically last-added edge of any cycle, records an integrity event,
and continues, so runs remain comparable instead of aborting.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .kemeny import kemeny_exact
from .rankings import Pair, Profile, Ranking, is_ranking, validate_ranking
from .simnet import (
    DICTATOR,
    PROPOSE,
    RANKING,
    AdversaryStrategy,
    IntegrityEvent,
    RunResult,
    RunStats,
    SyncNetwork,
    sanitize_batch,
    sanitize_ranking,
)
from .tournament import weight_matrix


class IntegrityError(RuntimeError):
    """Raised in strict mode when threshold-fixed pairs contain a cycle."""


@dataclass(frozen=True)
class ProtocolConfig:
    """Static parameters of one run.

    Requires 3t < n.  ``dictator_schedule`` lists the dictator of each king
    round; it must hold t+1 distinct ids so at least one scheduled dictator
    is correct.  Default schedule: nodes 0..t.

    ``enforce_resilience=False`` drops only the 3t < n check, for stress
    harnesses that deliberately run past the bound to watch the protocols
    fail; no guarantee survives out there.
    """

    n: int
    t: int
    m: int
    dictator_schedule: tuple[int, ...] | None = None
    enforce_resilience: bool = True

    def __post_init__(self):
        if not (isinstance(self.n, int) and isinstance(self.t, int) and isinstance(self.m, int)):
            raise TypeError("n, t, m must be ints")
        if self.t < 0 or self.n < 1:
            raise ValueError("need n >= 1 and t >= 0")
        if self.enforce_resilience and 3 * self.t >= self.n:
            raise ValueError(f"resilience requires 3t < n, got n={self.n}, t={self.t}")
        if self.m < 2:
            raise ValueError("protocols need at least two candidates")
        if self.dictator_schedule is None:
            object.__setattr__(self, "dictator_schedule", tuple(range(self.t + 1)))
        sched = tuple(self.dictator_schedule)
        object.__setattr__(self, "dictator_schedule", sched)
        if len(sched) != self.t + 1:
            raise ValueError(f"dictator schedule must have t+1={self.t + 1} entries")
        if len(set(sched)) != len(sched):
            raise ValueError("dictator schedule entries must be distinct")
        if any(not (0 <= d < self.n) for d in sched):
            raise ValueError("dictator schedule entries must be node ids")

    def with_schedule(self, schedule: Sequence[int] | None) -> "ProtocolConfig":
        return replace(self, dictator_schedule=tuple(schedule) if schedule else None)


@dataclass
class NodeState:
    """Mutable per-node view: evolving ranking plus last round's fixed pairs."""

    id: int
    current_ranking: Ranking
    fixed_pairs: frozenset[Pair] = field(default_factory=frozenset)
    round: int = 0


RANKING_BROADCAST = "RankingBroadcast"
PROPOSE_BATCH = "ProposeBatch"
DICTATOR_RANKING = "DictatorRanking"

_KIND_BY_PHASE = {
    RANKING: RANKING_BROADCAST,
    PROPOSE: PROPOSE_BATCH,
    DICTATOR: DICTATOR_RANKING,
}


@dataclass(frozen=True)
class Message:
    """One delivered message, as seen by its recipient.

    ``payload`` is a ranking for RankingBroadcast and DictatorRanking, a
    frozenset of pairs for ProposeBatch (antisymmetric within the batch),
    or None for an omitted/garbled transmission.
    """

    kind: str
    sender: int
    round: int
    recipient: int
    payload: object


def transcript_messages(result) -> list[Message]:
    """Typed view of a recorded run transcript, in delivery order."""
    if result.transcript is None:
        raise ValueError("run was made without record_transcript=True")
    return [
        Message(_KIND_BY_PHASE[phase], sender, round_no, recipient, payload)
        for (round_no, phase, sender, recipient, payload) in result.transcript
    ]


# --- pure per-node steps ------------------------------------------------------


def _proposals(received: Sequence[Ranking | None], n: int, t: int, m: int) -> frozenset[Pair]:
    valid = [r for r in received if r is not None]
    w = weight_matrix(valid, m)
    need = n - t
    return frozenset(
        Pair(a, b) for a in range(m) for b in range(m) if a != b and w[a][b] >= need
    )


def compute_proposals(received: Sequence[Ranking | None], cfg: ProtocolConfig) -> frozenset[Pair]:
    """Pairs supported by at least n-t of the received rankings.

    ``received`` has one slot per node; a slot is None when that node's
    broadcast was missing or malformed, and contributes no support.
    """
    if len(received) != cfg.n:
        raise ValueError(f"expected {cfg.n} slots, got {len(received)}")
    for r in received:
        if r is not None:
            validate_ranking(r, cfg.m)
    return _proposals(received, cfg.n, cfg.t, cfg.m)


def _receipts(batches: Mapping[int, frozenset[Pair] | None]) -> Counter:
    counts: Counter = Counter()
    for batch in batches.values():
        if batch:
            counts.update(batch)
    return counts


def _topo_cycle_free(pairs) -> bool:
    adj: dict[int, list[int]] = {}
    indeg: Counter = Counter()
    nodes = set()
    for p in pairs:
        adj.setdefault(p.above, []).append(p.below)
        indeg[p.below] += 1
        nodes.update((p.above, p.below))
    queue = [c for c in nodes if indeg[c] == 0]
    seen = 0
    while queue:
        c = queue.pop()
        seen += 1
        for d in adj.get(c, ()):
            indeg[d] -= 1
            if indeg[d] == 0:
                queue.append(d)
    return seen == len(nodes)


def collect_fixed_pairs(
    batches: Sequence[frozenset[Pair] | None],
    cfg: ProtocolConfig,
    *,
    strict: bool = True,
) -> frozenset[Pair]:
    """Pairs proposed by at least t+1 distinct senders.

    Each slot is one sender's batch (None when absent).  In strict mode a
    cyclic result raises IntegrityError; with strict=False the raw set is
    returned for the caller to resolve.
    """
    if len(batches) != cfg.n:
        raise ValueError(f"expected {cfg.n} slots, got {len(batches)}")
    counts = _receipts(dict(enumerate(batches)))
    fixed = frozenset(p for p, c in counts.items() if c >= cfg.t + 1)
    if strict and not _topo_cycle_free(fixed):
        raise IntegrityError("threshold-fixed pairs contain a cycle")
    return fixed


def resolve_acyclic(
    pairs: frozenset[Pair],
    receipts: Mapping[Pair, int] | None,
    n: int,
    t: int,
    *,
    round_no: int = 0,
    node: int = -1,
) -> tuple[frozenset[Pair], list[IntegrityEvent]]:
    """Extract an acyclic subset of ``pairs``, logging every dropped edge.

    Pairs present in both orientations are removed outright (that needs a
    correct equivocator, so it is flagged as a bug-level event).  The rest
    are added greedily in lexicographic order; an edge that would close a
    directed cycle is dropped with an event recording the cycle length and
    whether the edge had lock-level (>= n-t) receipts.
    """
    events: list[IntegrityEvent] = []
    survivors = set(pairs)
    for p in sorted(pairs):
        rev = Pair(p.below, p.above)
        if rev in pairs and p.above < p.below:
            events.append(
                IntegrityEvent(
                    kind="both-orientations",
                    round=round_no,
                    node=node,
                    pair=(p.above, p.below),
                    cycle_len=2,
                )
            )
            survivors.discard(p)
            survivors.discard(rev)
    kept: set[Pair] = set()
    adj: dict[int, set[int]] = {}

    def reachable(src: int, dst: int) -> int:
        # BFS over kept edges; returns path edge count, 0 if unreachable
        frontier = [src]
        dist = {src: 0}
        while frontier:
            nxt = []
            for c in frontier:
                for d in adj.get(c, ()):
                    if d not in dist:
                        dist[d] = dist[c] + 1
                        if d == dst:
                            return dist[d]
                        nxt.append(d)
            frontier = nxt
        return 0

    lock_level = n - t
    for p in sorted(survivors):
        path = reachable(p.below, p.above)
        if path:
            level = None
            if receipts is not None:
                level = "lock" if receipts.get(p, 0) >= lock_level else "fix"
            events.append(
                IntegrityEvent(
                    kind="fixed-cycle",
                    round=round_no,
                    node=node,
                    pair=(p.above, p.below),
                    level=level,
                    cycle_len=path + 1,
                )
            )
            continue
        kept.add(p)
        adj.setdefault(p.above, set()).add(p.below)
    return frozenset(kept), events


def adjust_ranking(ranking: Ranking, fixed_pairs: frozenset[Pair]) -> Ranking:
    """Merge fixed pairs into a ranking, moving constrained candidates up.

    Candidates touched by any fixed pair form the top block, ordered by a
    topological sort of the pairs that breaks ties by the candidate's
    position in the node's own ranking; everyone else follows below in the
    node's own order.  Cyclic input raises ValueError.
    """
    import heapq

    validate_ranking(ranking)
    pos = {c: i for i, c in enumerate(ranking)}
    constrained: set[int] = set()
    adj: dict[int, list[int]] = {}
    indeg: Counter = Counter()
    for p in fixed_pairs:
        if p.above not in pos or p.below not in pos:
            raise ValueError(f"pair {p} mentions a candidate outside the ranking")
        constrained.update((p.above, p.below))
        adj.setdefault(p.above, []).append(p.below)
        indeg[p.below] += 1
    heap = [pos[c] for c in constrained if indeg[c] == 0]
    heapq.heapify(heap)
    block: list[int] = []
    while heap:
        c = ranking[heapq.heappop(heap)]
        block.append(c)
        for d in adj.get(c, ()):
            indeg[d] -= 1
            if indeg[d] == 0:
                heapq.heappush(heap, pos[d])
    if len(block) != len(constrained):
        raise ValueError("fixed pairs contain a cycle")
    rest = [c for c in ranking if c not in constrained]
    return tuple(block + rest)


def decide_dictator(
    own: Ranking,
    fixed_pairs: frozenset[Pair],
    dictator_ranking: object,
) -> Ranking:
    """Adopt the dictator's ranking unless it is malformed or misses a pair."""
    if not (isinstance(dictator_ranking, tuple) and is_ranking(dictator_ranking, len(own))):
        return own
    dpos = {c: i for i, c in enumerate(dictator_ranking)}
    for p in fixed_pairs:
        if dpos[p.above] > dpos[p.below]:
            return own
    return dictator_ranking


# --- round engine -------------------------------------------------------------


def _king_rounds(
    net: SyncNetwork,
    n: int,
    t: int,
    m: int,
    states: dict[int, NodeState],
    byz_ids: frozenset[int],
    instance_inputs: Mapping[int, Ranking],
    schedule: Sequence[int],
    start_round: int,
    rounds: int,
    events: list[IntegrityEvent],
) -> None:
    """Run ``rounds`` king rounds in place.

    States are maintained for every node: corrupted nodes keep an honest
    shadow state (fed by real inboxes) so the honest-behaviour callback can
    answer exactly what they would have sent.
    """
    correct = [v for v in range(n) if v not in byz_ids]
    byz = sorted(byz_ids)
    for local in range(rounds):
        ground = start_round + local
        dict_id = schedule[local]

        inboxes = net.exchange(
            ground,
            RANKING,
            m,
            {v: states[v].current_ranking for v in correct},
            byz,
            instance_inputs,
            honest=lambda s: states[s].current_ranking,
            dictator=dict_id,
        )
        proposals: dict[int, frozenset[Pair]] = {}
        for v in range(n):
            box = inboxes[v]
            # correct-sender payloads were built by this engine; only
            # adversary-supplied ones need recipient-side validation
            received = [
                sanitize_ranking(box.get(u), m) if u in byz_ids else box.get(u)
                for u in range(n)
            ]
            proposals[v] = _proposals(received, n, t, m)

        inboxes = net.exchange(
            ground,
            PROPOSE,
            m,
            {v: proposals[v] for v in correct},
            byz,
            instance_inputs,
            honest=lambda s: proposals[s],
            dictator=dict_id,
        )
        locks: dict[int, frozenset[Pair]] = {}
        for v in range(n):
            box = inboxes[v]
            batches = {
                u: sanitize_batch(box.get(u), m) if u in byz_ids else box.get(u)
                for u in range(n)
            }
            receipts = _receipts(batches)
            fixed_raw = frozenset(p for p, c in receipts.items() if c >= t + 1)
            kept, evs = resolve_acyclic(
                fixed_raw, receipts, n, t, round_no=ground, node=v
            )
            if v not in byz_ids:
                events.extend(evs)
            locks[v] = frozenset(p for p in kept if receipts[p] >= n - t)
            st = states[v]
            st.fixed_pairs = kept
            st.current_ranking = adjust_ranking(st.current_ranking, kept)
            st.round = ground

        inboxes = net.exchange(
            ground,
            DICTATOR,
            m,
            {dict_id: states[dict_id].current_ranking} if dict_id not in byz_ids else {},
            [dict_id] if dict_id in byz_ids else [],
            instance_inputs,
            honest=lambda s: states[s].current_ranking,
            dictator=dict_id,
        )
        for v in range(n):
            got = inboxes[v].get(dict_id)
            dr = sanitize_ranking(got, m) if dict_id in byz_ids else got
            states[v].current_ranking = decide_dictator(
                states[v].current_ranking, locks[v], dr
            )
        net.end_round()


def _setup(inputs: Sequence[Ranking], adversary: AdversaryStrategy, cfg: ProtocolConfig, seed):
    if len(inputs) != cfg.n:
        raise ValueError(f"need {cfg.n} inputs, got {len(inputs)}")
    for r in inputs:
        validate_ranking(r, cfg.m)
    byz = frozenset(adversary.pick_byzantine(cfg.n, cfg.t, random.Random(f"{seed}/corrupt")))
    if len(byz) > cfg.t or any(not (0 <= v < cfg.n) for v in byz):
        raise ValueError("corruption set exceeds t or names unknown nodes")
    return byz


def _finish(net, states, byz, inputs, cfg, rounds, events) -> RunResult:
    total, per_round = net.finish()
    correct = [v for v in range(cfg.n) if v not in byz]
    return RunResult(
        outputs={v: states[v].current_ranking for v in correct},
        correct_inputs={v: inputs[v] for v in correct},
        byz_ids=byz,
        stats=RunStats(
            rounds=rounds,
            messages_total=total,
            messages_per_round=per_round,
            integrity_errors=tuple(events),
        ),
        transcript=tuple(net.transcript) if net.transcript is not None else None,
    )


def run_algorithm1(
    inputs: Sequence[Ranking],
    adversary: AdversaryStrategy,
    cfg: ProtocolConfig,
    seed: int | str = 0,
    record_transcript: bool = False,
) -> RunResult:
    """t+1 king rounds straight over the input rankings."""
    byz = _setup(inputs, adversary, cfg, seed)
    net = SyncNetwork(cfg.n, cfg.t, byz, adversary, seed, record_transcript)
    states = {v: NodeState(v, inputs[v]) for v in range(cfg.n)}
    correct_inputs = {v: inputs[v] for v in range(cfg.n) if v not in byz}
    events: list[IntegrityEvent] = []
    _king_rounds(
        net, cfg.n, cfg.t, cfg.m, states, byz, correct_inputs,
        cfg.dictator_schedule, 1, cfg.t + 1, events,
    )
    return _finish(net, states, byz, inputs, cfg, cfg.t + 1, events)


def run_algorithm2(
    inputs: Sequence[Ranking],
    adversary: AdversaryStrategy,
    cfg: ProtocolConfig,
    seed: int | str = 0,
    record_transcript: bool = False,
) -> RunResult:
    """Broadcast inputs, take local Kemeny medians, then agree on the medians.

    Round 1 is the only full exchange; round 2 is message-free local median
    computation; rounds 3..t+3 run the king engine over the medians.  Total:
    t+3 rounds.
    """
    byz = _setup(inputs, adversary, cfg, seed)
    net = SyncNetwork(cfg.n, cfg.t, byz, adversary, seed, record_transcript)
    correct = [v for v in range(cfg.n) if v not in byz]
    correct_inputs = {v: inputs[v] for v in correct}

    inboxes = net.exchange(
        1,
        RANKING,
        cfg.m,
        {v: inputs[v] for v in correct},
        sorted(byz),
        correct_inputs,
        honest=lambda s: inputs[s],
        dictator=None,
    )
    net.end_round()

    states: dict[int, NodeState] = {}
    median_memo: dict[tuple, Ranking] = {}
    for v in range(cfg.n):
        box = inboxes[v]
        ballots = []
        for u in range(cfg.n):
            r = sanitize_ranking(box.get(u), cfg.m) if u in byz else box.get(u)
            if r is not None:
                ballots.append(r)
        key = tuple(ballots)
        if key not in median_memo:
            median_memo[key] = kemeny_exact(Profile.of(ballots, cfg.m)).chosen
        states[v] = NodeState(v, median_memo[key], frozenset(), 2)
    net.end_round()  # round 2: local computation only

    medians = {v: states[v].current_ranking for v in correct}
    events: list[IntegrityEvent] = []
    _king_rounds(
        net, cfg.n, cfg.t, cfg.m, states, byz, medians,
        cfg.dictator_schedule, 3, cfg.t + 1, events,
    )
    return _finish(net, states, byz, inputs, cfg, cfg.t + 3, events)


def run_baseline_stv(
    inputs: Sequence[Ranking],
    adversary: AdversaryStrategy,
    cfg: ProtocolConfig,
    seed: int | str = 0,
    record_transcript: bool = False,
) -> RunResult:
    """Sequential-elimination baseline: m-1 agreement stages, one per seat.

    Stage k agrees on the input profile restricted to the candidates still
    standing (candidate ids re-indexed densely), takes the top of the agreed
    ranking as the stage winner, and removes it.  Every stage runs the full
    t+1 king rounds, so the total is (m-1)(t+1) rounds.
    """
    byz = _setup(inputs, adversary, cfg, seed)
    net = SyncNetwork(cfg.n, cfg.t, byz, adversary, seed, record_transcript)
    correct = [v for v in range(cfg.n) if v not in byz]
    remaining: dict[int, list[int]] = {v: list(range(cfg.m)) for v in range(cfg.n)}
    prefix: dict[int, list[int]] = {v: [] for v in range(cfg.n)}
    events: list[IntegrityEvent] = []

    for stage in range(cfg.m - 1):
        m_cur = cfg.m - stage
        stage_inputs: dict[int, Ranking] = {}
        old_ids: dict[int, list[int]] = {}
        for v in range(cfg.n):
            olds = sorted(remaining[v])
            old_ids[v] = olds
            to_new = {c: i for i, c in enumerate(olds)}
            stage_inputs[v] = tuple(to_new[c] for c in inputs[v] if c in to_new)
        states = {v: NodeState(v, stage_inputs[v]) for v in range(cfg.n)}
        _king_rounds(
            net, cfg.n, cfg.t, m_cur, states, byz,
            {v: stage_inputs[v] for v in correct},
            cfg.dictator_schedule, stage * (cfg.t + 1) + 1, cfg.t + 1, events,
        )
        for v in range(cfg.n):
            winner = old_ids[v][states[v].current_ranking[0]]
            prefix[v].append(winner)
            remaining[v].remove(winner)

    final_states = {
        v: NodeState(v, tuple(prefix[v] + remaining[v])) for v in range(cfg.n)
    }
    return _finish(net, final_states, byz, inputs, cfg, (cfg.m - 1) * (cfg.t + 1), events)
