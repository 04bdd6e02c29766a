"""Deterministic synchronous network with pluggable Byzantine strategies.

One run is a sequence of lockstep rounds; each round has up to three message
phases (ranking broadcast, proposal batch, dictator ranking).  Correct nodes
broadcast uniformly; the adversary is *rushing* — it sees every correct
payload of the current phase before choosing its own messages — and may send
different payloads to different recipients (equivocation) or nothing at all.
Corruption is static: the Byzantine set is fixed before the run, by default
the last ``t`` node ids.

All randomness is derived from string seeds via ``random.Random``, which is
hash-seed independent, so equal ``(protocol, inputs, adversary, cfg, seed)``
reproduce bit-identical transcripts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .kemeny import kemeny_exact
from .rankings import Pair, Profile, Ranking, is_ranking, pairs_of, unanimous_pairs

# message phases
RANKING = "ranking"
PROPOSE = "propose"
DICTATOR = "dictator"

Payload = object  # Ranking in ranking/dictator phases, frozenset[Pair] in propose


@dataclass(frozen=True)
class IntegrityEvent:
    """A protocol-integrity violation observed by one correct node.

    kind is ``fixed-cycle`` (the node's threshold-fixed pairs contained a
    directed cycle; ``pair`` is the dropped edge, ``level`` records whether
    that edge had lock-level receipts) or ``both-orientations`` (both
    directions of one pair crossed the fix threshold — provably impossible
    below n/3 corruption, so firing indicates an implementation bug).
    """

    kind: str
    round: int
    node: int
    pair: tuple[int, int] | None = None
    level: str | None = None
    cycle_len: int | None = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "round": self.round,
            "node": self.node,
            "pair": list(self.pair) if self.pair else None,
            "level": self.level,
            "cycle_len": self.cycle_len,
        }


@dataclass(frozen=True)
class RunStats:
    rounds: int
    messages_total: int
    messages_per_round: tuple[int, ...]
    integrity_errors: tuple[IntegrityEvent, ...] = ()


@dataclass(frozen=True)
class RunResult:
    """Correct-node outputs plus accounting for one protocol run."""

    outputs: dict[int, Ranking]
    correct_inputs: dict[int, Ranking]
    byz_ids: frozenset[int]
    stats: RunStats
    transcript: tuple | None = None

    @property
    def agreement(self) -> bool:
        return len(set(self.outputs.values())) == 1

    @property
    def consensus(self) -> Ranking | None:
        if not self.agreement:
            return None
        return next(iter(self.outputs.values()))

    @property
    def pareto(self) -> bool:
        """Every pair unanimous among correct inputs appears in every output."""
        must = unanimous_pairs(Profile.of(list(self.correct_inputs.values())))
        return all(must <= pairs_of(out) for out in self.outputs.values())


@dataclass
class AdversaryContext:
    """Everything a strategy may look at when choosing one sender's messages."""

    seed: int | str
    round: int
    phase: str
    n: int
    t: int
    m: int
    byz_ids: frozenset[int]
    correct_msgs: Mapping[int, Payload]
    correct_inputs: Mapping[int, Ranking]
    dictator: int | None
    rng: random.Random
    honest: Callable[[int], Payload]


class AdversaryStrategy:
    """Base strategy: owns the corruption set and per-phase message choice."""

    name = "abstract"

    def pick_byzantine(self, n: int, t: int, rng: random.Random) -> frozenset[int]:
        return frozenset(range(n - t, n))

    def send(self, ctx: AdversaryContext, sender: int):
        """Return None (silence), a payload (uniform broadcast), or a
        recipient->payload dict (equivocation)."""
        raise NotImplementedError


class Honest(AdversaryStrategy):
    """Corrupted nodes follow the protocol with their own inputs."""

    name = "honest"

    def send(self, ctx, sender):
        return ctx.honest(sender)


class Silent(AdversaryStrategy):
    """Corrupted nodes never send anything."""

    name = "silent"

    def send(self, ctx, sender):
        return None


class OppositeMedian(AdversaryStrategy):
    """Pushes the exact reverse of the correct nodes' Kemeny median.

    The same reversed ranking is broadcast in every phase: as the round
    ranking, as a (transitive) full proposal batch, and as the dictator
    value.
    """

    name = "opposite-median"

    def __init__(self):
        self._memo: dict = {}

    def _target(self, ctx) -> Ranking:
        key = (ctx.m, tuple(sorted(ctx.correct_inputs.items())))
        if key not in self._memo:
            med = kemeny_exact(Profile.of(list(ctx.correct_inputs.values()), ctx.m))
            self._memo[key] = tuple(reversed(med.chosen))
        return self._memo[key]

    def send(self, ctx, sender):
        target = self._target(ctx)
        if ctx.phase == PROPOSE:
            return pairs_of(target)
        return target


class Equivocate(AdversaryStrategy):
    """Every message is a fresh random value, chosen per recipient."""

    name = "equivocate"

    def send(self, ctx, sender):
        rnd = random.Random(f"{ctx.seed}/equivocate/{ctx.round}/{ctx.phase}/{sender}")
        out = {}
        for v in range(ctx.n):
            r = tuple(rnd.sample(range(ctx.m), ctx.m))
            out[v] = pairs_of(r) if ctx.phase == PROPOSE else r
        return out


class RandomRankings(AdversaryStrategy):
    """One fresh random ranking per round, used consistently in all phases."""

    name = "random"

    def send(self, ctx, sender):
        rnd = random.Random(f"{ctx.seed}/random/{ctx.round}/{sender}")
        r = tuple(rnd.sample(range(ctx.m), ctx.m))
        if ctx.phase == PROPOSE:
            return pairs_of(r)
        return r


class ScriptedViews(AdversaryStrategy):
    """Plays an explicit script; silent wherever the script says nothing.

    The script maps ``(round, phase, sender)`` to a payload, a
    recipient->payload dict, or None.  Rounds are global (Kemeny-median
    agreement's broadcast round is round 1; sequential-elimination stages
    continue the count).
    """

    name = "scripted"

    def __init__(self, script: Mapping[tuple[int, str, int], object] | None = None):
        self.script = dict(script or {})

    def send(self, ctx, sender):
        return self.script.get((ctx.round, ctx.phase, sender))


def default_script(n: int, t: int, m: int) -> dict:
    """Round-1 ballot script used when `scripted` is selected with no scenario.

    Even n: every corrupted node broadcasts the full reversal of the identity
    ranking (the classic indistinguishable-view completion).  Odd n:
    corrupted node j broadcasts the j-th cyclic rotation of the identity.
    """
    script: dict = {}
    base = tuple(range(m))
    for idx, sender in enumerate(range(n - t, n)):
        if n % 2 == 0:
            ballot = tuple(reversed(base))
        else:
            k = idx % m
            ballot = base[k:] + base[:k]
        script[(1, RANKING, sender)] = ballot
    return script


STRATEGY_NAMES = ("honest", "silent", "opposite-median", "equivocate", "scripted", "random")


def make_strategy(name: str, *, n: int, t: int, m: int, script=None) -> AdversaryStrategy:
    """Instantiate a built-in strategy by CLI name."""
    if name == "honest":
        return Honest()
    if name == "silent":
        return Silent()
    if name == "opposite-median":
        return OppositeMedian()
    if name == "equivocate":
        return Equivocate()
    if name == "random":
        return RandomRankings()
    if name == "scripted":
        return ScriptedViews(script if script is not None else default_script(n, t, m))
    raise ValueError(f"unknown strategy {name!r} (choose from {', '.join(STRATEGY_NAMES)})")


class SyncNetwork:
    """Round/phase message fabric: delivery, counting, transcript, adversary.

    Correct-sender messages are counted (a broadcast is n point-to-point
    copies, self included); Byzantine messages are delivered and logged but
    never counted.
    """

    def __init__(
        self,
        n: int,
        t: int,
        byz_ids: frozenset[int],
        adversary: AdversaryStrategy,
        seed: int | str,
        record_transcript: bool = False,
    ):
        self.n = n
        self.t = t
        self.byz_ids = byz_ids
        self.adversary = adversary
        self.seed = seed
        self.rng = random.Random(f"{seed}/adversary")
        self.transcript: list | None = [] if record_transcript else None
        self.messages_per_round: list[int] = []
        self._current_round_messages = 0

    def exchange(
        self,
        round_no: int,
        phase: str,
        m: int,
        correct_payloads: Mapping[int, Payload],
        byz_senders: Sequence[int],
        correct_inputs: Mapping[int, Ranking],
        honest: Callable[[int], Payload],
        dictator: int | None = None,
    ) -> list[dict[int, Payload]]:
        """Deliver one phase; returns per-recipient inboxes (sender->payload)."""
        inboxes: list[dict[int, Payload]] = [{} for _ in range(self.n)]
        for sender in sorted(correct_payloads):
            payload = correct_payloads[sender]
            self._current_round_messages += self.n
            for v in range(self.n):
                inboxes[v][sender] = payload
                if self.transcript is not None:
                    self.transcript.append((round_no, phase, sender, v, payload))
        # the adversary moves last (rushing)
        ctx = AdversaryContext(
            seed=self.seed,
            round=round_no,
            phase=phase,
            n=self.n,
            t=self.t,
            m=m,
            byz_ids=self.byz_ids,
            correct_msgs=dict(correct_payloads),
            correct_inputs=correct_inputs,
            dictator=dictator,
            rng=self.rng,
            honest=honest,
        )
        for sender in sorted(byz_senders):
            out = self.adversary.send(ctx, sender)
            if out is None:
                continue
            per_recipient = out if isinstance(out, dict) else {v: out for v in range(self.n)}
            for v in sorted(per_recipient):
                payload = per_recipient[v]
                if payload is None or not (0 <= v < self.n):
                    continue
                inboxes[v][sender] = payload
                if self.transcript is not None:
                    self.transcript.append((round_no, phase, sender, v, payload))
        return inboxes

    def end_round(self) -> None:
        self.messages_per_round.append(self._current_round_messages)
        self._current_round_messages = 0

    def finish(self) -> tuple[int, tuple[int, ...]]:
        per_round = tuple(self.messages_per_round)
        return sum(per_round), per_round


# --- payload sanitization (recipient side) ----------------------------------


def sanitize_ranking(payload: object, m: int) -> Ranking | None:
    """A malformed or absent ranking counts as nothing received."""
    if isinstance(payload, tuple) and is_ranking(payload, m):
        return payload
    return None


def sanitize_batch(payload: object, m: int) -> frozenset[Pair] | None:
    """Validate a proposal batch; enforce within-batch antisymmetry.

    Bad containers count as no batch; individual bad entries are dropped; a
    pair proposed in both orientations by one sender is dropped entirely.
    """
    if payload is None or isinstance(payload, (str, bytes)):
        return None
    try:
        items = list(payload)  # type: ignore[arg-type]
    except TypeError:
        return None
    pairs = set()
    for item in items:
        if not isinstance(item, tuple) or len(item) != 2:
            continue
        a, b = item
        if isinstance(a, int) and isinstance(b, int) and 0 <= a < m and 0 <= b < m and a != b:
            pairs.add(Pair(a, b))
    return frozenset(p for p in pairs if Pair(p.below, p.above) not in pairs)


# --- targeted attack constructions -------------------------------------------


def cycle_lock_attack(n: int, t: int, m: int):
    """Inputs + script that drive every correct node to lock a full L-cycle.

    Feasible exactly when some cycle length L in [3, m] satisfies
    n <= (L+1)*t: each cycle edge then retains >= n-2t correct supporters
    even though no single ranking can contain the whole cycle.  Correct
    inputs are cycle rotations; the corrupted nodes echo each node's own
    ballot back to it in round 1 (per-recipient equivocation) and broadcast
    the full cycle as their proposal batch.  Returns
    ``(inputs, ScriptedViews, info)`` or None when no L is feasible.
    """
    if t < 1 or m < 3:
        return None
    feasible = [L for L in range(3, min(m, n - t) + 1) if n <= (L + 1) * t]
    if not feasible:
        return None
    L = feasible[0]
    tail = tuple(range(L, m))
    rotations = [tuple((s + i) % L for i in range(L)) + tail for s in range(L)]
    # group sizes: 1 <= g_i <= t, sum = n - t
    g = [1] * L
    extra = (n - t) - L
    for i in range(L):
        take = min(t - g[i], extra)
        g[i] += take
        extra -= take
    if extra > 0:
        return None
    inputs: list[Ranking] = []
    for i in range(L):
        inputs.extend([rotations[(i + 1) % L]] * g[i])
    byz_ids = list(range(n - t, n))
    inputs.extend([rotations[0]] * t)
    cycle_pairs = frozenset(Pair(i, (i + 1) % L) for i in range(L))
    script: dict = {}
    for sender in byz_ids:
        script[(1, RANKING, sender)] = {v: inputs[v] for v in range(n)}
        script[(1, PROPOSE, sender)] = cycle_pairs
    info = {"cycle_len": L, "groups": tuple(g), "cycle_pairs": cycle_pairs}
    return inputs, ScriptedViews(script), info


def split_lock_script(n: int, t: int, m: int, rng: random.Random) -> ScriptedViews:
    """Randomized receipt-splitting script for the adversarial search.

    Round-1 rankings are equivocated at random; the proposal batch for a
    randomly planted pair is sent only to a random subset of recipients,
    trying to place some nodes just above a threshold and others just below.
    """
    script: dict = {}
    a, b = rng.sample(range(m), 2)
    planted = Pair(a, b)
    for sender in range(n - t, n):
        rankings = {v: tuple(rng.sample(range(m), m)) for v in range(n)}
        script[(1, RANKING, sender)] = rankings
        favored = {v for v in range(n) if rng.random() < 0.5}
        script[(1, PROPOSE, sender)] = {
            v: frozenset({planted}) if v in favored else None for v in range(n)
        }
        ranking_rounds = [r for r in range(2, t + 2)]
        for r in ranking_rounds:
            if rng.random() < 0.5:
                script[(r, DICTATOR, sender)] = {
                    v: tuple(rng.sample(range(m), m)) for v in range(n)
                }
    return ScriptedViews(script)


@dataclass
class SearchReport:
    objective: str
    runs: int
    found: bool
    witness: RunResult | None = None
    witness_config: dict | None = None
    max_ratio: Fraction | None = None


def run_sync(
    protocol: str,
    inputs: Sequence[Ranking],
    adversary: AdversaryStrategy,
    cfg,
    seed: int | str = 0,
    record_transcript: bool = False,
) -> RunResult:
    """Dispatch a named protocol ('alg1', 'alg2', 'stv-baseline') onto one run."""
    from . import protocol as proto

    runner = {
        "alg1": proto.run_algorithm1,
        "alg2": proto.run_algorithm2,
        "stv-baseline": proto.run_baseline_stv,
    }.get(protocol)
    if runner is None:
        raise ValueError(f"unknown protocol {protocol!r}")
    return runner(inputs, adversary, cfg, seed=seed, record_transcript=record_transcript)


def adversary_search(
    protocol: str,
    cfg,
    objective: str,
    budget: int,
    seed: int | str = 0,
    inputs: Sequence[Ranking] | None = None,
) -> SearchReport:
    """Scripted + randomized search for protocol violations.

    Objectives: ``trigger-integrity`` (fire the fixed-pairs cycle error),
    ``break-validity`` (agreement or Pareto failure), ``max-ratio`` (worst
    Kemeny-median approximation ratio; only meaningful for alg2).

    With ``inputs`` given, the search holds that input slate fixed and only
    varies the adversary (completion scripts over the ballots present, the
    opposite-median strategy, then randomized behaviours); otherwise inputs
    are resampled per run and a scripted fixed-pair cycle attack is tried
    first where one exists.
    """
    from .kemeny import approx_ratio

    report = SearchReport(objective=objective, runs=0, found=False)

    def evaluate(result: RunResult, config: dict) -> bool:
        if objective == "trigger-integrity":
            hit = any(e.kind == "fixed-cycle" for e in result.stats.integrity_errors)
        elif objective == "break-validity":
            hit = not (result.agreement and result.pareto)
        elif objective == "max-ratio":
            hit = False
            if result.agreement:
                rep = approx_ratio(
                    result.consensus, Profile.of(list(result.correct_inputs.values()))
                )
                if rep.optimal_cost > 0 and (
                    report.max_ratio is None or rep.ratio > report.max_ratio
                ):
                    report.max_ratio = rep.ratio
                    report.witness = result
                    report.witness_config = config
        else:
            raise ValueError(f"unknown objective {objective!r}")
        if hit and not report.found:
            report.found = True
            report.witness = result
            report.witness_config = config
        return hit

    n, t, m = cfg.n, cfg.t, cfg.m
    if inputs is None:
        # deterministic scripted arm: the cycle-lock construction, straight
        # and with a corrupted dictator scheduled first
        attack = cycle_lock_attack(n, t, m)
        if attack is not None and protocol in ("alg1", "stv-baseline"):
            attack_inputs, strategy, info = attack
            schedules = [cfg.dictator_schedule]
            if t >= 1:
                byz_first = (n - 1,) + tuple(range(t))
                schedules.append(byz_first)
            for schedule in schedules:
                if report.runs >= budget:
                    break
                scfg = cfg.with_schedule(schedule)
                result = run_sync(protocol, attack_inputs, strategy, scfg, seed=f"{seed}/scripted")
                report.runs += 1
                if evaluate(result, {"kind": "cycle-lock", "schedule": schedule, **{k: v for k, v in info.items() if k != "cycle_pairs"}}):
                    if objective != "max-ratio":
                        return report
    else:
        # fixed inputs: try completing the view with each ballot already on
        # the table (uniform echo), then the opposite-median strategy
        inputs = tuple(inputs)
        echoes = list(dict.fromkeys(inputs))
        arms: list[AdversaryStrategy] = [
            ScriptedViews({(1, RANKING, s): ballot for s in range(n - t, n)})
            for ballot in echoes
        ]
        arms.append(OppositeMedian())
        for j, strategy in enumerate(arms):
            if report.runs >= budget:
                break
            result = run_sync(protocol, inputs, strategy, cfg, seed=f"{seed}/echo/{j}")
            report.runs += 1
            if evaluate(result, {"kind": "echo", "arm": j}):
                if objective != "max-ratio":
                    return report
    # randomized arm
    i = 0
    while report.runs < budget:
        rng = random.Random(f"{seed}/search/{i}")
        i += 1
        run_inputs = (
            inputs
            if inputs is not None
            else [tuple(rng.sample(range(m), m)) for _ in range(n)]
        )
        if rng.random() < 0.5:
            strategy = Equivocate()
        else:
            strategy = split_lock_script(n, t, m, rng)
        if rng.random() < 0.5:
            schedule = cfg.dictator_schedule
        else:
            ids = list(range(n))
            rng.shuffle(ids)
            schedule = tuple(sorted(ids[: t + 1]))
        scfg = cfg.with_schedule(schedule)
        result = run_sync(protocol, run_inputs, strategy, scfg, seed=f"{seed}/search/{i}")
        report.runs += 1
        if evaluate(result, {"kind": "random", "iteration": i, "schedule": schedule}):
            if objective != "max-ratio":
                return report
    return report
