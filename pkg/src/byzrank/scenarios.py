"""Worst-case scenario generators and lower-bound measurements.

Each scenario family builds a correct-node profile plus the Byzantine ballots
that complete it, such that the completed views of two different correct
profiles ("left"/"right" sides) are the same ranking multiset.  Any protocol
that decides from the completed view must answer both sides identically, so
one side is stuck with the closed-form approximation ratio.  measure_scenario
replays the construction through a protocol run and reports the measured
worst-side ratio next to the closed form.

The third family, ``appendix-c``, is not a simulation: it is an exact grid
search over three-candidate cyclic tournaments for the worst ratio between a
forced cyclic-median answer and the optimal one, subject to feasibility
constraints tying the tournament weights to n and t.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .kemeny import approx_ratio
from .rankings import Profile, Ranking
from .simnet import RANKING, ScriptedViews, run_sync
from .protocol import ProtocolConfig

SCENARIO_NAMES = ("binary-worst", "cycle-worst", "appendix-c")


class InfeasibleError(ValueError):
    """The requested scenario has no instance at these parameters."""


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str
    n: int
    t: int
    m: int
    side: str = "both"

    def __post_init__(self):
        if self.kind not in SCENARIO_NAMES:
            raise ValueError(f"unknown scenario {self.kind!r}")
        if self.side not in ("left", "right", "both"):
            raise ValueError("side must be left, right, or both")


@dataclass(frozen=True)
class LowerBoundReport:
    """Measured vs. predicted worst-case ratio, with the consensus reached."""

    ratio_measured: Fraction
    ratio_closed_form: Fraction
    witness: Ranking


def completion_script(byz_ballots: tuple[Ranking, ...], n: int) -> ScriptedViews:
    """Round-1 broadcast of one fixed ballot per corrupted node, silent after.

    Corrupted nodes are the last ``len(byz_ballots)`` ids, matching the
    default static-corruption choice.
    """
    t = len(byz_ballots)
    script = {(1, RANKING, n - t + i): b for i, b in enumerate(byz_ballots)}
    return ScriptedViews(script)


def binary_closed_form(n: int, t: int) -> Fraction:
    return Fraction(n // 2, n // 2 - t)


def gen_binary_worst(spec: ScenarioSpec) -> tuple[tuple[Ranking, ...], tuple[Ranking, ...]]:
    """Two opposite blocs; the corrupted nodes complete whichever is smaller.

    Left side: n/2 correct nodes hold the identity ranking r, n/2 - t hold
    its reverse, corrupted ballots are the reverse.  Right side swaps the
    bloc sizes and the corrupted ballot.  Both completed views are n/2 vs
    n/2, under which every ranking is a median and the tie-break answers r —
    costing the right side a factor (n/2)/(n/2 - t).

    Returns ``(correct profile, Byzantine ballots)``.
    """
    if spec.kind != "binary-worst":
        raise ValueError(f"spec is for {spec.kind!r}")
    n, t, m = spec.n, spec.t, spec.m
    if n % 2 != 0:
        raise InfeasibleError("binary-worst needs an even number of nodes")
    if m < 2:
        raise InfeasibleError("binary-worst needs at least two candidates")
    if n // 2 - t < 0:
        raise InfeasibleError("binary-worst needs t <= n/2")
    r = tuple(range(m))
    opp = tuple(reversed(r))
    if spec.side == "left":
        correct = [r] * (n // 2) + [opp] * (n // 2 - t)
        ballot = opp
    elif spec.side == "right":
        correct = [r] * (n // 2 - t) + [opp] * (n // 2)
        ballot = r
    else:
        raise ValueError("generate one side at a time")
    return tuple(correct), (ballot,) * t


def cycle_closed_form(n: int, t: int, m: int) -> Fraction:
    # integer form of (2 + (m-2)k) / (2 + (m-2)(k-2)) at k = n/t
    return Fraction(2 * t + (m - 2) * n, 2 * t + (m - 2) * (n - 2 * t))


def _cycle_ballots(m: int) -> tuple[Ranking, Ranking, Ranking]:
    block = list(range(m - 1, 1, -1))
    a = tuple([0, 1] + block)
    b = tuple(block + [0, 1])
    c = tuple([1] + block + [0])
    return a, b, c


def gen_cycle_worst(spec: ScenarioSpec) -> tuple[tuple[Ranking, ...], tuple[Ranking, ...]]:
    """Three-bloc construction whose completed view is a majority cycle.

    Ballots: A = c1>c2>cm>...>c3, B = cm>...>c3>c1>c2, C = c2>cm>...>c3>c1.
    The corrupted nodes top up the A-bloc or the B-bloc so both sides
    complete to the same cyclic tournament; the tie on the cycle's medians
    then costs one side the closed-form ratio.

    Returns ``(correct profile, Byzantine ballots)``.
    """
    if spec.kind != "cycle-worst":
        raise ValueError(f"spec is for {spec.kind!r}")
    n, t, m = spec.n, spec.t, spec.m
    if n % 2 != 0:
        raise InfeasibleError("cycle-worst needs an even number of nodes")
    if t < 1 or n < 4 * t:
        raise InfeasibleError("cycle-worst needs t >= 1 and n >= 4t")
    if m < 3:
        raise InfeasibleError("cycle-worst needs at least three candidates")
    a, b, c = _cycle_ballots(m)
    if spec.side == "left":
        correct = [a] * (n // 2 - t) + [b] * (n // 2 - 2 * t) + [c] * (2 * t)
        ballot = b
    elif spec.side == "right":
        correct = [a] * (n // 2 - 2 * t) + [b] * (n // 2 - t) + [c] * (2 * t)
        ballot = a
    else:
        raise ValueError("generate one side at a time")
    return tuple(correct), (ballot,) * t


_GENERATORS = {"binary-worst": gen_binary_worst, "cycle-worst": gen_cycle_worst}
_CLOSED_FORMS = {
    "binary-worst": lambda n, t, m: binary_closed_form(n, t),
    "cycle-worst": cycle_closed_form,
}


def measure_scenario(
    protocol: str, spec: ScenarioSpec, seed: int | str = 0
) -> LowerBoundReport:
    """Run the scenario through a protocol; report the worst-side ratio.

    The report's ratio is measured against the correct-node profile of the
    worse side; the witness is the consensus ranking that side reached.  For
    the median-agreement protocol the measured ratio is checked against the
    closed form as an upper bound.
    """
    if spec.kind not in _GENERATORS:
        raise ValueError(f"{spec.kind!r} is a grid search, not a simulation scenario")
    sides = ("left", "right") if spec.side == "both" else (spec.side,)
    cfg = ProtocolConfig(spec.n, spec.t, spec.m)
    worst: Fraction | None = None
    witness: Ranking = ()
    for side in sides:
        correct, byz_ballots = _GENERATORS[spec.kind](replace(spec, side=side))
        inputs = correct + byz_ballots
        strategy = completion_script(byz_ballots, spec.n)
        result = run_sync(protocol, inputs, strategy, cfg, seed=f"{seed}/{side}")
        if not result.agreement:
            raise RuntimeError(f"scenario run lost agreement on side {side}")
        consensus = result.consensus
        profile = Profile.of(list(correct), spec.m)
        ratio = approx_ratio(consensus, profile).ratio
        if worst is None or ratio > worst:
            worst = ratio
            witness = consensus
    assert worst is not None
    closed = _CLOSED_FORMS[spec.kind](spec.n, spec.t, spec.m)
    if protocol == "alg2" and worst > closed:
        raise RuntimeError(
            f"measured ratio {worst} exceeds the closed-form bound {closed}"
        )
    return LowerBoundReport(ratio_measured=worst, ratio_closed_form=closed, witness=witness)


def appendix_c_search(n: int, t: int, case: str) -> tuple[Fraction, tuple[int, int, int]]:
    """Exact worst-ratio grid search over feasible cyclic weight triples.

    Weights (x, y, z) with x >= y >= z range over [n/2, n-t] subject to
    n-t <= x+y+z <= 2(n-t); the case constraint (x-z <= t for C231,
    y-z <= t for C312) pins which median the forced answer is.  Integer
    weights mean the lower bound is ceil(n/2), so odd n needs n >= 4t+3
    for the grid to be non-empty; even n needs n >= 4t (and t >= 1).

    Returns the exact maximum ratio and one argmax (x, y, z) — on ties, the
    lexicographically smallest triple.
    """
    if case not in ("C231", "C312"):
        raise ValueError("case must be C231 or C312")
    if t < 1 or n < 4 * t:
        raise InfeasibleError("appendix-c grid is infeasible below n/t = 4")
    best_ratio: Fraction | None = None
    best_arg: tuple[int, int, int] | None = None
    lo, hi = (n + 1) // 2, n - t
    for x in range(lo, hi + 1):
        for y in range(lo, x + 1):
            for z in range(lo, y + 1):
                if not (n - t <= x + y + z <= 2 * (n - t)):
                    continue
                if case == "C231":
                    if x - z > t:
                        continue
                    num = 2 * (n - t) + x - y - z
                else:
                    if y - z > t:
                        continue
                    num = 2 * (n - t) - x + y - z
                den = 2 * (n - t) - x - y + z
                if den <= 0:
                    continue
                ratio = Fraction(num, den)
                if best_ratio is None or ratio > best_ratio:
                    best_ratio, best_arg = ratio, (x, y, z)
    if best_ratio is None:
        raise InfeasibleError("no feasible weight triple at these parameters")
    return best_ratio, best_arg
