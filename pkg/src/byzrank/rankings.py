"""Rankings, preference profiles, and Kendall-tau metrics.

A ranking is a plain tuple of candidate indices, most-preferred first, and is
always a permutation of ``range(m)``.  Candidates are dense integers; human
names exist only at the text-format boundary (:func:`parse_profile` /
:func:`format_ranking`).  Everything here is an immutable value and every
function is pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

Ranking = tuple[int, ...]


class Pair(NamedTuple):
    """A binary relation ``above`` preferred to ``below``."""

    above: int
    below: int


class UniverseMismatch(ValueError):
    """Operands do not range over the same candidate set."""


class ParseError(ValueError):
    """Profile text is malformed; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def validate_ranking(r: Sequence[int], m: int | None = None) -> Ranking:
    """Return ``r`` as a tuple after checking it permutes ``range(m)``.

    With ``m=None`` the length of ``r`` is used.  Raises ``ValueError`` on
    duplicates, gaps, or wrong length.
    """
    t = tuple(r)
    if m is None:
        m = len(t)
    if len(t) != m or sorted(t) != list(range(m)):
        raise ValueError(f"not a permutation of 0..{m - 1}: {t!r}")
    return t


def is_ranking(r: object, m: int) -> bool:
    """Cheap predicate form of :func:`validate_ranking` (no exception)."""
    return (
        isinstance(r, tuple)
        and len(r) == m
        and all(isinstance(c, int) for c in r)
        and sorted(r) == list(range(m))
    )


@dataclass(frozen=True)
class Profile:
    """An ordered multiset of rankings over a common candidate universe.

    Voter order and multiplicity are preserved: the simulator attributes
    ballots to nodes by position.
    """

    rankings: tuple[Ranking, ...]
    m: int

    def __post_init__(self) -> None:
        if not self.rankings:
            raise ValueError("profile must contain at least one ranking")
        for r in self.rankings:
            if len(r) != self.m or sorted(r) != list(range(self.m)):
                raise ValueError(
                    f"ballot {r!r} is not a permutation of 0..{self.m - 1}"
                )

    @classmethod
    def of(cls, rankings: Iterable[Sequence[int]], m: int | None = None) -> "Profile":
        rs = tuple(tuple(r) for r in rankings)
        if m is None:
            if not rs:
                raise ValueError("profile must contain at least one ranking")
            m = len(rs[0])
        return cls(rs, m)

    def __len__(self) -> int:
        return len(self.rankings)

    def __iter__(self) -> Iterator[Ranking]:
        return iter(self.rankings)


def _positions(r: Ranking) -> list[int]:
    pos = [0] * len(r)
    for i, c in enumerate(r):
        pos[c] = i
    return pos


def kendall_tau(r: Sequence[int], p: Sequence[int]) -> int:
    """Number of candidate pairs on which the two rankings disagree.

    Symmetric; ranges from 0 (equal) to m(m-1)/2 (exact reversal).
    """
    r = validate_ranking(r)
    p = validate_ranking(p)
    if len(r) != len(p):
        raise UniverseMismatch(f"rankings over {len(r)} vs {len(p)} candidates")
    pos_p = _positions(p)
    m = len(r)
    d = 0
    for i in range(m):
        for j in range(i + 1, m):
            if pos_p[r[i]] > pos_p[r[j]]:
                d += 1
    return d


def tau_profile(r: Sequence[int], profile: Profile) -> int:
    """Sum of :func:`kendall_tau` distances from ``r`` to every ballot."""
    r = validate_ranking(r)
    if len(r) != profile.m:
        raise UniverseMismatch(
            f"ranking over {len(r)} candidates vs profile over {profile.m}"
        )
    return sum(kendall_tau(r, p) for p in profile)


def opposite(r: Sequence[int]) -> Ranking:
    """The exact reversal of ``r``; an involution."""
    return tuple(reversed(validate_ranking(r)))


def pairs_of(r: Sequence[int]) -> frozenset[Pair]:
    """All m(m-1)/2 ordered preference pairs implied by a ranking."""
    r = tuple(r)
    m = len(r)
    return frozenset(
        Pair(r[i], r[j]) for i in range(m) for j in range(i + 1, m)
    )


def contains_pair(r: Sequence[int], pair: Pair) -> bool:
    pos = _positions(tuple(r))
    return pos[pair.above] < pos[pair.below]


def unanimous_pairs(profile: Profile) -> frozenset[Pair]:
    """Pairs ordered the same way by every ballot in the profile.

    The result is the intersection of total orders, hence automatically
    transitive and acyclic.
    """
    common = pairs_of(profile.rankings[0])
    for r in profile.rankings[1:]:
        common = common & pairs_of(r)
        if not common:
            break
    return frozenset(common)


# --- text format ------------------------------------------------------------
#
# One ranking per line, candidate names separated by ">"; "#" starts a
# comment line; blank lines are ignored.  The candidate universe is the union
# of all names, indexed by first appearance.


def parse_profile(text: str) -> tuple[Profile, list[str]]:
    """Parse the profile text format; returns (profile, candidate names)."""
    names: list[str] = []
    index: dict[str, int] = {}
    raw: list[tuple[int, list[str]]] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = [p.strip() for p in stripped.split(">")]
        if any(not p for p in parts):
            raise ParseError(line_no, f"empty candidate name in {stripped!r}")
        if len(set(parts)) != len(parts):
            raise ParseError(line_no, f"duplicate candidate in {stripped!r}")
        for name in parts:
            if name not in index:
                index[name] = len(names)
                names.append(name)
        raw.append((line_no, parts))
    if not raw:
        raise ParseError(1, "no rankings found")
    m = len(names)
    rankings = []
    for line_no, parts in raw:
        if len(parts) != m:
            raise ParseError(
                line_no,
                f"ranking covers {len(parts)} of {m} candidates "
                f"(every line must rank the full universe)",
            )
        rankings.append(tuple(index[p] for p in parts))
    return Profile.of(rankings, m), names


def format_ranking(r: Sequence[int], names: Sequence[str] | None = None) -> str:
    """Render a ranking in the text format (``a > b > c``)."""
    if names is None:
        return " > ".join(f"c{c + 1}" for c in r)
    return " > ".join(names[c] for c in r)
