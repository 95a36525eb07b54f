"""Session schedules for the two protection schemes.

Both schemes reserve exactly two of the n disjoint paths per round for
protection symbols and let the other n-2 carry fresh data, yielding the
(n-2)/n normalized capacity:

* NPS2-I dedicates one path pair for a whole session of n rounds; the
  pair rotates across sessions.
* NPS2-II rotates the protection pair (2L-1, 2L) through the n/2 rounds
  of a session, so every path carries protection exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import NamedTuple


class Scheme(Enum):
    NPS2_I = "nps2-i"
    NPS2_II = "nps2-ii"


class SlotKind(Enum):
    WORKING = "working"
    PROTECTION_SUM = "protection-sum"
    PROTECTION_WEIGHTED = "protection-weighted"

    @property
    def is_protection(self) -> bool:
        return self is not SlotKind.WORKING


@dataclass(frozen=True)
class Slot:
    kind: SlotKind
    data_index: int | None = None  # 1-based, working slots only

    def __post_init__(self):
        if self.kind is SlotKind.WORKING:
            if self.data_index is None or self.data_index < 1:
                raise ValueError("working slots need a positive data_index")
        elif self.data_index is not None:
            raise ValueError("protection slots carry no data_index")


class ProtectedSlot(NamedTuple):
    path: int
    source: int
    data_index: int


@dataclass(frozen=True)
class SessionSchedule:
    """Which path carries which symbol at each round of one session.

    grid[r-1][p-1] is path p's slot in round r. protection_paths is the
    dedicated pair for NPS2-I and None for NPS2-II, where the pair moves
    every round.
    """

    scheme: Scheme
    n: int
    rounds: int
    grid: tuple[tuple[Slot, ...], ...]
    protection_paths: tuple[int, int] | None = None
    session_index: int = 0

    def slot(self, round_index: int, path: int) -> Slot:
        self._check_round(round_index)
        if not 1 <= path <= self.n:
            raise ValueError(f"path {path} out of range 1..{self.n}")
        return self.grid[round_index - 1][path - 1]

    def protection_pair(self, round_index: int) -> tuple[int, int]:
        """The (sum, weighted) protection carriers of one round."""
        self._check_round(round_index)
        row = self.grid[round_index - 1]
        p_sum = next(p for p, s in enumerate(row, 1) if s.kind is SlotKind.PROTECTION_SUM)
        p_wtd = next(p for p, s in enumerate(row, 1) if s.kind is SlotKind.PROTECTION_WEIGHTED)
        return p_sum, p_wtd

    def emitted(self) -> set[tuple[int, int]]:
        """All (source, data_index) pairs this schedule transmits."""
        return {
            (path, slot.data_index)
            for row in self.grid
            for path, slot in enumerate(row, 1)
            if slot.kind is SlotKind.WORKING
        }

    def _check_round(self, round_index: int) -> None:
        if not 1 <= round_index <= self.rounds:
            raise ValueError(f"round {round_index} out of range 1..{self.rounds}")


def nps2i_schedule(
    n: int,
    session_index: int = 0,
    *,
    rounds: int | None = None,
    protection_pair: tuple[int, int] | None = None,
) -> SessionSchedule:
    """Dedicated-pair schedule: n rounds by default, fixed protection paths.

    The pair for session d is paths (2d mod n, 2d+1 mod n) in 1-based
    labels, a deterministic round-robin over adjacent pairs; recovery
    works for any explicit ``protection_pair`` override. Every other
    path sends its round-r data unit in round r. Nothing in recovery
    depends on the session length, so ``rounds`` is adjustable.
    """
    if n < 3:
        raise ValueError(
            f"n must be at least 3 (two protection paths plus a working path), got {n}"
        )
    if session_index < 0:
        raise ValueError(f"session_index must be nonnegative, got {session_index}")
    if rounds is None:
        rounds = n
    if rounds < 1:
        raise ValueError(f"rounds must be positive, got {rounds}")
    if protection_pair is None:
        p_sum = (2 * session_index) % n + 1
        p_wtd = (2 * session_index + 1) % n + 1
    else:
        p_sum, p_wtd = protection_pair
        if p_sum == p_wtd or not all(1 <= p <= n for p in (p_sum, p_wtd)):
            raise ValueError(f"protection pair must be two distinct paths in 1..{n}")
    grid = []
    for r in range(1, rounds + 1):
        row = []
        for path in range(1, n + 1):
            if path == p_sum:
                row.append(Slot(SlotKind.PROTECTION_SUM))
            elif path == p_wtd:
                row.append(Slot(SlotKind.PROTECTION_WEIGHTED))
            else:
                row.append(Slot(SlotKind.WORKING, data_index=r))
        grid.append(tuple(row))
    return SessionSchedule(
        scheme=Scheme.NPS2_I,
        n=n,
        rounds=rounds,
        grid=tuple(grid),
        protection_paths=(p_sum, p_wtd),
        session_index=session_index,
    )


def nps2ii_schedule(n: int, session_index: int = 0) -> SessionSchedule:
    """Rotating-pair schedule: n/2 rounds, protection on (2L-1, 2L) in round L.

    Path i is protection exactly once, in round ceil(i/2). Before that
    round it sends data unit r in round r; afterwards unit r-1, so each
    source contributes units 1 .. n/2 - 1 with no gaps.
    """
    if n % 2:
        raise ValueError(
            f"n must be even for the rotating protection pair, got {n}"
        )
    if n < 4:
        raise ValueError(f"n must be at least 4, got {n}")
    if session_index < 0:
        raise ValueError(f"session_index must be nonnegative, got {session_index}")
    rounds = n // 2
    grid = []
    for r in range(1, rounds + 1):
        row = []
        for path in range(1, n + 1):
            protection_round = (path + 1) // 2
            if r == protection_round:
                kind = SlotKind.PROTECTION_SUM if path % 2 else SlotKind.PROTECTION_WEIGHTED
                row.append(Slot(kind))
            elif r < protection_round:
                row.append(Slot(SlotKind.WORKING, data_index=r))
            else:
                row.append(Slot(SlotKind.WORKING, data_index=r - 1))
        grid.append(tuple(row))
    return SessionSchedule(
        scheme=Scheme.NPS2_II,
        n=n,
        rounds=rounds,
        grid=tuple(grid),
        protection_paths=None,
        session_index=session_index,
    )


def build_schedule(scheme: Scheme, n: int, session_index: int = 0) -> SessionSchedule:
    if scheme is Scheme.NPS2_I:
        return nps2i_schedule(n, session_index)
    return nps2ii_schedule(n, session_index)


def protected_slots(schedule: SessionSchedule, round_index: int) -> tuple[ProtectedSlot, ...]:
    """The n-2 working slots of a round, in ascending path order.

    Their position in this tuple is the rank used for the weighted
    coefficient row, so coefficients are a pure function of the schedule.
    """
    schedule._check_round(round_index)
    out = []
    for path, slot in enumerate(schedule.grid[round_index - 1], 1):
        if slot.kind is SlotKind.WORKING:
            out.append(ProtectedSlot(path=path, source=path, data_index=slot.data_index))
    return tuple(out)


def schedule_capacity(schedule: SessionSchedule) -> Fraction:
    """Fraction of path-slots carrying working data; (n-2)/n for both schemes."""
    working = sum(
        1 for row in schedule.grid for slot in row if slot.kind is SlotKind.WORKING
    )
    return Fraction(working, schedule.n * schedule.rounds)


def slot_label(slot: Slot, path: int, round_index: int) -> str:
    """Matrix-cell label: x_<path>^<data index> or y_<path>^<round>."""
    if slot.kind is SlotKind.WORKING:
        return f"x_{path}^{slot.data_index}"
    return f"y_{path}^{round_index}"


def schedule_labels(schedule: SessionSchedule) -> list[list[str]]:
    """Label matrix oriented like the protection matrices: rows are
    connections, columns are round times."""
    return [
        [
            slot_label(schedule.grid[r - 1][path - 1], path, r)
            for r in range(1, schedule.rounds + 1)
        ]
        for path in range(1, schedule.n + 1)
    ]
