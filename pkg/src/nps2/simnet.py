"""Discrete-round session engine with fail-stop path erasures.

Each round, every active path delivers one packet: working slots carry a
source symbol, the two protection slots carry the coded pair formed by an
ideal data distributor over that round's working symbols. A failed path
delivers nothing for the whole session. The collector classifies every
round by which slot kinds were lost and solves for the erased symbols.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field as dc_field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .codec import (
    CoefficientRows,
    RecoveryProblem,
    Row,
    UnrecoverableError,
    build_rows,
    encode_pair,
    residualize,
    solve_one,
    solve_two,
)
from .field import FieldElement, FieldSpec
from .schemes import (
    Scheme,
    SessionSchedule,
    SlotKind,
    build_schedule,
    protected_slots,
    schedule_capacity,
)

SessionData = Sequence[Sequence[FieldElement]]  # [source-1][data_index-1]


class Scenario(Enum):
    """Per-round loss classification by the failed paths' slot kinds."""

    NO_FAILURE = "no-failure"
    PROTECTION_ONLY = "protection-only"
    SINGLE_WORKING = "single-working"
    DOUBLE_WORKING = "double-working"
    EXCESS_LOSS = "excess-loss"

    @property
    def severity(self) -> int:
        return _SEVERITY[self]


_SEVERITY = {s: i for i, s in enumerate(Scenario)}


class Outcome(Enum):
    COMPLETE = "complete"
    UNRECOVERABLE = "unrecoverable"


class RoundUnrecoverableError(UnrecoverableError):
    """A round lost more working symbols than its surviving protection rows cover."""

    def __init__(self, message: str, round_index: int, failed_paths: tuple[int, ...]):
        super().__init__(message)
        self.round_index = round_index
        self.failed_paths = failed_paths


@dataclass(frozen=True)
class Packet:
    """One symbol on one path; sender i owns path i."""

    sender_id: int
    payload: FieldElement
    round: int
    session: int
    kind: SlotKind

    @property
    def path(self) -> int:
        return self.sender_id

    def record(self) -> dict:
        return {
            "session": self.session,
            "round": self.round,
            "sender": self.sender_id,
            "path": self.path,
            "kind": self.kind.value,
            "payload_hex": self.payload.hex,
        }


class FailurePattern:
    """Paths that deliver nothing for an entire session (fail-stop)."""

    __slots__ = ("failed_paths",)

    def __init__(self, failed_paths: Iterable[int] = ()):
        paths = frozenset(failed_paths)
        for p in paths:
            if not isinstance(p, int) or p < 1:
                raise ValueError(f"path labels are positive integers, got {p!r}")
        self.failed_paths = paths

    def __len__(self) -> int:
        return len(self.failed_paths)

    def __contains__(self, path: int) -> bool:
        return path in self.failed_paths

    def __eq__(self, other) -> bool:
        if not isinstance(other, FailurePattern):
            return NotImplemented
        return self.failed_paths == other.failed_paths

    def __hash__(self) -> int:
        return hash(self.failed_paths)

    def __repr__(self) -> str:
        return f"FailurePattern({sorted(self.failed_paths)})"


NO_FAILURES = FailurePattern()


@dataclass(frozen=True)
class PathState:
    """Unit capacity indicator: 1 while the path is active, else 0."""

    path: int
    capacity: int


def path_states(n: int, failure: FailurePattern) -> tuple[PathState, ...]:
    return tuple(
        PathState(path=p, capacity=0 if p in failure else 1) for p in range(1, n + 1)
    )


@dataclass
class SessionResult:
    schedule: SessionSchedule
    failure: FailurePattern
    delivered: dict[tuple[int, int], FieldElement]
    recovered_count: int
    round_scenarios: dict[int, Scenario]
    states: tuple[PathState, ...]
    normalized_capacity: Fraction
    schedule_capacity: Fraction
    outcome: Outcome
    unrecoverable_rounds: tuple[tuple[int, tuple[int, ...]], ...] = ()
    packets: tuple[Packet, ...] = dc_field(default=(), repr=False)

    @property
    def complete(self) -> bool:
        return self.outcome is Outcome.COMPLETE

    @property
    def scenario(self) -> Scenario:
        """Highest-severity round scenario; the session's summary tag."""
        return max(self.round_scenarios.values(), key=lambda s: s.severity)

    @property
    def detail(self) -> str | None:
        if not self.unrecoverable_rounds:
            return None
        parts = [
            f"round {r}: failed paths {sorted(paths)}"
            for r, paths in self.unrecoverable_rounds
        ]
        return "; ".join(parts)


def generate_source_data(
    n: int,
    rounds_per_session: int,
    sessions: int,
    seed: int,
    field: FieldSpec,
    *,
    all_zero: bool = False,
) -> list[list[list[FieldElement]]]:
    """Deterministic symbol tensor indexed [session][source-1][data_index-1]."""
    rng = random.Random(seed)
    zero = field.zero()
    tensor = []
    for _ in range(sessions):
        per_source = []
        for _ in range(n):
            if all_zero:
                per_source.append([zero] * rounds_per_session)
            else:
                per_source.append(
                    [field.element(rng.randrange(field.q)) for _ in range(rounds_per_session)]
                )
        tensor.append(per_source)
    return tensor


def transmit_round(
    schedule: SessionSchedule,
    round_index: int,
    data: SessionData,
    failure: FailurePattern,
    rows: CoefficientRows,
) -> list[Packet]:
    """Surviving packets of one round, ascending path order.

    The distributor is an ideal oracle over all sources' data, so the
    protection payloads exist even when some sources' own paths failed.
    """
    prot = protected_slots(schedule, round_index)
    y_sum, y_weighted = encode_pair(
        [data[s.source - 1][s.data_index - 1] for s in prot], rows
    )
    packets = []
    for path in range(1, schedule.n + 1):
        if path in failure:
            continue
        slot = schedule.grid[round_index - 1][path - 1]
        if slot.kind is SlotKind.WORKING:
            payload = data[path - 1][slot.data_index - 1]
        elif slot.kind is SlotKind.PROTECTION_SUM:
            payload = y_sum
        else:
            payload = y_weighted
        packets.append(
            Packet(
                sender_id=path,
                payload=payload,
                round=round_index,
                session=schedule.session_index,
                kind=slot.kind,
            )
        )
    return packets


def classify_round(
    schedule: SessionSchedule, round_index: int, failure: FailurePattern
) -> Scenario:
    """Scenario tag from the failed paths' slot kinds in this round."""
    row = schedule.grid[round_index - 1]
    failed = [p for p in range(1, schedule.n + 1) if p in failure]
    if not failed:
        return Scenario.NO_FAILURE
    unknowns = sum(1 for p in failed if row[p - 1].kind is SlotKind.WORKING)
    rows_alive = 2 - (len(failed) - unknowns)
    if unknowns == 0:
        return Scenario.PROTECTION_ONLY
    if unknowns > rows_alive:
        return Scenario.EXCESS_LOSS
    if unknowns == 1:
        return Scenario.SINGLE_WORKING
    return Scenario.DOUBLE_WORKING


@dataclass
class RoundRecovery:
    delivered: dict[tuple[int, int], FieldElement]
    scenario: Scenario
    recovered: tuple[tuple[int, int], ...]


def recover_round(
    packets: Sequence[Packet],
    schedule: SessionSchedule,
    round_index: int,
    rows: CoefficientRows,
    failure: FailurePattern,
) -> RoundRecovery:
    """Collector-side case analysis for one round.

    Failed protection slots need no action; each failed working slot adds
    one unknown, solved from the residuals of the surviving protection
    rows. Raises RoundUnrecoverableError when the unknowns outnumber the
    usable rows.
    """
    scenario = classify_round(schedule, round_index, failure)
    by_path = {p.sender_id: p for p in packets}
    prot = protected_slots(schedule, round_index)

    delivered = {
        (s.source, s.data_index): by_path[s.path].payload
        for s in prot
        if s.path in by_path
    }
    missing = [(rank, s) for rank, s in enumerate(prot) if s.path in failure]
    if not missing:
        return RoundRecovery(delivered=delivered, scenario=scenario, recovered=())

    p_sum, p_weighted = schedule.protection_pair(round_index)
    failed_paths = tuple(sorted(s.path for _, s in missing))
    rows_alive = (p_sum in by_path) + (p_weighted in by_path)
    if len(missing) > rows_alive or len(missing) > 2:
        raise RoundUnrecoverableError(
            f"round {round_index}: {len(missing)} erased working symbols but only "
            f"{rows_alive} surviving protection rows",
            round_index,
            failed_paths,
        )

    known = [(rank, by_path[s.path].payload) for rank, s in enumerate(prot) if s.path in by_path]
    residual_sum = (
        residualize(by_path[p_sum].payload, known, Row.SUM, rows)
        if p_sum in by_path
        else None
    )
    residual_weighted = (
        residualize(by_path[p_weighted].payload, known, Row.WEIGHTED, rows)
        if p_weighted in by_path
        else None
    )
    problem = RecoveryProblem(
        missing_ranks=tuple(rank for rank, _ in missing),
        residual_sum=residual_sum,
        residual_weighted=residual_weighted,
    )
    try:
        if len(missing) == 1:
            values = (solve_one(problem, rows),)
        else:
            values = solve_two(problem, rows)
    except UnrecoverableError as exc:
        raise RoundUnrecoverableError(
            f"round {round_index}: {exc}", round_index, failed_paths
        ) from exc

    recovered = []
    for (_, slot), value in zip(missing, values):
        delivered[(slot.source, slot.data_index)] = value
        recovered.append((slot.source, slot.data_index))
    return RoundRecovery(
        delivered=delivered, scenario=scenario, recovered=tuple(recovered)
    )


def run_session(
    scheme: Scheme,
    n: int,
    field: FieldSpec,
    failure: FailurePattern = NO_FAILURES,
    seed: int = 0,
    session_index: int = 0,
    *,
    sum_only: bool = False,
    data: SessionData | None = None,
    rows: CoefficientRows | None = None,
    schedule: SessionSchedule | None = None,
) -> SessionResult:
    """Transmit and recover one full session, then verify every delivered
    symbol against the source tensor. The outcome is Complete only if all
    emitted (source, data_index) pairs arrive with their original values.

    A prebuilt ``schedule`` (custom protection pair or session length)
    may replace the default construction; it must agree with scheme/n.
    """
    if schedule is None:
        schedule = build_schedule(scheme, n, session_index)
    elif schedule.scheme is not scheme or schedule.n != n:
        raise ValueError("schedule does not match the requested scheme and n")
    for p in failure.failed_paths:
        if p > n:
            raise ValueError(f"failed path {p} exceeds path count {n}")
    if rows is None:
        rows = build_rows(n - 2, field, sum_only=sum_only)
    if data is None:
        data = generate_source_data(
            n, schedule.rounds, session_index + 1, seed, field
        )[session_index]

    delivered: dict[tuple[int, int], FieldElement] = {}
    round_scenarios: dict[int, Scenario] = {}
    unrecoverable: list[tuple[int, tuple[int, ...]]] = []
    all_packets: list[Packet] = []
    recovered_count = 0

    for r in range(1, schedule.rounds + 1):
        packets = transmit_round(schedule, r, data, failure, rows)
        all_packets.extend(packets)
        try:
            rec = recover_round(packets, schedule, r, rows, failure)
        except RoundUnrecoverableError as exc:
            round_scenarios[r] = classify_round(schedule, r, failure)
            unrecoverable.append((exc.round_index, exc.failed_paths))
            # the round's direct survivors still reach the collector
            for pkt in packets:
                if pkt.kind is SlotKind.WORKING:
                    slot = schedule.grid[r - 1][pkt.sender_id - 1]
                    delivered[(pkt.sender_id, slot.data_index)] = pkt.payload
            continue
        delivered.update(rec.delivered)
        recovered_count += len(rec.recovered)
        round_scenarios[r] = rec.scenario

    emitted = schedule.emitted()
    ok = set(delivered) == emitted and all(
        delivered[(s, d)] == data[s - 1][d - 1] for (s, d) in emitted
    )
    return SessionResult(
        schedule=schedule,
        failure=failure,
        delivered=delivered,
        recovered_count=recovered_count,
        round_scenarios=round_scenarios,
        states=path_states(n, failure),
        normalized_capacity=Fraction(n - len(failure), n),
        schedule_capacity=schedule_capacity(schedule),
        outcome=Outcome.COMPLETE if ok else Outcome.UNRECOVERABLE,
        unrecoverable_rounds=tuple(unrecoverable),
        packets=tuple(all_packets),
    )


def all_patterns(n: int, max_failures: int = 2) -> list[FailurePattern]:
    """The empty pattern, all singles, and all pairs, in deterministic order."""
    patterns = [NO_FAILURES]
    if max_failures >= 1:
        patterns.extend(FailurePattern({p}) for p in range(1, n + 1))
    if max_failures >= 2:
        patterns.extend(
            FailurePattern({a, b})
            for a in range(1, n + 1)
            for b in range(a + 1, n + 1)
        )
    return patterns


@dataclass
class SweepReport:
    scheme: Scheme
    n: int
    session_index: int
    results: tuple[SessionResult, ...]
    complete_rate: float
    scenario_histogram: dict[str, int]
    recovered_total: int

    @property
    def session_count(self) -> int:
        return len(self.results)


def sweep_failures(
    scheme: Scheme,
    n: int,
    field: FieldSpec,
    seed: int = 0,
    session_index: int = 0,
    *,
    sum_only: bool = False,
) -> SweepReport:
    """Run one session per failure pattern of size 0, 1, and 2.

    The histogram counts each session once, under its summary scenario.
    """
    rows = build_rows(n - 2, field, sum_only=sum_only)
    data = generate_source_data(n, build_schedule(scheme, n, session_index).rounds,
                                session_index + 1, seed, field)[session_index]
    results = []
    histogram: dict[str, int] = {}
    recovered_total = 0
    for pattern in all_patterns(n):
        result = run_session(
            scheme, n, field, pattern, seed=seed, session_index=session_index,
            data=data, rows=rows,
        )
        results.append(result)
        tag = result.scenario.value
        histogram[tag] = histogram.get(tag, 0) + 1
        recovered_total += result.recovered_count
    complete = sum(1 for r in results if r.complete)
    return SweepReport(
        scheme=scheme,
        n=n,
        session_index=session_index,
        results=tuple(results),
        complete_rate=complete / len(results),
        scenario_histogram=histogram,
        recovered_total=recovered_total,
    )


def trace_lines(packets: Iterable[Packet]) -> list[str]:
    """JSON-lines records, one per surviving packet, byte-stable."""
    return [
        json.dumps(p.record(), sort_keys=True, separators=(",", ":")) for p in packets
    ]
