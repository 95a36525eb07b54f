"""Protection-symbol coding and erasure recovery.

Two coefficient rows combine the n-2 working symbols of a round into two
protection symbols: a plain sum row and a weighted row whose coefficient
at rank t is generator^t. Any one or two erased working symbols are then
recovered by subtracting the known contributions from the received
protection symbols and solving the remaining 1x1 or 2x2 system.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .field import FieldElement, FieldSpec


class Row(Enum):
    SUM = "sum"
    WEIGHTED = "weighted"


class FieldCapacityError(ValueError):
    """The field is too small to give the weighted row distinct entries."""


class UnrecoverableError(Exception):
    """Fewer usable protection residuals than erased symbols."""


@dataclass(frozen=True)
class CoefficientRows:
    """The two generator rows over ``width`` protected slots.

    row_sum is all ones. row_weighted holds generator^t at rank t, so any
    two columns form an invertible 2x2 minor; in sum-only mode both rows
    are all ones (plain parity, single-erasure protection only).
    """

    width: int
    row_sum: tuple[FieldElement, ...]
    row_weighted: tuple[FieldElement, ...]
    field: FieldSpec

    def row(self, which: Row) -> tuple[FieldElement, ...]:
        return self.row_sum if which is Row.SUM else self.row_weighted

    @property
    def distinct_weights(self) -> bool:
        return len({e.value for e in self.row_weighted}) == self.width


def build_rows(width: int, field: FieldSpec, *, sum_only: bool = False) -> CoefficientRows:
    """Build the coefficient rows for ``width`` protected slots.

    Requires width <= 2^m - 1 so the weighted entries are pairwise
    distinct. With ``sum_only`` both rows are all ones and the bound is
    waived; this is the binary-field parity mode, good for one erasure.
    """
    if width < 1:
        raise ValueError(f"width must be positive, got {width}")
    if not sum_only and width > field.q - 1:
        raise FieldCapacityError(
            f"width {width} exceeds the {field.q - 1} distinct nonzero elements "
            f"of GF(2^{field.m}); needs m >= {width.bit_length()}"
        )
    one = field.one()
    row_sum = (one,) * width
    if sum_only:
        row_weighted = row_sum
    else:
        row_weighted = tuple(field.pow(field.alpha(), t) for t in range(width))
    return CoefficientRows(width, row_sum, row_weighted, field)


def encode_pair(
    data: Sequence[FieldElement], rows: CoefficientRows
) -> tuple[FieldElement, FieldElement]:
    """Form the (sum, weighted) protection pair over one round's data."""
    if len(data) != rows.width:
        raise ValueError(f"expected {rows.width} data symbols, got {len(data)}")
    y_sum = rows.field.zero()
    y_weighted = rows.field.zero()
    for w, d in zip(rows.row_weighted, data):
        y_sum = y_sum + d
        y_weighted = y_weighted + w * d
    return y_sum, y_weighted


def residualize(
    y_received: FieldElement,
    known: Iterable[tuple[int, FieldElement]],
    row: Row,
    rows: CoefficientRows,
) -> FieldElement:
    """Strip the known contributions from a received protection symbol.

    What remains is the row's coefficient combination over the missing
    ranks only (subtraction is addition in characteristic 2).
    """
    coeffs = rows.row(row)
    residual = y_received
    seen: set[int] = set()
    for rank, value in known:
        if rank in seen:
            raise ValueError(f"duplicate rank {rank} in known contributions")
        if not 0 <= rank < rows.width:
            raise ValueError(f"rank {rank} out of range for width {rows.width}")
        seen.add(rank)
        residual = residual + coeffs[rank] * value
    return residual


@dataclass(frozen=True)
class RecoveryProblem:
    """Residual protection symbols plus the ranks they must explain.

    Ranks are normalized to ascending order; a residual is None when the
    corresponding protection symbol did not survive.
    """

    missing_ranks: tuple[int, ...]
    residual_sum: FieldElement | None = None
    residual_weighted: FieldElement | None = None

    def __post_init__(self):
        ranks = tuple(sorted(self.missing_ranks))
        if len(ranks) not in (1, 2):
            raise ValueError(f"expected 1 or 2 missing ranks, got {len(ranks)}")
        if len(set(ranks)) != len(ranks):
            raise ValueError(f"missing ranks must be distinct, got {self.missing_ranks}")
        if any(r < 0 for r in ranks):
            raise ValueError(f"ranks must be nonnegative, got {self.missing_ranks}")
        object.__setattr__(self, "missing_ranks", ranks)


def _check_ranks(problem: RecoveryProblem, rows: CoefficientRows) -> None:
    for r in problem.missing_ranks:
        if r >= rows.width:
            raise ValueError(f"rank {r} out of range for width {rows.width}")


def solve_one(problem: RecoveryProblem, rows: CoefficientRows) -> FieldElement:
    """Recover a single erased symbol from whichever residual survived.

    The sum row is preferred when both are available (its coefficient is
    1, no inversion needed).
    """
    if len(problem.missing_ranks) != 1:
        raise ValueError("solve_one requires exactly one missing rank")
    _check_ranks(problem, rows)
    (rank,) = problem.missing_ranks
    if problem.residual_sum is not None:
        return problem.residual_sum
    if problem.residual_weighted is not None:
        return problem.residual_weighted * rows.field.inv(rows.row_weighted[rank])
    raise UnrecoverableError(f"no protection residual available for rank {rank}")


def solve_two(problem: RecoveryProblem, rows: CoefficientRows) -> tuple[FieldElement, FieldElement]:
    """Recover two erased symbols by closed-form 2x2 elimination.

    With w1, w2 the weighted coefficients of the missing ranks, the first
    equation (x1 + x2 = rs) is scaled by w1 and subtracted from the
    second (w1*x1 + w2*x2 = rw), leaving (w1 + w2)*x2 = rw + w1*rs.
    Results come back in rank order.
    """
    if len(problem.missing_ranks) != 2:
        raise ValueError("solve_two requires exactly two missing ranks")
    _check_ranks(problem, rows)
    if problem.residual_sum is None or problem.residual_weighted is None:
        raise UnrecoverableError(
            f"two unknowns at ranks {problem.missing_ranks} but a residual is missing"
        )
    t1, t2 = problem.missing_ranks
    w1 = rows.row_weighted[t1]
    w2 = rows.row_weighted[t2]
    det = w1 + w2
    if not det:
        raise UnrecoverableError(
            f"protection rows are not independent over ranks {t1}, {t2}"
        )
    x2 = (problem.residual_weighted + w1 * problem.residual_sum) * rows.field.inv(det)
    x1 = problem.residual_sum + x2
    return x1, x2
