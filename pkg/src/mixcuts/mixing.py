"""Per-column machinery: lower-bound reduction, quantile bounds, mixing cuts.

The mixing inequality of a chain of scenario indices with nonincreasing
column values telescopes their differences; the starred form starts the
chain at the column maximum and, together with the variable bounds, yields
the full hull of the linking-free set.  Separation reduces to greedy
polymatroid separation on the column oracle against complemented variables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from .core import (
    CutKind,
    DimensionMismatch,
    DomainError,
    InvalidSequence,
    LinearCut,
    MixingInstance,
    RiskOutOfRange,
    complement,
    parse_rational,
)
from .submodular import SetFunctionOracle, separate_polymatroid


def column_oracle(inst: MixingInstance, j: int) -> SetFunctionOracle:
    """Oracle z -> max(lower_j, max_i w[i][j] z_i) over indicator bitmasks."""
    col = inst.column(j)
    floor = inst.lower[j]

    def value(mask: int) -> Fraction:
        best = floor
        for i, w in enumerate(col):
            if mask & (1 << i) and w > best:
                best = w
        return best

    return SetFunctionOracle(inst.n, value, name=f"column-{j}")


@dataclass(frozen=True)
class MixingSequence:
    """Chain of scenario indices with nonincreasing values in one column."""

    j: int
    indices: tuple[int, ...]

    def __init__(self, j: int, indices: Iterable[int]):
        object.__setattr__(self, "j", int(j))
        object.__setattr__(self, "indices", tuple(int(i) for i in indices))
        if not self.indices:
            raise InvalidSequence("mixing sequence must be nonempty")

    def validate_for(self, inst: MixingInstance) -> None:
        if not 0 <= self.j < inst.k:
            raise InvalidSequence(f"column {self.j} out of range")
        if any(not 0 <= i < inst.n for i in self.indices):
            raise InvalidSequence(f"sequence {self.indices} exceeds ground set")
        col = inst.column(self.j)
        values = [col[i] for i in self.indices]
        if any(a < b for a, b in zip(values, values[1:])):
            raise InvalidSequence(f"column {self.j} values not nonincreasing: {values}")
        if values[-1] < inst.lower[self.j]:
            raise InvalidSequence(
                f"chain tail {values[-1]} below column lower bound {inst.lower[self.j]}"
            )


def reduce_lower_bounds(
    inst: MixingInstance,
) -> tuple[MixingInstance, tuple[Fraction, ...]]:
    """Shift lower bounds to zero: entries become (w - lower_j)+, same epsilon.

    A cut alpha.y + beta.z >= gamma on the reduced instance is valid for the
    original one as alpha.(y - lower) + beta.z >= gamma, i.e. with right-hand
    side gamma + alpha.lower.
    """
    shift = inst.lower
    if inst.lower_is_zero:
        return inst, shift
    reduced = [
        [max(Fraction(0), w - shift[j]) for j, w in enumerate(row)]
        for row in inst.weights
    ]
    return (
        MixingInstance(reduced, None, inst.epsilon, inst.probabilities),
        shift,
    )


def quantile_lower_bounds(inst: MixingInstance, risk: Fraction) -> tuple[Fraction, ...]:
    """Largest per-column bounds implied by the scenario-probability budget.

    For each column, scenarios are sorted by value descending; the bound is
    the value at the first position where the cumulative probability of the
    strictly-better-ranked scenarios is still within the risk budget but
    including it exceeds the budget.  Ties on the budget boundary keep the
    weak inequality on the already-accumulated mass.
    """
    if inst.probabilities is None:
        raise RiskOutOfRange("instance has no scenario probabilities")
    risk = parse_rational(risk)
    if not Fraction(0) < risk < Fraction(1):
        raise RiskOutOfRange(f"risk {risk} outside (0, 1)")
    bounds = []
    for j in range(inst.k):
        order = sorted(range(inst.n), key=lambda i: (-inst.weights[i][j], i))
        acc = Fraction(0)
        value = inst.weights[order[-1]][j]
        for i in order:
            acc += inst.probabilities[i]
            if acc > risk:
                value = inst.weights[i][j]
                break
        bounds.append(value)
    return tuple(bounds)


def mixing_cut(inst: MixingInstance, seq: MixingSequence) -> LinearCut:
    """Telescoped chain inequality for one column; starred when the chain
    head attains the column maximum."""
    seq.validate_for(inst)
    col = inst.column(seq.j)
    coeffs = [Fraction(0)] * inst.n
    values = [col[i] for i in seq.indices] + [inst.lower[seq.j]]
    for s, i in enumerate(seq.indices):
        coeffs[i] += values[s] - values[s + 1]
    y = [Fraction(0)] * inst.k
    y[seq.j] = Fraction(1)
    kind = CutKind.MIX_STAR if values[0] == inst.column_max(seq.j) else CutKind.MIX
    return LinearCut(y, coeffs, values[0], kind)


def _polymatroid_to_mixing(
    inst: MixingInstance, j: int, pi: Sequence[Fraction]
) -> LinearCut:
    """Translate y_j >= pi.z' + lower_j (complemented variables z' = 1 - z)
    into original variables: y_j + pi.z >= lower_j + sum(pi)."""
    y = [Fraction(0)] * inst.k
    y[j] = Fraction(1)
    rhs = inst.lower[j] + sum(pi, Fraction(0))
    return LinearCut(y, tuple(pi), rhs, CutKind.MIX_STAR)


def separate_mixing(
    inst: MixingInstance,
    y_bar: Sequence[Fraction],
    z_bar: Sequence[Fraction],
) -> list[LinearCut]:
    """Most violated mixing cut per column at (y_bar, z_bar), greedy-exact.

    Runs polymatroid separation for every column oracle against the
    complemented point; a column contributes nothing exactly when its
    coordinate satisfies all of the column's mixing inequalities.
    """
    y = [parse_rational(v) for v in y_bar]
    z = [parse_rational(v) for v in z_bar]
    if len(y) != inst.k or len(z) != inst.n:
        raise DimensionMismatch("point dimensions disagree with instance")
    if any(v < 0 or v > 1 for v in z):
        raise DomainError("z outside the unit box")
    z_formal = complement(z)
    cuts = []
    for j in range(inst.k):
        raw = separate_polymatroid(column_oracle(inst, j), y[j], z_formal)
        if raw is None:
            continue
        pi = tuple(-b for b in raw.z_coeffs)
        cuts.append(_polymatroid_to_mixing(inst, j, pi))
    return cuts


# ---------------------------------------------------------------------------
# Cut family enumeration.  Distinct canonical chains are value-subsets of a
# column (each represented by one attaining index): equal-value chain members
# other than the last carry a zero coefficient, so only the representative
# choice matters.
# ---------------------------------------------------------------------------


def _chains(
    inst: MixingInstance, j: int, star_only: bool, max_chains: Optional[int] = None
) -> Iterator[tuple[int, ...]]:
    col = inst.column(j)
    floor = inst.lower[j]
    by_value: dict[Fraction, list[int]] = {}
    for i, w in enumerate(col):
        if w >= floor:
            by_value.setdefault(w, []).append(i)
    values = sorted(by_value, reverse=True)
    if not values:
        return
    groups = [by_value[v] for v in values]
    heads = groups[0] if star_only else [i for g in groups for i in g]
    count = 0
    for start, head_group in enumerate(groups if not star_only else groups[:1]):
        for head in head_group:
            tail_groups = groups[start + 1 :]
            for pattern in itertools.product(
                *[[None] + g for g in tail_groups]  # type: ignore[list-item]
            ):
                chain = (head,) + tuple(i for i in pattern if i is not None)
                yield chain
                count += 1
                if max_chains is not None and count >= max_chains:
                    return


def mix_star_cuts(
    inst: MixingInstance, j: int, max_chains: Optional[int] = None
) -> list[LinearCut]:
    """All distinct starred mixing cuts of a column (deduplicated)."""
    seen = set()
    cuts = []
    for chain in _chains(inst, j, star_only=True, max_chains=max_chains):
        cut = mixing_cut(inst, MixingSequence(j, chain))
        key = cut.canonical_key()
        if key not in seen:
            seen.add(key)
            cuts.append(cut)
    return cuts


def all_mixing_cuts(
    inst: MixingInstance, j: int, max_chains: Optional[int] = None
) -> list[LinearCut]:
    """All distinct mixing cuts of a column, starred or not (deduplicated)."""
    seen = set()
    cuts = []
    for chain in _chains(inst, j, star_only=False, max_chains=max_chains):
        cut = mixing_cut(inst, MixingSequence(j, chain))
        key = cut.canonical_key()
        if key not in seen:
            seen.add(key)
            cuts.append(cut)
    return cuts
