"""Two-sided scenario data as a two-column mixing set with a band constraint.

The substitution y_1 = y_c + y_a, y_2 = y_c - y_a + u_a turns the paired
rows into a two-column instance with linking threshold u_a whose linking
oracle is always submodular, so the aggregated cuts describe that hull; the
band |y_1 - y_2| <= u_a can then be added without creating fractional
vertices, which recovers the full description of the original set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .aggregated import aggregated_cut, decompose
from .core import (
    ConditionViolated,
    CutKind,
    DimensionMismatch,
    InternalInvariant,
    LinearCut,
    MixingInstance,
    ParseError,
    RationalLike,
    SequenceTheta,
    parse_rational,
)
from .hull import VRepresentation, diagnose, membership, v_representation


@dataclass(frozen=True)
class TwoSidedData:
    """Per-scenario sums and differences plus the upper bound u_a."""

    w: tuple[Fraction, ...]
    v: tuple[Fraction, ...]
    u_a: Fraction

    def __init__(
        self,
        w: Sequence[RationalLike],
        v: Sequence[RationalLike],
        u_a: RationalLike,
    ) -> None:
        wv = tuple(parse_rational(x) for x in w)
        vv = tuple(parse_rational(x) for x in v)
        ua = parse_rational(u_a)
        if len(wv) != len(vv):
            raise DimensionMismatch("w and v must have the same length")
        if not wv:
            raise DimensionMismatch("need at least one scenario")
        for i, (wi, vi) in enumerate(zip(wv, vv)):
            if not wi >= vi >= 0:
                raise ConditionViolated(
                    f"scenario {i}: need w >= v >= 0, got w={wi}, v={vi}"
                )
            if wi > ua:
                raise ConditionViolated(
                    f"scenario {i}: w={wi} exceeds the bound u_a={ua}"
                )
        object.__setattr__(self, "w", wv)
        object.__setattr__(self, "v", vv)
        object.__setattr__(self, "u_a", ua)

    @property
    def n(self) -> int:
        return len(self.w)


def loads_twosided(text: str) -> TwoSidedData:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("two-sided document must be a JSON object")
    try:
        w = doc["w"]
        v = doc["v"]
        ua = doc["u_a"]
    except KeyError as exc:
        raise ParseError(f"missing field: {exc}") from exc
    n = doc.get("n")
    if n is not None and (len(w) != int(n) or len(v) != int(n)):
        raise DimensionMismatch("w/v length disagrees with declared n")
    return TwoSidedData(w, v, ua)


def to_mixing(data: TwoSidedData) -> MixingInstance:
    """Column 1 carries w, column 2 carries v + u_a, threshold u_a.

    The derived facts (the low-row set is exactly the all-zero scenarios,
    the pairwise minimum constant is at least u_a, the linking oracle is
    submodular) are re-checked and must hold for admissible data.
    """
    rows = [[wi, vi + data.u_a] for wi, vi in zip(data.w, data.v)]
    inst = MixingInstance(rows, None, data.u_a)
    diag = diagnose(inst)
    expected_low = frozenset(
        i for i in range(data.n) if data.w[i] == 0 and data.v[i] == 0
    )
    if diag.i_bar != expected_low:
        raise InternalInvariant("low-row set disagrees with the zero scenarios")
    if not diag.l_w_eps >= data.u_a:
        raise InternalInvariant("pairwise minimum constant fell below the bound")
    if not diag.g_submodular:
        raise InternalInvariant("linking oracle unexpectedly not submodular")
    return inst


def generalized_cut(
    data: TwoSidedData, theta: SequenceTheta
) -> tuple[LinearCut, LinearCut]:
    """The aggregated cut of the transformed instance, plus its form in the
    original variables (y_c, y_a).

    The original form is 2*y_c + (w-chain) + (v-chain) >= w-head + v-head
    with both chains telescoping to zero; it equals the transformed cut under
    the substitution identity y_1 + y_2 = 2*y_c + u_a, which is verified
    coefficientwise here.
    """
    inst = to_mixing(data)
    theta.validate_for(data.n)
    primed = aggregated_cut(inst, theta)

    decomp = decompose(inst, theta)
    coeffs = [Fraction(0)] * data.n
    series = (data.w, data.v)
    rhs = Fraction(0)
    for j, chain in enumerate(decomp.per_column):
        vals = [series[j][i] for i in chain] + [Fraction(0)]
        for s, i in enumerate(chain):
            coeffs[i] += vals[s] - vals[s + 1]
        rhs += vals[0]
    original = LinearCut(
        (Fraction(2), Fraction(0)), coeffs, rhs, primed.kind
    )

    # Substitution audit: identical z coefficients, right-hand sides offset
    # by exactly u_a (the constant injected by y_1 + y_2 = 2 y_c + u_a).
    if tuple(primed.z_coeffs) != tuple(original.z_coeffs):
        raise InternalInvariant("z coefficients changed under the substitution")
    if primed.rhs - original.rhs != data.u_a:
        raise InternalInvariant("right-hand sides are not offset by u_a")
    return primed, original


@dataclass(frozen=True)
class BandedHullReport:
    instance: MixingInstance
    band_ok: bool
    extreme_points: tuple[tuple[tuple[Fraction, ...], tuple[int, ...]], ...]
    clipped: VRepresentation
    cuts: tuple[LinearCut, ...]

    def to_json(self) -> str:
        doc = {
            "band_ok": self.band_ok,
            "extreme_points": len(self.extreme_points),
            "clipped_points": len(self.clipped.points),
            "cuts": [str(c) for c in self.cuts],
        }
        return json.dumps(doc, indent=2)


def hull_with_bounds(
    data: TwoSidedData, max_cut_sequences: int = 5_000
) -> BandedHullReport:
    """Intersect the linking-set hull with the band u_a >= y_1 - y_2 >= -u_a.

    Every extreme point already satisfies the band (asserted exhaustively);
    clipping therefore only adds points where a unit ray leaving an extreme
    point meets a band plane, whose z parts stay integral.  The certified
    description is the linking-set family plus the band and the z bounds;
    the aggregated part of the family is enumerated up to the sequence
    budget (it is exponential in n).
    """
    inst = to_mixing(data)
    vrep = v_representation(inst)
    ua = data.u_a

    # Work in the original indicator orientation: complement the z parts.
    points = tuple(
        (y, tuple(1 - zi for zi in z)) for y, z in vrep.points
    )
    band_ok = all(-ua <= y[0] - y[1] <= ua for y, _ in points)
    if not band_ok:
        raise InternalInvariant("an extreme point violates the band")

    clipped_points = list(points)
    for y, z in points:
        gap_upper = ua - (y[0] - y[1])  # room along +e_1 to the upper plane
        if gap_upper > 0:
            clipped_points.append(((y[0] + gap_upper, y[1]), z))
        gap_lower = ua + (y[0] - y[1])  # room along +e_2 to the lower plane
        if gap_lower > 0:
            clipped_points.append(((y[0], y[1] + gap_lower), z))
    for _, z in clipped_points:
        if any(zi not in (0, 1) for zi in z):
            raise InternalInvariant("clipping created a fractional z")
    clipped = VRepresentation(
        tuple(clipped_points),
        (((Fraction(1), Fraction(1)), tuple(0 for _ in range(data.n))),),
    )

    cuts = _banded_cut_family(data, inst, max_cut_sequences)
    cuts.append(
        LinearCut(
            (Fraction(-1), Fraction(1)),
            [Fraction(0)] * data.n,
            -ua,
            CutKind.BOUND_UPPER,
        )
    )
    cuts.append(
        LinearCut(
            (Fraction(1), Fraction(-1)),
            [Fraction(0)] * data.n,
            -ua,
            CutKind.BOUND_LOWER,
        )
    )
    for i in range(data.n):
        low = [Fraction(0)] * data.n
        low[i] = Fraction(1)
        cuts.append(LinearCut((0, 0), low, 0, CutKind.BOUND_LOWER))
        high = [Fraction(0)] * data.n
        high[i] = Fraction(-1)
        cuts.append(LinearCut((0, 0), high, -1, CutKind.BOUND_UPPER))
    return BandedHullReport(inst, band_ok, points, clipped, tuple(cuts))


def _banded_cut_family(
    data: TwoSidedData, inst: MixingInstance, max_cut_sequences: int
) -> list[LinearCut]:
    from .aggregated import count_sequences, sequences, aggregated_cut
    from .mixing import mix_star_cuts

    cuts: list[LinearCut] = []
    seen = set()
    for j in range(2):
        for cut in mix_star_cuts(inst, j):
            key = cut.canonical_key()
            if key not in seen:
                seen.add(key)
                cuts.append(cut)
    outside = sorted(
        i for i in range(data.n) if data.w[i] != 0 or data.v[i] != 0
    )
    max_len = len(outside)
    while max_len > 1 and count_sequences(len(outside), max_len) > max_cut_sequences:
        max_len -= 1
    for theta in sequences(outside, max_length=max_len):
        cut = aggregated_cut(inst, theta)
        if cut.kind is not CutKind.AMIX_STAR:
            continue
        key = cut.canonical_key()
        if key not in seen:
            seen.add(key)
            cuts.append(cut)
    linking = LinearCut(
        (Fraction(1), Fraction(1)), [Fraction(0)] * data.n, data.u_a, CutKind.LINKING
    )
    if data.u_a > 0 and linking.canonical_key() not in seen:
        cuts.append(linking)
    return cuts


def banded_membership(
    report: BandedHullReport, y: Sequence[Fraction], z: Sequence[Fraction]
):
    """Membership in the band-clipped hull (original indicator orientation)."""
    return membership(report.clipped, y, z)
