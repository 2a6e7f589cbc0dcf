import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixcuts import (
    AllZeroCut,
    CutKind,
    LinearCut,
    MixingInstance,
    ParseError,
    SequenceTheta,
    ValidationError,
    canonicalize,
    loads_instance,
    parse_rational,
    serialize_instance,
)
from mixcuts.core import InvalidSequence, loads_point, DimensionMismatch

rationals = st.fractions(max_denominator=50)


def test_parse_rational_forms():
    assert parse_rational("1/3") == Fraction(1, 3)
    assert parse_rational("0.25") == Fraction(1, 4)
    assert parse_rational("-7") == Fraction(-7)
    assert parse_rational(3) == Fraction(3)
    with pytest.raises(ParseError):
        parse_rational("abc")
    with pytest.raises(ParseError):
        parse_rational("1/0")


@given(a=rationals, b=rationals, c=rationals)
def test_rational_field_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    # exact comparison is a total order
    assert (a < b) + (a == b) + (a > b) == 1


def test_canonicalize_gcd_scaling():
    cut = LinearCut((2, 2), (2, 2, 16, 0, 0), 34, CutKind.AMIX)
    canon = canonicalize(cut)
    assert canon.y_coeffs == (1, 1)
    assert canon.z_coeffs == (1, 1, 8, 0, 0)
    assert canon.rhs == 17
    assert canon.kind is CutKind.AMIX


def test_canonicalize_never_flips_sign():
    # -y >= -1 is a different half-space than y >= 1; scaling is positive only.
    cut = LinearCut((-1,), (0,), -1)
    canon = canonicalize(cut)
    assert canon.y_coeffs == (-1,)
    assert canon.rhs == -1


def test_canonicalize_idempotent_fuzz():
    rng = random.Random(12345)
    for _ in range(1000):
        k = rng.randint(1, 3)
        n = rng.randint(1, 5)
        y = [Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(k)]
        z = [Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(n)]
        rhs = Fraction(rng.randint(-20, 20), rng.randint(1, 4))
        if not any(y) and not any(z) and not rhs:
            rhs = Fraction(1)
        cut = LinearCut(y, z, rhs)
        once = canonicalize(cut)
        assert canonicalize(once) == once
        assert once.canonical_key() == cut.canonical_key()


def test_zero_cut_rejected():
    with pytest.raises(AllZeroCut):
        canonicalize(LinearCut((0, 0), (0,), 0))


def test_cut_equality_scalar_multiples():
    cut = LinearCut((1, 0), (2, 2, 5, 1, 3), 13, CutKind.MIX_STAR)
    scaled = LinearCut(
        tuple(7 * a for a in cut.y_coeffs),
        tuple(7 * b for b in cut.z_coeffs),
        7 * cut.rhs,
        CutKind.MIX_STAR,
    )
    assert cut == scaled
    assert hash(cut) == hash(scaled)
    third = LinearCut((1, 0), (2, 2, 5, 1, 4), 13)
    assert cut != third
    # equivalence relation on a sample: symmetric + transitive
    frac = LinearCut(
        tuple(Fraction(a, 3) for a in cut.y_coeffs),
        tuple(Fraction(b, 3) for b in cut.z_coeffs),
        Fraction(cut.rhs, 3),
    )
    assert scaled == frac and frac == cut


def test_cut_violation_and_lhs():
    cut = LinearCut((1, 1), (1, 1, 8, 0, 0), 17)
    y = (Fraction(8), Fraction(8))
    z = (Fraction(0),) * 3 + (Fraction(1),) * 2
    assert cut.lhs(y, z) == 16
    assert cut.violation(y, z) == 1
    assert not cut.satisfied_by(y, z)


def test_load_instance_example1(example1):
    assert example1.n == 5
    assert example1.k == 2
    assert example1.weights[0] == (8, 3)
    assert example1.weights[2] == (13, 2)
    assert example1.epsilon == 7
    assert example1.lower == (0, 0)


def test_load_instance_rejects_empty_and_bad_docs():
    with pytest.raises(ValidationError):
        loads_instance('{"n": 0, "k": 2, "W": []}')
    with pytest.raises(ValidationError):
        loads_instance('{"n": 1, "k": 2, "W": [["1"]]}')
    with pytest.raises(ParseError):
        loads_instance("not json at all")
    with pytest.raises(ValidationError):
        loads_instance(
            '{"n": 1, "k": 1, "W": [["1"]], "epsilon": "-1"}'
        )
    with pytest.raises(ValidationError):
        loads_instance('{"n": 1, "k": 1, "W": [["1"]], "lower": ["-2"]}')
    with pytest.raises(ValidationError):
        loads_instance(
            '{"n": 2, "k": 1, "W": [["1"], ["2"]], "probabilities": ["1/2", "1/3"]}'
        )


def test_instance_roundtrip_exact_thirds():
    rng = random.Random(99)
    for _ in range(50):
        n = rng.randint(1, 4)
        k = rng.randint(1, 3)
        w = [
            [Fraction(rng.randint(0, 9), rng.choice((1, 2, 3))) for _ in range(k)]
            for _ in range(n)
        ]
        inst = MixingInstance(w, None, Fraction(rng.randint(0, 9), 3))
        assert loads_instance(serialize_instance(inst)) == inst
    inst = loads_instance('{"n": 1, "k": 1, "W": [["1/3"]]}')
    assert inst.weights[0][0] == Fraction(1, 3)
    assert loads_instance(serialize_instance(inst)) == inst


def test_loads_point_dimensions():
    y, z = loads_point('{"y": ["1"], "z": ["0", "1"]}', 1, 2)
    assert y == (1,) and z == (0, 1)
    with pytest.raises(DimensionMismatch):
        loads_point('{"y": ["1"], "z": ["0"]}', 1, 2)
    with pytest.raises(ParseError):
        loads_point('{"y": ["1"]}', 1, 2)


def test_sequence_theta_validation():
    theta = SequenceTheta((2, 0, 1))
    assert theta.last == 1
    assert len(theta) == 3
    with pytest.raises(InvalidSequence):
        SequenceTheta(())
    with pytest.raises(InvalidSequence):
        SequenceTheta((1, 1))
    with pytest.raises(InvalidSequence):
        SequenceTheta((0, 2)).validate_for(2)
