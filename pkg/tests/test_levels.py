import pytest
from hypothesis import given, strategies as st

from mvadder.levels import (
    DigitVector,
    DomainError,
    EncodingMismatchError,
    Level,
    SignalEncoding,
    bfa_oracle,
    binary_full,
    cpa_oracle,
    from_voltage,
    qfa_oracle,
    quaternary,
    third_swing,
    to_voltage,
)

# Quaternary adder truth table, all 32 rows: (a, b, cin) -> (sum, cout).
TRUTH_TABLE = {
    (0, 0, 0): (0, 0), (0, 1, 0): (1, 0), (0, 2, 0): (2, 0), (0, 3, 0): (3, 0),
    (1, 0, 0): (1, 0), (1, 1, 0): (2, 0), (1, 2, 0): (3, 0), (1, 3, 0): (0, 1),
    (2, 0, 0): (2, 0), (2, 1, 0): (3, 0), (2, 2, 0): (0, 1), (2, 3, 0): (1, 1),
    (3, 0, 0): (3, 0), (3, 1, 0): (0, 1), (3, 2, 0): (1, 1), (3, 3, 0): (2, 1),
    (0, 0, 1): (1, 0), (0, 1, 1): (2, 0), (0, 2, 1): (3, 0), (0, 3, 1): (0, 1),
    (1, 0, 1): (2, 0), (1, 1, 1): (3, 0), (1, 2, 1): (0, 1), (1, 3, 1): (1, 1),
    (2, 0, 1): (3, 0), (2, 1, 1): (0, 1), (2, 2, 1): (1, 1), (2, 3, 1): (2, 1),
    (3, 0, 1): (0, 1), (3, 1, 1): (1, 1), (3, 2, 1): (2, 1), (3, 3, 1): (3, 1),
}


def test_truth_table_covers_all_inputs():
    assert len(TRUTH_TABLE) == 32


def test_qfa_oracle_matches_truth_table_row_for_row():
    for (a, b, cin), expected in TRUTH_TABLE.items():
        assert qfa_oracle(a, b, cin) == expected


def test_qfa_oracle_rejects_out_of_range():
    with pytest.raises(DomainError):
        qfa_oracle(4, 0, 0)
    with pytest.raises(DomainError):
        qfa_oracle(0, -1, 0)
    with pytest.raises(DomainError):
        qfa_oracle(0, 0, 2)
    with pytest.raises(DomainError):
        qfa_oracle(Level.X, 0, 0)


def test_bfa_oracle_all_rows():
    for a in (0, 1):
        for b in (0, 1):
            for c in (0, 1):
                s, cout = bfa_oracle(a, b, c)
                assert s == (a ^ b ^ c)
                assert cout == (1 if a + b + c >= 2 else 0)
    assert bfa_oracle(1, 1, 0) == (0, 1)
    assert bfa_oracle(1, 0, 1) == (0, 1)
    assert bfa_oracle(0, 0, 1) == (1, 0)


def test_qfa_equals_two_chained_bfa_steps():
    # one quaternary digit == two binary bits, all 32 cases
    for (a, b, cin), (want_s, want_c) in TRUTH_TABLE.items():
        s0, c0 = bfa_oracle(a & 1, b & 1, cin)
        s1, c1 = bfa_oracle((a >> 1) & 1, (b >> 1) & 1, c0)
        assert s0 + 2 * s1 == want_s
        assert c1 == want_c


# --------------------------------------------------------------------------
# Encodings


def test_to_voltage_examples():
    assert to_voltage(Level.L2, quaternary(0.9)) == pytest.approx(0.6)
    assert to_voltage(Level.L1, third_swing(0.9)) == pytest.approx(0.3)
    assert to_voltage(Level.L1, binary_full(0.9)) == pytest.approx(0.9)


def test_to_voltage_rejects_x_and_out_of_radix():
    with pytest.raises(EncodingMismatchError):
        to_voltage(Level.X, quaternary(0.9))
    with pytest.raises(EncodingMismatchError):
        to_voltage(Level.L2, binary_full(0.9))


def test_from_voltage_examples():
    enc = quaternary(0.9)
    assert from_voltage(0.61, enc, 0.33) is Level.L2
    assert from_voltage(0.45, enc, 0.1) is Level.X
    assert from_voltage(0.0, enc, 0.33) is Level.L0
    assert from_voltage(0.0, binary_full(0.45), 0.2) is Level.L0


def test_from_voltage_guard_domain():
    with pytest.raises(DomainError):
        from_voltage(0.3, quaternary(0.9), 0.5)
    with pytest.raises(DomainError):
        from_voltage(0.3, quaternary(0.9), 0.0)


@given(
    st.sampled_from(["quat", "bin", "third"]),
    st.floats(min_value=0.2, max_value=1.5),
    st.integers(min_value=0, max_value=3),
    st.floats(min_value=0.01, max_value=0.49),
)
def test_voltage_roundtrip(fam, vdd, lvl, guard):
    enc = {"quat": quaternary, "bin": binary_full, "third": third_swing}[fam](vdd)
    lvl = lvl % enc.radix
    assert from_voltage(to_voltage(Level(lvl), enc), enc, guard) == Level(lvl)


def test_encoding_invariants():
    with pytest.raises(EncodingMismatchError):
        SignalEncoding("bad", (0.1, 0.9))  # must start at 0
    with pytest.raises(EncodingMismatchError):
        SignalEncoding("bad", (0.0, 0.5, 0.4, 0.9))  # not increasing
    with pytest.raises(EncodingMismatchError):
        SignalEncoding("bad", (0.0, 0.3, 0.9))  # 3 levels


# --------------------------------------------------------------------------
# Digit vectors and the ripple oracle


def test_digit_vector_value_roundtrip():
    dv = DigitVector(4, (2, 1, 3, 0))
    assert dv.value() == 2 + 1 * 4 + 3 * 16  # 54
    assert DigitVector.from_int(54, 4, 4) == dv


def test_digit_vector_rejects_bad_digits():
    with pytest.raises(DomainError):
        DigitVector(4, (0, 4))
    with pytest.raises(DomainError):
        DigitVector(3, (0, 1))


def test_cpa_oracle_trivial_cases():
    a = DigitVector(4, (3, 3, 3, 3))
    b = DigitVector(4, (1, 0, 0, 0))
    s, cout = cpa_oracle(a, b, 0)
    assert s.digits == (0, 0, 0, 0) and cout == 1  # 255 + 1 = 256

    z = DigitVector(4, (0, 0, 0, 0))
    s, cout = cpa_oracle(z, z, 1)
    assert s.digits == (1, 0, 0, 0) and cout == 0


def test_cpa_oracle_derived_example():
    # independent oracle: base-4 valuation; 54 + 75 = 129 = 1+0*4+0*16+2*64
    a = DigitVector(4, (2, 1, 3, 0))
    b = DigitVector(4, (3, 2, 0, 1))
    assert a.value() == 54 and b.value() == 75
    expect = DigitVector.from_int(a.value() + b.value(), 4, 4)
    assert expect.digits == (1, 0, 0, 2)
    s, cout = cpa_oracle(a, b, 0)
    assert s == expect and cout == 0


def test_cpa_oracle_mismatch_errors():
    with pytest.raises(DomainError):
        cpa_oracle(DigitVector(4, (0,)), DigitVector(2, (0,)), 0)
    with pytest.raises(DomainError):
        cpa_oracle(DigitVector(4, (0,)), DigitVector(4, (0, 0)), 0)


@given(st.integers(min_value=0, max_value=10**9), st.integers(min_value=0, max_value=10**9),
       st.sampled_from([0, 1]), st.sampled_from([(2, 16), (4, 8), (4, 16), (2, 4), (4, 1)]))
def test_cpa_oracle_equals_integer_addition(va, vb, cin, shape):
    radix, n = shape
    va %= radix**n
    vb %= radix**n
    a = DigitVector.from_int(va, radix, n)
    b = DigitVector.from_int(vb, radix, n)
    s, cout = cpa_oracle(a, b, cin)
    assert va + vb + cin == s.value() + cout * radix**n


def test_cpa_oracle_random_sweep_all_sizes():
    import random

    rng = random.Random(42)
    for n in (1, 4, 8, 16):
        for _ in range(2500):
            va = rng.randrange(4**n)
            vb = rng.randrange(4**n)
            cin = rng.randrange(2)
            s, cout = cpa_oracle(
                DigitVector.from_int(va, 4, n), DigitVector.from_int(vb, 4, n), cin
            )
            assert s.value() + cout * 4**n == va + vb + cin
