import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from prldpc.ldpc import (
    AlistError,
    ParityCheckMatrix,
    code_info,
    derive_generator,
    encode,
    from_bipolar,
    gf2_rank,
    parse_alist,
    serialize_alist,
    syndrome,
    to_bipolar,
)


def test_from_rows_basic_shape(toy_h):
    assert toy_h.n_vars == 3
    assert toy_h.n_checks == 1
    assert toy_h.n_edges == 3
    assert list(toy_h.check_rows[0]) == [0, 1, 2]
    assert [list(c) for c in toy_h.var_cols] == [[0], [0], [0]]


def test_from_rows_normalizes_duplicates():
    # row entries are a set over GF(2); the constructor dedupes and sorts
    h = ParityCheckMatrix.from_rows(3, [[1, 0, 0]])
    assert list(h.check_rows[0]) == [0, 1]
    # direct construction stays strict
    with pytest.raises(ValueError):
        ParityCheckMatrix(n_vars=3, n_checks=1, check_rows=((0, 0, 1),),
                          var_cols=((0,), (0,), ()))


def test_syndrome_toy(toy_h):
    assert syndrome(toy_h, np.array([0, 0, 0])) == np.array([0])
    assert syndrome(toy_h, np.array([1, 1, 0])) == np.array([0])
    assert syndrome(toy_h, np.array([1, 0, 0])) == np.array([1])


def test_bipolar_mapping_convention():
    bits = np.array([0, 1, 1, 0], dtype=np.uint8)
    x = to_bipolar(bits)
    assert np.array_equal(x, [1.0, -1.0, -1.0, 1.0])
    assert np.array_equal(from_bipolar(x), bits)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=64))
def test_bipolar_round_trip(bits):
    arr = np.array(bits, dtype=np.uint8)
    assert np.array_equal(from_bipolar(to_bipolar(arr)), arr)


def test_gf2_rank_known_cases(toy_h, hamming_h):
    assert gf2_rank(toy_h) == 1
    assert gf2_rank(hamming_h) == 3
    # duplicated row contributes nothing over GF(2)
    dup = ParityCheckMatrix.from_rows(4, [[0, 1], [0, 1], [2, 3]])
    assert gf2_rank(dup) == 2


def test_generator_produces_codewords(hamming_h):
    gen = derive_generator(hamming_h)
    assert gen.message_len == 4
    for m in range(16):
        msg = np.array([(m >> k) & 1 for k in range(4)], dtype=np.uint8)
        cw = encode(gen, msg)
        assert not syndrome(hamming_h, cw).any()
    # systematic in the permuted coordinates
    msg = np.array([1, 0, 1, 1], dtype=np.uint8)
    cw = encode(gen, msg)
    assert np.array_equal(cw[gen.col_perm[: gen.message_len]], msg)


def test_distinct_messages_distinct_codewords(hamming_h):
    gen = derive_generator(hamming_h)
    seen = set()
    for m in range(16):
        msg = np.array([(m >> k) & 1 for k in range(4)], dtype=np.uint8)
        seen.add(bytes(encode(gen, msg)))
    assert len(seen) == 16


def test_code_info_hamming(hamming_h):
    info = code_info(hamming_h)
    assert info["n_vars"] == 7
    assert info["rank"] == 3
    assert info["message_len"] == 4
    assert info["rate"] == pytest.approx(4 / 7)
    assert info["regular"] is False
    assert info["var_degree_hist"] == {1: 3, 2: 3, 3: 1}


def test_alist_round_trip_explicit(hamming_h):
    text = serialize_alist(hamming_h)
    again = parse_alist(text)
    assert again.n_vars == hamming_h.n_vars
    assert again.n_checks == hamming_h.n_checks
    assert [list(r) for r in again.check_rows] == \
           [list(r) for r in hamming_h.check_rows]


def test_alist_tolerates_zero_padded_entries():
    # irregular writers pad the per-node lists with zeros up to the max
    # degree; the zeros are placeholders, not indices
    text = "\n".join([
        "3 2", "2 2", "1 2 1", "2 2",
        "1 0", "1 2", "2 0",
        "1 2", "2 3",
    ]) + "\n"
    h = parse_alist(text)
    assert h.n_vars == 3
    assert [list(r) for r in h.check_rows] == [[0, 1], [1, 2]]


def test_alist_error_mentions_line():
    bad = "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 9\n"
    with pytest.raises(AlistError) as e:
        parse_alist(bad)
    assert "line 9" in str(e.value)


@settings(deadline=None, max_examples=40)
@given(st.data())
def test_alist_round_trip_random(data):
    n = data.draw(st.integers(2, 12), label="n")
    m = data.draw(st.integers(1, 8), label="m")
    rows = []
    for j in range(m):
        deg = data.draw(st.integers(1, n), label=f"deg{j}")
        row = data.draw(
            st.lists(st.integers(0, n - 1), min_size=deg, max_size=deg,
                     unique=True), label=f"row{j}")
        rows.append(sorted(row))
    h = ParityCheckMatrix.from_rows(n, rows)
    again = parse_alist(serialize_alist(h))
    assert [list(r) for r in again.check_rows] == [list(r) for r in h.check_rows]
    assert [list(c) for c in again.var_cols] == [list(c) for c in h.var_cols]


def test_encode_checks_message_length(hamming_h):
    gen = derive_generator(hamming_h)
    with pytest.raises(ValueError):
        encode(gen, np.zeros(3, dtype=np.uint8))
