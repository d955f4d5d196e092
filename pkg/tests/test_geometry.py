from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcf.data_files import appendix_code_path
from qcf.geometry import (
    Code,
    CodeFormatError,
    Subspace,
    act,
    coordinate_hyperplane,
    decode_appendix_row,
    encode_appendix_row,
    enumerate_grassmannian,
    format_code,
    gaussian_binomial,
    hyperplane_members,
    parse_appendix_text,
    read_code_file,
    sub_subspaces,
    subspace_distance,
    subspace_sum,
)
from qcf.gf2 import mat_mul
from strategies import invertible, subspaces


@pytest.mark.parametrize("n,k", [(4, 2), (5, 2), (6, 3), (7, 2), (7, 3)])
def test_gaussian_binomial_matches_enumeration(n, k):
    words = list(enumerate_grassmannian(n, k))
    assert len(words) == gaussian_binomial(n, k)
    assert len({w.key for w in words}) == len(words)


def test_gaussian_values():
    assert gaussian_binomial(7, 2) == 2667
    assert gaussian_binomial(7, 3) == 11811
    assert gaussian_binomial(7, 0) == gaussian_binomial(7, 7) == 1
    with pytest.raises(ValueError):
        gaussian_binomial(3, 5)


@given(subspaces(7, 3), invertible(7), invertible(7))
def test_right_action(s, a, b):
    assert act(act(s, a), b) == act(s, mat_mul(a, b))


@given(subspaces(6, 3), subspaces(6, 3), subspaces(6, 3))
def test_distance_is_a_metric(u, v, w):
    assert subspace_distance(u, u) == 0
    assert subspace_distance(u, v) == subspace_distance(v, u)
    assert subspace_distance(u, w) <= subspace_distance(u, v) + subspace_distance(v, w)
    assert subspace_distance(u, v) % 2 == 0


@given(subspaces(7, 3), subspaces(7, 3), invertible(7))
def test_distance_invariant(u, v, m):
    assert subspace_distance(act(u, m), act(v, m)) == subspace_distance(u, v)


@given(subspaces(7, 3), subspaces(7, 3))
def test_distance_four_shares_no_line(u, v):
    # distance >= 4 between planes means no common 2-subspace
    far = subspace_distance(u, v) >= 4
    shared = {t.key for t in sub_subspaces(u, 2)} & {t.key for t in sub_subspaces(v, 2)}
    assert far == (not shared)


@given(subspaces(7, 3))
def test_points_and_subspaces(s):
    assert len(s.points()) == 7
    assert len(sub_subspaces(s, 2)) == 7
    assert all(s.contains(t) for t in sub_subspaces(s, 2))


@given(subspaces(7, 3), subspaces(7, 2))
def test_sum_dimension(u, w):
    t = subspace_sum(u, w)
    assert t.contains(u) and t.contains(w)
    assert t.dim == (u.dim + w.dim + subspace_distance(u, w)) // 2


@given(subspaces(7, 3))
def test_appendix_codec_roundtrip(s):
    assert decode_appendix_row(encode_appendix_row(s)) == s


def test_decode_rejects_non_rref():
    with pytest.raises(CodeFormatError):
        decode_appendix_row("7777777")
    with pytest.raises(CodeFormatError):
        decode_appendix_row("012441")


def test_parse_errors_carry_line_numbers():
    with pytest.raises(CodeFormatError, match="line 3"):
        parse_appendix_text("# header\n0124412\n01x4412\n")


def test_duplicate_named():
    s = parse_appendix_text("0124412\n1012460\n0124412\n")
    with pytest.raises(ValueError, match="entries 1 and 3.*0124412"):
        Code.from_words(s)


def test_single_word_distance_none():
    c = Code.from_words(parse_appendix_text("0124412\n"))
    assert len(c) == 1 and c.min_distance() is None


def test_coordinate_hyperplane():
    h = coordinate_hyperplane(7, 0)
    assert h.dim == 6
    assert all(p >> 6 == 0 for p in h.points())


def test_bundled_file_reencodes_identically():
    text = appendix_code_path().read_text()
    rows = [ln.strip() for ln in text.splitlines() if ln.strip() and ln.strip()[0].isdigit()]
    assert [encode_appendix_row(w) for w in parse_appendix_text(text)] == rows


def test_json_roundtrip(tmp_path: Path):
    words = list(enumerate_grassmannian(7, 3))[:20]
    p = tmp_path / "c.json"
    p.write_text(format_code(words, "json"))
    assert read_code_file(p) == words


@given(st.lists(subspaces(7, 3), min_size=1, max_size=12, unique_by=lambda s: s.key))
def test_hyperplane_count_bounded(words):
    c = Code(tuple(words))
    assert 0 <= hyperplane_members(c, coordinate_hyperplane(7, 0)) <= len(c)


def test_from_key_roundtrip():
    for s in list(enumerate_grassmannian(5, 2))[:50]:
        assert Subspace.from_key(s.key, 2, 5) == s
