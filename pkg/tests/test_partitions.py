from itertools import combinations, product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hybridscan.errors import CapacityError, CatalogMissError, DomainError
from hybridscan.partitions import (
    AddressPattern,
    PatchCatalog,
    brute_force_count,
    build_catalog,
    canonicalize,
    enumerate_canonical_patterns,
    max_complete_k,
    parse_sites,
    partition_count,
    partition_total,
)


def classes_by_translation(m, n, k):
    """Oracle: canonical forms of every k-subset of the grid, as a set."""
    cells = list(product(range(m), range(n)))
    return {canonicalize(c)[0] for c in combinations(cells, k)}


@pytest.mark.parametrize(
    "m, n, k_max, total", [(3, 3, 2, 13), (3, 3, 3, 61), (3, 3, 4, 158), (4, 4, 2, 25), (4, 4, 3, 229), (5, 5, 2, 41), (5, 5, 3, 621)]
)
def test_table_totals(m, n, k_max, total):
    assert partition_total(m, n, k_max) == total


def test_counts():
    assert partition_count(3, 3, 1) == 1
    assert partition_count(3, 3, 2) == 12
    assert partition_count(4, 4, 2) == 24
    assert len(classes_by_translation(4, 4, 2)) == 24


def test_enumeration_examples():
    assert enumerate_canonical_patterns(2, 2, 1) == [AddressPattern([(0, 0)])]
    assert len(enumerate_canonical_patterns(3, 3, 2)) == 12
    assert len(enumerate_canonical_patterns(3, 3, 3)) == 48


@pytest.mark.parametrize("m", range(1, 5))
@pytest.mark.parametrize("n", range(1, 5))
def test_closed_form_matches_oracles(m, n):
    for k in range(1, m * n + 1):
        expected = partition_count(m, n, k)
        assert len(enumerate_canonical_patterns(m, n, k)) == expected
        assert brute_force_count(m, n, k) == expected
        if m * n <= 9 or k <= 3 or k >= m * n - 2:
            assert len(classes_by_translation(m, n, k)) == expected


def test_enumeration_is_complete_and_ordered():
    m, n, k = 3, 4, 3
    pats = enumerate_canonical_patterns(m, n, k)
    assert pats == sorted(pats)
    assert set(pats) == classes_by_translation(m, n, k)
    assert all(p.is_canonical and p.k == k for p in pats)


@given(m=st.integers(1, 8), n=st.integers(1, 8), data=st.data())
def test_symmetry(m, n, data):
    k = data.draw(st.integers(1, m * n))
    assert partition_count(m, n, k) == partition_count(n, m, k)
    assert partition_count(m, n, 1) == 1


def test_large_counts_exact():
    # 8x8 with k=32 needs exact big integers
    v = partition_count(8, 8, 32)
    assert isinstance(v, int) and v > 2**53


@pytest.mark.parametrize("args", [(0, 3, 1), (3, 0, 1), (3, 3, 0), (3, 3, 10)])
def test_count_domain(args):
    with pytest.raises(DomainError):
        partition_count(*args)


def test_canonicalize():
    assert canonicalize([(2, 3)]) == (AddressPattern([(0, 0)]), (2, 3))
    assert canonicalize([(1, 1), (2, 2)]) == (AddressPattern([(0, 0), (1, 1)]), (1, 1))
    with pytest.raises(DomainError):
        canonicalize([])


sites = st.lists(st.tuples(st.integers(0, 30), st.integers(0, 30)), min_size=1, max_size=8)


@given(sites)
def test_canonicalize_idempotent_and_invertible(s):
    canon, off = canonicalize(s)
    again, off2 = canonicalize(canon)
    assert again == canon and off2 == (0, 0)
    assert canon.shifted(off) == AddressPattern(s)


def test_pattern_basics():
    p = AddressPattern([(1, 2), (0, 0), (1, 2)])
    assert p.k == 2 and p.extent == (2, 3)
    assert str(p) == "(0,0) (1,2)"
    assert parse_sites(str(p)) == list(p)
    with pytest.raises(ValueError):
        parse_sites("(0,0) junk")


def test_build_catalog():
    cat = build_catalog(3, 3, 2, 16)
    assert len(cat) == 13
    assert sorted(cat.entries.values()) == list(range(13))
    assert len(build_catalog(3, 3, 3, 64)) == 61
    with pytest.raises(CapacityError) as exc:
        build_catalog(3, 3, 3, 36)
    assert exc.value.required == 61 and exc.value.available == 36


def test_catalog_fill_and_lookup():
    cat = build_catalog(3, 3, 2, 16, fill=True)
    assert len(cat) == 16 and cat.n_partial == 3
    assert cat.index_of([(5, 5), (6, 7)]) == cat.entries[AddressPattern([(0, 0), (1, 2)])]
    with pytest.raises(CatalogMissError) as exc:
        build_catalog(3, 3, 2, 16).index_of([(1, 1), (2, 2), (3, 3)])
    assert exc.value.pattern == AddressPattern([(0, 0), (1, 1), (2, 2)])
    assert "pattern not in catalog" in str(exc.value)


def test_catalog_round_trip(tmp_path):
    for cat in (build_catalog(3, 3, 3, 64), build_catalog(4, 4, 2, 144, fill=True)):
        text = cat.to_text()
        back = PatchCatalog.from_text(text)
        assert back == cat
        assert back.to_text() == text
    path = tmp_path / "c.txt"
    cat.save(path)
    assert PatchCatalog.load(path) == cat


def test_catalog_text_format():
    lines = build_catalog(2, 2, 1, 1).to_text().splitlines()
    assert lines == ["catalog m=2 n=2 k_max=1 count=1", "0; 1; (0,0)"]


def test_max_complete_k():
    assert max_complete_k(3, 3, 16) == 2
    assert max_complete_k(3, 3, 64) == 3
    assert max_complete_k(3, 3, 169) == 4
    assert max_complete_k(4, 4, 24) == 1
