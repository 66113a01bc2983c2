import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from tentdensity.errors import ResourceLimitError
from tentdensity.partition import (
    MultisetCounts,
    PartitionCertificate,
    build_T,
    greedy_partition,
    verify_partition,
)
from tentdensity.threshold import t_of_k


def as_multisets(cert):
    return [Counter(cert.block(i).elements()) for i in range(len(cert.blocks))]


def list_based_check(cert):
    """Element-list verification, independent of the numpy path."""
    k, t = cert.k, t_of_k(cert.k)
    blocks = as_multisets(cert)
    union = Counter()
    for b in blocks:
        union.update(b)
    T = Counter({v: math.factorial(k) // v for v in range(1, k + 1)})
    return (
        len(blocks) == math.factorial(k)
        and union == T
        and all(sum(v * c for v, c in b.items()) == k for b in blocks)
        and all(sum(c for v, c in b.items() if v > t) <= 1 for b in blocks)
    )


def test_build_T_small():
    T = build_T(2)
    assert T.counts == (2, 1) and T.weight == 4
    T = build_T(3)
    assert T.counts == (6, 3, 2) and T.size == 11 and T.weight == 18


def test_build_T_rejects_k1():
    with pytest.raises(ValueError):
        build_T(1)


def test_build_T_guard():
    with pytest.raises(ResourceLimitError):
        build_T(10)
    assert build_T(10, allow_large=True).weight == 10 * math.factorial(10)


@pytest.mark.parametrize("k", range(2, 10))
def test_T_accounting(k):
    T = build_T(k)
    f = math.factorial(k)
    t = t_of_k(k)
    assert T.weight == k * f
    assert Fraction(T.size) == sum(Fraction(f, i) for i in range(1, k + 1))
    m = sum(Fraction(1, i) for i in range(t + 1, k + 1)) * f
    assert m.denominator == 1 and T.above(t) == m
    assert m <= f


def test_greedy_k3_trace():
    cert = greedy_partition(3)
    assert (cert.t, cert.m, cert.N) == (1, 5, 11)
    assert [cert.block(i).elements() for i in range(6)] == [[3], [3], [2, 1], [2, 1], [2, 1], [1, 1, 1]]


def test_greedy_k2_trace():
    cert = greedy_partition(2)
    assert [cert.block(i).elements() for i in range(2)] == [[2], [1, 1]]


def test_greedy_k4():
    cert = greedy_partition(4)
    assert len(cert.blocks) == 24
    assert verify_partition(cert) == []
    for i in range(24):
        b = cert.block(i)
        assert b.weight == 4 and b.above(2) <= 1


@pytest.mark.parametrize("k", range(2, 7))
def test_greedy_passes_list_based_check(k):
    assert list_based_check(greedy_partition(k))


@pytest.mark.parametrize("k", range(2, 10))
def test_greedy_verifies(k):
    assert verify_partition(greedy_partition(k)) == []


def _with_blocks(cert, blocks):
    return PartitionCertificate(cert.k, cert.t, cert.m, cert.N, np.asarray(blocks))


def test_moving_an_element_is_caught():
    cert = greedy_partition(4)
    blocks = cert.blocks.copy()
    src = next(i for i in range(len(blocks)) if blocks[i, 0] > 0)
    dst = 0 if src != 0 else 1
    blocks[src, 0] -= 1
    blocks[dst, 0] += 1
    problems = verify_partition(_with_blocks(cert, blocks))
    assert any(f"block {src} has weight" in p for p in problems)
    assert any(f"block {dst} has weight" in p for p in problems)


def test_moving_a_large_element_breaks_condition_three():
    cert = greedy_partition(4)
    blocks = cert.blocks.copy()
    # blocks 0 and 1 each hold one 4; move one across
    blocks[0, 3] -= 1
    blocks[1, 3] += 1
    problems = verify_partition(_with_blocks(cert, blocks))
    assert any("elements greater than 2" in p for p in problems)


def test_missing_block_is_caught():
    cert = greedy_partition(4)
    problems = verify_partition(_with_blocks(cert, cert.blocks[:-1]))
    assert any("23 blocks, expected 24" in p for p in problems)
    assert any("appears" in p for p in problems)


def test_wrong_metadata_is_caught():
    cert = greedy_partition(5)
    bad = PartitionCertificate(5, cert.t + 1, cert.m, cert.N, cert.blocks)
    assert any("t field" in p for p in verify_partition(bad))
    bad = PartitionCertificate(5, cert.t, cert.m - 1, cert.N + 1, cert.blocks)
    problems = verify_partition(bad)
    assert any("m field" in p for p in problems) and any("N field" in p for p in problems)


def test_json_roundtrip():
    cert = greedy_partition(4)
    data = cert.to_dict()
    assert data["schema_version"] == "1"
    assert set(data) == {"schema_version", "k", "t", "m", "N", "blocks"}
    back = PartitionCertificate.from_json(cert.to_json())
    assert (back.k, back.t, back.m, back.N) == (cert.k, cert.t, cert.m, cert.N)
    assert np.array_equal(back.blocks, cert.blocks)
    assert verify_partition(back) == []


def test_distinct_blocks_cover_all():
    cert = greedy_partition(6)
    shapes = cert.distinct_blocks
    assert sum(mult for _, mult in shapes) == math.factorial(6)
    assert all(b.weight == 6 for b, _ in shapes)


def test_multiset_counts_validation():
    with pytest.raises(ValueError):
        MultisetCounts(3, (1, 2))
    with pytest.raises(ValueError):
        MultisetCounts(2, (1, -1))
