"""Greedy partition of the harmonic multiset into k! blocks of weight k.

The multiset ``T`` holds each value ``v`` in ``1..k`` with multiplicity
``k!/v``. Blocks are count vectors: ``counts[v-1]`` is how many copies of
``v`` the block holds.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ResourceLimitError
from .threshold import t_of_k

DEFAULT_MAX_K = 9
SCHEMA_VERSION = "1"


@dataclass(frozen=True)
class MultisetCounts:
    k: int
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.counts) != self.k:
            raise ValueError(f"need {self.k} counts, got {len(self.counts)}")
        if any(c < 0 for c in self.counts):
            raise ValueError(f"negative multiplicity in {self.counts}")

    @property
    def weight(self) -> int:
        return sum(v * c for v, c in enumerate(self.counts, start=1))

    @property
    def size(self) -> int:
        return sum(self.counts)

    def above(self, t: int) -> int:
        """Number of elements strictly greater than ``t``."""
        return sum(self.counts[t:])

    def elements(self) -> list[int]:
        """Elements in nonincreasing order."""
        return [v for v in range(self.k, 0, -1) for _ in range(self.counts[v - 1])]


def _guard(k: int, allow_large: bool):
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    if k > DEFAULT_MAX_K and not allow_large:
        # k=10 needs ~3.6M blocks (~300 MB), k=11 ~40M blocks (~3.5 GB)
        raise ResourceLimitError(
            f"k={k} exceeds the default guard k <= {DEFAULT_MAX_K}; pass allow_large=True (--allow-large) to override"
        )


def build_T(k: int, allow_large: bool = False) -> MultisetCounts:
    _guard(k, allow_large)
    f = math.factorial(k)
    return MultisetCounts(k, tuple(f // v for v in range(1, k + 1)))


@dataclass(frozen=True, eq=False)
class PartitionCertificate:
    """The k! blocks plus bookkeeping; ``blocks`` has shape ``(k!, k)``."""

    k: int
    t: int
    m: int
    N: int
    blocks: np.ndarray

    def block(self, index: int) -> MultisetCounts:
        return MultisetCounts(self.k, tuple(int(c) for c in self.blocks[index]))

    @cached_property
    def distinct_blocks(self) -> list[tuple[MultisetCounts, int]]:
        """Distinct block shapes with their multiplicities, in a fixed order."""
        rows, mult = np.unique(self.blocks, axis=0, return_counts=True)
        return [(MultisetCounts(self.k, tuple(int(c) for c in r)), int(n)) for r, n in zip(rows, mult)]

    @cached_property
    def violations(self) -> list[str]:
        return verify_partition(self)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "k": self.k,
            "t": self.t,
            "m": self.m,
            "N": self.N,
            "blocks": self.blocks.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> PartitionCertificate:
        k = int(data["k"])
        blocks = np.asarray(data["blocks"], dtype=np.int64)
        if blocks.size == 0:
            blocks = blocks.reshape(0, k)
        return cls(k, int(data["t"]), int(data["m"]), int(data["N"]), blocks)

    @classmethod
    def from_json(cls, text: str) -> PartitionCertificate:
        return cls.from_dict(json.loads(text))


def greedy_partition(k: int, allow_large: bool = False) -> PartitionCertificate:
    """Split ``T`` into k! blocks of weight ``k``, each with at most one element above t(k).

    Elements are processed in nonincreasing order. The ``m`` elements above
    ``t`` are seeded one per block into blocks ``0..m-1``. Every remaining
    element ``z`` goes into the block of least current weight, lowest index
    on ties; that block always has weight at most ``k - z``.
    """
    T = build_T(k, allow_large)
    t = t_of_k(k)
    nblocks = math.factorial(k)
    m = T.above(t)
    N = T.size
    if m > nblocks:
        raise AssertionError(f"{m} large elements do not fit in {nblocks} blocks")

    blocks = np.zeros((nblocks, k), dtype=np.int64)
    weight = [0] * nblocks
    b = 0
    for v in range(k, t, -1):
        for _ in range(T.counts[v - 1]):
            blocks[b, v - 1] = 1
            weight[b] = v
            b += 1

    heap = [(weight[i], i) for i in range(nblocks)]
    heapq.heapify(heap)
    for z in range(t, 0, -1):
        col = blocks[:, z - 1]
        for _ in range(T.counts[z - 1]):
            w, p = heapq.heappop(heap)
            if w > k - z:
                raise AssertionError(f"k={k}: no block has weight <= {k - z} when placing {z}")
            col[p] += 1
            heapq.heappush(heap, (w + z, p))

    blocks.setflags(write=False)
    return PartitionCertificate(k, t, m, N, blocks)


def verify_partition(cert: PartitionCertificate) -> list[str]:
    """Independently check a certificate; an empty list means it is valid.

    ``T``, ``t``, ``m`` and ``N`` are recomputed from ``cert.k`` alone.
    """
    k = cert.k
    if k < 2:
        return [f"k={k} is below 2"]
    T = build_T(k, allow_large=True)
    t = t_of_k(k)
    problems = []
    if cert.t != t:
        problems.append(f"t field is {cert.t}, expected {t}")
    if cert.m != T.above(t):
        problems.append(f"m field is {cert.m}, expected {T.above(t)}")
    if cert.N != T.size:
        problems.append(f"N field is {cert.N}, expected {T.size}")

    blocks = np.asarray(cert.blocks)
    if blocks.ndim != 2 or blocks.shape[1] != k:
        problems.append(f"blocks have shape {blocks.shape}, expected (*, {k})")
        return problems
    expected = math.factorial(k)
    if blocks.shape[0] != expected:
        problems.append(f"{blocks.shape[0]} blocks, expected {expected}")
    negative = np.flatnonzero((blocks < 0).any(axis=1))
    for i in negative[:10]:
        problems.append(f"block {i} has a negative count")

    # exact integer arithmetic; values stay far below int64 range for k <= 11
    values = np.arange(1, k + 1, dtype=np.int64)
    weights = blocks @ values
    for i in np.flatnonzero(weights != k)[:10]:
        problems.append(f"block {i} has weight {int(weights[i])}, expected {k}")
    bad = int((weights != k).sum())
    if bad > 10:
        problems.append(f"... {bad - 10} more weight violations")

    large = blocks[:, t:].sum(axis=1)
    for i in np.flatnonzero(large > 1)[:10]:
        problems.append(f"block {i} has {int(large[i])} elements greater than {t}")

    totals = blocks.sum(axis=0)
    for v in range(1, k + 1):
        if int(totals[v - 1]) != T.counts[v - 1]:
            problems.append(f"value {v} appears {int(totals[v - 1])} times, expected {T.counts[v - 1]}")
    return problems
