"""Entropies of a random edge with uniform ordering on an explicit host.

The random tuple ``(X_1..X_k)`` picks an edge with the given weight and then
a uniformly random ordering of its vertices. Probabilities are kept as exact
integers over a common denominator; only the final ``-p log2 p`` terms are
floating point, summed with :func:`math.fsum`.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import permutations
from typing import Iterable

from .errors import DEFAULT_TUPLE_BUDGET, ResourceLimitError, env_budget
from .hypergraph import Hypergraph
from .inequality import ConstraintSystem, YVector, is_feasible

IDENTITY_TOL = 1e-9


@dataclass(frozen=True)
class EdgeDistribution:
    host: Hypergraph
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        w = tuple(Fraction(x) for x in self.weights)
        if len(w) != len(self.host.edges):
            raise ValueError(f"{len(w)} weights for {len(self.host.edges)} edges")
        if any(x < 0 for x in w):
            raise ValueError("edge weights must be nonnegative")
        if sum(w) != 1:
            raise ValueError(f"edge weights sum to {sum(w)}, not 1")
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, host: Hypergraph) -> EdgeDistribution:
        m = len(host.edges)
        if m == 0:
            raise ValueError("host has no edges")
        return cls(host, (Fraction(1, m),) * m)

    @property
    def k(self) -> int:
        return self.host.k

    @cached_property
    def _tuples(self) -> tuple[list[tuple[tuple[int, ...], int]], int]:
        """Support as ``(ordered tuple, integer mass)`` plus the total mass."""
        support = [(e, w) for e, w in zip(self.host.edges, self.weights) if w]
        budget = env_budget(DEFAULT_TUPLE_BUDGET)
        count = len(support) * math.factorial(self.k)
        if count > budget:
            raise ResourceLimitError(f"{count} ordered tuples exceed the budget of {budget}")
        den = math.lcm(*(w.denominator for _, w in support))
        out = []
        for e, w in support:
            mass = int(w * den)
            out.extend((perm, mass) for perm in permutations(e))
        return out, den * math.factorial(self.k)


def marginal(dist: EdgeDistribution, coords: Iterable[int]) -> dict[tuple[int, ...], Fraction]:
    """Exact law of ``(X_c for c in coords)``; coordinates are 1-based."""
    counts, total = _marginal_counts(dist, coords)
    return {key: Fraction(c, total) for key, c in counts.items()}


def _marginal_counts(dist, coords):
    idx = [c - 1 for c in coords]
    if any(not 0 <= c < dist.k for c in idx):
        raise ValueError(f"coordinates must lie in 1..{dist.k}: {list(coords)}")
    tuples, total = dist._tuples
    counts: dict[tuple[int, ...], int] = defaultdict(int)
    for perm, mass in tuples:
        counts[tuple(perm[c] for c in idx)] += mass
    return counts, total


def joint_entropy(dist: EdgeDistribution, coords: Iterable[int]) -> float:
    """Shannon entropy in bits of the marginal on ``coords`` (1-based)."""
    coords = list(coords)
    if not coords:
        return 0.0
    counts, total = _marginal_counts(dist, coords)
    return math.fsum(-(c / total) * math.log2(c / total) for c in counts.values())


def conditional_entropy(dist: EdgeDistribution, i: int) -> float:
    """``H(X_i | X_{i+1}, ..., X_k)``."""
    k = dist.k
    if not 1 <= i <= k:
        raise ValueError(f"coordinate {i} outside 1..{k}")
    return joint_entropy(dist, range(i, k + 1)) - joint_entropy(dist, range(i + 1, k + 1))


@dataclass(frozen=True)
class RatioSequence:
    values: tuple[float, ...]
    conditional: tuple[float, ...]  # H(X_i | X_{i+1..k})
    marginal: tuple[float, ...]  # H(X_i)
    joint: float  # H(X_1..X_k)

    @property
    def product(self) -> float:
        return math.prod(self.values)


def ratio_sequence(dist: EdgeDistribution) -> RatioSequence:
    k = dist.k
    suffix = [joint_entropy(dist, range(i, k + 1)) for i in range(1, k + 2)]
    cond = tuple(suffix[i - 1] - suffix[i] for i in range(1, k + 1))
    marg = tuple(joint_entropy(dist, [i]) for i in range(1, k + 1))
    values = tuple(2.0 ** (c - h) for c, h in zip(cond, marg))
    seq = RatioSequence(values, cond, marg, suffix[0])
    if abs(values[-1] - 1.0) > IDENTITY_TOL:
        raise AssertionError(f"x_k = {values[-1]}, expected 1")
    density = 2.0 ** (seq.joint - k * marg[0])
    if abs(seq.product - density) > IDENTITY_TOL:
        raise AssertionError(f"prod x_i = {seq.product} but density is {density}")
    return seq


def density_value(dist: EdgeDistribution) -> float:
    """``2 ** (H(X_1..X_k) - k H(X_1))``."""
    k = dist.k
    return 2.0 ** (joint_entropy(dist, range(1, k + 1)) - k * joint_entropy(dist, [1]))


@dataclass
class RatioVerdict:
    ok: bool
    worst_excess: float  # max of x_i + x_j - x_{i+j}; <= tolerance when ok
    worst_pair: tuple[int, int] | None
    sequence: RatioSequence


def check_ratio_constraints(dist: EdgeDistribution, t: int, tolerance: float = IDENTITY_TOL) -> RatioVerdict:
    """Evaluate ``x_i + x_j <= x_{i+j}`` for ``i <= t`` on the ratio sequence.

    The caller is responsible for the host being hom-free from the relevant
    tent family; that is not rechecked here.
    """
    seq = ratio_sequence(dist)
    feas = is_feasible(YVector(seq.values), ConstraintSystem(dist.k, t), tolerance)
    worst = float(feas.worst_violation) if feas.worst_pair else 0.0
    return RatioVerdict(feas.feasible, worst, feas.worst_pair, seq)


def read_weights(text: str, edge_count: int) -> tuple[Fraction, ...]:
    """One rational per nonblank line, in edge order."""
    w = tuple(Fraction(line.strip()) for line in text.splitlines() if line.strip())
    if len(w) != edge_count:
        raise ValueError(f"{len(w)} weights for {edge_count} edges")
    return w

