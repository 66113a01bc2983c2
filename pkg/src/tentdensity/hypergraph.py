"""Uniform hypergraphs, tents, complete multipartite hosts and homomorphisms.

Vertex labels are ``0..n-1``. Edges are stored as sorted tuples.

Tent labelling (used by :func:`tent_lambda` and relied on by
:func:`corollary_hom_map`): the base edge is ``e = {0..k-1}``, split into
consecutive blocks of sizes ``parts[0], parts[1], ...``; the apex is ``k``;
the pendant vertices of ``e_1, e_2, ...`` follow in increasing blocks
starting at ``k + 1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence

from .errors import DEFAULT_NODE_BUDGET, SearchBudgetExceeded, env_budget


@dataclass(frozen=True)
class Hypergraph:
    """A k-uniform hypergraph on vertices ``0..n-1``."""

    k: int
    n: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.k < 1 or self.n < 1:
            raise ValueError(f"need k >= 1 and n >= 1, got k={self.k}, n={self.n}")
        normalized = tuple(tuple(sorted(e)) for e in self.edges)
        seen = set()
        for e in normalized:
            if len(e) != self.k or len(set(e)) != self.k:
                raise ValueError(f"edge {e} is not a set of {self.k} distinct vertices")
            if e[0] < 0 or e[-1] >= self.n:
                raise ValueError(f"edge {e} has a vertex outside 0..{self.n - 1}")
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
        object.__setattr__(self, "edges", normalized)

    @classmethod
    def from_edges(cls, k: int, n: int, edges: Iterable[Iterable[int]]) -> Hypergraph:
        return cls(k, n, tuple(tuple(e) for e in edges))

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, ...]]:
        return frozenset(self.edges)

    def has_edge(self, vertices: Iterable[int]) -> bool:
        return tuple(sorted(vertices)) in self.edge_set

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for e in self.edges:
            for v in e:
                deg[v] += 1
        return deg

    # -- text format -----------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{self.k} {self.n} {len(self.edges)}"]
        lines.extend(" ".join(map(str, e)) for e in self.edges)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Hypergraph:
        rows = [line.split() for line in text.splitlines() if line.strip()]
        if not rows or len(rows[0]) != 3:
            raise ValueError("first line must be 'k n m'")
        k, n, m = map(int, rows[0])
        if len(rows) - 1 != m:
            raise ValueError(f"header declares {m} edges, found {len(rows) - 1}")
        return cls.from_edges(k, n, ([int(x) for x in row] for row in rows[1:]))


@dataclass(frozen=True)
class IntPartition:
    """A partition of ``k`` into nonincreasing positive parts."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ValueError("partition needs at least one part")
        if any(p < 1 for p in parts):
            raise ValueError(f"parts must be positive: {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"parts must be nonincreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def k(self) -> int:
        return sum(self.parts)

    def __len__(self):
        return len(self.parts)

    def __str__(self):
        return "(" + ",".join(map(str, self.parts)) + ")"

    @classmethod
    def parse(cls, text: str) -> IntPartition:
        """Parse ``"6,2,1"``; parts are sorted into nonincreasing order."""
        return cls(tuple(sorted((int(x) for x in text.split(",")), reverse=True)))


def partitions_of(k: int) -> Iterator[IntPartition]:
    """Yield every partition of ``k``, largest first part first."""

    def rec(remaining, largest):
        if remaining == 0:
            yield ()
            return
        for p in range(min(remaining, largest), 0, -1):
            for rest in rec(remaining - p, p):
                yield (p,) + rest

    for parts in rec(k, k):
        yield IntPartition(parts)


# -- constructors ---------------------------------------------------------


def tent_two_part(k: int, i: int) -> Hypergraph:
    """The (k-i, i)-tent on ``2k-1`` vertices.

    Edges are ``{0..k-1}``, ``{0..i-1} + {k..2k-i-1}`` and
    ``{i..k} + {2k-i..2k-2}``; vertex ``k`` is the apex.
    """
    if k < 2 or not 1 <= i <= k // 2:
        raise ValueError(f"need k >= 2 and 1 <= i <= k//2, got k={k}, i={i}")
    e = range(k)
    e1 = list(range(i)) + list(range(k, 2 * k - i))
    e2 = list(range(i, k + 1)) + list(range(2 * k - i, 2 * k - 1))
    return Hypergraph.from_edges(k, 2 * k - 1, [e, e1, e2])


def tent_family(k: int, s: int) -> list[Hypergraph]:
    """The family of (k-i, i)-tents for ``i = 1..s``."""
    return [tent_two_part(k, i) for i in range(1, s + 1)]


def tent_lambda(lam: IntPartition) -> Hypergraph:
    """The lambda-tent, labelled as described in the module docstring.

    Edge order is ``e, e_1, ..., e_l``. A one-part partition has no tent
    (``e_1`` would have to contain ``e`` and the apex), so it is rejected.
    """
    k, parts = lam.k, lam.parts
    if len(parts) < 2:
        raise ValueError(f"a tent needs at least two parts, got {lam}")
    apex = k
    edges = [list(range(k))]
    start, nxt = 0, k + 1
    for p in parts:
        pendants = list(range(nxt, nxt + k - p - 1))
        nxt += len(pendants)
        edges.append(list(range(start, start + p)) + [apex] + pendants)
        start += p
    return Hypergraph.from_edges(k, nxt, edges)


def complete_multipartite(k: int, part_sizes: Sequence[int]) -> Hypergraph:
    """Complete k-partite k-graph; class ``c`` holds a contiguous vertex block."""
    if len(part_sizes) != k:
        raise ValueError(f"need {k} part sizes, got {len(part_sizes)}")
    if any(s < 1 for s in part_sizes):
        raise ValueError(f"part sizes must be positive: {list(part_sizes)}")
    classes, start = [], 0
    for s in part_sizes:
        classes.append(range(start, start + s))
        start += s
    return Hypergraph.from_edges(k, start, product(*classes))


def subset_sums(lam: IntPartition) -> set[int]:
    sums = {0}
    for p in lam.parts:
        sums |= {s + p for s in sums}
    return sums


# -- homomorphisms --------------------------------------------------------


@dataclass(frozen=True)
class HomMap:
    """A vertex map; ``assignment[v]`` is the image of source vertex ``v``."""

    assignment: tuple[int, ...]

    def __call__(self, v: int) -> int:
        return self.assignment[v]

    def is_valid(self, source: Hypergraph, target: Hypergraph) -> bool:
        return is_homomorphism(self.assignment, source, target)

    def compose(self, then: HomMap) -> HomMap:
        """The map ``v -> then(self(v))``."""
        return HomMap(tuple(then.assignment[w] for w in self.assignment))

    def is_bijective(self, target_n: int) -> bool:
        return len(self.assignment) == target_n and set(self.assignment) == set(range(target_n))

    def to_json(self) -> str:
        return json.dumps(list(self.assignment))

    @classmethod
    def from_json(cls, text: str) -> HomMap:
        return cls(tuple(int(v) for v in json.loads(text)))


def is_homomorphism(assignment: Sequence[int], source: Hypergraph, target: Hypergraph) -> bool:
    """Check that every source edge maps onto a target edge of k distinct vertices."""
    if source.k != target.k or len(assignment) != source.n:
        return False
    if any(not 0 <= w < target.n for w in assignment):
        return False
    for e in source.edges:
        image = {assignment[v] for v in e}
        if len(image) != source.k or not target.has_edge(image):
            return False
    return True


@dataclass
class _Search:
    source: Hypergraph
    target: Hypergraph
    budget: int
    nodes: int = 0
    order: list[int] = field(default_factory=list)
    incident: list[list[tuple[int, ...]]] = field(default_factory=list)
    extensions: dict = field(default_factory=dict)

    def __post_init__(self):
        deg = self.source.degrees()
        self.order = sorted(range(self.source.n), key=lambda v: (-deg[v], v))
        self.incident = [[] for _ in range(self.source.n)]
        for e in self.source.edges:
            for v in e:
                self.incident[v].append(e)
        # partial edge image -> target vertices that can join it inside some target edge
        ext: dict[frozenset, set[int]] = {}
        for e in self.target.edges:
            for r in range(self.target.k):
                for sub in combinations(e, r):
                    ext.setdefault(frozenset(sub), set()).update(w for w in e if w not in sub)
        self.extensions = ext

    def candidates(self, v: int, assign: dict[int, int]) -> list[int]:
        if not self.incident[v]:
            return list(range(self.target.n))
        allowed = None
        for e in self.incident[v]:
            image = frozenset(assign[u] for u in e if u in assign)
            ext = self.extensions.get(image, set())
            allowed = set(ext) if allowed is None else allowed & ext
            if not allowed:
                return []
        return sorted(allowed)

    def run(self) -> HomMap | None:
        assign: dict[int, int] = {}
        if self._extend(0, assign):
            return HomMap(tuple(assign[v] for v in range(self.source.n)))
        return None

    def _extend(self, depth: int, assign: dict[int, int]) -> bool:
        if depth == len(self.order):
            return True
        v = self.order[depth]
        for w in self.candidates(v, assign):
            self.nodes += 1
            if self.nodes > self.budget:
                raise SearchBudgetExceeded(self.budget)
            assign[v] = w
            if self._extend(depth + 1, assign):
                return True
            del assign[v]
        return False


def find_homomorphism(source: Hypergraph, target: Hypergraph, budget: int | None = None) -> HomMap | None:
    """Exhaustive backtracking search for a homomorphism ``source -> target``.

    Source vertices are assigned by degree descending, then label. A vertex
    is only tried on target vertices that extend the partial image of every
    incident edge inside some target edge, in ascending order. Returns the
    first witness found, or ``None``
    when none exists. Raises :class:`SearchBudgetExceeded` if more than
    ``budget`` assignments are tried; that outcome is inconclusive.
    """
    if source.k != target.k:
        raise ValueError(f"uniformity mismatch: {source.k} vs {target.k}")
    if budget is None:
        budget = env_budget(DEFAULT_NODE_BUDGET)
    return _Search(source, target, budget).run()


def is_hom_free(target: Hypergraph, family: Iterable[Hypergraph], budget: int | None = None) -> bool:
    return all(find_homomorphism(f, target, budget) is None for f in family)


def _subset_with_sum(parts: Sequence[int], total: int) -> tuple[int, ...] | None:
    for r in range(1, len(parts) + 1):
        for idx in combinations(range(len(parts)), r):
            if sum(parts[j] for j in idx) == total:
                return idx
    return None


def corollary_hom_map(lam: IntPartition, i: int) -> HomMap:
    """Explicit homomorphism from the lambda-tent into the (k-i, i)-tent.

    Pick the first index set ``A`` (fewest parts, then lexicographic) whose
    parts sum to ``i``. The apex goes to the target apex ``k``; the base
    vertices of the blocks in ``A`` go bijectively onto ``{0..i-1}`` and the
    rest onto ``{i..k-1}``, both in increasing order. Each ``e_j`` is then
    completed onto the target edge it must hit, pendants taking the unused
    target vertices in increasing order.
    """
    k, parts = lam.k, lam.parts
    if not 1 <= i <= k // 2:
        raise ValueError(f"need 1 <= i <= k//2 = {k // 2}, got {i}")
    chosen = _subset_with_sum(parts, i)
    if chosen is None:
        raise ValueError(f"no parts of {lam} sum to {i}")
    source = tent_lambda(lam)
    target = tent_two_part(k, i)
    _, t_small, t_large = target.edges  # t_small meets the base in {0..i-1}

    blocks, start = [], 0
    for p in parts:
        blocks.append(list(range(start, start + p)))
        start += p

    f = [-1] * source.n
    f[k] = k
    low, high = iter(range(i)), iter(range(i, k))
    for j, block in enumerate(blocks):
        for v in block:
            f[v] = next(low) if j in chosen else next(high)

    for j, e_j in enumerate(source.edges[1:]):
        goal = t_small if j in chosen else t_large
        used = {f[v] for v in e_j if f[v] >= 0}
        free = iter(w for w in goal if w not in used)
        for v in e_j:
            if f[v] < 0:
                f[v] = next(free)

    hom = HomMap(tuple(f))
    if not hom.is_valid(source, target):
        raise AssertionError(f"constructed map for {lam}, i={i} is not a homomorphism")
    return hom
