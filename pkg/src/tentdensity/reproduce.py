"""End-to-end run of every finite check, one result per check."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

from .entropy import EdgeDistribution, check_ratio_constraints, density_value, ratio_sequence
from .hypergraph import (
    complete_multipartite,
    corollary_hom_map,
    is_hom_free,
    partitions_of,
    subset_sums,
    tent_family,
    tent_lambda,
    tent_two_part,
)
from .inequality import (
    chain_bound,
    extremal_point,
    optimize_product,
    product_bound,
    random_feasible_y,
    tightness_probe,
)
from .partition import greedy_partition, verify_partition
from .threshold import t_of_k, threshold_table

# reference rows (k, ceil(k/e), t(k)) for 4 <= k <= 19
REFERENCE_TABLE = [
    (4, 2, 2), (5, 2, 2), (6, 3, 2), (7, 3, 3), (8, 3, 3), (9, 4, 3), (10, 4, 4), (11, 5, 4),
    (12, 5, 5), (13, 5, 5), (14, 6, 5), (15, 6, 6), (16, 6, 6), (17, 7, 6), (18, 7, 7), (19, 7, 7),
]


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str

    def as_dict(self) -> dict:
        return {"check": self.name, "ok": self.ok, "detail": self.detail}


def check_table() -> CheckResult:
    rows = threshold_table(4, 19)
    got = [(r.k, r.ceil_k_over_e, r.t) for r in rows]
    strict = [r.k for r in rows if r.strict]
    ok = got == REFERENCE_TABLE and strict == [6, 9, 11, 14, 17]
    return CheckResult("table", ok, f"strict rows at k = {strict}")


def check_threshold_bound(k_max: int = 10**4) -> CheckResult:
    bad = [r.k for r in threshold_table(2, k_max) if r.t > r.ceil_k_over_e]
    return CheckResult("threshold-bound", not bad, f"k in [2, {k_max}], violations: {bad[:5]}")


def check_partitions(k_max: int = 9) -> CheckResult:
    failures = []
    for k in range(2, k_max + 1):
        problems = verify_partition(greedy_partition(k))
        if problems:
            failures.append(f"k={k}: {problems[0]}")
    return CheckResult("partition", not failures, "; ".join(failures) or f"k in [2, {k_max}] verified")


def check_inequality(k_max: int = 9, samples: int = 10**4, seed: int = 0) -> CheckResult:
    rng = random.Random(seed)
    failures = []
    for k in range(2, k_max + 1):
        cert = greedy_partition(k)
        y = extremal_point(k)
        prod = product_bound(y)
        if prod.product != Fraction(math.factorial(k), k**k) or prod.product != prod.bound:
            failures.append(f"k={k}: extremal point does not attain k!/k^k")
        for _ in range(samples):
            y = random_feasible_y(k, cert.t, rng)
            if not chain_bound(y, cert).ok or not product_bound(y).ok:
                failures.append(f"k={k}: failed on {y.values}")
                break
    detail = "; ".join(failures) or f"{samples} random vectors per k in [2, {k_max}]"
    return CheckResult("inequality-exact", not failures, detail)


def check_optimizer(k_max: int = 9, rel_tol: float = 1e-6) -> CheckResult:
    worst, failures = 0.0, []
    for k in range(2, k_max + 1):
        bound = math.factorial(k) / k**k
        res = optimize_product(k, t_of_k(k), rel_tol)
        err = abs(res.value / bound - 1)
        worst = max(worst, err)
        if res.status != "optimal" or err > rel_tol:
            failures.append(f"k={k}: value {res.value} ({res.status})")
    return CheckResult("optimizer", not failures, "; ".join(failures) or f"max relative error {worst:.2e}")


def check_tightness(k_max: int = 9, rel_gap: float = 1e-3) -> CheckResult:
    gaps, failures = [], []
    for k in range(4, k_max + 1):
        rep = tightness_probe(k)
        if not rep.applicable:
            continue
        gaps.append(f"k={k}: {rep.gap / rep.bound:.3g}")
        if rep.gap / rep.bound < rel_gap:
            failures.append(f"k={k}")
    return CheckResult("tightness", not failures, "relative gaps " + ", ".join(gaps))


def check_entropy(k_max: int = 5, size_max: int = 3, tol: float = 1e-9) -> CheckResult:
    failures = []
    for k in range(2, k_max + 1):
        target = math.factorial(k) / k**k
        for m in range(1, size_max + 1):
            dist = EdgeDistribution.uniform(complete_multipartite(k, [m] * k))
            seq = ratio_sequence(dist)
            if abs(density_value(dist) - target) > tol:
                failures.append(f"k={k}, m={m}: density")
            if any(abs(x - i / k) > tol for i, x in enumerate(seq.values, start=1)):
                failures.append(f"k={k}, m={m}: ratio sequence")
            if not check_ratio_constraints(dist, k // 2).ok:
                failures.append(f"k={k}, m={m}: ratio constraints")
    return CheckResult("entropy", not failures, "; ".join(failures) or f"k <= {k_max}, part size <= {size_max}")


def corollary_cases(k_max: int = 9) -> Iterator[tuple]:
    """Every (lambda, i) with at least two parts and i in the subset sums and 1..t(k)."""
    for k in range(2, k_max + 1):
        t = t_of_k(k)
        for lam in partitions_of(k):
            if len(lam) < 2:
                continue
            for i in sorted(subset_sums(lam) & set(range(1, t + 1))):
                yield lam, i


def check_homomorphisms(k_max_free: int = 4, size_max: int = 3, k_max_cor: int = 9) -> CheckResult:
    failures, hosts = [], 0
    for k in range(2, k_max_free + 1):
        family = tent_family(k, k // 2)
        for sizes in itertools.product(range(1, size_max + 1), repeat=k):
            hosts += 1
            if not is_hom_free(complete_multipartite(k, sizes), family):
                failures.append(f"hom into complete {k}-partite {sizes}")
    maps = 0
    for lam, i in corollary_cases(k_max_cor):
        hom = corollary_hom_map(lam, i)
        if not hom.is_valid(tent_lambda(lam), tent_two_part(lam.k, i)):
            failures.append(f"corollary map {lam}, i={i}")
        maps += 1
    detail = "; ".join(failures) or f"{hosts} hosts hom-free, {maps} corollary maps validated"
    return CheckResult("homomorphisms", not failures, detail)


def run_all(samples: int = 10**4, seed: int = 0, k_max: int = 9) -> Iterator[CheckResult]:
    checks: list[Callable[[], CheckResult]] = [
        check_table,
        check_threshold_bound,
        lambda: check_partitions(k_max),
        lambda: check_inequality(k_max, samples, seed),
        lambda: check_optimizer(k_max),
        lambda: check_tightness(k_max),
        check_entropy,
        check_homomorphisms,
    ]
    for check in checks:
        yield check()
