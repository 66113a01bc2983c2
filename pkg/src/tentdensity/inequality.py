"""The product inequality  prod y_i <= (k!/k^k) y_k^k  under superadditivity.

The constraints are ``y_a + y_b <= y_{a+b}`` for ``a in 1..t`` and
``a + b <= k``. Three independent routes are provided:

* :func:`chain_bound` and :func:`product_bound` replay the certificate
  argument in exact rational arithmetic;
* :func:`random_feasible_y` feeds them random feasible rational vectors;
* :func:`optimize_product` maximizes ``sum log y_i`` numerically with a
  log-barrier Newton method, independent of any certificate.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from .partition import PartitionCertificate
from .threshold import t_of_k

Number = Union[int, Fraction, float]

FLOOR = 1e-12


@dataclass(frozen=True)
class YVector:
    """Nonnegative ``y_1..y_k``; ``values[i-1]`` is ``y_i``."""

    values: tuple

    def __post_init__(self):
        vals = tuple(v if isinstance(v, float) else Fraction(v) for v in self.values)
        if not vals:
            raise ValueError("empty y vector")
        if any(v < 0 for v in vals):
            raise ValueError(f"y must be nonnegative: {vals}")
        object.__setattr__(self, "values", vals)

    @property
    def k(self) -> int:
        return len(self.values)

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.values)

    def scaled(self, factor: Number) -> YVector:
        return YVector(tuple(factor * v for v in self.values))

    @classmethod
    def parse(cls, text: str) -> YVector:
        """Parse comma-separated rationals such as ``"1/4,1/2,3/4,1"``."""
        return cls(tuple(Fraction(s.strip()) for s in text.split(",")))


@dataclass(frozen=True)
class ConstraintSystem:
    """Pairs ``(a, b)`` with ``a <= b``, ``a <= t`` and ``a + b <= k``."""

    k: int
    t: int
    pairs: tuple[tuple[int, int], ...] = field(init=False)

    def __post_init__(self):
        if self.k < 1 or self.t < 0:
            raise ValueError(f"need k >= 1 and t >= 0, got k={self.k}, t={self.t}")
        pairs = tuple(
            (a, b)
            for a in range(1, min(self.t, self.k) + 1)
            for b in range(a, self.k - a + 1)
        )
        object.__setattr__(self, "pairs", pairs)

    def __contains__(self, pair) -> bool:
        a, b = sorted(pair)
        return 1 <= a <= self.t and a + b <= self.k


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    worst_violation: Number
    worst_pair: tuple[int, int] | None


def is_feasible(y: YVector, sys: ConstraintSystem, slack_tolerance: float = 0.0) -> Feasibility:
    """Check every constraint; exact for rational ``y`` (tolerance ignored)."""
    if y.k != sys.k:
        raise ValueError(f"y has length {y.k}, system has k={sys.k}")
    v = y.values
    worst, where = 0, None
    for a, b in sys.pairs:
        excess = v[a - 1] + v[b - 1] - v[a + b - 1]
        if where is None or excess > worst:
            worst, where = excess, (a, b)
    tol = 0 if y.exact else slack_tolerance
    return Feasibility(where is None or worst <= tol, worst, where)


# -- certificate route ----------------------------------------------------


@dataclass(frozen=True)
class ChainStep:
    small: int
    running: int  # index before merging; the step uses y_small + y_running <= y_{small+running}


@dataclass(frozen=True)
class ChainPlan:
    counts: tuple[int, ...]
    multiplicity: int
    anchor: int
    steps: tuple[ChainStep, ...]


@dataclass
class ChainReport:
    ok: bool
    weighted_sum: Number  # sum_i y_i / i
    y_k: Number
    steps_checked: int
    violations: list[str]


@lru_cache(maxsize=16)
def chain_plans(cert: PartitionCertificate) -> tuple[tuple[ChainPlan, ...], tuple[str, ...]]:
    """Per distinct block, the merge order collapsing it onto index ``k``.

    The anchor is the block's largest element (the only one that may exceed
    ``t``); every other element is merged into the running index one at a
    time, largest first. Returns the plans and any mismatches found, i.e.
    steps that no constraint of ``(k, t)`` justifies.
    """
    sys = ConstraintSystem(cert.k, cert.t)
    plans, mismatches = [], []
    for block, mult in cert.distinct_blocks:
        elems = block.elements()
        if not elems:
            mismatches.append(f"block {block.counts} is empty")
            continue
        anchor, running, steps = elems[0], elems[0], []
        for small in elems[1:]:
            if (small, running) not in sys:
                mismatches.append(
                    f"block {block.counts}: merging {small} into {running} has no constraint"
                )
            steps.append(ChainStep(small, running))
            running += small
        if running != cert.k:
            mismatches.append(f"block {block.counts} collapses to index {running}, not {cert.k}")
        plans.append(ChainPlan(block.counts, mult, anchor, tuple(steps)))
    return tuple(plans), tuple(mismatches)


def _common_scale(values: Sequence[Fraction]) -> tuple[list[int], int]:
    den = math.lcm(*(v.denominator for v in values))
    return [int(v * den) for v in values], den


def chain_bound(y: YVector, cert: PartitionCertificate, slack_tolerance: float = 1e-12) -> ChainReport:
    """Replay the chain inequalities block by block, then the averaging identity.

    For every block ``A`` the chain ``sum_{j in A} y_j <= ... <= y_k`` is
    replayed step by step against ``y``. Then ``sum_i y_i/i`` is computed
    directly and checked to equal ``(1/k!) sum_A sum_{j in A} y_j`` and to
    be at most ``y_k``. Rational input is checked exactly.
    """
    if cert.violations:
        raise ValueError(f"certificate is invalid: {cert.violations[0]}")
    if y.k != cert.k:
        raise ValueError(f"y has length {y.k}, certificate has k={cert.k}")
    sys = ConstraintSystem(cert.k, cert.t)
    feas = is_feasible(y, sys, slack_tolerance)
    if not feas.feasible:
        raise ValueError(f"y violates y_a + y_b <= y_a+b at {feas.worst_pair}")

    k = cert.k
    plans, mismatches = chain_plans(cert)
    violations = list(mismatches)
    if y.exact:
        a, den = _common_scale(y.values)
        tol = 0
    else:
        a, den = list(y.values), 1
        tol = slack_tolerance

    steps_checked = 0
    total = 0  # sum over all k! blocks of the block sum, in units of 1/den
    for plan in plans:
        running_sum = a[plan.anchor - 1]
        for step in plan.steps:
            lhs = a[step.small - 1] + a[step.running - 1]
            rhs = a[step.small + step.running - 1]
            if lhs > rhs + tol:
                violations.append(f"step y_{step.small} + y_{step.running} <= y_{step.small + step.running} fails")
            running_sum += a[step.small - 1]
            steps_checked += 1
        if running_sum > a[k - 1] + tol * (len(plan.steps) + 1):
            violations.append(f"block {plan.counts} sums above y_k")
        total += plan.multiplicity * running_sum

    if y.exact:
        weighted = sum((v / i for i, v in enumerate(y.values, start=1)), Fraction(0))
        averaged = Fraction(total, den * math.factorial(k))
        if weighted != averaged:
            violations.append(f"sum y_i/i = {weighted} but block average is {averaged}")
    else:
        weighted = math.fsum(v / i for i, v in enumerate(y.values, start=1))
        averaged = total / math.factorial(k)
        if not math.isclose(weighted, averaged, rel_tol=1e-9, abs_tol=1e-12):
            violations.append(f"sum y_i/i = {weighted} but block average is {averaged}")
    if weighted > y.values[-1] + tol:
        violations.append(f"sum y_i/i = {weighted} exceeds y_k = {y.values[-1]}")
    return ChainReport(not violations, weighted, y.values[-1], steps_checked, violations)


@dataclass
class ProductReport:
    ok: bool
    product: Number  # prod y_i
    rescaled: Number  # k! prod (y_i / i), equal to the product
    am_gm: Number  # k! ((sum y_i/i) / k)^k
    bound: Number  # (k!/k^k) y_k^k
    failures: list[str]


def product_bound(y: YVector) -> ProductReport:
    """Check ``prod y_i = k! prod(y_i/i) <= k! (mean y_i/i)^k <= (k!/k^k) y_k^k``.

    The last step holds exactly when ``sum y_i/i <= y_k``; a failure there
    is reported, not raised.
    """
    k = y.k
    v = y.values
    fact = math.factorial(k)
    if y.exact:
        prod = math.prod(v, start=Fraction(1))
        rescaled = fact * math.prod((x / i for i, x in enumerate(v, start=1)), start=Fraction(1))
        s = sum((x / i for i, x in enumerate(v, start=1)), Fraction(0))
        am_gm = fact * (s / k) ** k
        bound = Fraction(fact, k**k) * v[-1] ** k

        def le(p, q):
            return p <= q

        def eq(p, q):
            return p == q
    else:
        prod = math.prod(v)
        rescaled = fact * math.prod(x / i for i, x in enumerate(v, start=1))
        s = math.fsum(x / i for i, x in enumerate(v, start=1))
        am_gm = fact * (s / k) ** k
        bound = fact / k**k * v[-1] ** k

        def le(p, q):
            return p <= q * (1 + 1e-12) + 1e-300

        def eq(p, q):
            return math.isclose(p, q, rel_tol=1e-12, abs_tol=1e-300)

    failures = []
    if not eq(prod, rescaled):
        failures.append(f"product {prod} differs from k! prod(y_i/i) = {rescaled}")
    if not le(rescaled, am_gm):
        failures.append(f"AM-GM step fails: {rescaled} > {am_gm}")
    if not le(am_gm, bound):
        failures.append(f"final step fails: {am_gm} > {bound} (sum y_i/i exceeds y_k)")
    return ProductReport(not failures, prod, rescaled, am_gm, bound, failures)


def extremal_point(k: int) -> YVector:
    """``y_i = i/k``, where the bound holds with equality."""
    return YVector(tuple(Fraction(i, k) for i in range(1, k + 1)))


def random_feasible_y(k: int, t: int, rng: random.Random, max_den: int = 12) -> YVector:
    """A random feasible rational vector with ``y_k = 1`` (or all zero).

    Built bottom-up: ``y_1`` is a random rational, and each ``y_n`` is the
    largest lower bound ``y_a + y_b`` forced by constraints with ``a + b = n``
    plus a random nonnegative slack (zero with probability 1/3, so many
    constraints end up tight). The vector is then divided by ``y_k``; the
    constraints are homogeneous so feasibility is preserved.
    """
    sys = ConstraintSystem(k, t)
    by_target: dict[int, list[tuple[int, int]]] = {}
    for a, b in sys.pairs:
        by_target.setdefault(a + b, []).append((a, b))

    def slack():
        if rng.random() < 1 / 3:
            return Fraction(0)
        return Fraction(rng.randint(0, 3 * max_den), rng.randint(1, max_den))

    y = [Fraction(rng.randint(0, 3 * max_den), rng.randint(1, max_den))]
    for n in range(2, k + 1):
        need = max((y[a - 1] + y[b - 1] for a, b in by_target.get(n, ())), default=Fraction(0))
        y.append(need + slack())
    if y[-1] == 0:
        return YVector(tuple(Fraction(0) for _ in range(k)))
    top = y[-1]
    return YVector(tuple(v / top for v in y))


# -- numerical oracle ------------------------------------------------------


@dataclass
class OptimizationResult:
    argmax: tuple[float, ...]  # y_1..y_k with y_k = 1
    value: float  # prod y_i
    status: str  # "optimal" or "unconverged"
    iterations: int
    tolerance_achieved: float  # bound on the relative error of ``value``
    worst_violation: float


def _barrier_system(k: int, t: int):
    """Rows of ``s = G x + h >= 0`` over ``x = (y_1..y_{k-1})`` with ``y_k = 1``."""
    sys = ConstraintSystem(k, t)
    n = k - 1
    G = np.zeros((len(sys.pairs), n))
    h = np.zeros(len(sys.pairs))
    for r, (a, b) in enumerate(sys.pairs):
        G[r, a - 1] -= 1.0
        G[r, b - 1] -= 1.0
        if a + b == k:
            h[r] = 1.0
        else:
            G[r, a + b - 1] += 1.0
    return G, h


def optimize_product(k: int, t: int, tolerance: float = 1e-6, max_iter: int = 1000) -> OptimizationResult:
    """Maximize ``prod y_i`` (as ``sum log y_i``) with ``y_k = 1`` over the constraint polytope.

    Log-barrier path following with damped Newton steps (no line search on
    the objective, whose float noise exceeds the decrement at large tau). The start point is
    ``y_i = (i/k + (i/k)^2) / 2``: the quadratic part makes every constraint
    strictly slack. The barrier weight grows tenfold per outer round until
    the duality gap ``m / tau`` certifies a relative error below
    ``tolerance / 100`` on the product. Pushing further runs into float
    cancellation in the constraint slacks.
    """
    if k < 2 or not 1 <= t <= k // 2:
        raise ValueError(f"need k >= 2 and 1 <= t <= k//2, got k={k}, t={t}")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    G, h = _barrier_system(k, t)
    m = len(h)
    r = np.arange(1, k) / k
    x = (r + r * r) / 2

    target_gap = math.log1p(tolerance / 100)
    tau, iterations, status = 1.0, 0, "optimal"
    while True:
        while True:
            s = G @ x + h
            grad = -tau / x - G.T @ (1 / s)
            hess = np.diag(tau / x**2) + G.T @ (G / (s**2)[:, None])
            dx = -np.linalg.solve(hess, grad)
            decrement = -grad @ dx
            if decrement / 2 <= 1e-9:
                break
            if iterations >= max_iter:
                status = "unconverged"
                break
            iterations += 1
            # damped Newton step for a self-concordant barrier; full step near the centre
            lam = math.sqrt(max(decrement, 0.0))
            alpha = 1.0 if lam < 0.25 else 1.0 / (1.0 + lam)
            while np.any(x + alpha * dx <= FLOOR) or np.any(G @ (x + alpha * dx) + h <= 0):
                alpha *= 0.5
            x = x + alpha * dx
        if status != "optimal" or m / tau <= target_gap:
            break
        tau *= 10.0

    y = tuple(float(v) for v in x) + (1.0,)
    worst = float(max(0.0, -(G @ x + h).min())) if m else 0.0
    return OptimizationResult(
        argmax=y,
        value=float(np.exp(np.log(x).sum())),
        status=status,
        iterations=iterations,
        tolerance_achieved=math.expm1(m / tau),
        worst_violation=worst,
    )


@dataclass
class TightnessReport:
    k: int
    t: int
    applicable: bool
    bound: float  # k!/k^k
    value_at_t: float | None = None
    value_at_t_minus_1: float | None = None
    gap: float | None = None  # value_at_t_minus_1 - k!/k^k
    argmax_at_t_minus_1: tuple[float, ...] | None = None


def tightness_probe(k: int, tolerance: float = 1e-6) -> TightnessReport:
    """Optimize at t(k) and t(k) - 1; a positive gap shows t(k) cannot drop."""
    t = t_of_k(k)
    bound = math.factorial(k) / k**k
    if t < 2:
        return TightnessReport(k, t, False, bound)
    at_t = optimize_product(k, t, tolerance)
    below = optimize_product(k, t - 1, tolerance)
    return TightnessReport(
        k, t, True, bound, at_t.value, below.value, below.value - bound, below.argmax
    )
