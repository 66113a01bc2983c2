import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize

from tentdensity.inequality import (
    ConstraintSystem,
    YVector,
    chain_bound,
    chain_plans,
    extremal_point,
    is_feasible,
    optimize_product,
    product_bound,
    random_feasible_y,
    tightness_probe,
)
from tentdensity.partition import PartitionCertificate, greedy_partition
from tentdensity.threshold import t_of_k

A4 = (3 - math.sqrt(3)) / 6
CLOSED_FORM_4 = A4 * (1 - 2 * A4) * (1 - A4)


def brute_pairs(k, t):
    """Every (i, j) with i in 1..t and i + j <= k, folded to i <= j."""
    out = set()
    for i in range(1, t + 1):
        for j in range(1, k - i + 1):
            out.add((min(i, j), max(i, j)))
    return out


def slsqp_max(k, t):
    """Independent numerical oracle via scipy."""
    sys = ConstraintSystem(k, t)

    def y_of(x):
        return np.append(x, 1.0)

    cons = [
        {"type": "ineq", "fun": (lambda x, a=a, b=b: y_of(x)[a + b - 1] - y_of(x)[a - 1] - y_of(x)[b - 1])}
        for a, b in sys.pairs
    ]
    x0 = np.arange(1, k) / k
    res = minimize(
        lambda x: -np.sum(np.log(np.maximum(x, 1e-12))),
        x0,
        method="SLSQP",
        constraints=cons,
        bounds=[(1e-9, 1.0)] * (k - 1),
        options={"ftol": 1e-14, "maxiter": 1000},
    )
    return float(np.prod(res.x))


# -- constraint system ------------------------------------------------------


@pytest.mark.parametrize("k", range(1, 12))
def test_constraint_pairs_match_definition(k):
    for t in range(0, k + 1):
        pairs = ConstraintSystem(k, t).pairs
        assert len(pairs) == len(set(pairs))
        assert set(pairs) == brute_pairs(k, t)


def test_constraint_membership():
    sys = ConstraintSystem(6, 2)
    assert (1, 5) in sys and (2, 4) in sys and (3, 3) not in sys
    assert (4, 2) in sys  # order does not matter
    assert len(ConstraintSystem(5, 0).pairs) == 0


@pytest.mark.parametrize("k", range(2, 8))
def test_extremal_point_is_feasible_and_tight(k):
    y = extremal_point(k)
    for t in range(0, k // 2 + 1):
        feas = is_feasible(y, ConstraintSystem(k, t))
        assert feas.feasible
        if t:
            assert feas.worst_violation == 0


def test_zero_vector_feasible():
    assert is_feasible(YVector((0,) * 5), ConstraintSystem(5, 2)).feasible


def test_infeasible_example():
    feas = is_feasible(YVector((0.3, 0.5, 0.75, 1.0)), ConstraintSystem(4, 2))
    assert not feas.feasible
    # y_1 + y_2 > y_3 by 0.05, and y_1 + y_1 > y_2 by 0.1
    assert feas.worst_pair == (1, 1)
    assert feas.worst_violation == pytest.approx(0.1)


def test_exact_check_ignores_tolerance():
    y = YVector((Fraction(1, 4) + Fraction(1, 10**30), Fraction(1, 2), Fraction(3, 4), 1))
    assert not is_feasible(y, ConstraintSystem(4, 2), slack_tolerance=1e-6).feasible
    yf = YVector((0.25 + 1e-15, 0.5, 0.75, 1.0))
    assert is_feasible(yf, ConstraintSystem(4, 2), slack_tolerance=1e-12).feasible


def test_length_mismatch_rejected():
    with pytest.raises(ValueError):
        is_feasible(YVector((1, 2)), ConstraintSystem(3, 1))


def test_yvector_validation_and_parse():
    with pytest.raises(ValueError):
        YVector((Fraction(-1, 2), 1))
    assert YVector.parse("1/4, 1/2,3/4,1").values == extremal_point(4).values


# -- certificate route ------------------------------------------------------


@pytest.mark.parametrize("k", range(2, 10))
def test_extremal_point_gives_equality(k):
    y = extremal_point(k)
    rep = chain_bound(y, greedy_partition(k))
    assert rep.ok and rep.weighted_sum == 1 == rep.y_k
    prod = product_bound(y)
    assert prod.ok
    assert prod.product == Fraction(math.factorial(k), k**k) == prod.bound == prod.am_gm


def test_chain_bound_examples():
    cert = greedy_partition(4)
    rep = chain_bound(YVector.parse("1/8,1/2,3/4,1"), cert)
    assert rep.ok and rep.weighted_sum == Fraction(7, 8)
    rep = chain_bound(YVector.parse("0,0,0,1"), cert)
    assert rep.ok and rep.weighted_sum == Fraction(1, 4)
    assert rep.steps_checked > 0


def test_product_bound_examples():
    assert product_bound(extremal_point(4)).product == Fraction(3, 32)
    assert product_bound(YVector.parse("1/3,2/3,1")).product == Fraction(2, 9)
    rep = product_bound(YVector.parse("0,1/2,1"))
    assert rep.ok and rep.product == 0


def test_product_bound_reports_final_step_failure():
    # infeasible: sum y_i / i = 1 + 1/2 > 1
    rep = product_bound(YVector.parse("1,1"))
    assert not rep.ok
    assert any("final step" in f for f in rep.failures)


def test_chain_bound_rejects_infeasible_y():
    with pytest.raises(ValueError):
        chain_bound(YVector((0.3, 0.5, 0.75, 1.0)), greedy_partition(4))


def test_chain_bound_rejects_invalid_certificate():
    cert = greedy_partition(4)
    bad = PartitionCertificate(4, 2, cert.m, cert.N, cert.blocks[:-1])
    with pytest.raises(ValueError):
        chain_bound(extremal_point(4), bad)


def test_chain_plan_mismatch_is_reported():
    # a block {2, 2} under t = 1: merging 2 into 2 has no constraint
    cert = PartitionCertificate(4, 1, 0, 0, np.array([[0, 2, 0, 0]]))
    plans, mismatches = chain_plans(cert)
    assert len(plans) == 1
    assert any("merging 2 into 2" in m for m in mismatches)


def test_chain_plans_for_greedy_have_no_mismatch():
    for k in range(2, 10):
        plans, mismatches = chain_plans(greedy_partition(k))
        assert mismatches == ()
        assert sum(p.multiplicity for p in plans) == math.factorial(k)


def test_float_input_is_checked_with_tolerance():
    y = YVector(tuple(float(i) / 5 for i in range(1, 6)))
    rep = chain_bound(y, greedy_partition(5))
    assert rep.ok and rep.weighted_sum == pytest.approx(1.0)


@pytest.mark.parametrize("k", range(2, 10))
def test_random_vectors_pass_exactly(k):
    rng = random.Random(1000 + k)
    cert = greedy_partition(k)
    t = t_of_k(k)
    for _ in range(300):
        y = random_feasible_y(k, t, rng)
        assert y.exact
        assert chain_bound(y, cert).ok
        assert product_bound(y).ok


def test_sampler_is_feasible_and_reproducible():
    for k in range(2, 10):
        t = t_of_k(k)
        a = [random_feasible_y(k, t, random.Random(5)) for _ in range(3)]
        b = [random_feasible_y(k, t, random.Random(5)) for _ in range(3)]
        assert a == b
        for y in a:
            assert is_feasible(y, ConstraintSystem(k, t)).feasible
            assert y.values[-1] in (0, 1)


def test_sampler_hits_tight_constraints():
    rng = random.Random(0)
    tight = 0
    for _ in range(200):
        y = random_feasible_y(6, 2, rng)
        tight += is_feasible(y, ConstraintSystem(6, 2)).worst_violation == 0
    assert tight > 20


@settings(max_examples=50, deadline=None)
@given(
    st.integers(2, 7),
    st.integers(0, 2**32 - 1),
    st.fractions(min_value=Fraction(1, 1000), max_value=1000),
)
def test_scale_covariance(k, seed, lam):
    t = t_of_k(k)
    y = random_feasible_y(k, t, random.Random(seed))
    z = y.scaled(lam)
    assert is_feasible(z, ConstraintSystem(k, t)).feasible
    py, pz = product_bound(y), product_bound(z)
    assert pz.product == lam**k * py.product
    assert pz.ok == py.ok


# -- numerical oracle -------------------------------------------------------


def test_optimize_4_2():
    res = optimize_product(4, 2)
    assert res.status == "optimal"
    assert res.value == pytest.approx(3 / 32, rel=1e-6)
    assert np.allclose(res.argmax, (0.25, 0.5, 0.75, 1.0), atol=1e-4)


def test_optimize_4_1_closed_form():
    res = optimize_product(4, 1)
    assert res.value == pytest.approx(CLOSED_FORM_4, rel=1e-6)
    assert np.allclose(res.argmax, (A4, 1 - 2 * A4, 1 - A4, 1.0), atol=1e-4)


def test_optimize_2_1():
    res = optimize_product(2, 1)
    assert res.value == pytest.approx(0.5, rel=1e-6)
    assert np.allclose(res.argmax, (0.5, 1.0), atol=1e-4)


@pytest.mark.parametrize("k", range(2, 10))
def test_optimum_matches_bound_and_certified_lower_bound(k):
    res = optimize_product(k, t_of_k(k))
    bound = math.factorial(k) / k**k
    assert res.status == "optimal"
    assert res.worst_violation <= 1e-12
    # the barrier iterate is interior, so it can trail the optimum by the certified gap
    assert res.value * (1 + res.tolerance_achieved) >= bound * (1 - 1e-12)
    assert res.value == pytest.approx(bound, rel=1e-6)
    assert res.tolerance_achieved <= 1e-6


@pytest.mark.filterwarnings("ignore:Values in x were outside bounds")
@pytest.mark.parametrize("k", range(3, 9))
def test_optimizer_agrees_with_scipy(k):
    for t in range(1, k // 2 + 1):
        ours = optimize_product(k, t).value
        assert ours >= slsqp_max(k, t) * (1 - 1e-6)
        assert ours == pytest.approx(slsqp_max(k, t), rel=1e-5)


@pytest.mark.parametrize("k", range(2, 10))
def test_value_nonincreasing_in_t(k):
    values = [optimize_product(k, t).value for t in range(1, k // 2 + 1)]
    for a, b in zip(values, values[1:]):
        assert b <= a * (1 + 1e-8)


def test_iteration_cap_reports_unconverged():
    res = optimize_product(6, 2, max_iter=1)
    assert res.status == "unconverged"
    assert res.iterations == 1


def test_optimizer_rejects_bad_arguments():
    with pytest.raises(ValueError):
        optimize_product(4, 3)
    with pytest.raises(ValueError):
        optimize_product(4, 0)
    with pytest.raises(ValueError):
        optimize_product(4, 2, tolerance=0)


def test_optimizer_is_deterministic():
    assert optimize_product(7, 3).argmax == optimize_product(7, 3).argmax


def test_tightness_k4():
    rep = tightness_probe(4)
    assert rep.applicable and rep.t == 2
    assert rep.value_at_t_minus_1 == pytest.approx(CLOSED_FORM_4, rel=1e-6)
    assert rep.gap == pytest.approx(CLOSED_FORM_4 - 3 / 32, rel=1e-4)
    assert rep.gap == pytest.approx(0.00248, abs=1e-5)


@pytest.mark.parametrize("k", [2, 3])
def test_tightness_not_applicable(k):
    rep = tightness_probe(k)
    assert not rep.applicable and rep.gap is None


def test_tightness_k7_regression():
    rep = tightness_probe(7)
    assert rep.t == 3 and rep.gap > 0
    assert rep.gap == pytest.approx(0.000294104, rel=1e-4)
