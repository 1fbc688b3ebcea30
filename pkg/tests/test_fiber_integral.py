import math
from fractions import Fraction as F
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cbf.errors import DegenerateRegionError, DomainError, ModelError, NonKltError, QuadratureError
from cbf.fiber_integral import (
    BasePoint,
    FiberIntegralParams,
    c_group_factor,
    evaluate_batch,
    evaluate_monte_carlo,
    evaluate_quadrature,
    reduce,
)
from cbf.model import FibrationModel
from cbf.verify import agreement, image_base_point, random_valid_model

MC = FiberIntegralParams(mc_samples=400_000, seed=11)


def quad(model, t, **kw):
    return evaluate_quadrature(model, t, FiberIntegralParams(**kw)).value


def annulus(z):
    # area of {|z| <= |w| <= 1} in the measure |dw/w|^2
    return 2 * math.pi * math.log(1 / z)


def test_reduce_node(node):
    red, region = reduce(node)
    assert region.v == 1 and red.rates == (0,) and red.base_exponent == (0,)
    assert red.theta_constant == pytest.approx(2 * math.pi)
    (lvl,) = region.levels
    assert lvl.lower[0].base == (1,) and lvl.upper[0].is_constant()


def test_reduce_double_fiber(double_fiber):
    red, region = reduce(double_fiber)
    assert region.v == 0
    assert red.base_exponent == (F(-1, 2),)
    assert red.c_group_constant == pytest.approx(math.pi)
    assert red.jacobian_constant == F(1, 2)


@pytest.mark.parametrize("a", ["1/3", "2/3", "-1/2"])
def test_reduce_vertical_pole(a):
    red, region = reduce(FibrationModel.build([[1], [0]], r={"w1": a}))
    assert region.v == 0 and red.base_exponent == (-F(a),)


def test_non_klt_free_coordinate():
    with pytest.raises(NonKltError):
        reduce(FibrationModel.build([[1], [0]], r={"w2": 1}))
    with pytest.raises(NonKltError):
        c_group_factor(FibrationModel(1, 1, ((1,), (0,)), {"w2": F(3, 2)}))


@pytest.mark.parametrize("r, value", [(0, math.pi), (F(1, 2), 2 * math.pi), (-1, math.pi / 2)])
def test_c_group_factor(r, value):
    assert c_group_factor(FibrationModel.build([[1], [0]], r={"w2": r})) == pytest.approx(value)


def test_node_value(node):
    assert quad(node, 1e-3) == pytest.approx(annulus(1e-3), rel=1e-6)
    assert annulus(1e-3) == pytest.approx(2 * math.pi * 3 * math.log(10))


def test_double_fiber_value(double_fiber):
    # two sheets, each |dw2|^2 / (4|z|) over the unit disc
    assert quad(double_fiber, 1e-2) == pytest.approx(math.pi / (2e-2), rel=1e-10)


def test_flat_family():
    flat = FibrationModel.build([[1], [0]])
    vals = [quad(flat, z) for z in (0.5, 1e-2, 1e-5)]
    assert vals == pytest.approx([math.pi] * 3, rel=1e-12)


def test_product_model():
    model = FibrationModel.build([[1, 0], [0, 1], [0, 1]])
    for z1, z2 in [(0.3, 1e-3), (1e-4, 1e-3), (1e-3, 1e-3)]:
        assert quad(model, (z1, z2)) == pytest.approx(annulus(z2), rel=1e-8)


def test_two_fiber_dimensions():
    # z = w1 w2 w3: the region is a triangle, area log(1/|z|)^2 / 2
    model = FibrationModel.build([[1], [1], [1]])
    for z in (1e-2, 1e-5):
        expected = (2 * math.pi) ** 2 * math.log(1 / z) ** 2 / 2
        assert quad(model, z) == pytest.approx(expected, rel=1e-8)


def test_two_base_divisors_closed_form(two_base):
    # V = 2 pi (|z2|^{-5/4} - 1) / (5/2)
    for z in [(0.3, 0.1), (0.5, 1e-3)]:
        expected = 2 * math.pi * (z[1] ** -1.25 - 1) / 2.5
        assert quad(two_base, z) == pytest.approx(expected, rel=1e-9)


def test_base_point_domain(node):
    for bad in (0.0, 1.0, 1.5, 1j):
        with pytest.raises(DomainError):
            evaluate_quadrature(node, bad)
    with pytest.raises(DomainError):
        evaluate_quadrature(node, (0.1, 0.2))
    # only moduli matter
    assert quad(node, 0.01j) == quad(node, 0.01)
    assert BasePoint((0.1 + 0.1j,)).z == (abs(0.1 + 0.1j),)


def test_empty_region_flag():
    model = FibrationModel.build([[0, 2], [1, 1], [1, 1], [1, 1]])
    res = evaluate_quadrature(model, (0.12, 0.33))  # |w1|^2 = |z2|/|z1| > 1
    assert res.value == 0.0 and "empty_region" in res.flags
    with pytest.raises(DegenerateRegionError):
        evaluate_monte_carlo(model, (0.12, 0.33), FiberIntegralParams(mc_samples=10_000))


def test_subdivision_cap():
    model = FibrationModel.build([[1, 0], [1, 1], [0, 1], [0, 1]], r={"w3": "1/2"})
    with pytest.raises(QuadratureError) as err:
        evaluate_quadrature(model, (0.01, 0.02), FiberIntegralParams(max_depth=1, quad_tolerance=1e-12))
    assert err.value.estimate > 0


def test_params_validation():
    with pytest.raises(DomainError):
        FiberIntegralParams(quad_tolerance=0)
    with pytest.raises(DomainError):
        FiberIntegralParams(mc_samples=-1)


@pytest.mark.parametrize("model_name, z", [("node", 1e-2), ("double_fiber", 1e-2), ("two_base", (0.2, 0.05))])
def test_monte_carlo_agrees(request, model_name, z):
    model = request.getfixturevalue(model_name)
    mc = evaluate_monte_carlo(model, z, MC)
    ok, dev = agreement(quad(model, z), mc)
    assert ok, dev
    assert mc.stderr < 0.02 * mc.value


def test_monte_carlo_deterministic(node):
    assert evaluate_monte_carlo(node, 0.05, MC) == evaluate_monte_carlo(node, 0.05, MC)
    other = FiberIntegralParams(mc_samples=400_000, seed=12)
    assert evaluate_monte_carlo(node, 0.05, other) != evaluate_monte_carlo(node, 0.05, MC)


def test_monte_carlo_uniform_proposal(node):
    uniform = FiberIntegralParams(mc_samples=400_000, seed=3, proposal_power_fiber=1.0, proposal_power_free=1.0)
    ok, _ = agreement(quad(node, 0.2), evaluate_monte_carlo(node, 0.2, uniform))
    assert ok


def test_batch_order_and_seeds(node):
    pts = [0.3, 0.01, 0.1]
    params = FiberIntegralParams(mc_samples=20_000, seed=5)
    out = evaluate_batch(node, pts, params, method="mc", workers=3)
    for i, (t, res) in enumerate(zip(pts, out)):
        direct = evaluate_monte_carlo(node, t, FiberIntegralParams(mc_samples=20_000, seed=5 ^ i))
        assert res == direct
    quads = evaluate_batch(node, pts + [2.0], workers=2)
    assert [q.value for q in quads[:3]] == [quad(node, t) for t in pts]
    assert isinstance(quads[3], DomainError)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_chart_choice_independence(seed):
    rng = np.random.default_rng(seed)
    model = random_valid_model(rng)
    t = image_base_point(model, rng)
    ref = quad(model, t)
    for order in list(permutations(range(model.size)))[1:]:
        assert quad(model.permuted(order), t) == pytest.approx(ref, rel=1e-7)


def test_monotone_in_base_point():
    model = FibrationModel.build([[1], [1], [0]], r={"w1": "1/3", "w2": "1/5"})
    zs = np.geomspace(0.9, 1e-5, 15)
    vals = [quad(model, z) for z in zs]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("r_old, r_new", [(0, F(1, 2)), (F(-1, 2), F(3, 4))])
def test_horizontal_change_is_constant_factor(r_old, r_new):
    base = [[1, 0], [1, 1], [0, 1], [0, 0]]
    m0 = FibrationModel.build(base, r={"w2": "1/3", "w4": r_old})
    m1 = m0.with_r({"w2": "1/3", "w4": r_new})
    factor = (1 - float(r_old)) / (1 - float(r_new))
    for t in [(0.3, 0.2), (0.01, 0.05), (1e-4, 1e-4)]:
        assert quad(m1, t) / quad(m0, t) == pytest.approx(factor, rel=1e-9)
    mc0 = evaluate_monte_carlo(m0, (0.1, 0.2), MC)
    mc1 = evaluate_monte_carlo(m1, (0.1, 0.2), MC)
    assert mc1.value / mc0.value == pytest.approx(factor, rel=0.05)


def test_invalid_model_rejected():
    with pytest.raises(ModelError):
        evaluate_quadrature(FibrationModel.build([[1, 1], [1, 1]]), (0.1, 0.1))
