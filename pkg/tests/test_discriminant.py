from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cbf.discriminant import (
    discriminant_divisor,
    dominating_rows,
    horizontal_irrelevance_check,
    is_klt_over,
    translated,
    verify_translation_identity,
)
from cbf.divisor import DivisorQ
from cbf.errors import DomainError, ModelError
from cbf.model import FibrationModel
from cbf.verify import random_valid_model

seeds = st.integers(0, 2**32 - 1)


def blowup(a):
    a = F(a)
    return FibrationModel.build([[1], [1]], r={"Hp": a, "E": a - 1}, upstairs_names=["Hp", "E"], base_names=["H"])


def brute_lct(model, i, step=F(1, 1000)):
    """Largest grid value c with r_j + c a_ji <= 1 for every row over column i."""
    rows = [(model.coeff(j), row[i]) for j, row in enumerate(model.exponents)
            if row[i] > 0 and sum(1 for a in row if a) == 1]
    c = F(-2)
    while all(r + (c + step) * a <= 1 for r, a in rows):
        c += step
    return c


def test_blowup_example():
    res = discriminant_divisor(blowup("1/2"))
    assert res.coefficient("H") == F(1, 2)
    assert res.witness["H"] == "Hp"
    assert res.lct["H"] == F(1, 2)


def test_reduced_fiber_and_double_fiber(node, double_fiber):
    assert discriminant_divisor(node).coefficient("z1") == 0
    assert discriminant_divisor(double_fiber).coefficient("z1") == F(1, 2)
    assert brute_lct(double_fiber, 0) == F(1, 2)


def test_negative_coefficients_kept():
    assert discriminant_divisor(blowup("-1/3")).coefficient("H") == F(-1, 3)


def test_invalid_model_raises():
    with pytest.raises(ModelError):
        discriminant_divisor(FibrationModel.build([[1], [0]], r={"w2": 1}))


def test_rows_over_two_divisors_are_ignored():
    # w2 maps into z1 = z2 = 0, which misses the generic points of both divisors
    model = FibrationModel.build([[1, 0], [1, 1], [0, 1]], r={"w2": "1/2"})
    assert discriminant_divisor(model).coefficients.by_name() == {}
    S = DivisorQ.on_base({"z1": 1, "z2": "1/3"})
    assert verify_translation_identity(model, S)


def test_chart_without_dominating_row():
    model = FibrationModel.build([[1, 2], [2, 1]])
    with pytest.raises(ModelError) as err:
        discriminant_divisor(model)
    assert err.value.violations[0].item == "chart"


def test_tie_goes_to_lowest_index(node):
    assert discriminant_divisor(node).witness["z1"] == "w1"


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_matches_brute_force(seed):
    model = random_valid_model(np.random.default_rng(seed), dominated=True)
    res = discriminant_divisor(model)
    for i, name in enumerate(model.base_names):
        b = brute_lct(model, i)
        assert b <= res.lct[name] < b + F(1, 1000)


@settings(max_examples=60)
@given(seeds)
def test_characterizing_inequality(seed):
    model = random_valid_model(np.random.default_rng(seed), dominated=True)
    res = discriminant_divisor(model)
    for i, name in enumerate(model.base_names):
        c = res.coefficient(name)
        over = dominating_rows(model, i)
        for j in over:
            assert model.coeff(j) + model.exponents[j][i] * (1 - c) <= 1
        w = model.upstairs_index(res.witness[name])
        assert model.coeff(w) + model.exponents[w][i] * (1 - c) == 1
        # any smaller coefficient breaks the inequality at the witness
        for eps in (F(1, 10), F(1, 100)):
            assert model.coeff(w) + model.exponents[w][i] * (1 - (c - eps)) > 1


@settings(max_examples=40)
@given(seeds, st.fractions(0, 2, max_denominator=6))
def test_monotone_in_vertical_coefficients(seed, bump):
    model = random_valid_model(np.random.default_rng(seed), dominated=True)
    vertical = [j for j in range(model.size) if model.is_vertical(j)]
    j = vertical[seed % len(vertical)]
    before = discriminant_divisor(model)
    r = dict(model.r)
    r[model.upstairs_names[j]] = model.coeff(j) + bump
    after = discriminant_divisor(model.with_r(r))
    for i, name in enumerate(model.base_names):
        if model.exponents[j][i] > 0:
            assert after.coefficient(name) >= before.coefficient(name)


def test_translation_examples():
    model = blowup("1/2")
    assert verify_translation_identity(model, DivisorQ.on_base({"H": 1}))
    assert discriminant_divisor(translated(model, DivisorQ.on_base({"H": 1}))).coefficient("H") == F(3, 2)
    assert verify_translation_identity(model, DivisorQ.on_base({}))


def test_translation_needs_support_on_B():
    model = FibrationModel.build([[1, 0], [0, 1]], base_divisor=["z1"])
    with pytest.raises(DomainError):
        translated(model, DivisorQ.on_base({"z2": 1}))


@settings(max_examples=20)
@given(seeds, st.lists(st.fractions(-2, 2, max_denominator=9), min_size=2, max_size=2))
def test_translation_random(seed, s):
    model = random_valid_model(np.random.default_rng(seed), dominated=True)
    S = DivisorQ.on_base(dict(zip(model.base_names, s)))
    assert verify_translation_identity(model, S)


def test_klt_over():
    assert is_klt_over(blowup("1/2"), "H")
    boundary = FibrationModel.build([[1], [0]], r={"w1": 1})
    assert discriminant_divisor(boundary).coefficient("z1") == 1
    assert not is_klt_over(boundary, "z1")
    assert is_klt_over(FibrationModel.build([[2], [0]]), "z1")
    with pytest.raises(DomainError):
        is_klt_over(boundary, "nope")


def test_horizontal_examples(double_fiber):
    assert horizontal_irrelevance_check(double_fiber, {"w2": F(1, 2)})
    assert horizontal_irrelevance_check(double_fiber, {"w2": 0})
    with pytest.raises(DomainError):
        horizontal_irrelevance_check(double_fiber, {"w1": F(1, 2)})


@settings(max_examples=50)
@given(seeds, st.fractions(-3, F(9, 10), max_denominator=10))
def test_horizontal_random(seed, target):
    rng = np.random.default_rng(seed)
    model = random_valid_model(rng, dominated=True)
    horiz = [model.upstairs_names[j] for j in range(model.size) if not model.is_vertical(j)]
    if not horiz:
        model = FibrationModel.build([list(r) for r in model.exponents] + [[0] * model.m], r=model.r)
        horiz = [model.upstairs_names[-1]]
    name = horiz[0]
    delta = target - model.coeff(model.upstairs_index(name))
    assert horizontal_irrelevance_check(model, {name: delta})
