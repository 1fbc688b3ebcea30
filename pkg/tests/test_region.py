from fractions import Fraction as F

import numpy as np
import pytest

from cbf.errors import ModelError
from cbf.region import AffineForm, eliminate


def form(base, rho, const=0):
    return AffineForm(tuple(F(x) for x in base), tuple(F(x) for x in rho), F(const))


def test_interval():
    # L <= rho <= 0
    region = eliminate([form([1], [-1]), form([0], [1])], 1, 1)
    (lvl,) = region.levels
    assert [f.base for f in lvl.lower] == [(1,)]
    assert region.contains([-2.0], [-1.0])
    assert not region.contains([-2.0], [-3.0])
    assert region.feasible([-1.0])


def test_unbounded():
    with pytest.raises(ModelError):
        eliminate([form([0], [1])], 1, 1)


def test_triangle_nested_bounds():
    # rho1, rho2 <= 0, rho1 + rho2 >= L
    cons = [form([0], [1, 0]), form([0], [0, 1]), form([1], [-1, -1])]
    region = eliminate(cons, 1, 2)
    inner, outer = region.levels
    assert len(inner.lower) == 1 and len(inner.upper) == 1
    assert outer.lower[0].base == (1,) and outer.upper[0].is_constant()
    rng = np.random.default_rng(0)
    for _ in range(200):
        L = [-3.0]
        rho = rng.uniform(-4, 0.5, 2)
        direct = all(c.vector() @ np.concatenate([L, rho, [1.0]]) <= 1e-12 for c in cons)
        assert region.contains(L, rho) == direct


def test_infeasible_base():
    # rho <= 0, rho >= L + 1 : empty when L > -1
    region = eliminate([form([0], [1]), form([1], [-1], 1)], 1, 1)
    assert not region.feasible([-0.5])
    assert region.feasible([-2.0])
