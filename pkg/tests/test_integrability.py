import math

import mpmath
import pytest

from cbf.errors import DomainError
from cbf.integrability import GERMS, numerical_lct, phase_average, probe, shell_mass, truncated_integral


@pytest.mark.parametrize("a, b, c", [(1.0, 0.3, 0.4), (0.2, 0.9, 0.7), (0.5, 0.49, 0.3), (0.5, 0.4999999, 0.8)])
def test_phase_average_against_quadrature(a, b, c):
    mpmath.mp.dps = 30
    f = lambda t: abs(a - b * mpmath.exp(1j * t)) ** (-2 * c)
    # the peak sits at t = 0; split there and at geometric distances from it
    pts = [0] + [mpmath.mpf(10) ** -k for k in range(12, -1, -1)] + [mpmath.pi]
    ref = float(2 * mpmath.quad(f, pts) / (2 * mpmath.pi))
    assert phase_average(a, b, c) == pytest.approx(ref, rel=1e-6)


def test_node_truncated_integral_closed_form():
    # |xy|^{-2c}: each factor integrates to 2 pi (1 - e^{-2(1-c)D}) / (2(1-c))
    c, D = 0.3, 6.0
    one = 2 * math.pi * (1 - math.exp(-2 * (1 - c) * D)) / (2 * (1 - c))
    assert truncated_integral(GERMS["node"], c, D) == pytest.approx(one ** 2, rel=1e-8)


def test_domain():
    with pytest.raises(DomainError):
        shell_mass(GERMS["cusp"], 1.2, 5.0)


@pytest.mark.parametrize("germ", ["II", "III", "IV"])
def test_far_from_threshold(germ):
    assert probe(germ, 0.3, depth=6).finite
    assert probe(germ, 0.97, depth=6).divergent_trending


@pytest.mark.slow
def test_numerical_lct_of_cusp():
    assert numerical_lct("cusp", steps=7) == pytest.approx(5 / 6, abs=0.02)
