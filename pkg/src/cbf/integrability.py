"""Numerical integrability probe for plane curve germs.

Decides numerically whether ``|f|^{-2c}`` is integrable on the unit bidisc for

    f(x, y) = x**qx * y**py * (y**p - x**q)**e        (e in {0, 1})

which covers the node ``xy``, the cusp ``y^2 - x^3``, the tacnode
``y(y - x^2)`` and the triple point ``y(y^2 - x^2)``.  Nothing here knows the
log canonical threshold: the answer comes from watching the mass of shells
around the origin as the truncation is pushed deeper.

The phase integrals are done in closed form: averaging over the relative
phase gives

    (1/2pi) int |a - b e^{i phi}|^{-2c} dphi = M^{-2c} 2F1(c, c; 1; (m/M)^2)

with ``M = max(a, b)``, ``m = min(a, b)``.  What remains is a 2-D integral in
the log-radii ``u = -log|x|``, ``v = -log|y|``, done with composite
Gauss-Legendre panels graded geometrically toward the line ``|y|^p = |x|^q``
where the phase average has an integrable power singularity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError


@dataclass(frozen=True)
class PlaneCurveGerm:
    qx: int = 0
    py: int = 0
    p: int = 1
    q: int = 1
    e: int = 1
    label: str = ""


GERMS = {
    "node": PlaneCurveGerm(qx=1, py=1, e=0, label="xy"),
    "cusp": PlaneCurveGerm(p=2, q=3, label="y^2 - x^3"),
    "tacnode": PlaneCurveGerm(py=1, p=1, q=2, label="y(y - x^2)"),
    "triple_point": PlaneCurveGerm(py=1, p=2, q=2, label="y(y^2 - x^2)"),
}

# local equation of the singular fiber before resolution
KODAIRA_GERMS = {"I_1": "node", "II": "cusp", "III": "tacnode", "IV": "triple_point"}

_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


def phase_average(a, b, c):
    """Mean of ``|a - b e^{i phi}|^{-2c}`` over the circle (a, b > 0)."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return _phase_average_log(np.maximum(np.log(a), np.log(b)), np.abs(np.log(a) - np.log(b)), c)


def _phase_average_log(log_big, gap, c):
    # argument z = exp(-2 gap); near z = 1 use the z -> 1 - z connection formula so
    # the (1 - z)^{1 - 2c} blow-up is evaluated from an accurate 1 - z
    gap = np.asarray(gap, dtype=float)
    z = np.exp(-2.0 * gap)
    out = special.hyp2f1(c, c, 1.0, z)
    near = z > 0.9
    if np.any(near) and abs(2 * c - 1) > 1e-9:
        w = -np.expm1(-2.0 * gap[near])
        g = special.gamma
        t1 = g(1 - 2 * c) / g(1 - c) ** 2 * special.hyp2f1(c, c, 2 * c, w)
        t2 = w ** (1 - 2 * c) * g(2 * c - 1) / g(c) ** 2 * special.hyp2f1(1 - c, 1 - c, 2 - 2 * c, w)
        out = np.array(out, dtype=float)
        out[near] = t1 + t2
    return np.exp(-2 * c * log_big) * out


def _panels(breaks):
    b = np.unique(np.asarray(breaks, dtype=float))
    a, z = b[:-1, None], b[1:, None]
    half = 0.5 * (z - a)
    return (a + half * (_GL_X + 1.0)).ravel(), (half * _GL_W).ravel()


def _breaks(lo, hi, singular=(), grading=36):
    pts = [lo, hi, *np.arange(2.0 * math.ceil(lo / 2.0), hi, 2.0)]
    steps = 2.0 ** -np.arange(grading)
    for s in singular:
        if lo < s < hi:
            pts.append(s)
            pts.extend(x for x in s - steps if x > lo)
            pts.extend(x for x in s + steps if x < hi)
    return pts


def _log_weight(germ, c, u, v):
    # r dr -> e^{-2u} du for each variable, times |x|^{-2c qx} |y|^{-2c py}
    return -2.0 * u - 2.0 * v + 2.0 * c * (germ.qx * u + germ.py * v)


def _inner(germ, c, u, v0, v1):
    v_star = germ.q * u / germ.p if germ.e else None
    v, w = _panels(_breaks(v0, v1, () if v_star is None else (v_star,)))
    vals = np.exp(_log_weight(germ, c, u, v))
    if germ.e:
        log_a, log_b = -germ.p * v, -germ.q * u
        vals = vals * _phase_average_log(np.maximum(log_a, log_b), np.abs(log_a - log_b), c)
    return float(np.dot(w, vals))


def _rect(germ, c, u0, u1, v0, v1):
    if u1 <= u0 or v1 <= v0:
        return 0.0
    kinks = [germ.p * v0 / germ.q, germ.p * v1 / germ.q] if germ.e else []
    u_nodes, u_w = _panels(_breaks(u0, u1) + [k for k in kinks if u0 < k < u1])
    total = sum(wt * _inner(germ, c, u, v0, v1) for u, wt in zip(u_nodes, u_w))
    return 4.0 * math.pi ** 2 * total


def _check_c(c):
    if not 0 < c < 1:
        raise DomainError("c must lie in (0, 1)")


def shell_mass(germ: PlaneCurveGerm, c: float, depth: float, width: float = 2.0) -> float:
    """Mass of ``|f|^{-2c}`` on the shell ``depth - width <= max(u, v) <= depth``."""
    _check_c(c)
    lo = max(depth - width, 0.0)
    return _rect(germ, c, lo, depth, 0.0, depth) + _rect(germ, c, 0.0, lo, lo, depth)


def truncated_integral(germ: PlaneCurveGerm, c: float, depth: float) -> float:
    """Integral over ``max(u, v) <= depth``, i.e. over ``e^{-depth} <= |x|, |y| <= 1``."""
    _check_c(c)
    return _rect(germ, c, 0.0, depth, 0.0, depth)


@dataclass(frozen=True)
class IntegrabilityVerdict:
    c: float
    depth: float
    refined_depth: float
    integral: float
    refined_integral: float
    shell: float
    refined_shell: float

    @property
    def finite(self) -> bool:
        """Shell mass shrinks as the truncation is refined."""
        return bool(self.refined_shell < self.shell)

    @property
    def divergent_trending(self) -> bool:
        return bool(self.refined_shell > self.shell and self.refined_integral > self.integral)


def _germ(germ):
    if isinstance(germ, str):
        return GERMS[KODAIRA_GERMS.get(germ, germ)]
    return germ


def probe(germ, c: float, depth: float = 10.0, refinement: int = 4, width: float = 2.0) -> IntegrabilityVerdict:
    """Compare the truncated integral and outermost shell at ``depth`` and ``refinement * depth``."""
    germ = _germ(germ)
    deep = refinement * depth
    return IntegrabilityVerdict(
        c, depth, deep,
        truncated_integral(germ, c, depth),
        truncated_integral(germ, c, deep),
        shell_mass(germ, c, depth, width),
        shell_mass(germ, c, deep, width),
    )


def numerical_lct(germ, lo: float = 0.05, hi: float = 0.99, steps: int = 10, depth: float = 10.0) -> float:
    """Bisection on ``c`` for the integrability threshold; coarse, for cross-checks."""
    germ = _germ(germ)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if shell_mass(germ, mid, 4 * depth) < shell_mass(germ, mid, depth):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
