"""Fiber integrals of singular volume forms over a monomial chart.

For ``z = w^A`` on the closed unit polydisc and ``R = sum r_j {w_j = 0}``,

    V(z) = int_{f^{-1}(z)} prod_j |w_j|^{-2 r_j} |dw|^2 / |f^* dz|^2

Two independent evaluators are provided:

* :func:`evaluate_quadrature` solves the monomial system for an invertible
  block of coordinates, passes the remaining fiber variables in the image of
  f*B to log-polar form and integrates a product of exponentials over a
  polytope, innermost integral in closed form and outer ones by adaptive
  quadrature;
* :func:`evaluate_monte_carlo` samples fiber coordinates directly in the
  polydisc and averages the density there.

Normalization: ``|dw|^2 = prod (i/2) dw ^ dw-bar``, so the unit disc has area
pi.  When the invertible block has ``|det| = d > 1`` the fiber has ``d`` sheets
over each value of the free coordinates, all with the same moduli; both
evaluators count them.
"""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import integrate

from . import _linalg
from .errors import (
    DegenerateRegionError,
    DomainError,
    ModelError,
    NonKltError,
    QuadratureError,
)
from .model import FibrationModel, VariableGroups, Violation, classify_variables, require_valid, validate
from .region import AffineForm, IntegrationRegion, eliminate


@dataclass(frozen=True)
class FiberIntegralParams:
    quad_tolerance: float = 1e-8
    max_depth: int = 200  # subinterval cap for each adaptive quadrature level
    mc_samples: int = 1_000_000
    seed: int = 0
    # Radial importance sampling for Monte Carlo: |w| is drawn with density
    # proportional to |w|^(2*gamma - 2) dA. gamma = 1 is uniform sampling.
    proposal_power_fiber: float = 0.5
    proposal_power_free: float = 0.25
    mc_chunk: int = 200_000

    def __post_init__(self):
        if self.quad_tolerance <= 0 or self.max_depth <= 0 or self.mc_samples <= 0:
            raise DomainError("quadrature tolerance, depth and sample count must be positive")
        if self.quad_tolerance < 1e-13:
            raise DomainError("quad_tolerance below 1e-13 is not attainable in double precision")
        if not (0 < self.proposal_power_fiber <= 1 and 0 < self.proposal_power_free <= 1):
            raise DomainError("proposal powers must lie in (0, 1]")
        if self.seed < 0:
            raise DomainError("seed must be nonnegative")


@dataclass(frozen=True)
class BasePoint:
    z: tuple

    def __post_init__(self):
        mod = tuple(abs(complex(x)) for x in np.atleast_1d(self.z))
        for x in mod:
            if not 0 < x < 1:
                raise DomainError(f"base point must lie in the punctured unit polydisc, got |z| = {x}")
        object.__setattr__(self, "z", mod)

    @classmethod
    def of(cls, t, m: int) -> "BasePoint":
        if isinstance(t, BasePoint):
            pt = t
        else:
            arr = np.atleast_1d(np.asarray(t, dtype=complex))
            if arr.size == 1 and m > 1:
                arr = np.repeat(arr, m)
            pt = cls(tuple(arr))
        if len(pt.z) != m:
            raise DomainError(f"base point has {len(pt.z)} coordinates, model has m = {m}")
        return pt

    @property
    def log_moduli(self) -> np.ndarray:
        return np.log(np.asarray(self.z))


@dataclass(frozen=True)
class ReducedIntegrand:
    """``V(z) = K * prod |z_i|^{2 e_i} * int_region prod exp(c_k rho_k) d rho``.

    ``K = theta_constant * c_group_constant * jacobian_constant``.
    """

    rates: tuple  # c_k, Fractions
    base_exponent: tuple  # e_i, Fractions
    jacobian_constant: Fraction  # sheets / det^2 = 1 / |det|
    c_group_constant: float
    theta_constant: float
    groups: VariableGroups

    @property
    def constant(self) -> float:
        return self.theta_constant * self.c_group_constant * float(self.jacobian_constant)


@dataclass
class IntegralEstimate:
    value: float
    abserr: float = 0.0
    region_dim: int = 0
    flags: list = field(default_factory=list)

    def __float__(self):
        return self.value


class MonteCarloEstimate(tuple):
    """``(estimate, stderr)`` with extra diagnostics as attributes."""

    def __new__(cls, value, stderr, accepted, samples):
        self = super().__new__(cls, (value, stderr))
        self.accepted = accepted
        self.samples = samples
        return self

    @property
    def value(self):
        return self[0]

    @property
    def stderr(self):
        return self[1]


def c_group_factor(model: FibrationModel, groups: VariableGroups | None = None) -> float:
    """``prod over free coordinates of pi / (1 - r_k)``: the integral of ``|w|^{-2r}`` over the unit disc."""
    groups = groups or classify_variables(model)
    out = 1.0
    for k in groups.C_group:
        r = model.coeff(k)
        if r >= 1:
            raise NonKltError(f"free coordinate {model.upstairs_names[k]} has coefficient {r} >= 1; "
                              "the fiber integral diverges",
                              [Violation("7", f"horizontal coefficient {r} >= 1")])
        out *= math.pi / float(1 - r)
    return out


def _reduce_uncached(model: FibrationModel):
    problems = validate(model)
    if problems and all(v.item == "7" for v in problems):
        raise NonKltError("; ".join(map(str, problems)) + "; the fiber integral diverges", problems)
    require_valid(model)
    groups = classify_variables(model)
    S, Bg = groups.A_group, groups.B_group
    m, v = model.m, groups.v
    A = model.exponents
    A_S_T = [[Fraction(A[s][i]) for s in S] for i in range(m)]
    det = _linalg.det(A_S_T)
    M = _linalg.inverse(A_S_T)  # x_S = M (L - A_B^T rho)
    Mt = _linalg.transpose(M)
    g = [2 - 2 * model.coeff(s) for s in S]
    Mtg = _linalg.matvec(Mt, g)
    base_exponent = tuple((Mtg[i] - 2) / 2 for i in range(m))
    rates = tuple(2 - 2 * model.coeff(b) - sum((Mtg[i] * A[b][i] for i in range(m)), Fraction(0))
                  for b in Bg)
    cgroup = c_group_factor(model, groups)

    # |w_S| <= 1 and rho <= 0
    MAB = [[sum((M[s][i] * A[b][i] for i in range(m)), Fraction(0)) for b in Bg] for s in range(m)]
    zeros_m = (Fraction(0),) * m
    cons = []
    for s in range(m):
        cons.append(AffineForm(tuple(M[s]), tuple(-x for x in MAB[s])))
    for k in range(v):
        cons.append(AffineForm(zeros_m, tuple(Fraction(int(k == kk)) for kk in range(v))))
    region = eliminate(cons, m, v)

    red = ReducedIntegrand(rates, base_exponent, Fraction(1) / abs(det), cgroup, (2 * math.pi) ** v, groups)
    return red, region


_CACHE: dict = {}


def reduce(model: FibrationModel) -> tuple[ReducedIntegrand, IntegrationRegion]:
    key = model.dumps()
    if key not in _CACHE:
        _CACHE[key] = _reduce_uncached(model)
    return _CACHE[key]


# -- quadrature -------------------------------------------------------------------


class _Nested:
    """Nested integration of prod exp(c_k rho_k) over a region for fixed log-moduli."""

    def __init__(self, red: ReducedIntegrand, region: IntegrationRegion, L, params: FiberIntegralParams):
        self.c = [float(x) for x in red.rates]
        self.L = np.asarray(L, float)
        self.v = region.v
        self.params = params
        self.abserr = 0.0
        self.capped = False
        m = region.m
        self.lower, self.upper = [], []
        for lev in region.levels:
            lo = np.array([f.vector() for f in lev.lower])
            up = np.array([f.vector() for f in lev.upper])
            # split columns into (base-L part + const) and rho part
            self.lower.append((lo[:, :m] @ self.L + lo[:, -1], lo[:, m:-1]))
            self.upper.append((up[:, :m] @ self.L + up[:, -1], up[:, m:-1]))

    def _bounds(self, j, rho):
        a, b = self.lower[j]
        lo = np.max(a + b @ rho)
        a, b = self.upper[j]
        hi = np.min(a + b @ rho)
        return lo, hi

    def _breakpoints(self, j, rho, lo, hi):
        # where two bounds of level j-1 cross, as functions of rho_j
        offs, slopes = [], []
        for a, b in (self.lower[j - 1], self.upper[j - 1]):
            rest = rho.copy()
            rest[j] = 0.0
            offs.append(a + b @ rest)
            slopes.append(b[:, j])
        off, slope = np.concatenate(offs), np.concatenate(slopes)
        pts = []
        for p in range(len(off)):
            for q in range(p + 1, len(off)):
                ds = slope[p] - slope[q]
                if ds != 0:
                    x = (off[q] - off[p]) / ds
                    if lo < x < hi:
                        pts.append(x)
        return sorted(set(pts))

    def level(self, j, rho):
        lo, hi = self._bounds(j, rho)
        if not hi > lo:
            return 0.0
        c = self.c[j]
        if j == 0:
            if c == 0.0:
                return hi - lo
            return math.exp(c * lo) * math.expm1(c * (hi - lo)) / c

        def f(x):
            rho[j] = x
            return math.exp(c * x) * self.level(j - 1, rho)

        pts = self._breakpoints(j, rho, lo, hi)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            res = integrate.quad(f, lo, hi, points=pts or None, epsabs=0.0,
                                 epsrel=self.params.quad_tolerance, limit=self.params.max_depth,
                                 full_output=1)
        val, err = res[0], res[1]
        ier = res[3] if len(res) > 3 and isinstance(res[3], str) else None
        if ier is not None and "maximum number of subdivisions" in ier:
            self.capped = True
        self.abserr += err
        return val

    def run(self):
        if self.v == 0:
            return 1.0
        rho = np.zeros(self.v)
        return self.level(self.v - 1, rho)


def evaluate_quadrature(model: FibrationModel, t, params: FiberIntegralParams | None = None) -> IntegralEstimate:
    params = params or FiberIntegralParams()
    red, region = reduce(model)
    pt = BasePoint.of(t, model.m)
    L = pt.log_moduli
    prefactor = red.constant * math.exp(2.0 * sum(float(e) * x for e, x in zip(red.base_exponent, L)))
    if not region.feasible(L):
        return IntegralEstimate(0.0, 0.0, region.v, ["empty_region"])
    nested = _Nested(red, region, L, params)
    core = nested.run()
    value = float(prefactor * core)
    abserr = prefactor * nested.abserr
    if nested.capped:
        raise QuadratureError(f"subdivision cap {params.max_depth} reached at z = {pt.z}", value)
    flags = []
    if core <= 0.0:
        flags.append("empty_region")
    elif abserr > params.quad_tolerance * abs(value) * 10:
        flags.append("tolerance_not_met")
    return IntegralEstimate(value, abserr, region.v, flags)


# -- Monte Carlo ------------------------------------------------------------------


def _sample_radius(rng, gamma, size):
    # P(|w| <= s) = s^(2 gamma) on the unit disc
    u = rng.random(size)
    return u ** (1.0 / (2.0 * gamma))


def evaluate_monte_carlo(model: FibrationModel, t, params: FiberIntegralParams | None = None) -> MonteCarloEstimate:
    """Importance-sampled Monte Carlo in the original coordinates.

    Fiber coordinates are drawn in the unit disc with a radial power law;
    the solved block ``|w_S|`` comes from a floating-point solve of the
    log-moduli system and samples with ``|w_S| > 1`` are rejected.  Returns
    ``(estimate, stderr)``; reproducible for a fixed ``params.seed``.
    """
    params = params or FiberIntegralParams()
    require_valid(model)
    groups = classify_variables(model)
    pt = BasePoint.of(t, model.m)
    L = pt.log_moduli
    A = np.asarray(model.exponents, dtype=float)
    S, Bg, Cg = list(groups.A_group), list(groups.B_group), list(groups.C_group)
    free = Bg + Cg
    A_S_T = A[S].T
    det = np.linalg.det(A_S_T)
    sheets = round(abs(det))
    r = np.array([float(model.coeff(j)) for j in range(model.size)])
    gammas = np.array([params.proposal_power_fiber] * len(Bg) + [params.proposal_power_free] * len(Cg))
    log_dz = 2.0 * L.sum() + math.log(det * det)

    rng = np.random.default_rng(params.seed)
    total = total_sq = 0.0
    accepted = 0
    remaining = params.mc_samples
    while remaining > 0:
        n = min(params.mc_chunk, remaining)
        remaining -= n
        log_free = np.empty((n, len(free)))
        log_pdf = np.zeros(n)
        for k, gam in enumerate(gammas):
            rad = _sample_radius(rng, gam, n)
            log_free[:, k] = np.log(rad)
            log_pdf += math.log(gam / math.pi) + (2 * gam - 2) * log_free[:, k]
        rhs = L[None, :] - log_free[:, : len(Bg)] @ A[Bg] if Bg else np.broadcast_to(L, (n, model.m))
        log_S = np.linalg.solve(A_S_T, rhs.T).T
        ok = np.all(log_S <= 1e-12, axis=1)
        log_all = np.zeros((n, model.size))
        log_all[:, S] = log_S
        log_all[:, free] = log_free
        log_density = -2.0 * log_all @ r + 2.0 * log_S.sum(axis=1) - log_dz
        w = np.where(ok, sheets * np.exp(log_density - log_pdf), 0.0)
        total += w.sum()
        total_sq += (w * w).sum()
        accepted += int(ok.sum())
    N = params.mc_samples
    if accepted == 0:
        raise DegenerateRegionError(f"no admissible samples out of {N} at z = {pt.z}")
    mean = total / N
    var = max(total_sq / N - mean * mean, 0.0)
    return MonteCarloEstimate(float(mean), math.sqrt(var / (N - 1)) if N > 1 else math.inf, accepted, N)


# -- batches ----------------------------------------------------------------------


def default_workers() -> int:
    env = os.environ.get("CBF_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def evaluate_batch(model: FibrationModel, points: Sequence, params: FiberIntegralParams | None = None,
                   method: str = "quad", workers: int | None = None) -> list:
    """Evaluate at many base points; results come back in input order.

    Monte Carlo point ``i`` is seeded with ``params.seed ^ i``.  Errors are
    returned in place of results rather than raised.
    """
    params = params or FiberIntegralParams()
    reduce(model) if method == "quad" else require_valid(model)

    def one(item):
        i, t = item
        try:
            if method == "quad":
                return evaluate_quadrature(model, t, params)
            p = FiberIntegralParams(**{**params.__dict__, "seed": params.seed ^ i})
            return evaluate_monte_carlo(model, t, p)
        except (DomainError, ModelError, QuadratureError, DegenerateRegionError) as exc:
            return exc

    with ThreadPoolExecutor(max_workers=workers or default_workers()) as pool:
        return list(pool.map(one, enumerate(points)))
