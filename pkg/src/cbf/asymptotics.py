"""Pole exponents of fiber integrals along rays in the base.

Along ``|z_i| = s^{u_i}`` the fiber integral is fitted to

    log V = -2 alpha log s + beta log(-log s) + const

and ``alpha`` is compared with the pairing of the discriminant divisor with
the monomial valuation of weight ``u``.  Coordinates with ``u_i = 0`` are held
at a fixed anchor modulus inside the disc.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .discriminant import discriminant_divisor
from .divisor import MonomialValuation, as_fraction, valuation_of
from .errors import DomainError, FitError
from .fiber_integral import FiberIntegralParams, evaluate_batch
from .model import FibrationModel, require_valid

DEFAULT_GRID = tuple(np.geomspace(1e-1, 1e-6, 24))
DEFAULT_ANCHOR = 0.5
DEFAULT_EPS = (0.2, 0.1, 0.05)


@dataclass(frozen=True)
class Ray:
    u: tuple
    s_grid: tuple = DEFAULT_GRID
    anchor: float = DEFAULT_ANCHOR

    def __post_init__(self):
        u = tuple(as_fraction(x) for x in self.u)
        if not u or any(x < 0 for x in u) or not any(u):
            raise DomainError("ray direction needs nonnegative entries, not all zero")
        grid = tuple(float(s) for s in self.s_grid)
        if any(not 0 < s < 1 for s in grid):
            raise DomainError("grid values must lie in (0, 1)")
        if any(b >= a for a, b in zip(grid, grid[1:])):
            raise DomainError("grid must be strictly decreasing")
        if not 0 < self.anchor < 1:
            raise DomainError("anchor must lie in (0, 1)")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "s_grid", grid)

    def point(self, s: float) -> tuple:
        return tuple(s ** float(x) if x else self.anchor for x in self.u)

    @staticmethod
    def geometric_grid(start: float, stop: float, count: int) -> tuple:
        if count < 2:
            raise DomainError("grid needs at least two points")
        return tuple(np.geomspace(start, stop, count))


class RaySamples(list):
    """List of ``(s, V)``; grid points whose evaluation failed are in ``skipped``."""

    def __init__(self, items=(), skipped=()):
        super().__init__(items)
        self.skipped = list(skipped)


def sample_ray(model: FibrationModel, ray: Ray, params: FiberIntegralParams | None = None,
               workers: int | None = None) -> RaySamples:
    if len(ray.u) != model.m:
        raise DomainError(f"ray has {len(ray.u)} entries, model has m = {model.m}")
    require_valid(model)
    points = [ray.point(s) for s in ray.s_grid]
    results = evaluate_batch(model, points, params, method="quad", workers=workers)
    good, skipped = [], []
    for s, res in zip(ray.s_grid, results):
        if isinstance(res, Exception):
            skipped.append((s, str(res)))
        elif res.value > 0:
            good.append((s, res.value))
        else:
            skipped.append((s, "empty integration region"))
    return RaySamples(good, skipped)


@dataclass(frozen=True)
class AsymptoticFit:
    alpha: float
    beta: float
    const: float
    max_rel_residual: float
    alpha_stderr: float
    n: int = 0


def _design(s):
    ls = np.log(s)
    return np.column_stack([ls, np.log(-ls), np.ones_like(ls)])


def _unpack(samples):
    arr = np.asarray([(float(s), float(v)) for s, v in samples], dtype=float)
    if arr.ndim != 2 or len(arr) < 6:
        raise FitError(f"need at least 6 samples, got {len(arr)}")
    s, V = arr[:, 0], arr[:, 1]
    if np.any(V <= 0) or not np.all(np.isfinite(V)):
        raise FitError("samples must be positive and finite")
    if np.any((s <= 0) | (s >= 1)):
        raise FitError("s values must lie in (0, 1)")
    return s, V


def fit(samples) -> AsymptoticFit:
    """Least squares of ``log V`` on ``log s``, ``log(-log s)`` and 1."""
    s, V = _unpack(samples)
    X, y = _design(s), np.log(V)
    if np.linalg.matrix_rank(X) < 3:
        raise FitError("degenerate design matrix (grid too small or repeated)")
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    dof = len(y) - 3
    sigma2 = float(resid @ resid) / dof if dof > 0 else 0.0
    cov = sigma2 * np.linalg.inv(X.T @ X)
    return AsymptoticFit(
        alpha=float(-coef[0] / 2.0),
        beta=float(coef[1]),
        const=float(coef[2]),
        max_rel_residual=float(np.max(np.abs(np.expm1(resid)))),
        alpha_stderr=math.sqrt(max(cov[0, 0], 0.0)) / 2.0,
        n=len(y),
    )


def predicted_alpha(model: FibrationModel, u) -> Fraction:
    B_R = discriminant_divisor(model).coefficients
    return valuation_of(B_R, MonomialValuation.from_vector(model.base_names, u))


@dataclass
class PredictionReport:
    alpha: float
    alpha_star: Fraction
    gap: float
    tol: float
    passed: bool
    beta: float
    notes: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"


def verify_prediction(model: FibrationModel, ray: Ray, result: AsymptoticFit, tol: float = 0.02) -> PredictionReport:
    """Compare the fitted alpha with ``v_u(B_R)``; beta is reported, never judged."""
    star = predicted_alpha(model, ray.u)
    gap = abs(result.alpha - float(star))
    notes = []
    if any(sum(1 for a in row if a) > 1 for row in model.exponents):
        notes.append("an upstairs component maps into several base divisors; the discriminant on "
                     "this chart need not capture the pole order along rays meeting their intersection")
    return PredictionReport(float(result.alpha), star, float(gap), tol, bool(gap <= tol), result.beta, notes)


@dataclass
class LelongReport:
    alpha_star: float
    slope: float  # coefficient of log s in psi-hat against (log s, log(-log s), 1), tail half
    raw_slope: float  # plain slope of psi-hat against log s, tail half
    by_eps: dict
    passed: bool
    residual: list
    note: str = ("vanishing Lelong numbers tested as sub-polynomial growth of the residual "
                 "along the ray; plurisubharmonicity is not checked")

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"


def residual(samples, alpha_star) -> tuple[np.ndarray, np.ndarray]:
    """``psi-hat(s) = log V(s) + 2 alpha* log s``."""
    s, V = _unpack(samples)
    return s, np.log(V) + 2.0 * float(alpha_star) * np.log(s)


def lelong_zero_check(samples, alpha_star, eps_grid: Sequence[float] = DEFAULT_EPS) -> LelongReport:
    """Residual growth along the tail half of the grid must beat every ``s^{-eps}``.

    The polynomial rate is the ``log s`` coefficient with a ``log(-log s)``
    term allowed alongside, so logarithmic growth (a power of ``-log s``) is
    not mistaken for a small power of ``s``.
    """
    s, psi = residual(samples, alpha_star)
    order = np.argsort(-s)  # decreasing s, tail = small s
    s, psi = s[order], psi[order]
    tail = slice(len(s) // 2, None)
    st, pt = s[tail], psi[tail]
    X = _design(st)
    if np.linalg.matrix_rank(X) < 3:
        raise FitError("tail half too short for the residual fit")
    coef, *_ = np.linalg.lstsq(X, pt, rcond=None)
    slope = float(coef[0])
    raw = float(np.polyfit(np.log(st), pt, 1)[0])
    by_eps = {float(e): bool(abs(slope) < e) for e in eps_grid}
    return LelongReport(float(alpha_star), slope, raw, by_eps, all(by_eps.values()), list(zip(s, psi)))
