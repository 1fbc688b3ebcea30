"""Polyhedral integration regions in log-radius coordinates.

A constraint is an affine form ``const + base . L + rho . x <= 0`` where
``L = (log|z_1|, ..., log|z_m|)`` and ``x = (rho_1, ..., rho_v)``.  The region
is put in nested form by Fourier-Motzkin elimination, innermost variable
first, so that for every level ``j``

    max(lower_j(L, rho_{>j})) <= rho_j <= min(upper_j(L, rho_{>j}))

and whatever remains after eliminating every ``rho`` is a feasibility
condition on ``L`` alone.  All coefficients are exact Fractions.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ModelError


@dataclass(frozen=True)
class AffineForm:
    base: tuple  # coefficients of log|z_i|
    rho: tuple  # coefficients of rho_k
    const: Fraction = Fraction(0)

    def __add__(self, other):
        return AffineForm(tuple(a + b for a, b in zip(self.base, other.base)),
                          tuple(a + b for a, b in zip(self.rho, other.rho)),
                          self.const + other.const)

    def scale(self, s) -> "AffineForm":
        s = Fraction(s)
        return AffineForm(tuple(a * s for a in self.base), tuple(a * s for a in self.rho), self.const * s)

    def without(self, k: int) -> "AffineForm":
        rho = list(self.rho)
        rho[k] = Fraction(0)
        return AffineForm(self.base, tuple(rho), self.const)

    def normalized(self) -> "AffineForm":
        """Positive rescaling with leading nonzero coefficient of magnitude 1 (for dedup)."""
        for x in (*self.rho, *self.base, self.const):
            if x:
                return self.scale(1 / abs(x))
        return self

    def is_constant(self) -> bool:
        return not any(self.base) and not any(self.rho)

    def vector(self) -> np.ndarray:
        return np.array([float(x) for x in (*self.base, *self.rho, self.const)])

    def __call__(self, L, rho) -> Fraction:
        return (self.const + sum((a * x for a, x in zip(self.base, L)), Fraction(0))
                + sum((a * x for a, x in zip(self.rho, rho)), Fraction(0)))


@dataclass(frozen=True)
class Level:
    lower: tuple  # AffineForms; rho_j >= each
    upper: tuple  # AffineForms; rho_j <= each


@dataclass(frozen=True)
class IntegrationRegion:
    m: int
    v: int
    levels: tuple  # levels[j] bounds rho_{j+1}; j = 0 is innermost
    feasibility: tuple  # AffineForms in L only, each must be <= 0
    constraints: tuple  # the original inequalities, kept for membership tests

    def contains(self, L, rho, slack=1e-12) -> bool:
        pt = np.concatenate([np.asarray(L, float), np.asarray(rho, float), [1.0]])
        return all(c.vector() @ pt <= slack for c in self.constraints)

    def feasible(self, L, slack=1e-12) -> bool:
        pt = np.concatenate([np.asarray(L, float), np.zeros(self.v), [1.0]])
        return all(c.vector() @ pt <= slack for c in self.feasibility)


def _dedupe(forms):
    seen, out = set(), []
    for f in forms:
        key = f.normalized()
        if key not in seen:
            seen.add(key)
            out.append(f)
    return out


def eliminate(constraints, m: int, v: int) -> IntegrationRegion:
    """Nested bounds for ``{x : every constraint <= 0}`` by Fourier-Motzkin."""
    current = _dedupe(constraints)
    levels = []
    for k in range(v):
        lower, upper, rest = [], [], []
        for c in current:
            g = c.rho[k]
            bound = c.without(k).scale(-1 / g) if g else None
            if g > 0:
                upper.append(bound)
            elif g < 0:
                lower.append(bound)
            else:
                rest.append(c)
        if not lower or not upper:
            side = "below" if not lower else "above"
            raise ModelError(f"integration region is unbounded {side} in rho_{k + 1}")
        lower, upper = _dedupe(lower), _dedupe(upper)
        levels.append(Level(tuple(lower), tuple(upper)))
        combined = [lo + up.scale(-1) for lo in lower for up in upper]
        current = _dedupe(rest + [c for c in combined if not (c.is_constant() and c.const <= 0)])
    return IntegrationRegion(m, v, tuple(levels), tuple(current), tuple(_dedupe(constraints)))
