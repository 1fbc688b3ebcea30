"""Discriminant divisor and log canonical thresholds of a monomial model."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .divisor import BASE, DivisorQ, PrimeComponent, add
from .errors import DomainError, ModelError
from .model import FibrationModel, Violation, pullback, require_valid


@dataclass(frozen=True)
class DiscriminantResult:
    coefficients: DivisorQ  # B_R on the base
    lct: Mapping[str, Fraction]
    witness: Mapping[str, str]  # base component -> upstairs component attaining the lct

    def coefficient(self, name: str) -> Fraction:
        return self.coefficients.coefficient(name)


def dominating_rows(model: FibrationModel, i: int) -> list[int]:
    """Rows whose component maps onto ``{z_i = 0}``: positive in column i and zero elsewhere.

    A row that also meets another base divisor maps into a codimension-2
    stratum and is invisible over the generic point of ``B_i``.
    """
    return [j for j, row in enumerate(model.exponents)
            if row[i] > 0 and not any(a for k, a in enumerate(row) if k != i)]


def discriminant_divisor(model: FibrationModel) -> DiscriminantResult:
    """Coefficient ``c_i = 1 - lct_i`` for every component of B, where

        lct_i = min over rows j dominating B_i of (1 - r_j) / a_ji.

    Ties go to the lowest row index. Coefficients may be negative.
    """
    require_valid(model)
    lct, witness, coeffs = {}, {}, {}
    for name in model.base_divisor:
        i = model.base_index(name)
        best, best_j = None, None
        for j in dominating_rows(model, i):
            t = (1 - model.coeff(j)) / model.exponents[j][i]
            if best is None or t < best:
                best, best_j = t, j
        if best is None:
            raise ModelError(f"no upstairs component dominates {name} in this chart; "
                             "its discriminant coefficient is not determined here",
                             [Violation("chart", f"no row of A is supported on column {name} alone")])
        lct[name] = Fraction(best)
        witness[name] = model.upstairs_names[best_j]
        coeffs[PrimeComponent.base(name)] = 1 - best
    return DiscriminantResult(DivisorQ(coeffs, space=BASE), lct, witness)


def _check_supported_on_B(model: FibrationModel, S: DivisorQ):
    for comp in S:
        if comp.name not in model.base_divisor:
            raise DomainError(f"{comp.name} is not a component of B")


def translated(model: FibrationModel, S: DivisorQ) -> FibrationModel:
    """The model with ``R`` replaced by ``R + f*S``."""
    _check_supported_on_B(model, S)
    R = add(model.R(), pullback(model, S))
    return model.with_r(R.by_name())


def verify_translation_identity(model: FibrationModel, S: DivisorQ) -> bool:
    """``B_{R + f*S} == B_R + S`` exactly."""
    before = discriminant_divisor(model).coefficients
    after = discriminant_divisor(translated(model, S)).coefficients
    return after == add(before, S)


def is_klt_over(model: FibrationModel, base_component: str) -> bool:
    """(Y, B_R) klt at the generic point of ``base_component``: ``c < 1``, i.e. ``lct > 0``."""
    model.base_index(base_component)
    result = discriminant_divisor(model)
    if base_component not in result.lct:
        # not in B: coefficient 0, the pair is trivially klt there
        return True
    return result.lct[base_component] > 0


def horizontal_irrelevance_check(model: FibrationModel, T: Mapping[str, object]) -> bool:
    """Shift horizontal coefficients by ``T`` and report whether B_R is unchanged."""
    r = dict(model.r)
    for name, delta in T.items():
        j = model.upstairs_index(name)
        if model.is_vertical(j):
            raise DomainError(f"{name} is vertical; only horizontal coefficients may be perturbed")
        r[name] = model.coeff(j) + Fraction(delta)
    perturbed = model.with_r(r)
    return discriminant_divisor(perturbed).coefficients == discriminant_divisor(model).coefficients
