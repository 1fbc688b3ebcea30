"""Formal Q-divisors over named prime components.

Coefficients are :class:`fractions.Fraction` everywhere; floats are rejected
at construction so that golden values such as 5/6 stay exact.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .errors import DomainError

TOTAL = "total_space"
BASE = "base"

HORIZONTAL = "horizontal"
VERTICAL = "vertical"
BASE_COMPONENT = "base_component"


def as_fraction(x) -> Fraction:
    """Convert ints, Fractions and ``"p/q"`` / decimal strings exactly.

    Binary floats are refused: a float coefficient is almost always a bug.
    """
    if isinstance(x, bool):
        raise DomainError(f"not a rational coefficient: {x!r}")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse rational {x!r}") from exc
    raise DomainError(f"coefficients must be exact rationals, got {type(x).__name__} {x!r}")


def format_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True, order=True)
class PrimeComponent:
    name: str
    space: str = BASE
    kind: str = BASE_COMPONENT

    def __post_init__(self):
        if self.space not in (TOTAL, BASE):
            raise DomainError(f"unknown space {self.space!r}")
        if self.kind not in (HORIZONTAL, VERTICAL, BASE_COMPONENT):
            raise DomainError(f"unknown kind {self.kind!r}")
        if (self.kind == BASE_COMPONENT) != (self.space == BASE):
            raise DomainError(f"component {self.name!r}: kind {self.kind} inconsistent with space {self.space}")

    @classmethod
    def base(cls, name: str) -> "PrimeComponent":
        return cls(name, BASE, BASE_COMPONENT)


class DivisorQ(Mapping):
    """An immutable finite sum ``sum c_i D_i`` with rational ``c_i``.

    Behaves as a read-only mapping ``PrimeComponent -> Fraction``. Zero
    coefficients are never stored, so ``DivisorQ() == DivisorQ({D: 0})``.
    """

    __slots__ = ("_terms", "_space", "_hash")

    def __init__(self, terms: Mapping[PrimeComponent, object] | None = None, space: str | None = None):
        clean = {}
        names = {}
        for comp, coeff in (terms or {}).items():
            if not isinstance(comp, PrimeComponent):
                raise DomainError(f"divisor keys must be PrimeComponent, got {comp!r}")
            q = as_fraction(coeff)
            if space is None:
                space = comp.space
            elif comp.space != space:
                raise DomainError(f"component {comp.name!r} lives in {comp.space}, divisor in {space}")
            if comp.name in names and names[comp.name] != comp:
                raise DomainError(f"component name {comp.name!r} used with two different kinds")
            names[comp.name] = comp
            if q:
                clean[comp] = clean.get(comp, Fraction(0)) + q
        self._terms = {k: v for k, v in sorted(clean.items()) if v}
        self._space = space
        self._hash = None

    @classmethod
    def on_base(cls, coeffs: Mapping[str, object]) -> "DivisorQ":
        """Shorthand: ``DivisorQ.on_base({"H": "1/2"})``."""
        return cls({PrimeComponent.base(k): v for k, v in coeffs.items()}, space=BASE)

    @property
    def space(self) -> str | None:
        return self._space

    def __getitem__(self, comp):
        if isinstance(comp, str):
            for k, v in self._terms.items():
                if k.name == comp:
                    return v
            raise KeyError(comp)
        return self._terms[comp]

    def coefficient(self, comp) -> Fraction:
        try:
            return self[comp]
        except KeyError:
            return Fraction(0)

    def __iter__(self) -> Iterator[PrimeComponent]:
        return iter(self._terms)

    def __len__(self):
        return len(self._terms)

    def by_name(self) -> dict[str, Fraction]:
        return {k.name: v for k, v in self._terms.items()}

    def _check_space(self, other: "DivisorQ"):
        if self._space and other._space and self._space != other._space:
            raise DomainError(f"cannot combine divisors on {self._space} and {other._space}")

    def __add__(self, other):
        if not isinstance(other, DivisorQ):
            return NotImplemented
        return add(self, other)

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        if not isinstance(other, DivisorQ):
            return NotImplemented
        return add(self, -other)

    def __mul__(self, scalar):
        q = as_fraction(scalar)
        return DivisorQ({k: v * q for k, v in self._terms.items()}, space=self._space)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, DivisorQ):
            return self._terms == other._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{k.name}: {format_fraction(v)}" for k, v in self._terms.items())
        return f"DivisorQ({{{body}}})"

    # JSON: {"component": "p/q"}; never binary floats.
    def to_json(self) -> str:
        return json.dumps({k.name: format_fraction(v) for k, v in self._terms.items()}, sort_keys=True)

    @classmethod
    def from_json(cls, text_or_obj, space: str = BASE, kinds: Mapping[str, str] | None = None) -> "DivisorQ":
        obj = json.loads(text_or_obj) if isinstance(text_or_obj, str) else text_or_obj
        if not isinstance(obj, dict):
            raise DomainError("divisor JSON must be an object")
        terms = {}
        for name, coeff in obj.items():
            if isinstance(coeff, float):
                raise DomainError(f"coefficient of {name!r} is a binary float; write it as a string")
            if space == BASE:
                comp = PrimeComponent.base(name)
            else:
                comp = PrimeComponent(name, TOTAL, (kinds or {}).get(name, VERTICAL))
            terms[comp] = as_fraction(coeff)
        return cls(terms, space=space)


def add(d1: DivisorQ, d2: DivisorQ) -> DivisorQ:
    d1._check_space(d2)
    merged = dict(d1.items())
    for k, v in d2.items():
        merged[k] = merged.get(k, Fraction(0)) + v
    return DivisorQ(merged, space=d1.space or d2.space)


def round_up_negative_part(d: DivisorQ) -> DivisorQ:
    """Componentwise ``ceil(-D)``.

    For coefficients below 1, ``D + round_up_negative_part(D)`` lands in [0, 1).
    """
    return DivisorQ({k: math.ceil(-v) for k, v in d.items()}, space=d.space)


@dataclass(frozen=True)
class MonomialValuation:
    """Toric valuation on the base with a weight per coordinate divisor."""

    weights: Mapping[str, Fraction]

    def __post_init__(self):
        w = {str(k): as_fraction(v) for k, v in dict(self.weights).items()}
        if any(v < 0 for v in w.values()):
            raise DomainError("valuation weights must be nonnegative")
        if not any(v > 0 for v in w.values()):
            raise DomainError("valuation needs at least one positive weight")
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_vector(cls, names: Iterable[str], u) -> "MonomialValuation":
        return cls(dict(zip(names, (as_fraction(x) for x in u))))


def valuation_of(d: DivisorQ, v: MonomialValuation) -> Fraction:
    """Generic Lelong number of ``sum c_i log|z_i|^2`` along the toric divisor of ``v``."""
    if d.space not in (None, BASE):
        raise DomainError("valuation_of needs a divisor on the base")
    return sum((v.weights.get(k.name, Fraction(0)) * c for k, c in d.items()), Fraction(0))
