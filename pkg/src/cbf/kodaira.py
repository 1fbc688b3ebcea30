"""Singular fibers of elliptic fibrations and their discriminant coefficients.

Each preset is the multiplicity vector of ``f*P`` on an SNC model together with
the coefficients of ``R`` defined by ``K_{X'} + R = g*K_X``.  For the
non-normal-crossing types II, III, IV the model is the minimal embedded
resolution of the cusp, the tacnode and the ordinary triple point.  The
coefficient sigma is never stored: it is recomputed from the data by the
discriminant formula.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .discriminant import discriminant_divisor
from .divisor import as_fraction
from .errors import DomainError
from .model import FibrationModel

TYPES = ("I_b", "I*_b", "II", "III", "IV", "II*", "III*", "IV*")

_FIXED = {
    "II": ((1, 2, 3, 6), (0, -1, -2, -4)),
    "III": ((1, 1, 2, 4), (0, 0, -1, -2)),
    "IV": ((1, 1, 1, 3), (0, 0, 0, -1)),
    "II*": ((1, 2, 3, 4, 5, 6, 4, 2, 3), None),
    "III*": ((1, 2, 3, 4, 3, 2, 1, 2), None),
    "IV*": ((1, 2, 3, 2, 1, 2, 1), None),
}

_MINIMAL_SNC = {"I_b", "I*_b", "II*", "III*", "IV*"}


@dataclass(frozen=True)
class KodairaFiberData:
    type_tag: str
    multiplicities: tuple
    relative_canonical: tuple
    j_pole_order: int = 0
    b: int | None = None

    def __post_init__(self):
        if len(self.multiplicities) != len(self.relative_canonical):
            raise DomainError("multiplicities and relative_canonical must have equal length")
        if not self.multiplicities or any(int(m) < 1 for m in self.multiplicities):
            raise DomainError("multiplicities must be positive integers")
        if self.j_pole_order < 0:
            raise DomainError("j_pole_order must be nonnegative")
        object.__setattr__(self, "relative_canonical", tuple(as_fraction(x) for x in self.relative_canonical))
        if self.type_tag in _MINIMAL_SNC and any(self.relative_canonical):
            raise DomainError(f"{self.type_tag} is already snc; relative canonical must vanish")

    @property
    def label(self) -> str:
        if self.type_tag in ("I_b", "I*_b"):
            return self.type_tag.replace("_b", f"_{self.b}")
        return self.type_tag

    def as_model(self) -> FibrationModel:
        """One base component, one row per fiber component."""
        names = [f"F{k + 1}" for k in range(len(self.multiplicities))]
        return FibrationModel.build(
            [[m] for m in self.multiplicities],
            r=dict(zip(names, self.relative_canonical)),
            upstairs_names=names,
            base_names=["P"],
        )


@dataclass(frozen=True)
class EllipticFormulaResult:
    discriminant_part: Fraction
    moduli_part: Fraction
    total: Fraction


def parse_type(text: str) -> tuple[str, int | None]:
    """``"I_3"`` -> ("I_b", 3), ``"I*_0"`` -> ("I*_b", 0), ``"II*"`` -> ("II*", None)."""
    s = text.strip().replace(" ", "")
    match = re.fullmatch(r"I(\*?)_?(\d+)", s)
    if match:
        return ("I*_b" if match.group(1) else "I_b"), int(match.group(2))
    if s in _FIXED:
        return s, None
    raise DomainError(f"unknown Kodaira fiber type {text!r}")


def kodaira_preset(type_tag: str, b: int | None = None) -> KodairaFiberData:
    if type_tag not in TYPES:
        tag, parsed_b = parse_type(type_tag)
        type_tag, b = tag, (parsed_b if b is None else b)
    if type_tag == "I_b":
        if b is None or b < 1:
            raise DomainError("I_b needs b >= 1")
        return KodairaFiberData("I_b", (1,) * b, (0,) * b, j_pole_order=b, b=b)
    if type_tag == "I*_b":
        if b is None or b < 0:
            raise DomainError("I*_b needs b >= 0")
        mult = (1, 1, 1, 1) + (2,) * (b + 1)
        return KodairaFiberData("I*_b", mult, (0,) * len(mult), j_pole_order=b, b=b)
    if b is not None:
        raise DomainError(f"type {type_tag} takes no b parameter")
    mult, rel = _FIXED[type_tag]
    return KodairaFiberData(type_tag, mult, rel if rel is not None else (0,) * len(mult))


def sigma_coefficient(data: KodairaFiberData) -> Fraction:
    return discriminant_divisor(data.as_model()).coefficient("P")


def multiple_fiber_coefficient(m: int) -> Fraction:
    """``(m-1)/m``, cross-checked against the one-row model ``f*Q = m F``."""
    if int(m) != m or m < 2:
        raise DomainError("multiple fiber multiplicity must be an integer >= 2")
    closed = Fraction(m - 1, m)
    model = FibrationModel.build([[m]], upstairs_names=["F"], base_names=["Q"])
    via_model = discriminant_divisor(model).coefficient("Q")
    if via_model != closed:  # pragma: no cover - would mean the discriminant formula is broken
        raise AssertionError(f"discriminant formula gives {via_model}, expected {closed}")
    return closed


def elliptic_degree(fibers, multiple_fibers=()) -> EllipticFormulaResult:
    disc = sum((sigma_coefficient(f) for f in fibers), Fraction(0))
    disc += sum((multiple_fiber_coefficient(m) for m in multiple_fibers), Fraction(0))
    moduli = Fraction(sum(f.j_pole_order for f in fibers), 12)
    return EllipticFormulaResult(disc, moduli, disc + moduli)


def fibers_from_records(records) -> tuple[list[KodairaFiberData], list[int]]:
    """Parse ``[{"type": "I_b", "b": 3}, {"m": 2}, {"type": "II", "j_pole_order": 1}, ...]``.

    A record with ``m`` and no ``type`` is a multiple fiber.
    """
    fibers, multiples = [], []
    for rec in records:
        if "type" not in rec:
            if "m" not in rec:
                raise DomainError(f"record {rec!r} needs 'type' or 'm'")
            multiples.append(int(rec["m"]))
            continue
        data = kodaira_preset(rec["type"], rec.get("b"))
        if "j_pole_order" in rec:
            data = KodairaFiberData(data.type_tag, data.multiplicities, data.relative_canonical,
                                    int(rec["j_pole_order"]), data.b)
        fibers.append(data)
        if "m" in rec:
            multiples.append(int(rec["m"]))
    return fibers, multiples
