"""Local monomial model of a fibration in simple-normal-crossing form.

Upstairs coordinates ``w_1..w_{n+m}`` map to base coordinates ``z_1..z_m`` by

    z_i = prod_j w_j ** A[j][i]

and the divisor ``R = sum_j r_j {w_j = 0}`` records the poles of the volume
form.  Unit factors in front of the monomials are taken to be 1; they never
change poles or asymptotics.  The chart is the closed unit polydisc in ``w``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from . import _linalg
from .divisor import (
    BASE,
    HORIZONTAL,
    TOTAL,
    VERTICAL,
    DivisorQ,
    PrimeComponent,
    as_fraction,
    format_fraction,
)
from .errors import DomainError, ModelError

# Items of the SNC condition that can be checked on a single monomial chart.
SNC_ITEMS = {
    "1": "X and Y smooth",
    "2": "B is a reduced snc divisor",
    "3": "vertical components of R map into B",
    "4": "red(R) + f*B is snc",
    "5": "f is smooth over Y \\ B",
    "6": "R_h is relative snc over Y \\ B",
    "7": "coefficients of R_h lie in (-inf, 1)",
}


@dataclass(frozen=True)
class Violation:
    item: str  # "1".."7", or "rank" / "shape" / "chart" for structural problems
    message: str

    def __str__(self):
        if self.item in SNC_ITEMS:
            return f"SNC condition ({self.item}) violated: {self.message}"
        return f"{self.item} error: {self.message}"


@dataclass(frozen=True)
class FibrationModel:
    m: int
    n: int
    exponents: tuple  # (n+m) rows x m columns of nonnegative ints
    r: Mapping[str, Fraction] = field(default_factory=dict)
    base_divisor: tuple = ()
    upstairs_names: tuple = ()
    base_names: tuple = ()

    def __post_init__(self):
        rows = tuple(tuple(int(a) for a in row) for row in self.exponents)
        object.__setattr__(self, "exponents", rows)
        up = tuple(self.upstairs_names) or tuple(f"w{j + 1}" for j in range(len(rows)))
        base = tuple(self.base_names) or tuple(f"z{i + 1}" for i in range(self.m))
        object.__setattr__(self, "upstairs_names", up)
        object.__setattr__(self, "base_names", base)
        bd = self.base_divisor if self.base_divisor is not None else ()
        object.__setattr__(self, "base_divisor", tuple(bd))
        r = {str(k): as_fraction(v) for k, v in dict(self.r).items()}
        object.__setattr__(self, "r", {k: v for k, v in r.items() if v != 0})

    # -- construction helpers -------------------------------------------------
    @classmethod
    def build(cls, exponents, r=None, base_divisor=None, upstairs_names=None, base_names=None):
        """Infer ``m``/``n`` from the exponent matrix; ``base_divisor`` defaults to all of B."""
        rows = [list(row) for row in exponents]
        m = len(rows[0]) if rows else 0
        n = len(rows) - m
        base_names = tuple(base_names or (f"z{i + 1}" for i in range(m)))
        if base_divisor is None:
            base_divisor = base_names
        return cls(m, n, tuple(map(tuple, rows)), dict(r or {}), tuple(base_divisor),
                   tuple(upstairs_names or ()), base_names)

    def with_r(self, r: Mapping[str, object]) -> "FibrationModel":
        return FibrationModel(self.m, self.n, self.exponents, dict(r), self.base_divisor,
                              self.upstairs_names, self.base_names)

    def permuted(self, order: Sequence[int]) -> "FibrationModel":
        """Same model with upstairs coordinates listed in ``order``."""
        return FibrationModel(self.m, self.n, tuple(self.exponents[j] for j in order), self.r,
                              self.base_divisor, tuple(self.upstairs_names[j] for j in order),
                              self.base_names)

    # -- accessors --------------------------------------------------------------
    @property
    def size(self) -> int:
        return len(self.exponents)

    def coeff(self, j: int) -> Fraction:
        return self.r.get(self.upstairs_names[j], Fraction(0))

    def is_vertical(self, j: int) -> bool:
        return any(self.exponents[j])

    def component(self, j: int) -> PrimeComponent:
        return PrimeComponent(self.upstairs_names[j], TOTAL, VERTICAL if self.is_vertical(j) else HORIZONTAL)

    def base_index(self, name: str) -> int:
        try:
            return self.base_names.index(name)
        except ValueError:
            raise DomainError(f"unknown base component {name!r}") from None

    def upstairs_index(self, name: str) -> int:
        try:
            return self.upstairs_names.index(name)
        except ValueError:
            raise DomainError(f"unknown upstairs component {name!r}") from None

    def R(self) -> DivisorQ:
        return DivisorQ({self.component(j): self.coeff(j) for j in range(self.size)}, space=TOTAL)

    def B(self) -> DivisorQ:
        return DivisorQ.on_base({name: 1 for name in self.base_divisor})

    def column(self, i: int) -> list[int]:
        return [row[i] for row in self.exponents]

    # -- serialization ----------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "exponents": [list(row) for row in self.exponents],
            "r": {k: format_fraction(v) for k, v in sorted(self.r.items())},
            "base_divisor": list(self.base_divisor),
            "names": {"upstairs": list(self.upstairs_names), "base": list(self.base_names)},
        }

    @classmethod
    def from_dict(cls, obj: Mapping) -> "FibrationModel":
        try:
            names = obj.get("names", {}) or {}
            rows = obj["exponents"]
            m = int(obj.get("m", len(rows[0]) if rows else 0))
            n = int(obj.get("n", len(rows) - m))
            r = {}
            for k, v in (obj.get("r") or {}).items():
                if isinstance(v, float):
                    raise DomainError(f"coefficient r[{k!r}] is a binary float; write it as a string")
                r[k] = as_fraction(v)
            base_names = tuple(names.get("base") or (f"z{i + 1}" for i in range(m)))
            bd = obj.get("base_divisor")
            return cls(m, n, tuple(tuple(row) for row in rows), r,
                       tuple(base_names if bd is None else bd),
                       tuple(names.get("upstairs") or ()), base_names)
        except (KeyError, TypeError, IndexError) as exc:
            raise ModelError(f"malformed model: {exc!r}", [Violation("shape", str(exc))]) from exc

    @classmethod
    def load(cls, path) -> "FibrationModel":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass(frozen=True)
class VariableGroups:
    """Split of upstairs indices: an invertible block, fiber variables in f*B, free variables."""

    A_group: tuple
    B_group: tuple
    C_group: tuple

    @property
    def v(self) -> int:
        return len(self.B_group)


def _structural(model: FibrationModel) -> list[Violation]:
    out = []
    rows = model.exponents
    if model.m < 1 or model.n < 0:
        out.append(Violation("shape", f"need m >= 1 and n >= 0, got m={model.m}, n={model.n}"))
    if len(rows) != model.n + model.m:
        out.append(Violation("shape", f"exponent matrix has {len(rows)} rows, expected n+m={model.n + model.m}"))
    if any(len(row) != model.m for row in rows):
        out.append(Violation("shape", f"every exponent row needs m={model.m} entries"))
    if any(a < 0 for row in rows for a in row):
        out.append(Violation("shape", "exponents must be nonnegative integers"))
    if len(set(model.upstairs_names)) != len(model.upstairs_names) or len(model.upstairs_names) != len(rows):
        out.append(Violation("shape", "upstairs names must be unique, one per row"))
    if len(set(model.base_names)) != len(model.base_names) or len(model.base_names) != model.m:
        out.append(Violation("shape", "base names must be unique, one per column"))
    unknown = set(model.r) - set(model.upstairs_names)
    if unknown:
        out.append(Violation("shape", f"r mentions unknown components {sorted(unknown)}"))
    return out


def validate(model: FibrationModel) -> list[Violation]:
    """All checkable validity conditions; an empty list means the model is usable."""
    out = _structural(model)
    if out:
        return out
    rows = model.exponents
    if _linalg.rank(rows) != model.m:
        out.append(Violation("rank", "exponent matrix must have rank m (f surjective)"))
    # (2): B reduced, made of distinct coordinate hyperplanes of the base
    if len(set(model.base_divisor)) != len(model.base_divisor):
        out.append(Violation("2", "base divisor lists a component twice (not reduced)"))
    bad = [b for b in model.base_divisor if b not in model.base_names]
    if bad:
        out.append(Violation("2", f"base divisor components {bad} are not base coordinates"))
    in_B = [name in model.base_divisor for name in model.base_names]
    # (3): a vertical component of R must lie over some component of B
    for j in range(model.size):
        if model.is_vertical(j) and model.coeff(j) != 0:
            if not any(a > 0 and in_B[i] for i, a in enumerate(rows[j])):
                out.append(Violation("3", f"vertical component {model.upstairs_names[j]} "
                                          f"(r={format_fraction(model.coeff(j))}) does not map into B"))
    # (5): away from f^{-1}(B) the map must be a submersion
    free_rows = [j for j in range(model.size)
                 if model.is_vertical(j) and not any(a > 0 and in_B[i] for i, a in enumerate(rows[j]))]
    per_column = {}
    for j in free_rows:
        support = [(i, a) for i, a in enumerate(rows[j]) if a > 0]
        if len(support) != 1 or support[0][1] != 1:
            out.append(Violation("5", f"{model.upstairs_names[j]} gives a singular fiber over a point outside B"))
        for i, _ in support:
            per_column.setdefault(i, []).append(j)
    for i, js in per_column.items():
        if len(js) > 1:
            out.append(Violation("5", f"{model.base_names[i]} is not in B but its fiber is singular "
                                      f"(rows {[model.upstairs_names[j] for j in js]})"))
    # (7): horizontal coefficients below 1
    for j in range(model.size):
        if not model.is_vertical(j) and model.coeff(j) >= 1:
            out.append(Violation("7", f"horizontal component {model.upstairs_names[j]} has coefficient "
                                      f"{format_fraction(model.coeff(j))} >= 1"))
    return out


def require_valid(model: FibrationModel) -> None:
    problems = validate(model)
    if problems:
        raise ModelError("; ".join(map(str, problems)), problems)


def pullback(model: FibrationModel, d: DivisorQ) -> DivisorQ:
    """``f*D`` for D supported on base coordinate hyperplanes."""
    if d.space not in (None, BASE):
        raise DomainError("pullback expects a divisor on the base")
    coeffs = [Fraction(0)] * model.m
    for comp, c in d.items():
        coeffs[model.base_index(comp.name)] = c
    terms = {}
    for j, row in enumerate(model.exponents):
        total = sum((a * c for a, c in zip(row, coeffs)), Fraction(0))
        if total:
            terms[model.component(j)] = total
    return DivisorQ(terms, space=TOTAL)


def classify_variables(model: FibrationModel) -> VariableGroups:
    """First (lexicographic) invertible m x m block, then nonzero / zero remaining rows."""
    rows = model.exponents
    for subset in itertools.combinations(range(model.size), model.m):
        if _linalg.det([rows[j] for j in subset]) != 0:
            rest = [j for j in range(model.size) if j not in subset]
            return VariableGroups(
                tuple(subset),
                tuple(j for j in rest if any(rows[j])),
                tuple(j for j in rest if not any(rows[j])),
            )
    raise ModelError("no invertible m x m block of exponents; rank(A) < m",
                     [Violation("rank", "exponent matrix must have rank m")])
