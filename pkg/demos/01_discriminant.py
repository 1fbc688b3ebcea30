"""Discriminant divisors of monomial models.

Run: python3 demos/01_discriminant.py
"""
from fractions import Fraction

from cbf import DivisorQ, FibrationModel, discriminant_divisor, verify_translation_identity, validate
from cbf.discriminant import horizontal_irrelevance_check

# %% Blow-up of a point on a surface, seen over a curve H through it.
# Strict transform Hp and exceptional curve E both map onto H with multiplicity 1.
for a in [Fraction(0), Fraction(1, 2), Fraction(-1, 3), Fraction(9, 10)]:
    model = FibrationModel.build([[1], [1]], r={"Hp": a, "E": a - 1},
                                 upstairs_names=["Hp", "E"], base_names=["H"])
    res = discriminant_divisor(model)
    print(f"a = {a}:  B_R = {res.coefficients.by_name()}  lct = {res.lct['H']}  witness = {res.witness['H']}")

# %% Shifting R by a pullback shifts B_R by the same divisor.
model = FibrationModel.build([[1], [1]], r={"Hp": "1/2", "E": "-1/2"}, upstairs_names=["Hp", "E"], base_names=["H"])
S = DivisorQ.on_base({"H": 1})
print("translation identity with S = H:", verify_translation_identity(model, S))

# %% Horizontal coefficients never enter.
model = FibrationModel.build([[2], [0]], r={"w2": "-3"})
print("double fiber, c =", discriminant_divisor(model).coefficient("z1"))
print("w2 moved to 9/10, B_R unchanged:", horizontal_irrelevance_check(model, {"w2": Fraction(39, 10)}))

# %% Invalid data is reported by condition number, not silently accepted.
bad = FibrationModel.build([[1], [0]], r={"w2": 1})
for v in validate(bad):
    print(v)
