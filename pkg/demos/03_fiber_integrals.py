"""Fiber integrals by reduced quadrature and by Monte Carlo in the original coordinates.

Run: python3 demos/03_fiber_integrals.py
"""
import math

from cbf import FibrationModel, FiberIntegralParams, evaluate_monte_carlo, evaluate_quadrature, reduce

node = FibrationModel.build([[1], [1]])
double = FibrationModel.build([[2], [0]])
two_base = FibrationModel.build([[1, 0], [0, 1], [0, 2]], r={"w3": "1/4"})

# %% What the reduction produces: exponential rates, a base monomial, nested bounds.
red, region = reduce(two_base)
print("rates", red.rates, "base exponent", red.base_exponent, "levels", region.levels)

# %% Closed forms (unit disc has area pi).
z = 1e-3
print("node      ", evaluate_quadrature(node, z).value, " 2 pi log(1/|z|) =", 2 * math.pi * math.log(1 / z))
print("double    ", evaluate_quadrature(double, z).value, " pi / (2|z|) =", math.pi / (2 * z))
t = (0.3, 0.05)
print("two_base  ", evaluate_quadrature(two_base, t).value, " 2 pi (|z2|^(-5/4) - 1) / (5/2) =",
      2 * math.pi * (t[1] ** -1.25 - 1) / 2.5)

# %% The Monte Carlo oracle never sees the reduction.
params = FiberIntegralParams(mc_samples=10**6, seed=1)
for model, t in [(node, 1e-2), (double, 1e-2), (two_base, (0.2, 0.05))]:
    q = evaluate_quadrature(model, t).value
    mc = evaluate_monte_carlo(model, t, params)
    print(f"quad {q:12.6f}   mc {mc.value:12.6f} +- {mc.stderr:.4f}   ({(mc.value - q) / mc.stderr:+.2f} sigma)")
