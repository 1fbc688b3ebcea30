"""Pole orders of fiber integrals along rays, against the discriminant divisor.

Run: python3 demos/04_asymptotics.py
"""
from cbf import FibrationModel, Ray, fit, lelong_zero_check, sample_ray, verify_prediction

two_base = FibrationModel.build([[1, 0], [0, 1], [0, 2]], r={"w3": "1/4"})

# %% alpha along u is predicted by pairing B_R = (5/8) z2 with the weight vector u.
for u in [(1, 0), (0, 1), (1, 1), (2, 3)]:
    ray = Ray(u)
    samples = sample_ray(two_base, ray)
    res = fit(samples)
    rep = verify_prediction(two_base, ray, res)
    lel = lelong_zero_check(samples, rep.alpha_star)
    print(f"u={u}: alpha={res.alpha:.4f} (+-{res.alpha_stderr:.1e}) predicted {rep.alpha_star}"
          f"  beta={res.beta:.3f}  residual slope {lel.slope:+.1e}  {rep.verdict}/{lel.verdict}")

# %% The node: no pole, one logarithm.
node = FibrationModel.build([[1], [1]])
res = fit(sample_ray(node, Ray((1,))))
print(f"node: alpha={res.alpha:.2e} beta={res.beta:.4f}")

# %% A chart that is a blow-up of the base origin. Rows meeting both divisors do not count
# towards B_R, and along the diagonal the integral has a pole that B_R on this chart misses.
chart = FibrationModel.build([[1, 0], [1, 1], [0, 1]])
ray = Ray((1, 1))
rep = verify_prediction(chart, ray, fit(sample_ray(chart, ray)))
print(f"blow-up chart, diagonal: alpha={rep.alpha:.3f} vs {rep.alpha_star} -> {rep.verdict}; {rep.notes[0]}")
