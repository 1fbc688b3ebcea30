"""Kodaira fibers: sigma from the discriminant formula, cross-checked by integrability.

Run: python3 demos/02_kodaira.py   (about 30 s; the last cell integrates numerically)
"""
from cbf import elliptic_degree, kodaira_preset, multiple_fiber_coefficient, sigma_coefficient
from cbf.integrability import probe

# %% The table. Nothing is hard-coded: each sigma is 1 - min (1 - r_j) / m_j over the preset.
for tag, b in [("I_b", 3), ("I*_b", 1), ("II", None), ("III", None), ("IV", None),
               ("II*", None), ("III*", None), ("IV*", None)]:
    data = kodaira_preset(tag, b)
    print(f"{data.label:5s} mult={data.multiplicities} r={[str(x) for x in data.relative_canonical]}"
          f"  sigma={sigma_coefficient(data)}")

print("multiple fibers:", [str(multiple_fiber_coefficient(m)) for m in range(2, 7)])

# %% Degree of the canonical bundle formula for a small configuration.
res = elliptic_degree([kodaira_preset("II*"), kodaira_preset("I_b", 1)], multiple_fibers=[2])
print(f"discriminant part {res.discriminant_part}, moduli part {res.moduli_part}, total {res.total}")

# %% The cusp, tacnode and triple point: |f|^(-2c) is integrable exactly for c < 1 - sigma.
for tag in ("II", "III", "IV"):
    lct = 1 - sigma_coefficient(kodaira_preset(tag))
    lo, hi = probe(tag, float(lct) - 0.04), probe(tag, float(lct) + 0.04)
    print(f"{tag:3s} lct={lct}: shell mass {lo.shell:.3g} -> {lo.refined_shell:.3g} below,"
          f" {hi.shell:.3g} -> {hi.refined_shell:.3g} above")
