"""Regression driver: run a directory of JSON cases and collect PASS/FAIL.

Each ``*.json`` file in the suite holds one case or a list of cases.  Every
case has a ``name`` and a ``kind``:

``discriminant``
    ``model`` and ``expected`` ({base component: "p/q"}).
``kodaira``
    ``type`` (+ optional ``b``) and ``expected`` sigma, or ``multiple``: m.
``integrability``
    ``germ``, ``lct``; probes at ``lct -+ offset`` (default 0.04).
``crosscheck``
    ``model`` and ``points``; quadrature vs Monte Carlo within 3 stderr.
``crosscheck_random``
    ``count`` random models with ``points`` base points each, drawn from ``seed``.
``ray``
    ``model``, ``u``, optional ``grid`` [start, stop, count], ``tol``; fitted
    alpha vs the discriminant pairing, plus the sub-polynomial residual check.
"""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from . import asymptotics, integrability
from .discriminant import discriminant_divisor, dominating_rows
from .divisor import as_fraction, format_fraction
from .errors import CBFError
from .fiber_integral import FiberIntegralParams, evaluate_monte_carlo, evaluate_quadrature
from .kodaira import kodaira_preset, multiple_fiber_coefficient, sigma_coefficient
from .model import FibrationModel, validate

CSV_VERSION = "cbf-csv v1"
KINDS = ("discriminant", "kodaira", "integrability", "crosscheck", "crosscheck_random", "ray")


def csv_header(seed, command: str) -> str:
    return f"# {CSV_VERSION} seed={seed} command={command}\n"


def fmt(x) -> str:
    if isinstance(x, Fraction):
        return format_fraction(x)
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


# -- random models ---------------------------------------------------------------


def random_valid_model(rng, max_m: int = 2, max_n: int = 2, max_exponent: int = 2,
                       r_choices=tuple(Fraction(k, 4) for k in range(-2, 4)),
                       dominated: bool = False) -> FibrationModel:
    """Rejection-sample a valid model with every base coordinate in B.

    With ``dominated``, every component of B also has a row over it alone,
    so the discriminant is determined by the chart.
    """
    while True:
        m = int(rng.integers(1, max_m + 1))
        n = int(rng.integers(0 if m > 1 else 1, max_n + 1))
        A = rng.integers(0, max_exponent + 1, size=(n + m, m)).tolist()
        r = {f"w{j + 1}": r_choices[int(rng.integers(len(r_choices)))] for j in range(n + m)}
        model = FibrationModel.build(A, r=r)
        if validate(model):
            continue
        if dominated and not all(dominating_rows(model, i) for i in range(m)):
            continue
        return model


def image_base_point(model: FibrationModel, rng, lo: float = 0.3, hi: float = 0.95,
                     zmin: float = 0.02, zmax: float = 0.6) -> tuple:
    """``|z| = f(|w|)`` for random ``|w|``, so the fiber is never empty."""
    A = np.asarray(model.exponents, dtype=float)
    while True:
        w = rng.uniform(lo, hi, model.size)
        z = np.exp(np.log(w) @ A)
        if np.all((z > zmin) & (z < zmax)):
            return tuple(float(x) for x in z)


def agreement(quad: float, mc) -> tuple[bool, float]:
    """Within 3 stderr; a relative floor covers zero-variance (finite) fibers."""
    value, stderr = mc[0], mc[1]
    slack = 3.0 * stderr + 1e-9 * abs(quad)
    dev = (value - quad) / stderr if stderr > 0 else 0.0
    return abs(value - quad) <= slack, dev


# -- results ---------------------------------------------------------------------


@dataclass
class CaseResult:
    name: str
    kind: str
    passed: bool
    expected: str = ""
    observed: str = ""
    detail: str = ""

    def __post_init__(self):
        self.passed = bool(self.passed)


@dataclass
class SuiteReport:
    results: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    ray_rows: list = field(default_factory=list)  # (case, s, V, psi)
    crosscheck_rows: list = field(default_factory=list)  # (case, model, point, quad, mc, stderr, dev)
    seed: int = 0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list:
        return [r for r in self.results if not r.passed]

    def results_csv(self) -> str:
        buf = io.StringIO()
        buf.write(csv_header(self.seed, "verify-all"))
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["case", "kind", "verdict", "expected", "observed", "detail"])
        for r in self.results:
            w.writerow([r.name, r.kind, "PASS" if r.passed else "FAIL", r.expected, r.observed, r.detail])
        return buf.getvalue()

    def rays_csv(self) -> str:
        buf = io.StringIO()
        buf.write(csv_header(self.seed, "verify-all"))
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["case", "s", "V", "psi_hat"])
        for row in self.ray_rows:
            w.writerow([row[0], *map(fmt, row[1:])])
        return buf.getvalue()

    def crosscheck_csv(self) -> str:
        buf = io.StringIO()
        buf.write(csv_header(self.seed, "verify-all"))
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["case", "model", "point", "quad", "mc", "stderr", "deviation"])
        for row in self.crosscheck_rows:
            w.writerow([row[0], row[1], row[2], *map(fmt, row[3:])])
        return buf.getvalue()

    def write(self, out_dir) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        for fname, text in (("results.csv", self.results_csv()), ("rays.csv", self.rays_csv()),
                            ("crosscheck.csv", self.crosscheck_csv())):
            p = out / fname
            p.write_text(text)
            paths.append(p)
        return paths


# -- case runners ----------------------------------------------------------------


def _model(case) -> FibrationModel:
    return FibrationModel.from_dict(case["model"])


def _run_discriminant(case, report, seed):
    res = discriminant_divisor(_model(case)).coefficients.by_name()
    want = {k: as_fraction(v) for k, v in case["expected"].items()}
    got = {k: res.get(k, Fraction(0)) for k in set(want) | set(res)}
    want = {k: want.get(k, Fraction(0)) for k in got}
    show = lambda d: ";".join(f"{k}={format_fraction(d[k])}" for k in sorted(d))
    yield CaseResult(case["name"], "discriminant", got == want, show(want), show(got))


def _run_kodaira(case, report, seed):
    want = as_fraction(case["expected"])
    if "multiple" in case:
        got = multiple_fiber_coefficient(int(case["multiple"]))
    else:
        got = sigma_coefficient(kodaira_preset(case["type"], case.get("b")))
    yield CaseResult(case["name"], "kodaira", got == want, format_fraction(want), format_fraction(got))


def _run_integrability(case, report, seed):
    lct = float(as_fraction(case["lct"]))
    off = float(case.get("offset", 0.04))
    below = integrability.probe(case["germ"], lct - off)
    above = integrability.probe(case["germ"], lct + off)
    ok = below.finite and above.divergent_trending
    yield CaseResult(case["name"], "integrability", ok, f"finite below, divergent above {fmt(lct)}",
                     f"finite={below.finite} divergent={above.divergent_trending}",
                     f"shells {below.shell:.4g}->{below.refined_shell:.4g} / {above.shell:.4g}->{above.refined_shell:.4g}")


def _crosscheck(name, model, points, params, report):
    for k, t in enumerate(points):
        q = evaluate_quadrature(model, t, params).value
        p = FiberIntegralParams(**{**params.__dict__, "seed": params.seed ^ k})
        mc = evaluate_monte_carlo(model, t, p)
        ok, dev = agreement(q, mc)
        rel = mc[1] / mc[0] if mc[0] else math.inf
        pt = ":".join(fmt(float(abs(complex(x)))) for x in np.atleast_1d(t))
        report.crosscheck_rows.append((name, json.dumps(model.to_dict(), sort_keys=True), pt, q, mc[0], mc[1], dev))
        yield CaseResult(f"{name}@{pt}", "crosscheck", ok and rel < 0.02, "|mc-quad| <= 3 stderr, stderr < 2%",
                         f"quad={q:.8g} mc={mc[0]:.8g}", f"deviation={dev:.3f} rel_stderr={rel:.4f}")


def _run_crosscheck(case, report, seed):
    params = FiberIntegralParams(mc_samples=int(case.get("samples", 1_000_000)), seed=seed)
    yield from _crosscheck(case["name"], _model(case), case["points"], params, report)


def _run_crosscheck_random(case, report, seed):
    rng = np.random.default_rng(int(case.get("seed", 0)))
    params = FiberIntegralParams(mc_samples=int(case.get("samples", 1_000_000)), seed=seed)
    for k in range(int(case.get("count", 10))):
        model = random_valid_model(rng, int(case.get("max_m", 2)), int(case.get("max_n", 2)))
        points = [image_base_point(model, rng) for _ in range(int(case.get("points", 3)))]
        yield from _crosscheck(f"{case['name']}[{k}]", model, points, params, report)


def _run_ray(case, report, seed):
    model = _model(case)
    grid = case.get("grid")
    grid = asymptotics.Ray.geometric_grid(*grid[:2], int(grid[2])) if grid else asymptotics.DEFAULT_GRID
    ray = asymptotics.Ray(tuple(case["u"]), grid, float(case.get("anchor", asymptotics.DEFAULT_ANCHOR)))
    samples = asymptotics.sample_ray(model, ray)
    fitted = asymptotics.fit(samples)
    pred = asymptotics.verify_prediction(model, ray, fitted, float(case.get("tol", 0.02)))
    lel = asymptotics.lelong_zero_check(samples, pred.alpha_star)
    for s, V in samples:
        report.ray_rows.append((case["name"], s, V, math.log(V) + 2 * float(pred.alpha_star) * math.log(s)))
    detail = f"beta={fitted.beta:.4f} lelong_slope={lel.slope:.2e}"
    if samples.skipped:
        detail += f" skipped={len(samples.skipped)}"
    yield CaseResult(case["name"], "ray", pred.passed and lel.passed and not samples.skipped,
                     f"alpha={format_fraction(pred.alpha_star)}", f"alpha={fitted.alpha:.6f}", detail)


_RUNNERS = {
    "discriminant": _run_discriminant,
    "kodaira": _run_kodaira,
    "integrability": _run_integrability,
    "crosscheck": _run_crosscheck,
    "crosscheck_random": _run_crosscheck_random,
    "ray": _run_ray,
}


def bundled_suite() -> Path:
    return Path(str(resources.files("cbf") / "suite"))


def load_cases(suite_path) -> list[dict]:
    path = Path(suite_path)
    if not path.exists():
        raise FileNotFoundError(f"suite path {path} does not exist")
    files = sorted(path.glob("*.json")) if path.is_dir() else [path]
    cases = []
    for f in files:
        data = json.loads(f.read_text())
        for case in data if isinstance(data, list) else [data]:
            case.setdefault("name", f.stem)
            cases.append(case)
    return cases


def verify_all(suite_path=None, out_dir=None, seed: int = 0, kinds=None) -> SuiteReport:
    """Run every case; errors inside a case count as FAIL for that case."""
    cases = load_cases(suite_path if suite_path is not None else bundled_suite())
    report = SuiteReport(seed=seed)
    if not cases:
        report.warnings.append("suite is empty; nothing was checked")
        warnings.warn(report.warnings[-1])
    for case in cases:
        kind = case.get("kind")
        if kinds is not None and kind not in kinds:
            continue
        runner = _RUNNERS.get(kind)
        if runner is None:
            report.results.append(CaseResult(case["name"], str(kind), False, detail=f"unknown kind {kind!r}"))
            continue
        try:
            report.results.extend(runner(case, report, seed))
        except (CBFError, ValueError, KeyError, TypeError) as exc:
            report.results.append(CaseResult(case["name"], kind, False, detail=f"{type(exc).__name__}: {exc}"))
    if out_dir is not None:
        report.write(out_dir)
    return report
