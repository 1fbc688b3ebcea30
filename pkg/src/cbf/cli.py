"""Command-line interface: ``cbf <subcommand> ...``.

Exit codes: 0 success / PASS, 1 verification FAIL, 2 invalid input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .asymptotics import DEFAULT_ANCHOR, Ray, fit, lelong_zero_check, sample_ray, verify_prediction
from .discriminant import discriminant_divisor, horizontal_irrelevance_check, verify_translation_identity
from .divisor import DivisorQ, format_fraction
from .errors import CBFError, ModelError
from .fiber_integral import FiberIntegralParams, evaluate_batch
from .kodaira import elliptic_degree, fibers_from_records, kodaira_preset, sigma_coefficient
from .model import FibrationModel, require_valid
from .verify import csv_header, fmt, verify_all

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load_model(path) -> FibrationModel:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read model file {path}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None
    model = FibrationModel.from_dict(obj)
    require_valid(model)
    return model


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _table(rows, header, seed, command) -> str:
    buf = io.StringIO()
    buf.write(csv_header(seed, command))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _parse_points(text: str, m: int) -> list:
    points = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            coords = [float(x) for x in chunk.split(":")]
        except ValueError:
            raise UsageError(f"cannot parse base point {chunk!r}") from None
        if len(coords) == 1 and m > 1:
            coords = coords * m
        if len(coords) != m:
            raise UsageError(f"base point {chunk!r} has {len(coords)} coordinates, model has m = {m}")
        points.append(tuple(coords))
    if not points:
        raise UsageError("--at needs at least one base point")
    return points


def _parse_grid(text: str) -> tuple:
    try:
        start, stop, count = text.split(":")
        return Ray.geometric_grid(float(start), float(stop), int(count))
    except ValueError:
        raise UsageError(f"--grid expects start:stop:count, got {text!r}") from None


# -- subcommands -----------------------------------------------------------------


def cmd_discriminant(args) -> int:
    model = _load_model(args.model)
    res = discriminant_divisor(model)
    rows = [[name, format_fraction(res.coefficient(name)), fmt(float(res.coefficient(name))),
             format_fraction(res.lct[name]), fmt(float(res.lct[name])), res.witness[name]]
            for name in model.base_divisor]
    header = ["component", "c", "c_decimal", "lct", "lct_decimal", "witness"]
    status = EXIT_OK
    extra = []
    if args.check_translation:
        try:
            S = DivisorQ.on_base(json.loads(Path(args.check_translation).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read translation divisor: {exc}") from None
        ok = verify_translation_identity(model, S)
        extra.append(f"translation identity: {'PASS' if ok else 'FAIL'}")
        status = max(status, EXIT_OK if ok else EXIT_FAIL)
    if args.check_horizontal:
        horiz = [model.upstairs_names[j] for j in range(model.size) if not model.is_vertical(j)]
        if not horiz:
            extra.append("horizontal irrelevance: no horizontal components")
        else:
            ok = True
            for name in horiz:
                r = model.coeff(model.upstairs_index(name))
                for delta in ((1 - r) / 2, Fraction(-1)):
                    ok &= horizontal_irrelevance_check(model, {name: delta})
            extra.append(f"horizontal irrelevance: {'PASS' if ok else 'FAIL'}")
            status = max(status, EXIT_OK if ok else EXIT_FAIL)
    if args.format == "csv":
        _emit(_table(rows, header, "-", "discriminant"), args.out)
        for line in extra:
            print(line, file=sys.stderr)
    else:
        lines = [f"{r[0]}: c = {r[1]} ({r[2]}), lct = {r[3]} ({r[4]}), witness {r[5]}" for r in rows]
        _emit("\n".join(lines + extra) + "\n", args.out)
    return status


def cmd_kodaira(args) -> int:
    if args.degree:
        try:
            records = json.loads(Path(args.degree).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read fiber list: {exc}") from None
        fibers, multiples = fibers_from_records(records)
        res = elliptic_degree(fibers, multiples)
        text = (f"fibers: {', '.join(f.label for f in fibers) or '-'}; multiple: {multiples or '-'}\n"
                f"discriminant_part = {format_fraction(res.discriminant_part)}\n"
                f"moduli_part = {format_fraction(res.moduli_part)}\n"
                f"total = {format_fraction(res.total)}\n")
        _emit(text, args.out)
        return EXIT_OK
    if not args.type:
        raise UsageError("kodaira needs --type or --degree")
    data = kodaira_preset(args.type, args.b)
    sigma = sigma_coefficient(data)
    text = (f"type: {data.label}\n"
            f"multiplicities: {list(data.multiplicities)}\n"
            f"r: {[format_fraction(x) for x in data.relative_canonical]}\n"
            f"sigma: {format_fraction(sigma)}\n"
            f"j_pole_order: {data.j_pole_order}\n")
    _emit(text, args.out)
    return EXIT_OK


def cmd_integrate(args) -> int:
    model = _load_model(args.model)
    points = _parse_points(args.at, model.m)
    method = "mc" if args.mc else "quad"
    params = FiberIntegralParams(quad_tolerance=args.tol, mc_samples=args.samples, seed=args.seed)
    results = evaluate_batch(model, points, params, method=method)
    rows, status = [], EXIT_OK
    for t, res in zip(points, results):
        pt = ":".join(fmt(x) for x in t)
        if isinstance(res, Exception):
            rows.append([pt, "nan", "", "", f"error: {res}"])
            status = EXIT_INVALID
        elif method == "mc":
            rows.append([pt, fmt(res[0]), fmt(res[1]), "", f"accepted={res.accepted}"])
        else:
            rows.append([pt, fmt(res.value), "", res.region_dim, ";".join(res.flags)])
    _emit(_table(rows, ["point", "value", "stderr", "region_dim", "flags"], args.seed, f"integrate --{method}"),
          args.out)
    return status


def cmd_asymptotics(args) -> int:
    model = _load_model(args.model)
    try:
        u = tuple(Fraction(x.strip()) for x in args.ray.split(","))
    except ValueError:
        raise UsageError(f"cannot parse --ray {args.ray!r}") from None
    grid = _parse_grid(args.grid) if args.grid else None
    ray = Ray(u, grid, args.anchor) if grid else Ray(u, anchor=args.anchor)
    params = FiberIntegralParams(quad_tolerance=args.tol_quad)
    samples = sample_ray(model, ray, params)
    fitted = fit(samples)
    pred = verify_prediction(model, ray, fitted, args.tol)
    lel = lelong_zero_check(samples, pred.alpha_star)
    rows = [[fmt(s), fmt(V), fmt(psi)] for (s, V), (_, psi) in zip(samples, sorted(lel.residual, key=lambda p: -p[0]))]
    table = _table(rows, ["s", "V", "psi_hat"], "-", "asymptotics")
    passed = pred.passed and lel.passed
    report = [
        f"ray u = ({', '.join(format_fraction(x) for x in ray.u)}), {len(samples)} samples",
        f"alpha = {fitted.alpha:.6f} +- {fitted.alpha_stderr:.2e}",
        f"alpha* = {format_fraction(pred.alpha_star)} ({float(pred.alpha_star):.6f}), gap = {pred.gap:.2e}, tol = {args.tol}",
        f"beta = {fitted.beta:.4f} (reported, not asserted)",
        f"lelong-zero residual slope = {lel.slope:.3e} "
        + " ".join(f"eps={e}:{'ok' if ok else 'no'}" for e, ok in lel.by_eps.items()),
        *pred.notes,
        *(f"skipped s = {s}: {msg}" for s, msg in samples.skipped),
        f"verdict: {'PASS' if passed else 'FAIL'}",
    ]
    if args.out:
        Path(args.out).write_text(table)
        print("\n".join(report))
    else:
        sys.stdout.write(table)
        print("\n".join("# " + line for line in report))
    return EXIT_OK if passed else EXIT_FAIL


def cmd_verify_all(args) -> int:
    suite = args.suite
    if suite is not None and not Path(suite).exists():
        raise UsageError(f"suite path {suite} does not exist")
    report = verify_all(suite, args.out, seed=args.seed)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    for r in report.results:
        line = f"{'PASS' if r.passed else 'FAIL'}  {r.kind:<18} {r.name}"
        if not r.passed:
            line += f"  expected {r.expected}, got {r.observed} {r.detail}".rstrip()
        print(line)
    n_fail = len(report.failures)
    print(f"seed={args.seed}  {len(report.results) - n_fail}/{len(report.results)} passed  "
          f"verdict: {'PASS' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cbf", description="Discriminant divisors and fiber integrals of monomial fibrations.")
    p.add_argument("--version", action="version", version=f"cbf {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("discriminant", help="discriminant divisor B_R of a model")
    d.add_argument("model")
    d.add_argument("--check-translation", metavar="S.json", help="base divisor S; check B_{R+f*S} = B_R + S")
    d.add_argument("--check-horizontal", action="store_true", help="perturb horizontal coefficients")
    d.add_argument("--format", choices=("human", "csv"), default="human")
    d.add_argument("--out")
    d.set_defaults(func=cmd_discriminant)

    k = sub.add_parser("kodaira", help="Kodaira fiber presets and the elliptic degree formula")
    k.add_argument("--type", help="I_b, I*_b, II, III, IV, II*, III*, IV* (or I_3, I*_0, ...)")
    k.add_argument("--b", type=int)
    k.add_argument("--degree", metavar="fibers.json", help="list of {type, b?, m?} records")
    k.add_argument("--out")
    k.set_defaults(func=cmd_kodaira)

    i = sub.add_parser("integrate", help="fiber integral V at base points")
    i.add_argument("model")
    i.add_argument("--at", required=True, help="points separated by ',', coordinates by ':'")
    g = i.add_mutually_exclusive_group()
    g.add_argument("--quad", action="store_true", help="reduced nested quadrature (default)")
    g.add_argument("--mc", action="store_true", help="Monte Carlo in the original coordinates")
    i.add_argument("--samples", type=int, default=1_000_000)
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--tol", type=float, default=1e-8)
    i.add_argument("--out")
    i.set_defaults(func=cmd_integrate)

    a = sub.add_parser("asymptotics", help="fit pole order along a ray and compare with B_R")
    a.add_argument("model")
    a.add_argument("--ray", required=True, help="weights u, e.g. 1,0")
    a.add_argument("--grid", help="start:stop:count, geometric (default 1e-1:1e-6:24)")
    a.add_argument("--tol", type=float, default=0.02)
    a.add_argument("--tol-quad", type=float, default=1e-8)
    a.add_argument("--anchor", type=float, default=DEFAULT_ANCHOR, help="|z_i| for coordinates with u_i = 0")
    a.add_argument("--out")
    a.set_defaults(func=cmd_asymptotics)

    v = sub.add_parser("verify-all", help="run a regression suite (bundled by default)")
    v.add_argument("suite", nargs="?")
    v.add_argument("--out", help="directory for results.csv, rays.csv, crosscheck.csv")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify_all)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"cbf: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ModelError as exc:
        print("cbf: invalid model", file=sys.stderr)
        for v in exc.violations or [exc]:
            print(f"  {v}", file=sys.stderr)
        return EXIT_INVALID
    except (CBFError, FileNotFoundError) as exc:
        print(f"cbf: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def run(argv) -> int:
    return main(argv)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
