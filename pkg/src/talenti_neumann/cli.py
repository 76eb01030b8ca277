"""Command-line interface: reproduce catalog cases, run theorem suites,
sweep parameters, export curves, and self-test the whole build.

Exit codes: 0 = every verdict as expected (including the *expected* failures
of counterexample runs), 1 = an unexpected verdict, 2 = usage errors.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import geometry, grid_solver, theorems
from .errors import DomainError
from .lorentz import LorentzIndex, lorentz_norm, lp_norm
from .measure import (
    SampledFunction,
    decreasing_rearrangement,
    distribution,
    hardy_littlewood_pairing,
    step_sup_distance,
)
from .radial import NormalizationCondition, phi_curve, unit_ball_volume
from .reports import (
    ComparisonReport,
    ConstantCheck,
    write_curves_csv,
    write_profile_csv,
    write_rearranged_csv,
)

THREAD_ENV_VAR = "TALENTI_NEUMANN_THREADS"

_CONFIG_KEYS = ("case", "eps", "a", "cond", "resolution", "out")


def _read_config(path: str) -> dict:
    values = {}
    with open(path) as handle:
        for raw in handle:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"malformed config line: {raw.rstrip()}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _CONFIG_KEYS:
                raise DomainError(f"unknown config key: {key}")
            values[key] = value
    return values


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    if not getattr(args, "config", None):
        return
    values = _read_config(args.config)
    casts = {"eps": float, "a": float, "cond": int, "resolution": int}
    for key, value in values.items():
        if hasattr(args, key) and getattr(args, key) == parser.get_default(key):
            setattr(args, key, casts.get(key, str)(value))


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get(THREAD_ENV_VAR, "1")))
    except ValueError:
        return 1


def _case_from_args(args) -> geometry.ExampleCase:
    return geometry.make_case(str(args.case), eps=args.eps, a=args.a)


# ---------------------------------------------------------------------------
# `example`


def _example_constant_checks(case, vsol) -> list:
    expected = geometry.expected_constants(case)
    checks = []

    def add(label, computed, rtol=1e-12):
        if label in expected:
            checks.append(ConstantCheck(label, expected[label], computed, rtol))

    add("c_star", geometry.case_c_star(case))
    add("v_boundary", vsol.v_m)
    if case.is_ball_case:
        add("inner_profile_constant", vsol.segments[0].const)
        add("outer_log_coefficient", vsol.segments[-1].psi)
        add("outer_inverse_coefficient", -vsol.segments[-1].psi)
        if "u_l1" in expected:
            add("u_l1", geometry.exact_lp_norm_u(case, 1), 1e-9)
        if "v_l1" in expected:
            add("v_l1", vsol.ball_integral_power(1), 1e-9)
    else:
        add("u_l1", geometry.exact_lp_norm_u(case, 1), 1e-9)
        add("v_l1", vsol.ball_integral_power(1), 1e-9)
    return checks


def _cmd_example(args, parser) -> int:
    case = _case_from_args(args)
    cond = args.cond if args.cond is not None else None
    reports = []

    if case.is_ball_case:
        vsol = geometry.solve_symmetrized(case, cond)
        diag = {  # the norms the catalog case was built to probe
            geometry.CaseId.TWO_DISKS_L2.value: (1.0, 2.0),
            geometry.CaseId.TWO_DISKS_L6.value: (2.0, 6.0),
            geometry.CaseId.TWO_BALLS_3D_L1.value: (1.0,),
        }.get(case.case_id, ())
        report = theorems.run_theorem_1_1(
            case, cond or case.default_condition, diagnostics=diag
        )
        report.constants.extend(_example_constant_checks(case, vsol))
        report.residuals["level_set_slack_min"] = theorems.check_level_set_inequality(case)
        reports.append(report)
        try:
            reports.append(theorems.run_counterexample(case))
        except DomainError:
            pass
    else:
        vsol = geometry.solve_symmetrized(case)
        report = ComparisonReport(
            case_id=case.case_id,
            parameters={"n": case.n, "a": case.a, **({"eps": case.eps} if case.eps else {})},
            condition="zero-trace",
            pipeline="grid+analytic",
        )
        report.constants.extend(_example_constant_checks(case, vsol))
        compat = geometry.compatibility_residuals(case)
        report.residuals["compatibility_max"] = max(abs(r) for r in compat)
        sol, closed = grid_solver.solve_rectangle_case(case, args.resolution)
        fd_l1 = grid_solver.l1_norm(sol)
        area = sol.grid.cell_area
        closed_curve = distribution(
            SampledFunction(closed.ravel(), np.full(closed.size, area))
        )
        sup_dist = step_sup_distance(sol.distribution(), closed_curve)
        report.residuals["fd_vs_closed_distribution_sup"] = sup_dist
        report.residuals["fd_l1_norm"] = fd_l1
        if case.case_id == geometry.CaseId.ZERO_MEAN_RECT.value:
            report.constants.append(
                ConstantCheck("fd_u_l1_vs_a^2/12", case.a**2 / 12.0, fd_l1, 1e-2)
            )
            reports.append(theorems.run_counterexample(case))
        else:
            report.notes.append(
                f"trace shift k(a,eps) = {case.u_shift:.12g} (expected <= 0)"
            )
        reports.append(report)

    ok = True
    for report in reports:
        print(report.format_text())
        print()
        ok = ok and report.passed
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# `theorem`


def _cmd_theorem(args, parser) -> int:
    case = _case_from_args(args)
    cond = args.cond if args.cond is not None else (case.default_condition or 1)
    p_grid = None
    if args.p_grid:
        p_grid = [float(tok) for tok in args.p_grid.split(",") if tok]
    runner = theorems.run_theorem_1_1 if args.which == "1.1" else theorems.run_theorem_1_2
    report = runner(
        case, cond, p_grid=p_grid, pipeline=args.pipeline, resolution=args.resolution
    )
    print(report.format_text())
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# `sweep`


def _cmd_sweep(args, parser) -> int:
    values = [float(tok) for tok in args.values.split(",") if tok]
    if not values:
        parser.error("--values must list at least one number")
    norm_power = {"l1": 1, "l2": 2, "l6": 6}[args.norm]
    cond = args.cond
    rows = []
    for value in values:
        eps = value if args.param == "eps" else (args.eps or 1e-2)
        a = value if args.param == "a" else args.a
        case = geometry.make_case(str(args.case), eps=eps, a=a)
        use_cond = cond if cond is not None else case.default_condition
        u_pow = geometry.exact_lp_norm_u(case, norm_power)
        vsol = geometry.solve_symmetrized(case, use_cond)
        v_pow = vsol.ball_integral_power(norm_power)
        rows.append((value, u_pow, v_pow, u_pow - v_pow))
    print(f"# sweep {args.param} case={args.case} norm=||.||_{norm_power}^{norm_power}")
    print(f"{args.param:>12}  {'u_norm_pow':>20}  {'v_norm_pow':>20}  {'gap':>20}")
    for row in rows:
        print(f"{row[0]:>12.6g}  {row[1]:>20.12g}  {row[2]:>20.12g}  {row[3]:>20.12g}")
    if len(rows) >= 2:
        slope, intercept = np.polyfit([r[0] for r in rows], [r[3] for r in rows], 1)
        print(f"# linear fit: gap ~ {intercept:.12g} + {slope:.12g} * {args.param}")
    if args.out:
        with open(args.out, "w", newline="\n") as handle:
            handle.write(f"{args.param},u_norm_pow,v_norm_pow,gap\n")
            for row in rows:
                handle.write(",".join(f"{x:.17g}" for x in row) + "\n")
    return 0


# ---------------------------------------------------------------------------
# `export`


def _cmd_export(args, parser) -> int:
    case = _case_from_args(args)
    cond = args.cond if args.cond is not None else None
    vsol = geometry.solve_symmetrized(case, cond)
    curve_v = phi_curve(vsol)
    curve_u = geometry.mu_curve(case, resolution=args.resolution)
    t_max = max(curve_u.support_max, vsol.v_max)
    ts = np.linspace(0.0, t_max, args.points)
    write_curves_csv(
        args.curves,
        ts,
        np.array([curve_u(t) for t in ts]),
        np.array([curve_v(t) for t in ts]),
    )
    written = [args.curves]
    if args.rearranged:
        total = geometry.domain_measure(case)
        ss = np.linspace(0.0, total, args.points)
        u_sample, _ = geometry.sample_domain(case, args.resolution)
        u_star = decreasing_rearrangement(u_sample)
        omega = unit_ball_volume(case.n)
        v_star = np.array(
            [vsol.value(min((s / omega) ** (1.0 / case.n), vsol.radius)) for s in ss]
        )
        write_rearranged_csv(args.rearranged, ss, np.array([u_star(s) for s in ss]), v_star)
        written.append(args.rearranged)
    if args.profile:
        rs = np.linspace(0.0, vsol.radius, args.points)
        vs = np.array([vsol.value(r) for r in rs])
        dvs = np.array([0.0] + [vsol.derivative(r) for r in rs[1:]])
        write_profile_csv(args.profile, rs, vs, dvs)
        written.append(args.profile)
    for path in written:
        print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# `selftest`


def _selftest_checks(fast: bool):
    resolution = 128 if fast else 512
    variants = 5 if fast else 20

    def measure_core():
        rng = np.random.default_rng(42)
        for _ in range(200):
            k = int(rng.integers(1, 40))
            f = SampledFunction(rng.normal(size=k), rng.uniform(0.01, 1.0, size=k))
            r = decreasing_rearrangement(f)
            curve_f = distribution(f)
            curve_r = distribution(r)
            if not (
                np.array_equal(curve_f.breakpoints, curve_r.breakpoints)
                and np.allclose(
                    curve_f.plateau_measures, curve_r.plateau_measures, rtol=0, atol=0
                )
            ):
                return False, "equimeasurability violated"
            for p in (1.0, 2.0, 6.0):
                direct = f.integral_abs_power(p)
                via = float(np.sum(r.values**p * r.widths))
                if abs(direct - via) > 1e-12 * max(direct, via, 1e-300):
                    return False, f"L^{p} norm not preserved"
            g = SampledFunction(rng.normal(size=k), f.measures)
            lhs, rhs = hardy_littlewood_pairing(f, g)
            if lhs > rhs + 1e-12 * abs(rhs) + 1e-15:
                return False, "Hardy-Littlewood violated"
        return True, "2x200 randomized instances"

    def lorentz_props():
        rng = np.random.default_rng(3)
        for _ in range(100):
            k = int(rng.integers(1, 20))
            f = SampledFunction(rng.uniform(0, 5, size=k), rng.uniform(0.01, 1, size=k))
            d = distribution(f)
            for p in (0.5, 1.0, 2.0):
                exact = f.integral_abs_power(p)
                via = lp_norm(d, p) ** p
                if abs(exact - via) > 1e-12 * max(exact, via, 1e-300):
                    return False, "layer-cake mismatch"
            lam = float(rng.uniform(0.5, 3.0))
            d2 = distribution(f.scaled(lam))
            idx = LorentzIndex(1.5, 2.5)
            a, b = lorentz_norm(d2, idx), lam * lorentz_norm(d, idx)
            if abs(a - b) > 1e-10 * max(a, b, 1e-300):
                return False, "scaling homogeneity violated (finite q)"
            winf = lorentz_norm(d2, LorentzIndex(2.0, math.inf))
            wref = lam**2 * lorentz_norm(d, LorentzIndex(2.0, math.inf))
            if abs(winf - wref) > 1e-10 * max(winf, wref, 1e-300):
                return False, "weak-branch homogeneity degree != p"
        return True, "consistency, scaling, layer-cake on 100 instances"

    def gamma_identity():
        resolution_rec = theorems.resolve_gamma_for_case()
        detail = (
            f"gamma_n resolved to {resolution_rec.resolved_gamma_description} "
            f"(residuals: +2/n -> {resolution_rec.residual_positive:.2e}, "
            f"-2/n -> {resolution_rec.residual_negative:.2e})"
        )
        if resolution_rec.exponent_sign != +1:
            return False, detail
        for number in (1, 2, 3):
            case = geometry.make_example(number)
            vsol = geometry.solve_symmetrized(case)
            from .radial import check_fundamental_identity

            if check_fundamental_identity(vsol) > 1e-8:
                return False, f"identity residual > 1e-8 on case {number}"
        return True, detail

    def example_1():
        case = geometry.make_example(1, eps=1e-3)
        expected = geometry.expected_constants(case)
        computed = geometry.case_c_star(case)
        if abs(computed - expected["c_star"]) > 1e-12:
            return False, "c_star mismatch"
        report = theorems.run_counterexample(case)
        return report.passed, "c_star exact; L2 gap fit within 1%"

    def example_2():
        report = theorems.run_counterexample(geometry.make_example(2))
        return report.passed, "exact-in-eps L1 gap to 1e-9"

    def example_3():
        report = theorems.run_counterexample(geometry.make_example(3))
        return report.passed, "L6 gap fit within 2%"

    def theorem_suite():
        for number in (1, 2, 3):
            for cond in (1, 2):
                report = theorems.run_theorem_1_1(geometry.make_example(number), cond)
                if not report.guaranteed_passed:
                    return False, f"case {number} cond {cond} failed"
        for report in theorems.random_variant_suite(count=variants):
            if not report.guaranteed_passed:
                return False, f"random variant {report.case_id} failed"
        return True, f"examples 1-3 plus {variants} random variants, both conditions"

    def pointwise_suite():
        for name in ("two-disks-f1", "single-disk-f1"):
            for cond in (1, 2):
                report = theorems.run_theorem_1_2(geometry.make_case(name), cond)
                if not report.guaranteed_passed:
                    return False, f"{name} cond {cond} failed"
        report = theorems.run_theorem_1_2(geometry.make_case("two-balls-f1"), 2)
        if not report.guaranteed_passed:
            return False, "two-balls-f1 Lorentz family failed"
        return True, "planar pointwise + 3-D Lorentz families"

    def level_sets():
        for number in (1, 3):
            slack = theorems.check_level_set_inequality(geometry.make_example(number))
            if slack < -1e-9:
                return False, f"negative slack {slack:.2e} on case {number}"
        return True, "slack >= -1e-9 on 200-point grids"

    def closed_forms():
        for number in (1, 2, 3, 4, 5):
            case = geometry.make_example(number)
            if geometry.laplacian_residual(case, points=200) > 1e-9:
                return False, f"PDE residual on case {number}"
            if geometry.neumann_residual(case) > 1e-9:
                return False, f"Neumann residual on case {number}"
            compat = max(abs(r) for r in geometry.compatibility_residuals(case))
            if number in (1, 2, 3) and compat > 1e-10:
                return False, f"compatibility residual on case {number}"
        return True, "PDE/Neumann residuals <= 1e-9, compatibility <= 1e-10"

    def grid_convergence():
        slope, errors = grid_solver.manufactured_convergence()
        ok = abs(slope - 2.0) <= 0.1
        return ok, f"slope {slope:.3f}, errors {['%.2e' % e for e in errors]}"

    def example_5_fd():
        case_ref = geometry.make_example(5)
        report = theorems.run_counterexample(case_ref)
        if not report.passed:
            return False, "crossover/bisection failed"
        a_values = (2.0, 4.0, 8.0)

        def run(a):
            case = geometry.make_example(5, a=a)
            sol, _ = grid_solver.solve_rectangle_case(case, resolution)
            return a, grid_solver.l1_norm(sol)

        workers = _thread_count()
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(run, a_values))
        else:
            results = [run(a) for a in a_values]
        for a, fd in results:
            exact = a * a / 12.0
            if abs(fd - exact) > 1e-2 * exact:
                return False, f"FD L1 at a={a} off by {abs(fd-exact)/exact:.2%}"
        return True, f"FD L1 within 1% at a={list(a_values)}; crossover confirmed"

    def example_4_fd():
        case = geometry.make_example(4, eps=1e-2, a=2.0)
        sol, closed = grid_solver.solve_rectangle_case(case, resolution)
        area = sol.grid.cell_area
        curve_fd = sol.distribution()
        curve_cf = distribution(
            SampledFunction(closed.ravel(), np.full(closed.size, area))
        )
        sup = step_sup_distance(curve_fd, curve_cf)
        total = geometry.domain_measure(case)
        compat = max(abs(r) for r in geometry.compatibility_residuals(case))
        ok = sup <= 0.02 * total
        return ok, f"distribution sup distance {sup:.3e} ({sup/total:.2%} of |domain|), compatibility residual {compat:.2e}"

    def csv_determinism():
        import tempfile

        case = geometry.make_example(1)
        with tempfile.TemporaryDirectory() as tmp:
            paths = [os.path.join(tmp, name) for name in ("a.csv", "b.csv")]
            ts = np.linspace(0.0, 1.5, 64)
            curve = geometry.mu_curve(case)
            for path in paths:
                write_curves_csv(path, ts, curve(ts), curve(ts))
            with open(paths[0], "rb") as fa, open(paths[1], "rb") as fb:
                if fa.read() != fb.read():
                    return False, "byte mismatch"
        return True, "byte-identical rewrites"

    return [
        ("measure-core invariants", measure_core),
        ("lorentz invariants", lorentz_props),
        ("gamma normalization + fundamental identity", gamma_identity),
        ("example 1 reproduction", example_1),
        ("example 2 exact L1 gap", example_2),
        ("example 3 L6 fits", example_3),
        ("theorem 1.1 suite", theorem_suite),
        ("theorem 1.2 suite", pointwise_suite),
        ("level-set inequality", level_sets),
        ("closed-form PDE residuals", closed_forms),
        ("grid convergence", grid_convergence),
        ("example 5 FD + crossover", example_5_fd),
        ("example 4 FD cross-check", example_4_fd),
        ("CSV determinism", csv_determinism),
    ]


def _cmd_selftest(args, parser) -> int:
    t0 = time.perf_counter()
    failures = 0
    for name, check in _selftest_checks(args.fast):
        start = time.perf_counter()
        try:
            ok, detail = check()
        except Exception as exc:  # a crash is a failure, not an abort
            ok, detail = False, f"exception: {exc!r}"
        elapsed = time.perf_counter() - start
        status = "PASS" if ok else "FAIL"
        print(f"[{status}] {name} ({elapsed:.1f}s) - {detail}")
        if not ok:
            failures += 1
    total = time.perf_counter() - t0
    print(f"selftest: {'OK' if failures == 0 else f'{failures} failure(s)'} in {total:.1f}s")
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="talenti-neumann",
        description="Verify Talenti-type comparison principles for Neumann "
        "Poisson problems at desk scale.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key=value config file; flags override")
        p.add_argument("--eps", type=float, default=1e-2, help="perturbation parameter")
        p.add_argument("--a", type=float, default=4.0, help="aspect parameter")
        p.add_argument("--cond", type=int, choices=(1, 2), default=None,
                       help="normalization: 1 = trace integral, 2 = trace squared")
        p.add_argument("--resolution", type=int, default=512)

    p_example = sub.add_parser("example", help="reproduce one catalog case")
    p_example.add_argument("case", help="case number 1-5 or name")
    common(p_example)
    p_example.set_defaults(func=_cmd_example)

    p_theorem = sub.add_parser("theorem", help="run a comparison suite")
    p_theorem.add_argument("which", choices=("1.1", "1.2"))
    p_theorem.add_argument("--case", required=True)
    common(p_theorem)
    p_theorem.add_argument("--p-grid", help="comma-separated p values")
    p_theorem.add_argument("--pipeline", choices=("analytic", "sampled"), default="analytic")
    p_theorem.set_defaults(func=_cmd_theorem)

    p_sweep = sub.add_parser("sweep", help="gap-vs-parameter tables")
    p_sweep.add_argument("--case", required=True)
    common(p_sweep)
    p_sweep.add_argument("--param", choices=("eps", "a"), default="eps")
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.add_argument("--norm", choices=("l1", "l2", "l6"), default="l2")
    p_sweep.add_argument("--out", help="optional CSV output path")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_export = sub.add_parser("export", help="CSV curve dumps")
    p_export.add_argument("--case", required=True)
    common(p_export)
    p_export.add_argument("--curves", required=True, help="t,mu,phi output path")
    p_export.add_argument("--rearranged", help="s,u_star,v_star output path")
    p_export.add_argument("--profile", help="r,v,dv output path")
    p_export.add_argument("--points", type=int, default=1001)
    p_export.set_defaults(func=_cmd_export)

    p_selftest = sub.add_parser("selftest", help="full invariant suite")
    p_selftest.add_argument("--fast", action="store_true",
                            help="reduced resolutions (development aid)")
    p_selftest.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        _apply_config(args, parser)
        return args.func(args, parser)
    except (ValueError, FileNotFoundError) as exc:
        # DomainError/DegenerateConditionError subclass ValueError: all usage
        print(f"error: {exc}", file=sys.stderr)
        return 2


#: spec-facing alias
cli_main = main


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
