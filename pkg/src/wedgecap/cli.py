"""Command-line front end wiring profiles, functionals, bounds, blow-up
sweeps, and the solver into reproducible runs.

Every command is deterministic: the same inputs produce byte-identical CSV
files and manifests (repr-formatted numbers, sorted keys, no timestamps).
Angles on the command line are radians unless --degrees is given; config
files are always radians.

Exit codes: 0 success, 1 usage error, 2 malformed profile (including a
missing profile file), 3 numeric-range violation, 4 infeasible fan scan,
5 verification failure, 6 solver non-convergence (artifacts still written).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import io as wio
from .bounds import (
    FanCase,
    InfeasibleScanError,
    adhesion_from_profile,
    case_condition_map,
    default_lambda_grid,
    effective_angle,
    min_admissible_fan,
    required_functional_kind,
)
from .bounds import AdhesionFunction
from .blowup import contradiction_witness, limit_difference_table
from .functionals import (
    SweepConfig,
    best_estimates,
    estimate_AI,
    estimate_AS,
    exact_A_example1,
    exact_A_log_periodic,
    sweep_table,
)
from .profiles import (
    ProfileFormatError,
    WedgeGeometry,
    example1_profile,
    example2_profile,
)
from .solver import (
    SolverConfig,
    build_sector_mesh,
    fans_from_trace,
    manufactured_convergence,
    radial_trace,
    solve_capillary,
    solve_pmc,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PROFILE = 2
EXIT_RANGE = 3
EXIT_INFEASIBLE = 4
EXIT_VERIFY = 5
EXIT_SOLVER = 6

_CASE_ORDER = (FanCase.I, FanCase.D, FanCase.ID, FanCase.DI)


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit 2 on bad usage; this front end reserves 2
    for malformed profiles, so usage errors exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _angle(value: float | None, degrees: bool, default: float) -> float:
    if value is None:
        return default
    return math.radians(value) if degrees else value


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--config", default=None, help="JSON config file (solve)")
    parser.add_argument(
        "--degrees",
        action="store_true",
        help="interpret angle flags as degrees (config files stay radians)",
    )
    parser.add_argument(
        "--tol", type=float, default=None, help="tolerance override (solve)"
    )
    parser.add_argument(
        "--eps-floor",
        type=float,
        default=1e-10,
        help="smallest scale used by averaging sweeps",
    )
    parser.add_argument(
        "--beta-step",
        type=float,
        default=None,
        help="fan-scan step (radians unless --degrees)",
    )


# ---------------------------------------------------------------------------
# profile


def cmd_profile(args) -> int:
    profile = wio.load_profile(args.file)
    if not (0.0 < args.eps_floor < profile.s_max):
        raise ValueError(
            f"--eps-floor must lie in (0, s_max={profile.s_max}), got {args.eps_floor}"
        )
    out = Path(args.out)
    cfg = SweepConfig(
        eps_hi=profile.s_max,
        eps_lo=args.eps_floor,
        points_per_decade=args.points_per_decade,
    )
    eps, avgs = sweep_table(profile, 1.0, cfg)
    sweep_path = wio.write_sweep_csv(out / "sweep.csv", eps, avgs)

    rows = []
    for k in range(1, 21):
        b = k * profile.s_max / 20.0
        lower, upper = best_estimates(
            profile,
            b,
            eps_lo=args.eps_floor,
            points_per_decade=args.points_per_decade,
        )
        rows.append((b, lower.value, upper.value, lower.method, lower.uncertainty))
    fn_path = wio.write_functional_csv(out / "functionals.csv", rows)

    manifest = wio.write_manifest(
        out / "manifest.txt",
        {
            "command": "profile",
            "profile": wio.profile_summary(profile),
            "sweep": {
                "eps_floor": args.eps_floor,
                "points_per_decade": args.points_per_decade,
                "points": int(eps.size),
            },
        },
    )
    for p in (sweep_path, fn_path, manifest):
        print(p)
    return EXIT_OK


# ---------------------------------------------------------------------------
# bounds


def cmd_bounds(args) -> int:
    profiles = {"+": wio.load_profile(args.plus), "-": wio.load_profile(args.minus)}
    beta_step = 1e-3 if args.beta_step is None else (
        math.radians(args.beta_step) if args.degrees else args.beta_step
    )
    cases = _CASE_ORDER if args.case == "all" else (FanCase(args.case),)
    rows = []
    for case in cases:
        for side, cond_kind in case_condition_map(case):
            kind = required_functional_kind(cond_kind)
            A = adhesion_from_profile(
                profiles[side], kind, eps_lo=args.eps_floor
            )
            result = min_admissible_fan(
                A, cond_kind, beta_step=beta_step, side=side, case=case
            )
            m, sigma = effective_angle(A)
            rows.append(
                (
                    side,
                    case.value,
                    result.beta_min,
                    result.method,
                    result.worst_lambda,
                    result.monotone_flag,
                    m,
                    sigma,
                )
            )
    out = Path(args.out)
    csv_path = wio.write_bounds_csv(out / "bounds.csv", rows)
    manifest = wio.write_manifest(
        out / "manifest.txt",
        {
            "command": "bounds",
            "cases": [c.value for c in cases],
            "beta_step": beta_step,
            "profiles": {
                "plus": wio.profile_summary(profiles["+"]),
                "minus": wio.profile_summary(profiles["-"]),
            },
        },
    )
    print(csv_path)
    print(manifest)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify-examples


def _verify_lines(g1: float, g2: float, eps_floor: float) -> list[tuple[str, float, float]]:
    """(label, achieved, allowed) per identity; PASS iff achieved <= allowed."""
    bs = (0.25, 0.5, 0.75)
    ex1_lo = min(g1, g2)
    ex1_hi = max(g1, g2)
    want_ex1 = {b: (b * math.cos(ex1_hi), b * math.cos(ex1_lo)) for b in bs}
    want_ex2 = {
        b: (
            b * (math.cos(g1) / 3.0 + 2.0 * math.cos(g2) / 3.0),
            b * (2.0 * math.cos(g1) / 3.0 + math.cos(g2) / 3.0),
        )
        for b in bs
    }

    err_exact1 = [0.0, 0.0]
    for b in bs:
        lower, upper = exact_A_example1(g1, g2, b)
        err_exact1[0] = max(err_exact1[0], abs(lower.value - want_ex1[b][0]))
        err_exact1[1] = max(err_exact1[1], abs(upper.value - want_ex1[b][1]))

    prof2 = example2_profile(g1, g2)
    err_exact2 = [0.0, 0.0]
    for b in bs:
        lower, upper = exact_A_log_periodic(prof2, b, 4.0)
        err_exact2[0] = max(err_exact2[0], abs(lower.value - want_ex2[b][0]))
        err_exact2[1] = max(err_exact2[1], abs(upper.value - want_ex2[b][1]))

    prof1 = example1_profile(g1, g2)
    rel1 = 0.0
    for b in bs:
        cfg = SweepConfig.for_profile(prof1, b, eps_lo=eps_floor)
        lo = estimate_AI(prof1, b, cfg)
        hi = estimate_AS(prof1, b, cfg)
        worst = max(
            abs(lo.value - want_ex1[b][0]), abs(hi.value - want_ex1[b][1])
        )
        rel1 = max(rel1, worst / (0.05 * b))

    err2 = 0.0
    for b in bs:
        cfg = SweepConfig.for_profile(
            prof2, b, eps_lo=eps_floor, points_per_decade=4096
        )
        lo = estimate_AI(prof2, b, cfg)
        hi = estimate_AS(prof2, b, cfg)
        err2 = max(
            err2, abs(lo.value - want_ex2[b][0]), abs(hi.value - want_ex2[b][1])
        )

    return [
        ("example1 exact A_I", err_exact1[0], 1e-12),
        ("example1 exact A_S", err_exact1[1], 1e-12),
        ("example2 exact A_I", err_exact2[0], 1e-9),
        ("example2 exact A_S", err_exact2[1], 1e-9),
        ("example1 sweep", rel1, 1.0),
        ("example2 sweep", err2, 1e-3),
    ]


def cmd_verify_examples(args) -> int:
    g1 = _angle(args.gamma1, args.degrees, math.pi / 3.0)
    g2 = _angle(args.gamma2, args.degrees, 2.0 * math.pi / 3.0)
    for name, g in (("gamma1", g1), ("gamma2", g2)):
        if not (0.0 <= g <= math.pi):
            raise ValueError(f"--{name} must lie in [0, pi], got {g}")
    if not (0.0 < args.eps_floor < 1.0):
        raise ValueError(f"--eps-floor must lie in (0, 1), got {args.eps_floor}")

    report = []
    all_pass = True
    for label, achieved, allowed in _verify_lines(g1, g2, args.eps_floor):
        ok = achieved <= allowed
        all_pass &= ok
        report.append(
            f"{'PASS' if ok else 'FAIL'} {label}: achieved={achieved!r} "
            f"allowed={allowed!r}"
        )
    text = "\n".join(report)
    print(text)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "verify.txt").write_text(text + "\n")
    return EXIT_OK if all_pass else EXIT_VERIFY


# ---------------------------------------------------------------------------
# solve


def _load_solve_config(args):
    if args.config is None:
        raise _Usage("solve requires --config FILE (or --mms)")
    path = Path(args.config)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise _Usage(f"cannot read config {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise _Usage(f"config {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise _Usage(f"config {path} must hold a JSON object")
    return data, path.parent


def _config_profile(entry, base: Path, side: str):
    if entry is None:
        return None
    if isinstance(entry, str):
        p = Path(entry)
        return wio.load_profile(p if p.is_absolute() else base / p)
    profile = wio.profile_from_dict(entry)
    if profile.side != side:
        raise ProfileFormatError(
            f"profile under key for wall {side!r} declares side {profile.side!r}"
        )
    return profile


class _Usage(Exception):
    pass


def _curvature_for(tag: str, kappa: float, lam: float):
    if tag == "tanh":
        return lambda x, y, t: 0.5 * (kappa * np.tanh(t) + lam)
    if tag == "zero":
        return lambda x, y, t: np.zeros_like(np.asarray(t, dtype=float))
    raise ValueError(f"pmc variant must be 'tanh' or 'zero', got {tag!r}")


def _mirror_profiles(plus, minus) -> bool:
    if plus is None and minus is None:
        return True
    if plus is None or minus is None:
        return False
    return np.array_equal(plus.bounds, minus.bounds) and np.array_equal(
        plus.values, minus.values
    )


def cmd_solve(args) -> int:
    out = Path(args.out)
    if args.mms:
        sizes = tuple(int(s) for s in args.mms_sizes.split(","))
        if len(sizes) < 2 or any(s < 4 for s in sizes):
            raise ValueError(f"--mms-sizes needs >= 2 sizes >= 4, got {sizes}")
        table = manufactured_convergence(sizes)
        rows = []
        for i, (size, err) in enumerate(zip(table["sizes"], table["errors"])):
            rate = math.nan if i == 0 else table["rates"][i - 1]
            rows.append((size, err, rate))
        csv_path = wio.write_csv(out / "mms.csv", ["m", "max_error", "rate"], rows)
        manifest = wio.write_manifest(
            out / "manifest.txt",
            {"command": "solve --mms", **table},
        )
        print(csv_path)
        print(manifest)
        print(f"finest observed order: {table['rates'][-1]!r}")
        return EXIT_OK

    data, base = _load_solve_config(args)
    for key in ("alpha", "plus", "minus"):
        if key not in data:
            raise ProfileFormatError(f"solve config is missing key {key!r}")
    alpha = float(data["alpha"])
    geometry = WedgeGeometry(alpha)
    m = int(data.get("m", 48))
    n_theta = int(data.get("n_theta", 48))
    if m < 2 or n_theta < 2:
        raise ValueError(f"need m, n_theta >= 2, got ({m}, {n_theta})")
    mesh = build_sector_mesh(
        geometry,
        float(data.get("r_min", 0.05)),
        float(data.get("r_max", 1.0)),
        m,
        n_theta,
    )
    plus = _config_profile(data["plus"], base, "+")
    minus = _config_profile(data["minus"], base, "-")
    tol = args.tol if args.tol is not None else float(data.get("tol", 1e-10))
    initial = data.get("initial")
    config = SolverConfig(
        tol=tol,
        max_iter=int(data.get("max_iter", 200)),
        initial=None if initial is None else float(initial),
    )

    pmc = data.get("pmc")
    if pmc is None:
        if "kappa" not in data or "lambda" not in data:
            raise ProfileFormatError("solve config needs kappa and lambda")
        field = solve_capillary(
            mesh, float(data["kappa"]), float(data["lambda"]), plus, minus, config
        )
        physics = {"kappa": float(data["kappa"]), "lambda": float(data["lambda"])}
    else:
        kappa = float(data.get("kappa", 1.0))
        lam = float(data.get("lambda", 0.0))
        if kappa < 0.0:
            raise ValueError(f"kappa must be nonnegative, got {kappa}")
        field = solve_pmc(
            mesh, _curvature_for(str(pmc), kappa, lam), plus, minus, config
        )
        physics = {"pmc": str(pmc), "kappa": kappa, "lambda": lam}

    n_radii = int(data.get("n_radii", min(8, m)))
    trace = radial_trace(field, n_radii, allow_unconverged=True)
    fans = fans_from_trace(trace)

    sym_applicable = _mirror_profiles(plus, minus)
    sym_err = (
        float(np.max(np.abs(field.values - field.values[:, ::-1])))
        if sym_applicable
        else None
    )
    scale = max(1.0, float(np.max(np.abs(field.values))))
    symmetry = {"applicable": sym_applicable}
    if sym_applicable:
        symmetry["max_asymmetry"] = sym_err
        symmetry["verdict"] = "PASS" if sym_err <= 1e-10 * scale else "FAIL"

    sol_path = wio.write_solution_csv(out / "solution.csv", field)
    trace_path = wio.write_trace_csv(out / "trace.csv", trace)
    manifest = wio.write_manifest(
        out / "manifest.txt",
        {
            "command": "solve",
            "mesh": {
                "alpha": alpha,
                "r_min": mesh.r_min,
                "r_max": mesh.r_max,
                "m": m,
                "n_theta": n_theta,
            },
            "physics": physics,
            "profiles": {
                "plus": "closed" if plus is None else wio.profile_summary(plus),
                "minus": "closed" if minus is None else wio.profile_summary(minus),
            },
            "solver": {
                "tol": tol,
                "max_iter": config.max_iter,
                "converged": field.converged,
                "iterations": field.newton_iterations,
                "residual_norm": field.residual_norm,
                "residual_history": list(field.residual_history),
            },
            "diagnostics": dict(field.diagnostics),
            "trace": {
                "n_radii": n_radii,
                "max_residual": float(np.max(trace.residual)),
            },
            "fans": wio.fan_summary(fans),
            "symmetry": symmetry,
        },
    )
    for p in (sol_path, trace_path, manifest):
        print(p)
    if not field.converged:
        print(
            f"solver did not converge within {config.max_iter} iterations "
            f"(residual {field.residual_norm!r})",
            file=sys.stderr,
        )
        return EXIT_SOLVER
    return EXIT_OK


# ---------------------------------------------------------------------------
# blowup


def cmd_blowup(args) -> int:
    case = FanCase(args.case)
    beta = _angle(args.beta, args.degrees, 0.0)
    if not (0.0 <= beta < math.pi):
        raise ValueError(f"--beta must lie in [0, pi), got {beta}")
    if args.points < 8:
        raise ValueError(f"--points must be >= 8, got {args.points}")
    cond_kind = dict(case_condition_map(case))[args.side]
    kind = required_functional_kind(cond_kind)
    if args.gamma0 is not None:
        gamma0 = _angle(args.gamma0, args.degrees, 0.0)
        A = AdhesionFunction.constant_angle(gamma0, kind)
        source = {"constant_gamma": gamma0}
    else:
        profile = wio.load_profile(args.profile)
        A = adhesion_from_profile(profile, kind, eps_lo=args.eps_floor)
        source = {"profile": wio.profile_summary(profile)}

    grid = default_lambda_grid(beta, n=args.points)
    table = limit_difference_table(A, case, args.side, beta, grid)
    witness = contradiction_witness(A, case, args.side, beta, grid)

    out = Path(args.out)
    csv_path = wio.write_limit_sweep_csv(out / "limit_sweep.csv", table)
    sections = {
        "command": "blowup",
        "side": args.side,
        "case": case.value,
        "beta": beta,
        "points": args.points,
        "source": source,
        "verdict": "consistent" if witness is None else "contradiction",
    }
    if witness is not None:
        sections["witness"] = {"lambda": witness[0], "gain": witness[1]}
    manifest = wio.write_manifest(out / "manifest.txt", sections)
    print(csv_path)
    print(manifest)
    if witness is None:
        print("verdict: consistent")
    else:
        print(
            f"verdict: contradiction at lambda={witness[0]!r} gain={witness[1]!r}"
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser assembly


def build_parser() -> _Parser:
    parser = _Parser(
        prog="wedgecap",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="sweep a wall profile and its A curves")
    _common_flags(p)
    p.add_argument("file", help="profile JSON file")
    p.add_argument("--points-per-decade", type=int, default=64)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("bounds", help="minimal admissible fan widths per case")
    _common_flags(p)
    p.add_argument("--plus", required=True, help="profile JSON for the + wall")
    p.add_argument("--minus", required=True, help="profile JSON for the - wall")
    p.add_argument(
        "--case", choices=["I", "D", "ID", "DI", "all"], default="all"
    )
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser(
        "verify-examples", help="recheck the closed-form oscillation identities"
    )
    _common_flags(p)
    p.add_argument("--gamma1", type=float, default=None)
    p.add_argument("--gamma2", type=float, default=None)
    p.set_defaults(func=cmd_verify_examples)

    p = sub.add_parser("solve", help="solve the wedge problem and trace r -> 0")
    _common_flags(p)
    p.add_argument(
        "--mms",
        action="store_true",
        help="run the manufactured-solution convergence study instead",
    )
    p.add_argument("--mms-sizes", default="16,32,64")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("blowup", help="limiting comparison sweep for one wall")
    _common_flags(p)
    p.add_argument("--side", choices=["+", "-"], default="+")
    p.add_argument("--case", choices=["I", "D", "ID", "DI"], required=True)
    p.add_argument("--beta", type=float, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--gamma0", type=float, default=None)
    group.add_argument("--profile", default=None)
    p.add_argument("--points", type=int, default=512)
    p.set_defaults(func=cmd_blowup)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Usage as exc:
        print(f"wedgecap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ProfileFormatError as exc:
        print(f"wedgecap: profile error: {exc}", file=sys.stderr)
        return EXIT_PROFILE
    except InfeasibleScanError as exc:
        print(f"wedgecap: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(f"wedgecap: range error: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except RuntimeError as exc:
        print(f"wedgecap: {exc}", file=sys.stderr)
        return EXIT_RANGE


if __name__ == "__main__":
    raise SystemExit(main())
