"""Command-line interface: validate, sweep, mobility, optimize.

All tabular output is CSV with a `# schema=1` first line and the fully
resolved parameter set in `#` comment lines, so any row can be reproduced
from its own file. Exit codes: 0 success, 1 validation mismatch,
2 optimizer non-convergence, 64 bad usage.
"""

from __future__ import annotations

import argparse
import json
import math
import subprocess
import sys
from dataclasses import replace
from datetime import datetime, timezone

import numpy as np

from . import analytics, geometry, montecarlo
from .montecarlo import MCConfig
from .optimizer import NgdConfig, brute_force_search, ngd_optimize
from .protocol import MECHANISMS
from .scenario import OPTIMIZE, Scenario, load_scenario, random_topology

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_NO_CONVERGENCE = 2
EXIT_USAGE = 64

SWEEP_AXES = ("p_max", "theta_u_deg", "xi", "rate_pair")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def _git_revision() -> str:
    try:
        return subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            capture_output=True,
            text=True,
            timeout=2,
        ).stdout.strip() or "unknown"
    except OSError:
        return "unknown"


def _write_csv(out, scenario: Scenario, meta: dict, header: list, rows: list):
    lines = ["# schema=1"]
    for k, v in scenario.to_dict().items():
        lines.append(f"# {k}={v}")
    for k, v in meta.items():
        lines.append(f"# {k}={v}")
    lines.append(f"# revision={_git_revision()}")
    lines.append(f"# generated={datetime.now(timezone.utc).isoformat(timespec='seconds')}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(args) -> Scenario:
    sc = load_scenario(args.config) if args.config else Scenario()
    if getattr(args, "random_topology", None) is not None:
        sc = random_topology(args.random_topology, sc)
    return sc


def _resolve_theta(sc: Scenario, seed: int, warm=None):
    """Fixed split from the scenario, or gradient-ascent when 'optimize'."""
    if not sc.needs_optimization:
        return float(sc.theta1), float(sc.theta2), None
    cfg = NgdConfig(theta0=warm)
    res = ngd_optimize(sc, cfg, np.random.default_rng(seed))
    return res.theta_star[0], res.theta_star[1], res


def cmd_validate(args) -> int:
    sc = _load(args)
    if args.trials < 10_000:
        sys.stderr.write(f"warning: {args.trials} trials give wide confidence intervals\n")
    t1, t2, _ = _resolve_theta(sc, args.seed)
    powers = sc.powers(t1, t2)

    sc_analytic = sc
    if args.debug_tau_scale != 1.0:
        # scale the analytic-side SINR thresholds only (negative-control hook)
        def scaled(r):
            return 0.5 * math.log2(1.0 + args.debug_tau_scale * (2.0 ** (2.0 * r) - 1.0))

        sc_analytic = replace(sc, r_th_c=scaled(sc.r_th_c), r_th_e=scaled(sc.r_th_e))

    ops = analytics.outage_set(sc_analytic, sc_analytic.powers(t1, t2))
    rep = montecarlo.estimate(
        sc, powers, mechanisms=("adm",), config=MCConfig(trials=args.trials, seed=args.seed)
    ).mechanisms["adm"]

    rows = []
    worst = (None, 0.0)
    ok = True
    for name, a, e in (
        ("op_e", ops.op_e, rep.op_e),
        ("op_c1", ops.op_c1, rep.op_c1),
        ("op_c2", ops.op_c2, rep.op_c2),
    ):
        sigma = math.sqrt(max(a * (1.0 - a), 0.0) / args.trials)
        z = abs(a - e) / sigma if sigma > 0 else (0.0 if a == e else math.inf)
        passed = z <= 3.0
        ok &= passed
        if z > worst[1]:
            worst = (name, z)
        rows.append((name, a, e, 3.0 * sigma, z, int(passed)))
    _write_csv(
        args.out,
        sc,
        {"seed": args.seed, "trials": args.trials, "theta1": t1, "theta2": t2},
        ["quantity", "analytic", "empirical", "ci3sigma", "zscore", "pass"],
        rows,
    )
    if not ok:
        sys.stderr.write(f"validation mismatch: {worst[0]} at z={worst[1]:.2f}\n")
        return EXIT_MISMATCH
    return EXIT_OK


def _apply_axis(sc: Scenario, axis: str, value: float) -> Scenario:
    if axis == "p_max":
        return replace(sc, p_max1_dbm=value, p_max2_dbm=value)
    if axis == "xi":
        return replace(sc, xi_u=value, xi_f=value)
    if axis == "theta_u_deg":
        r = math.hypot(sc.pos_u[0], sc.pos_u[1])
        th = math.radians(value)
        return replace(sc, pos_u=(r * math.cos(th), r * math.sin(th), sc.pos_u[2]))
    if axis == "rate_pair":
        # the standard rate pairs keep a 20:1 ratio between the two targets
        return replace(sc, r_th_c=value, r_th_e=value / 20.0)
    raise ValueError(f"unknown axis {axis}")


def cmd_sweep(args) -> int:
    sc = _load(args)
    if args.points < 1:
        raise _UsageError("need at least one sweep point")
    mechanisms = _parse_mechanisms(args.mechanisms)
    values = np.linspace(args.start, args.stop, args.points)

    header = ["axis", "value", "theta1", "theta2"]
    header += ["op_e_analytic", "op_c1_analytic", "op_c2_analytic", "throughput_analytic"]
    if args.trials > 0:
        for mech in mechanisms:
            header += [f"op_e_{mech}", f"op_c1_{mech}", f"op_c2_{mech}", f"throughput_{mech}"]

    rows = []
    warm = None
    for v in values:
        pt = _apply_axis(sc, args.axis, float(v))
        t1, t2, res = _resolve_theta(pt, args.seed, warm)
        if res is not None:
            warm = res.theta_star
        powers = pt.powers(t1, t2)
        ops = analytics.outage_set(pt, powers)
        row = [args.axis, float(v), t1, t2, ops.op_e, ops.op_c1, ops.op_c2]
        row.append(
            analytics.throughput_from_ops(pt.r_th_c, pt.r_th_e, ops.op_e, ops.op_c1, ops.op_c2)
        )
        if args.trials > 0:
            rep = montecarlo.estimate(
                pt, powers, mechanisms, MCConfig(trials=args.trials, seed=args.seed)
            )
            for mech in mechanisms:
                m = rep.mechanisms[mech]
                row += [m.op_e, m.op_c1, m.op_c2, m.throughput]
        rows.append(row)
    _write_csv(
        args.out,
        sc,
        {
            "seed": args.seed,
            "trials": args.trials,
            "axis": args.axis,
            "from": args.start,
            "to": args.stop,
            "points": args.points,
            "mechanisms": ";".join(mechanisms),
        },
        header,
        rows,
    )
    return EXIT_OK


def cmd_mobility(args) -> int:
    sc = _load(args)
    if args.steps < 1:
        raise _UsageError("need at least one step")
    mechanisms = _parse_mechanisms(args.mechanisms)
    topo = sc.topology()
    rng = np.random.default_rng(args.seed)
    state = geometry.rwp_init(topo.pos_u, topo.mobility_radius, sc.v_min, sc.v_max, rng)

    header = ["step", "x_u", "y_u", "z_u", "theta1_star", "theta2_star", "r_star_analytic"]
    header += [f"throughput_{mech}" for mech in mechanisms]
    rows = []
    warm = None
    opt_rng = np.random.default_rng(args.seed + 1)
    for step in range(args.steps):
        pos = state.current
        pt = sc.with_uav(pos)
        # consecutive locations are close: refine the previous optimum with a
        # bounded budget instead of re-running the full search each step
        cfg = NgdConfig() if warm is None else NgdConfig(theta0=warm, max_iter=400)
        res = ngd_optimize(pt, cfg, opt_rng)
        warm = res.theta_star
        powers = pt.powers(*res.theta_star)
        rep = montecarlo.estimate(
            pt, powers, mechanisms, MCConfig(trials=args.trials, seed=args.seed + step)
        )
        row = [step, pos.x, pos.y, pos.z, res.theta_star[0], res.theta_star[1], res.r_star]
        row += [rep.mechanisms[mech].throughput for mech in mechanisms]
        rows.append(row)
        state = geometry.rwp_step(state, rng)
    _write_csv(
        args.out,
        sc,
        {
            "seed": args.seed,
            "trials": args.trials,
            "steps": args.steps,
            "mechanisms": ";".join(mechanisms),
        },
        header,
        rows,
    )
    return EXIT_OK


def cmd_optimize(args) -> int:
    sc = _load(args)
    out = {"p_max1_dbm": sc.p_max1_dbm, "p_max2_dbm": sc.p_max2_dbm, "seed": args.seed}
    exit_code = EXIT_OK

    ngd = bfs = None
    if args.method in ("ngd", "both"):
        res = ngd_optimize(sc, NgdConfig(), np.random.default_rng(args.seed))
        ngd = {
            "theta_star": list(res.theta_star),
            "r_star": res.r_star,
            "iterations": res.iterations,
            "converged": res.converged,
            "grad_norm": res.grad_norm,
            "n_evals": res.n_evals,
        }
        out["ngd"] = ngd
        if not res.converged:
            exit_code = EXIT_NO_CONVERGENCE
    if args.method in ("bfs", "both"):
        res = brute_force_search(sc, args.grid)
        bfs = {
            "theta_star": list(res.theta_star),
            "r_star": res.r_star,
            "n_evals": res.n_evals,
        }
        out["bfs"] = bfs
    if ngd is not None and bfs is not None:
        out["gap"] = abs(ngd["r_star"] - bfs["r_star"])

    text = json.dumps(out, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return exit_code


class _UsageError(Exception):
    pass


def _parse_mechanisms(spec: str):
    mechanisms = tuple(m.strip() for m in spec.split(",") if m.strip())
    for mech in mechanisms:
        if mech not in MECHANISMS:
            raise _UsageError(f"unknown mechanism {mech!r}")
    if not mechanisms:
        raise _UsageError("no mechanisms given")
    return mechanisms


def _build_parser() -> _Parser:
    parser = _Parser(prog="uavnoma", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="scenario JSON file (defaults if omitted)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="output path (stdout if omitted)")
        p.add_argument(
            "--random-topology",
            type=int,
            default=None,
            metavar="SEED",
            help="redraw user positions uniformly in the network area",
        )

    p = sub.add_parser("validate", help="check closed forms against simulation")
    common(p)
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--debug-tau-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sweep", help="sweep one axis, emit analytic/empirical CSV")
    common(p)
    p.add_argument("--axis", choices=SWEEP_AXES, required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--trials", type=int, default=0, help="0 = analytic only")
    p.add_argument("--mechanisms", default="adm")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("mobility", help="optimize and evaluate along a waypoint trace")
    common(p)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--mechanisms", default="adm,d1,d2,d3,d4")
    p.set_defaults(func=cmd_mobility)

    p = sub.add_parser("optimize", help="find the best power split")
    common(p)
    p.add_argument("--method", choices=("ngd", "bfs", "both"), default="both")
    p.add_argument("--grid", type=int, default=101)
    p.set_defaults(func=cmd_optimize)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
