"""Command-line front end emitting deterministic JSON reports.

Every subcommand runs a module operation, packages inputs, outputs and
pass/fail checks into a report, and exits 0 (all checks pass), 1 (a check
failed) or 2 (usage or configuration error).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import __version__, constants, gauge, gaussian, hermite, quadform, sim


def _round15(x):
    """Normalize floats to 15 significant digits for stable serialization."""
    if isinstance(x, float):
        return float(f"{x:.15g}")
    if isinstance(x, dict):
        return {k: _round15(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round15(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_round15(float(v)) for v in x.ravel()]
    if isinstance(x, (np.floating,)):
        return _round15(float(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


class Checks:
    """Accumulates named comparisons for the report's check table."""

    def __init__(self):
        self.rows = []

    def add(self, name, computed, reference, tolerance):
        ok = abs(computed - reference) <= tolerance
        self.rows.append(
            {
                "name": name,
                "computed": computed,
                "reference": reference,
                "tolerance": tolerance,
                "pass": bool(ok),
            }
        )
        return ok

    def add_bool(self, name, ok):
        self.rows.append(
            {"name": name, "computed": bool(ok), "reference": True,
             "tolerance": 0.0, "pass": bool(ok)}
        )
        return ok

    @property
    def all_pass(self) -> bool:
        return all(r["pass"] for r in self.rows)


def emit_report(command, inputs, outputs, references, checks, started, args):
    report = {
        "command": command,
        "version": __version__,
        "inputs": inputs,
        "outputs": outputs,
        "references": references,
        "checks": checks.rows,
        "elapsed_ms": int(1000 * (time.time() - started)),
    }
    text = json.dumps(_round15(report), sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if checks.all_pass else 1


def cmd_constants(args, started):
    checks = Checks()
    outputs = {}
    for dim in ([args.dim] if args.dim else [1, 2]):
        rep = constants.strichartz_report(dim)
        outputs[f"C_S_dim{dim}"] = rep.closed_form_value
        outputs[f"C_S_quadrature_dim{dim}"] = rep.quadrature_value
        checks.add(f"C_S cross-check dim={dim}", rep.quadrature_value,
                   rep.closed_form_value, 1e-10)
        dn = constants.d_n_report(dim, terms=args.terms)
        outputs[f"D_{dim}"] = dn.closed_form_value
        outputs[f"D_{dim}_alternate"] = dn.series_value
        outputs[f"D_{dim}_duhamel"] = dn.quadrature_value
        outputs.update({f"D_{dim}_{k}": v for k, v in dn.extras.items()})
        checks.add(f"D_{dim} route agreement", dn.series_value,
                   dn.closed_form_value, 1e-8)
        checks.add(f"D_{dim} Duhamel quadrature", dn.quadrature_value,
                   dn.closed_form_value, 1e-6)
    references = {
        "C_S": {"dim1": 1 / math.sqrt(3), "dim2": 0.5},
        "D_N": {"dim1": 0.0867, "dim2": 0.045785},
    }
    return emit_report("constants", {"dim": args.dim, "terms": args.terms},
                       outputs, references, checks, started, args)


def cmd_hermite(args, started):
    checks = Checks()
    cutoff = args.cutoff or 64
    rule = hermite.gauss_hermite_rule(2 * cutoff + 16)
    H = hermite.hermite_matrix(cutoff, rule.nodes)
    G = (H * rule.total_weights[:, None]).T @ H / math.sqrt(math.pi)
    checks.add("orthonormality", float(np.max(np.abs(G - np.eye(cutoff)))),
               0.0, 1e-12)
    wang_err = max(
        abs(hermite.wang_diagonal(j) - quadform.overlap_integral(1.0, j, j))
        / hermite.wang_diagonal(j)
        for j in range(31)
    )
    checks.add("Wang diagonal closed form vs quadrature", wang_err, 0.0, 1e-10)
    big = hermite.gauss_hermite_rule(120)
    alpha_err = max(
        abs(hermite.alpha_coefficient(j)
            - hermite.alpha_coefficient_quadrature(2 * j, big))
        for j in range(16)
    )
    checks.add("alpha coefficients closed form vs quadrature", alpha_err,
               0.0, 1e-9)
    for dim in (1, 2):
        y = rule.nodes
        w = rule.total_weights
        if dim == 1:
            gsq = math.pi**-0.5 * np.exp(-(y**2))
            m0 = float(w @ gsq)
            m2 = float(w @ (y**2 * gsq))
            m4 = float(w @ (y**4 * gsq))
        else:
            gsq = math.pi**-1.0 * np.exp(-(y[:, None] ** 2 + y[None, :] ** 2))
            r2 = y[:, None] ** 2 + y[None, :] ** 2
            m0 = float(w @ gsq @ w)
            m2 = float(w @ (r2 * gsq) @ w)
            m4 = float(w @ (r2**2 * gsq) @ w)
        checks.add(f"moment 0 dim={dim}", m0, 1.0, 1e-10)
        checks.add(f"moment 2 dim={dim}", m2, dim / 2.0, 1e-10)
        checks.add(f"moment 4 dim={dim}", m4, dim * (dim + 2) / 4.0, 1e-10)
    outputs = {"cutoff": cutoff, "rule_order": rule.order}
    return emit_report("hermite", {"cutoff": cutoff}, outputs, {},
                       checks, started, args)


def cmd_qform(args, started):
    checks = Checks()
    dim = args.dim or 1
    cutoff = args.cutoff or (24 if dim == 1 else 12)
    outputs = {}
    if dim == 1:
        unit = lambda j: hermite.SpectralState(np.eye(cutoff, dtype=complex)[j])
        q3, q4 = quadform.q_eval(unit(3)), quadform.q_eval(unit(4))
        outputs["Q_h3"], outputs["Q_h4"] = q3, q4
        checks.add("Q(h_3)", q3, 2 * math.sqrt(math.pi) / (3 * math.sqrt(3)),
                   1e-10)
        checks.add("Q(h_4)", q4, 8 * math.sqrt(math.pi) / (9 * math.sqrt(3)),
                   1e-10)
        positive = all(quadform.q_diag_1d(j) > 0 for j in range(3, 101))
        checks.add_bool("Q(h_j) > 0 for 3 <= j <= 100", positive)
    else:
        vals = {}
        for j, k in ((1, 1), (2, 1), (3, 2)):
            c = np.zeros((cutoff, cutoff), complex)
            c[j, k] = 1.0
            vals[f"Q_h{j}{k}"] = quadform.q_eval(hermite.SpectralState(c))
            checks.add(f"Q(h_{j}{k}) closed form", vals[f"Q_h{j}{k}"],
                       quadform.q_diag_2d(j, k), 1e-10)
        outputs.update(vals)
    for state in quadform.kernel_states(dim, max(cutoff, 8)):
        nrm = math.sqrt(state.mass)
        val = abs(quadform.q_eval(state * (1.0 / nrm)))
        if not checks.add("kernel direction |Q|", val, 0.0, 1e-8):
            break
    return emit_report("qform", {"dim": dim, "cutoff": cutoff}, outputs, {},
                       checks, started, args)


TABLE_F = {
    (3, 0): 0.841, (3, 1): 0.591, (3, 2): 0.591, (3, 3): 0.841,
    (4, 0): 0.785, (4, 1): 0.5, (4, 2): 0.664, (4, 3): 0.5, (4, 4): 0.785,
    (5, 0): 0.718, (5, 1): 0.492, (5, 2): 0.573, (5, 3): 0.573,
    (5, 4): 0.492, (5, 5): 0.718,
    (6, 0): 0.673, (6, 1): 0.454, (6, 2): 0.563, (6, 3): 0.495,
    (6, 4): 0.563, (6, 5): 0.454, (6, 6): 0.673,
}


def cmd_table_f(args, started):
    checks = Checks()
    m_min, m_max = args.m_min or 3, args.m_max or 6
    rows = []
    for m in range(m_min, m_max + 1):
        for j in range(m + 1):
            val = quadform.f_script(m, j)
            rows.append({"m": m, "j": j, "value": val})
            if (m, j) in TABLE_F:
                # published values are truncated at 3 decimals
                checks.add(f"F({m},{j})", val, TABLE_F[(m, j)], 1e-3)
    if args.csv:
        print("m,j,value")
        for r in rows:
            print(f"{r['m']},{r['j']},{r['value']:.15g}")
        return 0 if checks.all_pass else 1
    return emit_report("table-f", {"m_min": m_min, "m_max": m_max},
                       {"rows": rows}, {"published": "3 d.p. values"},
                       checks, started, args)


def cmd_coercivity(args, started):
    checks = Checks()
    dim = args.dim or 1
    cutoff = args.cutoff or (64 if dim == 1 else 24)
    rep = quadform.coercivity_certificate(dim, cutoff)
    checks.add_bool("certificate valid", rep.valid)
    checks.add("max kernel residual", float(rep.kernel_residuals.max()),
               0.0, 1e-8)
    if dim == 1:
        checks.add("c_min", rep.c_min, 2.0 / (3 * math.sqrt(3)), args.tol or 1e-6)
    else:
        checks.add_bool("c_min > 0", rep.c_min > 0)
    outputs = {
        "c_min": rep.c_min,
        "tail_index": rep.tail_index,
        "tail_min": rep.tail_min,
        "certified_c": rep.certified_c,
    }
    return emit_report("coercivity", {"dim": dim, "cutoff": cutoff}, outputs,
                       {"c_min_1d": 2.0 / (3 * math.sqrt(3))},
                       checks, started, args)


def cmd_combinatorics(args, started):
    checks = Checks()
    m_max = args.m_max or 25
    binom = quadform.central_binomial_bound_check(m_max)
    comb = quadform.combinatorics_check(m_max)
    checks.add_bool("central binomial bound", binom["passed"])
    checks.add_bool("equality at m=1", binom["equality_at"] == [1])
    checks.add_bool("binomial sum inequality", comb["passed"])
    return emit_report("combinatorics", {"m_max": m_max},
                       {"central_binomial": binom, "binomial_sum": comb}, {},
                       checks, started, args)


def cmd_simulate(args, started):
    checks = Checks()
    config = sim.SimConfig(
        dim=args.dim or 1,
        delta=args.delta if args.delta is not None else 0.1,
        gamma=args.gamma,
        cutoff=args.cutoff or 0,
        steps=args.steps or 4096,
    )
    traj = sim.evolve(config)
    norm = sim.spacetime_norm(traj)
    checks.add("mass drift", traj.mass_drift, 0.0, 1e-9)
    outputs = {
        "final_mass": float(traj.masses[-1]),
        "mass_drift": traj.mass_drift,
        "spacetime_norm": norm,
    }
    inputs = {"dim": config.dim, "delta": config.delta, "gamma": config.gamma,
              "cutoff": config.cutoff, "steps": config.steps}
    return emit_report("simulate", inputs, outputs, {}, checks, started, args)


def cmd_expansion(args, started):
    checks = Checks()
    deltas = args.deltas or [0.2, 0.1, 0.05]
    rep = sim.expansion_experiment(args.dim or 1, args.gamma, deltas,
                                   cutoff=args.cutoff or 0,
                                   steps=args.steps or 4096)
    checks.add("extrapolated vs reference (relative)", rep.relative_error,
               0.0, args.tol or 0.1)
    outputs = {
        "deltas": list(rep.deltas),
        "s_values": list(rep.s_values),
        "d_values": list(rep.d_values),
        "extrapolated": rep.extrapolated,
        "reference": rep.reference,
        "relative_error": rep.relative_error,
        "monotone": rep.monotone,
    }
    inputs = {"dim": rep.dim, "gamma": rep.gamma, "deltas": list(deltas)}
    return emit_report("expansion", inputs, outputs,
                       {"D_1": 0.0867, "D_2": 0.045785}, checks, started, args)


def cmd_perturbation(args, started):
    checks = Checks()
    dim = args.dim or 1
    deltas = args.deltas or [0.3, 0.2, 0.1]
    rep = sim.perturbation_order_check(dim, deltas, cutoff=args.cutoff or 0,
                                       steps=args.steps or 4096)
    threshold = (1.0 + 8.0 / dim) - 0.2
    checks.add_bool(f"slope >= {threshold}", rep["slope"] >= threshold)
    return emit_report("perturbation", {"dim": dim, "deltas": list(deltas)},
                       rep, {"expected_slope": rep["expected_slope"]},
                       checks, started, args)


def cmd_gauge_fix(args, started):
    checks = Checks()
    dim = args.dim or 1
    delta = args.delta if args.delta is not None else 0.1
    cutoff = args.cutoff or 32
    if args.datum:
        with open(args.datum) as fh:
            pairs = json.load(fh)
        arr = np.array([complex(a, b) for a, b in pairs])
        shape = (cutoff,) if dim == 1 else (cutoff, cutoff)
        f = hermite.SpectralState(arr.reshape(shape))
    else:
        f = gaussian.gaussian_datum(dim, cutoff)
    tol = args.tol or 1e-8
    result = gauge.newton_gauge_fix(delta, f, tol=tol)
    checks.add("final residual", result.residual_norm, 0.0, tol)
    outputs = {
        "theta": result.params.theta,
        "rho": result.params.rho,
        "xi": list(result.params.xi),
        "x0": list(result.params.x0),
        "t0": result.params.t0,
        "residual": list(result.residual),
        "iterations": result.iterations,
    }
    return emit_report("gauge-fix",
                       {"dim": dim, "delta": delta, "cutoff": cutoff,
                        "tol": tol},
                       outputs, {}, checks, started, args)


def cmd_selftest(args, started):
    """Aggregate the fast acceptance checks; sim experiments with --full."""
    checks = Checks()
    rep1 = constants.strichartz_report(1)
    rep2 = constants.strichartz_report(2)
    checks.add("C_S dim=1", rep1.quadrature_value, rep1.closed_form_value, 1e-10)
    checks.add("C_S dim=2", rep2.quadrature_value, rep2.closed_form_value, 1e-10)
    checks.add("D_1 series", constants.d1_series(200), 0.0867, 5e-5)
    checks.add("D_2 integral vs closed", constants.d2_integral(),
               constants.d2_closed(), 1e-8)
    checks.add("D_1 Duhamel", constants.d_n_duhamel(1),
               constants.d1_series(400), 1e-6)
    q3 = quadform.q_eval(hermite.SpectralState(np.eye(16, dtype=complex)[3]))
    checks.add("Q(h_3)", q3, 2 * math.sqrt(math.pi) / (3 * math.sqrt(3)), 1e-10)
    for (m, j), ref in TABLE_F.items():
        if not checks.add(f"F({m},{j})", quadform.f_script(m, j), ref, 1e-3):
            break
    cert = quadform.coercivity_certificate(1, 64)
    checks.add("1D c_min", cert.c_min, 2.0 / (3 * math.sqrt(3)), 1e-6)
    checks.add_bool("combinatorics m<=25",
                    quadform.combinatorics_check(25)["passed"])
    checks.add_bool("central binomial m<=25",
                    quadform.central_binomial_bound_check(25)["passed"])
    f = gaussian.gaussian_datum(1, 32)
    res = gauge.phi_residual(0.1, gauge.SymmetryParams.identity(1), f)
    checks.add("gauge residual at reference", float(np.max(np.abs(res))),
               0.0, 1e-8)
    if args.full:
        checks.add("D_2 Duhamel", constants.d_n_duhamel(2),
                   constants.d2_closed(), 1e-6)
        for dim in (1, 2):
            exp = sim.expansion_experiment(dim, 1.0, [0.2, 0.1, 0.05])
            checks.add(f"expansion dim={dim}", exp.relative_error, 0.0, 0.1)
            pert = sim.perturbation_order_check(dim)
            checks.add_bool(
                f"perturbation slope dim={dim}",
                pert["slope"] >= (1.0 + 8.0 / dim) - 0.2,
            )
    return emit_report("selftest", {"full": bool(args.full)}, {}, {},
                       checks, started, args)


COMMANDS = {
    "constants": cmd_constants,
    "hermite": cmd_hermite,
    "qform": cmd_qform,
    "table-f": cmd_table_f,
    "coercivity": cmd_coercivity,
    "combinatorics": cmd_combinatorics,
    "simulate": cmd_simulate,
    "expansion": cmd_expansion,
    "perturbation": cmd_perturbation,
    "gauge-fix": cmd_gauge_fix,
    "selftest": cmd_selftest,
}


def _parse_deltas(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad delta list {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty delta list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlsmax",
        description="Spectral verification toolkit for Strichartz-norm "
                    "maximization of the mass-critical NLS",
    )
    parser.add_argument("--config", help="JSON file with flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--dim", type=int, choices=(1, 2))
        p.add_argument("--cutoff", type=int)
        p.add_argument("--steps", type=int)
        p.add_argument("--delta", type=float)
        p.add_argument("--deltas", type=_parse_deltas)
        p.add_argument("--gamma", type=float, default=1.0)
        p.add_argument("--terms", type=int, default=200)
        p.add_argument("--m-min", dest="m_min", type=int)
        p.add_argument("--m-max", dest="m_max", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--datum", help="JSON [re, im] coefficient pairs")
        p.add_argument("--csv", action="store_true")
        p.add_argument("--json", action="store_true")
        p.add_argument("--out")
        p.add_argument("--full", action="store_true")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if "--config" in argv:
        idx = argv.index("--config")
        try:
            with open(argv[idx + 1]) as fh:
                defaults = json.load(fh)
        except (OSError, IndexError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 2
        for action in parser._subparsers._group_actions[0].choices.values():
            action.set_defaults(**{
                k: v for k, v in defaults.items()
                if any(a.dest == k for a in action._actions)
            })
        del argv[idx : idx + 2]
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    started = time.time()
    try:
        return COMMANDS[args.command](args, started)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
