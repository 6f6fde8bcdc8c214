"""Command-line entry point.

Commands: classify, verify-hopf, verify-rmatrix, simulate, pde.  Every
command prints (or writes with --out) a JSON report carrying
``"schema": "v1"``.  Exit codes: 0 pass, 1 residual or stability failure,
2 usage error, 3 not implemented.

Options may also come from a JSON file given with --config; flags given on
the command line override it.

CSV outputs
  simulate --csv: t, q1..qN, p1..pN, H, C2_2..C2_N
  pde --csv:      t, x, psi  (t, x, psi_re, psi_im in Schrodinger mode)
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from fractions import Fraction

import numpy as np

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NOT_IMPLEMENTED = 0, 1, 2, 3
NINE = ("alpha", "xi", "nu", "beta1", "beta2", "beta3", "beta4", "beta5", "beta6")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# helpers

def _fraction(v) -> Fraction:
    try:
        return Fraction(str(v))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {v!r}") from None


def _param_values(opts) -> dict[str, Fraction]:
    return {n: _fraction(opts[n]) for n in NINE if opts.get(n) is not None}


def _parse_r(text: str) -> dict[str, Fraction]:
    out = {}
    for item in filter(None, (s.strip() for s in text.replace(";", ",").split(","))):
        if "=" not in item:
            raise UsageError(f"bad r-matrix entry {item!r}; expected e.g. a3=1")
        k, v = (s.strip() for s in item.split("=", 1))
        if k not in {f"a{i}" for i in range(1, 7)} | {f"tau{i}" for i in range(1, 4)}:
            raise UsageError(f"unknown r-matrix coefficient {k!r}")
        out[k] = _fraction(v)
    return out


def _num(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    return x


def emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# classify

def cmd_classify(opts) -> tuple[dict, int]:
    from . import bialgebra as bi

    order = 2
    alg = bi.undeformed(order)
    values = _param_values(opts)
    report = {"schema": "v1", "command": "classify", "parameters": {k: _num(v) for k, v in
                                                                       sorted(values.items())}}
    ok = True

    if opts.get("r"):
        coeffs = _parse_r(opts["r"])
        cand = bi.numeric_r_candidate(coeffs, order)
        m = bi.mcybe_check(cand, alg)
        delta = bi.coboundary_delta(cand.to_tensor(alg), alg)
        report.update({
            "anchors": ["generic skew r-matrix Schouten bracket", "modified classical YBE"],
            "r": {k: _num(v) for k, v in sorted(coeffs.items())},
            "mcybe": "pass" if m["type"] != "fails" else "fail",
            "type": m["type"],
            "schouten": m["schouten"],
            "cocycle": "pass" if bi.is_cocycle(delta) else "fail",
            "coboundary_delta": bi.format_cocommutator(delta),
        })
        ok = report["cocycle"] == "pass"
        return report, EXIT_OK if ok else EXIT_FAIL

    if opts.get("delta") == "zero":
        delta = bi.zero_cocommutator(alg)
        report.update({
            "anchors": ["trivial cocommutator"],
            "family": "trivial",
            "cocycle": "pass" if bi.is_cocycle(delta) else "fail",
            "cojacobi_constraints": [str(c) for c in bi.cojacobi_constraints(delta)],
            "dual_brackets": {},
        })
        return report, EXIT_OK
    if opts.get("delta") not in (None, "nine"):
        raise UsageError(f"unknown --delta {opts['delta']!r}; use 'zero' or 'nine'")

    tag = opts.get("family")
    if tag:
        if tag not in bi.FAMILY_TAGS:
            raise UsageError(f"unknown family {tag!r}; choose from {bi.FAMILY_TAGS}")
        spec = bi.family_spec(tag, order)
        extra = set(values) - set(spec.free_parameters)
        if extra:
            raise UsageError(f"family {tag} has no parameter(s) {sorted(extra)}")
        for n in spec.nonzero:
            if n in values and values[n] == 0:
                raise UsageError(f"family {tag} requires {n} != 0")
        symbolic = spec.check()
        sub = {n: values.get(n, Fraction(0)) for n in spec.free_parameters}
        delta = {g: t.subs(sub) for g, t in spec.delta.items()}
        report.update({
            "anchors": ["four multiparametric bialgebra families", "1-cocycle condition",
                        "co-Jacobi conditions"],
            "family": tag,
            "free_parameters": list(spec.free_parameters),
            "cocycle": "pass" if symbolic["cocycle"] else "fail",
            "cojacobi_constraints": symbolic["cojacobi"],
            "cocommutator": bi.format_cocommutator(delta),
            "dual_brackets": bi.format_dual_brackets(bi.dual_brackets(delta)),
        })
        ok = symbolic["cocycle"] and symbolic["cojacobi_ok"]
        if spec.r is not None:
            r = spec.r.subs(sub)
            m = bi.mcybe_check(r)
            cob = bi.coboundary_delta(r)
            match = bi.cocommutators_equal(cob, delta)
            report["coboundary"] = {"r": str(r), "type": m["type"], "matches_delta": match}
            report["type"] = m["type"]
            ok = ok and match
        report["residuals"] = [] if ok else ["see cocycle/cojacobi fields"]
        return report, EXIT_OK if ok else EXIT_FAIL

    # numeric nine-parameter assignment
    nine = bi.nine_parameter_cocommutator(alg)
    delta = {g: t.subs({n: values.get(n, Fraction(0)) for n in NINE}) for g, t in nine.items()}
    constraints = bi.nine_parameter_constraints(order)
    fvals = {n: float(values.get(n, 0)) for n in NINE}
    cls = bi.classify_parameters(fvals)
    report.update({
        "anchors": ["nine-parameter cocommutator", "co-Jacobi conditions",
                    "four multiparametric bialgebra families"],
        "cocycle": "pass" if bi.is_cocycle(delta) else "fail",
        "cojacobi_constraints": [str(c) for c in constraints],
        "cojacobi_violations": cls["cojacobi_violations"],
        "family": cls["family"],
        "cocommutator": bi.format_cocommutator(delta),
    })
    if "coboundary" in cls:
        r = bi.numeric_r_candidate(cls["r"], order)
        m = bi.mcybe_check(r, alg)
        report["coboundary"] = {"kind": cls["coboundary"], "type": m["type"],
                                "r": {k: _num(_fraction(v)) for k, v in sorted(cls["r"].items())}}
        report["type"] = m["type"]
    ok = report["cocycle"] == "pass" and not cls["cojacobi_violations"]
    return report, EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# hopf / R-matrix

HOPF_ALIASES = {"standard": "Ia-standard", "nonstandard": "Ia-nonstandard",
                "non-standard": "Ia-nonstandard", "none": "undeformed"}


def _first_failure(results: dict) -> dict | None:
    for check, res in results.items():
        if not res["ok"]:
            for pair, lo in res["lowest_nonzero_order"].items():
                if lo is not None:
                    return {"check": check, "pair": pair, "lowest_nonzero_order": lo}
    return None


def cmd_verify_hopf(opts) -> tuple[dict, int]:
    from . import hopf

    tag = HOPF_ALIASES.get(opts["family"], opts["family"])
    order = int(opts["order"])
    report = {"schema": "v1", "command": "verify-hopf", "family": tag, "order": order,
              "anchors": ["quantum coproducts", "deformed commutation rules", "quantum Casimirs",
                          "antipode axiom", "first-order cocommutator limit"]}
    try:
        fam = hopf.build_family(tag, order)
    except NotImplementedError as exc:
        report["status"] = "not-implemented"
        report["notice"] = str(exc)
        return report, EXIT_NOT_IMPLEMENTED
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    results = fam.verify_all()
    report["checks"] = {k: {"ok": v["ok"], "lowest_nonzero_order": v["lowest_nonzero_order"]}
                        for k, v in results.items()}
    fail = _first_failure(results)
    report["status"] = "pass" if fail is None else "fail"
    if fail:
        report["failure"] = fail
    return report, EXIT_OK if fail is None else EXIT_FAIL


def cmd_verify_rmatrix(opts) -> tuple[dict, int]:
    from . import hopf
    from .bialgebra import nonstandard_r, standard_r

    kind = opts["type"].replace("-", "")
    order = int(opts["order"])
    report = {"schema": "v1", "command": "verify-rmatrix", "type": kind, "order": order}
    if kind == "standard":
        fam = hopf.standard_family(order, beta1=False)
        R = hopf.build_standard_R(order, fam)
        r = standard_r(fam.alg, with_beta1=False)
        report["anchors"] = ["standard universal R-matrix", "intertwining property"]
    elif kind == "nonstandard":
        fam = hopf.nonstandard_family(order)
        R = hopf.build_nonstandard_R(order, fam)
        r = nonstandard_r(fam.alg)
        report["anchors"] = ["non-standard universal R-matrix", "intertwining property",
                             "staged conjugation identities"]
    else:
        raise UsageError(f"unknown R-matrix type {opts['type']!r}")
    results = {"intertwining": hopf.verify_intertwining(R, fam)}
    if kind == "nonstandard":
        results["stages"] = hopf.verify_nonstandard_stages(R, fam)
    first = R.tensor.homogeneous(1) - r.rebase(fam.alg)
    results["classical_limit"] = {"ok": first.is_zero(),
                                  "lowest_nonzero_order": {"R-1": None if first.is_zero()
                                                           else first.valuation()}}
    report["checks"] = {k: {"ok": v["ok"], "lowest_nonzero_order": v["lowest_nonzero_order"]}
                        for k, v in results.items()}
    if opts.get("qybe"):
        report["qybe"] = hopf.qybe_report(R)
        report["anchors"].append("quantum Yang-Baxter equation (reported, no verdict)")
    fail = _first_failure(results)
    report["status"] = "pass" if fail is None else "fail"
    if fail:
        report["failure"] = fail
    return report, EXIT_OK if fail is None else EXIT_FAIL


# ---------------------------------------------------------------------------
# simulate

SIM_ALIASES = {"undeformed": "none", "Ia-standard": "standard", "Ia-nonstandard": "nonstandard",
               "non-standard": "nonstandard"}


def cmd_simulate(opts) -> tuple[dict, int]:
    from . import poisson as po

    tag = SIM_ALIASES.get(opts["family"], opts["family"])
    if tag not in po.FAMILIES:
        raise UsageError(f"unknown family {opts['family']!r}; choose from {po.FAMILIES}")
    params = dict(po.DEFAULT_PARAMS[tag])
    for n in NINE:
        if opts.get(n) is not None:
            params[n] = float(opts[n])
    n = int(opts["N"])
    if n < 2:
        raise UsageError("--N must be at least 2")
    rng = np.random.default_rng(int(opts["seed"]))
    if opts.get("masses"):
        masses = [float(v) for v in str(opts["masses"]).split(",")]
        if len(masses) != n:
            raise UsageError("--masses must list N values")
    else:
        masses = [round(float(v), 6) for v in rng.uniform(0.5, 1.5, n)]
    try:
        system = po.build_hamiltonian(po.family(tag, **params), masses, opts["potential"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    points = po.random_points(rng, n, int(opts["points"]))
    cert = po.involution_certificate(system, points, tol=float(opts["tol"]))
    if opts.get("x0"):
        x0 = [float(v) for v in str(opts["x0"]).split(",")]
        if len(x0) != 2 * n:
            raise UsageError("--x0 must list 2N values (q1..qN, p1..pN)")
    else:
        x0 = [round(float(v), 6) for v in rng.uniform(-0.5, 0.5, 2 * n)]
    report = {"schema": "v1", "command": "simulate", "family": tag,
              "parameters": {k: params[k] for k in sorted(params)}, "N": n, "masses": masses,
              "potential": opts["potential"], "x0": x0, "seed": int(opts["seed"]),
              "anchors": ["coalgebra N-particle integrable Hamiltonian",
                          "involution with composed Casimirs"],
              "involution": cert}
    parts = system.energy_parts(x0)
    undeformed_kinetic = sum(p * p / (2 * m) for p, m in zip(x0[n:], masses))
    report["energy_breakdown"] = {**parts, "undeformed_kinetic": undeformed_kinetic}
    try:
        traj = po.integrate(system, x0, float(opts["t_end"]), float(opts["dt"]),
                            method=opts["method"], record_every=int(opts["record_every"]))
    except po.BlowUpError as exc:
        report["status"] = "blow-up"
        report["diagnostics"] = {"message": str(exc), "last_valid_time": exc.last_time}
        return report, EXIT_FAIL
    drift = traj.drift()
    report["conservation"] = {"relative_drift": drift, "tolerance": float(opts["drift_tol"])}
    report["final_state"] = [float(v) for v in traj.states[-1]]
    if opts.get("csv"):
        traj.write_csv(opts["csv"])
        report["csv"] = opts["csv"]
    ok = cert["ok"] and all(v < float(opts["drift_tol"]) for v in drift.values())
    report["status"] = "pass" if ok else "fail"
    return report, EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# pde

MAX_LATTICE_NODES = 1 << 16


def cmd_pde(opts) -> tuple[dict, int]:
    from . import lattice as la

    alpha = float(opts["alpha"])
    if alpha <= 0:
        raise UsageError("--alpha must be positive")
    stride, half = int(opts["stride"]), float(opts["half_width"])
    mode = opts["mode"]
    if mode == "auto":
        nodes = 2 * half / (alpha / (2 * stride))
        mode = "lattice" if nodes <= MAX_LATTICE_NODES else "spectral"
    schro = bool(opts.get("schrodinger"))
    tol = float(opts["tol"])
    try:
        f = la.make_field(la.gaussian(float(opts["width"])), alpha, half, float(opts["mass"]),
                          stride, opts["boundary"], mode, int(opts["n"]))
    except la.GridError as exc:
        raise UsageError(str(exc)) from None
    t_end, dt = float(opts["t_end"]), float(opts["dt"])
    report = {"schema": "v1", "command": "pde", "alpha": alpha, "mode": mode, "nodes": f.n,
              "spacing": f.h, "boundary": f.boundary, "scheme": opts["scheme"],
              "schrodinger": schro, "t_end": t_end, "dt": dt,
              "anchors": ["space-discretized heat-Schrodinger equation",
                          "differential-difference realization of the generators"]}
    ok = True
    snaps = [float(s) for s in str(opts["snapshots"]).split(",") if s.strip()] \
        if opts.get("snapshots") else []
    try:
        fields = la.solve_hse(f, t_end, dt, opts["scheme"], schro, snaps)
    except la.StabilityError as exc:
        report["status"] = "unstable"
        report["diagnostics"] = str(exc)
        return report, EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    final = fields[-1]
    if not schro and f.boundary == "periodic":
        if mode == "lattice":
            exact = la.heat_kernel_solution(final.x, final.t, f.mass, float(opts["width"]))
            report["continuum_max_error"] = float(np.max(np.abs(final.psi - exact)))
        else:
            plain = la.solve_hse(dataclasses.replace(f, alpha=0.0), t_end, dt, opts["scheme"])[-1]
            dev = float(np.max(np.abs(final.psi - plain.psi)))
            report["continuum_max_error"] = dev
            if alpha < 1e-6:
                report["continuum_tolerance"] = 1e-8
                ok = ok and dev < 1e-8
    if mode == "lattice" and f.n <= 4096:
        report["plane_wave_symbol_error"] = la.plane_wave_check(f)
        ok = ok and report["plane_wave_symbol_error"] < 1e-12
    if opts.get("refine"):
        levels = int(opts["refine"])
        study = la.convergence_study(alpha, levels, t=t_end, mass=f.mass, stride=stride,
                                     half_width=max(half, 20.0), width=float(opts["width"]))
        study["window"] = [1.8, 2.2]
        study["ok"] = 1.8 <= study["exponent"] <= 2.2
        report["convergence"] = study
        ok = ok and study["ok"]
    if opts.get("check_symmetry"):
        try:
            sym = la.verify_symmetry(f, t=t_end, schrodinger=schro)
        except la.GridError as exc:
            raise UsageError(str(exc)) from None
        sym["tolerance"] = tol
        sym["ok"] = all(v < tol for v in list(sym["deviation"].values())
                        + list(sym["identities"].values()))
        report["symmetry"] = sym
        ok = ok and sym["ok"]
    if opts.get("csv"):
        la.write_snapshots(opts["csv"], fields)
        report["csv"] = opts["csv"]
    report["status"] = "pass" if ok else "fail"
    return report, EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# argument handling

DEFAULTS = {
    "classify": {},
    "verify-hopf": {"order": 6},
    "verify-rmatrix": {"type": "nonstandard", "order": 6, "qybe": False},
    "simulate": {"family": "standard", "N": 2, "potential": "harmonic", "t_end": 10.0,
                 "dt": 1e-3, "method": "rk4", "seed": 0, "points": 20, "tol": 1e-10,
                 "drift_tol": 1e-8, "record_every": 100},
    "pde": {"alpha": 0.1, "mass": 1.0, "half_width": 10.0, "stride": 1, "width": 1.0,
            "t_end": 0.5, "dt": 0.01, "scheme": "exact", "boundary": "periodic",
            "mode": "auto", "n": 1024, "tol": 1e-8, "schrodinger": False,
            "check_symmetry": False},
}

COMMANDS = {"classify": cmd_classify, "verify-hopf": cmd_verify_hopf,
            "verify-rmatrix": cmd_verify_rmatrix, "simulate": cmd_simulate, "pde": cmd_pde}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_params(p):
    for n in NINE:
        p.add_argument(f"--{n}", default=argparse.SUPPRESS, help=f"value of {n}")


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = _Parser(prog="qgalilei", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", default=S, help="JSON file with options (flags override)")
        p.add_argument("--out", default=S, help="write the JSON report here instead of stdout")

    p = sub.add_parser("classify", help="cocycle, co-Jacobi, family and coboundary analysis")
    common(p)
    p.add_argument("--family", default=S, help="Ia, Ia-standard, Ia-nonstandard, Ib, IIa, IIb")
    p.add_argument("--delta", default=S, help="'zero' for the trivial cocommutator")
    p.add_argument("--r", default=S, help="r-matrix coefficients, e.g. 'a1=1,a3=0,tau3=2'")
    _add_params(p)

    p = sub.add_parser("verify-hopf", help="Hopf-algebra residual suite at truncation order N")
    common(p)
    p.add_argument("--family", default=S, required=False,
                   help="Ia-standard, Ia-nonstandard, Ib, IIb (IIa: not implemented)")
    p.add_argument("--order", type=int, default=S)

    p = sub.add_parser("verify-rmatrix", help="universal R-matrix intertwining and QYBE")
    common(p)
    p.add_argument("--type", default=S, help="standard or nonstandard")
    p.add_argument("--order", type=int, default=S)
    p.add_argument("--qybe", action="store_true", default=S,
                   help="also report the quantum Yang-Baxter residual")

    p = sub.add_parser("simulate", help="N-particle integrable system: certify and integrate",
                       epilog="CSV columns: t, q1..qN, p1..pN, H, C2_2..C2_N",
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    common(p)
    p.add_argument("--family", default=S, help="none, standard, nonstandard, Ib, IIb")
    _add_params(p)
    p.add_argument("--N", type=int, default=S, help="number of particles")
    p.add_argument("--masses", default=S, help="comma-separated masses (default: seeded)")
    p.add_argument("--x0", default=S, help="comma-separated q1..qN,p1..pN (default: seeded)")
    p.add_argument("--potential", default=S,
                   help="harmonic, exponential, cubic, quartic, zero or monomial:K")
    p.add_argument("--t-end", dest="t_end", type=float, default=S)
    p.add_argument("--dt", type=float, default=S)
    p.add_argument("--method", default=S, help="rk4 or midpoint")
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--points", type=int, default=S, help="random points for the certificate")
    p.add_argument("--tol", type=float, default=S, help="relative involution tolerance")
    p.add_argument("--drift-tol", dest="drift_tol", type=float, default=S)
    p.add_argument("--record-every", dest="record_every", type=int, default=S)
    p.add_argument("--csv", default=S, help="trajectory CSV path")

    p = sub.add_parser("pde", help="lattice heat-Schrodinger equation and its symmetry",
                       epilog="CSV columns: t, x, psi (t, x, psi_re, psi_im with --schrodinger)",
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    common(p)
    p.add_argument("--alpha", type=float, default=S, help="deformation parameter")
    p.add_argument("--mass", type=float, default=S)
    p.add_argument("--half-width", dest="half_width", type=float, default=S)
    p.add_argument("--stride", type=int, default=S,
                   help="grid nodes per half-shift; spacing = alpha/(2*stride)")
    p.add_argument("--width", type=float, default=S, help="initial Gaussian width")
    p.add_argument("--t-end", dest="t_end", type=float, default=S)
    p.add_argument("--dt", type=float, default=S)
    p.add_argument("--scheme", default=S, help="exact, cn or explicit")
    p.add_argument("--boundary", default=S, help="periodic or dirichlet")
    p.add_argument("--mode", default=S, help="auto, lattice or spectral")
    p.add_argument("--n", type=int, default=S, help="nodes in spectral mode")
    p.add_argument("--schrodinger", action="store_true", default=S)
    p.add_argument("--refine", type=int, default=S, help="levels of alpha refinement")
    p.add_argument("--check-symmetry", dest="check_symmetry", action="store_true", default=S)
    p.add_argument("--snapshots", default=S, help="comma-separated snapshot times")
    p.add_argument("--tol", type=float, default=S)
    p.add_argument("--csv", default=S, help="snapshot CSV path")
    return parser


def resolve_options(argv) -> dict:
    args = vars(build_parser().parse_args(argv))
    cmd = args.pop("command")
    opts = dict(DEFAULTS[cmd])
    if "config" in args:
        try:
            with open(args["config"]) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        cfg.pop("command", None)
        opts.update({k.replace("-", "_"): v for k, v in cfg.items()})
    opts.update(args)
    opts["command"] = cmd
    if cmd == "verify-hopf" and "family" not in opts:
        raise UsageError("verify-hopf needs --family")
    return opts


def main(argv=None) -> int:
    try:
        opts = resolve_options(sys.argv[1:] if argv is None else argv)
        report, code = COMMANDS[opts["command"]](opts)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    emit(report, opts.get("out"))
    return code


if __name__ == "__main__":
    sys.exit(main())
