"""Command-line entry point: ``intobs design|simulate|verify|example``."""
import argparse
import json
import sys

import numpy as np

from . import errors
from .certificates import design_certificates
from .config import design_bundle, load_config, preset, simulation_config, PRESETS
from .jordan import Real1x1
from .model import validate_scenario
from .simulation import monte_carlo, run_pipeline

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_DESIGN = 3
EXIT_VERIFY = 4

EQUIVALENCE_TOL = 1e-9

_DESIGN_ERRORS = (
    errors.SpectraOverlap,
    errors.NearSingular,
    errors.NotStable,
    errors.NearDefective,
    errors.ZeroObservableRank,
    errors.NotDetectable,
    errors.InvalidGain,
)
_VALIDATION_ERRORS = (
    errors.ValidationError,
    errors.DimensionError,
    errors.OrderingError,
    errors.SignalSyntaxError,
    errors.EnvelopeViolation,
)


def _load(path):
    loaded = load_config(path)
    validate_scenario(loaded.scenario).raise_if_failed()
    return loaded


def _blocks(jt):
    out = []
    for b in jt.blocks:
        if isinstance(b, Real1x1):
            out.append({"kind": "real", "eigenvalue": b.lam})
        else:
            out.append({"kind": "pair", "modulus": b.r, "angle": b.theta,
                        "real": b.alpha, "imag": b.beta})
    return out


def design_document(bundle, certs):
    dec, design, jt = bundle.dec, bundle.design, bundle.jt
    mats = {
        "M_o": dec.M_o, "M_no": dec.M_no, "N_o": dec.N_o, "N_no": dec.N_no,
        "F_o": dec.F_o, "F_noo": dec.F_noo, "F_no": dec.F_no,
        "D_o": dec.D_o, "D_no": dec.D_no, "H_o": dec.H_o,
        "A_o": design.A_o, "B_o": design.B_o, "T": design.T, "Lambda": jt.Lam,
        "V": jt.V,
    }
    return {
        "domain": bundle.domain.value,
        "basis": dec.strategy,
        "observable_rank": dec.n_o,
        "n_o": dec.n_o,
        "n_no": dec.n_no,
        "matrices": {k: np.asarray(v).tolist() for k, v in mats.items()},
        "blocks": _blocks(jt),
        "short_circuit": jt.short_circuit,
        "sigma": jt.sigma,
        "seed": design.seed,
        "certificates": {c.name: c.to_dict() for c in certs},
        "passed": all(c.passed for c in certs),
    }


def _certs(bundle, loaded):
    return design_certificates(bundle, tol=loaded.design.certificate_tol,
                               rcond_min=loaded.design.t_rcond_min)


def csv_lines(traj):
    """Header and data rows; 17 significant digits so values round-trip."""
    n = traj.x.shape[1]
    head = ["t"]
    for i in range(1, n + 1):
        head += [f"x_{i}", f"xupper_{i}", f"xlower_{i}"]
    head += [f"width_{i}" for i in range(1, n + 1)]
    yield ",".join(head)
    width = traj.width
    for k, t in enumerate(traj.times):
        row = [t]
        for i in range(n):
            row += [traj.x[k, i], traj.x_upper[k, i], traj.x_lower[k, i]]
        row += list(width[k])
        yield ",".join(f"{v:.17g}" for v in row)


def write_csv(traj, fh):
    for line in csv_lines(traj):
        fh.write(line + "\n")


def cmd_design(args):
    loaded = _load(args.config)
    bundle = design_bundle(loaded)
    certs = _certs(bundle, loaded)
    doc = design_document(bundle, certs)
    text = json.dumps(doc, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    for c in certs:
        if not c.passed:
            print(f"certificate failed: {c.name} ({c.value:.3e} vs {c.limit:.1e})", file=sys.stderr)
    return EXIT_OK if doc["passed"] else EXIT_DESIGN


def cmd_simulate(args):
    loaded = _load(args.config)
    bundle = design_bundle(loaded)
    cfg = simulation_config(loaded, steps=args.steps, tfinal=args.tfinal, ct_step=args.dt,
                            seed=args.seed)
    traj, report = run_pipeline(loaded.scenario, bundle, cfg, form=args.form)
    report_out = sys.stdout
    if args.out:
        with open(args.out, "w") as fh:
            write_csv(traj, fh)
    else:
        write_csv(traj, sys.stdout)
        report_out = sys.stderr
    print(report.summary(), file=report_out)
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_verify(args):
    loaded = _load(args.config)
    bundle = design_bundle(loaded)
    cfg = simulation_config(loaded, trials=args.trials, seed=args.seed)
    lines = []
    ok = True

    certs = _certs(bundle, loaded)
    failed = [c.name for c in certs if not c.passed]
    ok &= not failed
    lines.append(f"certificates: {len(certs) - len(failed)}/{len(certs)} passed"
                 + (f" (failed: {', '.join(failed)})" if failed else ""))

    runs = {}
    for form in ("cascade", "direct"):
        traj, rep = run_pipeline(loaded.scenario, bundle, cfg, form=form)
        runs[form] = traj
        ok &= rep.ok
        lines.append(f"{form} run: {rep.violations} violations, worst slack {rep.worst_slack:.3e}")

    a, b = runs["cascade"], runs["direct"]
    scale = 1.0 + max(np.abs(a.x_upper).max(), np.abs(a.x_lower).max())
    gap = max(np.abs(a.x_upper - b.x_upper).max(), np.abs(a.x_lower - b.x_lower).max())
    eq_ok = gap <= EQUIVALENCE_TOL * scale
    ok &= eq_ok
    lines.append(f"cascade vs direct: max gap {gap:.3e} ({'ok' if eq_ok else 'FAIL'})")

    mc = monte_carlo(loaded.scenario, bundle, cfg, form="cascade")
    ok &= mc.ok
    lines.append("monte carlo:\n  " + mc.summary().replace("\n", "\n  "))
    lines.append("verification " + ("passed" if ok else "FAILED"))
    print("\n".join(lines))
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_example(args):
    text = json.dumps(preset(args.name), indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="intobs", description="Interval observer design and simulation.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", help="synthesize an observer and write the design document")
    d.add_argument("config")
    d.add_argument("--out")
    d.set_defaults(func=cmd_design)

    s = sub.add_parser("simulate", help="run plant and observer, write a CSV trajectory")
    s.add_argument("config")
    horizon = s.add_mutually_exclusive_group()
    horizon.add_argument("--steps", type=int, help="number of steps")
    horizon.add_argument("--tfinal", type=float, help="final time")
    s.add_argument("--dt", type=float, help="RK4 step size (continuous time)")
    s.add_argument("--form", choices=("cascade", "direct"), default="cascade")
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="certificates, equivalence and Monte Carlo containment")
    v.add_argument("config")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("example", help="write a built-in example config")
    e.add_argument("name", choices=sorted(PRESETS))
    e.add_argument("--out")
    e.set_defaults(func=cmd_example)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _DESIGN_ERRORS as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return EXIT_DESIGN
    except _VALIDATION_ERRORS as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        for diag in getattr(exc, "diagnostics", ()):
            print(f"  {diag}", file=sys.stderr)
        return EXIT_VALIDATION
    except errors.DivergenceError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except OSError as exc:
        print(f"IOError: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
