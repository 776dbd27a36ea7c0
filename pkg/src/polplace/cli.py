"""Command-line interface.

Exit codes: 0 success, 1 parse/usage error, 2 not controllable/observable,
3 verification residual exceeded, 4 simulation divergence.
"""
import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .decomposition import (
    CONTROLLER,
    OBSERVER,
    assemble_transform,
    build_chains,
    controllability_matrix,
    observability_matrix,
)
from .errors import (
    DimensionMismatch,
    Divergence,
    FormViolation,
    NotControllable,
    NotObservable,
    PolplaceError,
    SingularTransform,
    UnpairedComplexRoot,
    UnsatisfiablePartition,
)
from .io import (
    parse_poles,
    points_from_json,
    points_to_json,
    read_gains,
    read_system_file,
    write_json,
    write_trace_csv,
)
from .matrix import rank_revealing
from .simulation import default_dt, simulate
from .synthesis import default_observer_poles, design_controller, design_observer
from .verification import RESIDUAL_THRESHOLD, verify_design

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_STRUCTURE = 2
EXIT_RESIDUAL = 3
EXIT_DIVERGED = 4

# options whose values may start with '-' (pole lists, vectors)
_VALUE_OPTS = {"--controller-poles", "--observer-poles", "--x0", "--z0",
               "--input-order", "--output-order"}


class UsageError(Exception):
    pass


def _int_list(text, what):
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{what} must be comma-separated integers, got {text!r}") from None


def _float_list(text, what, n):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{what} must be comma-separated numbers, got {text!r}") from None
    if len(vals) != n:
        raise UsageError(f"{what} needs {n} entries, got {len(vals)}")
    return np.array(vals)


def _orders(args, sysfile):
    m = sysfile.model
    inp = _int_list(args.input_order, "--input-order") if args.input_order else sysfile.input_order
    out = _int_list(args.output_order, "--output-order") if args.output_order else sysfile.output_order
    for order, count, label in ((inp, m.p, "input"), (out, m.q, "output")):
        if order is not None and sorted(order) != list(range(count)):
            raise UsageError(f"{label} order {order} is not a permutation of 0..{count - 1}")
    return inp, out


def _transform_summary(result):
    t = result.transform
    return {
        "structured_gain": result.structured_gain.tolist(),
        "chains": [list(c) for c in t.chains.chains],
        "block_sources": list(t.block_sources),
        "block_boundaries": list(t.block_boundaries),
        "condition": t.condition,
        "form_residual": t.form_residual,
        "partition": [points_to_json(b) for b in result.partition.blocks],
        "residual": result.residual,
    }


def cmd_analyze(args):
    m = read_system_file(args.system).model
    n = m.n
    rank_m, _ = rank_revealing(controllability_matrix(m))
    rank_n, _ = rank_revealing(observability_matrix(m).T)
    print(f"states {n}, inputs {m.p}, outputs {m.q}")
    print(f"controllability rank {rank_m} of {n}")
    print(f"observability rank {rank_n} of {n}")
    for kind, exc_type in ((CONTROLLER, NotControllable), (OBSERVER, NotObservable)):
        try:
            chains = build_chains(m, kind)
        except exc_type as exc:
            print(f"{kind} chains: incomplete, lengths per source {exc.lengths}")
            continue
        t = assemble_transform(m, chains, check=False)
        lengths = ", ".join(f"source {j}: {length}" for j, length in chains.chains)
        print(f"{kind} chains: {lengths}")
        print(f"{kind} transform condition: {t.condition:.6g}")
        for w in t.warnings:
            print(f"warning: {w}")
    if rank_m < n or rank_n < n:
        if rank_m < n:
            print(f"error: controllability rank {rank_m} of {n}", file=sys.stderr)
        if rank_n < n:
            print(f"error: observability rank {rank_n} of {n}", file=sys.stderr)
        return EXIT_STRUCTURE
    return EXIT_OK


def design_document(sysfile, ctrl_poles, obs_poles, input_order=None, output_order=None,
                    ctrl_assignment=None, obs_assignment=None):
    """Design both gains and return the gain-file document."""
    m = sysfile.model
    ctrl = design_controller(m, ctrl_poles, input_order, ctrl_assignment)
    obs = design_observer(m, obs_poles, output_order, obs_assignment)
    report = verify_design(m, ctrl.gain, obs.gain, ctrl_poles, obs_poles)
    report.warnings[:0] = ctrl.warnings + obs.warnings
    return {
        "K": ctrl.gain.tolist(),
        "L": obs.gain.tolist(),
        "controller_poles": points_to_json(ctrl_poles),
        "observer_poles": points_to_json(obs_poles),
        "input_order": input_order,
        "output_order": output_order,
        "controller": _transform_summary(ctrl),
        "observer": _transform_summary(obs),
        "report": report.to_dict(),
    }, report


def cmd_design(args):
    sysfile = read_system_file(args.system)
    ctrl_poles, ctrl_assign = parse_poles(args.controller_poles)
    if args.observer_poles:
        obs_poles, obs_assign = parse_poles(args.observer_poles)
    else:
        obs_poles, obs_assign = default_observer_poles(ctrl_poles), None
    inp, out = _orders(args, sysfile)
    doc, report = design_document(sysfile, ctrl_poles, obs_poles, inp, out, ctrl_assign, obs_assign)
    write_json(args.out, doc)
    _print_report(report)
    return EXIT_OK if report.passed else EXIT_RESIDUAL


def _print_report(report):
    d = report.to_dict()
    print(f"controller: residual {d['controller']['residual']:.3e}, {d['controller']['hurwitz']}")
    print(f"observer:   residual {d['observer']['residual']:.3e}, {d['observer']['hurwitz']}")
    for w in report.warnings:
        print(f"warning: {w}")
    verdict = "passed" if report.passed else "FAILED"
    print(f"verification {verdict} (max residual {report.max_coefficient_residual:.3e}, "
          f"threshold {RESIDUAL_THRESHOLD:g})")


def cmd_verify(args):
    m = read_system_file(args.system).model
    K, L, doc = read_gains(args.gains)
    if args.controller_poles:
        ctrl_poles, _ = parse_poles(args.controller_poles)
    else:
        ctrl_poles = points_from_json(doc.get("controller_poles", []), "controller_poles")
    if args.observer_poles:
        obs_poles, _ = parse_poles(args.observer_poles)
    else:
        obs_poles = points_from_json(doc.get("observer_poles", []), "observer_poles")
    report = verify_design(m, K, L, ctrl_poles, obs_poles)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        _print_report(report)
    return EXIT_OK if report.passed else EXIT_RESIDUAL


def cmd_simulate(args):
    m = read_system_file(args.system).model
    K, L, doc = read_gains(args.gains)
    x0 = _float_list(args.x0, "--x0", m.n)
    z0 = _float_list(args.z0, "--z0", m.n) if args.z0 else np.zeros(m.n)
    dt = args.dt
    if dt is None:
        poles = points_from_json(doc.get("controller_poles", []) + doc.get("observer_poles", []))
        dt = default_dt(poles)
    trace = simulate(m, K, L, x0, z0, dt=dt, duration=args.duration)
    write_trace_csv(trace, args.out)
    print(f"{trace.t.size} samples, dt {dt:g}; final |x| {np.linalg.norm(trace.x[-1]):.3e}, "
          f"|e| {np.linalg.norm(trace.e[-1]):.3e}")
    return EXIT_OK


def _batch_job(system_path, ctrl_arg, obs_arg, out_dir):
    try:
        sysfile = read_system_file(system_path)
        ctrl_poles, ctrl_assign = parse_poles(ctrl_arg)
        if obs_arg:
            obs_poles, obs_assign = parse_poles(obs_arg)
        else:
            obs_poles, obs_assign = default_observer_poles(ctrl_poles), None
        doc, report = design_document(sysfile, ctrl_poles, obs_poles,
                                      sysfile.input_order, sysfile.output_order,
                                      ctrl_assign, obs_assign)
    except Exception as exc:  # noqa: BLE001 - reported per job
        return system_path, _exit_code(exc), str(exc)
    stem = os.path.splitext(os.path.basename(system_path))[0]
    write_json(os.path.join(out_dir, f"{stem}.gains.json"), doc)
    code = EXIT_OK if report.passed else EXIT_RESIDUAL
    return system_path, code, f"residual {report.max_coefficient_residual:.3e}"


def cmd_batch(args):
    os.makedirs(args.out_dir, exist_ok=True)
    jobs = [(p, args.controller_poles, args.observer_poles, args.out_dir) for p in args.systems]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_batch_job, *zip(*jobs)))
    else:
        results = [_batch_job(*job) for job in jobs]
    worst = EXIT_OK
    for path, code, msg in results:
        print(f"{path}: exit {code}: {msg}")
        worst = max(worst, code)
    return worst


def _exit_code(exc):
    if isinstance(exc, (NotControllable, NotObservable)):
        return EXIT_STRUCTURE
    if isinstance(exc, Divergence):
        return EXIT_DIVERGED
    if isinstance(exc, (FormViolation, SingularTransform)):
        return EXIT_RESIDUAL
    if isinstance(exc, (UsageError, DimensionMismatch, UnpairedComplexRoot,
                        UnsatisfiablePartition, PolplaceError, ValueError, OSError)):
        return EXIT_USAGE
    return EXIT_USAGE


def build_parser():
    parser = argparse.ArgumentParser(prog="polplace", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="ranks, chain lengths and transform conditioning")
    p.add_argument("--system", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("design", help="synthesize K and L and verify them")
    p.add_argument("--system", required=True)
    p.add_argument("--controller-poles", required=True, help="pole file or inline list")
    p.add_argument("--observer-poles", help="default: controller poles with real parts x3")
    p.add_argument("--input-order", help="comma-separated input permutation")
    p.add_argument("--output-order", help="comma-separated output permutation")
    p.add_argument("--out", required=True, help="gain file to write (JSON)")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("simulate", help="RK4 trace of the observer-based closed loop")
    p.add_argument("--system", required=True)
    p.add_argument("--gains", required=True)
    p.add_argument("--x0", required=True)
    p.add_argument("--z0")
    p.add_argument("--dt", type=float)
    p.add_argument("--duration", type=float, default=10.0)
    p.add_argument("--out", required=True, help="CSV file to write")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="re-run verification on a gain file")
    p.add_argument("--system", required=True)
    p.add_argument("--gains", required=True)
    p.add_argument("--controller-poles")
    p.add_argument("--observer-poles")
    p.add_argument("--json", action="store_true", help="print the full report as JSON")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("batch", help="design several system files, optionally in parallel")
    p.add_argument("systems", nargs="+")
    p.add_argument("--controller-poles", required=True)
    p.add_argument("--observer-poles")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_batch)
    return parser


def _join_values(argv):
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_OPTS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def run_cli(argv=None):
    """Run one command and return its exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_values(argv))
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (NotControllable, NotObservable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURE
    except Exception as exc:  # noqa: BLE001
        code = _exit_code(exc)
        if code == EXIT_USAGE and not isinstance(exc, (PolplaceError, UsageError, ValueError, OSError)):
            raise
        print(f"error: {exc}", file=sys.stderr)
        return code


def main():
    sys.exit(run_cli())
