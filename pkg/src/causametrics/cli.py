"""Command-line interface.

Exit codes: 0 success, 1 domain failure (invalid W, violated hypothesis,
inconsistent profiles, failed check), 2 usage error.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import capacity as cap
from . import io
from .harmonic import PRESETS, HarmonicModel, reduce
from .measures import axiom_suite, build_measure, evaluate, sample_family
from .oracle import oracle_report
from .process import InstrumentElement, ProcessMatrix, can_signal, joint_probability, validate
from .reconstruct import CapacityProfile, recover, recover_model
from .tensor import matrix_from_json


class DomainFailure(Exception):
    pass


def _add_model_args(p: argparse.ArgumentParser, need_model: bool = True):
    p.add_argument("--model", help="HarmonicModel JSON file")
    p.add_argument("--p1", type=float, help="forward branch weight |alpha_1|^2")
    p.add_argument("--p2", type=float, default=0.0, help="backward branch weight |alpha_2|^2")
    p.add_argument("--dim", type=int, help="local dimension d")
    p.add_argument("--preset", choices=PRESETS, default="product")


def _model(args, parser) -> HarmonicModel:
    if args.model:
        return HarmonicModel.from_json(io.load_json(args.model))
    if args.p1 is None or args.dim is None:
        parser.error("give --model or both --p1 and --dim")
    p3 = 1 - args.p1 - args.p2
    if args.p1 < 0 or args.p2 < 0 or p3 < -1e-12:
        raise DomainFailure("need p1, p2 >= 0 with p1 + p2 <= 1")
    return HarmonicModel.from_probabilities([args.p1, args.p2, max(p3, 0.0)], args.dim, args.preset)


def _process(path: str) -> ProcessMatrix:
    return ProcessMatrix.from_json(io.load_json(path))


def _grid(args) -> np.ndarray:
    return cap.default_grid(args.n, args.lo, args.hi)


def _add_grid_args(p):
    p.add_argument("--n", type=int, default=101, help="number of eps grid points")
    p.add_argument("--lo", type=float, default=0.005)
    p.add_argument("--hi", type=float, default=0.995)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="causametrics", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("validate", help="check that a process matrix is valid")
    p.add_argument("--in", dest="path", required=True)
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("prob", help="joint outcome probability of two instrument elements")
    p.add_argument("--in", dest="path", required=True)
    p.add_argument("--a-choi", required=True, help="Matrix JSON of A's element on a1 a2")
    p.add_argument("--b-choi", required=True, help="Matrix JSON of B's element on b1 b2")

    p = sub.add_parser("signal", help="can one party signal to the other")
    p.add_argument("--in", dest="path", required=True)
    p.add_argument("--dir", default="fwd")
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("build", help="write a harmonic model or its process matrix")
    _add_model_args(p)
    p.add_argument("--phases", type=float, nargs=3, default=(0.0, 0.0, 0.0), metavar="PHI")
    p.add_argument("--reduce", action="store_true", help="emit the process matrix instead of the model")
    p.add_argument("--out")

    p = sub.add_parser("capacity", help="closed-form one-shot capacity")
    _add_model_args(p)
    p.add_argument("--task", choices=("ent", "sub"), required=True)
    p.add_argument("--dir", default="fwd")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--rho-b1-mixed", action="store_true", help="assert rho_b1 is maximally mixed")
    p.add_argument("--rho-a1-mixed", action="store_true", help="assert rho_a1 is maximally mixed")

    p = sub.add_parser("capacity-table", help="CSV of capacities over an eps grid")
    _add_model_args(p)
    _add_grid_args(p)
    p.add_argument("--out")

    p = sub.add_parser("oracle", help="compare the closed form against protocol simulation")
    _add_model_args(p)
    p.add_argument("--m", type=int, required=True, help="code dimension")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--dir", default="fwd")

    p = sub.add_parser("reconstruct", help="recover |alpha_i| and d from capacity profiles")
    _add_model_args(p)
    p.add_argument("--fwd-csv", help="sampled forward profile (epsilon,q)")
    p.add_argument("--bwd-csv", help="sampled backward profile (epsilon,q)")
    p.add_argument("--tol-eps", type=float, default=1e-4)

    p = sub.add_parser("measure", help="evaluate a causality measure")
    _add_model_args(p)
    p.add_argument("--in", dest="path", help="process matrix JSON (indicator measures only)")
    p.add_argument("--measure", required=True, choices=("zero", "signalling", "q_signalling", "capacity"))
    p.add_argument("--task", choices=("ent", "sub"), default="ent")
    p.add_argument("--epsilon", type=float, default=0.3)
    p.add_argument("--direction", default="fwd")
    p.add_argument("--normalized", action="store_true")

    p = sub.add_parser("axioms", help="property-test a measure against the axioms")
    p.add_argument("--measure", required=True, choices=("zero", "signalling", "q_signalling", "capacity"))
    p.add_argument("--task", choices=("ent", "sub"), default="ent")
    p.add_argument("--epsilon", type=float, default=0.3)
    p.add_argument("--direction", default="fwd")
    p.add_argument("--normalized", action="store_true")
    p.add_argument("--models", type=int, default=20)
    p.add_argument("--ops", type=int, default=50)
    p.add_argument("--seed", type=int, required=True)
    return parser


def _emit(text: str, out: str | None = None):
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _run(args, parser) -> int:
    verb = args.verb
    if verb == "validate":
        report = validate(_process(args.path), args.tol)
        print(io.dumps(report.to_json()))
        return 0 if report.valid else 1

    if verb == "prob":
        W = _process(args.path)
        mA = InstrumentElement(matrix_from_json(io.load_json(args.a_choi)), "A")
        mB = InstrumentElement(matrix_from_json(io.load_json(args.b_choi)), "B")
        print(io.dumps({"probability": joint_probability(W, mA, mB)}))
        return 0

    if verb == "signal":
        signals, residual = can_signal(_process(args.path), args.dir, args.tol)
        print(io.dumps({"signals": signals, "residual": residual}))
        return 0

    if verb == "build":
        model = _model(args, parser)
        if any(args.phases):
            alpha = tuple(abs(a) * np.exp(1j * ph) for a, ph in zip(model.alpha, args.phases))
            model = HarmonicModel(alpha, model.d, model.psi, model.e3_dim)
        doc = reduce(model).to_json() if args.reduce else model.to_json()
        _emit(io.dumps(doc), args.out)
        return 0

    if verb == "capacity":
        model = _model(args, parser)
        summary = cap.ModelSummary.of(model)
        if args.rho_b1_mixed or args.rho_a1_mixed:
            summary = cap.ModelSummary(summary.p1, summary.p2, summary.d,
                                       summary.rho_b1_is_maximally_mixed or args.rho_b1_mixed,
                                       summary.rho_a1_is_maximally_mixed or args.rho_a1_mixed)
        print(io.round_sig(cap.capacity(cap.CapacityQuery(args.task, args.dir, args.eps, summary))))
        return 0

    if verb == "capacity-table":
        rows = cap.capacity_table(cap.ModelSummary.of(_model(args, parser)), _grid(args))
        text = io.write_table(rows, cap.TABLE_COLUMNS)
        if args.out:
            _emit(text, args.out)
        else:
            sys.stdout.write(text)
        return 0

    if verb == "oracle":
        report = oracle_report(_model(args, parser), args.m, args.samples, args.seed, args.dir)
        print(io.dumps(report.to_json()))
        return 0 if report.agrees else 1

    if verb == "reconstruct":
        if args.fwd_csv or args.bwd_csv:
            if not (args.fwd_csv and args.bwd_csv):
                parser.error("give both --fwd-csv and --bwd-csv")
            fwd = CapacityProfile.from_samples("fwd", *io.read_profile_csv(args.fwd_csv))
            bwd = CapacityProfile.from_samples("bwd", *io.read_profile_csv(args.bwd_csv))
            result = recover(fwd, bwd, args.tol_eps)
        else:
            result = recover_model(_model(args, parser), args.tol_eps)
        print(io.dumps(result.to_json()))
        return 0

    if verb == "measure":
        m = build_measure(args.measure, args.task, args.epsilon, args.direction, args.normalized)
        target = _process(args.path) if args.path else _model(args, parser)
        print(io.dumps({"measure": m.name, "value": evaluate(m, target)}))
        return 0

    if verb == "axioms":
        m = build_measure(args.measure, args.task, args.epsilon, args.direction, args.normalized)
        report = axiom_suite(m, sample_family(args.models, args.seed), args.ops, args.seed)
        print(io.dumps(report.to_json()))
        return 0 if report.passed else 1

    parser.error(f"unknown verb {verb}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _run(args, parser)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainFailure, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
