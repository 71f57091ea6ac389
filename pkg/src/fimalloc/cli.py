"""Command-line entry point: ``fimalloc allocate | experiment | validate``.

Exit status: 0 on success, 1 when the input is rejected (bad model file,
degenerate problem), 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from .allocators import CRITERIA, allocate, allocate_nonlinear
from .errors import FimAllocError
from .experiments import ScenarioConfig, db_to_linear, run_sweep
from .model import NonlinearChannel, build_fim_bundle
from .modelfile import load_model
from .montecarlo import TrialConfig, run_trials
from .optimizer import MultistartOptions

log = logging.getLogger("fimalloc")


class _UsageError(Exception):
    pass


def _u64(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _k_range(text):
    lo, sep, hi = text.partition("..")
    try:
        lo, hi = int(lo), int(hi if sep else lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None
    return lo, hi


def _float_list(text):
    try:
        return [float(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _criteria(text, allow_all=True):
    if allow_all and text == "all":
        return CRITERIA
    names = tuple(t.strip() for t in text.split(",") if t.strip())
    bad = [n for n in names if n not in CRITERIA]
    if bad or not names:
        valid = ", ".join(CRITERIA) + (", all" if allow_all else "")
        raise _UsageError(f"unknown criterion {', '.join(bad) or text!r}; valid names: {valid}")
    return names


def _optimizer_opts(args):
    return MultistartOptions(restarts=args.restarts, seed=args.seed)


def build_parser():
    parser = argparse.ArgumentParser(prog="fimalloc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=float, default=0.0, metavar="DB",
                        help="total power in dB (0 dB = unit power)")
    common.add_argument("--seed", type=_u64, default=0, metavar="U64")
    common.add_argument("--restarts", type=_positive_int, default=64, metavar="N",
                        help="multistart restarts for worst_eigen")

    a = sub.add_parser("allocate", parents=[common], help="optimal allocation for a model file")
    a.add_argument("--model", required=True, metavar="PATH")
    a.add_argument("--criterion", "--criteria", dest="criterion", required=True, metavar="NAME|all")
    a.add_argument("--bound", action="store_true",
                   help="for worst_eigen, report the equal-power eigenvalue bound instead")
    a.add_argument("--theta", type=_float_list, metavar="X,Y,...",
                   help="nonlinear models: re-linearize at sqrt(p)*theta until the powers settle")

    e = sub.add_parser("experiment", parents=[common], help="dimension sweep to CSV")
    e.add_argument("--scenario", default="F1,F2", metavar="F1|F2|PATH",
                   help="comma-separated scenarios or a model-file path")
    e.add_argument("--k", type=_k_range, default=(2, 30), metavar="A..B")
    e.add_argument("--criterion", "--criteria", dest="criterion", default="all", metavar="NAME|all")
    e.add_argument("--out", required=True, metavar="PATH", help="output directory")

    v = sub.add_parser("validate", parents=[common], help="Monte Carlo CRLB check")
    v.add_argument("--model", required=True, metavar="PATH")
    src = v.add_mutually_exclusive_group(required=True)
    src.add_argument("--powers", type=_float_list, metavar="P1,P2,...")
    src.add_argument("--criterion", metavar="NAME", help="validate the optimal allocation for NAME")
    v.add_argument("--trials", type=_positive_int, default=100_000, metavar="N")
    v.add_argument("--theta", type=_float_list, metavar="X,Y,...", help="true parameter (default all ones)")
    v.add_argument("--out", metavar="PATH", help="also write the JSON summary here")
    return parser


def _emit(payload, out=None):
    text = json.dumps(payload, indent=2, sort_keys=False) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _cmd_allocate(args):
    model = load_model(args.model)
    budget = db_to_linear(args.budget)
    names = _criteria(args.criterion)
    opts = _optimizer_opts(args)
    reports = []
    for name in names:
        if args.bound and name == "worst_eigen":
            from .allocators import allocate_worst_eigen_bound
            rep = allocate_worst_eigen_bound(build_fim_bundle(model), budget)
        elif args.theta is not None and isinstance(model.channel, NonlinearChannel):
            rep, rounds, ok = allocate_nonlinear(model, name, budget, args.theta, opts, iterate=True)
            if not ok:
                log.warning("re-linearization did not settle after %d rounds", rounds)
        else:
            rep = allocate(build_fim_bundle(model), name, budget, opts)
        reports.append(rep.to_dict())
    _emit(reports[0] if len(reports) == 1 else reports)


def _cmd_experiment(args):
    names = _criteria(args.criterion)
    scenarios = tuple(s.strip() for s in args.scenario.split(",") if s.strip())
    try:
        cfg = ScenarioConfig(scenarios, tuple(args.k), args.budget, names, args.out, _optimizer_opts(args))
    except FimAllocError as exc:
        raise _UsageError(str(exc)) from None
    _, written = run_sweep(cfg)
    for path in written:
        sys.stdout.write(path + "\n")


def _cmd_validate(args):
    model = load_model(args.model)
    budget = db_to_linear(args.budget)
    if args.powers is not None:
        powers = np.asarray(args.powers)
    else:
        name = _criteria(args.criterion, allow_all=False)
        if len(name) != 1:
            raise _UsageError("validate takes a single criterion")
        rep = allocate(build_fim_bundle(model), name[0], budget, _optimizer_opts(args))
        powers = rep.allocation.with_nuisance(model.nuisance_count)
    theta = None if args.theta is None else np.asarray(args.theta)
    summary = run_trials(TrialConfig(model, powers, args.trials, args.seed, theta))
    payload = summary.to_dict()
    payload["powers"] = np.asarray(powers, dtype=float).tolist()
    _emit(payload, args.out)


COMMANDS = {"allocate": _cmd_allocate, "experiment": _cmd_experiment, "validate": _cmd_validate}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"fimalloc: error: {exc}\n")
        return 2
    except (FimAllocError, OSError) as exc:
        sys.stderr.write(f"fimalloc: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
