"""Command-line entry point.

Exit codes: 0 on success, 1 on violations or failed checks, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .archio import Architecture, parse_architecture, serialize_network
from .cert import certify
from .errors import ArchSyntaxError, SemanticError, StemVineError
from .evaluate import read_dataset, write_dataset
from .graph import NormProfile, resnet34_template
from .io import atomic_write, load_weights, save_weights

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _widths(text: str):
    vals = [int(x) for x in text.split(",")]
    if len(vals) not in (1, 6):
        raise argparse.ArgumentTypeError("widths is one int or six comma-separated ints")
    return vals[0] if len(vals) == 1 else tuple(vals)


def _read_arch(path) -> Architecture:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_architecture(text)


def _table(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def _verdicts(rows, checks) -> int:
    for row, check in zip(rows, checks):
        row["verdict"] = "PASS" if check.ok else "FAIL"
    failed = sum(not c.ok for c in checks)
    sys.stdout.write(_table(rows))
    print(f"{len(checks) - failed}/{len(checks)} PASS", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


# -- subcommands ---------------------------------------------------------------------

def cmd_validate(args) -> int:
    try:
        _read_arch(args.arch)
    except ArchSyntaxError as exc:
        print(f"{args.arch}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except SemanticError as exc:
        for v in exc.violations:
            print(v)
        return EXIT_FAIL
    print(f"{args.arch}: ok")
    return EXIT_OK


def cmd_template(args) -> int:
    p = NormProfile(args.s, args.b)
    net = resnet34_template([p] * 34, [p] * 3, args.widths)
    atomic_write(args.out, serialize_network(net))
    return EXIT_OK


def cmd_certify(args) -> int:
    arch = _read_arch(args.arch)
    base = Path(args.arch).parent if args.arch != "-" else Path(".")
    weights, refs = load_weights(arch, base, args.weights)
    data = read_dataset(args.data)
    report = certify(arch.network, weights, refs, data, args.lam, args.delta)
    atomic_write(args.out, report.to_csv() if args.format == "csv" else report.to_text())
    return EXIT_OK


def cmd_oracle_cover(args) -> int:
    from .oracle.suites import chain_suite, maurey_suite

    seeds = range(args.seed, args.seed + 3)
    maurey = maurey_suite(seeds)
    chain = chain_suite(range(args.seed, args.seed + 6))
    rows = [{"check": "maurey", "d": c.d, "m": c.m, "a": c.a, "eps": c.eps, "points": c.points,
             "greedy": c.greedy, "bound": repr(float(np.exp(c.log_bound)))} for c in maurey]
    rows += [{"check": "chain", "d": 2, "m": "2,1", "a": 1.0, "eps": repr(c.radius), "points": c.points,
              "greedy": c.composed_greedy, "bound": repr(float(np.exp(c.log_chain_bound)))} for c in chain]
    return _verdicts(rows, maurey + chain)


def cmd_oracle_rademacher(args) -> int:
    from .oracle.suites import rademacher_suite

    checks = rademacher_suite(args.trials, args.seed)
    rows = [{"d": c.d, "a": c.a, "n": c.n, "hypotheses": c.hypotheses, "estimate": repr(c.estimate),
             "R": repr(c.R), "dudley": repr(c.dudley), "margin": repr(c.margin)} for c in checks]
    return _verdicts(rows, checks)


def cmd_sweep_norms(args) -> int:
    from .oracle.suites import norm_sweep

    net = _read_arch(args.arch).network
    rows = norm_sweep(net, args.factors, args.input_norm, args.n, args.delta, args.scale)
    text = _table([{"factor": repr(f), "R": repr(R), "bound": repr(b)} for f, R, b in rows])
    atomic_write(args.out, text)
    return EXIT_OK


def cmd_sweep_placement(args) -> int:
    from .oracle.suites import placement_suite

    checks = placement_suite(args.count, args.seed)
    rows = [{"pair": c.seed, "chain_terms": c.chain_terms, "vine_terms": c.vine_terms,
             "same_form": c.same_form} for c in checks]
    return _verdicts(rows, checks)


def cmd_train_demo(args) -> int:
    from .oracle.suites import gap_run
    from .oracle.train import TrainConfig

    cfg = TrainConfig(lr=args.lr, epochs=args.epochs, weight_decay=args.weight_decay, seed=args.seed)
    run = gap_run(args.seed, args.n_train, args.n_test, args.lam, args.delta, cfg)
    print(f"train error {run.train_error:.4f}  test error {run.test_error:.4f}  "
          f"ramp risk {run.ramp:.4f}  gap {run.gap:.4f}  remainder {run.remainder:.6g}", file=sys.stderr)
    atomic_write(args.out, run.report.to_text())
    if args.save_dir:
        # everything `certify` needs to reproduce the report
        out = Path(args.save_dir)
        save_weights(out / "weights", run.training.weights, run.training.references)
        atomic_write(out / "arch.json", serialize_network(run.training.network))
        write_dataset(out / "train.svd", run.train_data)
    return EXIT_OK if run.ok else EXIT_FAIL


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stemvine", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an architecture file")
    p.add_argument("arch")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("template", help="write a built-in architecture")
    p.add_argument("name", choices=["resnet34"])
    p.add_argument("--out", required=True)
    p.add_argument("--widths", type=_widths, default=4, help="one int, or n0,stage1..stage4,classes")
    p.add_argument("--s", type=float, default=1.0, help="spectral bound for every matrix")
    p.add_argument("--b", type=float, default=1.0, help="reference-distance bound for every matrix")
    p.set_defaults(func=cmd_template)

    p = sub.add_parser("certify", help="generalization certificate for trained weights")
    p.add_argument("--arch", required=True)
    p.add_argument("--weights", help="directory of <slot>.svm and optional <slot>.ref.svm")
    p.add_argument("--data", required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0, help="accepted for uniformity; certify is not random")
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=["report", "csv"], default="report")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("oracle-cover", help="greedy covers against the covering bounds")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_oracle_cover)

    p = sub.add_parser("oracle-rademacher", help="Monte-Carlo Rademacher against the entropy bound")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_oracle_rademacher)

    p = sub.add_parser("sweep-norms", help="R and bound as all norms are scaled")
    p.add_argument("--arch", required=True)
    p.add_argument("--factors", type=_floats, default=[0.5, 1.0, 2.0])
    p.add_argument("--scale", choices=["b", "s", "both"], default="b")
    p.add_argument("--input-norm", type=float, default=1.0)
    p.add_argument("--n", type=int, default=50_000)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sweep_norms)

    p = sub.add_parser("sweep-placement", help="term census of matched chain and stem-vine nets")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sweep_placement)

    p = sub.add_parser("train-demo", help="train on blobs, certify, compare with the test error")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--weight-decay", type=float, default=0.0)
    p.add_argument("--n-train", type=int, default=200)
    p.add_argument("--n-test", type=int, default=2000)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--out", default="-")
    p.add_argument("--save-dir", help="directory for arch.json, weights/ and train.svd")
    p.set_defaults(func=cmd_train_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StemVineError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
