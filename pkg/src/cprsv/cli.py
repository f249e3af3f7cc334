"""Command-line interface.

Exit codes: 0 success, 1 configuration error, 2 blow-up, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import (
    ConfigError,
    apply_overrides,
    format_config,
    parse_config,
    preset,
    preset_names,
)
from .driver import run_simulation, select_backend
from .operators import (
    Basis,
    build_operators,
    check_sbp,
    eigen_check,
    multiplication_operator,
)
from .stepping import BlowUpError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_BLOWUP = 2
EXIT_IO = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits the process on errors; raise instead so main() can
    # map them onto the configuration-error exit code
    def error(self, message):
        raise _UsageError(message)


def _add_override_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--steps", type=int, help="override time.steps")
    sp.add_argument(
        "--dissipation",
        choices=["off", "fixed", "adaptive"],
        help="override dissipation.mode",
    )
    sp.add_argument("--order", type=int, help="override dissipation.order")
    sp.add_argument("--epsilon", type=float, help="override dissipation.epsilon")
    sp.add_argument("--output-dir", help="override output.directory")
    sp.add_argument("--prefix", help="override output.prefix")
    sp.add_argument(
        "--backend",
        choices=["auto", "python", "compiled"],
        default="auto",
        help="step-loop implementation (default: auto)",
    )


def _build_parser() -> _Parser:
    parser = _Parser(prog="cprsv", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment from a config file")
    run.add_argument("--config", required=True, help="path to a config file")
    _add_override_flags(run)

    pre = sub.add_parser("preset", help="run a named preset experiment")
    pre.add_argument("name", help=f"one of {', '.join(preset_names())}")
    pre.add_argument("--show", action="store_true", help="print the config and exit")
    _add_override_flags(pre)

    ver = sub.add_parser("verify-operators", help="print SBP and eigenvalue checks")
    ver.add_argument("--basis", required=True, choices=[b.value for b in Basis])
    ver.add_argument("--p", required=True, type=int)
    ver.add_argument("--json", action="store_true", dest="as_json")
    return parser


def _execute(cfg, backend: str) -> int:
    try:
        result = run_simulation(cfg, backend=backend)
    except BlowUpError as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    last = result.records[-1]
    print(
        f"completed {last.step} steps to t = {last.time:g} "
        f"[{result.backend} backend]: energy {last.energy:.12g}, mass {last.mass:.12g}"
    )
    for path in result.files:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_run(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return _parse_and_run(text, args)


def _parse_and_run(text: str, args) -> int:
    try:
        cfg = parse_config(text)
        cfg = apply_overrides(
            cfg,
            steps=args.steps,
            dissipation=args.dissipation,
            order=args.order,
            epsilon=args.epsilon,
            output_dir=args.output_dir,
            prefix=args.prefix,
        )
        select_backend(cfg, args.backend)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return _execute(cfg, args.backend)


def _cmd_preset(args) -> int:
    try:
        cfg = preset(args.name)
        cfg = apply_overrides(
            cfg,
            steps=args.steps,
            dissipation=args.dissipation,
            order=args.order,
            epsilon=args.epsilon,
            output_dir=args.output_dir,
            prefix=args.prefix,
        )
        select_backend(cfg, args.backend)
    except (KeyError, ConfigError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) else exc
        print(f"configuration error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    if args.show:
        sys.stdout.write(format_config(cfg))
        return EXIT_OK
    return _execute(cfg, args.backend)


def _cmd_verify(args) -> int:
    if args.p < 1:
        print(f"configuration error: p must be >= 1, got {args.p}", file=sys.stderr)
        return EXIT_CONFIG
    basis = Basis(args.basis)
    ops = build_operators(basis, args.p)
    sbp_residual = check_sbp(ops)
    a_mul = multiplication_operator(ops, (1.0, 0.0, -1.0))
    eig = eigen_check(ops, a_mul)
    if args.as_json:
        doc = {
            "basis": basis.value,
            "p": args.p,
            "sbp_residual": sbp_residual,
            "eigenvalues": [
                {
                    "n": r.n,
                    "value": r.value,
                    "expected": r.expected,
                    "residual": r.residual,
                }
                for r in eig
            ],
        }
        print(json.dumps(doc, indent=2))
        return EXIT_OK
    print(f"basis {basis.value}, p = {args.p}")
    print(f"SBP residual |M D + D^T M - R^T B R|_max = {sbp_residual:.3e}")
    print(f"{'n':>4} {'eigenvalue':>22} {'expected':>22} {'residual':>12}")
    for r in eig:
        print(f"{r.n:>4} {r.value:>22.14g} {r.expected:>22.14g} {r.residual:>12.3e}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "preset":
        return _cmd_preset(args)
    return _cmd_verify(args)


if __name__ == "__main__":
    sys.exit(main())
