"""
Command-line front end.

    qcc verify   --code eq14 --n 2 --len 2 --model general --window 8 --max 1
    qcc encode   --code eq8 --n 2 --message 1,0 --no-flush
    qcc classical encode --message 1,1,0,1 --no-flush
    qcc classical decode --received 1,1,1,1,1,0,0,0 --no-flush
    qcc classical check  --len 5 --window 4 --max 1
    qcc compare  paste:eq8 eq14 --n 2 --len 2
    qcc tables   --report report.json

Exit status: 0 pass, 1 verified failure, 2 usage or input error,
3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
import tempfile
from typing import List, Optional, Sequence

from .classical import ErrorWindowPolicy, brute_force_decode, conv_encode, window_correctability
from .errors import QCCError, ResourceError
from .kl import DEFAULT_BUDGET, DEFAULT_TOLERANCE, composition_check, duality_check, error_model, kl_matrix
from .registry import CLASSICAL, build

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_symbols(text: str) -> List[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(s) for s in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def write_json(path: str, data) -> None:
    """Write ``data`` to ``path`` atomically (temp file in the same directory, then rename)."""
    text = json.dumps(data, indent=2) + "\n"
    if path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _positive(name: str, value, minimum: int = 1) -> None:
    if value < minimum:
        raise UsageError(f"--{name} must be >= {minimum}, got {value}")


def cmd_verify(args) -> int:
    _positive("n", args.n, 2)
    _positive("len", args.len)
    _positive("window", args.window)
    _positive("max", args.max, 0)
    if not args.tol > 0:
        raise UsageError(f"--tol must be positive, got {args.tol}")
    enc = build(args.code, args.n)
    policy = ErrorWindowPolicy(args.window, args.max)
    opts = dict(flush=args.flush, workers=args.workers, budget=args.budget)
    if args.check == "kl":
        report = kl_matrix(enc, args.len, error_model(args.model, args.window, args.max), args.tol, **opts)
        print(report.summary())
        data, ok = report.to_dict(), report.passed
    elif args.check == "duality":
        rep = duality_check(enc, args.len, policy, args.tol, **opts)
        ok = rep.consistent and rep.forward_pass
        data = dict(rep.to_dict(), code=enc.name, n=args.n, len=args.len, window=args.window, max=args.max,
                    reports={k: r.to_dict() for k, r in [("spin_flip", rep.spin), ("fourier_phase", rep.fourier_phase),
                                                          ("phase", rep.phase), ("fourier_spin_flip", rep.fourier_spin)]})
        print(f"{'PASS' if ok else 'FAIL'} duality {enc.name}: " + ", ".join(f"{k}={v}" for k, v in rep.to_dict().items()))
    else:
        rep = composition_check(enc, args.len, policy, args.tol, **opts)
        ok = rep.spin.passed and rep.phase.passed and rep.general.passed
        data = dict(rep.to_dict(), code=enc.name, n=args.n, len=args.len, window=args.window, max=args.max,
                    reports={"spin_flip": rep.spin.to_dict(), "phase": rep.phase.to_dict(),
                             "general": rep.general.to_dict()})
        print(f"{'PASS' if ok else 'FAIL'} composition {enc.name}: "
              + ", ".join(f"{k}={v}" for k, v in rep.to_dict().items()))
    if args.out:
        write_json(args.out, data)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_encode(args) -> int:
    enc = build(args.code, args.n)
    state = enc.encode(parse_symbols(args.message), flush=args.flush)
    write_json(args.out, state.to_dict())
    print(f"{len(state)} terms on {state.R} registers, norm {state.norm():.12f}", file=sys.stderr)
    return EXIT_PASS


def cmd_classical(args) -> int:
    if args.code not in CLASSICAL:
        raise UsageError(f"unknown classical code {args.code!r}; known: {sorted(CLASSICAL)}")
    code = CLASSICAL[args.code](args.n)
    if args.action == "encode":
        print(",".join(map(str, conv_encode(parse_symbols(args.message), code, args.flush))))
        return EXIT_PASS
    if args.action == "decode":
        received = parse_symbols(args.received)
        frames, rem = divmod(len(received), 2)
        L = frames - (code.memory if args.flush else 0)
        if rem or L < 0:
            raise UsageError(f"{len(received)} received symbols is not a valid codeword length")
        policy = ErrorWindowPolicy(args.window, args.max) if args.windowed else None
        message, distance = brute_force_decode(received, L, code, args.flush, policy)
        if message is None:
            print("no message within the window policy")
            return EXIT_FAIL
        print(f"{','.join(map(str, message))} (distance {distance})")
        return EXIT_PASS
    _positive("len", args.len)
    report = window_correctability(code, args.len, ErrorWindowPolicy(args.window, args.max), args.flush,
                                   args.decoder)
    print(("PASS" if report.passed else "FAIL")
          + f" {args.code} N={args.n} L={args.len} w={args.window} t={args.max} decoder={args.decoder}"
          + ("" if report.passed else f" counterexample {report.counterexample}"))
    if args.out:
        write_json(args.out, report.to_dict())
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_compare(args) -> int:
    a, b = build(args.code_a, args.n), build(args.code_b, args.n)
    ra, rb = a.register_count(args.len, args.flush), b.register_count(args.len, args.flush)
    if ra != rb:
        print(f"DIFFER {a.name} has {ra} registers ({a.frame_out} per frame), "
              f"{b.name} has {rb} ({b.frame_out} per frame) at L={args.len}")
        return EXIT_FAIL
    for message in itertools.product(range(args.n), repeat=args.len):
        sa, sb = a.encode(message, args.flush), b.encode(message, args.flush)
        if not sa.allclose(sb, args.tol):
            print(f"DIFFER {a.name} and {b.name} on message {','.join(map(str, message))}")
            return EXIT_FAIL
    print(f"EQUAL {a.name} and {b.name} on all {args.n ** args.len} messages at N={args.n} L={args.len}")
    return EXIT_PASS


def cmd_tables(args) -> int:
    try:
        with open(args.report) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read report {args.report}: {exc}") from None
    if "lambda_table" not in data:
        raise UsageError(f"{args.report} has no lambda table")
    for entry in data["lambda_table"]:
        left, right = (" ".join(p) or "I" for p in entry["pair"])
        v = entry["value"]
        print(f"{left} | {right} : {v['re']:+.12g}{v['im']:+.12g}j")
    return EXIT_PASS


def _add_flush(p) -> None:
    p.add_argument("--flush", dest="flush", action="store_true", default=True,
                   help="append memory zero symbols (default)")
    p.add_argument("--no-flush", dest="flush", action="store_false")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcc", description="Quantum convolutional code toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the Knill-Laflamme check (or duality / composition)")
    p.add_argument("--code", required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--len", type=int, default=2)
    p.add_argument("--model", choices=("spin", "phase", "general"), default="general")
    p.add_argument("--window", type=int, default=4)
    p.add_argument("--max", type=int, default=1)
    p.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)
    p.add_argument("--check", choices=("kl", "duality", "composition"), default="kl")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="cap on KL table cells")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    _add_flush(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("encode", help="write the encoded state of a message")
    p.add_argument("--code", required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--message", required=True)
    p.add_argument("--out", default="-")
    _add_flush(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("classical", help="classical encoder, decoder and window check")
    p.add_argument("action", choices=("encode", "decode", "check"))
    p.add_argument("--code", default="eq2-classical")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--message", default="")
    p.add_argument("--received", default="")
    p.add_argument("--len", type=int, default=5)
    p.add_argument("--window", type=int, default=4)
    p.add_argument("--max", type=int, default=1)
    p.add_argument("--windowed", action="store_true", help="decode only within the window policy")
    p.add_argument("--decoder", choices=("window", "hamming"), default="window")
    p.add_argument("--out")
    _add_flush(p)
    p.set_defaults(func=cmd_classical)

    p = sub.add_parser("compare", help="termwise equality of two encoders")
    p.add_argument("code_a")
    p.add_argument("code_b")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--len", type=int, default=2)
    p.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)
    _add_flush(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("tables", help="print the lambda table of a verify report")
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_tables)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceError as exc:
        print(f"resource bound exceeded: {exc} (bound {exc.bound})", file=sys.stderr)
        return EXIT_RESOURCE
    except (UsageError, QCCError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
