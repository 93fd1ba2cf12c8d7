"""Command-line front end.  Exit codes: 0 ok, 1 validation error, 2 internal assertion."""

from __future__ import annotations

import argparse
import random
import sys
from typing import List, Optional

import sympy

from .enb import find_curve_setup, load_setup
from .errors import TorusError
from .ffield import OpRecorder
from .keyex import KeyStream, make_sessions, session_decode, session_encode, simulate_exchange
from .torus import admissible_qs, check_params, random_torus_element, theta_tilde
from .keyex import random_aux


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(lines: List[str], path: Optional[str]):
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _setup_for(args):
    if getattr(args, "setup", None):
        with open(args.setup) as fh:
            setup = load_setup(fh.read())
        return check_params(setup.n, setup.q), setup
    if args.n is None or args.q is None:
        raise TorusError("give either --setup or both -n and -q")
    params = check_params(args.n, args.q)
    return params, find_curve_setup(args.q, args.n, seed=args.setup_seed)


# ---------------------------------------------------------------------------

def cmd_params(args) -> List[str]:
    lines = []
    primes = list(sympy.primerange(3, args.pmax + 1))
    for i, p in enumerate(primes):
        for r in primes[i + 1:]:
            n = p * r
            qs = admissible_qs(n, args.qmax)[:args.count]
            family = "twin" if r == p + 2 else "general"
            lines.append(f"n: {n} p: {p} r: {r} family: {family} q: "
                         + (" ".join(map(str, qs)) if qs else "-"))
    return lines


def cmd_basis(args) -> List[str]:
    check_params(args.n, args.q)
    setup = find_curve_setup(args.q, args.n, seed=args.seed)
    for w in setup.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"fingerprint: {setup.fingerprint()}", file=sys.stderr)
    return setup.serialize().rstrip("\n").split("\n")


def cmd_encode(args) -> List[str]:
    params, setup = _setup_for(args)
    ctx = setup.ctx
    rng = random.Random(args.seed)
    if args.input:
        with open(args.input) as fh:
            points = [ctx.convert(ctx.parse(l.strip()), "enb") for l in fh if l.strip()]
    else:
        points = [random_torus_element(ctx, params, rng) for _ in range(args.random)]
    alice, _ = make_sessions(params, setup, 0, args.seed)
    stream = session_encode(alice, points)
    return stream.to_text().rstrip("\n").split("\n")


def cmd_decode(args) -> List[str]:
    params, setup = _setup_for(args)
    with open(args.stream) as fh:
        stream = KeyStream.from_text(fh.read())
    return [p.to_text() for p in session_decode(stream, params, setup, args.basis)]


def cmd_keyex(args) -> List[str]:
    params = check_params(args.n, args.q)
    setup = find_curve_setup(args.q, args.n, seed=args.setup_seed)
    bases = ("enb", "power") if args.basis == "both" else (args.basis,)
    report = simulate_exchange(params, setup, args.m, args.seed, bases)
    lines = report.lines()
    for name in sorted(report.streams):
        if name.startswith(bases[0]):
            lines.append(f"--- {name.split('.')[1]}")
            lines.extend(report.streams[name].rstrip("\n").split("\n"))
    return lines


def bench_theta(n: int, q: int, basis: str, seed: int = 0, setup_seed: int = 0) -> dict:
    """Operation counts of one theta-tilde evaluation."""
    params = check_params(n, q)
    setup = find_curve_setup(q, n, seed=setup_seed)
    rng = random.Random(seed)
    ctx = setup.ctx
    x = ctx.convert(random_torus_element(ctx, params, rng), basis)
    aux = {d: ctx.convert(v, basis) for d, v in random_aux(params, setup, rng).items()}
    rec = OpRecorder()
    theta_tilde(x, aux, params, rec, check=False)
    return rec.as_dict()


def cmd_bench(args) -> List[str]:
    lines = []
    for label, q in (("q1", args.q1), ("q2", args.q2)):
        lines.append(f"{label}: {q}")
        for basis in ("power", "enb"):
            ops = bench_theta(args.n, q, basis, args.seed, args.setup_seed)
            lines += [f"{label}.{basis}.{k}: {v}" for k, v in ops.items()]
    return lines


def cmd_selftest(args) -> List[str]:
    from .selftest import run_selftest
    results = run_selftest(args.n, args.q, args.seed)
    lines = [f"{name}: {'pass' if ok else 'FAIL'}" for name, ok in results]
    if not all(ok for _, ok in results):
        _emit(lines, None)
        raise AssertionError("selftest failed")
    return lines


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="enbtorus", description=__doc__)
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    def nq(p, required=True):
        p.add_argument("-n", type=int, required=required)
        p.add_argument("-q", type=int, required=required)

    p = sub.add_parser("params", help="list admissible (n, q) for n = p*r")
    p.add_argument("--pmax", type=int, required=True)
    p.add_argument("--qmax", type=int, default=2000)
    p.add_argument("--count", type=int, default=5)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("basis", help="build and serialize an elliptic normal basis setup")
    nq(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_basis)

    for name, func in (("encode", cmd_encode), ("decode", cmd_decode)):
        p = sub.add_parser(name, help=f"{name} a key stream")
        nq(p, required=False)
        p.add_argument("--setup", help="setup file written by `basis`")
        p.add_argument("--setup-seed", type=int, default=0)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("-o", "--output")
        p.set_defaults(func=func)
    enc, dec = sub.choices["encode"], sub.choices["decode"]
    src = enc.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="file of torus elements, one 'basis:c0,c1,...' per line")
    src.add_argument("--random", type=int, metavar="M", help="encode M random torus points")
    dec.add_argument("stream")
    dec.add_argument("--basis", choices=("enb", "power"), default="enb")

    p = sub.add_parser("keyex", help="simulate the chained key exchange")
    nq(p)
    p.add_argument("-m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--setup-seed", type=int, default=0)
    p.add_argument("--basis", choices=("enb", "power", "both"), default="both")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_keyex)

    p = sub.add_parser("bench", help="operation counts of one theta-tilde per basis")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-q1", type=int, required=True)
    p.add_argument("-q2", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--setup-seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("selftest", help="run the invariant suite")
    p.add_argument("-n", type=int, default=15)
    p.add_argument("-q", type=int, default=239)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not getattr(args, "func", None):
        ap.print_help(sys.stderr)
        return 1
    try:
        _emit(args.func(args), getattr(args, "output", None))
    except (TorusError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except AssertionError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
