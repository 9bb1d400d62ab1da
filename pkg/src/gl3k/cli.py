"""Command-line front end: ``python3 -m gl3k <subcommand> ...``.

Every run emits a header record {"schema": 1} followed by JSON lines (or
CSV for the bilinear scan). Exit status: 0 success, 1 verification
mismatch, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction
from typing import Sequence

from . import bilinear, decomp, gl3
from .cyclo import CycloValue
from .errors import GL3KError, InvalidArguments, VerificationFailed
from .kernels import integrals, spectral

__all__ = ["main", "build_parser", "SCHEMA"]

SCHEMA = 1


def _json(x) -> str:
    return json.dumps(x, sort_keys=True)


def _value_record(v) -> dict:
    if isinstance(v, CycloValue):
        z = v.to_complex()
        out = {
            "order": v.Q,
            "den": v.denominator,
            "coeffs": {str(j): int(c) for j, c in enumerate(v.numerators) if c},
            "re": z.real,
            "im": z.imag,
        }
        r = v.as_rational()
        if r is not None:
            out["rational"] = str(r)
        return out
    z = complex(v)
    return {"re": z.real, "im": z.imag}


def _int_list(s: str) -> list[int]:
    try:
        return [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None


def _float_list(s: str) -> list[float]:
    try:
        return [float(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}") from None


def _positive(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gl3k", description="GL(3) Kloosterman sums and kernel workbench")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=("exact", "float"), default="exact")
    common.add_argument("--workers", type=_positive, default=None,
                        help="worker threads for verify/bilinear (default: $GL3K_THREADS or 1)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", default="-", help="output path, '-' for stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    sub = p.add_subparsers(dest="subcommand", required=True)

    s = sub.add_parser("sum", parents=[common], help="S(m1, m2, n1, n2; D1, D2) by brute force")
    s.add_argument("--m", type=int, default=1, help="m2")
    s.add_argument("--n", type=int, default=1, help="n1")
    s.add_argument("--m1", type=int, default=1)
    s.add_argument("--n2", type=int, default=1)
    s.add_argument("--d1", type=_positive, required=True)
    s.add_argument("--d2", type=_positive, required=True)

    s = sub.add_parser("tilde", parents=[common], help="S~(n1, n2, m1; D1, D2) with D1 | D2")
    for k in ("n1", "n2", "m1"):
        s.add_argument(f"--{k}", type=int, required=True)
    s.add_argument("--d1", type=_positive, required=True)
    s.add_argument("--d2", type=_positive, required=True)

    s = sub.add_parser("decompose", parents=[common], help="tuples and value of the global decomposition")
    s.add_argument("--m", type=_positive, required=True)
    s.add_argument("--n", type=_positive, required=True)
    s.add_argument("--d1", type=_positive, required=True)
    s.add_argument("--d2", type=_positive, required=True)
    s.add_argument("--tuples", action="store_true", help="also emit one record per tuple")

    s = sub.add_parser("verify", parents=[common], help="decomposition vs brute force over a sweep")
    s.add_argument("--dmax", type=_positive, default=None, help="all pairs D1, D2 <= dmax")
    s.add_argument("--pairs", default=None, help="explicit pairs 'a:b,c:d'")
    s.add_argument("--mn", type=_int_list, default=[1], help="values for m and n (all ordered pairs)")
    s.add_argument("--records", action="store_true", help="emit one record per case")

    s = sub.add_parser("bilinear", parents=[common], help="bilinear-form scan")
    s.add_argument("--x", type=_int_list, required=True, help="X values (X1 = X2 = X)")
    s.add_argument("--N", type=_int_list, required=True, help="sequence lengths")
    s.add_argument("--generator", choices=bilinear.GENERATORS, default="random_pm1")
    s.add_argument("--trials", type=_positive, default=1)
    s.add_argument("--paired", action="store_true", help="zip --x with --N instead of the product")
    s.add_argument("--theta", type=float, default=0.0, help="resonant frequency")

    s = sub.add_parser("hybrid", parents=[common], help="bilinear form twisted by n^-s1 m^-s2 on a grid")
    s.add_argument("--x1", type=_positive, required=True)
    s.add_argument("--x2", type=_positive, required=True)
    s.add_argument("--N", type=_positive, required=True)
    s.add_argument("--t1", type=_float_list, default=[0.0], help="Im s1 nodes")
    s.add_argument("--t2", type=_float_list, default=[0.0], help="Im s2 nodes")
    s.add_argument("--generator", choices=bilinear.GENERATORS, default="random_pm1")

    s = sub.add_parser("kernel", parents=[common], help="long-element kernel functions")
    s.add_argument("--which", required=True,
                   choices=("J1+", "J1-", "J2", "J3", "J4", "J5", "mb++", "K++", "K+-", "K-+", "K--"))
    s.add_argument("--y1", type=float, required=True)
    s.add_argument("--y2", type=float, required=True)
    s.add_argument("--t1", type=float, required=True, help="mu = i (t1, t2, -t1-t2)")
    s.add_argument("--t2", type=float, required=True)

    s = sub.add_parser("volume", parents=[common], help="main-term volume of the test function")
    s.add_argument("--T", type=_float_list, required=True)
    s.add_argument("--mu0", type=_float_list, default=[60.0, 0.0], help="t1,t2 of mu0 = i (t1, t2, -t1-t2)")
    s.add_argument("--A", type=int, default=5)
    s.add_argument("--eps", type=float, default=0.2)
    s.add_argument("--strategy", choices=("chamber", "full"), default="chamber")
    return p


def _workers(args) -> int:
    if args.workers is not None:
        return args.workers
    env = os.environ.get("GL3K_THREADS")
    if env:
        try:
            v = int(env)
        except ValueError:
            raise InvalidArguments(f"GL3K_THREADS must be a positive integer, got {env!r}") from None
        if v < 1:
            raise InvalidArguments("GL3K_THREADS must be a positive integer")
        return v
    return 1


def _parse_pairs(s: str) -> list[tuple[int, int]]:
    out = []
    for item in s.split(","):
        a, _, b = item.partition(":")
        try:
            out.append((int(a), int(b)))
        except ValueError:
            raise InvalidArguments(f"bad pair {item!r}; expected 'D1:D2'") from None
    return out


def _run(args) -> tuple[list[str], int]:
    """Execute a parsed command; returns (lines without header, exit status)."""
    sc = args.subcommand
    if args.format == "csv" and sc != "bilinear":
        raise InvalidArguments("CSV output is only available for the bilinear scan")
    if sc == "sum":
        v = gl3.s_long_bruteforce(args.m1, args.m, args.n, args.n2, args.d1, args.d2, mode=args.mode)
        rec = {"kind": "sum", "m1": args.m1, "m2": args.m, "n1": args.n, "n2": args.n2,
               "D1": args.d1, "D2": args.d2, "mode": args.mode, "value": _value_record(v)}
        return [_json(rec)], 0
    if sc == "tilde":
        v = gl3.s_tilde(args.n1, args.n2, args.m1, args.d1, args.d2, mode=args.mode)
        rec = {"kind": "tilde", "n1": args.n1, "n2": args.n2, "m1": args.m1,
               "D1": args.d1, "D2": args.d2, "mode": args.mode, "value": _value_record(v)}
        return [_json(rec)], 0
    if sc == "decompose":
        tuples = list(decomp.enumerate_tuples(args.m, args.n, args.d1, args.d2))
        v = decomp.s_long_decomposed(args.m, args.n, args.d1, args.d2, mode=args.mode, tuples=tuples)
        lines = []
        if args.tuples:
            lines = [_json({"kind": "tuple", **t.as_dict()}) for t in tuples]
        work = decomp.decomposition_work(args.m, args.n, args.d1, args.d2)
        rec = {"kind": "decompose", "m": args.m, "n": args.n, "D1": args.d1, "D2": args.d2,
               "mode": args.mode, "value": _value_record(v), **work}
        return lines + [_json(rec)], 0
    if sc == "verify":
        if (args.dmax is None) == (args.pairs is None):
            raise InvalidArguments("give exactly one of --dmax and --pairs")
        if args.dmax is not None:
            pairs = [(a, b) for a in range(1, args.dmax + 1) for b in range(1, args.dmax + 1)]
        else:
            pairs = _parse_pairs(args.pairs)
        mn = [(m, n) for m in args.mn for n in args.mn]
        rep = decomp.verify_decomposition(pairs, mn, mode=args.mode, workers=_workers(args))
        summary = rep.summary()
        print(f"verify: {summary.pop('seconds')} s", file=sys.stderr)
        lines = list(rep.jsonl()) if args.records else [_json(r) for r in rep.mismatches]
        return lines + [_json(summary)], 0 if rep.ok else 1
    if sc == "bilinear":
        if args.paired and len(args.x) != len(args.N):
            raise InvalidArguments("--paired needs --x and --N of equal length")
        recs = bilinear.scan(args.x, args.N, args.generator, args.seed, args.trials,
                             paired=args.paired, theta=args.theta, workers=_workers(args))
        if args.format == "csv":
            return bilinear.records_to_csv(recs).splitlines(), 0
        return [_json(r.as_dict()) for r in recs], 0
    if sc == "hybrid":
        seqs = bilinear.make_seqs(args.generator, args.N, args.seed)
        grid = [(1j * a, 1j * b, 1.0 / (len(args.t1) * len(args.t2))) for a in args.t1 for b in args.t2]
        val = bilinear.hybrid_form(seqs, args.x1, args.x2, grid)
        env = bilinear.envelope(args.x1, args.x2, args.N)
        rec = bilinear.ScanRecord(args.x1, args.x2, args.N, val, env, val / (seqs.norm_a * seqs.norm_b * env),
                                  args.seed, args.generator,
                                  T1=max(abs(t) for t in args.t1), T2=max(abs(t) for t in args.t2))
        return [_json(rec.as_dict())], 0
    if sc == "kernel":
        q = integrals.KernelQuery(args.y1, args.y2, spectral.SpectralPoint.imaginary(args.t1, args.t2))
        w = args.which
        if w.startswith("J"):
            j = int(w[1])
            r = integrals.J_double(j, q, w[2] if len(w) > 2 else "-", strict=False)
        elif w == "mb++":
            r = integrals.mellin_barnes_pp(q)
        elif w == "K++":
            r = integrals.kernel_pp_bessel(q)
        elif w == "K+-":
            r = integrals.kernel_pm_weyl_sum(q, strict=False)
        elif w == "K-+":
            r = integrals.kernel_mp_weyl_sum(q, strict=False)
        else:
            r = integrals.kernel_mm_weyl_sum(q, strict=False)
        return [_json({"kind": "kernel", **r.as_dict(q)})], 0
    if sc == "volume":
        if len(args.mu0) != 2:
            raise InvalidArguments("--mu0 takes two numbers t1,t2")
        mu0 = spectral.SpectralPoint.imaginary(*args.mu0)
        lines, vals = [], []
        for T in args.T:
            prm = spectral.TestFunctionParams(T=T, mu0=mu0, A=args.A, eps=args.eps)
            r = spectral.main_term_volume(prm, strategy=args.strategy)
            vals.append(r.value)
            lines.append(_json({"kind": "volume", "T": T, "value": r.value, "est_error": r.est_error,
                                "nodes": r.nodes, "strategy": r.strategy}))
        if len(args.T) > 1:
            lines.append(_json({"kind": "volume_slope", "log2_slope": spectral.log_slope(args.T, vals)}))
        return lines, 0
    raise InvalidArguments(f"unknown subcommand {sc!r}")


def _emit(lines: list[str], args) -> None:
    header = "# schema: 1" if args.format == "csv" else _json({"schema": SCHEMA})
    text = "\n".join([header, *lines]) + "\n"
    if args.output == "-":
        sys.stdout.write(text)
        return
    # write to a sibling temp file and rename, so no partial file is left behind
    d = os.path.dirname(os.path.abspath(args.output))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".gl3k-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, args.output)
    except BaseException:
        os.unlink(tmp)
        raise


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        lines, status = _run(args)
    except VerificationFailed as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (GL3KError, ValueError, ArithmeticError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    _emit(lines, args)
    return status


if __name__ == "__main__":
    sys.exit(main())
