"""Command-line entry point: ``mixmax <subcommand> [spec flags] ...``.

Exit codes: 0 on success, 1 when a verdict fails (non-maximal certificate,
failed statistics), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import galois, generator, search, spectral, statkit
from .field import MERSENNE61, Modulus
from .operators import Family, OperatorSpec, validate

FAMILY_ALIASES = {"two": Family.TWO, "three": Family.THREE, "four": Family.FOUR,
                  "2": Family.TWO, "3": Family.THREE, "4": Family.FOUR}


class UsageError(Exception):
    pass


def _int(text: str) -> int:
    # decimal only, never via float: s from the tables exceeds 2^53
    try:
        return int(text, 10)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a decimal integer, got {text!r}") from exc


def _int_list(text: str) -> list[int]:
    return [_int(t) for t in text.split(",") if t.strip()]


def _spec_parent() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(add_help=False)
    g = ap.add_argument_group("operator")
    g.add_argument("--family", choices=sorted(FAMILY_ALIASES), default=None)
    g.add_argument("--n", type=_int, default=None, help="matrix size N")
    g.add_argument("--s", type=_int, default=None, help="perturbation at (3,2)")
    g.add_argument("--m", type=_int, default=None)
    g.add_argument("--b", type=_int, default=None)
    g.add_argument("--p", type=_int, default=MERSENNE61, help="prime modulus (default 2^61-1)")
    ap.add_argument("--out", default=None, help="write output here instead of stdout")
    return ap


def _spec_from_args(args) -> OperatorSpec:
    base = {}
    env = os.environ.get("MIXMAX_SPEC")
    if env:
        base = json.loads(env)
    fam = args.family or base.get("family", "two")
    N = args.n if args.n is not None else base.get("N")
    if N is None:
        raise UsageError("--n is required (or set MIXMAX_SPEC)")
    s = args.s if args.s is not None else int(base.get("s", 0))
    family = FAMILY_ALIASES[str(fam)]
    default_m = 1 if family is Family.TWO else None
    m = args.m if args.m is not None else int(base.get("m", default_m or 0))
    if m == 0:
        raise UsageError("--m is required for the three- and four-parameter families")
    b = args.b if args.b is not None else int(base.get("b", 0))
    try:
        return OperatorSpec(family, int(N), s, m, b)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _setup(args) -> tuple[OperatorSpec, Modulus]:
    spec = _spec_from_args(args)
    try:
        modulus = Modulus(args.p)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    for diag in validate(spec, modulus):
        if diag.level == "error":
            raise UsageError(diag.message)
        print(f"warning: {diag.message}", file=sys.stderr)
    return spec, modulus


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# ----------------------------------------------------------------------
# subcommands

def cmd_gen(args) -> int:
    spec, modulus = _setup(args)
    if args.seed_vector:
        state = generator.seed_from_vector(spec, modulus, _int_list(args.seed_vector))
    else:
        state = generator.seed_from_word(spec, modulus, args.seed)
    if args.stream_id:
        state = generator.derive_stream(state, args.stream_id, args.spacing)
    binary = args.format in ("raw", "f64")
    if binary and not args.out and sys.stdout.isatty() and not args.force:
        raise UsageError("refusing to write binary output to a terminal (use --out or --force)")
    if args.format == "text":
        _emit(args, "".join(f"{int(x)}\n" for x in state.residues(args.count)))
        return 0
    if args.format == "raw":
        data = state.residues(args.count).astype("<u8").tobytes()
    else:
        data = state.units(args.count).astype("<f8").tobytes()
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return 0


def cmd_spectrum(args) -> int:
    spec = _spec_from_args(args)
    report = spectral.spectrum_report(spec, args.method)
    if args.format == "csv":
        rows = report["inverse_eigenvalues"] if args.inverse else report["eigenvalues"]
        _emit(args, spectral.report_csv(rows))
    else:
        _emit(args, _dump(report))
    return 0


def cmd_entropy(args) -> int:
    spec = _spec_from_args(args)
    if spec.N > args.cap:
        out = {"schema": "mixmax.entropy/1", "spec": spec.to_dict(),
               "entropy": spectral.entropy_estimate(spec.N), "is_estimate": True}
    else:
        sp = spectral.eigenvalues(spec, args.method, cap=args.cap)
        rep = spectral.entropy(sp)
        verdict = spectral.check_c_condition(sp, args.gap_tol)
        out = {"schema": "mixmax.entropy/1", "spec": spec.to_dict(), "method": sp.method,
               **rep.to_dict(), "is_estimate": False,
               "c_condition": {"passed": verdict.passed, "min_gap": verdict.min_gap,
                               "log_det": verdict.log_det}}
    _emit(args, _dump(out))
    return 0


def cmd_certify(args) -> int:
    spec, modulus = _setup(args)
    q = galois.q_of(modulus.p, spec.N)
    if args.cond1_only:
        irreducible, cond1 = galois.condition_one(spec, modulus)
        out = {"schema": "mixmax.certificate/1", "q_digits": galois.decimal_digits(q),
               "irreducible": irreducible, "cond1": cond1, "cond2": None, "maximal": None}
        _emit(args, _dump(out))
        return 0 if irreducible and cond1 else 1
    try:
        factors = galois.FactorizationOfQ.load(args.factors, q) if args.factors else galois.factor_q(q)
    except galois.BadFactorization as exc:
        raise UsageError(str(exc)) from exc
    cert = galois.certify_max_period(spec, modulus, factors)
    _emit(args, cert.to_json() + "\n")
    return 0 if cert.maximal else 1


def cmd_oracle(args) -> int:
    spec, modulus = _setup(args)
    seed = _int_list(args.seed_vector) if args.seed_vector else [1] + [0] * (spec.N - 1)
    try:
        period = galois.brute_force_period(spec, modulus, seed)
    except galois.StateSpaceTooLarge as exc:
        raise UsageError(str(exc)) from exc
    q = galois.q_of(modulus.p, spec.N)
    _emit(args, _dump({"schema": "mixmax.oracle/1", "spec": spec.to_dict(), "p": str(modulus.p),
                       "seed": [str(x) for x in seed], "period": str(period), "q": str(q),
                       "full_period": period == q}))
    return 0


def cmd_scan(args) -> int:
    spec = _spec_from_args(args)
    modulus = Modulus(args.p)
    factors = None
    if args.factors == "auto":
        factors = "auto"
    elif args.factors:
        factors = galois.FactorizationOfQ.load(args.factors, galois.q_of(modulus.p, spec.N))
    reports = search.scan(spec.N, _int_list(args.s_list), modulus, factors, spec.family,
                          spec.m, spec.b, threshold=args.threshold, jobs=args.jobs)
    if args.format == "text":
        rows = [{"N": r.spec.N, "m": r.spec.m, "s": r.spec.s, "entropy": r.entropy or float("nan"),
                 "entropy_is_estimate": r.entropy_is_estimate, "log10_q": r.log10_period or float("nan")}
                for r in reports]
        _emit(args, search.format_table(rows))
    else:
        _emit(args, search.reports_json(reports) + "\n")
    return 0


def cmd_stats(args) -> int:
    spec, modulus = _setup(args)
    state = generator.seed_from_word(spec, modulus, args.seed)
    x = state.units(args.count)
    results = [statkit.chisq_uniform(x, args.count, args.bins),
               statkit.serial_pairs(x, args.count - args.count % 2, args.grid)]
    results += statkit.autocorrelation(x, args.count, range(1, args.lags + 1))
    _emit(args, statkit.results_json(results) + "\n")
    return 0 if all(r.passed for r in results) else 1


def cmd_skip_bench(args) -> int:
    spec, modulus = _setup(args)
    state = generator.seed_from_word(spec, modulus, args.seed)
    t0 = time.perf_counter()
    jumped = generator.skip(state, args.k)
    t1 = time.perf_counter()
    seq = state.copy()
    for _ in range(args.k):
        seq.advance()
    t2 = time.perf_counter()
    _emit(args, _dump({"schema": "mixmax.skipbench/1", "k": args.k, "skip_seconds": t1 - t0,
                       "sequential_seconds": t2 - t1, "identical": jumped.a == seq.a}))
    return 0 if jumped.a == seq.a else 1


def build_parser() -> argparse.ArgumentParser:
    parent = _spec_parent()
    ap = argparse.ArgumentParser(prog="mixmax", description="MIXMAX generators and their analysis")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[parent], help="emit a random stream")
    g.add_argument("--seed", type=_int, default=1)
    g.add_argument("--seed-vector", default=None, help="comma-separated N integers")
    g.add_argument("--stream-id", type=_int, default=0)
    g.add_argument("--spacing", type=_int, default=generator.DEFAULT_STREAM_SPACING,
                   help="log2 of the distance between derived streams")
    g.add_argument("--count", type=_int, default=10)
    g.add_argument("--format", choices=("raw", "text", "f64"), default="text")
    g.add_argument("--force", action="store_true", help="allow binary output to a terminal")
    g.set_defaults(func=cmd_gen)

    sp = sub.add_parser("spectrum", parents=[parent], help="eigenvalues of A and A^-1")
    sp.add_argument("--method", choices=("auto", "float", "exact"), default="auto")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--inverse", action="store_true", help="CSV of the inverse spectrum")
    sp.set_defaults(func=cmd_spectrum)

    e = sub.add_parser("entropy", parents=[parent], help="Kolmogorov entropy and C-condition")
    e.add_argument("--method", choices=("auto", "float", "exact"), default="auto")
    e.add_argument("--cap", type=_int, default=spectral.DEFAULT_CAP)
    e.add_argument("--gap-tol", type=float, default=spectral.DEFAULT_GAP_TOL)
    e.set_defaults(func=cmd_entropy)

    c = sub.add_parser("certify", parents=[parent], help="maximal-period certificate")
    c.add_argument("--factors", default=None, help="file of 'prime multiplicity' lines")
    c.add_argument("--cond1-only", action="store_true",
                   help="only irreducibility and A^q = I (no factorization needed)")
    c.set_defaults(func=cmd_certify)

    o = sub.add_parser("oracle", parents=[parent], help="brute-force orbit length")
    o.add_argument("--seed-vector", default=None)
    o.set_defaults(func=cmd_oracle)

    s = sub.add_parser("scan", parents=[parent], help="evaluate a list of s values")
    s.add_argument("--s-list", required=True, help="comma-separated s candidates")
    s.add_argument("--factors", default=None, help="factor file, or 'auto' for small q")
    s.add_argument("--threshold", type=float, default=search.ENTROPY_THRESHOLD)
    s.add_argument("--format", choices=("json", "text"), default="json")
    s.add_argument("--jobs", type=_int, default=1)
    s.set_defaults(func=cmd_scan)

    st = sub.add_parser("stats", parents=[parent], help="statistical smoke tests")
    st.add_argument("--seed", type=_int, default=1)
    st.add_argument("--count", type=_int, default=10**6)
    st.add_argument("--bins", type=_int, default=1000)
    st.add_argument("--grid", type=_int, default=32)
    st.add_argument("--lags", type=_int, default=64)
    st.set_defaults(func=cmd_stats)

    k = sub.add_parser("skip-bench", parents=[parent], help="time skip against stepping")
    k.add_argument("--seed", type=_int, default=1)
    k.add_argument("--k", type=_int, default=10**4)
    k.set_defaults(func=cmd_skip_bench)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)  # argparse exits with 2 on malformed flags
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"mixmax {args.command}: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
