"""Parameter scans and table-style quality reports."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import galois, spectral
from .field import Modulus
from .operators import Family, OperatorSpec, det_mod

ENTROPY_THRESHOLD = 50.0


@dataclass
class CandidateReport:
    spec: "OperatorSpec | RejectedSpec"
    entropy: float | None = None
    entropy_is_estimate: bool = False
    entropy_ok: bool = False
    c_condition: spectral.CVerdict | None = None
    det_ok: bool = False
    irreducible: bool | None = None
    certificate: galois.PeriodCertificate | None = None
    log10_period: float | None = None
    error: str | None = None

    @property
    def maximal(self) -> bool | None:
        return None if self.certificate is None else self.certificate.maximal

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "entropy": self.entropy,
            "entropy_is_estimate": self.entropy_is_estimate,
            "entropy_ok": self.entropy_ok,
            "c_condition": None if self.c_condition is None else {
                "passed": self.c_condition.passed, "min_gap": self.c_condition.min_gap},
            "det_ok": self.det_ok,
            "irreducible": self.irreducible,
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
            "maximal": self.maximal,
            "log10_period": self.log10_period,
            "error": self.error,
        }


def spectral_entropy(spec: OperatorSpec, cap: int = spectral.DEFAULT_CAP):
    """(entropy, is_estimate, C-condition verdict or None)."""
    if spec.N > cap:
        return spectral.entropy_estimate(spec.N), True, None
    sp = spectral.eigenvalues(spec, cap=cap)
    return spectral.entropy(sp).entropy, False, spectral.check_c_condition(sp)


def evaluate(spec: OperatorSpec, modulus: Modulus, factors=None,
             threshold: float = ENTROPY_THRESHOLD, cap: int = spectral.DEFAULT_CAP,
             with_entropy: bool = True) -> CandidateReport:
    """Cheap filters first (det, irreducibility), certification only when factors are given.

    ``factors`` is a FactorizationOfQ, the string "auto" (built-in factoring,
    small q only) or None.
    """
    rep = CandidateReport(spec)
    q = galois.q_of(modulus.p, spec.N)
    rep.log10_period = galois.log10_int(q)
    rep.det_ok = det_mod(spec, modulus) == 1
    if with_entropy:
        rep.entropy, rep.entropy_is_estimate, rep.c_condition = spectral_entropy(spec, cap)
        rep.entropy_ok = rep.entropy >= threshold
    if not rep.det_ok:
        return rep
    rep.irreducible = galois.is_irreducible(galois.char_poly_mod(spec, modulus))
    if factors is not None:
        fac = galois.factor_q(q) if factors == "auto" else factors
        rep.certificate = galois.certify_max_period(spec, modulus, fac)
    return rep


@dataclass(frozen=True)
class RejectedSpec:
    """Parameters that failed OperatorSpec validation, kept for reporting."""
    family: Family
    N: int
    s: int
    m: int
    b: int

    def to_dict(self) -> dict:
        return {"family": Family(self.family).value, "N": self.N,
                "s": str(self.s), "m": str(self.m), "b": str(self.b)}


def _evaluate_safely(args) -> CandidateReport:
    family, N, s, m, b, modulus, factors, threshold, cap, with_entropy = args
    try:
        spec = OperatorSpec(family, N, s, m, b)
    except ValueError as exc:
        return CandidateReport(RejectedSpec(family, N, s, m, b), error=str(exc))
    try:
        return evaluate(spec, modulus, factors, threshold, cap, with_entropy)
    except Exception as exc:  # one bad candidate must not abort the scan
        return CandidateReport(spec, error=f"{type(exc).__name__}: {exc}")


def _rank(rep: CandidateReport):
    return (0 if rep.maximal else 1, -(rep.entropy if rep.entropy is not None else float("-inf")))


def scan(N: int, s_candidates, modulus: Modulus, factors=None, family: Family = Family.TWO,
         m: int = 1, b: int = 0, threshold: float = ENTROPY_THRESHOLD,
         cap: int = spectral.DEFAULT_CAP, with_entropy: bool = True,
         jobs: int = 1) -> list[CandidateReport]:
    """Evaluate each s; maximal-period candidates first, then by entropy."""
    tasks = [(Family(family), N, int(s), m, b, modulus, factors, threshold, cap, with_entropy)
             for s in s_candidates]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_evaluate_safely, tasks))
    else:
        reports = [_evaluate_safely(t) for t in tasks]
    return sorted(reports, key=_rank)  # sorted() is stable, so ties keep input order


def table_row(spec: OperatorSpec, modulus: Modulus, cap: int = spectral.DEFAULT_CAP) -> dict:
    q = galois.q_of(modulus.p, spec.N)
    h, estimate, _ = spectral_entropy(spec, cap)
    return {
        "N": spec.N,
        "s": str(spec.s),
        "m": str(spec.m),
        "entropy": h,
        "entropy_is_estimate": estimate,
        "log10_q": galois.log10_int(q),
        "q_digits": galois.decimal_digits(q),
    }


def format_table(rows: list[dict]) -> str:
    head = ("Size N", "Magic m", "Magic s", "Entropy", "Log of the period q")
    body = []
    for r in rows:
        h = f"{r['entropy']:.1f}" + ("*" if r["entropy_is_estimate"] else "")
        body.append((str(r["N"]), str(r["m"]), str(r["s"]), h, f"{r['log10_q']:.0f}"))
    widths = [max(len(x) for x in col) for col in zip(head, *body)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in [head, *body]]
    if any(r["entropy_is_estimate"] for r in rows):
        lines.append("* entropy estimated as 2N/pi")
    return "\n".join(lines) + "\n"


def reports_json(reports: list[CandidateReport]) -> str:
    return json.dumps({"schema": "mixmax.scan/1",
                       "candidates": [r.to_dict() for r in reports]}, indent=2)
