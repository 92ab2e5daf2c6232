"""Spectrum, Kolmogorov entropy and the C-condition for MIXMAX operators.

Two routes produce eigenvalues:

* ``float``: LAPACK's balanced Hessenberg QR via numpy.  Exact enough
  whenever every entry is representable in binary64 (|entry| < 2^53).
* ``exact``: the integer characteristic polynomial (computed exactly)
  followed by certified complex root isolation in ball arithmetic.  Needed
  when s or m pushes entries past 2^53, and when the smallest eigenvalue
  (~ m^-(N-1) for the three-parameter family) underflows binary64.

``auto`` tries ``float`` when entries are representable and falls back to
``exact`` if the float spectrum violates prod |lambda| = 1.
Log-moduli are carried alongside the eigenvalues so that entropy sums stay
accurate even when a modulus is not representable as a double.
"""

from __future__ import annotations

import cmath
import json
import math
import warnings
from dataclasses import dataclass

import flint
import numpy as np

from .operators import OperatorSpec, materialize

DEFAULT_CAP = 4096
DEFAULT_GAP_TOL = 1e-6
EXACT_FLOAT_LIMIT = 1 << 53


class ConvergenceFailure(RuntimeError):
    pass


class PrecisionWarning(UserWarning):
    pass


@dataclass
class Spectrum:
    eigenvalues: np.ndarray  # complex128, ascending modulus
    log_moduli: np.ndarray  # ln|lambda|, same order
    real_mask: np.ndarray
    method: str

    @property
    def N(self) -> int:
        return len(self.eigenvalues)

    @property
    def d(self) -> int:
        """Number of contracting eigenvalues (|lambda| < 1)."""
        return int(np.count_nonzero(self.log_moduli < 0))

    @property
    def real_count(self) -> int:
        return int(np.count_nonzero(self.real_mask))

    @property
    def phases(self) -> np.ndarray:
        return np.angle(self.eigenvalues)

    @property
    def log_det(self) -> float:
        return float(np.sum(self.log_moduli))

    @property
    def min_unit_circle_gap(self) -> float:
        return float(np.min(np.abs(np.expm1(self.log_moduli))))

    def inverse(self) -> np.ndarray:
        """Eigenvalues of A^-1 (reciprocals), in the same order."""
        with np.errstate(over="ignore", invalid="ignore"):
            return np.exp(-self.log_moduli) * np.exp(-1j * self.phases)


def _sorted_spectrum(vals: np.ndarray, logs: np.ndarray, real: np.ndarray, method: str) -> Spectrum:
    order = np.lexsort((np.angle(vals), logs))
    return Spectrum(vals[order], logs[order], real[order], method)


def _float_spectrum(matrix) -> Spectrum:
    a = np.asarray(matrix, dtype=np.float64)
    try:
        vals = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    vals = vals.astype(np.complex128)
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(vals))
    # LAPACK reports real eigenvalues with an exactly zero imaginary part
    return _sorted_spectrum(vals, logs, vals.imag == 0, "float")


def _exact_spectrum(matrix) -> Spectrum:
    poly = flint.fmpz_mat([[int(x) for x in row] for row in matrix]).charpoly()
    vals, logs, real = [], [], []
    for root, mult in poly.complex_roots():
        is_real = root.imag == 0  # isolated real roots come back with exact zero imaginary part
        log_mod = float(abs(root).log().mid())
        if is_real:
            phase = 0.0 if root.real > 0 else math.pi
        else:
            phase = float(root.arg().mid())
        r = math.exp(log_mod) if log_mod < 709 else math.inf
        z = complex(math.copysign(r, math.cos(phase)), 0.0) if is_real else cmath.rect(r, phase)
        vals += [z] * mult
        logs += [log_mod] * mult
        real += [is_real] * mult
    return _sorted_spectrum(np.array(vals, dtype=np.complex128), np.array(logs),
                            np.array(real, dtype=bool), "exact")


def max_abs_entry(matrix) -> int:
    return max(abs(int(x)) for row in matrix for x in row)


def spectrum_of_matrix(matrix, method: str = "auto") -> Spectrum:
    """Spectrum of an explicit integer (or, for ``float``, real) matrix."""
    if method == "auto":
        if max_abs_entry(matrix) >= EXACT_FLOAT_LIMIT:
            return _exact_spectrum(matrix)
        sp = _float_spectrum(matrix)
        # a tiny eigenvalue lost to rounding shows up as prod |lambda| != 1
        if abs(sp.log_det) > 1e-6 * sp.N:
            return _exact_spectrum(matrix)
        return sp
    if method == "float":
        if max_abs_entry(matrix) >= 1 << 52:
            warnings.warn("matrix entries near the binary64 mantissa limit; "
                          "use method='exact'", PrecisionWarning, stacklevel=2)
        return _float_spectrum(matrix)
    if method == "exact":
        return _exact_spectrum(matrix)
    raise ValueError(f"unknown method {method!r}")


def eigenvalues(spec: OperatorSpec, method: str = "auto", cap: int = DEFAULT_CAP) -> Spectrum:
    if spec.N > cap:
        raise ValueError(f"N = {spec.N} exceeds the spectral cap {cap}")
    return spectrum_of_matrix(materialize(spec), method)


@dataclass
class EntropyReport:
    entropy: float  # sum of ln|lambda| over expanding eigenvalues
    contracting: float  # sum of -ln|lambda| over contracting eigenvalues
    asymptotic: float  # 2N/pi
    lambda_min: float
    lambda_max: float
    log_lambda_min: float
    log_lambda_max: float
    min_unit_circle_gap: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def entropy(sp: Spectrum) -> EntropyReport:
    logs = sp.log_moduli
    return EntropyReport(
        entropy=float(np.sum(logs[logs > 0])),
        contracting=float(-np.sum(logs[logs < 0])),
        asymptotic=2 * sp.N / math.pi,
        lambda_min=float(np.exp(logs[0])),
        lambda_max=float(np.exp(min(logs[-1], 709.0))),
        log_lambda_min=float(logs[0]),
        log_lambda_max=float(logs[-1]),
        min_unit_circle_gap=sp.min_unit_circle_gap,
    )


def entropy_estimate(N: int) -> float:
    """Large-N linear estimate h ~ 2N/pi for the two-parameter family."""
    return 2 * N / math.pi


@dataclass
class CVerdict:
    passed: bool
    min_gap: float
    log_det: float
    gap_tol: float
    log_det_tol: float

    def __bool__(self) -> bool:
        return self.passed


def check_c_condition(sp: Spectrum, gap_tol: float = DEFAULT_GAP_TOL,
                      log_det_tol: float | None = None) -> CVerdict:
    """No eigenvalue on the unit circle and prod |lambda| = 1.

    The true gap shrinks like 1/N, so very large N needs a smaller gap_tol.
    """
    if log_det_tol is None:
        log_det_tol = 1e-6 * sp.N
    gap = sp.min_unit_circle_gap
    ld = sp.log_det
    return CVerdict(gap > gap_tol and abs(ld) <= log_det_tol, gap, ld, gap_tol, log_det_tol)


def limiting_curve(phi):
    """Radius 4 cos^2(phi/2) of the leaf traced by the inverse spectrum."""
    return 4 * np.cos(np.asarray(phi) / 2) ** 2


def approx_eigenvalue(j: int, N: int) -> complex:
    """Small-eigenvalue approximation for A(N, s=-1), |j| <= N/2."""
    if abs(j) * 2 > N:
        raise ValueError(f"|j| must be at most N/2, got j={j}, N={N}")
    return complex(np.exp(1j * np.pi * j / N) / (4 * np.cos(j * np.pi / (2 * N)) ** 2))


def approx_eigenvalues(N: int) -> np.ndarray:
    js = np.arange(-(N // 2), N // 2 + 1)
    return np.exp(1j * np.pi * js / N) / (4 * np.cos(js * np.pi / (2 * N)) ** 2)


def formula_deviation(sp: Spectrum, max_modulus: float = 0.9) -> np.ndarray:
    """Relative modulus error against the approximation, pairing by nearest phase.

    One value per eigenvalue with |lambda| < max_modulus.
    """
    approx = approx_eigenvalues(sp.N)
    ph = np.angle(approx)
    mask = sp.log_moduli < math.log(max_modulus)
    out = []
    for z in sp.eigenvalues[mask]:
        k = int(np.argmin(np.abs(ph - np.angle(z))))
        out.append(abs(abs(z) - abs(approx[k])) / abs(approx[k]))
    return np.array(out)


def curve_distance(points: np.ndarray, samples: int = 20001) -> np.ndarray:
    """Euclidean distance from each point to the curve r = 4cos^2(phi/2)."""
    theta = np.linspace(-np.pi, np.pi, samples)
    curve = limiting_curve(theta) * np.exp(1j * theta)
    return np.array([float(np.min(np.abs(curve - z))) for z in points])


def _rows(values: np.ndarray, logs: np.ndarray) -> list[dict]:
    rows = []
    for z, lm in zip(values, logs):
        finite = bool(np.isfinite(z.real) and np.isfinite(z.imag))
        rows.append({
            "re": float(z.real) if finite else None,
            "im": float(z.imag) if finite else None,
            "modulus": float(abs(z)) if finite else None,
            "log_modulus": float(lm),
            "phase": float(np.angle(z)) if finite else None,
            "is_expanding": bool(lm > 0),
        })
    return rows


def spectrum_report(spec: OperatorSpec, method: str = "auto", curve_samples: int = 361) -> dict:
    sp = eigenvalues(spec, method)
    rep = entropy(sp)
    verdict = check_c_condition(sp)
    theta = np.linspace(-np.pi, np.pi, curve_samples)
    return {
        "schema": "mixmax.spectrum/1",
        "spec": spec.to_dict(),
        "method": sp.method,
        "N": sp.N,
        "d": sp.d,
        "real_count": sp.real_count,
        "entropy": rep.to_dict(),
        "c_condition": {"passed": verdict.passed, "min_gap": verdict.min_gap,
                        "log_det": verdict.log_det},
        "eigenvalues": _rows(sp.eigenvalues, sp.log_moduli),
        "inverse_eigenvalues": _rows(sp.inverse(), -sp.log_moduli),
        "curve": [{"phi": float(t), "r": float(r)} for t, r in zip(theta, limiting_curve(theta))],
    }


CSV_COLUMNS = ("re", "im", "modulus", "phase", "is_expanding")


def report_csv(rows: list[dict]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in rows:
        lines.append(",".join("" if r[c] is None else repr(r[c]) if not isinstance(r[c], bool)
                              else str(int(r[c])) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def report_json(report: dict) -> str:
    return json.dumps(report, indent=1)
