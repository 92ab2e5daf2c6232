"""The MIXMAX operator families A(N,s), A(N,s,m) and A(N,s,m,b).

Every entry has a closed form, so the generator never has to store the
matrix.  Row 1 is all ones; for i >= 2 column 1 and the strict upper
triangle are ones, and the band 2 <= j <= i carries

    two-parameter     i - j + 2
    three-parameter   (i - j) * m + 2
    four-parameter    2 on the diagonal, (i - j + 2) * m + b below it

with the perturbation s added at (3, 2).  Indices are 1-based here to
match the usual matrix notation; stored matrices are 0-based lists.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import flint

from .field import Modulus, special_exponent


class Family(str, enum.Enum):
    TWO = "two"
    THREE = "three"
    FOUR = "four"


@dataclass(frozen=True)
class OperatorSpec:
    family: Family
    N: int
    s: int = 0
    m: int = 1
    b: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        for name in ("N", "s", "m", "b"):
            object.__setattr__(self, name, int(getattr(self, name)))
        if self.N < 2:
            raise ValueError(f"N must be at least 2, got {self.N}")
        if self.N < 3 and self.s != 0:
            raise ValueError("s perturbs entry (3,2), which needs N >= 3")
        if self.family is Family.TWO and self.m != 1:
            raise ValueError("the two-parameter family has m fixed at 1")
        if self.family is not Family.FOUR and self.b != 0:
            raise ValueError("b only applies to the four-parameter family")
        if self.m < 1:
            raise ValueError(f"m must be positive, got {self.m}")

    @classmethod
    def two(cls, N: int, s: int = 0) -> "OperatorSpec":
        return cls(Family.TWO, N, s)

    @classmethod
    def three(cls, N: int, m: int, s: int = 0) -> "OperatorSpec":
        return cls(Family.THREE, N, s, m)

    @classmethod
    def four(cls, N: int, m: int, b: int, s: int = 0) -> "OperatorSpec":
        return cls(Family.FOUR, N, s, m, b)

    def to_dict(self) -> dict:
        # decimal strings: s from the published tables exceeds 2^53
        return {"family": self.family.value, "N": self.N,
                "s": str(self.s), "m": str(self.m), "b": str(self.b)}

    @classmethod
    def from_dict(cls, d: dict) -> "OperatorSpec":
        return cls(Family(d["family"]), int(d["N"]), int(d.get("s", 0)),
                   int(d.get("m", 1)), int(d.get("b", 0)))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "OperatorSpec":
        return cls.from_dict(json.loads(text))

    def band_value(self, offset: int) -> int:
        """Unperturbed entry at (i, j) with i - j = offset >= 0, i >= 2."""
        if self.family is Family.TWO:
            return offset + 2
        if self.family is Family.THREE:
            return offset * self.m + 2
        if offset == 0:
            return 2
        return (offset + 2) * self.m + self.b


def entry(spec: OperatorSpec, i: int, j: int) -> int:
    N = spec.N
    if not (1 <= i <= N and 1 <= j <= N):
        raise IndexError(f"entry ({i}, {j}) outside a {N}x{N} matrix")
    if i == 1 or j == 1 or j > i:
        return 1
    value = spec.band_value(i - j)
    if (i, j) == (3, 2):
        value += spec.s
    return value


def materialize(spec: OperatorSpec) -> list[list[int]]:
    """Dense N x N matrix of exact integers (0-based lists)."""
    N = spec.N
    band = [spec.band_value(d) for d in range(N)]
    rows = [[1] * N]
    for i in range(1, N):
        # 0-based row i, columns 1..i carry band[i - j]
        rows.append([1] + [band[i - j] for j in range(1, i + 1)] + [1] * (N - 1 - i))
    if N >= 3:
        rows[2][1] += spec.s
    return rows


def materialize_mod(spec: OperatorSpec, modulus: Modulus) -> list[list[int]]:
    p = modulus.p
    return [[x % p for x in row] for row in materialize(spec)]


def det_mod(spec: OperatorSpec, modulus: Modulus) -> int:
    """Determinant of A reduced mod p, by word-modular elimination over GF(p)."""
    return int(flint.nmod_mat(materialize_mod(spec, modulus), modulus.p).det())


def det_matrix_mod(rows: list[list[int]], p: int) -> int:
    """Plain Gaussian elimination; the reference for det_mod."""
    a = [list(r) for r in rows]
    n = len(a)
    det = 1
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] % p), None)
        if pivot is None:
            return 0
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        pr = a[col]
        piv = pr[col] % p
        det = det * piv % p
        inv = pow(piv, p - 2, p)
        for r in range(col + 1, n):
            f = a[r][col] * inv % p
            if f:
                row = a[r]
                a[r] = row[:col] + [(x - f * y) % p for x, y in zip(row[col:], pr[col:])]
    return det % p


@dataclass(frozen=True)
class Diagnostic:
    level: str  # "warning" or "error"
    message: str


def validate(spec: OperatorSpec, modulus: Modulus, special_k: int | None = None) -> list[Diagnostic]:
    """Parameter diagnostics; never raises.

    ``special_k`` asserts that m == 2^k + 1 (the shift-add fast path).
    """
    out = []
    if spec.N * spec.m >= modulus.p:
        out.append(Diagnostic(
            "warning",
            f"N*m = {spec.N * spec.m} >= p = {modulus.p}: entries wrap modulo p"))
    if special_k is not None and special_exponent(spec.m) != special_k:
        out.append(Diagnostic("error", f"m = {spec.m} is not 2^{special_k}+1"))
    return out
