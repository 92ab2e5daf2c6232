"""Period theory over GF(p^N).

With a prime p the recursion a -> A a (mod p) lives in the extension field
GF(p^N).  Since det A = 1 the characteristic polynomial can never be
primitive, so the longest possible orbit is q = (p^N - 1)/(p - 1).  It is
reached, for every nonzero seed, iff

  1. A^q = I (mod p)                 (follows from an irreducible char poly)
  2. A^(q/r) != I (mod p)            for every prime r dividing q

and then the p^N - 1 nonzero states split into exactly p - 1 orbits of
length q.  ``certify_max_period`` checks both conditions and
``brute_force_period`` / ``orbit_lengths`` enumerate orbits directly at
toy sizes so the two can be compared.

Polynomials are coefficient lists, lowest degree first.  Products use
Kronecker substitution (pack coefficients into one big int, multiply,
unpack), which keeps degree-hundreds arithmetic fast in pure Python.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import flint
from sympy import factorint, isprime, primefactors

from .field import Modulus
from .operators import OperatorSpec, det_matrix_mod, materialize_mod


class ModulusTooSmall(ValueError):
    pass


class BadFactorization(ValueError):
    pass


class StateSpaceTooLarge(ValueError):
    pass


BRUTE_FORCE_LIMIT = 10**7
FACTOR_LIMIT = 10**18


# ----------------------------------------------------------------------
# polynomial arithmetic over GF(p)

def _slot_bytes(n: int, p: int) -> int:
    # a product coefficient is a sum of at most n terms below p^2
    return (n * (p - 1) ** 2).bit_length() // 8 + 1


def _pack(f: list[int], w: int) -> int:
    return int.from_bytes(b"".join(c.to_bytes(w, "little") for c in f), "little")


def _unpack(x: int, n: int, w: int, p: int) -> list[int]:
    raw = x.to_bytes(n * w, "little")
    return [int.from_bytes(raw[i * w:(i + 1) * w], "little") % p for i in range(n)]


def poly_trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def poly_mul(f: list[int], g: list[int], p: int) -> list[int]:
    if not f or not g:
        return []
    n = len(f) + len(g) - 1
    w = _slot_bytes(min(len(f), len(g)), p)
    return poly_trim(_unpack(_pack(f, w) * _pack(g, w), n, w, p))


def poly_sub(f: list[int], g: list[int], p: int) -> list[int]:
    n = max(len(f), len(g))
    f = f + [0] * (n - len(f))
    g = g + [0] * (n - len(g))
    return poly_trim([(a - b) % p for a, b in zip(f, g)])


def poly_divmod(f: list[int], g: list[int], p: int) -> tuple[list[int], list[int]]:
    """Schoolbook division; g need not be monic."""
    g = poly_trim(list(g))
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(f)
    dg = len(g) - 1
    inv_lead = pow(g[-1], p - 2, p)
    q = [0] * max(len(r) - dg, 0)
    for k in range(len(r) - 1, dg - 1, -1):
        c = r[k] * inv_lead % p
        if c:
            q[k - dg] = c
            off = k - dg
            for j in range(dg + 1):
                r[off + j] = (r[off + j] - c * g[j]) % p
    return poly_trim(q), poly_trim(r[:dg])


def poly_gcd(f: list[int], g: list[int], p: int) -> list[int]:
    a, b = poly_trim(list(f)), poly_trim(list(g))
    while b:
        a, b = b, poly_divmod(a, b, p)[1]
    if not a:
        return a
    inv = pow(a[-1], p - 2, p)
    return [c * inv % p for c in a]


class PolyModulus:
    """Fast reduction modulo a fixed monic polynomial P of degree n.

    Uses the reversed-inverse trick: the quotient of f by P is read off
    from rev(f) * rev(P)^-1 mod x^k, so a reduction costs two products.
    """

    def __init__(self, P: list[int], p: int):
        if not P or P[-1] % p != 1:
            raise ValueError("modulus polynomial must be monic")
        self.P = [c % p for c in P]
        self.p = p
        self.n = len(P) - 1
        self._rev_inv = self._series_inverse(self.P[::-1], self.n)

    def _series_inverse(self, h: list[int], k: int) -> list[int]:
        # h[0] == 1; Newton iteration g <- g (2 - h g) mod x^prec
        p = self.p
        g = [1]
        prec = 1
        while prec < k:
            prec = min(2 * prec, k)
            hg = poly_mul(h[:prec], g, p)[:prec]
            corr = [(-c) % p for c in hg] + [0] * (prec - len(hg))
            corr[0] = (corr[0] + 2) % p
            g = poly_mul(g, corr, p)[:prec]
        return g[:k]

    def reduce(self, f: list[int]) -> list[int]:
        n, p = self.n, self.p
        f = poly_trim(list(f))
        if len(f) <= n:
            return f
        k = len(f) - n  # quotient length
        if k > len(self._rev_inv):
            self._rev_inv = self._series_inverse(self.P[::-1], k)
        rev_q = poly_mul(f[::-1][:k], self._rev_inv[:k], p)[:k]
        rev_q += [0] * (k - len(rev_q))
        q = rev_q[::-1]
        return poly_sub(f[:n], poly_mul(q, self.P, p)[:n], p)

    def mulmod(self, f: list[int], g: list[int]) -> list[int]:
        return self.reduce(poly_mul(f, g, self.p))

    def powmod(self, f: list[int], e: int) -> list[int]:
        result = [1] if self.n > 0 else []
        base = self.reduce(f)
        for bit in bin(e)[2:]:
            result = self.mulmod(result, result)
            if bit == "1":
                result = self.mulmod(result, base)
        return result


@dataclass(frozen=True)
class PolyModP:
    coeffs: tuple[int, ...]  # lowest degree first, monic
    p: int

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc


# ----------------------------------------------------------------------
# characteristic polynomial

def _hessenberg_mod(a: list[list[int]], p: int) -> list[list[int]]:
    """Upper Hessenberg form similar to ``a`` over GF(p)."""
    h = [list(r) for r in a]
    n = len(h)
    for k in range(n - 2):
        piv = next((r for r in range(k + 1, n) if h[r][k]), None)
        if piv is None:
            continue
        if piv != k + 1:
            h[piv], h[k + 1] = h[k + 1], h[piv]
            for row in h:
                row[piv], row[k + 1] = row[k + 1], row[piv]
        pr = h[k + 1]
        inv = pow(pr[k], p - 2, p)
        factors = []
        for i in range(k + 2, n):
            f = h[i][k] * inv % p
            factors.append(f)
            if f:
                row = h[i]
                h[i] = row[:k] + [(x - f * y) % p for x, y in zip(row[k:], pr[k:])]
        # right-multiplying by the inverse elimination adds f_i * col_i to col k+1
        if any(factors):
            for row in h:
                row[k + 1] = (row[k + 1] + sum(f * x for f, x in zip(factors, row[k + 2:]))) % p
    return h


def _charpoly_hessenberg(h: list[list[int]], p: int) -> list[int]:
    n = len(h)
    polys = [[1]]  # polys[k] = char poly of leading k x k block
    for k in range(n):
        # (x - h_kk) * polys[k]
        prev = polys[k]
        nxt = [0] + prev
        for i, c in enumerate(prev):
            nxt[i] = (nxt[i] - h[k][k] * c) % p
        prod = 1
        for i in range(k - 1, -1, -1):
            prod = prod * h[i + 1][i] % p
            if prod == 0:
                break
            t = h[i][k] * prod % p
            if t:
                for j, c in enumerate(polys[i]):
                    nxt[j] = (nxt[j] - t * c) % p
        polys.append(nxt)
    return polys[n]


def char_poly_matrix_mod(a: list[list[int]], p: int) -> PolyModP:
    a = [[x % p for x in row] for row in a]
    return PolyModP(tuple(_charpoly_hessenberg(_hessenberg_mod(a, p), p)), p)


def char_poly_mod(spec: OperatorSpec, modulus: Modulus) -> PolyModP:
    """det(xI - A) mod p via Hessenberg reduction; valid for every prime p."""
    return char_poly_matrix_mod(materialize_mod(spec, modulus), modulus.p)


def char_poly_interpolated(spec: OperatorSpec, modulus: Modulus) -> PolyModP:
    """Same polynomial by evaluating det(xI - A) at N+1 points and interpolating.

    Needs p > N so that N+1 distinct evaluation points exist.
    """
    N, p = spec.N, modulus.p
    if p <= N:
        raise ModulusTooSmall(f"interpolation needs p > N, got p={p}, N={N}")
    a = materialize_mod(spec, modulus)
    xs = list(range(N + 1))
    ys = []
    for x in xs:
        shifted = [[(x if i == j else 0) - v for j, v in enumerate(row)] for i, row in enumerate(a)]
        ys.append(det_matrix_mod(shifted, p))
    # Lagrange: sum_k y_k prod_{j != k} (x - x_j)/(x_k - x_j)
    full = [1]
    for x in xs:
        full = poly_mul(full, [(-x) % p, 1], p)
    coeffs = [0] * (N + 1)
    for k, (xk, yk) in enumerate(zip(xs, ys)):
        basis, _ = poly_divmod(full, [(-xk) % p, 1], p)
        denom = 1
        for j, xj in enumerate(xs):
            if j != k:
                denom = denom * (xk - xj) % p
        scale = yk * pow(denom, p - 2, p) % p
        for i, c in enumerate(basis):
            coeffs[i] = (coeffs[i] + scale * c) % p
    return PolyModP(tuple(coeffs), p)


# ----------------------------------------------------------------------
# irreducibility

def frobenius_matrix(P: PolyModP) -> list[list[int]]:
    """Row i holds x^(i p) mod P, so f(x)^p = sum_i f_i * row_i over GF(p)."""
    ring = PolyModulus(list(P.coeffs), P.p)
    n = ring.n
    xp = ring.powmod([0, 1], P.p)
    rows = [[1]]
    for _ in range(1, n):
        rows.append(ring.mulmod(rows[-1], xp))
    return [r + [0] * (n - len(r)) for r in rows]


def _apply_frobenius(f: list[int], packed_rows: list[int], n: int, w: int, p: int) -> list[int]:
    acc = 0
    for c, row in zip(f, packed_rows):
        if c:
            acc += c * row
    return _unpack(acc, n, w, p)


def is_irreducible(P: PolyModP) -> bool:
    """Rabin's test: x^(p^n) = x mod P and gcd(x^(p^(n/r)) - x, P) = 1 for primes r | n."""
    n, p = P.degree, P.p
    if n < 1:
        raise ValueError("degree must be at least 1")
    if n == 1:
        return True
    rows = frobenius_matrix(P)
    w = _slot_bytes(n, p)
    packed = [_pack(r, w) for r in rows]
    targets = {n // r for r in primefactors(n)}
    x = [0, 1] + [0] * (n - 2)
    cur = list(x)
    for k in range(1, n + 1):
        cur = _apply_frobenius(cur, packed, n, w, p)
        if k in targets:
            if len(poly_gcd(poly_sub(cur, x, p), list(P.coeffs), p)) != 1:
                return False
    return poly_trim(list(cur)) == poly_trim(list(x))


# ----------------------------------------------------------------------
# matrix powers

def _nmod_matrix(rows: list[list[int]], p: int) -> flint.nmod_mat:
    return flint.nmod_mat(rows, p)


def _to_ints(mat: flint.nmod_mat) -> list[list[int]]:
    n, k = mat.nrows(), mat.ncols()
    flat = [int(x) for x in mat.entries()]
    return [flat[i * k:(i + 1) * k] for i in range(n)]


def _pow_nmod(base: flint.nmod_mat, e: int) -> flint.nmod_mat:
    n = base.nrows()
    p = base.modulus()
    result = flint.nmod_mat([[int(i == j) for j in range(n)] for i in range(n)], p)
    for bit in bin(e)[2:]:
        result = result * result
        if bit == "1":
            result = result * base
    return result


def matrix_pow_mod(spec: OperatorSpec, e: int, modulus: Modulus) -> list[list[int]]:
    """A^e mod p by square and multiply; e may be arbitrarily large."""
    if e < 0:
        raise ValueError("exponent must be non-negative")
    base = _nmod_matrix(materialize_mod(spec, modulus), modulus.p)
    return _to_ints(_pow_nmod(base, e))


def power_is_identity(spec: OperatorSpec, e: int, modulus: Modulus) -> bool:
    base = _nmod_matrix(materialize_mod(spec, modulus), modulus.p)
    m = _pow_nmod(base, e)
    N = spec.N
    return m == flint.nmod_mat([[int(i == j) for j in range(N)] for i in range(N)], modulus.p)


def apply_matrix_power(spec: OperatorSpec, e: int, modulus: Modulus, vec: list[int]) -> list[int]:
    base = _nmod_matrix(materialize_mod(spec, modulus), modulus.p)
    col = flint.nmod_mat([[v] for v in vec], modulus.p)
    return [int(x) for x in (_pow_nmod(base, e) * col).entries()]


# ----------------------------------------------------------------------
# the period q and its factorization

def q_of(p: int, N: int) -> int:
    if p < 2 or N < 1:
        raise ValueError("need p >= 2 and N >= 1")
    q, rem = divmod(p**N - 1, p - 1)
    assert rem == 0
    return q


def decimal_digits(n: int) -> int:
    """Number of decimal digits of a positive integer, without str()."""
    if n <= 0:
        raise ValueError("n must be positive")
    k = int((n.bit_length() - 1) * math.log10(2))
    # k is within one of floor(log10 n); settle it exactly
    while 10 ** (k + 1) <= n:
        k += 1
    while 10**k > n:
        k -= 1
    return k + 1


def log10_int(n: int) -> float:
    """log10 of an arbitrarily large positive integer."""
    shift = max(n.bit_length() - 64, 0)
    return math.log10(n >> shift) + shift * math.log10(2)


@dataclass(frozen=True)
class FactorizationOfQ:
    factors: tuple[tuple[int, int], ...]
    provenance: str = "supplied"  # or "computed"

    @property
    def primes(self) -> list[int]:
        return [r for r, _ in self.factors]

    def product(self) -> int:
        out = 1
        for r, k in self.factors:
            out *= r**k
        return out

    def check(self, q: int) -> None:
        if self.product() != q:
            raise BadFactorization("product of the supplied factors differs from q")
        for r, k in self.factors:
            if k < 1 or not isprime(r):
                raise BadFactorization(f"{r}^{k} is not a prime power")

    @classmethod
    def from_dict(cls, d: dict[int, int], provenance: str = "supplied") -> "FactorizationOfQ":
        return cls(tuple(sorted((int(r), int(k)) for r, k in d.items())), provenance)

    @classmethod
    def parse(cls, text: str) -> "FactorizationOfQ":
        pairs = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise BadFactorization(f"line {lineno}: expected 'prime multiplicity'")
            r, k = int(parts[0]), int(parts[1])
            pairs[r] = pairs.get(r, 0) + k
        return cls.from_dict(pairs)

    @classmethod
    def load(cls, path: str | Path, q: int | None = None) -> "FactorizationOfQ":
        fac = cls.parse(Path(path).read_text())
        if q is not None:
            fac.check(q)
        return fac

    def dumps(self) -> str:
        return "".join(f"{r} {k}\n" for r, k in self.factors)


def factor_q(q: int) -> FactorizationOfQ:
    if q > FACTOR_LIMIT:
        raise BadFactorization(
            f"q has {decimal_digits(q)} digits; built-in factoring stops at 10^18, supply a factor file")
    return FactorizationOfQ.from_dict(factorint(q), "computed")


# ----------------------------------------------------------------------
# certification

@dataclass
class PeriodCertificate:
    q: int
    irreducible: bool
    cond1: bool
    cond2: list[tuple[int, bool]] = field(default_factory=list)

    @property
    def maximal(self) -> bool:
        return self.irreducible and self.cond1 and all(ok for _, ok in self.cond2)

    @property
    def seed_independent(self) -> bool:
        # with both conditions the period is q for every nonzero seed
        return self.maximal

    def to_dict(self) -> dict:
        return {
            "schema": "mixmax.certificate/1",
            "q_digits": decimal_digits(self.q),
            "irreducible": self.irreducible,
            "cond1": self.cond1,
            "cond2": [{"r": str(r), "pass": ok} for r, ok in self.cond2],
            "maximal": self.maximal,
            "period_independent_of_seed": self.seed_independent,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def condition_one(spec: OperatorSpec, modulus: Modulus) -> tuple[bool, bool]:
    """(char poly irreducible, A^q == I) -- no factorization needed."""
    q = q_of(modulus.p, spec.N)
    return is_irreducible(char_poly_mod(spec, modulus)), power_is_identity(spec, q, modulus)


def certify_max_period(spec: OperatorSpec, modulus: Modulus,
                       factors: FactorizationOfQ | None = None) -> PeriodCertificate:
    q = q_of(modulus.p, spec.N)
    if factors is None:
        factors = factor_q(q)
    factors.check(q)
    irreducible, cond1 = condition_one(spec, modulus)
    base = _nmod_matrix(materialize_mod(spec, modulus), modulus.p)
    ident = flint.nmod_mat([[int(i == j) for j in range(spec.N)] for i in range(spec.N)], modulus.p)
    cond2 = [(r, _pow_nmod(base, q // r) != ident) for r in factors.primes]
    return PeriodCertificate(q, irreducible, cond1, cond2)


# ----------------------------------------------------------------------
# brute-force oracle

def _check_state_space(spec: OperatorSpec, modulus: Modulus) -> None:
    if modulus.p**spec.N > BRUTE_FORCE_LIMIT:
        raise StateSpaceTooLarge(f"p^N = {modulus.p}^{spec.N} exceeds {BRUTE_FORCE_LIMIT}")


def _dense_step(a: list[list[int]], p: int):
    def step(v: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(sum(x * y for x, y in zip(row, v)) % p for row in a)
    return step


def brute_force_period(spec: OperatorSpec, modulus: Modulus, seed: list[int]) -> int:
    """Smallest t >= 1 with A^t a = a, by direct iteration."""
    _check_state_space(spec, modulus)
    p = modulus.p
    start = tuple(x % p for x in seed)
    if len(start) != spec.N:
        raise ValueError("seed length must equal N")
    if not any(start):
        raise ValueError("the all-zero state is a fixed point, not a valid seed")
    step = _dense_step(materialize_mod(spec, modulus), p)
    v = step(start)
    t = 1
    while v != start:
        v = step(v)
        t += 1
    return t


def orbit_lengths(spec: OperatorSpec, modulus: Modulus) -> list[int]:
    """Lengths of the orbits partitioning all p^N - 1 nonzero states."""
    _check_state_space(spec, modulus)
    p, N = modulus.p, spec.N
    step = _dense_step(materialize_mod(spec, modulus), p)
    seen = bytearray(p**N)

    def index(v):
        i = 0
        for x in v:
            i = i * p + x
        return i

    lengths = []
    for start_idx in range(1, p**N):
        if seen[start_idx]:
            continue
        v = []
        r = start_idx
        for _ in range(N):
            r, d = divmod(r, p)
            v.append(d)
        start = tuple(reversed(v))
        cur, t = start, 0
        while True:
            seen[index(cur)] = 1
            cur = step(cur)
            t += 1
            if cur == start:
                break
        lengths.append(t)
    return lengths


def matrix_order(spec: OperatorSpec, modulus: Modulus, limit: int = 10**6) -> int:
    """Multiplicative order of A in GL(N, p) by repeated multiplication."""
    base = _nmod_matrix(materialize_mod(spec, modulus), modulus.p)
    ident = flint.nmod_mat([[int(i == j) for j in range(spec.N)] for i in range(spec.N)], modulus.p)
    cur = base
    for t in range(1, limit + 1):
        if cur == ident:
            return t
        cur = cur * base
    raise StateSpaceTooLarge(f"order exceeds {limit}")


def density_log10(q: int, h: float) -> float:
    """log10 of the periodic-orbit count estimate e^(q h) / q."""
    if q < 1 or h <= 0:
        raise ValueError("need q >= 1 and h > 0")
    return q * h / math.log(10) - log10_int(q)
