"""Arithmetic in GF(p) for word-sized primes.

Residues are plain Python ints kept in canonical form ``0 <= x < p``.
``p = 2^61 - 1`` gets a fold reduction path: since 2^61 = 1 (mod p), a
double-width product ``hi * 2^61 + lo`` reduces to ``hi + lo``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from sympy import isprime

MERSENNE61 = (1 << 61) - 1


@dataclass(frozen=True)
class Modulus:
    p: int
    is_mersenne61: bool = field(init=False)

    def __post_init__(self):
        p = int(self.p)
        if not 2 <= p <= MERSENNE61:
            raise ValueError(f"modulus must lie in [2, 2^61-1], got {p}")
        if not isprime(p):
            raise ValueError(f"modulus {p} is not prime")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "is_mersenne61", p == MERSENNE61)

    def reduce(self, x: int) -> int:
        """Canonical residue of an arbitrary (possibly negative) integer."""
        return x % self.p


M61 = Modulus(MERSENNE61)


def _fold61(x: int) -> int:
    # valid for 0 <= x < 2^122
    r = (x >> 61) + (x & MERSENNE61)
    if r >= MERSENNE61:
        r -= MERSENNE61
    return r


def add_mod(x: int, y: int, m: Modulus) -> int:
    s = x + y
    return s - m.p if s >= m.p else s


def sub_mod(x: int, y: int, m: Modulus) -> int:
    d = x - y
    return d + m.p if d < 0 else d


def neg_mod(x: int, m: Modulus) -> int:
    return m.p - x if x else 0


def mul_mod(x: int, y: int, m: Modulus) -> int:
    """(x*y) mod p for canonical x, y."""
    if m.is_mersenne61:
        return _fold61(x * y)
    return (x * y) % m.p


def pow_mod(x: int, e: int, m: Modulus) -> int:
    """x**e mod p; e may exceed the machine word."""
    if e < 0:
        raise ValueError("exponent must be non-negative")
    return pow(x, e, m.p)


def inv_mod(x: int, m: Modulus) -> int:
    if x % m.p == 0:
        raise ZeroDivisionError("zero has no inverse in GF(p)")
    return pow_mod(x % m.p, m.p - 2, m)


def special_exponent(value: int) -> int | None:
    """Return k if value == 2^k + 1 (k >= 1), else None."""
    v = value - 1
    if v >= 2 and v & (v - 1) == 0:
        return v.bit_length() - 1
    return None


def mul_special(x: int, k: int, m: Modulus) -> int:
    """x * (2^k + 1) mod p using a shift and an add."""
    if k < 0 or (1 << k) + 1 >= m.p:
        raise ValueError(f"2^{k}+1 must be smaller than p={m.p}")
    if m.is_mersenne61:
        # x * 2^k mod (2^61 - 1) is a 61-bit rotation
        shifted = ((x << k) | (x >> (61 - k))) & MERSENNE61 if k else x
        return add_mod(shifted, x, m)
    return ((x << k) + x) % m.p
