"""MIXMAX generator: a^(k+1) = A a^(k) mod p in O(N) per step.

Consecutive rows of A differ in a very regular way.  For the two- and
three-parameter families, row(i+1) - row(i) (i >= 2) is

    0 in column 1, m in columns 2..i, 1 in column i+1, 0 beyond

so with P_i = a_2 + ... + a_i the new vector follows from

    new_1 = a_1 + ... + a_N
    new_2 = new_1 + a_2
    new_{i+1} = new_i + m P_i + a_{i+1}

after which s a_2 is added to new_3 alone.  The four-parameter family
has a diagonal 2 breaking the band, giving

    new_{i+1} = new_i + m P_{i-1} + (3m + b - 2) a_i + a_{i+1}.

``step_naive`` keeps the plain N^2 product around as the reference.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace

import flint
import numpy as np

from . import galois
from .field import Modulus, mul_mod, special_exponent
from .operators import Family, OperatorSpec, entry, materialize_mod

MAGIC = b"MXST"
VERSION = 1
DEFAULT_STREAM_SPACING = 512  # log2 of the jump between derived streams

_FAMILY_TAGS = {Family.TWO: 2, Family.THREE: 3, Family.FOUR: 4}
_TAG_FAMILIES = {v: k for k, v in _FAMILY_TAGS.items()}

# SplitMix64 output function constants (Steele, Lea & Flood 2014)
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK64 = (1 << 64) - 1
# (p-1)/p rounds to 1.0 in binary64 for p near 2^61; outputs are clamped here
_BELOW_ONE = float(np.nextafter(1.0, 0.0))


class AllZeroSeed(ValueError):
    pass


class FormatError(ValueError):
    pass


class RangeError(ValueError):
    pass


@dataclass
class GeneratorState:
    spec: OperatorSpec
    modulus: Modulus
    a: list[int]
    counter: int = 0
    cursor: int = 1  # 1-based index of the next component to emit
    _kernel: "_StepKernel" = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if len(self.a) != self.spec.N:
            raise ValueError(f"state has {len(self.a)} components, N = {self.spec.N}")
        if self._kernel is None:
            self._kernel = _StepKernel.for_spec(self.spec, self.modulus)

    @property
    def N(self) -> int:
        return self.spec.N

    def copy(self) -> "GeneratorState":
        return replace(self, a=list(self.a))

    def advance(self) -> None:
        """Step in place."""
        self.a = self._kernel(self.a)
        self.counter += 1

    def next_residue(self) -> int:
        value = self.a[self.cursor - 1]
        self.cursor += 1
        if self.cursor > self.N:
            self.advance()
            self.cursor = 1
        return value

    def next_unit(self) -> float:
        return min(self.next_residue() / self.modulus.p, _BELOW_ONE)

    def residues(self, n: int) -> np.ndarray:
        """The next n outputs as uint64, consuming the stream like next_residue."""
        out = np.empty(n, dtype=np.uint64)
        filled = 0
        while filled < n:
            chunk = self.a[self.cursor - 1:self.cursor - 1 + (n - filled)]
            out[filled:filled + len(chunk)] = chunk
            filled += len(chunk)
            self.cursor += len(chunk)
            if self.cursor > self.N:
                self.advance()
                self.cursor = 1
        return out

    def units(self, n: int) -> np.ndarray:
        u = self.residues(n).astype(np.float64) / float(self.modulus.p)
        return np.minimum(u, _BELOW_ONE, out=u)

    def to_bytes(self) -> bytes:
        return save(self)


class _StepKernel:
    """The O(N) update for one (spec, modulus) pair with constants pre-reduced."""

    def __init__(self, spec: OperatorSpec, modulus: Modulus):
        p = modulus.p
        self.p = p
        self.N = spec.N
        self.four = spec.family is Family.FOUR
        self.m = spec.m % p
        k = special_exponent(spec.m)
        self.shift = k if k is not None and (1 << k) + 1 < p else None
        self.s = spec.s % p  # negative s becomes p - (|s| mod p)
        self.diag_step = (3 * spec.m + spec.b - 2) % p

    _cache: dict = {}

    @classmethod
    def for_spec(cls, spec, modulus):
        key = (spec, modulus.p)
        kernel = cls._cache.get(key)
        if kernel is None:
            kernel = cls._cache[key] = cls(spec, modulus)
        return kernel

    def __call__(self, a: list[int]) -> list[int]:
        p, N = self.p, self.N
        out = [0] * N
        cur = sum(a) % p
        out[0] = cur
        cur = (cur + a[1]) % p
        out[1] = cur
        partial = 0
        shift, m = self.shift, self.m
        if not self.four:
            for i in range(2, N):
                partial += a[i - 1]  # P_i, 1-based sum a_2..a_i
                mp = (partial << shift) + partial if shift is not None else m * partial
                cur = (cur + mp + a[i]) % p
                out[i] = cur
                partial %= p
        else:
            c = self.diag_step
            for i in range(2, N):
                mp = (partial << shift) + partial if shift is not None else m * partial
                cur = (cur + mp + c * a[i - 1] + a[i]) % p
                out[i] = cur
                partial = (partial + a[i - 1]) % p  # becomes P_{i}, used one row later
        if N >= 3 and self.s:
            out[2] = (out[2] + self.s * a[1]) % p
        return out


def _validated(spec: OperatorSpec, modulus: Modulus, a: list[int]) -> GeneratorState:
    if not any(a):
        raise AllZeroSeed("the all-zero vector is a fixed point; seed needs a nonzero component")
    return GeneratorState(spec, modulus, a)


def seed_from_vector(spec: OperatorSpec, modulus: Modulus, v) -> GeneratorState:
    v = [int(x) for x in v]
    if len(v) != spec.N:
        raise ValueError(f"seed vector has {len(v)} components, N = {spec.N}")
    return _validated(spec, modulus, [x % modulus.p for x in v])


def splitmix64(x: int) -> tuple[int, int]:
    """One SplitMix64 step: returns (new internal state, 64-bit output)."""
    x = (x + _GOLDEN) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return x, z ^ (z >> 31)


def seed_from_word(spec: OperatorSpec, modulus: Modulus, w: int) -> GeneratorState:
    x = int(w) & _MASK64
    a = []
    for _ in range(spec.N):
        x, z = splitmix64(x)
        a.append(z % modulus.p)
    if not any(a):
        a[0] = 1
    return GeneratorState(spec, modulus, a)


def step(state: GeneratorState) -> GeneratorState:
    new = state.copy()
    new.advance()
    return new


def step_naive(state: GeneratorState) -> GeneratorState:
    """Reference step: the full N^2 sum over entry(i, j)."""
    spec, mod = state.spec, state.modulus
    N, p = spec.N, mod.p
    a = state.a
    out = []
    for i in range(1, N + 1):
        acc = 0
        for j in range(1, N + 1):
            acc = (acc + mul_mod(entry(spec, i, j) % p, a[j - 1], mod)) % p
        out.append(acc)
    return replace(state, a=out, counter=state.counter + 1)


def step_naive_many(spec: OperatorSpec, modulus: Modulus, states: list[list[int]]) -> list[list[int]]:
    """A v mod p for a batch of vectors using an exact word-modular matrix product.

    Independent of the O(N) recurrence; used to check it at scale.
    """
    mat = flint.nmod_mat(materialize_mod(spec, modulus), modulus.p)
    cols = flint.nmod_mat([list(col) for col in zip(*states)], modulus.p)
    prod = mat * cols
    n, k = prod.nrows(), prod.ncols()
    flat = [int(x) for x in prod.entries()]
    return [[flat[i * k + j] for i in range(n)] for j in range(k)]


def skip(state: GeneratorState, k: int) -> GeneratorState:
    """Jump k steps ahead with A^k mod p."""
    if k < 0:
        raise ValueError("cannot skip backwards")
    a = galois.apply_matrix_power(state.spec, k, state.modulus, state.a)
    return replace(state, a=a, counter=state.counter + k)


def derive_stream(state: GeneratorState, stream_id: int,
                  spacing_log2: int = DEFAULT_STREAM_SPACING) -> GeneratorState:
    """Stream ``stream_id`` starts stream_id * 2^spacing_log2 steps after ``state``."""
    if not 0 <= stream_id < 1 << 64:
        raise ValueError("stream_id must lie in [0, 2^64)")
    return skip(state, stream_id << spacing_log2)


# ----------------------------------------------------------------------
# persistence

def _put_str(value: int) -> bytes:
    raw = str(value).encode("ascii")
    return struct.pack("<I", len(raw)) + raw


def save(state: GeneratorState) -> bytes:
    spec = state.spec
    parts = [
        MAGIC, bytes([VERSION, _FAMILY_TAGS[spec.family]]),
        struct.pack("<I", spec.N),
        _put_str(spec.s), _put_str(spec.m), _put_str(spec.b),
        struct.pack("<QQI", state.modulus.p, state.counter & _MASK64, state.cursor),
        struct.pack(f"<{spec.N}Q", *state.a),
    ]
    return b"".join(parts)


class _Reader:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.blob):
            raise FormatError("state blob is truncated")
        out = self.blob[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def decimal(self) -> int:
        (n,) = self.unpack("<I")
        try:
            return int(self.take(n).decode("ascii"))
        except (UnicodeDecodeError, ValueError) as exc:
            raise FormatError("bad decimal field in state blob") from exc


def load(blob: bytes) -> GeneratorState:
    r = _Reader(bytes(blob))
    if r.take(4) != MAGIC:
        raise FormatError("bad magic, not a MIXMAX state blob")
    version, tag = r.take(2)
    if version != VERSION:
        raise FormatError(f"unsupported state version {version}")
    if tag not in _TAG_FAMILIES:
        raise FormatError(f"unknown family tag {tag}")
    (N,) = r.unpack("<I")
    s, m, b = r.decimal(), r.decimal(), r.decimal()
    p, counter, cursor = r.unpack("<QQI")
    a = list(r.unpack(f"<{N}Q"))
    if r.pos != len(blob):
        raise FormatError("trailing bytes after state blob")
    try:
        spec = OperatorSpec(_TAG_FAMILIES[tag], N, s, m, b)
        modulus = Modulus(p)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    if any(x >= p for x in a):
        raise RangeError("state contains a non-canonical residue (>= p)")
    if not 1 <= cursor <= N:
        raise RangeError(f"cursor {cursor} outside 1..{N}")
    if not any(a):
        raise RangeError("state is all zero")
    return GeneratorState(spec, modulus, a, counter, cursor)
