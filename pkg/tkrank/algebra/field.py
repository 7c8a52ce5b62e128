"""Arithmetic in the prime field Z_p, plus the numpy plumbing that keeps
vectorized field arithmetic exact.

Field elements are plain Python ints in [0, p); the modulus lives on the
FieldContext.  Vectors use int64 while every product of two residues fits
in 63 bits (p < 2^31) and fall back to object arrays of Python ints above
that, so reductions never wrap.
"""
from typing import Optional, Sequence

import numpy as np
from sympy import isprime

from tkrank.errors import ParameterError

FieldElement = int
WideInt = int

# Mersenne prime 2^31 - 1: Schwartz-Zippel failure 3/p is negligible and
# residue products stay inside int64
DEFAULT_MODULUS = (1 << 31) - 1

_INT64_SAFE_LIMIT = 1 << 31


def is_prime(p: int) -> bool:
    return p >= 2 and bool(isprime(p))


class FieldContext:
    """Immutable handle on Z_p; safe to share between threads."""

    __slots__ = ("_p", "_inv2", "_dtype")

    def __init__(self, p: int):
        if not is_prime(p):
            raise ParameterError(f"modulus {p} is not prime")
        if p in (2, 3):
            raise ParameterError(f"characteristic {p} is excluded; use a prime >= 5")
        object.__setattr__(self, "_p", p)
        object.__setattr__(self, "_inv2", pow(2, p - 2, p))
        object.__setattr__(self, "_dtype", np.int64 if p < _INT64_SAFE_LIMIT else object)

    def __setattr__(self, name, value):
        raise AttributeError("FieldContext is immutable")

    def __repr__(self) -> str:
        return f"FieldContext(p={self._p})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldContext) and other._p == self._p

    def __hash__(self) -> int:
        return hash(("FieldContext", self._p))

    @property
    def p(self) -> int:
        return self._p

    @property
    def inv2(self) -> FieldElement:
        return self._inv2

    @property
    def minus_one(self) -> FieldElement:
        return self._p - 1

    @property
    def dtype(self):
        return self._dtype

    # scalar arithmetic
    def element(self, value: int) -> FieldElement:
        return value % self._p

    def add(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return (a + b) % self._p

    def sub(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return (a - b) % self._p

    def mul(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return (a * b) % self._p

    def neg(self, a: FieldElement) -> FieldElement:
        return (-a) % self._p

    def pow(self, a: FieldElement, e: int) -> FieldElement:
        if e < 0:
            return pow(self.inv(a), -e, self._p)
        return pow(a, e, self._p)

    def inv(self, a: FieldElement) -> FieldElement:
        a %= self._p
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in Z_{self._p}")
        return pow(a, self._p - 2, self._p)

    def sign(self, parity: int) -> FieldElement:
        """(-1)^parity as a residue."""
        return self._p - 1 if parity & 1 else 1

    # vector arithmetic
    def array(self, values) -> np.ndarray:
        """Residues of ``values`` as an array of the context dtype."""
        if self._dtype is object:
            arr = np.array([int(v) % self._p for v in np.ravel(np.asarray(values, dtype=object))], dtype=object)
            return arr.reshape(np.shape(values))
        return np.mod(np.asarray(values, dtype=np.int64), self._p)

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(shape, dtype=self._dtype) if self._dtype is not object else np.full(shape, 0, dtype=object)

    def contract(self, u: np.ndarray, block: np.ndarray) -> np.ndarray:
        """Left-multiply ``block`` (leading axis of length len(u)) by u, mod p.

        Rows are accumulated one at a time so each step adds a single
        product of residues to a reduced accumulator.
        """
        acc = self.zeros(block.shape[1:])
        for i, coeff in enumerate(u):
            if coeff:
                acc = (acc + block[i] * coeff) % self._p
        return acc

    def batched_contract(self, factors: np.ndarray, blocks: np.ndarray) -> np.ndarray:
        """Contract every batch entry with every factor row.

        ``factors`` has shape (R, N) and ``blocks`` shape (B, N, M); the
        result has shape (B, R, M) with result[b, t] = factors[t] . blocks[b].
        """
        batch, n, rest = blocks.shape
        acc = self.zeros((batch, factors.shape[0], rest))
        for i in range(n):
            column = factors[:, i]
            if not np.any(column):
                continue
            acc = (acc + column[None, :, None] * blocks[:, i, None, :]) % self._p
        return acc

    def dot(self, u: np.ndarray, x: np.ndarray) -> FieldElement:
        return int(self.contract(u, np.asarray(x).reshape(len(u), 1))[0])

    def random_vector(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self._dtype is object:
            return np.array([sample_uniform(self, rng) for _ in range(size)], dtype=object)
        return rng.integers(0, self._p, size=size, dtype=np.int64)


def field_context(p: Optional[int] = None) -> FieldContext:
    """Context for Z_p; the default modulus is 2^31 - 1."""
    return FieldContext(DEFAULT_MODULUS if p is None else p)


def sample_uniform(ctx: FieldContext, rng: np.random.Generator) -> FieldElement:
    if ctx.p <= np.iinfo(np.int64).max:
        return int(rng.integers(0, ctx.p))
    # moduli beyond int64: compose from 62-bit limbs and reject the tail
    bits = ctx.p.bit_length()
    while True:
        value = 0
        for _ in range((bits + 61) // 62):
            value = (value << 62) | int(rng.integers(0, 1 << 62))
        value &= (1 << bits) - 1
        if value < ctx.p:
            return value


def sample_from_set(values: Sequence[int], ctx: FieldContext, rng: np.random.Generator) -> FieldElement:
    return ctx.element(values[int(rng.integers(0, len(values)))])
