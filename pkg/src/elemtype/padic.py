"""Truncated p-adic integers and filtration-preserving automorphisms of Z_p^r.

An :class:`AAutMatrix` stores an automorphism ``alpha`` of ``A = Z_1 x ... x Z_r``
with the column convention: column ``i`` is the exponent vector of
``alpha(u_i)`` over the basis ``u_1, ..., u_r``.  Preserving every tail
``V^j = span(u_{j+1}, ..., u_r)`` means ``alpha(u_i)`` has no component on
``u_1, ..., u_{i-1}``, so the matrix is lower triangular.  With this convention
the quotient ``A / V^k`` sees the top-left ``k x k`` block and the restriction
to ``V^k`` is the bottom-right block.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


class PadicError(ValueError):
    pass


@dataclass(frozen=True)
class TruncatedPadic:
    residue: int
    precision: int
    prime: int

    def __post_init__(self):
        if self.precision < 1:
            raise PadicError("precision must be >= 1")
        object.__setattr__(self, "residue", self.residue % self.modulus)

    @property
    def modulus(self) -> int:
        return self.prime**self.precision

    def _check(self, other: TruncatedPadic):
        if (other.prime, other.precision) != (self.prime, self.precision):
            raise PadicError("prime/precision mismatch")

    def __add__(self, other: TruncatedPadic) -> TruncatedPadic:
        self._check(other)
        return TruncatedPadic(self.residue + other.residue, self.precision, self.prime)

    def __mul__(self, other: TruncatedPadic) -> TruncatedPadic:
        self._check(other)
        return TruncatedPadic(self.residue * other.residue, self.precision, self.prime)

    def __neg__(self) -> TruncatedPadic:
        return TruncatedPadic(-self.residue, self.precision, self.prime)

    def is_unit(self) -> bool:
        return self.residue % self.prime != 0

    def inverse(self) -> TruncatedPadic:
        if not self.is_unit():
            raise PadicError(f"{self.residue} is not a unit mod {self.prime}")
        return TruncatedPadic(pow(self.residue, -1, self.modulus), self.precision, self.prime)

    def reduce(self, precision: int) -> TruncatedPadic:
        if precision > self.precision:
            raise PadicError("cannot raise precision")
        return TruncatedPadic(self.residue, precision, self.prime)


class PrincipalUnit(TruncatedPadic):
    """An element of ``1 + p Z_p`` truncated mod ``p^N``."""

    def __post_init__(self):
        super().__post_init__()
        if self.residue % self.prime != 1 % self.prime:
            raise PadicError(f"{self.residue} is not congruent to 1 mod {self.prime}")


def principal_unit(value: int, prime: int, precision: int) -> PrincipalUnit:
    return PrincipalUnit(value, precision, prime)


def is_aaut_entries(entries: Sequence[Sequence[int]], prime: int, precision: int) -> bool:
    """Check the A-automorphism invariants on a raw square matrix mod ``p^N``."""
    mod = prime**precision
    r = len(entries)
    for j in range(r):
        if len(entries[j]) != r:
            return False
        if any(entries[j][i] % mod for i in range(j + 1, r)):
            return False
        if entries[j][j] % prime == 0:
            return False
    return True


def top_left(entries, k: int):
    return tuple(tuple(row[:k]) for row in entries[:k])


def bottom_right(entries, k: int):
    return tuple(tuple(row[k:]) for row in entries[k:])


def top_right(entries, k: int):
    return tuple(tuple(row[k:]) for row in entries[:k])


@dataclass(frozen=True)
class AAutMatrix:
    """Lower-triangular automorphism matrix over ``Z/p^N`` (``entries[row][col]``)."""

    entries: tuple
    prime: int
    precision: int

    def __post_init__(self):
        mod = self.prime**self.precision
        ent = tuple(tuple(int(x) % mod for x in row) for row in self.entries)
        object.__setattr__(self, "entries", ent)
        r = len(ent)
        for j, row in enumerate(ent):
            if len(row) != r:
                raise PadicError("matrix must be square")
            for i in range(j + 1, r):
                if row[i] != 0:
                    raise PadicError(f"entry ({j},{i}) above the diagonal is nonzero")
            if row[j] % self.prime == 0:
                raise PadicError(f"diagonal entry {j} is not a unit")

    @property
    def rank(self) -> int:
        return len(self.entries)

    @property
    def modulus(self) -> int:
        return self.prime**self.precision

    @classmethod
    def identity(cls, r: int, prime: int, precision: int) -> AAutMatrix:
        return cls(tuple(tuple(int(i == j) for i in range(r)) for j in range(r)), prime, precision)

    @classmethod
    def from_columns(cls, columns, prime: int, precision: int) -> AAutMatrix:
        r = len(columns)
        return cls(tuple(tuple(columns[i][j] for i in range(r)) for j in range(r)), prime, precision)

    def column(self, i: int) -> tuple:
        return tuple(row[i] for row in self.entries)

    def columns(self) -> list:
        return [self.column(i) for i in range(self.rank)]

    def _check(self, other: AAutMatrix):
        if (self.rank, self.prime, self.precision) != (other.rank, other.prime, other.precision):
            raise PadicError("dimension/precision mismatch")

    def reduce(self, precision: int) -> AAutMatrix:
        if precision > self.precision:
            raise PadicError("cannot raise precision")
        return AAutMatrix(self.entries, self.prime, precision)

    def to_json(self):
        return [list(row) for row in self.entries]


def compose(a: AAutMatrix, b: AAutMatrix) -> AAutMatrix:
    """Matrix of ``a o b``: column i is the exponent vector of a(b(u_i))."""
    a._check(b)
    r, mod = a.rank, a.modulus
    out = [[0] * r for _ in range(r)]
    for j in range(r):
        for i in range(r):
            # both factors lower triangular: only i <= t <= j contribute
            out[j][i] = sum(a.entries[j][t] * b.entries[t][i] for t in range(i, j + 1)) % mod
    return AAutMatrix(tuple(map(tuple, out)), a.prime, a.precision)


def invert(m: AAutMatrix) -> AAutMatrix:
    r, mod = m.rank, m.modulus
    a = m.entries
    inv = [[0] * r for _ in range(r)]
    # forward substitution, one column of the inverse at a time
    for i in range(r):
        inv[i][i] = pow(a[i][i], -1, mod)
        for j in range(i + 1, r):
            s = sum(a[j][t] * inv[t][i] for t in range(i, j))
            inv[j][i] = (-s * pow(a[j][j], -1, mod)) % mod
    return AAutMatrix(tuple(map(tuple, inv)), m.prime, m.precision)


def project_bar(m: AAutMatrix, k: int) -> AAutMatrix:
    """Induced automorphism of ``A / V^k`` (the top-left ``k x k`` block)."""
    if not 1 <= k <= m.rank:
        raise PadicError(f"k={k} out of range 1..{m.rank}")
    return AAutMatrix(top_left(m.entries, k), m.prime, m.precision)


def restrict_tail(m: AAutMatrix, k: int) -> AAutMatrix:
    """Restriction to ``V^k = Z_{k+1} x ... x Z_r`` (the bottom-right block)."""
    if not 0 <= k <= m.rank:
        raise PadicError(f"k={k} out of range 0..{m.rank}")
    return AAutMatrix(bottom_right(m.entries, k), m.prime, m.precision)
