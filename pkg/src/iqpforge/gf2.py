"""Dense bit-packed linear algebra over GF(2).

BitVec keeps bit i of a vector at bit i of a Python int; BitMatrix is a
row-major stack of such rows sharing one width. Elimination-style
operations run through the active kernel backend (64-bit compiled kernels
when built, int bitsets otherwise) and never mutate their inputs.

Byte-level interchange (used by the key codec) is MSB-first: bit i maps to
byte i//8, bit position 7 - i%8, with zero tail padding.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, islice
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import backends

DEFAULT_ENUMERATION_CAP = 1 << 16


class DimensionError(ValueError):
    """Operand dimensions do not agree."""


class SingularMatrixError(ValueError):
    """Inverse requested for a rank-deficient matrix."""


class BitVec:
    """Immutable vector over GF(2)."""

    __slots__ = ("_n", "_bits")

    def __init__(self, length: int, bits: int = 0):
        if length < 0:
            raise ValueError("length must be nonnegative")
        if bits < 0 or bits >> length:
            raise ValueError("bits do not fit in the stated length")
        self._n = length
        self._bits = bits

    @classmethod
    def zeros(cls, n: int) -> "BitVec":
        return cls(n, 0)

    @classmethod
    def ones(cls, n: int) -> "BitVec":
        return cls(n, (1 << n) - 1)

    @classmethod
    def unit(cls, n: int, i: int) -> "BitVec":
        if not 0 <= i < n:
            raise IndexError(f"unit index {i} out of range for length {n}")
        return cls(n, 1 << i)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVec":
        value = 0
        n = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError(f"bit values must be 0 or 1, got {b!r}")
            value |= b << n
            n += 1
        return cls(n, value)

    @classmethod
    def from01(cls, text: str) -> "BitVec":
        value = 0
        for i, ch in enumerate(text):
            if ch == "1":
                value |= 1 << i
            elif ch != "0":
                raise ValueError(f"invalid character {ch!r} in bit string")
        return cls(len(text), value)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "BitVec":
        if n == 0:
            return cls(0, 0)
        raw = int.from_bytes(rng.bytes((n + 7) // 8), "little")
        return cls(n, raw & ((1 << n) - 1))

    @classmethod
    def from_bytes_msb(cls, data: bytes, n: int) -> "BitVec":
        """Inverse of to_bytes_msb; rejects nonzero padding bits."""
        if len(data) != (n + 7) // 8:
            raise ValueError(f"expected {(n + 7) // 8} bytes for {n} bits, got {len(data)}")
        bits = 0
        for j, byte in enumerate(data):
            for b in range(8):
                i = 8 * j + b
                if (byte >> (7 - b)) & 1:
                    if i >= n:
                        raise ValueError("padding bits beyond the vector length must be zero")
                    bits |= 1 << i
        return cls(n, bits)

    def to_bits(self) -> list[int]:
        return [(self._bits >> i) & 1 for i in range(self._n)]

    def to01(self) -> str:
        return "".join("1" if (self._bits >> i) & 1 else "0" for i in range(self._n))

    def to_bytes_msb(self) -> bytes:
        """Pack bit i into byte i//8 at bit position 7 - i%8, zero padded."""
        out = bytearray((self._n + 7) // 8)
        v = self._bits
        while v:
            low = v & -v
            i = low.bit_length() - 1
            out[i >> 3] |= 1 << (7 - (i & 7))
            v ^= low
        return bytes(out)

    def to_int(self) -> int:
        return self._bits

    def weight(self) -> int:
        return self._bits.bit_count()

    def parity(self) -> int:
        return self._bits.bit_count() & 1

    def flip(self, i: int) -> "BitVec":
        if not 0 <= i < self._n:
            raise IndexError(f"index {i} out of range for length {self._n}")
        return BitVec(self._n, self._bits ^ (1 << i))

    def __len__(self) -> int:
        return self._n

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self._n:
            raise IndexError(f"index {i} out of range for length {self._n}")
        return (self._bits >> i) & 1

    def __iter__(self) -> Iterator[int]:
        return iter(self.to_bits())

    def __xor__(self, other: "BitVec") -> "BitVec":
        if self._n != other._n:
            raise DimensionError(f"length mismatch: {self._n} vs {other._n}")
        return BitVec(self._n, self._bits ^ other._bits)

    def __and__(self, other: "BitVec") -> "BitVec":
        if self._n != other._n:
            raise DimensionError(f"length mismatch: {self._n} vs {other._n}")
        return BitVec(self._n, self._bits & other._bits)

    def __bool__(self) -> bool:
        return self._bits != 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVec):
            return NotImplemented
        return self._n == other._n and self._bits == other._bits

    def __hash__(self) -> int:
        return hash((self._n, self._bits))

    def __repr__(self) -> str:
        if self._n <= 64:
            return f"BitVec('{self.to01()}')"
        return f"BitVec(length={self._n}, weight={self.weight()})"


class BitMatrix:
    """Immutable row-major matrix over GF(2); every row has the same width."""

    __slots__ = ("_ncols", "_rows")

    def __init__(self, ncols: int, rows: Iterable[int] = ()):
        if ncols < 0:
            raise ValueError("ncols must be nonnegative")
        row_tuple = tuple(int(r) for r in rows)
        for r in row_tuple:
            if r < 0 or r >> ncols:
                raise ValueError("row bits do not fit in the stated width")
        self._ncols = ncols
        self._rows = row_tuple

    @classmethod
    def from_rows(cls, rows: Sequence[BitVec], ncols: int | None = None) -> "BitMatrix":
        if rows:
            ncols = len(rows[0]) if ncols is None else ncols
            for r in rows:
                if len(r) != ncols:
                    raise DimensionError("all rows must share one length")
        elif ncols is None:
            raise ValueError("ncols is required for an empty matrix")
        return cls(ncols, (r.to_int() for r in rows))

    @classmethod
    def from01(cls, lines: Sequence[str], ncols: int | None = None) -> "BitMatrix":
        return cls.from_rows([BitVec.from01(line) for line in lines], ncols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, (1 << i for i in range(n)))

    @classmethod
    def zeros(cls, m: int, n: int) -> "BitMatrix":
        return cls(n, (0,) * m)

    @property
    def nrows(self) -> int:
        return len(self._rows)

    @property
    def ncols(self) -> int:
        return self._ncols

    @property
    def row_ints(self) -> tuple[int, ...]:
        return self._rows

    def row(self, i: int) -> BitVec:
        return BitVec(self._ncols, self._rows[i])

    def __iter__(self) -> Iterator[BitVec]:
        return (BitVec(self._ncols, r) for r in self._rows)

    def to01(self) -> list[str]:
        return [self.row(i).to01() for i in range(self.nrows)]

    def transpose(self) -> "BitMatrix":
        cols = [0] * self._ncols
        for i, r in enumerate(self._rows):
            while r:
                low = r & -r
                cols[low.bit_length() - 1] |= 1 << i
                r ^= low
        return BitMatrix(self.nrows, cols)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        return matmul(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self._ncols == other._ncols and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self._ncols, self._rows))

    def __repr__(self) -> str:
        return f"BitMatrix({self.nrows}x{self._ncols})"


def dot(a: BitVec, b: BitVec) -> int:
    """Inner product over GF(2): parity of the AND."""
    if len(a) != len(b):
        raise DimensionError(f"length mismatch: {len(a)} vs {len(b)}")
    return (a.to_int() & b.to_int()).bit_count() & 1


def mat_vec(A: BitMatrix, x: BitVec) -> BitVec:
    """Bit i of the result is dot(row i of A, x)."""
    if A.ncols != len(x):
        raise DimensionError(f"matrix has {A.ncols} columns, vector has length {len(x)}")
    bits = backends.kernels().batch_dot(A.row_ints, x.to_int(), A.ncols)
    return BitVec(A.nrows, bits)


def mat_vec_many(A: BitMatrix, xs: Sequence[BitVec]) -> list[BitVec]:
    """mat_vec against several vectors; A is packed once on the compiled backend."""
    for x in xs:
        if A.ncols != len(x):
            raise DimensionError(f"matrix has {A.ncols} columns, vector has length {len(x)}")
    results = backends.kernels().batch_dot_many(A.row_ints, [x.to_int() for x in xs], A.ncols)
    return [BitVec(A.nrows, bits) for bits in results]


def matmul(A: BitMatrix, B: BitMatrix) -> BitMatrix:
    if A.ncols != B.nrows:
        raise DimensionError(f"inner dimensions differ: {A.ncols} vs {B.nrows}")
    rows = backends.kernels().mul_rows(A.row_ints, A.ncols, B.row_ints, B.ncols)
    return BitMatrix(B.ncols, rows)


def row_reduce(A: BitMatrix, pivot_limit: int | None = None) -> tuple[BitMatrix, tuple[int, ...]]:
    """Reduced row echelon form of A plus its pivot columns; A is untouched."""
    limit = A.ncols if pivot_limit is None else pivot_limit
    rows, pivots = backends.kernels().rref(A.row_ints, A.ncols, limit)
    return BitMatrix(A.ncols, rows), tuple(pivots)


def rank(A: BitMatrix) -> int:
    _, pivots = backends.kernels().rref(A.row_ints, A.ncols, A.ncols)
    return len(pivots)


@dataclass(frozen=True)
class AffineSolution:
    """Solution set of A x = b as particular + span(kernel_basis)."""

    particular: BitVec
    kernel_basis: tuple[BitVec, ...]

    @property
    def solution_count_log2(self) -> int:
        return len(self.kernel_basis)


def solve_affine(A: BitMatrix, b: BitVec) -> AffineSolution | None:
    """Solve A x = b over GF(2); None means the system is infeasible."""
    sol, _ = solve_affine_with_rank(A, b)
    return sol


def solve_affine_with_rank(A: BitMatrix, b: BitVec) -> tuple[AffineSolution | None, int]:
    """Like solve_affine, but also reports rank(A) (wanted even on infeasible systems)."""
    if A.nrows != len(b):
        raise DimensionError(f"matrix has {A.nrows} rows, rhs has length {len(b)}")
    n = A.ncols
    rhs_bit = 1 << n
    b_int = b.to_int()
    aug = [r | (rhs_bit if (b_int >> i) & 1 else 0) for i, r in enumerate(A.row_ints)]
    red, pivots = backends.kernels().rref(aug, n + 1, n)
    rk = len(pivots)
    col_mask = rhs_bit - 1
    for row in red:
        if not (row & col_mask) and (row & rhs_bit):
            return None, rk
    particular = 0
    for r, c in enumerate(pivots):
        if red[r] & rhs_bit:
            particular |= 1 << c
    pivot_set = set(pivots)
    basis = []
    for f in range(n):
        if f in pivot_set:
            continue
        fmask = 1 << f
        k = fmask
        for r, c in enumerate(pivots):
            if red[r] & fmask:
                k |= 1 << c
        basis.append(BitVec(n, k))
    return AffineSolution(BitVec(n, particular), tuple(basis)), rk


def _subset_masks(kdim: int, order: str) -> Iterator[int]:
    if order == "lex":
        yield from range(1 << kdim)
    elif order == "weight":
        for w in range(kdim + 1):
            for combo in combinations(range(kdim), w):
                mask = 0
                for j in combo:
                    mask |= 1 << j
                yield mask
    else:
        raise ValueError(f"unknown enumeration order {order!r}")


def enumerate_solutions(
    sol: AffineSolution,
    cap: int = DEFAULT_ENUMERATION_CAP,
    order: str = "lex",
) -> tuple[list[BitVec], bool]:
    """List members of the solution coset, at most `cap` of them.

    "lex" walks kernel subsets in counting order, "weight" by increasing
    subset size. Returns (vectors, truncated); all 2**kernel_dim members
    appear when they fit under the cap.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    basis = [k.to_int() for k in sol.kernel_basis]
    kdim = len(basis)
    n = len(sol.particular)
    part = sol.particular.to_int()
    truncated = (1 << kdim) > cap
    out = []
    for mask in islice(_subset_masks(kdim, order), cap):
        acc = part
        while mask:
            low = mask & -mask
            acc ^= basis[low.bit_length() - 1]
            mask ^= low
        out.append(BitVec(n, acc))
    return out, truncated


def random_invertible(n: int, rng: np.random.Generator) -> BitMatrix:
    """Random invertible n x n matrix: unit-lower x unit-upper x permutation."""
    if n < 1:
        raise ValueError("n must be at least 1")
    mask = (1 << n) - 1
    nbytes = (n + 7) // 8
    lower = []
    for i in range(n):
        r = int.from_bytes(rng.bytes(nbytes), "little")
        lower.append((r & ((1 << i) - 1)) | (1 << i))
    upper = []
    for i in range(n):
        r = int.from_bytes(rng.bytes(nbytes), "little")
        upper.append((r & mask & ~((1 << (i + 1)) - 1)) | (1 << i))
    perm = [1 << int(j) for j in rng.permutation(n)]
    k = backends.kernels()
    rows = k.mul_rows(k.mul_rows(lower, n, upper, n), n, perm, n)
    return BitMatrix(n, rows)


def invert(A: BitMatrix) -> BitMatrix:
    """Inverse of a square matrix; raises SingularMatrixError if rank-deficient."""
    n = A.ncols
    if A.nrows != n:
        raise DimensionError(f"matrix must be square, got {A.nrows}x{n}")
    aug = [r | (1 << (n + i)) for i, r in enumerate(A.row_ints)]
    red, pivots = backends.kernels().rref(aug, 2 * n, n)
    if len(pivots) != n:
        raise SingularMatrixError(f"rank {len(pivots)} < {n}")
    return BitMatrix(n, (row >> n for row in red[:n]))
