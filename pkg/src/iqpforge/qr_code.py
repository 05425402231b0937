"""Binary quadratic residue codes: construction and property-based recognition.

Only prime lengths q with q = 7 (mod 8) are supported. That choice makes 2
a quadratic residue (so the cyclic code is well defined over GF(2)), puts
the all-ones word in the code, and pins every codeword weight to 0 or 3
mod 4, which is exactly the set of properties the recognizer tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backends, gf2
from .gf2 import BitMatrix, BitVec
from .rng import random_bit_ints


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def quadratic_residues(q: int) -> frozenset[int]:
    """Nonzero quadratic residues mod an odd prime q; always (q-1)/2 of them."""
    if q < 3 or q % 2 == 0 or not is_prime(q):
        raise ValueError(f"q must be an odd prime, got {q}")
    return frozenset(pow(a, 2, q) for a in range(1, (q - 1) // 2 + 1))


@dataclass(frozen=True)
class QrParams:
    q: int
    k: int
    residues: frozenset[int]


def qr_params(q: int) -> QrParams:
    if q % 8 != 7:
        raise ValueError(f"q must be a prime congruent to 7 mod 8, got {q}")
    return QrParams(q=q, k=(q + 1) // 2, residues=quadratic_residues(q))


@dataclass(frozen=True)
class QrGenerator:
    """q x k basis of the code, stored column-wise; the first column is all-ones."""

    params: QrParams
    columns: BitMatrix


def build_generator(q: int) -> QrGenerator:
    """Generator of the length-q quadratic residue code.

    The code is the span of the q cyclic shifts of the residue indicator
    word. A basis is read off a row reduction of those shifts, then one
    basis element is swapped for the all-ones word (a codeword, since the
    shifts sum to it) so the first returned column is all-ones.
    """
    params = qr_params(q)
    mask = (1 << q) - 1
    chi = 0
    for r in params.residues:
        chi |= 1 << r
    shifts = [((chi << t) | (chi >> (q - t))) & mask for t in range(q)]
    reduced, pivots = gf2.row_reduce(BitMatrix(q, shifts))
    if len(pivots) != params.k:
        raise RuntimeError(f"code rank {len(pivots)} != (q+1)/2 = {params.k}")
    basis = list(reduced.row_ints[: params.k])

    ones = mask
    v = ones
    used = []
    for r, c in enumerate(pivots):
        if (v >> c) & 1:
            v ^= basis[r]
            used.append(r)
    if v:
        raise RuntimeError("all-ones word is not in the code span")
    drop = used[0]
    ordered = [ones] + [b for i, b in enumerate(basis) if i != drop]

    col_rows = [0] * q
    for j, col in enumerate(ordered):
        while col:
            low = col & -col
            col_rows[low.bit_length() - 1] |= 1 << j
            col ^= low
    columns = BitMatrix(params.k, col_rows)
    if gf2.rank(columns) != params.k:
        raise RuntimeError("basis substitution broke the column rank")
    return QrGenerator(params=params, columns=columns)


def weight_check(c: BitVec) -> bool:
    """True iff the Hamming weight is 0 or 3 mod 4 (holds for every codeword)."""
    return c.weight() % 4 in (0, 3)


def looks_like_qr_code(sub: BitMatrix, rng: np.random.Generator, trials: int = 64) -> bool:
    """Randomized test that sub's columns span a quadratic residue code.

    Gates: row count is an odd prime q = 7 (mod 8); column rank is
    (q+1)/2; `trials` random combinations of the columns all pass
    weight_check. False accepts decay exponentially in `trials`.
    """
    q = sub.nrows
    if q % 8 != 7 or not is_prime(q):
        return False
    if gf2.rank(sub) != (q + 1) // 2:
        return False
    probes = random_bit_ints(sub.ncols, trials, rng)
    encodings = backends.kernels().batch_dot_many(sub.row_ints, probes, sub.ncols)
    return all(enc.bit_count() % 4 in (0, 3) for enc in encodings)
