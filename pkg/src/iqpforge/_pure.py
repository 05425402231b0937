"""Pure-Python GF(2) kernels on int bitsets.

Rows are Python ints with bit i of the row at bit i of the int, so XOR,
AND and popcount already run word-at-a-time inside CPython. The compiled
backend mirrors these routines on 64-bit buffers; both must produce
bit-identical results (the elimination pivot policy below is part of the
contract).
"""

from __future__ import annotations

name = "pure"


def rref(rows, width, pivot_limit):
    """Reduced row echelon form over GF(2).

    Pivots are searched top-down in the first `pivot_limit` columns only;
    row operations span the full row, so augmented columns at and beyond
    `pivot_limit` ride along. Returns (reduced_rows, pivot_columns) and
    leaves the input untouched.
    """
    work = list(rows)
    nrows = len(work)
    pivots = []
    r = 0
    for c in range(pivot_limit):
        mask = 1 << c
        pivot = -1
        for i in range(r, nrows):
            if work[i] & mask:
                pivot = i
                break
        if pivot < 0:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        prow = work[r]
        for i in range(nrows):
            if i != r and work[i] & mask:
                work[i] ^= prow
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return work, pivots


def mul_rows(a_rows, a_ncols, b_rows, b_width):
    """Row-combination product: out[i] = XOR of b_rows[j] over set bits j of a_rows[i]."""
    out = []
    for a in a_rows:
        acc = 0
        while a:
            low = a & -a
            acc ^= b_rows[low.bit_length() - 1]
            a ^= low
        out.append(acc)
    return out


def batch_dot(rows, x, width):
    """Packed inner products: bit i of the result is parity(rows[i] AND x)."""
    bits = 0
    for i, row in enumerate(rows):
        if (row & x).bit_count() & 1:
            bits |= 1 << i
    return bits


def batch_dot_many(rows, xs, width):
    """batch_dot against each x in xs; one packed-result int per x."""
    return [batch_dot(rows, x, width) for x in xs]


def correlated_rows(p_rows, d, e_rows, mstar, width):
    """For each e: mstar XOR (sum of p-rows non-orthogonal to both d and e)."""
    selected = [p for p in p_rows if (p & d).bit_count() & 1]
    out = []
    for e in e_rows:
        acc = mstar
        for p in selected:
            if (p & e).bit_count() & 1:
                acc ^= p
        out.append(acc)
    return out
