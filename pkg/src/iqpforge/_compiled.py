"""Adapters feeding int bitsets to the compiled word-packed kernels.

Packing is little-endian uint64, so bit i of the int ends up at word i//64,
bit i%64, matching what the kernels expect. Packed forms of read-only
inputs are memoized (row tuples are immutable), which matters because the
attack reuses the same program matrix across iterations and candidates.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import _gf2core

name = "compiled"


def _nwords(width: int) -> int:
    return max(1, (width + 63) >> 6)


def _pack(rows, nwords: int) -> np.ndarray:
    if not rows:
        return np.zeros((0, nwords), dtype=np.uint64)
    nbytes = nwords * 8
    buf = b"".join([r.to_bytes(nbytes, "little") for r in rows])
    return np.frombuffer(buf, dtype=np.uint64).reshape(len(rows), nwords).copy()


@lru_cache(maxsize=64)
def _pack_cached(rows: tuple, nwords: int) -> np.ndarray:
    # callers must treat the result as read-only
    return _pack(rows, nwords)


def _pack_ro(rows, nwords: int) -> np.ndarray:
    if isinstance(rows, tuple):
        return _pack_cached(rows, nwords)
    return _pack(rows, nwords)


def _unpack(arr: np.ndarray) -> list[int]:
    stride = arr.shape[-1] * 8
    data = arr.tobytes()
    return [int.from_bytes(data[i : i + stride], "little") for i in range(0, len(data), stride)]


def rref(rows, width, pivot_limit):
    arr = _pack(rows, _nwords(width))
    pivots = _gf2core.rref_words(arr, pivot_limit)
    return _unpack(arr), pivots


def mul_rows(a_rows, a_ncols, b_rows, b_width):
    if len(b_rows) != a_ncols:
        raise ValueError("left operand width must equal right operand row count")
    wb = _nwords(b_width)
    a = _pack_ro(a_rows, _nwords(a_ncols))
    b = _pack_ro(b_rows, wb)
    out = np.zeros((len(a_rows), wb), dtype=np.uint64)
    _gf2core.mul_rows_words(a, b, out)
    return _unpack(out)


def batch_dot(rows, x, width):
    w = _nwords(width)
    packed = _pack_ro(rows, w)
    xv = _pack([x], w)[0]
    out = np.zeros(_nwords(max(1, len(rows))), dtype=np.uint64)
    _gf2core.batch_dot_words(packed, xv, out)
    return int.from_bytes(out.tobytes(), "little")


def batch_dot_many(rows, xs, width):
    w = _nwords(width)
    packed = _pack_ro(rows, w)
    xarr = _pack(xs, w)
    out = np.zeros((len(xs), _nwords(max(1, len(rows)))), dtype=np.uint64)
    _gf2core.batch_dot_many_words(packed, xarr, out)
    return _unpack(out)


def correlated_rows(p_rows, d, e_rows, mstar, width):
    w = _nwords(width)
    p = _pack_ro(p_rows, w)
    dv = _pack([d], w)[0]
    e = _pack(e_rows, w)
    mv = _pack([mstar], w)[0]
    scratch = np.zeros_like(p)
    out = np.zeros((len(e_rows), w), dtype=np.uint64)
    _gf2core.correlated_rows_words(p, dv, e, mv, scratch, out)
    return _unpack(out)
