# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True
"""Word-packed GF(2) kernels: the hot loops behind iqpforge._pure.

Rows arrive as C-contiguous uint64 buffers, bit i of a row at word i//64,
bit position i%64. Semantics (including the elimination pivot policy)
must stay bit-identical to the pure fallback.
"""

ctypedef unsigned long long u64

cdef extern from *:
    """
    #if defined(__GNUC__) || defined(__clang__)
    #define IQP_POPCNT64(x) __builtin_popcountll(x)
    #define IQP_CTZ64(x) __builtin_ctzll(x)
    #else
    static int IQP_POPCNT64(unsigned long long v) {
        int c = 0;
        while (v) { v &= v - 1; c++; }
        return c;
    }
    static int IQP_CTZ64(unsigned long long v) {
        int c = 0;
        while (!(v & 1ULL)) { v >>= 1; c++; }
        return c;
    }
    #endif
    """
    int IQP_POPCNT64(u64) nogil
    int IQP_CTZ64(u64) nogil


cdef inline int _and_parity(u64* a, u64* b, Py_ssize_t w) nogil:
    cdef u64 acc = 0
    cdef Py_ssize_t k
    for k in range(w):
        acc ^= a[k] & b[k]
    return IQP_POPCNT64(acc) & 1


def rref_words(u64[:, ::1] m, Py_ssize_t pivot_limit):
    """Reduce m in place; pivots searched in the first pivot_limit columns.

    Returns the pivot column list.
    """
    cdef Py_ssize_t nrows = m.shape[0]
    cdef Py_ssize_t w = m.shape[1]
    cdef Py_ssize_t r = 0
    cdef Py_ssize_t c, i, k, pivot, wi
    cdef u64 mask, tmp
    pivots = []
    if nrows == 0:
        return pivots
    for c in range(pivot_limit):
        wi = c >> 6
        mask = (<u64> 1) << (c & 63)
        pivot = -1
        for i in range(r, nrows):
            if m[i, wi] & mask:
                pivot = i
                break
        if pivot < 0:
            continue
        if pivot != r:
            for k in range(w):
                tmp = m[r, k]
                m[r, k] = m[pivot, k]
                m[pivot, k] = tmp
        for i in range(nrows):
            if i != r and (m[i, wi] & mask):
                for k in range(w):
                    m[i, k] ^= m[r, k]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots


def mul_rows_words(u64[:, ::1] a, u64[:, ::1] b, u64[:, ::1] out):
    """out[i] = XOR of rows of b selected by the set bits of a[i].

    Caller guarantees every set bit of a indexes a row of b.
    """
    cdef Py_ssize_t na = a.shape[0]
    cdef Py_ssize_t wa = a.shape[1]
    cdef Py_ssize_t wb = b.shape[1]
    cdef Py_ssize_t i, j, k, row, base
    cdef u64 word
    for i in range(na):
        for k in range(wb):
            out[i, k] = 0
        for j in range(wa):
            word = a[i, j]
            base = j << 6
            while word:
                row = base + IQP_CTZ64(word)
                for k in range(wb):
                    out[i, k] ^= b[row, k]
                word &= word - 1


def batch_dot_words(u64[:, ::1] rows, u64[::1] x, u64[::1] out):
    """Set bit i of out to parity(rows[i] AND x)."""
    cdef Py_ssize_t m = rows.shape[0]
    cdef Py_ssize_t w = rows.shape[1]
    cdef Py_ssize_t i
    for i in range(out.shape[0]):
        out[i] = 0
    for i in range(m):
        if _and_parity(&rows[i, 0], &x[0], w):
            out[i >> 6] |= (<u64> 1) << (i & 63)


def batch_dot_many_words(u64[:, ::1] rows, u64[:, ::1] xs, u64[:, ::1] out):
    """Row t of out packs the bits parity(rows[i] AND xs[t]) for every i."""
    cdef Py_ssize_t m = rows.shape[0]
    cdef Py_ssize_t w = rows.shape[1]
    cdef Py_ssize_t nx = xs.shape[0]
    cdef Py_ssize_t t, i, k
    for t in range(nx):
        for k in range(out.shape[1]):
            out[t, k] = 0
        for i in range(m):
            if _and_parity(&rows[i, 0], &xs[t, 0], w):
                out[t, i >> 6] |= (<u64> 1) << (i & 63)


def correlated_rows_words(u64[:, ::1] p, u64[::1] d, u64[:, ::1] e,
                          u64[::1] mstar, u64[:, ::1] scratch, u64[:, ::1] out):
    """out[t] = mstar XOR (sum of p-rows with row.d = row.e[t] = 1).

    scratch must have p's shape; it holds the d-selected rows compacted.
    """
    cdef Py_ssize_t m = p.shape[0]
    cdef Py_ssize_t w = p.shape[1]
    cdef Py_ssize_t ne = e.shape[0]
    cdef Py_ssize_t nsel = 0
    cdef Py_ssize_t i, t, k
    for i in range(m):
        if _and_parity(&p[i, 0], &d[0], w):
            for k in range(w):
                scratch[nsel, k] = p[i, k]
            nsel += 1
    for t in range(ne):
        for k in range(w):
            out[t, k] = mstar[k]
        for i in range(nsel):
            if _and_parity(&scratch[i, 0], &e[t, 0], w):
                for k in range(w):
                    out[t, k] ^= scratch[i, k]
