# cython: boundscheck=False, wraparound=False, cdivision=True
"""In-place fast Walsh-Hadamard transform kernel (natural / Sylvester order)."""


def fwht_rows(double[:, ::1] a):
    """Apply the unnormalized FWHT to every row of a C-contiguous array.

    Row length must be a power of two. Modifies `a` in place.
    """
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t n = a.shape[1]
    cdef Py_ssize_t r, h, i, j
    cdef double x, y
    if n & (n - 1):
        raise ValueError("row length must be a power of two")
    for r in range(m):
        h = 1
        while h < n:
            for i in range(0, n, 2 * h):
                for j in range(i, i + h):
                    x = a[r, j]
                    y = a[r, j + h]
                    a[r, j] = x + y
                    a[r, j + h] = x - y
            h <<= 1
