# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled tile-gate updates over the rows of a batched amplitude array."""

cimport cython
from libc.stdint cimport int64_t


def apply_pairs(double complex[:, ::1] m, const int64_t[::1] ia,
                const int64_t[::1] ib, double complex u00, double complex u01,
                double complex u10, double complex u11):
    """In place: ``(m[ia], m[ib]) <- ((u00 m[ia] + u01 m[ib]), (u10 m[ia] + u11 m[ib]))``."""
    cdef Py_ssize_t k, j, r, s
    cdef Py_ssize_t npairs = ia.shape[0]
    cdef Py_ssize_t ncols = m.shape[1]
    cdef double complex x, y
    if ib.shape[0] != npairs:
        raise ValueError("index arrays differ in length")
    with nogil:
        for k in range(npairs):
            r = ia[k]
            s = ib[k]
            for j in range(ncols):
                x = m[r, j]
                y = m[s, j]
                m[r, j] = u00 * x + u01 * y
                m[s, j] = u10 * x + u11 * y


def scale_rows(double complex[:, ::1] m, const int64_t[::1] rows,
               double complex phase):
    cdef Py_ssize_t k, j, r
    cdef Py_ssize_t ncols = m.shape[1]
    with nogil:
        for k in range(rows.shape[0]):
            r = rows[k]
            for j in range(ncols):
                m[r, j] = phase * m[r, j]


def row_weights(double complex[:, ::1] m, const int64_t[::1] rows,
                double[::1] out):
    """``out[j] = sum_k |m[rows[k], j]|^2``, accumulated in row order."""
    cdef Py_ssize_t k, j, r
    cdef Py_ssize_t ncols = m.shape[1]
    cdef double complex z
    with nogil:
        for j in range(ncols):
            out[j] = 0.0
        for k in range(rows.shape[0]):
            r = rows[k]
            for j in range(ncols):
                z = m[r, j]
                out[j] += z.real * z.real + z.imag * z.imag
