# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops; see ``_fallback`` for the reference versions."""

import numpy as np

from libc.math cimport fabs

# coefficients below this are flushed to zero; subnormal arithmetic is ~100x slower
cdef double TINY = 1e-280


def power_table(a, b, Py_ssize_t rows, Py_ssize_t cols, start=None):
    cdef double complex ca = a, cb = b
    cdef double complex bc = cb.conjugate()
    cdef double complex inv_ac = 1.0 / ca.conjugate()
    out_arr = np.empty((cols, rows), dtype=np.complex128)
    work_arr = np.zeros((2, rows), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef double complex[:, ::1] work = work_arr
    cdef Py_ssize_t j, k, cur = 0, nxt
    cdef double complex prev_p, prev_h, h, pj
    if start is None:
        if rows > 0:
            work[0, 0] = 1.0
    else:
        work_arr[0, :] = np.asarray(start, dtype=np.complex128)[:rows]
    for k in range(cols):
        nxt = 1 - cur
        prev_p = 0.0
        prev_h = 0.0
        for j in range(rows):
            pj = work[cur, j]
            out[k, j] = pj
            h = (ca * prev_p + cb * pj - bc * prev_h) * inv_ac
            if fabs(h.real) < TINY and fabs(h.imag) < TINY:
                h = 0.0
            work[nxt, j] = h
            prev_p = pj
            prev_h = h
        cur = nxt
    return out_arr.T, work_arr[cur].copy()


cdef enum:
    HBLOCK = 256


def horner(coeffs, points):
    """sum_i coeffs[i] * points**i at every point."""
    c_arr = np.ascontiguousarray(coeffs, dtype=np.complex128).view(np.float64)
    z_arr = np.ascontiguousarray(points, dtype=np.complex128).view(np.float64)
    out_arr = np.zeros(z_arr.shape[0] // 2, dtype=np.complex128)
    cdef double[::1] cv = c_arr, zv = z_arr, ov = out_arr.view(np.float64)
    cdef Py_ssize_t i, q, b, w, m = zv.shape[0] // 2, n = cv.shape[0] // 2
    cdef double ar[HBLOCK]
    cdef double ai[HBLOCK]
    cdef double zr[HBLOCK]
    cdef double zi[HBLOCK]
    cdef double cr, ci, t
    if m == 0 or n == 0:
        return out_arr
    # real arithmetic on small local blocks: C complex multiply goes through a
    # slow inf/nan-safe helper, and streaming over the full arrays stalls when
    # input and output addresses alias modulo the page size
    for b in range(0, m, HBLOCK):
        w = min(HBLOCK, m - b)
        for q in range(w):
            zr[q] = zv[2 * (b + q)]
            zi[q] = zv[2 * (b + q) + 1]
            ar[q] = 0.0
            ai[q] = 0.0
        for i in range(n - 1, -1, -1):
            cr = cv[2 * i]
            ci = cv[2 * i + 1]
            for q in range(w):
                t = ar[q] * zr[q] - ai[q] * zi[q] + cr
                ai[q] = ar[q] * zi[q] + ai[q] * zr[q] + ci
                ar[q] = t
        for q in range(w):
            ov[2 * (b + q)] = ar[q]
            ov[2 * (b + q) + 1] = ai[q]
    return out_arr
