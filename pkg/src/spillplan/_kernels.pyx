# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled propagation kernels; same contract as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def forward(double[:, :, ::1] moff, double[::1] absorbing, double[:, ::1] fracs,
            double[:, ::1] inj, a_in, b_in, Py_ssize_t start, Py_ssize_t stop):
    cdef Py_ssize_t n = absorbing.shape[0]
    cdef Py_ssize_t i, k, j
    cdef double zi
    a_arr = np.array(a_in, dtype=np.float64)
    b_arr = np.array(b_in, dtype=np.float64)
    z_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] a = a_arr
    cdef double[::1] b = b_arr
    cdef double[::1] z = z_arr
    for j in range(start, stop):
        for i in range(n):
            z[i] = (1.0 - fracs[j, i]) * (a[i] + inj[j, i]) + b[i]
        for k in range(n):
            a[k] = 0.0
        for i in range(n):
            zi = z[i]
            if zi != 0.0:
                for k in range(n):
                    a[k] += zi * moff[j, i, k]
            b[i] = zi * absorbing[i]
    return a_arr, b_arr


def backward(double[:, :, ::1] moff, double[::1] absorbing, double[:, ::1] fracs,
             double[:, ::1] inj, w, Py_ssize_t start, Py_ssize_t stop):
    cdef Py_ssize_t n = absorbing.shape[0]
    cdef Py_ssize_t i, k, j
    cdef double acc, keep, const = 0.0
    la_arr = np.array(w, dtype=np.float64)
    lb_arr = np.array(w, dtype=np.float64)
    g_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] la = la_arr
    cdef double[::1] lb = lb_arr
    cdef double[::1] g = g_arr
    for j in range(stop - 1, start - 1, -1):
        for i in range(n):
            acc = 0.0
            for k in range(n):
                acc += moff[j, i, k] * la[k]
            g[i] = acc + absorbing[i] * lb[i]
        for i in range(n):
            keep = 1.0 - fracs[j, i]
            const += keep * inj[j, i] * g[i]
            la[i] = keep * g[i]
            lb[i] = g[i]
    return la_arr, lb_arr, const
