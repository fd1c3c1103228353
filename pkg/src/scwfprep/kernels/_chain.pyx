# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled spinor-chain kernels. Reference semantics live in _python.py."""

import numpy as np

name = "cython"


def forward_spinors(int[::1] controls, signed char[::1] polarities,
                    double complex[:, :, ::1] unitaries, Py_ssize_t num_points):
    cdef Py_ssize_t n_gates = controls.shape[0]
    out = np.zeros((num_points, 2), dtype=np.complex128)
    cdef double complex[:, ::1] psi = out
    cdef Py_ssize_t g, j
    cdef int c, pol
    cdef double complex u00, u01, u10, u11, s0, s1
    for j in range(num_points):
        psi[j, 0] = 1.0
    for g in range(n_gates):
        c = controls[g]
        pol = polarities[g]
        u00 = unitaries[g, 0, 0]
        u01 = unitaries[g, 0, 1]
        u10 = unitaries[g, 1, 0]
        u11 = unitaries[g, 1, 1]
        for j in range(num_points):
            if ((j >> c) & 1) == pol:
                s0 = psi[j, 0]
                s1 = psi[j, 1]
                psi[j, 0] = u00 * s0 + u01 * s1
                psi[j, 1] = u10 * s0 + u11 * s1
    return out


def chain_backward(int[::1] controls, signed char[::1] polarities,
                   double complex[:, :, ::1] unitaries,
                   double complex[:, :, :, ::1] derivs,
                   double complex[:, ::1] psi_out,
                   double complex[:, ::1] w_out):
    cdef Py_ssize_t n_gates = controls.shape[0]
    cdef Py_ssize_t num_points = psi_out.shape[0]
    psi_arr = np.array(psi_out, copy=True)
    w_arr = np.array(w_out, copy=True)
    grad_arr = np.zeros(3 * n_gates)
    cdef double complex[:, ::1] psi = psi_arr
    cdef double complex[:, ::1] w = w_arr
    cdef double[::1] grad = grad_arr
    cdef Py_ssize_t g, j, p
    cdef int c, pol
    cdef double complex h00, h01, h10, h11  # U^H entries
    cdef double complex d00, d01, d10, d11
    cdef double complex s0, s1, p0, p1, w0, w1, v0, v1
    cdef double acc0, acc1, acc2
    for g in range(n_gates - 1, -1, -1):
        c = controls[g]
        pol = polarities[g]
        h00 = unitaries[g, 0, 0].conjugate()
        h01 = unitaries[g, 1, 0].conjugate()
        h10 = unitaries[g, 0, 1].conjugate()
        h11 = unitaries[g, 1, 1].conjugate()
        acc0 = 0.0
        acc1 = 0.0
        acc2 = 0.0
        for j in range(num_points):
            if ((j >> c) & 1) != pol:
                continue
            s0 = psi[j, 0]
            s1 = psi[j, 1]
            p0 = h00 * s0 + h01 * s1  # s_prev = U^H s
            p1 = h10 * s0 + h11 * s1
            w0 = w[j, 0]
            w1 = w[j, 1]
            for p in range(3):
                d00 = derivs[g, p, 0, 0]
                d01 = derivs[g, p, 0, 1]
                d10 = derivs[g, p, 1, 0]
                d11 = derivs[g, p, 1, 1]
                v0 = d00 * p0 + d01 * p1
                v1 = d10 * p0 + d11 * p1
                # Re(conj(w) . v)
                if p == 0:
                    acc0 += w0.real * v0.real + w0.imag * v0.imag + w1.real * v1.real + w1.imag * v1.imag
                elif p == 1:
                    acc1 += w0.real * v0.real + w0.imag * v0.imag + w1.real * v1.real + w1.imag * v1.imag
                else:
                    acc2 += w0.real * v0.real + w0.imag * v0.imag + w1.real * v1.real + w1.imag * v1.imag
            w[j, 0] = h00 * w0 + h01 * w1
            w[j, 1] = h10 * w0 + h11 * w1
            psi[j, 0] = p0
            psi[j, 1] = p1
        grad[3 * g] = acc0
        grad[3 * g + 1] = acc1
        grad[3 * g + 2] = acc2
    return grad_arr
