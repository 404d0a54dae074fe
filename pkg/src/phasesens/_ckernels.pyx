# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled moment kernels; same contract as ``_pykernels``."""

import numpy as np

from libc.math cimport cos, sin

cdef enum:
    MAXD = 8


cdef inline double _omega(Py_ssize_t i, Py_ssize_t j) noexcept nogil:
    if i // 2 != j // 2:
        return 0.0
    if j == i + 1 and i % 2 == 0:
        return 1.0
    if j == i - 1 and i % 2 == 1:
        return -1.0
    return 0.0


cdef double _omega_term(const double[:, ::1] M, Py_ssize_t d) noexcept nogil:
    # 0.5 * tr(M Om M Om)
    cdef double mo[MAXD * MAXD]
    cdef Py_ssize_t i, j, k
    cdef double acc
    for i in range(d):
        for j in range(d):
            acc = 0.0
            for k in range(d):
                acc += M[i, k] * _omega(k, j)
            mo[i * d + j] = acc
    acc = 0.0
    for i in range(d):
        for j in range(d):
            acc += mo[i * d + j] * mo[j * d + i]
    return 0.5 * acc


cdef void _moments(const double* m, const double* sig, double c0,
                   const double[::1] c, const double[:, ::1] M,
                   Py_ssize_t d, double om_term,
                   double* mu, double* var) noexcept nogil:
    cdef double ct[MAXD]
    cdef double ms[MAXD * MAXD]
    cdef Py_ssize_t i, j, k
    cdef double acc, mean_acc = c0, lin = 0.0, quad = 0.0

    for i in range(d):
        acc = 0.0
        for j in range(d):
            acc += M[i, j] * m[j]
        ct[i] = c[i] + 2.0 * acc
        mean_acc += c[i] * m[i] + m[i] * acc
    for i in range(d):
        for j in range(d):
            acc = 0.0
            for k in range(d):
                acc += M[i, k] * sig[k * d + j]
            ms[i * d + j] = acc
    for i in range(d):
        mean_acc += ms[i * d + i]
        for j in range(d):
            lin += ct[i] * sig[i * d + j] * ct[j]
            quad += ms[i * d + j] * ms[j * d + i]
    mu[0] = mean_acc
    var[0] = lin + 2.0 * quad + om_term
    if var[0] < 0.0:
        var[0] = 0.0


def quadratic_moments(mean, cov, double c0, c, M):
    cdef const double[::1] m = np.ascontiguousarray(mean, dtype=np.float64)
    cdef const double[:, ::1] sig = np.ascontiguousarray(cov, dtype=np.float64)
    cdef const double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef const double[:, ::1] Mv = np.ascontiguousarray(M, dtype=np.float64)
    cdef Py_ssize_t d = m.shape[0]
    cdef double mu, var
    if d > MAXD:
        raise ValueError(f"compiled kernel supports at most {MAXD // 2} modes")
    _moments(&m[0], &sig[0, 0], c0, cv, Mv, d, _omega_term(Mv, d), &mu, &var)
    return mu, var


cdef void _phase_matrix(double phi, bint two_arm, double* S, double* dS) noexcept nogil:
    cdef double co = cos(phi), si = sin(phi)
    cdef Py_ssize_t i
    if not two_arm:
        S[0] = co; S[1] = si; S[2] = -si; S[3] = co
        dS[0] = -si; dS[1] = co; dS[2] = -co; dS[3] = -si
        return
    for i in range(16):
        S[i] = 0.0
        dS[i] = 0.0
    S[0] = co; S[3] = si
    S[5] = co; S[6] = -si
    S[9] = si; S[10] = co
    S[12] = -si; S[15] = co
    dS[0] = -si; dS[3] = co
    dS[5] = -si; dS[6] = -co
    dS[9] = co; dS[10] = -si
    dS[12] = -co; dS[15] = -si


def phase_curve(mean, cov, double c0, c, M, phis, bint two_arm):
    cdef const double[::1] m0 = np.ascontiguousarray(mean, dtype=np.float64)
    cdef const double[:, ::1] s0 = np.ascontiguousarray(cov, dtype=np.float64)
    cdef const double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef const double[:, ::1] Mv = np.ascontiguousarray(M, dtype=np.float64)
    cdef const double[::1] ph = np.ascontiguousarray(np.atleast_1d(phis), dtype=np.float64)
    cdef Py_ssize_t d = m0.shape[0], K = ph.shape[0]
    cdef Py_ssize_t expected = 4 if two_arm else 2

    if d != expected:
        raise ValueError(f"phase_curve expects {expected} quadratures, got {d}")

    out_mu = np.empty(K)
    out_var = np.empty(K)
    out_gain = np.empty(K)
    cdef double[::1] mu_v = out_mu, var_v = out_var, gain_v = out_gain

    cdef double S[16]
    cdef double dS[16]
    cdef double m[4]
    cdef double dm[4]
    cdef double tmp[16]
    cdef double dtmp[16]
    cdef double sig[16]
    cdef double dsig[16]
    cdef double om_term = _omega_term(Mv, d)
    cdef double acc, dacc, g
    cdef Py_ssize_t k, i, j, l

    with nogil:
        for k in range(K):
            _phase_matrix(ph[k], two_arm, S, dS)
            for i in range(d):
                acc = 0.0
                dacc = 0.0
                for j in range(d):
                    acc += S[i * d + j] * m0[j]
                    dacc += dS[i * d + j] * m0[j]
                m[i] = acc
                dm[i] = dacc
            # tmp = S cov, dtmp = dS cov
            for i in range(d):
                for j in range(d):
                    acc = 0.0
                    dacc = 0.0
                    for l in range(d):
                        acc += S[i * d + l] * s0[l, j]
                        dacc += dS[i * d + l] * s0[l, j]
                    tmp[i * d + j] = acc
                    dtmp[i * d + j] = dacc
            for i in range(d):
                for j in range(d):
                    acc = 0.0
                    dacc = 0.0
                    for l in range(d):
                        acc += tmp[i * d + l] * S[j * d + l]
                        dacc += dtmp[i * d + l] * S[j * d + l]
                    sig[i * d + j] = acc
                    dsig[i * d + j] = dacc
            for i in range(d):
                for j in range(i + 1):
                    acc = dsig[i * d + j] + dsig[j * d + i]
                    dsig[i * d + j] = acc
                    dsig[j * d + i] = acc
            _moments(m, sig, c0, cv, Mv, d, om_term, &mu_v[k], &var_v[k])
            g = 0.0
            for i in range(d):
                acc = 0.0
                for j in range(d):
                    acc += Mv[i, j] * dm[j]
                    g += Mv[i, j] * dsig[j * d + i]
                g += cv[i] * dm[i] + 2.0 * m[i] * acc
            gain_v[k] = g
    return out_mu, out_var, out_gain
