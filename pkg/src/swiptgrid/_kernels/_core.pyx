# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled allocator hot loops; mirrors swiptgrid._kernels.pure."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()

TAG_PASSIVE = 0
TAG_CHARGING = 1
TAG_DISCHARGING = 2


cdef double _balance(double kappa, double[::1] gains2, double[::1] harvest,
                     double eta, double fixed) noexcept nogil:
    cdef Py_ssize_t i, n = gains2.shape[0]
    cdef double eta4 = eta * eta * eta * eta
    cdef double k2 = kappa * kappa
    cdef double cut_hi, cut_lo, acc = 0.0
    for i in range(n):
        cut_hi = gains2[i] * k2
        cut_lo = cut_hi * eta4
        if harvest[i] > cut_hi:
            acc += eta * (harvest[i] - cut_hi)
        elif harvest[i] < cut_lo:
            acc -= (cut_lo - harvest[i]) / eta
    return acc + fixed


def balance_at(double kappa, double[::1] gains2, double[::1] harvest,
               double eta, double fixed):
    return _balance(kappa, gains2, harvest, eta, fixed)


cdef double _piece_polish(double kappa, double[::1] gains2, double[::1] harvest,
                          double eta, double fixed) noexcept nogil:
    # Exact root of the balance on the linear piece (frozen regimes)
    # containing ``kappa``; falls back to ``kappa`` on kink crossings.
    cdef Py_ssize_t i, n = gains2.shape[0]
    cdef double eta4 = eta * eta * eta * eta
    cdef double u = kappa * kappa
    cdef double cut_hi, cut_lo, num = fixed, den = 0.0, u_star
    for i in range(n):
        cut_hi = gains2[i] * u
        cut_lo = cut_hi * eta4
        if harvest[i] > cut_hi:
            num += eta * harvest[i]
            den += eta * gains2[i]
        elif harvest[i] < cut_lo:
            num += harvest[i] / eta
            den += eta * eta * eta * gains2[i]
    if den <= 0.0:
        return kappa
    u_star = num / den
    if u_star < 0.0:
        return kappa
    for i in range(n):
        cut_hi = gains2[i] * u
        cut_lo = cut_hi * eta4
        if harvest[i] > cut_hi:
            if harvest[i] < gains2[i] * u_star:
                return kappa
        elif harvest[i] < cut_lo:
            if harvest[i] > gains2[i] * u_star * eta4:
                return kappa
        else:
            if harvest[i] < gains2[i] * u_star * eta4 or harvest[i] > gains2[i] * u_star:
                return kappa
    return sqrt(u_star)


def solve_kappa(double[::1] gains2, double[::1] harvest, double eta,
                double fixed, double hi):
    cdef Py_ssize_t i, n = harvest.shape[0]
    cdef double sum_e = 0.0
    for i in range(n):
        sum_e += harvest[i]
    if eta * sum_e + fixed <= 0.0:
        return 0.0
    cdef double b_tol = 1e-13 * (eta * sum_e + 1.0)
    cdef double lo = 0.0
    cdef double mid, bal
    cdef int expansions = 0
    if hi <= 0.0:
        hi = 1.0
    while _balance(hi, gains2, harvest, eta, fixed) > 0.0:
        lo = hi
        hi *= 2.0
        expansions += 1
        if expansions > 1200:
            raise RuntimeError("no sign change while expanding kappa bracket")
    while hi - lo > 1e-12 * (1.0 + 0.5 * (lo + hi)):
        mid = 0.5 * (lo + hi)
        bal = _balance(mid, gains2, harvest, eta, fixed)
        if fabs(bal) <= b_tol:
            break
        if bal > 0.0:
            lo = mid
        else:
            hi = mid
    return _piece_polish(0.5 * (lo + hi), gains2, harvest, eta, fixed)


def candidate_powers(double kappa, double[::1] gains2, double[::1] harvest,
                     double eta):
    cdef Py_ssize_t i, n = gains2.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] powers = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.int8_t, ndim=1] tags = np.empty(n, dtype=np.int8)
    cdef double eta4 = eta * eta * eta * eta
    cdef double k2 = kappa * kappa
    cdef double cut_hi, cut_lo
    for i in range(n):
        cut_hi = gains2[i] * k2
        cut_lo = cut_hi * eta4
        if harvest[i] > cut_hi:
            powers[i] = cut_hi
            tags[i] = 1
        elif harvest[i] < cut_lo:
            powers[i] = cut_lo
            tags[i] = 2
        else:
            powers[i] = harvest[i]
            tags[i] = 0
    return powers, tags


def weighted_root_sum(double[::1] powers, double[::1] gains):
    cdef Py_ssize_t i, n = powers.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        acc += sqrt(powers[i]) * gains[i]
    return acc
