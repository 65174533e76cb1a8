# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled evaluation of structured products

    f(x) = sum_k w_k osc(theta_k) prod_{j<k} (1 + cos theta_j)

at batches of points.  Semantics match ornstein._kernels_py exactly.
"""

from libc.math cimport cos, sin, M_PI

cdef extern from *:
    """
    #ifndef _GNU_SOURCE
    #define _GNU_SOURCE
    #endif
    #include <math.h>
    static inline void orn_sincos(double x, double *s, double *c) {
    #if defined(__GLIBC__)
        sincos(x, s, c);
    #else
        *s = sin(x); *c = cos(x);
    #endif
    }
    """
    void orn_sincos(double x, double *s, double *c) nogil

ctypedef unsigned long long u64

cdef double TWO_PI_OVER_2_64 = 2.0 * M_PI / 18446744073709551616.0


def product_form_dyadic(const u64[::1] c1, const u64[::1] c2, const double[::1] w,
                        bint sine, const u64[::1] u1, const u64[::1] u2, double[::1] out):
    """Points x = (u1, u2) / 2^64; c1, c2 are the frequencies reduced mod 2^64."""
    cdef Py_ssize_t n = c1.shape[0]
    cdef Py_ssize_t P = u1.shape[0]
    cdef Py_ssize_t i, k
    cdef u64 ph
    cdef long long sph
    cdef double theta, c, s, acc, prod
    with nogil:
        for i in range(P):
            acc = 0.0
            prod = 1.0
            for k in range(n):
                # unsigned arithmetic wraps mod 2^64: exact phase numerator
                ph = c1[k] * u1[i] + c2[k] * u2[i]
                sph = <long long>ph
                theta = <double>sph * TWO_PI_OVER_2_64
                if sine and w[k] != 0.0:
                    orn_sincos(theta, &s, &c)
                    acc += w[k] * s * prod
                else:
                    c = cos(theta)
                    if w[k] != 0.0:
                        acc += w[k] * c * prod
                prod *= 1.0 + c
            out[i] = acc


def product_form_grid(const double[:, ::1] ca, const double[:, ::1] sa,
                      const double[:, ::1] cb, const double[:, ::1] sb,
                      const double[::1] w, bint sine, double[:, ::1] out):
    """Tensor grid: theta_k(j1, j2) = A_k(j1) + B_k(j2), given cos/sin of A and B."""
    cdef Py_ssize_t n = ca.shape[0]
    cdef Py_ssize_t N1 = ca.shape[1]
    cdef Py_ssize_t N2 = cb.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double c, s, acc, prod
    with nogil:
        for i in range(N1):
            for j in range(N2):
                acc = 0.0
                prod = 1.0
                for k in range(n):
                    c = ca[k, i] * cb[k, j] - sa[k, i] * sb[k, j]
                    if w[k] != 0.0:
                        if sine:
                            s = sa[k, i] * cb[k, j] + ca[k, i] * sb[k, j]
                            acc += w[k] * s * prod
                        else:
                            acc += w[k] * c * prod
                    prod *= 1.0 + c
                out[i, j] = acc
