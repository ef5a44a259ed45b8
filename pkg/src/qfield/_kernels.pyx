# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled stencil kernels (periodic, second-order centered differences).

Arithmetic order mirrors ``_fallback.py`` exactly; build without
floating-point contraction so both backends agree bit for bit.  Work is
split over x-planes with OpenMP; every output cell is written by one
thread from read-only inputs, so results do not depend on thread count.
"""

from cython.parallel cimport prange
from libc.math cimport M_PI

__version__ = "1"

cdef int _nthreads = 1


def set_num_threads(int n):
    global _nthreads
    if n < 1:
        raise ValueError("thread count must be positive")
    _nthreads = n


def get_num_threads():
    return _nthreads


cdef inline double _d(const double[:, :, :, ::1] f, Py_ssize_t a,
                      Py_ssize_t i1, Py_ssize_t j1, Py_ssize_t k1,
                      Py_ssize_t i0, Py_ssize_t j0, Py_ssize_t k0, double h2) noexcept nogil:
    # (f[+1] - f[-1]) / (2h); a zero spacing marks a degenerate axis
    if h2 == 0.0:
        return 0.0
    return (f[a, i1, j1, k1] - f[a, i0, j0, k0]) / h2


cdef inline Py_ssize_t _up(Py_ssize_t i, Py_ssize_t n) noexcept nogil:
    return 0 if i + 1 == n else i + 1


cdef inline Py_ssize_t _down(Py_ssize_t i, Py_ssize_t n) noexcept nogil:
    return n - 1 if i == 0 else i - 1


def grad(const double[:, :, :, ::1] f, double hx, double hy, double hz, double[:, :, :, ::1] out):
    cdef Py_ssize_t nx = f.shape[1], ny = f.shape[2], nz = f.shape[3]
    cdef Py_ssize_t i, j, k, ip, im, jp, jm, kp, km
    cdef double h2x = 2.0 * hx, h2y = 2.0 * hy, h2z = 2.0 * hz
    for i in prange(nx, nogil=True, schedule="static", num_threads=_nthreads):
        ip = _up(i, nx)
        im = _down(i, nx)
        for j in range(ny):
            jp = _up(j, ny)
            jm = _down(j, ny)
            for k in range(nz):
                kp = _up(k, nz)
                km = _down(k, nz)
                out[0, i, j, k] = _d(f, 0, ip, j, k, im, j, k, h2x)
                out[1, i, j, k] = _d(f, 0, i, jp, k, i, jm, k, h2y)
                out[2, i, j, k] = _d(f, 0, i, j, kp, i, j, km, h2z)


def div(const double[:, :, :, ::1] v, double hx, double hy, double hz, double[:, :, ::1] out):
    cdef Py_ssize_t nx = v.shape[1], ny = v.shape[2], nz = v.shape[3]
    cdef Py_ssize_t i, j, k, ip, im, jp, jm, kp, km
    cdef double h2x = 2.0 * hx, h2y = 2.0 * hy, h2z = 2.0 * hz
    for i in prange(nx, nogil=True, schedule="static", num_threads=_nthreads):
        ip = _up(i, nx)
        im = _down(i, nx)
        for j in range(ny):
            jp = _up(j, ny)
            jm = _down(j, ny)
            for k in range(nz):
                kp = _up(k, nz)
                km = _down(k, nz)
                out[i, j, k] = (_d(v, 0, ip, j, k, im, j, k, h2x) + _d(v, 1, i, jp, k, i, jm, k, h2y)) \
                    + _d(v, 2, i, j, kp, i, j, km, h2z)


def curl(const double[:, :, :, ::1] v, double hx, double hy, double hz, double[:, :, :, ::1] out):
    cdef Py_ssize_t nx = v.shape[1], ny = v.shape[2], nz = v.shape[3]
    cdef Py_ssize_t i, j, k, ip, im, jp, jm, kp, km
    cdef double h2x = 2.0 * hx, h2y = 2.0 * hy, h2z = 2.0 * hz
    for i in prange(nx, nogil=True, schedule="static", num_threads=_nthreads):
        ip = _up(i, nx)
        im = _down(i, nx)
        for j in range(ny):
            jp = _up(j, ny)
            jm = _down(j, ny)
            for k in range(nz):
                kp = _up(k, nz)
                km = _down(k, nz)
                out[0, i, j, k] = _d(v, 2, i, jp, k, i, jm, k, h2y) - _d(v, 1, i, j, kp, i, j, km, h2z)
                out[1, i, j, k] = _d(v, 0, i, j, kp, i, j, km, h2z) - _d(v, 2, ip, j, k, im, j, k, h2x)
                out[2, i, j, k] = _d(v, 1, ip, j, k, im, j, k, h2x) - _d(v, 0, i, jp, k, i, jm, k, h2y)


def maxwell_rhs(const double[:, :, :, ::1] y, const double[:, :, ::1] rho,
                const double[:, :, :, ::1] J, double c, double hx, double hy, double hz,
                double[:, :, :, ::1] out):
    cdef Py_ssize_t nx = y.shape[1], ny = y.shape[2], nz = y.shape[3]
    cdef Py_ssize_t i, j, k, ip, im, jp, jm, kp, km
    cdef double h2x = 2.0 * hx, h2y = 2.0 * hy, h2z = 2.0 * hz
    cdef double fourpi = 4.0 * M_PI
    cdef double fourpi_c = fourpi * c
    cdef double negc = -c
    cdef double divE, gx, gy, gz, cbx, cby, cbz, cex, cey, cez
    for i in prange(nx, nogil=True, schedule="static", num_threads=_nthreads):
        ip = _up(i, nx)
        im = _down(i, nx)
        for j in range(ny):
            jp = _up(j, ny)
            jm = _down(j, ny)
            for k in range(nz):
                kp = _up(k, nz)
                km = _down(k, nz)
                divE = (_d(y, 1, ip, j, k, im, j, k, h2x) + _d(y, 2, i, jp, k, i, jm, k, h2y)) \
                    + _d(y, 3, i, j, kp, i, j, km, h2z)
                out[0, i, j, k] = c * divE - fourpi_c * rho[i, j, k]
                gx = _d(y, 0, ip, j, k, im, j, k, h2x)
                gy = _d(y, 0, i, jp, k, i, jm, k, h2y)
                gz = _d(y, 0, i, j, kp, i, j, km, h2z)
                cbx = _d(y, 6, i, jp, k, i, jm, k, h2y) - _d(y, 5, i, j, kp, i, j, km, h2z)
                cby = _d(y, 4, i, j, kp, i, j, km, h2z) - _d(y, 6, ip, j, k, im, j, k, h2x)
                cbz = _d(y, 5, ip, j, k, im, j, k, h2x) - _d(y, 4, i, jp, k, i, jm, k, h2y)
                cex = _d(y, 3, i, jp, k, i, jm, k, h2y) - _d(y, 2, i, j, kp, i, j, km, h2z)
                cey = _d(y, 1, i, j, kp, i, j, km, h2z) - _d(y, 3, ip, j, k, im, j, k, h2x)
                cez = _d(y, 2, ip, j, k, im, j, k, h2x) - _d(y, 1, i, jp, k, i, jm, k, h2y)
                out[1, i, j, k] = (c * cbx - c * gx) - fourpi * J[0, i, j, k]
                out[2, i, j, k] = (c * cby - c * gy) - fourpi * J[1, i, j, k]
                out[3, i, j, k] = (c * cbz - c * gz) - fourpi * J[2, i, j, k]
                out[4, i, j, k] = negc * cex
                out[5, i, j, k] = negc * cey
                out[6, i, j, k] = negc * cez
