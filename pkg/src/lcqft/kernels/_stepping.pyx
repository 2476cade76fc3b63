# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Float64 time stepping of the discrete Klein-Gordon equation."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def step_retarded(const double[:, ::1] coupling, const double[:, ::1] mass,
                  const unsigned char[:, ::1] mask, const double[:, :, ::1] src):
    cdef Py_ssize_t k = src.shape[0], n_t = src.shape[1], n_x = src.shape[2]
    out_arr = np.zeros((k, n_t, n_x), dtype=np.float64)
    cdef double[:, :, ::1] phi = out_arr
    cdef Py_ssize_t b, t, x, xl, xr
    cdef double cur, lap
    for b in range(k):
        for t in range(n_t - 1):
            for x in range(n_x):
                if not mask[t + 1, x]:
                    continue
                xl = x - 1 if x > 0 else n_x - 1
                xr = x + 1 if x < n_x - 1 else 0
                cur = phi[b, t, x]
                lap = coupling[t, x] * (phi[b, t, xr] - cur) - coupling[t, xl] * (cur - phi[b, t, xl])
                phi[b, t + 1, x] = src[b, t, x] + 2.0 * cur + lap \
                    - (phi[b, t - 1, x] if t > 0 else 0.0) - mass[t, x] * cur
    return out_arr


def step_advanced(const double[:, ::1] coupling, const double[:, ::1] mass,
                  const unsigned char[:, ::1] mask, const double[:, :, ::1] src):
    cdef Py_ssize_t k = src.shape[0], n_t = src.shape[1], n_x = src.shape[2]
    out_arr = np.zeros((k, n_t, n_x), dtype=np.float64)
    cdef double[:, :, ::1] phi = out_arr
    cdef Py_ssize_t b, t, x, xl, xr
    cdef double cur, lap
    for b in range(k):
        for t in range(n_t - 1, 0, -1):
            for x in range(n_x):
                if not mask[t - 1, x]:
                    continue
                xl = x - 1 if x > 0 else n_x - 1
                xr = x + 1 if x < n_x - 1 else 0
                cur = phi[b, t, x]
                lap = coupling[t, x] * (phi[b, t, xr] - cur) - coupling[t, xl] * (cur - phi[b, t, xl])
                phi[b, t - 1, x] = src[b, t, x] + 2.0 * cur + lap \
                    - (phi[b, t + 1, x] if t < n_t - 1 else 0.0) - mass[t, x] * cur
    return out_arr
