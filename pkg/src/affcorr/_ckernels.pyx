# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batch kernels. Mirrors ``_pykernels`` operation for operation."""

import numpy as np
from libc.math cimport fabs, sqrt

cdef enum:
    OK = 0
    DEGENERATE_PLANE = 1
    DEGENERATE_S = 2
    FD_DEGENERATE = 3
    RAY_PARALLEL = 4
    NEGATIVE_DEPTH = 5

cdef double _EPS = 1e-12


cdef inline bint _warp(const double* H, double u, double v, double* ou, double* ov) noexcept nogil:
    cdef double w = H[6] * u + H[7] * v + H[8]
    if not fabs(w) > _EPS:
        return False
    ou[0] = (H[0] * u + H[1] * v + H[2]) / w
    ov[0] = (H[3] * u + H[4] * v + H[5]) / w
    return True


def check_batch(const double[:, ::1] R, const double[:, ::1] t, const double[:, ::1] n,
                const double[::1] d, const double[:, ::1] p1, double eps):
    cdef Py_ssize_t N = d.shape[0]
    status_a = np.zeros(N, dtype=np.int8)
    s_a = np.full(N, np.nan)
    p2_a = np.full((N, 2), np.nan)
    p23_a = np.full((N, 2), np.nan)
    e_a = np.full((N, 4), np.nan)
    u_a = np.full((N, 4), np.nan)
    h_a = np.full((N, 4), np.nan)
    f_a = np.full((N, 4), np.nan)

    cdef signed char[::1] status = status_a
    cdef double[::1] out_s = s_a
    cdef double[:, ::1] out_p2 = p2_a
    cdef double[:, ::1] out_p23 = p23_a
    cdef double[:, ::1] out_e = e_a
    cdef double[:, ::1] out_u = u_a
    cdef double[:, ::1] out_h = h_a
    cdef double[:, ::1] out_f = f_a

    cdef Py_ssize_t k
    cdef double r[9]
    cdef double H[9]
    cdef double tx, ty, tz, nx, ny, nz, dd, u, v, norm, s, u2, v2
    cdef double cx, cy, b11, b12, b21, b22, wx, wy
    cdef double pd11, pd12, pd21, pd22, nd11, nd12, nd21, nd22
    cdef double fup0, fup1, fum0, fum1, fvp0, fvp1, fvm0, fvm1, h2
    cdef double den, lam, X, Y, Z, X2, Y2, Z2
    cdef int i

    with nogil:
        for k in range(N):
            for i in range(9):
                r[i] = R[k, i]
            tx = t[k, 0]; ty = t[k, 1]; tz = t[k, 2]
            nx = n[k, 0]; ny = n[k, 1]; nz = n[k, 2]
            dd = d[k]
            u = p1[k, 0]; v = p1[k, 1]

            norm = sqrt(nx * nx + ny * ny + nz * nz)
            if not norm > _EPS:
                status[k] = DEGENERATE_PLANE
                continue
            nx = nx / norm
            ny = ny / norm
            nz = nz / norm
            dd = dd / norm
            if not fabs(dd) > _EPS:
                status[k] = DEGENERATE_PLANE
                continue

            H[0] = r[0] - tx * nx / dd; H[1] = r[1] - tx * ny / dd; H[2] = r[2] - tx * nz / dd
            H[3] = r[3] - ty * nx / dd; H[4] = r[4] - ty * ny / dd; H[5] = r[5] - ty * nz / dd
            H[6] = r[6] - tz * nx / dd; H[7] = r[7] - tz * ny / dd; H[8] = r[8] - tz * nz / dd
            s = H[6] * u + H[7] * v + H[8]
            if not fabs(s) > _EPS:
                status[k] = DEGENERATE_S
                continue
            u2 = (H[0] * u + H[1] * v + H[2]) / s
            v2 = (H[3] * u + H[4] * v + H[5]) / s
            out_s[k] = s
            out_p2[k, 0] = u2
            out_p2[k, 1] = v2

            cx = nx / dd
            cy = ny / dd
            b11 = r[0] - u2 * r[6] - cx * (tx - u2 * tz)
            b12 = r[1] - u2 * r[7] - cy * (tx - u2 * tz)
            b21 = r[3] - v2 * r[6] - cx * (ty - v2 * tz)
            b22 = r[4] - v2 * r[7] - cy * (ty - v2 * tz)
            out_e[k, 0] = b11 / s
            out_e[k, 1] = b12 / s
            out_e[k, 2] = b21 / s
            out_e[k, 3] = b22 / s

            wx = tx - u2 * tz
            wy = ty - v2 * tz
            pd11 = u2 * r[6]; pd12 = u2 * r[7]; pd21 = v2 * r[6]; pd22 = v2 * r[7]
            nd11 = cx * wx; nd12 = cy * wx; nd21 = cx * wy; nd22 = cy * wy
            out_u[k, 0] = (r[0] - pd11 - nd11) / s
            out_u[k, 1] = (r[1] - pd12 - nd12) / s
            out_u[k, 2] = (r[3] - pd21 - nd21) / s
            out_u[k, 3] = (r[4] - pd22 - nd22) / s

            out_h[k, 0] = (H[0] - H[6] * u2) / s
            out_h[k, 1] = (H[1] - H[7] * u2) / s
            out_h[k, 2] = (H[3] - H[6] * v2) / s
            out_h[k, 3] = (H[4] - H[7] * v2) / s

            if not (_warp(H, u + eps, v, &fup0, &fup1) and _warp(H, u - eps, v, &fum0, &fum1)
                    and _warp(H, u, v + eps, &fvp0, &fvp1) and _warp(H, u, v - eps, &fvm0, &fvm1)):
                status[k] = FD_DEGENERATE
                continue
            h2 = 2.0 * eps
            out_f[k, 0] = (fup0 - fum0) / h2
            out_f[k, 1] = (fvp0 - fvm0) / h2
            out_f[k, 2] = (fup1 - fum1) / h2
            out_f[k, 3] = (fvp1 - fvm1) / h2

            den = nx * u + ny * v + nz
            if not fabs(den) > _EPS:
                status[k] = RAY_PARALLEL
                continue
            lam = -dd / den
            if not lam > 0.0:
                status[k] = NEGATIVE_DEPTH
                continue
            X = lam * u
            Y = lam * v
            Z = lam
            X2 = r[0] * X + r[1] * Y + r[2] * Z + tx
            Y2 = r[3] * X + r[4] * Y + r[5] * Z + ty
            Z2 = r[6] * X + r[7] * Y + r[8] * Z + tz
            if not Z2 > 0.0:
                status[k] = NEGATIVE_DEPTH
                continue
            out_p23[k, 0] = X2 / Z2
            out_p23[k, 1] = Y2 / Z2

    return {
        "status": status_a,
        "s": s_a,
        "p2": p2_a,
        "p2_3d": p23_a,
        "A_elem": e_a,
        "A_unified": u_a,
        "A_hom": h_a,
        "A_fd": f_a,
    }
