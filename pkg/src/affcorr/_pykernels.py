"""Pure-Python batch kernels; fallback for ``_ckernels``.

Arithmetic is written out scalar by scalar in the same order as the
Cython source so that both backends return bit-identical arrays. Keep the
two files in sync.
"""

import math

import numpy as np

OK = 0
DEGENERATE_PLANE = 1
DEGENERATE_S = 2
FD_DEGENERATE = 3
RAY_PARALLEL = 4
NEGATIVE_DEPTH = 5

_EPS = 1e-12


def _warp(H, u, v):
    w = H[6] * u + H[7] * v + H[8]
    if not math.fabs(w) > _EPS:
        return None
    return (H[0] * u + H[1] * v + H[2]) / w, (H[3] * u + H[4] * v + H[5]) / w


def check_batch(R, t, n, d, p1, eps):
    """Evaluate every affine route and both point transfers for N records.

    Parameters
    ----------
    R : (N, 9) row-major rotations
    t, n : (N, 3) translations and (not necessarily unit) plane normals
    d : (N,) plane offsets
    p1 : (N, 2) first-view points
    eps : central finite-difference step

    Returns
    -------
    dict of arrays: ``status`` (N,) int8, ``s`` (N,), ``p2`` and ``p2_3d``
    (N, 2), and ``A_elem``, ``A_unified``, ``A_hom``, ``A_fd`` (N, 4).
    Rows with nonzero status hold NaN past the failing stage.
    """
    N = len(d)
    status = np.zeros(N, dtype=np.int8)
    out_s = np.full(N, np.nan)
    out_p2 = np.full((N, 2), np.nan)
    out_p23 = np.full((N, 2), np.nan)
    out_e = np.full((N, 4), np.nan)
    out_u = np.full((N, 4), np.nan)
    out_h = np.full((N, 4), np.nan)
    out_f = np.full((N, 4), np.nan)

    Rl, tl, nl, dl, pl = R.tolist(), t.tolist(), n.tolist(), d.tolist(), p1.tolist()
    for k in range(N):
        r = Rl[k]
        tx, ty, tz = tl[k]
        nx, ny, nz = nl[k]
        dd = dl[k]
        u, v = pl[k]

        norm = math.sqrt(nx * nx + ny * ny + nz * nz)
        if not norm > _EPS:
            status[k] = DEGENERATE_PLANE
            continue
        nx = nx / norm
        ny = ny / norm
        nz = nz / norm
        dd = dd / norm
        if not math.fabs(dd) > _EPS:
            status[k] = DEGENERATE_PLANE
            continue

        H = [
            r[0] - tx * nx / dd, r[1] - tx * ny / dd, r[2] - tx * nz / dd,
            r[3] - ty * nx / dd, r[4] - ty * ny / dd, r[5] - ty * nz / dd,
            r[6] - tz * nx / dd, r[7] - tz * ny / dd, r[8] - tz * nz / dd,
        ]
        s = H[6] * u + H[7] * v + H[8]
        if not math.fabs(s) > _EPS:
            status[k] = DEGENERATE_S
            continue
        u2 = (H[0] * u + H[1] * v + H[2]) / s
        v2 = (H[3] * u + H[4] * v + H[5]) / s
        out_s[k] = s
        out_p2[k, 0] = u2
        out_p2[k, 1] = v2

        # element-wise numerators
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

        # rotation block minus point dyad minus normal dyad
        wx = tx - u2 * tz
        wy = ty - v2 * tz
        pd11, pd12, pd21, pd22 = u2 * r[6], u2 * r[7], v2 * r[6], v2 * r[7]
        nd11, nd12, nd21, nd22 = cx * wx, cy * wx, cx * wy, cy * wy
        out_u[k, 0] = (r[0] - pd11 - nd11) / s
        out_u[k, 1] = (r[1] - pd12 - nd12) / s
        out_u[k, 2] = (r[3] - pd21 - nd21) / s
        out_u[k, 3] = (r[4] - pd22 - nd22) / s

        # derivative of the generic homography warp
        out_h[k, 0] = (H[0] - H[6] * u2) / s
        out_h[k, 1] = (H[1] - H[7] * u2) / s
        out_h[k, 2] = (H[3] - H[6] * v2) / s
        out_h[k, 3] = (H[4] - H[7] * v2) / s

        fu_p = _warp(H, u + eps, v)
        fu_m = _warp(H, u - eps, v)
        fv_p = _warp(H, u, v + eps)
        fv_m = _warp(H, u, v - eps)
        if fu_p is None or fu_m is None or fv_p is None or fv_m is None:
            status[k] = FD_DEGENERATE
            continue
        h2 = 2.0 * eps
        out_f[k, 0] = (fu_p[0] - fu_m[0]) / h2
        out_f[k, 1] = (fv_p[0] - fv_m[0]) / h2
        out_f[k, 2] = (fu_p[1] - fu_m[1]) / h2
        out_f[k, 3] = (fv_p[1] - fv_m[1]) / h2

        # ray-plane intersection, rigid motion, projection
        den = nx * u + ny * v + nz
        if not math.fabs(den) > _EPS:
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
        "status": status,
        "s": out_s,
        "p2": out_p2,
        "p2_3d": out_p23,
        "A_elem": out_e,
        "A_unified": out_u,
        "A_hom": out_h,
        "A_fd": out_f,
    }
