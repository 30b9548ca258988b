# Compiled hot loop for the phase-space solver.  Must stay arithmetically
# identical to fallback.fp_update (same operation order; the build passes
# -ffp-contract=off) so the backends can be swapped without changing bits.

import numpy as np


def fp_update(double[:, ::1] phi_padded, double[:, ::1] vx, double[:, ::1] fp,
              double dt, double dx, double dp, double dcoef):
    cdef Py_ssize_t nx = vx.shape[0]
    cdef Py_ssize_t np_ = vx.shape[1]
    out_arr = np.empty((nx, np_), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, ii, jj
    cdef double cc, v, f, nux, nup, adv_x, adv_p, diff

    for i in range(nx):
        ii = i + 2
        for j in range(np_):
            jj = j + 2
            cc = phi_padded[ii, jj]
            v = vx[i, j]
            f = fp[i, j]
            nux = v * dt / dx
            nup = f * dt / dp
            if v >= 0.0:
                adv_x = (0.5 * nux * (3.0 * cc - 4.0 * phi_padded[ii - 1, jj]
                                      + phi_padded[ii - 2, jj])
                         - 0.5 * (nux * nux) * (cc - 2.0 * phi_padded[ii - 1, jj]
                                                + phi_padded[ii - 2, jj]))
            else:
                adv_x = (0.5 * nux * (-3.0 * cc + 4.0 * phi_padded[ii + 1, jj]
                                      - phi_padded[ii + 2, jj])
                         - 0.5 * (nux * nux) * (cc - 2.0 * phi_padded[ii + 1, jj]
                                                + phi_padded[ii + 2, jj]))
            if f >= 0.0:
                adv_p = (0.5 * nup * (3.0 * cc - 4.0 * phi_padded[ii, jj - 1]
                                      + phi_padded[ii, jj - 2])
                         - 0.5 * (nup * nup) * (cc - 2.0 * phi_padded[ii, jj - 1]
                                                + phi_padded[ii, jj - 2]))
            else:
                adv_p = (0.5 * nup * (-3.0 * cc + 4.0 * phi_padded[ii, jj + 1]
                                      - phi_padded[ii, jj + 2])
                         - 0.5 * (nup * nup) * (cc - 2.0 * phi_padded[ii, jj + 1]
                                                + phi_padded[ii, jj + 2]))
            diff = dcoef * (phi_padded[ii, jj + 1] - 2.0 * cc
                            + phi_padded[ii, jj - 1]) / (dp * dp)
            out[i, j] = cc - adv_x - adv_p + dt * diff
    return out_arr
