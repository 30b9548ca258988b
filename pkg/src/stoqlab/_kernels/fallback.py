"""Pure-numpy twin of the compiled phase-space stencil.

The arithmetic (operation order, associativity) mirrors the Cython kernel
exactly, and the extension is built with FP contraction disabled, so both
backends produce bit-identical updates.
"""

import numpy as np


def fp_update(phi_padded, vx, fp, dt, dx, dp, dcoef):
    """One raw explicit step of the phase-space transport equation.

    Advection uses the one-step second-order upwind (Beam-Warming) form
    with the local Courant numbers nux = v dt/dx, nup = f dt/dp; the
    momentum diffusion is a central second difference.  phi_padded has
    two ghost cells of zeros on every side (absorbing boundary).  Returns
    the updated interior without clipping; the caller accounts for
    undershoot and boundary losses.
    """
    c = phi_padded[2:-2, 2:-2]
    xm1 = phi_padded[1:-3, 2:-2]
    xm2 = phi_padded[0:-4, 2:-2]
    xp1 = phi_padded[3:-1, 2:-2]
    xp2 = phi_padded[4:, 2:-2]
    pm1 = phi_padded[2:-2, 1:-3]
    pm2 = phi_padded[2:-2, 0:-4]
    pp1 = phi_padded[2:-2, 3:-1]
    pp2 = phi_padded[2:-2, 4:]

    nux = vx * dt / dx
    nup = fp * dt / dp
    adv_x = np.where(
        vx >= 0.0,
        0.5 * nux * (3.0 * c - 4.0 * xm1 + xm2)
        - 0.5 * (nux * nux) * (c - 2.0 * xm1 + xm2),
        0.5 * nux * (-3.0 * c + 4.0 * xp1 - xp2)
        - 0.5 * (nux * nux) * (c - 2.0 * xp1 + xp2),
    )
    adv_p = np.where(
        fp >= 0.0,
        0.5 * nup * (3.0 * c - 4.0 * pm1 + pm2)
        - 0.5 * (nup * nup) * (c - 2.0 * pm1 + pm2),
        0.5 * nup * (-3.0 * c + 4.0 * pp1 - pp2)
        - 0.5 * (nup * nup) * (c - 2.0 * pp1 + pp2),
    )
    diff = dcoef * (pp1 - 2.0 * c + pm1) / (dp * dp)
    return c - adv_x - adv_p + dt * diff
