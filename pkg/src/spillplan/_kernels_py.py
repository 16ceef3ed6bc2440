"""Pure numpy implementation of the propagation kernels.

State is split into afloat oil ``a`` (exposed to removal and transport) and
landed oil ``b`` (at rest in absorbing sectors).  One period ``j`` is::

    z = (1 - r_j) * (a + inj_j) + b
    a' = z @ moff_j        # transport, absorbing self-retention excluded
    b' = z * absorbing     # oil already in an absorbing sector lands

``moff_j`` is the transition matrix with the unit diagonal of absorbing
rows zeroed, so ``a' + b'`` equals ``z @ M_j``.
"""

import numpy as np


def forward(moff, absorbing, fracs, inj, a, b, start, stop):
    a = np.array(a, dtype=np.float64)
    b = np.array(b, dtype=np.float64)
    for j in range(start, stop):
        z = (1.0 - fracs[j]) * (a + inj[j]) + b
        a = z @ moff[j]
        b = z * absorbing
    return a, b


def backward(moff, absorbing, fracs, inj, w, start, stop):
    """Adjoint sweep: terminal ``w . (a_T + b_T)`` as a linear function of the
    state at ``start``.  Returns ``(lam_a, lam_b, const)``."""
    lam_a = np.array(w, dtype=np.float64)
    lam_b = np.array(w, dtype=np.float64)
    const = 0.0
    for j in range(stop - 1, start - 1, -1):
        g = moff[j] @ lam_a + absorbing * lam_b
        keep = 1.0 - fracs[j]
        const += float(np.dot(keep * inj[j], g))
        lam_a = keep * g
        lam_b = g
    return lam_a, lam_b, const
