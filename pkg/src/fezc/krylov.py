"""Preconditioned conjugate gradients with a fixed operation order."""

import numpy as np


def pcg(apply_a, b, apply_minv, rtol=1e-10, maxiter=None, x0=None):
    """Solve ``A x = b`` for SPD ``A``.

    Stops once ``||r|| <= rtol * ||b||``.  Returns ``(x, iterations, converged)``.
    """
    b = np.asarray(b, dtype=np.float64)
    n = b.size
    maxiter = 10 * n if maxiter is None else maxiter
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64)
    r = b - apply_a(x) if x0 is not None else b.copy()
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return x, 0, True
    target = rtol * bnorm
    if np.linalg.norm(r) <= target:
        return x, 0, True
    z = apply_minv(r)
    p = z.copy()
    rz = r.dot(z)
    for it in range(1, maxiter + 1):
        q = apply_a(p)
        pq = p.dot(q)
        if pq <= 0.0:
            return x, it, False
        alpha = rz / pq
        x += alpha * p
        r -= alpha * q
        if np.linalg.norm(r) <= target:
            return x, it, True
        z = apply_minv(r)
        rz_new = r.dot(z)
        p *= rz_new / rz
        p += z
        rz = rz_new
    return x, maxiter, False
