"""Independent reference computations used only by the tests."""

import math

import numpy as np


def expm_ref(M, terms=30):
    """Matrix exponential by scaling and squaring with a truncated Taylor series."""
    M = np.asarray(M, dtype=float)
    norm = np.abs(M).sum(axis=1).max() if M.size else 0.0
    k = max(0, int(math.ceil(math.log2(norm / 0.5))) + 1) if norm > 0.5 else 0
    X = M / 2.0**k
    out = np.eye(M.shape[0])
    term = np.eye(M.shape[0])
    for n in range(1, terms):
        term = term @ X / n
        out = out + term
    for _ in range(k):
        out = out @ out
    return out


def null_ref(M, rtol=1e-9):
    """Orthonormal nullspace basis (columns) from the SVD."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    _, s, vt = np.linalg.svd(M)
    top = s[0] if s.size else 0.0
    r = int(np.sum(s > rtol * max(top, 1e-300))) if top > 0 else 0
    return vt[r:].T


def same_span(U, V, tol=1e-9):
    """Column spans of U and V coincide (dimension and mutual containment)."""
    U = np.asarray(U, dtype=float).reshape(3, -1)
    V = np.asarray(V, dtype=float).reshape(3, -1)
    if U.shape[1] != V.shape[1]:
        return False
    if U.shape[1] == 0:
        return True
    Qu, _ = np.linalg.qr(U)
    Qv, _ = np.linalg.qr(V)
    return (np.abs(V - Qu @ (Qu.T @ V)).max() <= tol * max(1.0, np.abs(V).max())
            and np.abs(U - Qv @ (Qv.T @ U)).max() <= tol * max(1.0, np.abs(U).max()))


def derivation_matrix(a, b, c, d, e, f):
    return np.array([[a, b, 0.0], [c, d, 0.0], [e, f, a + d]])


def rk4_ref(D, t, g, steps):
    """Plain RK4 on the linear system v' = D v, written independently of the package."""
    v = np.asarray(g, dtype=float)
    h = t / steps
    for _ in range(steps):
        k1 = D @ v
        k2 = D @ (v + 0.5 * h * k1)
        k3 = D @ (v + 0.5 * h * k2)
        k4 = D @ (v + h * k3)
        v = v + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return v
