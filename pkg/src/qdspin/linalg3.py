"""Dedicated eigensolver for real symmetric 3x3 matrices (cyclic Jacobi).

The correlation-measure formulas only ever need spectra of 3x3 symmetric
matrices, so a small fixed-size solver is used instead of a general
eigenroutine.  Accuracy is ~1e-14 relative after a handful of sweeps.
"""
from __future__ import annotations

import math

import numpy as np

_PAIRS = ((0, 1), (0, 2), (1, 2))


def eigh3(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric 3x3.

    Returns (w, v) with v[:, k] the eigenvector for w[k].  The input is
    symmetrized; asymmetries beyond round-off are the caller's bug.
    """
    a = np.asarray(mat, dtype=float)
    if a.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {a.shape}")
    a = 0.5 * (a + a.T)
    v = np.eye(3)
    scale = max(1.0, float(np.abs(a).max()))
    for _ in range(64):
        off = math.sqrt(a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2)
        if off <= 1e-15 * scale:
            break
        for p, q in _PAIRS:
            apq = a[p, q]
            if abs(apq) <= 1e-18 * scale:
                continue
            theta = 0.5 * (a[q, q] - a[p, p]) / apq
            t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
            c = 1.0 / math.sqrt(t * t + 1.0)
            s = t * c
            # two-sided rotation in the (p, q) plane
            app, aqq = a[p, p], a[q, q]
            a[p, p] = app - t * apq
            a[q, q] = aqq + t * apq
            a[p, q] = a[q, p] = 0.0
            r = 3 - p - q  # remaining index
            arp, arq = a[r, p], a[r, q]
            a[r, p] = a[p, r] = c * arp - s * arq
            a[r, q] = a[q, r] = s * arp + c * arq
            vp = v[:, p].copy()
            v[:, p] = c * vp - s * v[:, q]
            v[:, q] = s * vp + c * v[:, q]
    w = np.diag(a).copy()
    order = np.argsort(w)
    return w[order], v[:, order]


def eigvals3(mat: np.ndarray) -> np.ndarray:
    """Eigenvalues of a symmetric 3x3, ascending."""
    return eigh3(mat)[0]


def max_eigenpair(mat: np.ndarray, degeneracy_gap: float = 1e-10) -> tuple[float, list[np.ndarray], bool]:
    """Largest eigenvalue with every eigenvector of its (near-)degenerate cluster.

    Returns (k_max, vectors, degenerate) where `vectors` holds all unit
    eigenvectors whose eigenvalue lies within `degeneracy_gap` of the top.
    """
    w, v = eigh3(mat)
    k_max = w[2]
    vectors = [v[:, i] for i in range(3) if k_max - w[i] < degeneracy_gap]
    return float(k_max), vectors[::-1], len(vectors) > 1
