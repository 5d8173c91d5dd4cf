"""Independent oracles shared by the test modules.

These deliberately avoid the library's own code paths (and where possible
numpy's high-level linear algebra) so that agreement is evidence, not
tautology.
"""

from __future__ import annotations

import math

import numpy as np


def naive_matmul(a, b):
    """Triple-loop matrix product."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m, inner = a.shape
    inner2, n = b.shape
    assert inner == inner2
    out = np.zeros((m, n))
    for i in range(m):
        for j in range(n):
            acc = 0.0
            for t in range(inner):
                acc += a[i, t] * b[t, j]
            out[i, j] = acc
    return out


def random_orthonormal(rng, n, k):
    """Random n x k matrix with orthonormal columns (QR of a Gaussian)."""
    q, _ = np.linalg.qr(rng.normal(size=(n, k)))
    return q[:, :k]


def spectrum_matrix(rng, m, n, singular_values):
    """Matrix with a prescribed singular spectrum and random factors."""
    sv = np.asarray(singular_values, dtype=float)
    p = sv.size
    u = random_orthonormal(rng, m, p)
    v = random_orthonormal(rng, n, p)
    return (u * sv) @ v.T


def low_rank_plus_noise(rng, m, n, singular_values, noise):
    return spectrum_matrix(rng, m, n, singular_values) + noise * rng.normal(size=(m, n))


def deflation_angles(a, b, tol=1e-13, max_iter=500_000, seed=123):
    """Principal angles by greedy deflation.

    Solves the sequential maximization of u^T (A^T B) v over unit vectors
    orthogonal to the previously found directions, using power iteration on
    the deflated cross-Gram matrix -- no SVD anywhere. Returns angles sorted
    nondecreasing.
    """
    work = np.asarray(a).T @ np.asarray(b)
    k = min(work.shape)
    rng = np.random.default_rng(seed)
    angles = []
    for _ in range(k):
        v = rng.normal(size=work.shape[1])
        v /= np.linalg.norm(v)
        sigma_prev = np.inf
        sigma = 0.0
        for _ in range(max_iter):
            u = work @ v
            nu = np.linalg.norm(u)
            if nu < 1e-200:
                sigma = 0.0
                break
            u = u / nu
            v = work.T @ u
            nv = np.linalg.norm(v)
            if nv < 1e-200:
                sigma = 0.0
                break
            v = v / nv
            sigma = float(u @ work @ v)
            if abs(sigma - sigma_prev) < tol:
                break
            sigma_prev = sigma
        sigma = min(max(sigma, 0.0), 1.0)
        angles.append(math.acos(sigma))
        if sigma > 0.0:
            work = work - sigma * np.outer(u, v)
        else:
            # remaining directions are orthogonal: fill with right angles
            while len(angles) < k:
                angles.append(math.pi / 2.0)
            break
    return np.sort(np.array(angles))


def naive_roc_points(scores, labels):
    """Per-threshold counting with explicit loops: the ROC oracle."""
    scores = list(map(float, scores))
    labels = list(map(bool, labels))
    pos = sum(labels)
    neg = len(labels) - pos
    thresholds = [math.inf] + sorted(set(scores), reverse=True) + [-math.inf]
    points = []
    for t in thresholds:
        tp = fp = 0
        for sc, lab in zip(scores, labels):
            if sc > t:
                if lab:
                    tp += 1
                else:
                    fp += 1
        points.append((fp / neg, tp / pos, t))
    return points


def naive_residual_scores(x, basis):
    """Row-by-row projector-based residual scoring."""
    x = np.asarray(x, dtype=float)
    basis = np.asarray(basis, dtype=float)
    projector = np.eye(basis.shape[0]) - basis @ basis.T
    out = []
    for row in x:
        r = projector @ row
        out.append(float(r @ r))
    return np.array(out)


def frobenius(x) -> float:
    x = np.asarray(x, dtype=float)
    return math.sqrt(float(np.sum(x * x)))
