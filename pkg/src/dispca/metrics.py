"""Subspace comparison metrics.

Principal angles between two column-orthonormal bases come from the singular
values of their cross-Gram matrix; the geodesic distance on the Grassmann
manifold is the root sum of squares of those angles. It is the natural way
to score how far a distributed estimate drifted from the centralized one.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError, NotOrthonormalError
from .matrix import thin_svd
from .pca import Subspace

BASIS_TOL = 1e-8


def _as_basis(b, name: str) -> np.ndarray:
    if isinstance(b, Subspace):
        return b.basis
    arr = np.asarray(b, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D basis matrix, got ndim={arr.ndim}")
    if arr.shape[1] < 1 or arr.shape[1] > arr.shape[0]:
        raise ValueError(f"{name} must be n x k with 1 <= k <= n, got {arr.shape}")
    gram = arr.T @ arr
    if not np.allclose(gram, np.eye(arr.shape[1]), atol=BASIS_TOL):
        raise NotOrthonormalError(f"{name} columns are not orthonormal within {BASIS_TOL:g}")
    return arr


def principal_angles(a, b) -> np.ndarray:
    """Principal angles in radians between two subspaces, nondecreasing.

    Accepts Subspace objects or raw n x k arrays with orthonormal columns.
    The bases must share the ambient dimension n; the angle count is the
    smaller of the two subspace dimensions.
    """
    ba = _as_basis(a, "a")
    bb = _as_basis(b, "b")
    if ba.shape[0] != bb.shape[0]:
        raise DimensionMismatchError(
            f"ambient dimensions differ: {ba.shape[0]} vs {bb.shape[0]}"
        )
    cosines = thin_svd(ba.T @ bb).singular_values
    # roundoff can push cosines a hair above 1; arccos would return nan
    cosines = np.clip(cosines, 0.0, 1.0)
    angles = np.arccos(cosines)
    return np.sort(angles)


def geodesic_distance(a, b) -> float:
    """Grassmann geodesic distance: sqrt of the sum of squared principal angles.

    Defined only for subspaces of equal dimension; 0 means identical spans
    and the maximum for k-dimensional subspaces is pi/2 * sqrt(k).
    """
    ba = _as_basis(a, "a")
    bb = _as_basis(b, "b")
    if ba.shape[1] != bb.shape[1]:
        raise DimensionMismatchError(
            f"geodesic distance needs equal subspace dimensions, got k={ba.shape[1]} vs k={bb.shape[1]}"
        )
    angles = principal_angles(ba, bb)
    return float(np.sqrt(np.sum(angles**2)))
