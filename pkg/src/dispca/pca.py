"""Centralized PCA subspace method.

Fits principal components of a column-centered matrix, picks the principal
subspace dimension by a cumulative-variance threshold, splits data into its
normal and residual parts, and scores rows by squared residual norm.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatchError, NotCenteredError, NotOrthonormalError
from .matrix import ORTHO_TOL, DataMatrix, as_matrix, thin_svd

# Absorbs float dust when a cumulative fraction sits exactly on the threshold.
_THRESHOLD_SLACK = 1e-12


@dataclass(frozen=True)
class PcaModel:
    """Principal components of a centered matrix.

    components is n x q with one PC per column, ordered by singular value
    descending; variance_fractions[i] is the share of total variance carried
    by PC i and sums to 1.
    """

    components: np.ndarray
    singular_values: np.ndarray
    variance_fractions: np.ndarray


@dataclass(frozen=True)
class Subspace:
    """Column-orthonormal basis of a k-dimensional subspace of R^n."""

    basis: np.ndarray

    def __post_init__(self) -> None:
        basis = np.asarray(self.basis, dtype=np.float64)
        if basis.ndim != 2:
            raise DimensionMismatchError("subspace basis must be 2-D")
        n, k = basis.shape
        if not 1 <= k <= n:
            raise DimensionMismatchError(f"subspace dimension k={k} invalid for ambient n={n}")
        gram = basis.T @ basis
        if np.max(np.abs(gram - np.eye(k))) > ORTHO_TOL:
            raise NotOrthonormalError(f"basis is not column-orthonormal within {ORTHO_TOL}")
        object.__setattr__(self, "basis", basis)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def k(self) -> int:
        return self.basis.shape[1]


class ScreeRow(NamedTuple):
    rank: int
    variance: float
    cumulative_fraction: float


def fit_pca(m) -> PcaModel:
    """Fit principal components of a column-centered matrix.

    Centering is the caller's responsibility; a matrix whose column means
    exceed 1e-8 of its largest entry magnitude is rejected, so that the
    centering policy stays an explicit protocol choice.
    """
    x = as_matrix(m)
    scale = np.max(np.abs(x))
    if np.max(np.abs(x.mean(axis=0))) > 1e-8 * scale:
        raise NotCenteredError("matrix columns are not centered; call center_columns first")
    result = thin_svd(x)
    total = float(np.sum(result.singular_values**2))
    if total == 0.0:
        raise ValueError("cannot fit PCA: matrix has no variance")
    fractions = result.singular_values**2 / total
    return PcaModel(
        components=result.right,
        singular_values=result.singular_values,
        variance_fractions=fractions,
    )


def select_dimension(model: PcaModel, threshold: float) -> int:
    """Smallest k whose top-k PCs capture at least `threshold` of the variance."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"variance threshold must be in (0, 1], got {threshold}")
    cumulative = np.cumsum(model.variance_fractions)
    hits = np.nonzero(cumulative >= threshold - _THRESHOLD_SLACK)[0]
    if hits.size == 0:
        return int(model.variance_fractions.size)
    return int(hits[0]) + 1


def scree(model: PcaModel) -> list[ScreeRow]:
    """Per-rank variance (sigma_i^2) and cumulative variance fraction."""
    variances = model.singular_values**2
    cumulative = np.cumsum(model.variance_fractions)
    return [
        ScreeRow(rank=i + 1, variance=float(variances[i]), cumulative_fraction=float(cumulative[i]))
        for i in range(variances.size)
    ]


def principal_subspace(model: PcaModel, k: int) -> Subspace:
    """Top-k principal components as a Subspace."""
    q = model.components.shape[1]
    if not 1 <= k <= q:
        raise DimensionMismatchError(f"k={k} out of range 1..{q}")
    return Subspace(model.components[:, :k].copy())


def _residual(x: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return x - (x @ basis) @ basis.T


def decompose(m, sub: Subspace) -> tuple[DataMatrix, DataMatrix]:
    """Split rows into the part inside the subspace and the residual part."""
    x = as_matrix(m)
    if x.shape[1] != sub.ambient_dim:
        raise DimensionMismatchError(
            f"matrix has {x.shape[1]} columns but subspace lives in R^{sub.ambient_dim}"
        )
    residual = _residual(x, sub.basis)
    names = m.col_names if isinstance(m, DataMatrix) else None
    return DataMatrix(x - residual, names), DataMatrix(residual, names)


def residual_scores(m, sub: Subspace) -> np.ndarray:
    """Squared Euclidean norm of each row's residual part."""
    x = as_matrix(m)
    if x.shape[1] != sub.ambient_dim:
        raise DimensionMismatchError(
            f"matrix has {x.shape[1]} columns but subspace lives in R^{sub.ambient_dim}"
        )
    residual = _residual(x, sub.basis)
    return np.einsum("ij,ij->i", residual, residual)
