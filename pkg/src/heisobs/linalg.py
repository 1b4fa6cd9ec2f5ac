"""Small dense linear algebra: rank-revealing row reduction and subspaces.

Everything here works on matrices with three columns or fewer rows than a
few dozen, so clarity wins over blocking or LAPACK calls. The elimination is
Gauss-Jordan with partial pivoting; a pivot counts as zero when it falls
below ``rtol`` times the largest row norm of the input.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)

RANK_RTOL = 1e-9
MEMBER_TOL = 1e-9


@dataclass(frozen=True)
class Elimination:
    rref: np.ndarray
    pivots: tuple[int, ...]
    tol: float
    fragile: bool

    @property
    def rank(self) -> int:
        return len(self.pivots)


def row_reduce(M, rtol: float = RANK_RTOL) -> Elimination:
    """Reduced row echelon form of ``M`` with a relative pivot tolerance.

    ``fragile`` is set when some singular value of ``M`` lies within a factor
    of ten of the absolute tolerance, i.e. when the rank decision could flip
    under a small perturbation of the input.
    """
    M = np.array(M, dtype=float, ndmin=2)
    if M.size == 0:
        return Elimination(M.copy(), (), 0.0, False)
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    row_norms = np.linalg.norm(M, axis=1)
    scale = float(row_norms.max())
    tol = rtol * scale
    R = M.copy()
    n_rows, n_cols = R.shape
    pivots = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        p = r + int(np.argmax(np.abs(R[r:, c])))
        if abs(R[p, c]) <= tol:
            R[r:, c] = 0.0
            continue
        if p != r:
            R[[r, p]] = R[[p, r]]
        R[r] /= R[r, c]
        for i in range(n_rows):
            if i != r and R[i, c] != 0.0:
                R[i] -= R[i, c] * R[r]
        R[r, c] = 1.0
        pivots.append(c)
        r += 1
    R[r:] = 0.0

    fragile = False
    if scale > 0.0:
        sv = np.linalg.svd(M, compute_uv=False)
        fragile = bool(np.any((sv >= tol / 10.0) & (sv <= tol * 10.0)))
        if fragile:
            logger.warning("rank decision near tolerance %.3g: singular values %s", tol, sv)
    return Elimination(R, tuple(pivots), tol, fragile)


def rank(M, rtol: float = RANK_RTOL) -> int:
    return row_reduce(M, rtol).rank


def nullspace_basis(M, rtol: float = RANK_RTOL) -> np.ndarray:
    """Rows spanning the right nullspace of ``M`` (not orthonormalised)."""
    return _free_vectors(row_reduce(M, rtol))


def _free_vectors(elim: Elimination) -> np.ndarray:
    n_cols = elim.rref.shape[1]
    free = [c for c in range(n_cols) if c not in elim.pivots]
    basis = np.zeros((len(free), n_cols))
    for k, fc in enumerate(free):
        basis[k, fc] = 1.0
        for row, pc in enumerate(elim.pivots):
            basis[k, pc] = -elim.rref[row, fc]
    return basis


def _orthonormalize(vectors: np.ndarray, n: int) -> np.ndarray:
    vectors = np.asarray(vectors, dtype=float).reshape(-1, n)
    basis: list[np.ndarray] = []
    for v in vectors:
        w = v.copy()
        # two passes of modified Gram-Schmidt keep orthogonality at roundoff
        for _ in range(2):
            for b in basis:
                w -= (b @ w) * b
        nrm = np.linalg.norm(w)
        if nrm > MEMBER_TOL * max(1.0, float(np.linalg.norm(v))):
            basis.append(w / nrm + 0.0)  # + 0.0 clears negative zeros
    return np.array(basis).reshape(len(basis), n)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear subspace of R^n held as an orthonormal row basis."""

    basis: np.ndarray
    n: int = 3
    fragile: bool = field(default=False, compare=False)

    @classmethod
    def span(cls, vectors, n: int = 3) -> "Subspace":
        return cls(_orthonormalize(vectors, n), n)

    @classmethod
    def zero(cls, n: int = 3) -> "Subspace":
        return cls(np.zeros((0, n)), n)

    @classmethod
    def full(cls, n: int = 3) -> "Subspace":
        return cls(np.eye(n), n)

    @classmethod
    def nullspace(cls, M, rtol: float = RANK_RTOL) -> "Subspace":
        M = np.array(M, dtype=float, ndmin=2)
        elim = row_reduce(M, rtol)
        return cls(_orthonormalize(_free_vectors(elim), M.shape[1]), M.shape[1], elim.fragile)

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    def project(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        return (v @ self.basis.T) @ self.basis

    def residual(self, v) -> float:
        v = np.asarray(v, dtype=float)
        return float(np.linalg.norm(v - self.project(v)))

    def contains(self, v, tol: float = MEMBER_TOL) -> bool:
        v = np.asarray(v, dtype=float)
        return self.residual(v) <= tol * max(1.0, float(np.linalg.norm(v)))

    def contains_subspace(self, other: "Subspace", tol: float = MEMBER_TOL) -> bool:
        return all(self.contains(b, tol) for b in other.basis)

    def equals(self, other: "Subspace", tol: float = MEMBER_TOL) -> bool:
        return (
            self.dim == other.dim
            and self.contains_subspace(other, tol)
            and other.contains_subspace(self, tol)
        )

    def complement(self) -> "Subspace":
        if self.dim == 0:
            return Subspace.full(self.n)
        return Subspace.nullspace(self.basis)

    def intersect(self, other: "Subspace") -> "Subspace":
        constraints = np.vstack([self.complement().basis, other.complement().basis])
        if constraints.shape[0] == 0:
            return Subspace.full(self.n)
        return Subspace.nullspace(constraints)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "basis": self.basis.tolist()}

    @classmethod
    def from_dict(cls, data: dict, n: int = 3) -> "Subspace":
        basis = np.array(data["basis"], dtype=float).reshape(-1, n)
        return cls(basis, n)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.basis, other.basis)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, basis={self.basis.tolist()})"
