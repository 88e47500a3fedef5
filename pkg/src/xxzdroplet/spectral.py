"""Eigensolvers and subspace machinery for the droplet band.

The droplet band is a cluster of L-n+1 exponentially close eigenvalues, so
the iterative path uses Lanczos with full reorthogonalization (ghost
eigenvalues appear without it) and a deterministic seeded start vector.
Subspace comparisons go through orthonormal spanning sets obtained from the
Gram matrix of the non-orthogonal droplet family.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import SectorBasis, SectorVector
from .operators import HamiltonianHandle, _apply_terms, assemble_dense
from .qcore import AnisotropyParams
from .states import DropletSpec, build_droplet, droplet_positions

__all__ = [
    "EigenResult",
    "ConvergenceError",
    "RankDeficiencyError",
    "DropletFamily",
    "SubspaceProjector",
    "eig_dense",
    "eig_lowest",
    "gram_projector",
    "frame_operator_dense",
    "projector_distance",
    "rayleigh",
]


@dataclass
class EigenResult:
    """Ascending eigenvalues with optional eigenvector columns and residuals."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    residuals: np.ndarray | None
    solver: str
    tol: float


class ConvergenceError(RuntimeError):
    """Iteration cap reached; carries the best available partial result."""

    def __init__(self, message: str, partial: EigenResult):
        super().__init__(message)
        self.partial = partial


class RankDeficiencyError(ValueError):
    """Gram matrix numerically singular: the family does not span its count."""


def eig_dense(h: HamiltonianHandle, sector: SectorBasis, want_vectors: bool = False,
              cap: int | None = None) -> EigenResult:
    """Full spectrum on the sector via a dense symmetric eigensolver."""
    H = assemble_dense(h, sector, cap=cap)
    if want_vectors:
        vals, vecs = np.linalg.eigh(H)
        res = np.linalg.norm(H @ vecs - vecs * vals, axis=0)
        return EigenResult(vals, vecs, res, "dense", 0.0)
    vals = np.linalg.eigvalsh(H)
    return EigenResult(vals, None, None, "dense", 0.0)


def _ritz_converged(alphas, betas, k, tol):
    """Residual estimates |beta_m s_km| for the k lowest Ritz pairs."""
    m = len(alphas)
    T = np.diag(alphas) + np.diag(betas[: m - 1], 1) + np.diag(betas[: m - 1], -1)
    theta, S = np.linalg.eigh(T)
    est = abs(betas[m - 1]) * np.abs(S[-1, :k])
    return theta, S, bool(np.all(est <= tol))


def eig_lowest(h: HamiltonianHandle, sector: SectorBasis, k: int,
               tol: float = 1e-10, seed: int = 0,
               max_iter: int | None = None) -> EigenResult:
    """k lowest eigenpairs by Lanczos with full reorthogonalization.

    Deterministic for a fixed seed.  Raises ConvergenceError (carrying the
    partial result) if the iteration cap is hit before all k residuals drop
    below tol.
    """
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    if sector.interval != h.interval:
        raise ValueError(
            f"basis interval {sector.interval} does not match operator interval {h.interval}"
        )
    dim = sector.dim
    if dim < k:
        raise ValueError(f"sector dimension {dim} smaller than k={k}")
    bonds, fields = h.terms()
    off = -0.5 / h.params.delta

    def matvec(x):
        return _apply_terms(sector, bonds, fields, off, x)

    cap = min(dim, max(40 * k, 400)) if max_iter is None else min(dim, max_iter)
    rng = np.random.default_rng(seed)

    Q = np.zeros((dim, cap))
    alphas: list[float] = []
    betas: list[float] = []
    q = rng.standard_normal(dim)
    q /= np.linalg.norm(q)
    Q[:, 0] = q
    m = 0
    while m < cap:
        u = matvec(Q[:, m])
        alpha = float(Q[:, m] @ u)
        alphas.append(alpha)
        r = u - alpha * Q[:, m]
        if m > 0:
            r -= betas[m - 1] * Q[:, m - 1]
        # full reorthogonalization, applied twice
        r -= Q[:, : m + 1] @ (Q[:, : m + 1].T @ r)
        r -= Q[:, : m + 1] @ (Q[:, : m + 1].T @ r)
        beta = float(np.linalg.norm(r))
        m += 1
        if m >= k and (m == dim or m == cap or beta <= 1e-14 or m % 5 == 0):
            _, _, done = _ritz_converged(np.array(alphas), np.array(betas + [beta]), k, tol)
            if done or m == dim:
                break
        if m == cap:
            break
        if beta <= 1e-14:
            # Krylov space exhausted; restart in the orthogonal complement
            q = rng.standard_normal(dim)
            q -= Q[:, :m] @ (Q[:, :m].T @ q)
            q -= Q[:, :m] @ (Q[:, :m].T @ q)
            nq = np.linalg.norm(q)
            if nq < 1e-12:
                break
            betas.append(0.0)
            Q[:, m] = q / nq
        else:
            betas.append(beta)
            Q[:, m] = r / beta

    T = np.diag(alphas) + np.diag(betas[: m - 1], 1) + np.diag(betas[: m - 1], -1)
    theta, S = np.linalg.eigh(T)
    vecs = Q[:, :m] @ S[:, :k]
    vals = theta[:k].copy()
    res = np.empty(k)
    for i in range(k):
        nv = np.linalg.norm(vecs[:, i])
        vecs[:, i] /= nv
        res[i] = np.linalg.norm(matvec(vecs[:, i]) - vals[i] * vecs[:, i])
    result = EigenResult(vals, vecs, res, "iterative", tol)
    if np.any(res > tol):
        raise ConvergenceError(
            f"Lanczos did not reach tol={tol} within {m} iterations "
            f"(worst residual {res.max():.3e})",
            result,
        )
    return result


@dataclass
class DropletFamily:
    """The droplet states of one sector with their normalized Gram matrix."""

    length: int
    n_down: int
    params: AnisotropyParams
    positions: list[int]
    members: list[SectorVector] = field(repr=False)
    gram: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, length: int, n_down: int, params: AnisotropyParams) -> "DropletFamily":
        positions = list(droplet_positions(length, n_down))
        members = [
            build_droplet(DropletSpec(length, n_down, x, params)) for x in positions
        ]
        M = cls._normalized(members)
        return cls(length, n_down, params, positions, members, M.T @ M)

    @staticmethod
    def _normalized(members) -> np.ndarray:
        M = np.stack([v.amplitudes for v in members], axis=1)
        return M / np.linalg.norm(M, axis=0)

    def normalized_matrix(self) -> np.ndarray:
        """dim x m matrix whose columns are the unit droplet states."""
        return self._normalized(self.members)

    @property
    def basis(self) -> SectorBasis:
        return self.members[0].basis


@dataclass
class SubspaceProjector:
    """Orthogonal projector stored as an orthonormal spanning set."""

    basis: SectorBasis
    columns: np.ndarray

    @property
    def rank(self) -> int:
        return self.columns.shape[1]

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.columns @ (self.columns.T @ v)

    def matrix(self) -> np.ndarray:
        return self.columns @ self.columns.T

    @classmethod
    def from_vectors(cls, basis: SectorBasis, vectors: np.ndarray,
                     assume_orthonormal: bool = False) -> "SubspaceProjector":
        if assume_orthonormal:
            return cls(basis, np.asarray(vectors, dtype=np.float64))
        qmat, _ = np.linalg.qr(np.asarray(vectors, dtype=np.float64))
        return cls(basis, qmat)


def gram_projector(family: DropletFamily, min_eig: float = 1e-12) -> SubspaceProjector:
    """Projector onto the droplet span via inverse-square-root whitening of
    the Gram matrix; raises RankDeficiencyError below min_eig."""
    w, U = np.linalg.eigh(family.gram)
    if w.min() <= min_eig:
        raise RankDeficiencyError(
            f"Gram matrix nearly singular: min eigenvalue {w.min():.3e}"
        )
    B = family.normalized_matrix() @ (U * (w**-0.5)) @ U.T
    return SubspaceProjector(family.basis, B)


def frame_operator_dense(family: DropletFamily) -> np.ndarray:
    """Sum of the rank-1 projectors onto the normalized family members."""
    M = family.normalized_matrix()
    return M @ M.T


def projector_distance(p: SubspaceProjector, q: SubspaceProjector) -> float:
    """Spectral norm ||P - Q|| via the cross-Gram block C = B_P^T B_Q.

    ||(1-Q)P|| is the largest singular value of B_P - B_Q C^T (and
    symmetrically for ||(1-P)Q||); this form stays accurate near zero where
    1 - sigma_min(C)^2 would cancel catastrophically.
    """
    if p.basis.dim != q.basis.dim:
        raise ValueError("projectors live on different sector dimensions")
    C = p.columns.T @ q.columns
    d1 = float(np.linalg.norm(p.columns - q.columns @ C.T, 2))
    d2 = float(np.linalg.norm(q.columns - p.columns @ C, 2))
    return max(d1, d2)


def rayleigh(v: SectorVector, h: HamiltonianHandle) -> float:
    """<v, H v> / <v, v>."""
    nrm2 = v.dot(v)
    if nrm2 == 0.0:
        raise ValueError("Rayleigh quotient of the zero vector")
    bonds, fields = h.terms()
    hv = _apply_terms(v.basis, bonds, fields, -0.5 / h.params.delta, v.amplitudes)
    return float(v.amplitudes @ hv) / nrm2
