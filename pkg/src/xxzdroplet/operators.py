"""Sector-restricted XXZ Hamiltonians and projectors, applied matrix-free.

A chain Hamiltonian is a sum of nearest-neighbour bond terms plus optional
boundary fields.  Expanding the bond interaction, each anti-aligned bond
contributes 1/2 on the diagonal and the exchange couples the two swapped
configurations with -1/(2 Delta); a field c * S^3_x adds c * (1/2 - bit_x) to
the diagonal.  All operators conserve the number of down spins, so everything
acts inside one SectorBasis.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .basis import SectorBasis, SectorVector
from .qcore import AnisotropyParams

__all__ = [
    "BoundarySpec",
    "HamiltonianHandle",
    "GeneralizedSectorProjector",
    "DenseCapExceeded",
    "dense_cap",
    "apply_hamiltonian",
    "assemble_dense",
    "cut_identity_residual",
    "translate",
    "translation_permutation",
    "apply_projector",
    "projector_keep_mask",
    "polarized_keep_masks",
    "apply_polarized",
    "g_projector",
    "double_commutator_apply",
    "double_commutator_dense",
]

_DENSE_CAP_DEFAULT = 20_000
_DENSE_CAP_ENV = "XXZ_DENSE_CAP"

_BC_CODES = {
    "+-": (1, -1),
    "-+": (-1, 1),
    "++": (1, 1),
    "--": (-1, -1),
    "00": (0, 0),
}


class DenseCapExceeded(ValueError):
    """Sector dimension exceeds the dense-assembly cap."""


def dense_cap(override: int | None = None) -> int:
    if override is not None:
        return int(override)
    env = os.environ.get(_DENSE_CAP_ENV)
    return int(env) if env else _DENSE_CAP_DEFAULT


@dataclass(frozen=True)
class BoundarySpec:
    """Boundary fields (alpha, beta) in {-1,0,+1} at the two chain ends, or a
    periodic wrap bond instead of any fields."""

    alpha: int = 0
    beta: int = 0
    periodic: bool = False

    def __post_init__(self):
        if self.periodic:
            if self.alpha or self.beta:
                raise ValueError("periodic boundary carries no fields")
        elif self.alpha not in (-1, 0, 1) or self.beta not in (-1, 0, 1):
            raise ValueError("boundary fields must be -1, 0 or +1")

    @classmethod
    def open_fields(cls, alpha: int, beta: int) -> "BoundarySpec":
        return cls(alpha=alpha, beta=beta)

    @classmethod
    def ring(cls) -> "BoundarySpec":
        return cls(periodic=True)

    @classmethod
    def from_code(cls, code: str) -> "BoundarySpec":
        if code == "ring":
            return cls.ring()
        if code in _BC_CODES:
            a, b = _BC_CODES[code]
            return cls(alpha=a, beta=b)
        raise ValueError(f"unknown boundary code {code!r}")

    @property
    def code(self) -> str:
        if self.periodic:
            return "ring"
        sym = {1: "+", 0: "0", -1: "-"}
        return sym[self.alpha] + sym[self.beta]


@dataclass(frozen=True)
class HamiltonianHandle:
    """Matrix-free Hamiltonian for one chain interval and boundary spec."""

    interval: tuple[int, int]
    boundary: BoundarySpec
    params: AnisotropyParams

    def __post_init__(self):
        a, b = self.interval
        if a > b:
            raise ValueError(f"empty interval [{a},{b}]")
        if self.boundary.periodic and b - a + 1 < 3:
            raise ValueError("ring needs at least 3 sites")

    @property
    def length(self) -> int:
        a, b = self.interval
        return b - a + 1

    def terms(self) -> tuple[list[tuple[int, int]], list[tuple[int, float]]]:
        """(bonds, fields) in bit offsets relative to the interval start."""
        L = self.length
        bonds = [(i, i + 1) for i in range(L - 1)]
        fields: list[tuple[int, float]] = []
        if self.boundary.periodic:
            bonds.append((L - 1, 0))
        else:
            A = self.params.a_field
            if self.boundary.alpha:
                fields.append((0, -A * self.boundary.alpha))
            if self.boundary.beta:
                fields.append((L - 1, -A * self.boundary.beta))
        return bonds, fields


def _check_sector(h: HamiltonianHandle, basis: SectorBasis):
    if basis.interval != h.interval:
        raise ValueError(
            f"basis interval {basis.interval} does not match operator interval {h.interval}"
        )


def _apply_terms(basis, bonds, fields, off_coef, amps):
    M = basis.masks
    out = np.zeros_like(amps)
    diag = np.zeros(basis.dim)
    one = np.uint64(1)
    for i, j in bonds:
        bi = (M >> np.uint64(i)) & one
        bj = (M >> np.uint64(j)) & one
        anti = bi != bj
        if anti.any():
            diag[anti] += 0.5
            flip = M[anti] ^ np.uint64((1 << i) | (1 << j))
            out[basis.index_of(flip)] += off_coef * amps[anti]
    for i, coef in fields:
        bit = ((M >> np.uint64(i)) & one).astype(np.float64)
        diag += coef * (0.5 - bit)
    out += diag * amps
    return out


def _dense_terms(basis, bonds, fields, off_coef):
    D = basis.dim
    M = basis.masks
    H = np.zeros((D, D))
    diag = np.zeros(D)
    one = np.uint64(1)
    cols = np.arange(D)
    for i, j in bonds:
        bi = (M >> np.uint64(i)) & one
        bj = (M >> np.uint64(j)) & one
        anti = bi != bj
        if anti.any():
            diag[anti] += 0.5
            flip = M[anti] ^ np.uint64((1 << i) | (1 << j))
            H[basis.index_of(flip), cols[anti]] += off_coef
    for i, coef in fields:
        bit = ((M >> np.uint64(i)) & one).astype(np.float64)
        diag += coef * (0.5 - bit)
    H[cols, cols] += diag
    return H


def apply_hamiltonian(h: HamiltonianHandle, v: SectorVector) -> SectorVector:
    """w = H v, matrix-free."""
    _check_sector(h, v.basis)
    bonds, fields = h.terms()
    off = -0.5 / h.params.delta
    return SectorVector(v.basis, _apply_terms(v.basis, bonds, fields, off, v.amplitudes))


def assemble_dense(h: HamiltonianHandle, sector: SectorBasis, cap: int | None = None) -> np.ndarray:
    """Dense symmetric matrix of H on the sector; refuses above the cap."""
    _check_sector(h, sector)
    limit = dense_cap(cap)
    if sector.dim > limit:
        raise DenseCapExceeded(
            f"sector dimension {sector.dim} exceeds dense cap {limit}"
        )
    bonds, fields = h.terms()
    return _dense_terms(sector, bonds, fields, -0.5 / h.params.delta)


def _embedded_terms(chain: tuple[int, int], sub: tuple[int, int], alpha: int, beta: int,
                    a_field: float):
    """Terms of H^{alpha beta}_{sub} acting on the larger chain interval."""
    ca, cb = chain
    s, t = sub
    if s < ca or t > cb or s > t:
        raise ValueError(f"subinterval [{s},{t}] outside chain [{ca},{cb}]")
    bonds = [(i, i + 1) for i in range(s - ca, t - ca)]
    fields = []
    if alpha:
        fields.append((s - ca, -a_field * alpha))
    if beta:
        fields.append((t - ca, -a_field * beta))
    return bonds, fields


def embedded_dense(chain_basis: SectorBasis, sub: tuple[int, int], alpha: int, beta: int,
                   params: AnisotropyParams) -> np.ndarray:
    """Dense H^{alpha beta}_{sub} (x) identity on the chain sector basis."""
    bonds, fields = _embedded_terms(chain_basis.interval, sub, alpha, beta, params.a_field)
    return _dense_terms(chain_basis, bonds, fields, -0.5 / params.delta)


def embedded_apply(chain_basis: SectorBasis, sub: tuple[int, int], alpha: int, beta: int,
                   params: AnisotropyParams, v: SectorVector) -> SectorVector:
    """Matrix-free H^{alpha beta}_{sub} (x) identity applied on the chain."""
    bonds, fields = _embedded_terms(chain_basis.interval, sub, alpha, beta, params.a_field)
    return SectorVector(
        chain_basis,
        _apply_terms(chain_basis, bonds, fields, -0.5 / params.delta, v.amplitudes),
    )


def cut_identity_residual(L: int, x: int, params: AnisotropyParams, n: int,
                          cap: int | None = None) -> float:
    """Operator-norm discrepancy of the three droplet-chain cuts at site x.

    Compares H^{++}_{[1,L]} on sector n against
      H^{+-}_{[1,x]} + H^{++}_{x,x+1} + H^{-+}_{[x+1,L]},
      H^{+-}_{[1,x]} + H^{++}_{[x,L]}  and  H^{++}_{[1,x]} + H^{-+}_{[x,L]},
    all assembled densely; returns the largest spectral norm of a difference.
    """
    if not 1 <= x <= L - 1:
        raise ValueError(f"cut site must satisfy 1 <= x <= L-1, got {x}")
    basis = SectorBasis.build((1, L), n)
    limit = dense_cap(cap)
    if basis.dim > limit:
        raise DenseCapExceeded(f"sector dimension {basis.dim} exceeds dense cap {limit}")
    full = embedded_dense(basis, (1, L), 1, 1, params)
    three = (
        embedded_dense(basis, (1, x), 1, -1, params)
        + embedded_dense(basis, (x, x + 1), 1, 1, params)
        + embedded_dense(basis, (x + 1, L), -1, 1, params)
    )
    two_a = embedded_dense(basis, (1, x), 1, -1, params) + embedded_dense(basis, (x, L), 1, 1, params)
    two_b = embedded_dense(basis, (1, x), 1, 1, params) + embedded_dense(basis, (x, L), -1, 1, params)
    return max(
        float(np.linalg.norm(full - combo, 2)) for combo in (three, two_a, two_b)
    )


def translation_permutation(basis: SectorBasis) -> np.ndarray:
    """Index permutation realizing the cyclic site shift x -> x+1."""
    L = basis.length
    M = basis.masks
    full = np.uint64((1 << L) - 1)
    shifted = ((M << np.uint64(1)) | (M >> np.uint64(L - 1))) & full
    return basis.index_of(shifted)


def translate(v: SectorVector) -> SectorVector:
    """Unitary cyclic shift of site content by +1 (T^L = identity)."""
    out = np.zeros_like(v.amplitudes)
    out[translation_permutation(v.basis)] = v.amplitudes
    return SectorVector(v.basis, out)


@dataclass(frozen=True)
class GeneralizedSectorProjector:
    """Diagonal projector fixing the down-spin count on each partition part.

    Parts are adjacent intervals covering a contiguous block of sites; sites
    outside the block are unconstrained.  counts outside [0, part length]
    make the projector vanish identically (the standard vanishing-index
    convention), which is relied upon by the droplet-split projectors.
    """

    parts: tuple[tuple[int, int], ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.parts) != len(self.counts):
            raise ValueError("one count per part required")
        if not self.parts:
            raise ValueError("empty partition")
        for (a, b) in self.parts:
            if a > b:
                raise ValueError(f"empty part [{a},{b}]")
        for (a1, b1), (a2, b2) in zip(self.parts, self.parts[1:]):
            if a2 != b1 + 1:
                raise ValueError(
                    f"parts [{a1},{b1}] and [{a2},{b2}] leave a gap or overlap"
                )


def projector_keep_mask(p: GeneralizedSectorProjector, basis: SectorBasis) -> np.ndarray:
    """Boolean array marking configurations kept by the projector."""
    a0, b0 = basis.interval
    keep = np.ones(basis.dim, dtype=bool)
    for (lo, hi), c in zip(p.parts, p.counts):
        if lo < a0 or hi > b0:
            raise ValueError(f"part [{lo},{hi}] outside basis interval [{a0},{b0}]")
        if c < 0 or c > hi - lo + 1:
            keep[:] = False
            break
        pm = np.uint64(((1 << (hi - lo + 1)) - 1) << (lo - a0))
        keep &= np.bitwise_count(basis.masks & pm).astype(np.int64) == c
    return keep


def apply_projector(p: GeneralizedSectorProjector, v: SectorVector) -> SectorVector:
    return SectorVector(v.basis, v.amplitudes * projector_keep_mask(p, v.basis))


def polarized_keep_masks(basis: SectorBasis, J: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """(all-up, all-down) keep masks for the interval J."""
    up = projector_keep_mask(GeneralizedSectorProjector((J,), (0,)), basis)
    down = projector_keep_mask(GeneralizedSectorProjector((J,), (J[1] - J[0] + 1,)), basis)
    return up, down


def apply_polarized(v: SectorVector, J: tuple[int, int]) -> SectorVector:
    """P_J v: keep configurations fully up or fully down on J."""
    up, down = polarized_keep_masks(v.basis, J)
    return SectorVector(v.basis, v.amplitudes * (up | down))


def g_projector(L: int, n: int, J: tuple[int, int], sigma: str, j: int
                ) -> GeneralizedSectorProjector | None:
    """Droplet-split projector: j downs left of J, J fully sigma-polarized,
    the rest to the right.  Returns None when the split is impossible."""
    a, b = J
    if not (1 <= a <= b <= L):
        raise ValueError(f"J=[{a},{b}] outside [1,{L}]")
    if sigma not in ("up", "down"):
        raise ValueError("sigma must be 'up' or 'down'")
    mid = (b - a + 1) if sigma == "down" else 0
    right = n - j - mid
    parts: list[tuple[int, int]] = []
    counts: list[int] = []
    if a > 1:
        parts.append((1, a - 1))
        counts.append(j)
    elif j != 0:
        return None
    parts.append((a, b))
    counts.append(mid)
    if b < L:
        parts.append((b + 1, L))
        counts.append(right)
    elif right != 0:
        return None
    return GeneralizedSectorProjector(tuple(parts), tuple(counts))


def _check_interior(h: HamiltonianHandle, J: tuple[int, int]):
    a0, b0 = h.interval
    a, b = J
    if not (a0 + 1 <= a <= b <= b0 - 1):
        raise ValueError(
            f"J=[{a},{b}] must sit strictly inside the chain [{a0},{b0}]"
        )


def double_commutator_apply(h: HamiltonianHandle, J: tuple[int, int],
                            v: SectorVector) -> SectorVector:
    """[P_J, [P_J, H]] v = (H - P_J H P_J - (1-P_J) H (1-P_J)) v.

    Equals -(2 Delta)^{-1} (A_{a-1,a} (x) P_{[a+1,b]} + P_{[a,b-1]} (x)
    A_{b,b+1}) with A the two-site exchange flip; operator norm <= 1/Delta.
    """
    _check_interior(h, J)
    up, down = polarized_keep_masks(v.basis, J)
    p = (up | down).astype(np.float64)
    pv = SectorVector(v.basis, v.amplitudes * p)
    qv = SectorVector(v.basis, v.amplitudes * (1.0 - p))
    hp = apply_hamiltonian(h, pv).amplitudes
    hq = apply_hamiltonian(h, qv).amplitudes
    # H - PHP - QHQ = QHP + PHQ
    return SectorVector(v.basis, (1.0 - p) * hp + p * hq)


def double_commutator_dense(h: HamiltonianHandle, sector: SectorBasis,
                            J: tuple[int, int], cap: int | None = None) -> np.ndarray:
    """Dense [P_J, [P_J, H]] on the sector."""
    _check_interior(h, J)
    H = assemble_dense(h, sector, cap=cap)
    up, down = polarized_keep_masks(sector, J)
    p = (up | down).astype(np.float64)
    q = 1.0 - p
    return H - H * np.outer(p, p) - H * np.outer(q, q)
