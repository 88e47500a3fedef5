"""Fixed-down-spin configuration bases on integer intervals.

Configurations are bitsets over the sites of an interval [a, b] (bit i of the
mask is site a+i, set bit = down spin).  A sector basis enumerates all masks
with a given popcount in lexicographic order of the sorted down-spin position
tuples, which for combinations generated low-site-first is simply the
itertools.combinations order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MAX_SITES",
    "SpinConfiguration",
    "SectorBasis",
    "SectorVector",
    "sector_dimension",
    "rank",
    "unrank",
    "compose_split",
]

MAX_SITES = 63  # one machine word


@dataclass(frozen=True)
class SpinConfiguration:
    """Down-spin bitset on an interval; bit i corresponds to site a+i."""

    interval: tuple[int, int]
    down_mask: int

    def __post_init__(self):
        a, b = self.interval
        if a > b:
            raise ValueError(f"empty interval [{a},{b}]")
        length = b - a + 1
        if length > MAX_SITES:
            raise ValueError(f"interval longer than {MAX_SITES} sites")
        if self.down_mask < 0 or self.down_mask >> length:
            raise ValueError("down_mask has bits outside the interval")

    @property
    def length(self) -> int:
        a, b = self.interval
        return b - a + 1

    @property
    def n_down(self) -> int:
        return self.down_mask.bit_count()

    def down_sites(self) -> tuple[int, ...]:
        """Sites carrying a down spin, ascending."""
        a, _ = self.interval
        m = self.down_mask
        out = []
        while m:
            low = m & -m
            out.append(a + low.bit_length() - 1)
            m ^= low
        return tuple(out)


def sector_dimension(length: int, n: int) -> int:
    """Exact dimension C(length, n) of the n-down sector."""
    if length < 0 or n < 0 or n > length:
        raise ValueError(f"no sector with length={length}, n={n}")
    return math.comb(length, n)


def _enumerate_masks(length: int, n: int) -> np.ndarray:
    masks = np.fromiter(
        (sum(1 << p for p in pos) for pos in itertools.combinations(range(length), n)),
        dtype=np.uint64,
        count=math.comb(length, n),
    )
    return masks


@dataclass(frozen=True)
class SectorBasis:
    """All configurations of an interval with a fixed number of down spins.

    masks holds the configurations in the canonical (position-lexicographic)
    order; _sorted/_order support O(log dim) mask -> index lookups.
    """

    interval: tuple[int, int]
    n_down: int
    masks: np.ndarray = field(repr=False, compare=False)
    _sorted: np.ndarray = field(repr=False, compare=False)
    _order: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def build(cls, interval: tuple[int, int], n_down: int) -> "SectorBasis":
        a, b = interval
        if a > b:
            raise ValueError(f"empty interval [{a},{b}]")
        length = b - a + 1
        if length > MAX_SITES:
            raise ValueError(f"interval longer than {MAX_SITES} sites")
        if n_down < 0 or n_down > length:
            raise ValueError(f"n_down={n_down} outside [0,{length}]")
        masks = _enumerate_masks(length, n_down)
        order = np.argsort(masks, kind="stable")
        return cls(
            interval=interval,
            n_down=n_down,
            masks=masks,
            _sorted=masks[order],
            _order=order,
        )

    @property
    def length(self) -> int:
        a, b = self.interval
        return b - a + 1

    @property
    def dim(self) -> int:
        return int(self.masks.size)

    def index_of(self, masks: np.ndarray, validate: bool = False) -> np.ndarray:
        """Vectorized mask -> basis-index lookup.

        With validate=True unknown masks raise; otherwise the caller must
        guarantee membership (the matvec paths do, by construction).
        """
        masks = np.asarray(masks, dtype=np.uint64)
        pos = np.searchsorted(self._sorted, masks)
        if validate:
            if np.any(pos >= self.dim) or np.any(self._sorted[np.minimum(pos, self.dim - 1)] != masks):
                raise ValueError("mask not present in this sector basis")
        return self._order[pos]

    def config(self, index: int) -> SpinConfiguration:
        if index < 0 or index >= self.dim:
            raise ValueError(f"index {index} outside [0,{self.dim})")
        return SpinConfiguration(self.interval, int(self.masks[index]))


def rank(config: SpinConfiguration, basis: SectorBasis) -> int:
    """Index of config under the basis ordering; errors on mismatch."""
    if config.interval != basis.interval:
        raise ValueError(
            f"interval mismatch: config {config.interval} vs basis {basis.interval}"
        )
    if config.n_down != basis.n_down:
        raise ValueError(
            f"popcount mismatch: config has {config.n_down} down, basis wants {basis.n_down}"
        )
    return int(basis.index_of(np.array([config.down_mask], dtype=np.uint64), validate=True)[0])


def unrank(index: int, basis: SectorBasis) -> SpinConfiguration:
    """Inverse of rank."""
    return basis.config(index)


def compose_split(left: SpinConfiguration, right: SpinConfiguration) -> SpinConfiguration:
    """Concatenate configurations on adjacent intervals [a,c] and [c+1,b]."""
    la, lb = left.interval
    ra, rb = right.interval
    if ra != lb + 1:
        raise ValueError(
            f"intervals [{la},{lb}] and [{ra},{rb}] are not adjacent"
        )
    width = lb - la + 1
    return SpinConfiguration((la, rb), left.down_mask | (right.down_mask << width))


@dataclass
class SectorVector:
    """Real amplitude vector over a sector basis."""

    basis: SectorBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.float64)
        if self.amplitudes.shape != (self.basis.dim,):
            raise ValueError(
                f"amplitude length {self.amplitudes.shape} does not match dim {self.basis.dim}"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def dot(self, other: "SectorVector") -> float:
        if other.basis.interval != self.basis.interval or other.basis.n_down != self.basis.n_down:
            raise ValueError("sector mismatch in dot product")
        return float(self.amplitudes @ other.amplitudes)

    def copy(self) -> "SectorVector":
        return SectorVector(self.basis, self.amplitudes.copy())
