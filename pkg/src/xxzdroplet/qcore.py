"""q-combinatorics for the gapped XXZ chain.

Everything downstream is driven by a single anisotropy parameter 0 < q < 1
(equivalently Delta = (q + 1/q)/2 > 1).  This module holds the coupled
constants, the Gaussian binomial coefficients at t = q^2, and the partition
product f_q(n) = prod_{k<=n} (1 - q^{2k}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "AnisotropyParams",
    "QBinomialTable",
    "params_from_q",
    "params_from_delta",
    "qbinom",
    "fq",
    "fq_infinity",
    "kink_gap_gamma_L",
]

# factors closer to 1 than this are invisible in double precision
_FQ_CUTOFF = 1e-17


@dataclass(frozen=True)
class AnisotropyParams:
    """Coupled constants of the Delta > 1 regime.

    a_field is the boundary field strength A(Delta) = (1 - q^2)/(2(1 + q^2)),
    gamma the infinite-chain gap 1 - 1/Delta.
    """

    q: float
    delta: float
    a_field: float
    gamma: float


def params_from_q(q: float) -> AnisotropyParams:
    """Populate all anisotropy constants from q in (0, 1)."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie strictly inside (0, 1), got {q}")
    delta = 0.5 * (q + 1.0 / q)
    a_field = (1.0 - q * q) / (2.0 * (1.0 + q * q))
    gamma = 1.0 - 2.0 * q / (1.0 + q * q)
    return AnisotropyParams(q=q, delta=delta, a_field=a_field, gamma=gamma)


def params_from_delta(delta: float) -> AnisotropyParams:
    """Invert Delta = (q + 1/q)/2 on the branch q < 1."""
    if not delta > 1.0:
        raise ValueError(f"delta must exceed 1, got {delta}")
    q = delta - math.sqrt(delta * delta - 1.0)
    return params_from_q(q)


@lru_cache(maxsize=4096)
def _qbinom_row(m: int, t: float) -> tuple[float, ...]:
    """Row m of the Gaussian-binomial triangle at parameter t, by the
    Pascal-type recurrence [m,k] = [m-1,k-1] + t^k [m-1,k]."""
    row = (1.0,)
    for i in range(1, m + 1):
        prev = row
        row = (1.0,) + tuple(
            prev[j - 1] + t**j * prev[j] for j in range(1, i)
        ) + (1.0,)
    return row


def qbinom(m: int, k: int, q: float) -> float:
    """Gaussian binomial coefficient at t = q^2; zero outside 0 <= k <= m."""
    if m < 0:
        raise ValueError(f"upper index must be nonnegative, got {m}")
    if k < 0 or k > m:
        return 0.0
    if m <= 1 or k == 0 or k == m:
        return 1.0
    return _qbinom_row(m, q * q)[k]


def fq(n: int | float, q: float) -> float:
    """Partition product prod_{k=1..n} (1 - q^{2k}).

    Pass math.inf for the converged infinite product (truncated once the
    next factor differs from 1 by less than 1e-17).
    """
    if not 0.0 <= q < 1.0:
        raise ValueError(f"fq needs 0 <= q < 1, got {q}")
    if n is math.inf or n == math.inf:
        return fq_infinity(q)
    n = int(n)
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    t = q * q
    prod = 1.0
    factor = t
    for _ in range(n):
        prod *= 1.0 - factor
        factor *= t
    return prod


@lru_cache(maxsize=256)
def fq_infinity(q: float) -> float:
    """f_q(infinity), positive for 0 <= q < 1."""
    if not 0.0 <= q < 1.0:
        raise ValueError(f"fq needs 0 <= q < 1, got {q}")
    t = q * q
    prod = 1.0
    factor = t
    while factor >= _FQ_CUTOFF:
        prod *= 1.0 - factor
        factor *= t
    return prod


@dataclass(frozen=True)
class QBinomialTable:
    """Triangular table of Gaussian binomials at t = q^2, rows 0..max_m."""

    q: float
    max_m: int
    entries: tuple[tuple[float, ...], ...]

    @classmethod
    def build(cls, q: float, max_m: int) -> "QBinomialTable":
        if max_m < 0:
            raise ValueError("max_m must be nonnegative")
        rows = tuple(_qbinom_row(m, q * q) for m in range(max_m + 1))
        return cls(q=q, max_m=max_m, entries=rows)

    def entry(self, m: int, k: int) -> float:
        """Table lookup, honouring the convention entry = 0 outside 0<=k<=m."""
        if m < 0 or m > self.max_m:
            raise ValueError(f"row {m} outside table (max_m={self.max_m})")
        if k < 0 or k > m:
            return 0.0
        return self.entries[m][k]


def kink_gap_gamma_L(L: int, delta: float) -> float:
    """Spectral gap 1 - cos(pi/L)/Delta above the kink ground states."""
    if L < 2:
        raise ValueError(f"chain length must be >= 2, got {L}")
    if not delta > 1.0:
        raise ValueError(f"delta must exceed 1, got {delta}")
    return 1.0 - math.cos(math.pi / L) / delta
