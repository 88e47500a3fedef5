"""Kink, antikink, droplet, and ring-droplet states.

States are stored with their raw (unnormalized) q-geometric coefficients:
a kink on [a,b] weights a configuration with downs at x_1 < ... < x_n by
q^{sum_k (b+1-x_k)}, the antikink by q^{sum_k (x_k+1-a)}, and a droplet with
cut x is the amplitude-wise tensor product of a kink on [1,x] and an antikink
on [x+1,L].  Alongside the constructors live the closed-form norms, overlaps,
decompositions and projector expectations these states satisfy; every closed
form here is cross-checked against direct computation in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import SectorBasis, SectorVector
from .operators import (
    HamiltonianHandle,
    BoundarySpec,
    apply_hamiltonian,
    apply_projector,
    embedded_apply,
    g_projector,
    translate,
)
from .qcore import AnisotropyParams, qbinom

__all__ = [
    "KinkSpec",
    "DropletSpec",
    "RingDropletSpec",
    "build_kink",
    "build_droplet",
    "build_ring_droplet",
    "tensor_product",
    "droplet_positions",
    "kink_norm_sq_closed",
    "mixed_overlap_closed",
    "coproduct_check",
    "pair_overlap_closed",
    "droplet_overlap",
    "projform_expectation",
    "g_expectation_closed",
    "g_expectation_direct",
    "ring_translation_overlap_closed",
    "ring_translation_overlap_direct",
    "droplet_residual",
    "interface_overlap_closed",
    "interface_element_closed",
]


@dataclass(frozen=True)
class KinkSpec:
    """Kink (+-) or antikink (-+) ground-state data on an interval."""

    interval: tuple[int, int]
    n_down: int
    direction: str  # "kink" | "antikink"
    params: AnisotropyParams

    def __post_init__(self):
        a, b = self.interval
        if a > b:
            raise ValueError(f"empty interval [{a},{b}]")
        if not 0 <= self.n_down <= b - a + 1:
            raise ValueError(f"n_down={self.n_down} outside [0,{b - a + 1}]")
        if self.direction not in ("kink", "antikink"):
            raise ValueError("direction must be 'kink' or 'antikink'")


@dataclass(frozen=True)
class DropletSpec:
    """Droplet on [1, length]: kink left of the cut, antikink right of it."""

    length: int
    n_down: int
    cut: int
    params: AnisotropyParams

    def __post_init__(self):
        if not 0 <= self.n_down <= self.length:
            raise ValueError(f"n_down={self.n_down} outside [0,{self.length}]")
        lo = self.n_down // 2
        hi = self.length - (self.n_down - self.n_down // 2)
        if not lo <= self.cut <= hi:
            raise ValueError(
                f"cut {self.cut} outside the admissible window [{lo},{hi}]"
            )


@dataclass(frozen=True)
class RingDropletSpec:
    """Periodic droplet: the centered open-chain droplet shifted by T^shift."""

    length: int
    n_down: int
    shift: int
    params: AnisotropyParams

    def __post_init__(self):
        if not 0 <= self.n_down <= self.length:
            raise ValueError(f"n_down={self.n_down} outside [0,{self.length}]")
        if not 0 <= self.shift < self.length:
            raise ValueError(f"shift {self.shift} outside [0,{self.length})")


def droplet_positions(L: int, n: int) -> range:
    """Admissible droplet cuts; exactly L - n + 1 of them."""
    return range(n // 2, L - (n - n // 2) + 1)


def build_kink(spec: KinkSpec) -> SectorVector:
    """Unnormalized kink/antikink amplitudes, exactly as displayed above."""
    basis = SectorBasis.build(spec.interval, spec.n_down)
    L = basis.length
    M = basis.masks
    expo = np.zeros(basis.dim, dtype=np.int64)
    one = np.uint64(1)
    for i in range(L):
        w = (L - i) if spec.direction == "kink" else (i + 1)
        expo += ((M >> np.uint64(i)) & one).astype(np.int64) * w
    return SectorVector(basis, np.power(spec.params.q, expo.astype(np.float64)))


def tensor_product(left: SectorVector, right: SectorVector) -> SectorVector:
    """Amplitude-wise tensor product onto the union of adjacent intervals."""
    la, lb = left.basis.interval
    ra, rb = right.basis.interval
    if ra != lb + 1:
        raise ValueError(f"intervals [{la},{lb}] and [{ra},{rb}] are not adjacent")
    width = np.uint64(lb - la + 1)
    target = SectorBasis.build((la, rb), left.basis.n_down + right.basis.n_down)
    masks = (left.basis.masks[:, None] | (right.basis.masks[None, :] << width)).ravel()
    amps = np.zeros(target.dim)
    amps[target.index_of(masks)] = np.outer(left.amplitudes, right.amplitudes).ravel()
    return SectorVector(target, amps)


def build_droplet(spec: DropletSpec) -> SectorVector:
    """xi_{L,n}(x): floor(n/2) downs in a kink on [1,x], ceil(n/2) downs in an
    antikink on [x+1,L]; degenerates to a pure antikink/kink at the window
    edges x = 0 and x = L."""
    L, n, x, p = spec.length, spec.n_down, spec.cut, spec.params
    nl, nr = n // 2, n - n // 2
    if x == 0:
        return build_kink(KinkSpec((1, L), n, "antikink", p))
    if x == L:
        return build_kink(KinkSpec((1, L), n, "kink", p))
    left = build_kink(KinkSpec((1, x), nl, "kink", p))
    right = build_kink(KinkSpec((x + 1, L), nr, "antikink", p))
    return tensor_product(left, right)


def build_ring_droplet(spec: RingDropletSpec) -> SectorVector:
    """T^shift applied to the droplet cut at floor(L/2)."""
    base = build_droplet(
        DropletSpec(spec.length, spec.n_down, spec.length // 2, spec.params)
    )
    v = base
    for _ in range(spec.shift):
        v = translate(v)
    return v


def kink_norm_sq_closed(length: int, n: int, q: float) -> float:
    """||psi||^2 = qbinom(length, n) q^{n(n+1)} for kink and antikink alike."""
    if not 0 <= n <= length:
        raise ValueError(f"n={n} outside [0,{length}]")
    return qbinom(length, n, q) * q ** (n * (n + 1))


def mixed_overlap_closed(length: int, n: int, q: float) -> float:
    """<kink(n), antikink(n)> = C(length, n) q^{n(length+1)}; sectors m != n
    are orthogonal.  (Each down spin contributes q^{length+1} to the product
    of the two amplitude weights, so the exponent carries the count n.)"""
    if not 0 <= n <= length:
        raise ValueError(f"n={n} outside [0,{length}]")
    return math.comb(length, n) * q ** (n * (length + 1))


def coproduct_check(spec: KinkSpec, cut: int) -> float:
    """Rebuild the state from its two-interval decomposition.

    Kink:     psi_[a,b](n) = sum_k psi_[a,x](k) (x) psi_[x+1,b](n-k) q^{(b-x)k}
    Antikink: same split with weight q^{(x+1-a)(n-k)}.
    Returns the max amplitude discrepancy against the direct construction.
    """
    a, b = spec.interval
    if not a <= cut <= b - 1:
        raise ValueError(f"cut {cut} must split [{a},{b}] into two nonempty parts")
    direct = build_kink(spec)
    total = np.zeros(direct.basis.dim)
    n = spec.n_down
    for k in range(max(0, n - (b - cut)) , min(n, cut - a + 1) + 1):
        left = build_kink(KinkSpec((a, cut), k, spec.direction, spec.params))
        right = build_kink(KinkSpec((cut + 1, b), n - k, spec.direction, spec.params))
        w = (b - cut) * k if spec.direction == "kink" else (cut + 1 - a) * (n - k)
        total += spec.params.q**w * tensor_product(left, right).amplitudes
    return float(np.max(np.abs(total - direct.amplitudes)))


def pair_overlap_closed(x: int, y: int, r: int, k: int, m: int, n: int, q: float) -> float:
    """<kink_[1,x](m) (x) antikink_[x+1,x+y+r](n+k),
       kink_[1,x+r](m+k) (x) antikink_[x+r+1,x+y+r](n)>
    = C(r,k) qbinom(x,m) qbinom(y,n) q^{m(m+1)+n(n+1)+k(r+1)+r(m+n)}.

    Splitting both sides at x and x+r forces k downs onto the swap window of
    length r, whose kink/antikink cross term supplies C(r,k) q^{k(r+1)}; the
    two coproduct weights add r(m+n).  At r=0 this is the product of the two
    squared norms, and the k=0 / k=r normalized specializations carry
    q^{(m+n)r} and no power at all, respectively.
    """
    for name, val in (("x", x), ("y", y), ("r", r), ("k", k), ("m", m), ("n", n)):
        if val < 0:
            raise ValueError(f"{name} must be nonnegative, got {val}")
    if k > r:
        return 0.0
    return (
        math.comb(r, k)
        * qbinom(x, m, q)
        * qbinom(y, n, q)
        * q ** (m * (m + 1) + n * (n + 1) + k * (r + 1) + r * (m + n))
    )


def droplet_overlap(spec_a: DropletSpec, spec_b: DropletSpec) -> float:
    """Normalized <xi(x), xi(y)>; bounded by q^{n|x-y|} / f_q(inf)."""
    if (spec_a.length, spec_a.n_down) != (spec_b.length, spec_b.n_down):
        raise ValueError("droplet overlap needs matching length and down count")
    va = build_droplet(spec_a)
    vb = build_droplet(spec_b)
    return va.dot(vb) / (va.norm() * vb.norm())


def projform_expectation(kind: str, interval: tuple[int, int], n: int,
                         partition: tuple[tuple[int, int], ...],
                         counts: tuple[int, ...], q: float) -> float:
    """||Q_{P,counts} psi||^2 / ||psi||^2 for a kink or antikink on the
    interval, with the partition covering the interval exactly.

    The value is (prod_j qbinom(len_j, n_j) / qbinom(L, n)) * q^E with
    E = sum_j n_j (2 (x_r - x_j) - (n - n_j))      for the kink,
    E = sum_j n_j (2 (x_{j-1} - x_0) - (n - n_j))  for the antikink;
    E is the minimal transport cost of moving the n most likely down spins
    into the prescribed bins.
    """
    if kind not in ("kink", "antikink"):
        raise ValueError("kind must be 'kink' or 'antikink'")
    a, b = interval
    if len(partition) != len(counts) or not partition:
        raise ValueError("one count per partition part required")
    if partition[0][0] != a or partition[-1][1] != b:
        raise ValueError("partition must cover the interval exactly")
    for (a1, b1), (a2, b2) in zip(partition, partition[1:]):
        if a2 != b1 + 1:
            raise ValueError("partition parts must be adjacent")
    if sum(counts) != n:
        raise ValueError(f"counts sum to {sum(counts)}, expected {n}")
    x0 = a - 1
    xs = [b1 for (_, b1) in partition]
    ratio = 1.0
    for (lo, hi), c in zip(partition, counts):
        if c < 0 or c > hi - lo + 1:
            return 0.0
        ratio *= qbinom(hi - lo + 1, c, q)
    ratio /= qbinom(b - x0, n, q)
    if kind == "kink":
        expo = sum(c * (2 * (b - xj) - (n - c)) for xj, c in zip(xs, counts))
    else:
        prev = [x0] + xs[:-1]
        expo = sum(c * (2 * (xj - x0) - (n - c)) for xj, c in zip(prev, counts))
    return ratio * q**expo


def g_expectation_closed(L: int, n: int, J: tuple[int, int], x: int,
                         sigma: str, j: int, q: float) -> float:
    """Closed form for <xi_{L,n}(x), G^sigma_j xi_{L,n}(x)> / ||xi||^2.

    G^sigma_j fixes j downs left of J = [a,b], J fully polarized along sigma,
    and the remaining downs right of J.  Vanishing q-binomial indices make the
    value 0.  The exponents follow from the transport cost of the droplet
    split; they are verified exhaustively against direct projection.
    """
    a, b = J
    if not (1 <= a <= b <= L):
        raise ValueError(f"J=[{a},{b}] outside [1,{L}]")
    if sigma not in ("up", "down"):
        raise ValueError("sigma must be 'up' or 'down'")
    if x not in droplet_positions(L, n):
        raise ValueError(f"cut {x} not admissible for (L={L}, n={n})")
    jl = b - a + 1
    m2, m1 = n // 2, n - n // 2
    if x <= a - 1:
        r = a - 1 - x - j + m2
        if sigma == "up":
            return (
                qbinom(a - 1 - x, r, q) * qbinom(L - b, n - j, q)
                / qbinom(L - x, m1, q) * q ** (2 * (n - j) * (jl + r))
            )
        return (
            qbinom(a - 1 - x, r, q) * qbinom(L - b, n - j - jl, q)
            / qbinom(L - x, m1, q) * q ** (2 * (n - j) * r)
        )
    if x <= b:
        if sigma == "up":
            if j != m2:
                return 0.0
            return (
                qbinom(a - 1, m2, q) * qbinom(L - b, m1, q)
                / (qbinom(x, m2, q) * qbinom(L - x, m1, q))
                * q ** (2 * (m2 * (x - a + 1) + m1 * (b - x)))
            )
        if j != m2 - (x - a + 1):
            return 0.0
        return (
            qbinom(a - 1, x - m2, q) * qbinom(L - b, L - x - m1, q)
            / (qbinom(x, m2, q) * qbinom(L - x, m1, q))
        )
    if sigma == "up":
        r = x - b - m2 + j
        return (
            qbinom(a - 1, j, q) * qbinom(x - b, r, q)
            / qbinom(x, m2, q) * q ** (2 * j * (jl + r))
        )
    r = x - a + 1 - m2 + j
    return (
        qbinom(a - 1, j, q) * qbinom(x - b, r, q)
        / qbinom(x, m2, q) * q ** (2 * r * (j + jl))
    )


def g_expectation_direct(L: int, n: int, J: tuple[int, int], x: int,
                         sigma: str, j: int, params: AnisotropyParams) -> float:
    """Same expectation by explicit projection of the built droplet."""
    xi = build_droplet(DropletSpec(L, n, x, params))
    proj = g_projector(L, n, J, sigma, j)
    if proj is None:
        return 0.0
    kept = apply_projector(proj, xi)
    return kept.dot(kept) / xi.dot(xi)


def ring_translation_overlap_closed(L: int, n: int, x: int, q: float) -> float:
    """<xi_ring(0), T^x xi_ring(0)> / ||xi_ring(0)||^2, exactly.

    Splitting the ring into the four arcs cut out by both droplet profiles
    gives a one-parameter family of contributions (k downs on each of the two
    swap arcs of length x):

        q^{n x} sum_k  qbinom(fl-x, n2-k) qbinom(ce-x, n1-k)
                       / (qbinom(fl, n2) qbinom(ce, n1))
                       * C(x,k)^2 * q^{k (L + 2k - 2x - 2n)}

    with fl = floor(L/2), ce = ceil(L/2), n2 = floor(n/2), n1 = ceil(n/2).
    """
    if not 0 <= x <= L // 2:
        raise ValueError(f"shift {x} outside [0,{L // 2}]")
    fl, ce = L // 2, L - L // 2
    n2, n1 = n // 2, n - n // 2
    denom = qbinom(fl, n2, q) * qbinom(ce, n1, q)
    total = 0.0
    for k in range(0, min(x, n2, n1) + 1):
        total += (
            qbinom(fl - x, n2 - k, q) * qbinom(ce - x, n1 - k, q) / denom
            * math.comb(x, k) ** 2
            * float(q) ** (k * (L + 2 * k - 2 * x - 2 * n))
        )
    return q ** (n * x) * total


def ring_translation_overlap_direct(L: int, n: int, x: int,
                                    params: AnisotropyParams) -> float:
    """Same overlap from the built states."""
    base = build_ring_droplet(RingDropletSpec(L, n, 0, params))
    shifted = build_ring_droplet(RingDropletSpec(L, n, x % L, params))
    return base.dot(shifted) / base.dot(base)


def droplet_residual(spec: DropletSpec) -> float:
    """||(H^{++} - A) xi||^2 / ||xi||^2 for the droplet Hamiltonian on [1,L].

    Bounded by 2 q^{2 floor(n/2)} / (1 - q^{2 floor(n/2)}); zero when the
    sector is fully down.  For interior cuts the action of the full
    Hamiltonian reduces to the single bond (x, x+1); this identity is
    cross-checked here.
    """
    L, x, p = spec.length, spec.cut, spec.params
    xi = build_droplet(spec)
    h = HamiltonianHandle((1, L), BoundarySpec.open_fields(1, 1), p)
    hxi = apply_hamiltonian(h, xi)
    if 1 <= x <= L - 1:
        bond = embedded_apply(xi.basis, (x, x + 1), 1, 1, p, xi)
        scale = max(1.0, float(np.max(np.abs(hxi.amplitudes))))
        gap = float(np.max(np.abs(hxi.amplitudes - bond.amplitudes)))
        if gap > 1e-12 * scale:
            raise ArithmeticError(
                f"one-bond reduction failed at cut {x}: discrepancy {gap}"
            )
    res = hxi.amplitudes - p.a_field * xi.amplitudes
    return float(res @ res) / xi.dot(xi)


def interface_overlap_closed(j: int, l: int, q: float) -> float:
    """<up-site(j) (x) down-site(l), two-site kink(j+l)> = q^{3j+2l}."""
    if j not in (0, 1) or l not in (0, 1):
        raise ValueError("single-site occupations must be 0 or 1")
    return q ** (3 * j + 2 * l)


def interface_element_closed(j: int, l: int, q: float) -> float:
    """Two-site droplet-Hamiltonian matrix element between the split state
    site(j) (x) site(l) and the two-site kink with j+l downs.

    Each value is dominated in magnitude by the field-free overlap
    q^{3j+2l}; this is what makes interface contributions to droplet
    overlaps summable.
    """
    a_field = (1 - q * q) / (2 * (1 + q * q))
    if (j, l) == (0, 0):
        return -a_field
    if (j, l) == (0, 1):
        return q**2 * (1 - q**2) / (2 * (1 + q**2))
    if (j, l) == (1, 0):
        return -(q**3) * (1 - q**2) / (2 * (1 + q**2))
    if (j, l) == (1, 1):
        return a_field * q**5
    raise ValueError("single-site occupations must be 0 or 1")
