from functools import reduce

import numpy as np
import pytest

from xxzdroplet.basis import SectorBasis, SectorVector, SpinConfiguration, rank
from xxzdroplet.operators import (
    BoundarySpec,
    DenseCapExceeded,
    GeneralizedSectorProjector,
    HamiltonianHandle,
    apply_hamiltonian,
    apply_polarized,
    apply_projector,
    assemble_dense,
    cut_identity_residual,
    double_commutator_apply,
    double_commutator_dense,
    g_projector,
    translate,
)
from xxzdroplet.qcore import params_from_q

# ---------------------------------------------------------------------------
# independent full-space oracle built from Kronecker products of spin matrices

S3 = np.diag([0.5, -0.5])      # local basis: index 0 = up, 1 = down
SP = np.array([[0.0, 1.0], [0.0, 0.0]])
SM = SP.T
I2 = np.eye(2)


def _site_op(L, ops):
    """Operator with per-site factors ops[site]; site i+1 lives on bit i, so
    the kron chain runs from site L (high bits) down to site 1."""
    mats = [ops.get(s, I2) for s in range(L, 0, -1)]
    return reduce(np.kron, mats)


def _bond_oracle(L, x, y, delta):
    ss = 0.5 * (_site_op(L, {x: SP, y: SM}) + _site_op(L, {x: SM, y: SP})) \
        + _site_op(L, {x: S3, y: S3})
    zz = _site_op(L, {x: S3, y: S3})
    eye = np.eye(2**L)
    return -(ss - 0.25 * eye) / delta - (1 - 1 / delta) * (zz - 0.25 * eye)


def full_space_oracle(L, params, alpha=0, beta=0, ring=False):
    H = np.zeros((2**L, 2**L))
    for x in range(1, L):
        H += _bond_oracle(L, x, x + 1, params.delta)
    if ring:
        H += _bond_oracle(L, L, 1, params.delta)
    else:
        H += -params.a_field * (
            alpha * _site_op(L, {1: S3}) + beta * _site_op(L, {L: S3})
        )
    return H


def sector_block(H_full, basis):
    idx = basis.masks.astype(np.int64)
    return H_full[np.ix_(idx, idx)]


@pytest.mark.parametrize("bc", ["00", "+-", "-+", "++", "--", "ring"])
def test_dense_matches_kron_oracle(bc):
    p = params_from_q(0.25)
    L = 6
    spec = BoundarySpec.from_code(bc)
    Hf = full_space_oracle(
        L, p, alpha=spec.alpha, beta=spec.beta, ring=spec.periodic
    )
    h = HamiltonianHandle((1, L), spec, p)
    for n in range(0, L + 1):
        basis = SectorBasis.build((1, L), n)
        assert np.max(np.abs(assemble_dense(h, basis) - sector_block(Hf, basis))) <= 1e-14


def test_no_sector_mixing_in_full_space():
    p = params_from_q(0.5)
    L = 6
    for ring in (False, True):
        Hf = full_space_oracle(L, p, alpha=1, beta=1, ring=False) if not ring \
            else full_space_oracle(L, p, ring=True)
        pops = np.array([int(m).bit_count() for m in range(2**L)])
        mix = Hf[pops[:, None] != pops[None, :]]
        assert np.max(np.abs(mix)) == 0.0


class TestTwoSiteTables:
    @pytest.mark.parametrize("q", [0.25, 0.5])
    def test_free_bond(self, q):
        p = params_from_q(q)
        h = HamiltonianHandle((1, 2), BoundarySpec.from_code("00"), p)
        n1 = SectorBasis.build((1, 2), 1)
        H = assemble_dense(h, n1)
        expected = np.array([[0.5, -0.5 / p.delta], [-0.5 / p.delta, 0.5]])
        assert np.max(np.abs(H - expected)) <= 1e-13
        sym = np.array([1.0, 1.0]) / np.sqrt(2)
        assert apply_hamiltonian(h, SectorVector(n1, sym)).amplitudes == pytest.approx(
            (0.5 * (1 - 1 / p.delta) * sym).tolist(), abs=1e-14
        )
        for n, val in ((0, 0.0), (2, 0.0)):
            basis = SectorBasis.build((1, 2), n)
            assert assemble_dense(h, basis)[0, 0] == pytest.approx(val, abs=1e-15)

    @pytest.mark.parametrize("q", [0.25, 0.5])
    def test_droplet_bond(self, q):
        p = params_from_q(q)
        h = HamiltonianHandle((1, 2), BoundarySpec.from_code("++"), p)
        vals = {}
        for n in range(3):
            basis = SectorBasis.build((1, 2), n)
            vals[n] = np.linalg.eigvalsh(assemble_dense(h, basis))
        assert vals[0][0] == pytest.approx(-p.a_field, abs=1e-13)
        assert vals[2][0] == pytest.approx(p.a_field, abs=1e-13)
        assert vals[1] == pytest.approx(
            [0.5 * (1 - 1 / p.delta), 0.5 * (1 + 1 / p.delta)], abs=1e-13
        )

    def test_all_up_annihilated(self):
        p = params_from_q(0.25)
        for L in (2, 5, 9):
            basis = SectorBasis.build((1, L), 0)
            h = HamiltonianHandle((1, L), BoundarySpec.from_code("00"), p)
            out = apply_hamiltonian(h, SectorVector(basis, np.ones(1)))
            assert np.max(np.abs(out.amplitudes)) == 0.0


class TestMatvec:
    @pytest.mark.parametrize("bc", ["00", "+-", "++", "ring"])
    def test_agrees_with_dense_on_random_vectors(self, bc):
        p = params_from_q(0.25)
        rng = np.random.default_rng(7)
        for L, n in ((6, 3), (10, 5), (9, 2)):
            basis = SectorBasis.build((1, L), n)
            h = HamiltonianHandle((1, L), BoundarySpec.from_code(bc), p)
            H = assemble_dense(h, basis)
            for _ in range(4):
                v = rng.standard_normal(basis.dim)
                out = apply_hamiltonian(h, SectorVector(basis, v)).amplitudes
                assert np.max(np.abs(out - H @ v)) <= 1e-13 * max(1, np.max(np.abs(v)))

    def test_symmetry(self):
        p = params_from_q(0.5)
        rng = np.random.default_rng(11)
        basis = SectorBasis.build((1, 10), 4)
        for bc in ("00", "++", "ring"):
            h = HamiltonianHandle((1, 10), BoundarySpec.from_code(bc), p)
            for _ in range(5):
                u = rng.standard_normal(basis.dim)
                v = rng.standard_normal(basis.dim)
                hu = apply_hamiltonian(h, SectorVector(basis, u)).amplitudes
                hv = apply_hamiltonian(h, SectorVector(basis, v)).amplitudes
                assert u @ hv == pytest.approx(hu @ v, rel=1e-12, abs=1e-12)

    def test_interval_mismatch(self):
        p = params_from_q(0.25)
        h = HamiltonianHandle((1, 4), BoundarySpec.from_code("00"), p)
        other = SectorBasis.build((2, 5), 2)
        with pytest.raises(ValueError):
            apply_hamiltonian(h, SectorVector(other, np.zeros(other.dim)))

    def test_kink_antikink_duality(self):
        p = params_from_q(0.25)
        L = 8
        hk = HamiltonianHandle((1, L), BoundarySpec.from_code("+-"), p)
        ha = HamiltonianHandle((1, L), BoundarySpec.from_code("-+"), p)
        for n in range(1, L):
            basis = SectorBasis.build((1, L), n)
            vk = np.linalg.eigvalsh(assemble_dense(hk, basis))
            va = np.linalg.eigvalsh(assemble_dense(ha, basis))
            assert np.max(np.abs(vk - va)) <= 1e-10


class TestDenseCap:
    def test_cap_exceeded(self):
        p = params_from_q(0.25)
        basis = SectorBasis.build((1, 12), 6)
        h = HamiltonianHandle((1, 12), BoundarySpec.from_code("++"), p)
        with pytest.raises(DenseCapExceeded):
            assemble_dense(h, basis, cap=100)

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("XXZ_DENSE_CAP", "10")
        p = params_from_q(0.25)
        basis = SectorBasis.build((1, 6), 3)
        h = HamiltonianHandle((1, 6), BoundarySpec.from_code("00"), p)
        with pytest.raises(DenseCapExceeded):
            assemble_dense(h, basis)
        assert assemble_dense(h, basis, cap=30).shape == (20, 20)


class TestCutIdentities:
    def test_examples(self):
        assert cut_identity_residual(4, 2, params_from_q(0.25), 2) <= 1e-12
        assert cut_identity_residual(6, 3, params_from_q(0.5), 3) <= 1e-12

    def test_all_cuts(self):
        p = params_from_q(0.25)
        for x in range(1, 6):
            assert cut_identity_residual(6, x, p, 2) <= 1e-12

    def test_range_error(self):
        with pytest.raises(ValueError):
            cut_identity_residual(4, 0, params_from_q(0.25), 2)
        with pytest.raises(ValueError):
            cut_identity_residual(4, 4, params_from_q(0.25), 2)


class TestTranslate:
    def test_single_spin_shift(self):
        basis = SectorBasis.build((1, 3), 1)
        v = np.zeros(3)
        v[rank(SpinConfiguration((1, 3), 0b001), basis)] = 1.0
        out = translate(SectorVector(basis, v))
        expect = np.zeros(3)
        expect[rank(SpinConfiguration((1, 3), 0b010), basis)] = 1.0
        assert out.amplitudes.tolist() == expect.tolist()

    def test_cyclicity_and_norm(self):
        rng = np.random.default_rng(3)
        for L, n in ((5, 2), (12, 5)):
            basis = SectorBasis.build((1, L), n)
            v = SectorVector(basis, rng.standard_normal(basis.dim))
            w = v
            for _ in range(L):
                w = translate(w)
                assert w.norm() == pytest.approx(v.norm(), rel=1e-15)
            assert np.max(np.abs(w.amplitudes - v.amplitudes)) == 0.0

    def test_commutes_with_ring(self):
        p = params_from_q(0.25)
        rng = np.random.default_rng(5)
        basis = SectorBasis.build((1, 8), 3)
        h = HamiltonianHandle((1, 8), BoundarySpec.ring(), p)
        v = SectorVector(basis, rng.standard_normal(basis.dim))
        th = translate(apply_hamiltonian(h, v)).amplitudes
        ht = apply_hamiltonian(h, translate(v)).amplitudes
        assert np.max(np.abs(th - ht)) <= 1e-13


class TestProjectors:
    def test_full_interval_identity(self):
        basis = SectorBasis.build((1, 6), 2)
        v = SectorVector(basis, np.arange(basis.dim, dtype=float))
        q = GeneralizedSectorProjector(((1, 6),), (2,))
        assert apply_projector(q, v).amplitudes.tolist() == v.amplitudes.tolist()

    def test_polarized_zeroes_mixed(self):
        basis = SectorBasis.build((1, 4), 2)
        v = np.zeros(basis.dim)
        v[rank(SpinConfiguration((1, 4), 0b0110), basis)] = 1.0  # mixed on [2,3]? no: down at 2,3
        mixed = rank(SpinConfiguration((1, 4), 0b1010), basis)  # down at 2 and 4: J=[2,3] mixed
        v[mixed] = 2.0
        out = apply_polarized(SectorVector(basis, v), (2, 3))
        assert out.amplitudes[mixed] == 0.0
        kept = rank(SpinConfiguration((1, 4), 0b0110), basis)
        assert out.amplitudes[kept] == 1.0

    def test_idempotent(self):
        rng = np.random.default_rng(9)
        basis = SectorBasis.build((1, 7), 3)
        v = SectorVector(basis, rng.standard_normal(basis.dim))
        proj = GeneralizedSectorProjector(((2, 3), (4, 6)), (1, 2))
        once = apply_projector(proj, v)
        twice = apply_projector(proj, once)
        assert np.max(np.abs(once.amplitudes - twice.amplitudes)) == 0.0

    def test_malformed_partition(self):
        with pytest.raises(ValueError):
            GeneralizedSectorProjector(((1, 2), (4, 5)), (0, 1))  # gap at site 3
        with pytest.raises(ValueError):
            GeneralizedSectorProjector(((1, 3), (3, 5)), (0, 1))  # overlap at 3
        with pytest.raises(ValueError):
            GeneralizedSectorProjector(((1, 3),), (0, 1))  # count arity

    def test_impossible_count_gives_zero(self):
        basis = SectorBasis.build((1, 4), 2)
        v = SectorVector(basis, np.ones(basis.dim))
        proj = GeneralizedSectorProjector(((1, 2),), (3,))
        assert np.max(np.abs(apply_projector(proj, v).amplitudes)) == 0.0

    def test_droplet_split_expectation_enumeration(self):
        # amplitudes of kink[1,3](1) (x) antikink[4,6](1) written out longhand
        q = 0.25
        t = q * q
        amps = {}
        for d1 in (1, 2, 3):
            for d2 in (4, 5, 6):
                amps[(d1, d2)] = q ** (4 - d1) * q ** (d2 - 3)
        total = sum(a * a for a in amps.values())
        kept = amps[(3, 4)] ** 2  # both downs forced onto [3,4]
        expect = kept / total
        assert expect == pytest.approx(1.0 / (1 + t + t * t) ** 2, rel=1e-13)
        # same number through the projector machinery
        basis = SectorBasis.build((1, 6), 2)
        v = np.zeros(basis.dim)
        for (d1, d2), a in amps.items():
            mask = (1 << (d1 - 1)) | (1 << (d2 - 1))
            v[rank(SpinConfiguration((1, 6), mask), basis)] = a
        proj = g_projector(6, 2, (3, 4), "down", 0)
        out = apply_projector(proj, SectorVector(basis, v))
        assert (out.amplitudes @ out.amplitudes) / total == pytest.approx(expect, rel=1e-13)

    def test_g_projector_impossible_split(self):
        assert g_projector(4, 2, (1, 2), "up", 1) is None  # no sites left of J


class TestDoubleCommutator:
    def _closed_form_dense(self, basis, J, delta):
        """-(2 Delta)^{-1} (A_{a-1,a} (x) P_{[a+1,b]} + P_{[a,b-1]} (x) A_{b,b+1})
        built directly from bit logic."""
        a, b = J
        D = basis.dim
        M = basis.masks.astype(np.int64)
        H = np.zeros((D, D))
        lookup = {int(m): i for i, m in enumerate(M)}
        for col, m in enumerate(M):
            m = int(m)
            for (i, j, lo, hi) in (
                # exchange bond and polarized segment, in bit offsets:
                (a - 2, a - 1, a, b - 1),      # bond (a-1, a), segment [a+1, b]
                (b - 1, b, a - 1, b - 2),      # bond (b, b+1), segment [a, b-1]
            ):
                pm = ((1 << (hi - lo + 1)) - 1) << lo if hi >= lo else 0
                seg = m & pm
                if seg not in (0, pm):
                    continue
                if ((m >> i) & 1) == ((m >> j) & 1):
                    continue
                H[lookup[m ^ ((1 << i) | (1 << j))], col] += -0.5 / delta
        return H

    def test_matches_closed_form(self):
        p = params_from_q(0.25)
        L, n, J = 6, 3, (3, 4)
        basis = SectorBasis.build((1, L), n)
        for bc in ("00", "++"):
            h = HamiltonianHandle((1, L), BoundarySpec.from_code(bc), p)
            dc = double_commutator_dense(h, basis, J)
            oracle = self._closed_form_dense(basis, J, p.delta)
            assert np.max(np.abs(dc - oracle)) <= 1e-13
            rng = np.random.default_rng(1)
            v = SectorVector(basis, rng.standard_normal(basis.dim))
            out = double_commutator_apply(h, J, v).amplitudes
            assert np.max(np.abs(out - oracle @ v.amplitudes)) <= 1e-13

    def test_norm_bound(self):
        p = params_from_q(0.25)
        basis = SectorBasis.build((1, 6), 3)
        h = HamiltonianHandle((1, 6), BoundarySpec.from_code("++"), p)
        nrm = np.linalg.norm(double_commutator_dense(h, basis, (3, 4)), 2)
        assert nrm <= 1 / p.delta + 1e-12

    def test_support(self):
        p = params_from_q(0.25)
        L, J = 8, (4, 5)
        basis = SectorBasis.build((1, L), 2)
        v = np.zeros(basis.dim)
        v[rank(SpinConfiguration((1, L), 0b00000011), basis)] = 1.0  # downs at 1,2
        h = HamiltonianHandle((1, L), BoundarySpec.from_code("++"), p)
        out = double_commutator_apply(h, J, SectorVector(basis, v))
        assert np.max(np.abs(out.amplitudes)) == 0.0

    def test_boundary_interval_rejected(self):
        p = params_from_q(0.25)
        basis = SectorBasis.build((1, 6), 3)
        h = HamiltonianHandle((1, 6), BoundarySpec.from_code("++"), p)
        with pytest.raises(ValueError):
            double_commutator_apply(h, (1, 2), SectorVector(basis, np.zeros(basis.dim)))
