import json
import math

import numpy as np
import pytest

from xxzdroplet.basis import SectorBasis
from xxzdroplet.operators import BoundarySpec, HamiltonianHandle
from xxzdroplet.qcore import params_from_q
from xxzdroplet.spectral import eig_dense
from xxzdroplet.verify import (
    CheckReport,
    check_kink_gap,
    check_polarized_interval,
    check_prop24,
    check_ring,
    check_theorem1,
    check_theorem2,
    check_truncation_convergence,
    check_xxz_gap,
    measure_epsilon_lambda,
    run_check,
    suite,
)


class TestKinkGapCheck:
    def test_small_examples(self):
        r = check_kink_gap(L=4, q=0.25)
        assert r.passed
        assert "0.667243867" in r.notes
        assert check_kink_gap(L=2, q=0.5).passed  # gap exactly 1 here
        assert check_kink_gap(L=12, q=0.25).passed

    def test_gap_value_recorded(self):
        r = check_kink_gap(L=2, q=0.5)
        assert "gap value 1" in r.notes


class TestXxzGapCheck:
    def test_examples(self):
        r = check_xxz_gap(L=3, q=0.25)
        assert r.passed
        # lowest level outside the polarized sectors is at least gamma/2 = 9/34
        lowest = float(r.notes.split()[-1])
        assert lowest >= 9 / 34 - 1e-12
        assert check_xxz_gap(L=8, q=0.5).passed


class TestProp24Check:
    def test_two_site_spectrum(self):
        # oracle: pooled spectrum {-15/34, 9/34, 15/34, 25/34} at q = 1/4
        p = params_from_q(0.25)
        h = HamiltonianHandle((1, 2), BoundarySpec.from_code("++"), p)
        pooled = sorted(
            float(v)
            for n in range(3)
            for v in eig_dense(h, SectorBasis.build((1, 2), n)).eigenvalues
        )
        expected = [-15 / 34, 9 / 34, 15 / 34, 25 / 34]
        assert pooled == pytest.approx(expected, abs=1e-13)
        assert pooled[1] - pooled[0] == pytest.approx(24 / 34, abs=1e-13)
        assert check_prop24(L=2, q=0.25).passed

    def test_L6(self):
        assert check_prop24(L=6, q=0.25).passed


class TestTheoremChecks:
    def test_theorem1_exact_at_full_down(self):
        r = check_theorem1(L=6, n=6, q=0.25)
        assert r.passed
        assert r.measured["subspace_norm"] <= 1e-12
        assert r.measured["worst_residual"] <= 1e-12

    def test_theorem1_examples(self):
        assert check_theorem1(L=10, n=4, q=0.5).passed

    def test_theorem2_one_dimensional_sector(self):
        r = check_theorem2(L=8, n=8, q=0.25)
        assert r.passed
        assert r.measured["band_width"] <= 1e-12
        assert r.measured["subspace_distance"] <= 1e-6

    def test_theorem2_requires_nonzero_sector(self):
        with pytest.raises(ValueError):
            check_theorem2(L=8, n=0, q=0.25)


class TestPolarizedCheck:
    def test_all_up_trivial(self):
        r = check_polarized_interval(L=8, q=0.25, l=2, source="all_up")
        assert r.passed
        assert r.measured["polarization_deficit"] == 0.0

    def test_droplet_source(self):
        assert check_polarized_interval(L=12, q=0.25, l=2, source="droplet:6:6").passed

    def test_random_source(self):
        assert check_polarized_interval(L=8, q=0.25, l=2, source="random:4:11").passed

    def test_block_length_validation(self):
        with pytest.raises(ValueError):
            check_polarized_interval(L=6, q=0.25, l=6, source="all_up")
        with pytest.raises(ValueError):
            check_polarized_interval(L=6, q=0.25, l=2, source="nonsense")


class TestRingCheck:
    def test_quick_point(self):
        r = check_ring(L=8, n=4, q=0.25)
        assert r.passed
        assert r.measured["translation_overlap_error"] <= 1e-12
        assert r.measured["conjugated_spectrum_error"] <= 1e-12

    def test_sector_validation(self):
        with pytest.raises(ValueError):
            check_ring(L=8, n=0, q=0.25)


class TestEpsilonLambda:
    def test_full_sector_zero(self):
        r = measure_epsilon_lambda(L=6, n=6, q=0.25)
        assert r.passed
        assert r.measured["epsilon"] == 0.0

    def test_lambda_zero(self):
        r = measure_epsilon_lambda(L=8, n=4, q=0.25, lam=0.0)
        assert r.passed
        # at lam = 0 epsilon is the droplet-band underside, order q^n
        assert 0.0 <= r.measured["epsilon"] <= 2 * 0.25**4 / (1 - 0.25**4)

    def test_monotonicities(self):
        r = measure_epsilon_lambda(L=10, n=4, q=0.25)
        assert r.passed
        assert r.measured["lambda_monotonicity_violation"] <= 1e-10
        assert r.measured["n_monotonicity_violation"] <= 1e-10

    def test_lambda_range(self):
        with pytest.raises(ValueError):
            measure_epsilon_lambda(L=6, n=3, q=0.25, lam=0.6)


class TestTruncation:
    def test_sequence(self):
        r = check_truncation_convergence(q=0.25, L_list=(6, 8, 10))
        assert r.passed
        devs = [r.measured[k] for k in sorted(r.measured) if k.startswith("deviation")]
        assert all(d > 0 for d in devs)

    def test_q_half(self):
        assert check_truncation_convergence(q=0.5, L_list=(6, 8, 10)).passed

    def test_named_example_pairs(self):
        r = check_truncation_convergence(q=0.25, L_list=(8, 12))
        assert r.measured["deviation_L12_n6"] < r.measured["deviation_L8_n4"]


class TestReportPlumbing:
    def test_json_schema(self):
        r = check_kink_gap(L=4, q=0.25)
        payload = json.loads(r.to_json())
        assert set(payload) == {"name", "params", "measured", "bound", "pass", "margin", "notes"}
        assert payload["pass"] is True

    def test_reproducible(self):
        a = run_check("polarized_interval", L=8, q=0.25, l=2, source="random:4:3")
        b = run_check("polarized_interval", L=8, q=0.25, l=2, source="random:4:3")
        assert a.to_json() == b.to_json()

    def test_unknown_name(self):
        with pytest.raises(KeyError):
            run_check("no_such_check")

    def test_margin_sign(self):
        r = CheckReport("x", {}, {"v": 2.0}, {"v": 1.0}, False, -1.0)
        assert not r.passed

    def test_quick_suite_passes(self):
        reports = suite("quick")
        assert len(reports) == 10
        assert all(r.passed for r in reports)


class TestBandWidthSequence:
    def test_strictly_decreasing_L12(self):
        widths = [
            check_theorem2(L=12, n=n, q=0.25).measured["band_width"]
            for n in range(3, 10)
        ]
        assert all(a > b for a, b in zip(widths, widths[1:]))
