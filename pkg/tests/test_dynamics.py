"""Exploratory-dynamics layer: orbits, exponents, stability, scans, demo."""
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triopoly import PAPER_BOX, PAPER_PARAMS
from triopoly.core import (
    DomainError,
    Params,
    State,
    boundary_fixed_point,
    eval_jacobian,
    interior_fixed_point,
)
from triopoly.dynamics import (
    bifurcation_scan,
    classify_eigenvalues,
    classify_equilibrium,
    find_covering_pair,
    logistic_sap_demo,
    lyapunov_spectrum,
    simulate,
    verify_covering,
)

P = PAPER_PARAMS

# log-moduli of the interior rest point's Jacobian eigenvalues at the reference
# parameters, frozen from an eigensolver run cross-checked against the
# characteristic polynomial (routes agreed to ~1e-14)
NASH_LOG_MODULI = (1.3197533046280245, -0.7034664209039615, -2.0790380143194307)
NASH_LARGEST_MODULUS = 3.742498006432076

# adjustment rate at which the leading real eigenvalue crosses -1, frozen
# from a 200-step bisection on the analytic Jacobian
ALPHA_FLIP = 6.642795406840346

# a start whose orbit at alpha = 9 stays bounded and carries a positive
# largest exponent (~0.225); at alpha = 8.0 exactly every bounded orbit we
# sampled settles on a periodic attractor, so the chaotic-regime anchor
# sits at 9
CHAOS_ALPHA = 9.0
CHAOS_START = State(0.63, 0.35, 0.20)


def _params_with_alpha(alpha: float) -> Params:
    return Params(P.c1, P.c2, P.c3, alpha)


class TestSimulate:
    def test_nash_start_is_constant_orbit(self):
        fp = interior_fixed_point(P)
        rec = simulate(P, fp, 100)
        assert not rec.escaped
        assert rec.n_recorded == 100
        assert (rec.points == np.array(fp.as_tuple())).all()

    def test_boundary_fixed_point_also_pinned(self):
        fp = boundary_fixed_point(P)
        rec = simulate(P, fp, 50)
        assert not rec.escaped
        assert (rec.points[:, 2] == 0.0).all()

    def test_escape_is_data_not_exception(self):
        rec = simulate(P, State(0.6, 0.4, 0.3), 10_000)
        assert rec.escaped
        assert rec.escape_step == rec.n_recorded
        # everything recorded up to the escape is a valid finite state
        for row in rec.points:
            State(*row)

    def test_escape_during_transient_records_nothing(self):
        rec = simulate(P, State(0.6, 0.4, 0.3), 50, transient=9000)
        assert rec.escaped
        assert rec.n_recorded == 0
        assert rec.escape_step < 9000

    def test_majority_escape_at_paper_alpha(self):
        rng = np.random.default_rng(20260814)
        b = PAPER_BOX
        escapes = 0
        for _ in range(100):
            s0 = State(
                rng.uniform(b.x_l, b.x_r),
                rng.uniform(b.y_l, b.y_r),
                rng.uniform(b.z_l, b.z_r),
            )
            escapes += simulate(P, s0, 10_000).escaped
        assert escapes > 50

    def test_alpha8_orbit_near_nash_stays_bounded(self):
        p8 = _params_with_alpha(8.0)
        fp = interior_fixed_point(p8)
        rec = simulate(p8, State(fp.x + 1e-3, fp.y - 1e-3, fp.z + 1e-3), 100_000)
        assert not rec.escaped

    def test_custom_safety_region(self):
        rec = simulate(P, State(0.6, 0.4, 0.3), 10, safety=(0.0, 0.2))
        assert rec.escape_step == 0
        assert rec.n_recorded == 0

    def test_csv_round_trip(self):
        rec = simulate(P, State(0.6, 0.4, 0.3), 10_000)
        buf = io.StringIO()
        rec.to_csv(buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "step,x,y,z"
        assert len(lines) == 1 + rec.n_recorded
        first = lines[1].split(",")
        assert int(first[0]) == 0
        assert float(first[1]) == 0.6

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            simulate(P, State(0.6, 0.4, 0.3), -1)
        with pytest.raises(ValueError):
            simulate(P, State(0.6, 0.4, 0.3), 10, safety=(1.0, 1.0))

    @given(
        x=st.floats(0.55, 0.65),
        y=st.floats(0.3, 0.45),
        z=st.floats(0.01, 0.39),
        n=st.integers(1, 200),
    )
    @settings(max_examples=30, deadline=None)
    def test_deterministic(self, x, y, z, n):
        a = simulate(P, State(x, y, z), n)
        b = simulate(P, State(x, y, z), n)
        assert a.escape_step == b.escape_step
        assert (a.points == b.points).all()


class TestLyapunov:
    @pytest.mark.parametrize("which", ["interior", "boundary"])
    def test_fixed_point_exponents_match_eigensolver(self, which):
        fp = interior_fixed_point(P) if which == "interior" else boundary_fixed_point(P)
        ly = lyapunov_spectrum(P, fp, 10_000)
        oracle = np.sort(np.log(np.abs(np.linalg.eigvals(eval_jacobian(P, fp)))))[::-1]
        assert not ly.escaped
        assert max(abs(a - b) for a, b in zip(ly.exponents, oracle)) < 1e-6

    def test_nash_exponents_frozen_values(self):
        ly = lyapunov_spectrum(P, interior_fixed_point(P), 10_000)
        assert ly.exponents == pytest.approx(NASH_LOG_MODULI, abs=1e-9)

    def test_exponents_sorted_descending(self):
        ly = lyapunov_spectrum(_params_with_alpha(CHAOS_ALPHA), CHAOS_START, 5000,
                               transient=2000)
        assert ly.exponents[0] >= ly.exponents[1] >= ly.exponents[2]

    def test_chaotic_regime_positive_largest(self):
        ly = lyapunov_spectrum(_params_with_alpha(CHAOS_ALPHA), CHAOS_START, 20_000,
                               transient=5000)
        assert not ly.escaped
        assert 0.1 < ly.exponents[0] < 0.4

    def test_doubling_changes_estimate_below_ten_percent(self):
        p9 = _params_with_alpha(CHAOS_ALPHA)
        a = lyapunov_spectrum(p9, CHAOS_START, 20_000, transient=5000)
        b = lyapunov_spectrum(p9, CHAOS_START, 40_000, transient=5000)
        assert abs(a.exponents[0] - b.exponents[0]) < 0.1 * abs(b.exponents[0])

    def test_escape_flags_partial_estimate(self):
        ly = lyapunov_spectrum(P, State(0.6, 0.4, 0.3), 5000)
        assert ly.escaped
        assert 0 < ly.steps < 5000
        assert all(math.isfinite(v) for v in ly.exponents)
        assert "partial" in ly.note

    def test_unpacks_as_three_reals(self):
        l1, l2, l3 = lyapunov_spectrum(P, interior_fixed_point(P), 2000)
        assert l1 > 0 > l2 > l3

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            lyapunov_spectrum(P, CHAOS_START, 0)
        with pytest.raises(ValueError):
            lyapunov_spectrum(P, CHAOS_START, 10, qr_warmup=10)


class TestClassification:
    def test_paper_params_unstable(self):
        rep = classify_equilibrium(P)
        assert rep.classification == "unstable"
        assert rep.moduli[0] == pytest.approx(NASH_LARGEST_MODULUS, abs=1e-12)
        assert rep.moduli[0] >= rep.moduli[1] >= rep.moduli[2]

    def test_flip_critical_alpha(self):
        rep = classify_equilibrium(_params_with_alpha(ALPHA_FLIP))
        assert rep.classification == "flip-critical"

    def test_stable_below_flip(self):
        rep = classify_equilibrium(_params_with_alpha(6.14))
        assert rep.classification == "stable"
        assert rep.moduli[0] < 1

    def test_scaling_spectrum_by_one_is_idempotent(self):
        rep = classify_equilibrium(P)
        ev = np.array(rep.eigenvalues) * 1.0
        assert classify_eigenvalues(ev, rep.tol) == rep.classification

    def test_neimark_sacker_tag(self):
        ev = [0.3, complex(0.6, 0.8), complex(0.6, -0.8)]
        assert classify_eigenvalues(ev) == "Neimark-Sacker-critical"

    def test_flip_takes_precedence(self):
        ev = [-1.0, complex(0.6, 0.8), complex(0.6, -0.8)]
        assert classify_eigenvalues(ev) == "flip-critical"

    def test_nonpositive_fixed_point_raises(self):
        with pytest.raises(DomainError):
            classify_equilibrium(Params(2.2, 0.2, 0.2, 17.0))

    def test_z_row_derivative_tends_to_one_from_below(self):
        # at the interior rest point the z-row diagonal is 1 - alpha*const,
        # so it climbs to 1 from below as the adjustment rate vanishes
        vals = []
        for alpha in (1.0, 1e-3, 1e-6):
            pa = _params_with_alpha(alpha)
            jac = eval_jacobian(pa, interior_fixed_point(pa))
            vals.append(jac[2, 2])
        assert all(v < 1.0 for v in vals)
        assert vals[0] < vals[1] < vals[2]
        slopes = [(1.0 - v) / a for v, a in zip(vals, (1.0, 1e-3, 1e-6))]
        assert slopes[0] == pytest.approx(slopes[2], rel=1e-9)

    def test_report_dict(self):
        d = classify_equilibrium(P).as_dict()
        assert d["classification"] == "unstable"
        assert len(d["eigenvalues"]) == 3


class TestBifurcationScan:
    def test_same_seed_identical_table(self):
        a = bifurcation_scan(P, (5.0, 9.5), 8, seed=42)
        b = bifurcation_scan(P, (5.0, 9.5), 8, seed=42)
        sa, sb = io.StringIO(), io.StringIO()
        a.to_csv(sa)
        b.to_csv(sb)
        assert sa.getvalue() == sb.getvalue()

    def test_threads_do_not_change_result(self):
        a = bifurcation_scan(P, (5.0, 9.5), 8, seed=42)
        b = bifurcation_scan(P, (5.0, 9.5), 8, seed=42, threads=4)
        assert a.rows == b.rows

    def test_degenerate_range_equals_simulate(self):
        tab = bifurcation_scan(P, (6.0, 6.0), 3, s0_policy="nash", seed=7)
        assert len(set(r.alpha for r in tab.rows)) == 1
        p6 = _params_with_alpha(6.0)
        rec = simulate(p6, interior_fixed_point(p6), 200, transient=1000)
        assert tab.rows[0].z_values == tuple(rec.points[-32:, 2])
        assert tab.rows[0] == tab.rows[1] == tab.rows[2]

    def test_escapes_recorded_scan_continues(self):
        tab = bifurcation_scan(P, (16.0, 20.0), 5, seed=1)
        assert all(r.escaped for r in tab.rows)
        assert all(math.isnan(r.lyap1) for r in tab.rows)
        assert len(tab.rows) == 5

    def test_single_to_multi_point_transition(self):
        # crossing the flip cascade: a settled orbit below the critical
        # rate, a spread-out asymptotic set with positive exponent above
        tab = bifurcation_scan(P, (5.0, 9.0), 9, seed=3)
        low = tab.rows[0]
        assert not low.escaped
        assert max(low.z_values) - min(low.z_values) < 1e-6
        assert low.lyap1 < 0
        high = tab.rows[-1]
        assert not high.escaped
        assert max(high.z_values) - min(high.z_values) > 1e-3
        assert high.lyap1 > 0

    @pytest.mark.parametrize(
        "rng,samples",
        [((0.0, 5.0), 3), ((1.0, 21.0), 3), ((3.0, 2.0), 3), ((1.0, 2.0), 1)],
    )
    def test_rejects_bad_ranges(self, rng, samples):
        with pytest.raises(ValueError):
            bifurcation_scan(P, rng, samples)

    def test_csv_shape(self):
        tab = bifurcation_scan(P, (6.0, 6.5), 2, seed=0, z_values=4)
        buf = io.StringIO()
        tab.to_csv(buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "alpha,escaped,lyap1,z00,z01,z02,z03"
        assert len(lines) == 3

    def test_unknown_policy_rejected(self):
        with pytest.raises(ValueError):
            bifurcation_scan(P, (5.0, 6.0), 2, s0_policy="bogus")


class TestLogisticDemo:
    def test_mu_45_first_iterate_certificate(self):
        rep = logistic_sap_demo(4.5)
        assert rep.first is not None
        assert rep.first.verified
        # preimages of the unit interval under the two monotone branches
        assert rep.first.i0[0] == 0.0
        assert rep.first.i0[1] == pytest.approx(1 / 3, abs=1e-12)
        assert rep.first.i1[0] == pytest.approx(2 / 3, abs=1e-12)
        assert rep.first.i1[1] == 1.0

    def test_mu_388_second_iterate_certificate(self):
        rep = logistic_sap_demo(3.88)
        assert rep.first is None
        assert rep.second is not None
        assert rep.second.verified
        got = rep.second.i0 + rep.second.i1
        oracle = (
            0.22533583649891586,
            0.44716457185363967,
            0.5528354281463601,
            0.774664163501084,
        )
        assert got == pytest.approx(oracle, abs=1e-9)

    def test_mu_2_no_certificates(self):
        rep = logistic_sap_demo(2.0)
        assert rep.first is None
        assert rep.second is None
        assert not rep.any_certificate

    def test_mu_4_exactly_has_no_first_iterate_pair(self):
        # the hump only reaches 1, so the two preimage intervals share the
        # peak point; the exact-arithmetic endpoint check must reject the
        # float plateau around it
        rep = logistic_sap_demo(4.0)
        assert rep.first is None

    def test_verifier_rejects_tampering(self):
        from dataclasses import replace

        cert = logistic_sap_demo(3.88).second
        widened = replace(cert, i0=(cert.i0[0], cert.i1[0] + 1e-3))
        assert not verify_covering(3.88, widened)
        shifted = replace(cert, hull=(cert.hull[0] - 0.2, cert.hull[1] + 0.2))
        assert not verify_covering(3.88, shifted)

    def test_report_json_shape(self):
        d = logistic_sap_demo(3.88).as_dict()
        assert d["kind"] == "logistic-covering-demo"
        assert d["first_iterate"] is None
        assert d["second_iterate"]["iterate"] == 2
        assert d["second_iterate"]["verified"] is True

    def test_mu_validation(self):
        with pytest.raises(ValueError):
            logistic_sap_demo(0.0)
        with pytest.raises(ValueError):
            find_covering_pair(1.0, 0)

    @given(mu=st.floats(0.5, 4.5), m=st.integers(1, 2))
    @settings(max_examples=20, deadline=None)
    def test_any_found_pair_verifies(self, mu, m):
        cert = find_covering_pair(mu, m, samples=400)
        if cert is None:
            return
        assert cert.verified
        assert cert.i0[1] < cert.i1[0]
        assert cert.hull[0] <= cert.i0[0] and cert.i1[1] <= cert.hull[1]
