"""Finite-depth symbolic dynamics: itineraries, periodic words, entropy."""
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triopoly import Box, OrientedBox, PAPER_BOX, PAPER_PARAMS
from triopoly.core import (
    DomainError,
    State,
    boundary_fixed_point,
    eval_map_xyz,
    interior_fixed_point,
)
from triopoly.symbolic import (
    MAX_WORD_LENGTH,
    Itinerary,
    count_periodic_words,
    entropy_lower_bound,
    find_periodic_orbit,
    itinerary,
    normalize_word,
    orbits_to_csv,
)

P = PAPER_PARAMS
OB = OrientedBox(PAPER_BOX)


class TestNormalizeWord:
    @pytest.mark.parametrize("w", ["0110", (0, 1, 1, 0), [0, 1, 1, 0]])
    def test_accepted_forms(self, w):
        assert normalize_word(w) == "0110"

    @pytest.mark.parametrize("w", ["", "012", "ab", (0, 2)])
    def test_rejected_forms(self, w):
        with pytest.raises(ValueError):
            normalize_word(w)


class TestItinerary:
    def test_nash_point_is_constant_one(self):
        it = itinerary(P, OB, interior_fixed_point(P), 12)
        assert it.word() == "1" * 12
        assert not it.exited
        assert it.ties == ()

    def test_boundary_point_is_constant_zero(self):
        it = itinerary(P, OB, boundary_fixed_point(P), 12)
        assert it.word() == "0" * 12
        assert not it.exited

    def test_top_corner_exits_at_step_one(self):
        # the image of the far top corner drops below the bottom face, the
        # same inequality that drives the top-face exit condition
        s0 = State(PAPER_BOX.x_r, PAPER_BOX.y_r, PAPER_BOX.z_r)
        it = itinerary(P, OB, s0, 10)
        assert it.exit_step == 1
        assert it.exited
        assert it.symbols == (1,)

    def test_midplane_tie_flagged_symbol_one(self):
        s0 = State(0.6, 0.4, PAPER_BOX.z_mid)
        it = itinerary(P, OB, s0, 1)
        assert it.symbols[0] == 1
        assert 0 in it.ties

    def test_outside_start_rejected(self):
        with pytest.raises(ValueError, match="outside"):
            itinerary(P, OB, State(0.0, 0.4, 0.1), 5)

    def test_bad_horizon_rejected(self):
        with pytest.raises(ValueError):
            itinerary(P, OB, interior_fixed_point(P), 0)

    def test_domain_error_carries_step_index(self):
        # a box straddling x + z <= 0 is geometrically valid but the map
        # cannot be evaluated there; the step should be named
        bad = Box(-2.0, -1.0, 3.0, 4.0, 0.5, 1.5)
        with pytest.raises(DomainError, match="step 1"):
            itinerary(P, OrientedBox(bad), State(-1.5, 3.5, 1.0), 5)

    def test_horizon_one_never_exits(self):
        it = itinerary(P, OB, State(PAPER_BOX.x_r, PAPER_BOX.y_r, PAPER_BOX.z_r), 1)
        assert it.symbols == (1,)
        assert not it.exited


class TestFindPeriodicOrbit:
    def test_word_1_is_nash(self):
        r = find_periodic_orbit(P, OB, "1")
        assert r.converged
        assert r.point.as_tuple() == pytest.approx(
            interior_fixed_point(P).as_tuple(), abs=1e-9
        )

    def test_word_0_is_boundary_point(self):
        r = find_periodic_orbit(P, OB, "0")
        assert r.converged
        assert r.point.z == 0.0
        assert r.point.as_tuple() == pytest.approx(
            boundary_fixed_point(P).as_tuple(), abs=1e-9
        )

    def test_word_01_genuine_two_cycle(self):
        r = find_periodic_orbit(P, OB, "01")
        assert r.converged
        assert r.residual < 1e-8
        assert r.realized == "01"
        for fp in (interior_fixed_point(P), boundary_fixed_point(P)):
            assert max(
                abs(a - b) for a, b in zip(r.point.as_tuple(), fp.as_tuple())
            ) > 1e-3

    def test_converged_point_in_first_symbol_half(self):
        mid = PAPER_BOX.z_mid
        for word in ("01", "10", "011"):
            r = find_periodic_orbit(P, OB, word)
            assert r.converged
            if word[0] == "0":
                assert r.point.z <= mid
            else:
                assert r.point.z >= mid

    def test_word_accepts_tuple_form(self):
        r = find_periodic_orbit(P, OB, (0, 1))
        assert r.word == "01"

    def test_uncertified_box_refused(self):
        bad = OrientedBox(
            Box(PAPER_BOX.x_l, PAPER_BOX.x_r, PAPER_BOX.y_l, PAPER_BOX.y_r, 0.0, 0.38)
        )
        with pytest.raises(ValueError, match="certif"):
            find_periodic_orbit(P, bad, "01")

    def test_bad_tol_rejected(self):
        with pytest.raises(ValueError):
            find_periodic_orbit(P, OB, "01", tol=0.0)


class TestCountPeriodicWords:
    @pytest.mark.parametrize("k,expected", [(1, 2), (2, 4), (3, 8)])
    def test_all_words_realized(self, k, expected):
        results = count_periodic_words(P, OB, k)
        assert len(results) == expected
        assert all(r.converged for r in results)
        assert all(r.residual < 1e-8 for r in results)
        assert sorted(r.word for r in results) == sorted(
            format(i, f"0{k}b") for i in range(2**k)
        )

    def test_k4_all_sixteen(self):
        results = count_periodic_words(P, OB, 4)
        assert sum(r.converged for r in results) == 16

    def test_shift_semiconjugacy_to_depth_2k(self):
        for k in (1, 2, 3):
            for r in count_periodic_words(P, OB, k):
                image = State(*eval_map_xyz(P, *r.point.as_tuple()))
                it = itinerary(P, OB, image, 2 * k)
                rotated = r.word[1:] + r.word[0]
                assert it.word() == rotated * 2
                assert not it.exited

    def test_cyclic_dedupe_counts_necklaces(self):
        results = count_periodic_words(P, OB, 4, dedupe_cyclic=True)
        assert sorted(r.word for r in results) == [
            "0000",
            "0001",
            "0011",
            "0101",
            "0111",
            "1111",
        ]

    def test_word_length_cap(self):
        with pytest.raises(ValueError):
            count_periodic_words(P, OB, 0)
        with pytest.raises(ValueError):
            count_periodic_words(P, OB, MAX_WORD_LENGTH + 1)

    def test_csv_export(self):
        results = count_periodic_words(P, OB, 2)
        buf = io.StringIO()
        orbits_to_csv(results, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "word,x,y,z,residual,converged,realized"
        assert len(lines) == 5
        assert lines[1].startswith("00,")


class TestEntropyBound:
    def test_certified_gives_log_two(self):
        assert entropy_lower_bound(True) == 0.6931471805599453
        assert entropy_lower_bound(True) == math.log(2.0)

    def test_uncertified_gives_zero(self):
        assert entropy_lower_bound(False) == 0.0

    def test_three_symbol_hook(self):
        assert entropy_lower_bound(True, m=3) == math.log(3.0)
        assert entropy_lower_bound(False, m=3) == 0.0

    def test_degenerate_alphabet_rejected(self):
        with pytest.raises(ValueError):
            entropy_lower_bound(True, m=1)


@given(
    x=st.floats(0.58, 0.63),
    y=st.floats(0.34, 0.45),
    z=st.floats(0.0, 0.395),
    n=st.integers(1, 8),
)
@settings(max_examples=40, deadline=None)
def test_itinerary_symbols_match_per_step_membership(x, y, z, n):
    """Each symbol is exactly the half-box membership of that iterate."""
    it = itinerary(P, OB, State(x, y, z), n)
    mid = PAPER_BOX.z_mid
    cur = (x, y, z)
    for step, sym in enumerate(it.symbols):
        assert sym == (1 if cur[2] >= mid else 0)
        cur = eval_map_xyz(P, *cur)
        if it.exit_step == step + 1:
            assert not PAPER_BOX.contains(*cur)
            break
