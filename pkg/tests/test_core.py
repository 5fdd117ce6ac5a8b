"""Map evaluation, Jacobian, and fixed points against independently
recomputed values (50-digit arithmetic seeded with the exact double
parameters, so the anchors reflect what the doubles actually encode)."""
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from triopoly import (
    DomainError,
    PAPER_BOX,
    PAPER_PARAMS,
    Params,
    State,
    eval_jacobian,
    eval_map,
    eval_map_xyz,
    fixed_point_residual,
    fixed_points,
)
from triopoly.core import boundary_fixed_point, interior_fixed_point

# image of (1, 1, 1) under the reference parameters, recomputed independently
F_111 = (0.1999999999999999, -0.09307482150881545, -5.4222222222222216)


def test_eval_map_anchor_point():
    got = eval_map_xyz(PAPER_PARAMS, 1.0, 1.0, 1.0)
    for g, want in zip(got, F_111):
        assert abs(g - want) <= 2 * math.ulp(want)


def test_eval_map_state_roundtrip():
    s = State(1.0, 1.0, 1.0)
    out = eval_map(PAPER_PARAMS, s)
    assert out.as_tuple() == eval_map_xyz(PAPER_PARAMS, 1.0, 1.0, 1.0)


@pytest.mark.parametrize(
    "x,y,z",
    [
        (0.0, 1.0, 0.0),     # x + z = 0
        (-0.3, 1.0, 0.2),    # x + z < 0
        (0.5, -1.0, 0.2),    # x + y + z < 0
    ],
)
def test_domain_errors(x, y, z):
    with pytest.raises(DomainError):
        eval_map_xyz(PAPER_PARAMS, x, y, z)


@given(
    st.floats(min_value=0.05, max_value=3.0),
    st.floats(min_value=0.05, max_value=3.0),
)
def test_zero_plane_is_exactly_invariant(x, y):
    """The z-update is factored as z * (...), so z = 0 maps to exactly 0.0
    in floating point, not merely something small."""
    _, _, f3 = eval_map_xyz(PAPER_PARAMS, x, y, 0.0)
    assert f3 == 0.0


def test_params_validation():
    with pytest.raises(ValueError):
        Params(c1=0.0, c2=0.55, c3=0.6, alpha=17.0)
    with pytest.raises(ValueError):
        Params(c1=0.4, c2=-1.0, c3=0.6, alpha=17.0)
    with pytest.raises(ValueError):
        Params(c1=0.4, c2=0.55, c3=0.6, alpha=math.nan)


def test_gradient_bound_defined_flag():
    assert PAPER_PARAMS.gradient_bound_defined  # 17 * 0.6 > 1
    assert not Params(c1=0.4, c2=0.55, c3=0.6, alpha=1.0).gradient_bound_defined


def test_state_validation():
    with pytest.raises(ValueError):
        State(math.inf, 0.0, 0.0)
    with pytest.raises(ValueError):
        State(0.1, math.nan, 0.0)


def _fd_jacobian(p, x, y, z, h=1e-7):
    cols = []
    for dx, dy, dz in ((h, 0, 0), (0, h, 0), (0, 0, h)):
        fp = eval_map_xyz(p, x + dx, y + dy, z + dz)
        fm = eval_map_xyz(p, x - dx, y - dy, z - dz)
        cols.append([(a - b) / (2 * h) for a, b in zip(fp, fm)])
    return np.array(cols).T


def test_jacobian_matches_central_differences():
    rng = np.random.default_rng(42)
    b = PAPER_BOX
    worst = 0.0
    for _ in range(1000):
        x, y, z = (rng.uniform(*b.bounds(i)) for i in range(3))
        z = max(z, 1e-3)  # keep away from the degenerate FD stencil at z=0
        ana = eval_jacobian(PAPER_PARAMS, State(x, y, z))
        num = _fd_jacobian(PAPER_PARAMS, x, y, z)
        scale = np.maximum(np.abs(ana), 1.0)
        worst = max(worst, float(np.max(np.abs(ana - num) / scale)))
    assert worst < 1e-6, f"worst relative Jacobian error {worst:.3e}"


def test_jacobian_anchor_entry():
    # dF1/dx at the interior fixed point equals 1 - c1 * 2/(c1+c2+c3)
    s = interior_fixed_point(PAPER_PARAMS)
    j = eval_jacobian(PAPER_PARAMS, s)
    assert abs(j[0, 0] - 0.4838709677419355) < 1e-14


def test_interior_fixed_point():
    p = PAPER_PARAMS
    s = interior_fixed_point(p)
    assert abs(s.x - 0.6243496357960458) < 1e-15
    assert abs(s.y - 0.37460978147762747) < 1e-15
    assert abs(s.z - 0.291363163371488) < 1e-15
    assert fixed_point_residual(p, s) < 1e-14
    # balance identities: each rival pair sums to c_i * Q^2
    q = s.x + s.y + s.z
    assert abs((s.y + s.z) - p.c1 * q * q) < 1e-13
    assert abs((s.x + s.z) - p.c2 * q * q) < 1e-13
    assert abs((s.x + s.y) - p.c3 * q * q) < 1e-13


def test_boundary_fixed_point():
    p = PAPER_PARAMS
    s = boundary_fixed_point(p)
    assert s.z == 0.0
    assert abs(s.x - 0.6094182825484765) < 1e-15
    assert abs(s.y - 0.44321329639889197) < 1e-15
    res = eval_map(p, s)
    assert abs(res.x - s.x) < 1e-14 and abs(res.y - s.y) < 1e-14
    assert res.z == 0.0


def test_fixed_points_returns_both_and_warns_when_degenerate():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        pts = fixed_points(PAPER_PARAMS)
    assert len(pts) == 2
    # strongly asymmetric costs push the interior point out of the
    # positive octant; the helper should flag that instead of failing
    bad = Params(c1=2.2, c2=0.2, c3=0.2, alpha=17.0)
    with pytest.warns(UserWarning):
        fixed_points(bad)


@given(
    st.floats(min_value=0.1, max_value=2.0),
    st.floats(min_value=0.1, max_value=2.0),
    st.floats(min_value=0.0, max_value=2.0),
)
def test_map_is_deterministic(x, y, z):
    a = eval_map_xyz(PAPER_PARAMS, x, y, z)
    b = eval_map_xyz(PAPER_PARAMS, x, y, z)
    assert a == b
