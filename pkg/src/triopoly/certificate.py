"""Analytic chaos certificate for a candidate box.

Two stacked layers:

* ``check_H``   -- the five closed-form hypothesis groups (H1)-(H5) on the
  box corners.  Pure float arithmetic, margins are reported per atomic
  inequality.
* ``check_C_analytic`` -- the five covering conditions (C1), (C2), (C3'),
  (C4), (C5) on the map image, each reduced to a one-dimensional monotone
  section whose extremum has a closed form.  The reductions only apply when
  their monotonicity preconditions hold; a violated precondition yields an
  ``inapplicable`` record (distinct from ``fail``: the condition itself may
  still be true, this engine just cannot decide it).

What the full certificate buys: every path joining the bottom face z = z_l
to the top face z = z_r has two disjoint subpaths, one per half-box, whose
images again join the two faces while staying inside the box cross-section.
That is the stretching-along-paths property on two symbols, and it forces a
topological horseshoe: periodic points of every word and entropy >= log 2.

``certify_box`` merges the layers and optionally cross-checks the C layer
against the rigorous interval oracle in :mod:`triopoly.bounds`.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

from .boxes import Box
from .core import Params

__all__ = [
    "SubCheck",
    "ConditionRecord",
    "Certificate",
    "check_H",
    "check_C_analytic",
    "certify_box",
    "SCHEMA_VERSION",
    "DEFAULT_MIN_MARGIN",
    "CONDITION_IDS",
]

SCHEMA_VERSION = 1
DEFAULT_MIN_MARGIN = 1e-12

H_IDS = ("H1", "H2", "H3", "H4", "H5")
C_IDS = ("C1", "C2", "C3p", "C4", "C5")
CONDITION_IDS = H_IDS + C_IDS

PASS = "pass"
FAIL = "fail"
INAPPLICABLE = "inapplicable"
INCONCLUSIVE = "inconclusive"


@dataclass
class SubCheck:
    """One atomic inequality: ``lhs relation rhs`` with margin = lhs - rhs
    oriented so that positive means satisfied."""

    cid: str
    lhs: Optional[float]
    rhs: Optional[float]
    relation: str
    margin: Optional[float]
    status: str
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "id": self.cid,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "relation": self.relation,
            "margin": self.margin,
            "status": self.status,
            "note": self.note,
        }


@dataclass
class ConditionRecord:
    """Verdict for one of the ten certificate conditions.

    ``lhs``/``rhs``/``margin`` mirror the *binding* subcheck (the one with
    the smallest margin), so ``margin`` is always the recomputable signed
    distance to violation of the tightest inequality.
    """

    cid: str
    status: str
    lhs: Optional[float]
    rhs: Optional[float]
    relation: str
    margin: Optional[float]
    engine: str
    subchecks: list[SubCheck] = field(default_factory=list)
    note: str = ""
    interval: Optional[dict] = None

    def as_dict(self) -> dict:
        d = {
            "id": self.cid,
            "status": self.status,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "relation": self.relation,
            "margin": self.margin,
            "engine": self.engine,
            "note": self.note,
            "subchecks": [s.as_dict() for s in self.subchecks],
        }
        if self.interval is not None:
            d["interval"] = self.interval
        return d


@dataclass
class Certificate:
    params: Params
    box: Box
    conditions: list[ConditionRecord]
    engine: str
    verdict: str = ""
    tol: Optional[float] = None
    min_margin: float = DEFAULT_MIN_MARGIN

    def __post_init__(self) -> None:
        if not self.verdict:
            self.verdict = derive_verdict(self.conditions)

    @property
    def passed(self) -> bool:
        return self.verdict == "certified"

    def condition(self, cid: str) -> ConditionRecord:
        for rec in self.conditions:
            if rec.cid == cid:
                return rec
        raise KeyError(f"no condition {cid!r} in certificate")

    def min_margin_over(self, ids=None) -> float:
        """Smallest margin across the selected (default: all) conditions."""
        vals = [
            r.margin
            for r in self.conditions
            if r.margin is not None and (ids is None or r.cid in ids)
        ]
        return min(vals) if vals else float("nan")

    def merged_with(self, other: "Certificate", engine: str) -> "Certificate":
        conds = list(self.conditions) + list(other.conditions)
        return Certificate(
            params=self.params,
            box=self.box,
            conditions=conds,
            engine=engine,
            tol=self.tol if self.tol is not None else other.tol,
            min_margin=self.min_margin,
        )

    def as_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "chaos-certificate",
            "engine": self.engine,
            "verdict": self.verdict,
            "params": self.params.as_dict(),
            "box": self.box.as_dict(),
            "tol": self.tol,
            "min_margin": self.min_margin,
            "conditions": [c.as_dict() for c in self.conditions],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(_sanitize(self.as_dict()), indent=indent, allow_nan=False)


def _sanitize(obj):
    """Replace non-finite floats so the JSON stays standard."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_sanitize(v) for v in obj]
    return obj


def derive_verdict(conditions) -> str:
    statuses = {rec.status for rec in conditions}
    if FAIL in statuses:
        return "failed"
    if INAPPLICABLE in statuses:
        return "inapplicable"
    if INCONCLUSIVE in statuses:
        return "inconclusive"
    return "certified"


# ---------------------------------------------------------------------------
# atomic inequality helpers
# ---------------------------------------------------------------------------

def _strict(cid, lhs, rhs, min_margin, note="") -> SubCheck:
    margin = lhs - rhs
    status = PASS if margin > min_margin else FAIL
    return SubCheck(cid, lhs, rhs, ">", margin, status, note)


def _weak(cid, lhs, rhs, note="") -> SubCheck:
    margin = lhs - rhs
    status = PASS if margin >= 0.0 else FAIL
    return SubCheck(cid, lhs, rhs, ">=", margin, status, note)


def _undefined(cid, relation, note) -> SubCheck:
    return SubCheck(cid, None, None, relation, None, FAIL, note)


def _record_from_subchecks(cid, subchecks, engine, note="") -> ConditionRecord:
    if any(s.status == INAPPLICABLE for s in subchecks):
        status = INAPPLICABLE
    elif any(s.status == FAIL for s in subchecks):
        status = FAIL
    else:
        status = PASS
    defined = [s for s in subchecks if s.margin is not None]
    binding = min(defined, key=lambda s: s.margin) if defined else subchecks[0]
    return ConditionRecord(
        cid=cid,
        status=status,
        lhs=binding.lhs,
        rhs=binding.rhs,
        relation=binding.relation,
        margin=binding.margin,
        engine=engine,
        subchecks=list(subchecks),
        note=note or (binding.note if binding.status != PASS else ""),
    )


def _guarded_sqrt(v: float) -> Optional[float]:
    if v < 0.0:
        return None
    return math.sqrt(v)


# ---------------------------------------------------------------------------
# the (H) layer
# ---------------------------------------------------------------------------

def check_H(p: Params, b: Box, min_margin: float = DEFAULT_MIN_MARGIN) -> Certificate:
    """Evaluate the five hypothesis groups on the box corners.

    H2's lower bound for z_r involves sqrt(alpha/(alpha*c3 - 1) * (x_l+y_l))
    and is undefined when alpha*c3 <= 1; that yields an ``inapplicable``
    H2 record rather than a failure, since no verdict either way follows.
    """
    xl, xr, yl, yr, zl, zr = b.as_tuple()
    s_ll = xl + yl
    s_rr = xr + yr

    # H1: the bottom face must sit exactly on the exit plane z = 0.
    h1_margin = -abs(zl)
    h1 = ConditionRecord(
        cid="H1",
        status=PASS if zl == 0.0 else FAIL,
        lhs=zl,
        rhs=0.0,
        relation="==",
        margin=h1_margin,
        engine="analytic",
        subchecks=[SubCheck("H1", zl, 0.0, "==", h1_margin, PASS if zl == 0.0 else FAIL)],
        note="" if zl == 0.0 else "bottom face must lie on z = 0",
    )

    # H2: x_l+y_l > z_r >= sqrt(alpha/(alpha*c3-1)*(x_l+y_l)) - (x_l+y_l) > 0
    if p.alpha * p.c3 <= 1.0:
        h2 = ConditionRecord(
            cid="H2",
            status=INAPPLICABLE,
            lhs=None,
            rhs=None,
            relation=">=",
            margin=None,
            engine="analytic",
            note=f"alpha*c3 = {p.alpha * p.c3} <= 1: escape bound undefined",
        )
    else:
        root = _guarded_sqrt(p.alpha / (p.alpha * p.c3 - 1.0) * s_ll)
        subs = [_strict("H2a", s_ll, zr, min_margin, "x_l+y_l > z_r")]
        if root is None:
            subs.append(_undefined("H2b", ">=", "sqrt of negative operand (x_l+y_l < 0)"))
        else:
            bound = root - s_ll
            subs.append(_weak("H2b", zr, bound, "z_r >= escape bound"))
            subs.append(_strict("H2c", bound, 0.0, min_margin, "escape bound > 0"))
        h2 = _record_from_subchecks("H2", subs, "analytic")

    # H3: 2*(sqrt(alpha/(alpha*c3+1)*(x_r+y_r)) - (x_r+y_r)) > z_r
    root = _guarded_sqrt(p.alpha / (p.alpha * p.c3 + 1.0) * s_rr)
    if root is None:
        subs = [_undefined("H3", ">", "sqrt of negative operand (x_r+y_r < 0)")]
    else:
        subs = [_strict("H3", 2.0 * (root - s_rr), zr, min_margin, "re-entry bound > z_r")]
    h3 = _record_from_subchecks("H3", subs, "analytic")

    # H4: the x-cross-section inequalities.
    inv_c1 = 1.0 / p.c1
    half = 0.5 * inv_c1
    quarter = 0.25 * inv_c1
    subs4 = [
        _strict("H4a", inv_c1 - xr, yr + zr, min_margin, "1/c1 - x_r > y_r+z_r"),
        _strict("H4b", yr + zr, half - xl, min_margin, "y_r+z_r > 1/(2c1) - x_l"),
        _strict("H4c", half - xl, 0.0, min_margin, "1/(2c1) - x_l > 0"),
        _strict("H4d", half - xr, yl + zl, min_margin, "1/(2c1) - x_r > y_l+z_l"),
        _weak("H4e", xr, quarter, "x_r >= 1/(4c1)"),
        _weak(
            "H4f",
            half * (1.0 - p.c1 * (yl + yr + zl + zr)),
            xl,
            "vertex-sum bound >= x_l",
        ),
        _strict("H4g", xl, 0.0, min_margin, "x_l > 0"),
    ]
    root = _guarded_sqrt((yl + zl) / p.c1)
    if root is None:
        subs4.append(_undefined("H4h", ">=", "sqrt of negative operand (y_l+z_l < 0)"))
    else:
        subs4.append(_weak("H4h", root - (yl + zl), xl, "sqrt((y_l+z_l)/c1) - (y_l+z_l) >= x_l"))
    h4 = _record_from_subchecks("H4", subs4, "analytic")

    # H5: the y-cross-section inequalities through psi(D) = sqrt(D/c2) - D.
    def psi(dv: float) -> Optional[float]:
        r = _guarded_sqrt(dv / p.c2)
        return None if r is None else r - dv

    subs5 = [_strict("H5a", xl + zl, 0.25 / p.c2, min_margin, "x_l+z_l > 1/(4c2)")]
    lo_val = psi(xl + zl)
    hi_val = psi(xr + zr)
    if lo_val is None:
        subs5.append(_undefined("H5b", ">=", "sqrt of negative operand (x_l+z_l < 0)"))
    else:
        subs5.append(_weak("H5b", yr, lo_val, "y_r >= psi(x_l+z_l)"))
        subs5.append(_strict("H5c", lo_val, 0.0, min_margin, "psi(x_l+z_l) > 0"))
    if hi_val is None:
        subs5.append(_undefined("H5d", ">=", "sqrt of negative operand (x_r+z_r < 0)"))
    else:
        subs5.append(_weak("H5d", hi_val, yl, "psi(x_r+z_r) >= y_l"))
    subs5.append(_strict("H5e", yl, 0.0, min_margin, "y_l > 0"))
    h5 = _record_from_subchecks("H5", subs5, "analytic")

    return Certificate(
        params=p,
        box=b,
        conditions=[h1, h2, h3, h4, h5],
        engine="analytic",
        min_margin=min_margin,
    )


# ---------------------------------------------------------------------------
# the (C) layer, analytic route
# ---------------------------------------------------------------------------

def _f3_point(p: Params, x: float, y: float, z: float) -> float:
    q = x + y + z
    return z * (1.0 - p.alpha * p.c3 + p.alpha * (x + y) / (q * q))


def _inapplicable(cid, note) -> ConditionRecord:
    return ConditionRecord(
        cid=cid,
        status=INAPPLICABLE,
        lhs=None,
        rhs=None,
        relation="",
        margin=None,
        engine="analytic",
        note=note,
    )


def check_C_analytic(p: Params, b: Box, min_margin: float = DEFAULT_MIN_MARGIN) -> Certificate:
    """Closed-form verdicts for the five covering conditions.

    Each condition is reduced to extremal values of a one-variable section:

    * C1: the bottom face z = z_l = 0 is mapped exactly into the plane
      F3 = 0 (the z-factor of the map makes this exact, not approximate).
    * C2: on the top face, F3 depends on (x, y) only through A = x+y and
      phi(A) = z_r*(1 - alpha*c3 + alpha*A/(A+z_r)^2) is decreasing when
      A > z_r throughout, so max F3 = F3(x_l, y_l, z_r) and it must be <= 0.
    * C3': on the midplane z = (z_l+z_r)/2 the same section is decreasing
      when A > z_mid, so min F3 = F3(x_r, y_r, z_mid) and it must be > z_r.
    * C4: F1 = Phi(x, B) with B = y+z on T = [x_l,x_r] x [y_l+z_l, y_r+z_r];
      Phi has no interior critical point, the max sits at
      (x_r, 1/(2c1) - x_r) with value (x_r + 1/(4c1))/2 and the min at
      (x_l, y_l+z_l); both must stay inside [x_l, x_r].
    * C5: F2 = psi(D) with D = x+z decreasing for D > 1/(4c2), so the range
      over the box is [psi(x_r+z_r), psi(x_l+z_l)] and must sit in [y_l,y_r].

    A violated monotonicity precondition yields ``inapplicable`` naming the
    precondition, so callers can distinguish "condition is false" from
    "this reduction cannot decide".
    """
    xl, xr, yl, yr, zl, zr = b.as_tuple()
    z_mid = b.z_mid

    # C1 ----------------------------------------------------------------
    if zl == 0.0:
        c1_rec = ConditionRecord(
            cid="C1",
            status=PASS,
            lhs=0.0,
            rhs=0.0,
            relation="==",
            margin=0.0,
            engine="analytic",
            note="F3 vanishes identically on the bottom face (exact z-factor)",
        )
    else:
        c1_rec = _inapplicable("C1", "analytic C1 needs z_l = 0 (H1)")

    # C2 ----------------------------------------------------------------
    if not (xl + yl > zr):
        c2_rec = _inapplicable(
            "C2", "precondition x_l+y_l > z_r violated: top-face section not monotone"
        )
    else:
        worst = _f3_point(p, xl, yl, zr)
        sub = _weak("C2", 0.0, worst, "max F3 on top face <= 0")
        c2_rec = _record_from_subchecks("C2", [sub], "analytic")
        c2_rec.note = "max F3 on top face at (x_l, y_l, z_r)"

    # C3' ---------------------------------------------------------------
    if not (xl + yl > z_mid):
        c3_rec = _inapplicable(
            "C3p", "precondition x_l+y_l > z_mid violated: midplane section not monotone"
        )
    else:
        worst = _f3_point(p, xr, yr, z_mid)
        sub = _strict("C3p", worst, zr, min_margin, "min F3 on midplane > z_r")
        c3_rec = _record_from_subchecks("C3p", [sub], "analytic")
        c3_rec.note = "min F3 on midplane at (x_r, y_r, z_mid)"

    # C4 ----------------------------------------------------------------
    b_lo, b_hi = yl + zl, yr + zr
    half = 0.5 / p.c1
    crit_lo = half - xr  # argmax of Phi(x_r, .)
    pre_notes = []
    if not (b_lo <= crit_lo <= b_hi):
        pre_notes.append("1/(2c1) - x_r outside [y_l+z_l, y_r+z_r]")
    if not (1.0 / p.c1 - b_hi > xr):
        pre_notes.append("Phi not increasing in x up to x_r")
    if not (xl <= half * (1.0 - p.c1 * (yl + yr + zl + zr))):
        pre_notes.append("min-candidate ordering needs the vertex-sum bound")
    if pre_notes:
        c4_rec = _inapplicable("C4", "; ".join(pre_notes))
    else:
        phi_max = 0.5 * (xr + 0.25 / p.c1)
        phi_min = 0.5 * (2.0 * xl + b_lo - p.c1 * (xl + b_lo) ** 2)
        subs = [
            _weak("C4max", xr, phi_max, "max F1 <= x_r"),
            _weak("C4min", phi_min, xl, "min F1 >= x_l"),
        ]
        c4_rec = _record_from_subchecks("C4", subs, "analytic")
        c4_rec.note = "extrema at (x_r, 1/(2c1)-x_r) and (x_l, y_l+z_l)"

    # C5 ----------------------------------------------------------------
    d_lo, d_hi = xl + zl, xr + zr
    if not (d_lo > 0.25 / p.c2):
        c5_rec = _inapplicable(
            "C5", "precondition x_l+z_l > 1/(4c2) violated: psi not decreasing on box"
        )
    else:
        psi_hi = math.sqrt(d_lo / p.c2) - d_lo
        psi_lo = math.sqrt(d_hi / p.c2) - d_hi
        subs = [
            _weak("C5max", yr, psi_hi, "max F2 <= y_r"),
            _weak("C5min", psi_lo, yl, "min F2 >= y_l"),
        ]
        c5_rec = _record_from_subchecks("C5", subs, "analytic")
        c5_rec.note = "extrema at D = x_l+z_l and D = x_r+z_r"

    return Certificate(
        params=p,
        box=b,
        conditions=[c1_rec, c2_rec, c3_rec, c4_rec, c5_rec],
        engine="analytic",
        min_margin=min_margin,
    )


# ---------------------------------------------------------------------------
# merged certificate
# ---------------------------------------------------------------------------

def _merge_status(a: str, i: str) -> str:
    """Combine analytic and interval statuses for one C condition.

    A rigorous or analytic failure dominates; a pass needs at least one
    engine to confirm and none to contradict; inconclusive otherwise.
    """
    if FAIL in (a, i):
        return FAIL
    if a == PASS and i == PASS:
        return PASS
    if a == INAPPLICABLE and i == PASS:
        return PASS
    if i == INAPPLICABLE and a == PASS:
        return PASS
    if INCONCLUSIVE in (a, i):
        return INCONCLUSIVE
    return INAPPLICABLE


def certify_box(
    p: Params,
    b: Box,
    engine: str = "analytic",
    tol: float = 1e-8,
    min_margin: float = DEFAULT_MIN_MARGIN,
    budget: int = 10**6,
) -> Certificate:
    """Full certificate: H layer plus C layer under the requested engine.

    engine:
        "analytic"  closed-form C layer only
        "interval"  rigorous branch-and-bound C layer only
        "both"      run both; each C record carries the interval enclosure
                    and passes only with no engine contradicting

    The H layer is always analytic: it is finite float arithmetic on the
    box corners, there is nothing to enclose.
    """
    if engine not in ("analytic", "interval", "both"):
        raise ValueError(f"unknown engine {engine!r}")
    h_cert = check_H(p, b, min_margin)

    if engine == "analytic":
        c_cert = check_C_analytic(p, b, min_margin)
        merged = h_cert.merged_with(c_cert, engine="analytic")
        merged.tol = None
        return merged

    from .bounds import verify_C_rigorous  # deferred: bounds imports Box types

    i_cert = verify_C_rigorous(p, b, tol=tol, budget=budget, min_margin=min_margin)
    if engine == "interval":
        merged = h_cert.merged_with(i_cert, engine="interval")
        merged.tol = tol
        return merged

    a_cert = check_C_analytic(p, b, min_margin)
    fused: list[ConditionRecord] = []
    for cid in C_IDS:
        ra = a_cert.condition(cid)
        ri = i_cert.condition(cid)
        status = _merge_status(ra.status, ri.status)
        confirmed = [
            name
            for name, rec in (("analytic", ra), ("interval", ri))
            if rec.status == PASS
        ]
        rec = ConditionRecord(
            cid=cid,
            status=status,
            lhs=ra.lhs if ra.lhs is not None else ri.lhs,
            rhs=ra.rhs if ra.rhs is not None else ri.rhs,
            relation=ra.relation or ri.relation,
            margin=ra.margin if ra.margin is not None else ri.margin,
            engine="analytic+interval",
            subchecks=list(ra.subchecks),
            note="; ".join(n for n in (ra.note, ri.note) if n),
            interval=ri.interval,
        )
        rec.note = (rec.note + ("; " if rec.note else "") + "confirmed by: " + (",".join(confirmed) or "none"))
        fused.append(rec)
    cert = Certificate(
        params=p,
        box=b,
        conditions=list(h_cert.conditions) + fused,
        engine="both",
        tol=tol,
        min_margin=min_margin,
    )
    return cert
