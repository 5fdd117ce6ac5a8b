"""Exploratory, non-rigorous dynamics for the triopoly map.

Everything here is floating-point simulation: orbit records with escape
detection, QR-iteration Lyapunov exponents, stability classification of
the interior rest point, bifurcation scans in the adjustment rate alpha,
and a one-dimensional covering-interval demo on the logistic family.
None of it feeds the certification engines; it exists to explore and to
sanity-check the certified statements against plain numerics.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .core import (
    DomainError,
    Params,
    State,
    eval_jacobian,
    eval_map_xyz,
    fixed_point_residual,
    interior_fixed_point,
)

__all__ = [
    "OrbitRecord",
    "LyapunovSpectrum",
    "StabilityReport",
    "BifurcationRow",
    "BifurcationTable",
    "CoveringIntervals",
    "LogisticSapReport",
    "simulate",
    "lyapunov_spectrum",
    "classify_equilibrium",
    "classify_eigenvalues",
    "bifurcation_scan",
    "logistic_sap_demo",
    "find_covering_pair",
    "verify_covering",
    "DEFAULT_SAFETY",
]

DEFAULT_SAFETY = (-10.0, 10.0)

# below this residual a start is treated as sitting exactly on a rest point:
# the true orbit is constant, and advancing it in floats would just amplify
# rounding noise along the unstable direction until the orbit flies off
FIXED_POINT_PIN = 1e-12


def _inside(x: float, y: float, z: float, lo: float, hi: float) -> bool:
    return lo <= x <= hi and lo <= y <= hi and lo <= z <= hi


@dataclass(frozen=True)
class OrbitRecord:
    """A simulated orbit segment with escape bookkeeping.

    ``points`` holds the states at absolute steps ``transient``,
    ``transient + 1``, ... (step 0 is the initial state).  ``escape_step``
    is the absolute index of the first state outside the safety region,
    or of the first step whose image left the map's domain; iteration
    stops there, so nothing at or past it is recorded.
    """

    initial: State
    params: Params
    transient: int
    points: np.ndarray
    escape_step: int | None = None
    safety: tuple[float, float] = DEFAULT_SAFETY

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"points must be (m, 3), got {pts.shape}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def escaped(self) -> bool:
        return self.escape_step is not None

    @property
    def n_recorded(self) -> int:
        return int(self.points.shape[0])

    def state(self, i: int) -> State:
        return State(*self.points[i])

    @property
    def final(self) -> State | None:
        if self.n_recorded == 0:
            return None
        return self.state(-1)

    def to_csv(self, path_or_file) -> None:
        """Columns step,x,y,z; step is the absolute iteration index."""
        if hasattr(path_or_file, "write"):
            self._write_rows(csv.writer(path_or_file))
            return
        with open(path_or_file, "w", newline="") as fh:
            self._write_rows(csv.writer(fh))

    def _write_rows(self, w) -> None:
        w.writerow(["step", "x", "y", "z"])
        for i, row in enumerate(self.points):
            w.writerow([self.transient + i] + [f"{v:.17g}" for v in row])


def simulate(
    p: Params,
    s0: State,
    n: int,
    transient: int = 0,
    safety: tuple[float, float] = DEFAULT_SAFETY,
) -> OrbitRecord:
    """Iterate the map n + transient times, recording the last n states.

    A state outside the safety cube, or a step on which the map leaves
    its domain (division by a non-positive total, square root of a
    non-positive share), ends the orbit with ``escape_step`` set; this is
    recorded data, not an exception.

    A start within 1e-12 residual of a rest point is pinned to it: the
    exact orbit is constant there, whereas literal float iteration lets
    the rounding error of the closed-form coordinates grow along the
    unstable direction until the orbit ejects, which says nothing about
    the map and everything about the start being representable only
    approximately.
    """
    if n < 0 or transient < 0:
        raise ValueError("n and transient must be non-negative")
    lo, hi = float(safety[0]), float(safety[1])
    if not lo < hi:
        raise ValueError("safety region must have lo < hi")
    if fixed_point_residual(p, s0) < FIXED_POINT_PIN:
        pts = np.tile(np.array(s0.as_tuple()), (n, 1))
        esc = None if _inside(s0.x, s0.y, s0.z, lo, hi) else 0
        if esc == 0:
            pts = pts[:0]
        return OrbitRecord(initial=s0, params=p, transient=transient,
                           points=pts, escape_step=esc, safety=(lo, hi))
    x, y, z = s0.x, s0.y, s0.z
    out = np.empty((n, 3), dtype=float)
    m = 0
    escape: int | None = None
    for step in range(transient + n):
        if not _inside(x, y, z, lo, hi):
            escape = step
            break
        if step >= transient:
            out[m] = (x, y, z)
            m += 1
        try:
            x, y, z = eval_map_xyz(p, x, y, z)
        except DomainError:
            escape = step + 1
            break
    else:
        # the state after the final recorded one still must be admissible
        # for the orbit to count as non-escaping at horizon n
        if not _inside(x, y, z, lo, hi):
            escape = transient + n
    return OrbitRecord(
        initial=s0,
        params=p,
        transient=transient,
        points=out[:m].copy(),
        escape_step=escape,
        safety=(lo, hi),
    )


@dataclass(frozen=True)
class LyapunovSpectrum:
    """QR-iteration exponent estimates, sorted descending.

    ``escaped`` flags a partial estimate: the orbit left the safety cube
    or the map's domain before the requested horizon, and the exponents
    average only the ``steps`` factors seen up to that point.
    """

    exponents: tuple[float, float, float]
    steps: int
    escaped: bool = False
    note: str = ""

    def __iter__(self):
        return iter(self.exponents)

    @property
    def largest(self) -> float:
        return self.exponents[0]


def lyapunov_spectrum(
    p: Params,
    s0: State,
    n: int,
    transient: int = 0,
    qr_warmup: int | None = None,
    safety: tuple[float, float] = DEFAULT_SAFETY,
) -> LyapunovSpectrum:
    """All three Lyapunov exponents along the orbit of s0.

    Standard discrete QR method: push an orthonormal frame through the
    Jacobian at every step and average the log of the R diagonal.  The
    first ``qr_warmup`` factors (default min(256, n // 4)) are discarded
    so the frame can align with the Oseledets splitting first; without
    this the O(1) misalignment of the initial frame pollutes the average
    by O(1/n), which is visible at fixed points where everything else is
    exact.

    A start within 1e-12 residual of a rest point is pinned: the exact
    orbit is constant, while iterating in floats would let rounding noise
    grow along the unstable direction and eject the orbit.
    """
    if n < 1:
        raise ValueError("need at least one step")
    if qr_warmup is None:
        qr_warmup = min(256, n // 4)
    if not 0 <= qr_warmup < n:
        raise ValueError("qr_warmup must lie in [0, n)")
    lo, hi = float(safety[0]), float(safety[1])
    pinned = fixed_point_residual(p, s0) < FIXED_POINT_PIN
    x, y, z = s0.x, s0.y, s0.z
    escaped = False
    note = "pinned at a fixed point" if pinned else ""
    if not pinned:
        for step in range(transient):
            try:
                x, y, z = eval_map_xyz(p, x, y, z)
            except DomainError:
                escaped = True
                note = f"orbit left the domain at transient step {step + 1}"
                break
            if not _inside(x, y, z, lo, hi):
                escaped = True
                note = f"orbit left the safety region at transient step {step + 1}"
                break
    if escaped:
        return LyapunovSpectrum((math.nan,) * 3, 0, True, note)

    frame = np.eye(3)
    sums = np.zeros(3)
    sums_all = np.zeros(3)
    used = 0
    seen = 0
    for step in range(n):
        try:
            jac = eval_jacobian(p, State(x, y, z))
        except DomainError:
            escaped = True
            note = f"Jacobian undefined at step {step}; estimate is partial"
            break
        frame, r = np.linalg.qr(jac @ frame)
        logs = np.log(np.abs(np.diag(r)))
        sums_all += logs
        seen += 1
        if step >= qr_warmup:
            sums += logs
            used += 1
        if pinned:
            continue
        try:
            x, y, z = eval_map_xyz(p, x, y, z)
        except DomainError:
            escaped = True
            note = f"orbit left the domain at step {step + 1}; estimate is partial"
            break
        if not _inside(x, y, z, lo, hi):
            escaped = True
            note = f"orbit left the safety region at step {step + 1}; estimate is partial"
            break
    if used == 0 and seen > 0:
        # escaped inside the warmup window; an unwarmed average beats none
        sums, used = sums_all, seen
        note = (note + "; QR warmup not reached").lstrip("; ")
    if used == 0:
        return LyapunovSpectrum((math.nan,) * 3, 0, escaped, note)
    exps = np.sort(sums / used)[::-1]
    return LyapunovSpectrum(tuple(float(v) for v in exps), used, escaped, note)


def classify_eigenvalues(eigvals, tol: float = 1e-9) -> str:
    """Map a spectrum to stable | flip-critical | Neimark-Sacker-critical | unstable.

    Critical tags take precedence: a real eigenvalue within tol of -1 is
    flip-critical, a genuinely complex pair within tol of the unit circle
    is Neimark-Sacker-critical.  Otherwise the largest modulus decides.
    """
    ev = np.asarray(eigvals, dtype=complex)
    real = np.abs(ev.imag) <= tol
    if np.any(real & (np.abs(ev.real + 1.0) <= tol)):
        return "flip-critical"
    if np.any(~real & (np.abs(np.abs(ev) - 1.0) <= tol)):
        return "Neimark-Sacker-critical"
    return "unstable" if float(np.max(np.abs(ev))) > 1.0 else "stable"


@dataclass(frozen=True)
class StabilityReport:
    """Linear stability of the interior rest point."""

    fixed_point: State
    eigenvalues: tuple[complex, complex, complex]
    moduli: tuple[float, float, float]
    classification: str
    params: Params
    tol: float = 1e-9

    def __post_init__(self) -> None:
        m = self.moduli
        if not (m[0] >= m[1] >= m[2]):
            raise ValueError("moduli must be sorted descending")

    def as_dict(self) -> dict:
        return {
            "fixed_point": self.fixed_point.as_tuple(),
            "eigenvalues": [[v.real, v.imag] for v in self.eigenvalues],
            "moduli": list(self.moduli),
            "classification": self.classification,
            "params": {
                "c1": self.params.c1,
                "c2": self.params.c2,
                "c3": self.params.c3,
                "alpha": self.params.alpha,
            },
            "tol": self.tol,
        }


def classify_equilibrium(p: Params, tol: float = 1e-9) -> StabilityReport:
    """Eigenvalue classification of the map at the interior rest point."""
    fp = interior_fixed_point(p)
    if min(fp.as_tuple()) <= 0.0:
        raise DomainError(
            f"interior rest point {fp.as_tuple()} has a non-positive share; "
            "stability classification is meaningless outside the feasible cone"
        )
    ev = np.linalg.eigvals(eval_jacobian(p, fp))
    order = np.argsort(-np.abs(ev))
    ev = ev[order]
    return StabilityReport(
        fixed_point=fp,
        eigenvalues=tuple(complex(v) for v in ev),
        moduli=tuple(float(abs(v)) for v in ev),
        classification=classify_eigenvalues(ev, tol),
        params=p,
        tol=tol,
    )


@dataclass(frozen=True)
class BifurcationRow:
    alpha: float
    escaped: bool
    lyap1: float
    z_values: tuple[float, ...]


@dataclass(frozen=True)
class BifurcationTable:
    """Plot-ready scan over the adjustment rate.

    One row per sampled alpha: escape flag, largest Lyapunov exponent
    estimate, and the tail of recorded z-values (nan-padded).  Escaped
    orbits carry nan exponents and no z samples.
    """

    rows: tuple[BifurcationRow, ...]
    seed: int
    s0_policy: str
    base: Params

    @property
    def alphas(self) -> tuple[float, ...]:
        return tuple(r.alpha for r in self.rows)

    def to_csv(self, path_or_file) -> None:
        if hasattr(path_or_file, "write"):
            self._write_rows(csv.writer(path_or_file))
            return
        with open(path_or_file, "w", newline="") as fh:
            self._write_rows(csv.writer(fh))

    def _write_rows(self, w) -> None:
        width = max((len(r.z_values) for r in self.rows), default=0)
        w.writerow(["alpha", "escaped", "lyap1"] + [f"z{i:02d}" for i in range(width)])
        for r in self.rows:
            zs = [f"{v:.17g}" if math.isfinite(v) else "" for v in r.z_values]
            zs += [""] * (width - len(zs))
            ly = f"{r.lyap1:.17g}" if math.isfinite(r.lyap1) else ""
            w.writerow([f"{r.alpha:.17g}", int(r.escaped), ly] + zs)


def _policy_start(policy, p: Params, rng: np.random.Generator) -> State:
    if isinstance(policy, State):
        return policy
    if callable(policy):
        return policy(p, rng)
    fp = interior_fixed_point(p)
    if policy == "nash":
        return fp
    if policy == "perturbed-nash":
        dx, dy, dz = rng.uniform(-1e-3, 1e-3, size=3)
        return State(fp.x + dx, fp.y + dy, max(fp.z + dz, 1e-6))
    raise ValueError(f"unknown start policy {policy!r}")


def bifurcation_scan(
    p_base: Params,
    alpha_range: tuple[float, float],
    samples: int,
    s0_policy="perturbed-nash",
    transient: int = 1000,
    n_record: int = 200,
    z_values: int = 32,
    lyap_steps: int = 2000,
    seed: int = 0,
    threads: int = 1,
    safety: tuple[float, float] = DEFAULT_SAFETY,
) -> BifurcationTable:
    """Sweep alpha over a closed subinterval of (0, 20].

    Per-alpha escapes are recorded and the scan continues.  Seeding is
    per-alpha (spawned from one root seed), so the table is identical for
    identical arguments regardless of the thread count; threads only
    overlap the numpy QR calls, the scalar iteration is sequential.
    """
    a_lo, a_hi = float(alpha_range[0]), float(alpha_range[1])
    if not (0.0 < a_lo <= a_hi <= 20.0):
        raise ValueError(f"alpha range must sit inside (0, 20], got {alpha_range}")
    if samples < 2:
        raise ValueError("need at least two samples")
    if z_values < 1 or n_record < 1:
        raise ValueError("z_values and n_record must be positive")
    alphas = np.linspace(a_lo, a_hi, samples)
    children = np.random.SeedSequence(seed).spawn(samples)

    def one(i: int) -> BifurcationRow:
        a = float(alphas[i])
        pa = Params(p_base.c1, p_base.c2, p_base.c3, a)
        rng = np.random.default_rng(children[i])
        s0 = _policy_start(s0_policy, pa, rng)
        rec = simulate(pa, s0, n_record, transient=transient, safety=safety)
        if rec.escaped or rec.final is None:
            return BifurcationRow(a, True, math.nan, ())
        tail = rec.points[-z_values:, 2]
        ly = lyapunov_spectrum(pa, rec.final, lyap_steps, safety=safety)
        return BifurcationRow(a, False, ly.exponents[0], tuple(float(v) for v in tail))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, range(samples)))
    else:
        rows = [one(i) for i in range(samples)]
    policy_name = s0_policy if isinstance(s0_policy, str) else getattr(
        s0_policy, "__name__", type(s0_policy).__name__
    )
    return BifurcationTable(rows=tuple(rows), seed=seed, s0_policy=policy_name, base=p_base)


# ---------------------------------------------------------------------------
# logistic-family covering demo
#
# The one-dimensional analogue of the box certification: two disjoint
# subintervals whose images under an iterate of f(x) = mu x (1 - x) each
# cover the hull of the pair.  Found by brute-force scanning the monotone
# branches of the iterate; no structure of the quadratic is assumed beyond
# smoothness, so the same scan reports absence honestly.


def _logistic_orbit_value(mu: float, x: float, m: int) -> float:
    for _ in range(m):
        x = mu * x * (1.0 - x)
    return x


def _exact_orbit_value(mu: float, x: float, m: int) -> Fraction:
    """f^m(x) in exact rational arithmetic (mu and x as the exact rationals
    their floats denote).  Endpoint inequalities must be decided exactly:
    around the hump 4 x (1 - x) rounds to 1.0 on a plateau several ulps
    wide, and deciding coverage in floats there manufactures intervals
    whose true images fall short of the hull."""
    mu_q, xq = Fraction(mu), Fraction(x)
    for _ in range(m):
        xq = mu_q * xq * (1 - xq)
    return xq


def _logistic_derivative(mu: float, x: float, m: int) -> float:
    d = 1.0
    for _ in range(m):
        d *= mu * (1.0 - 2.0 * x)
        x = mu * x * (1.0 - x)
    return d


def _critical_points(mu: float, m: int, grid: int = 4096) -> list[float]:
    xs = np.linspace(0.0, 1.0, grid + 1)
    ds = np.array([_logistic_derivative(mu, float(x), m) for x in xs])
    crits: list[float] = []
    for i in range(grid):
        a, b = float(xs[i]), float(xs[i + 1])
        da, db = float(ds[i]), float(ds[i + 1])
        if da == 0.0 and 0.0 < a < 1.0:
            crits.append(a)
            continue
        if da * db < 0.0:
            for _ in range(80):
                mid = 0.5 * (a + b)
                dm = _logistic_derivative(mu, mid, m)
                if dm == 0.0:
                    a = b = mid
                    break
                if (dm > 0.0) == (da > 0.0):
                    a, da = mid, dm
                else:
                    b = mid
            crits.append(0.5 * (a + b))
    out: list[float] = []
    for c in crits:
        if not out or c - out[-1] > 1e-12:
            out.append(c)
    return out


@dataclass(frozen=True)
class _Branch:
    lo: float
    hi: float
    v_lo: float
    v_hi: float

    @property
    def increasing(self) -> bool:
        return self.v_hi >= self.v_lo

    @property
    def image(self) -> tuple[float, float]:
        return (min(self.v_lo, self.v_hi), max(self.v_lo, self.v_hi))


def _monotone_branches(mu: float, m: int) -> list[_Branch]:
    cuts = [0.0] + _critical_points(mu, m) + [1.0]
    return [
        _Branch(a, b, _logistic_orbit_value(mu, a, m), _logistic_orbit_value(mu, b, m))
        for a, b in zip(cuts[:-1], cuts[1:])
    ]


def _branch_preimage(mu: float, m: int, br: _Branch, target: float) -> float:
    """The unique x in the branch with f^m(x) = target, by bisection."""
    a, b = br.lo, br.hi
    va = _logistic_orbit_value(mu, a, m)
    if va == target:
        return a
    for _ in range(200):
        mid = 0.5 * (a + b)
        if mid == a or mid == b:
            break
        vm = _logistic_orbit_value(mu, mid, m)
        if (vm < target) == (br.increasing):
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def _nudge_outward(mu: float, m: int, x: float, limit: float, want_ge: float | None,
                   want_le: float | None, toward: float) -> float | None:
    """Move x by ulps toward `toward` until f^m(x) clears the target side.

    The comparison is exact (rational), not floating point; see
    _exact_orbit_value for why.
    """
    for _ in range(64):
        v = _exact_orbit_value(mu, x, m)
        if want_ge is not None and v >= Fraction(want_ge):
            return x
        if want_le is not None and v <= Fraction(want_le):
            return x
        nxt = math.nextafter(x, toward)
        if nxt == x or (toward > x and nxt > limit) or (toward < x and nxt < limit):
            return None
        x = nxt
    return None


@dataclass(frozen=True)
class CoveringIntervals:
    """Two disjoint intervals whose f^m-images each cover their joint hull."""

    mu: float
    iterate: int
    i0: tuple[float, float]
    i1: tuple[float, float]
    hull: tuple[float, float]
    verified: bool
    samples: int

    def as_dict(self) -> dict:
        return {
            "mu": self.mu,
            "iterate": self.iterate,
            "i0": list(self.i0),
            "i1": list(self.i1),
            "hull": list(self.hull),
            "verified": self.verified,
            "samples": self.samples,
        }


def _interval_on_branch(mu: float, m: int, br: _Branch,
                        h_lo: float, h_hi: float) -> tuple[float, float] | None:
    """Subinterval of the branch mapping exactly onto [h_lo, h_hi]."""
    if br.increasing:
        u = _branch_preimage(mu, m, br, h_lo)
        v = _branch_preimage(mu, m, br, h_hi)
        u = _nudge_outward(mu, m, u, br.lo, want_le=h_lo, want_ge=None, toward=br.lo - 1.0)
        v = _nudge_outward(mu, m, v, br.hi, want_ge=h_hi, want_le=None, toward=br.hi + 1.0)
    else:
        u = _branch_preimage(mu, m, br, h_hi)
        v = _branch_preimage(mu, m, br, h_lo)
        u = _nudge_outward(mu, m, u, br.lo, want_ge=h_hi, want_le=None, toward=br.lo - 1.0)
        v = _nudge_outward(mu, m, v, br.hi, want_le=h_lo, want_ge=None, toward=br.hi + 1.0)
    if u is None or v is None or not u < v:
        return None
    return (u, v)


def verify_covering(mu: float, cert: CoveringIntervals, samples: int = 10_000) -> bool:
    """Sampling check of every claim in the certificate.

    Monotonicity of f^m along each interval plus the endpoint inequalities
    imply the images cover the hull; disjointness and ordering are checked
    directly.  Every sampled constraint must hold, there is no tolerance;
    the endpoint inequalities are decided in exact rational arithmetic.
    """
    (u0, v0), (u1, v1) = cert.i0, cert.i1
    h_lo, h_hi = cert.hull
    if not (h_lo <= u0 < v0 < u1 < v1 <= h_hi):
        return False
    m = cert.iterate
    for (u, v) in (cert.i0, cert.i1):
        xs = np.linspace(u, v, samples)
        ys = np.array([_logistic_orbit_value(mu, float(x), m) for x in xs])
        diffs = np.diff(ys)
        if not (np.all(diffs >= 0.0) or np.all(diffs <= 0.0)):
            return False
        eu, ev = _exact_orbit_value(mu, u, m), _exact_orbit_value(mu, v, m)
        if not (min(eu, ev) <= Fraction(h_lo) and max(eu, ev) >= Fraction(h_hi)):
            return False
    return True


def find_covering_pair(mu: float, m: int, samples: int = 10_000) -> CoveringIntervals | None:
    """First disjoint covering pair among the monotone branches of f^m.

    Branch pairs are scanned left to right; for each pair the candidate
    hull is the hull of the two branch domains, and the intervals are the
    branch preimages of that hull (nudged outward by ulps so the endpoint
    inequalities hold in floating point, not just in exact arithmetic).
    """
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    if m < 1:
        raise ValueError("iterate must be at least 1")
    branches = _monotone_branches(mu, m)
    for i in range(len(branches)):
        for j in range(i + 1, len(branches)):
            bi, bj = branches[i], branches[j]
            h_lo, h_hi = bi.lo, bj.hi
            if not (bi.image[0] <= h_lo and bi.image[1] >= h_hi):
                continue
            if not (bj.image[0] <= h_lo and bj.image[1] >= h_hi):
                continue
            i0 = _interval_on_branch(mu, m, bi, h_lo, h_hi)
            i1 = _interval_on_branch(mu, m, bj, h_lo, h_hi)
            if i0 is None or i1 is None or not i0[1] < i1[0]:
                continue
            cert = CoveringIntervals(
                mu=mu, iterate=m, i0=i0, i1=i1, hull=(h_lo, h_hi),
                verified=False, samples=samples,
            )
            return replace(cert, verified=verify_covering(mu, cert, samples))
    return None


@dataclass(frozen=True)
class LogisticSapReport:
    """Covering-interval findings for the first and second iterates."""

    mu: float
    first: CoveringIntervals | None
    second: CoveringIntervals | None

    @property
    def any_certificate(self) -> bool:
        return self.first is not None or self.second is not None

    def as_dict(self) -> dict:
        return {
            "kind": "logistic-covering-demo",
            "mu": self.mu,
            "first_iterate": self.first.as_dict() if self.first else None,
            "second_iterate": self.second.as_dict() if self.second else None,
        }


def logistic_sap_demo(mu: float, samples: int = 10_000) -> LogisticSapReport:
    """Covering-interval scan of the logistic map at both low iterates.

    The first iterate admits a pair only when the hump exits the unit
    interval (mu > 4); the second iterate already admits one well below
    that, which is the one-dimensional prototype of certifying chaos for
    a map composed with itself.  Absence is a valid (negative) report.
    """
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    return LogisticSapReport(
        mu=mu,
        first=find_covering_pair(mu, 1, samples),
        second=find_covering_pair(mu, 2, samples),
    )
