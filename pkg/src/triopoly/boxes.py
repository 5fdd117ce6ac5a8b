"""Axis-aligned candidate boxes and their oriented/half-box views.

A Box is the closed parallelepiped [x_l,x_r] x [y_l,y_r] x [z_l,z_r].  The
certificate geometry orients it along z: the bottom face z = z_l and top
face z = z_r are the "exit" faces the image must be pushed through, and the
midplane z = (z_l+z_r)/2 splits it into the two half-boxes that carry the
two symbols.
"""
from __future__ import annotations

from dataclasses import dataclass

import math

__all__ = ["InvalidBoxError", "Box", "OrientedBox", "HalfBoxes"]

_AXES = ("x", "y", "z")


class InvalidBoxError(ValueError):
    """Box bounds violate the strict ordering invariants."""


@dataclass(frozen=True)
class Box:
    x_l: float
    x_r: float
    y_l: float
    y_r: float
    z_l: float
    z_r: float

    def __post_init__(self) -> None:
        for f in ("x_l", "x_r", "y_l", "y_r", "z_l", "z_r"):
            v = getattr(self, f)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise InvalidBoxError(f"bound {f} must be finite, got {v!r}")
            object.__setattr__(self, f, float(v))
        if not (self.x_l < self.x_r):
            raise InvalidBoxError(f"need x_l < x_r, got [{self.x_l}, {self.x_r}]")
        if not (self.y_l < self.y_r):
            raise InvalidBoxError(f"need y_l < y_r, got [{self.y_l}, {self.y_r}]")
        if not (self.z_l < self.z_r):
            raise InvalidBoxError(f"need z_l < z_r, got [{self.z_l}, {self.z_r}]")

    # -- geometry helpers -------------------------------------------------

    @property
    def widths(self) -> tuple[float, float, float]:
        return (self.x_r - self.x_l, self.y_r - self.y_l, self.z_r - self.z_l)

    @property
    def z_mid(self) -> float:
        return 0.5 * (self.z_l + self.z_r)

    def bounds(self, axis: int) -> tuple[float, float]:
        lo = (self.x_l, self.y_l, self.z_l)[axis]
        hi = (self.x_r, self.y_r, self.z_r)[axis]
        return lo, hi

    def contains(self, x: float, y: float, z: float, slack: float = 0.0) -> bool:
        return (
            self.x_l - slack <= x <= self.x_r + slack
            and self.y_l - slack <= y <= self.y_r + slack
            and self.z_l - slack <= z <= self.z_r + slack
        )

    def corners(self) -> list[tuple[float, float, float]]:
        return [
            (x, y, z)
            for x in (self.x_l, self.x_r)
            for y in (self.y_l, self.y_r)
            for z in (self.z_l, self.z_r)
        ]

    def replace(self, **kw) -> "Box":
        vals = self.as_dict()
        vals.update(kw)
        return Box(**vals)

    def as_dict(self) -> dict:
        return {
            "x_l": self.x_l,
            "x_r": self.x_r,
            "y_l": self.y_l,
            "y_r": self.y_r,
            "z_l": self.z_l,
            "z_r": self.z_r,
        }

    def as_tuple(self) -> tuple[float, ...]:
        return (self.x_l, self.x_r, self.y_l, self.y_r, self.z_l, self.z_r)


@dataclass(frozen=True)
class OrientedBox:
    """A Box plus the axis carrying the orientation (left/right face pair).

    The certified stretching geometry of this package is along z (axis 2);
    other axes are accepted for face bookkeeping but the certificate and
    horseshoe machinery require axis == 2.
    """

    box: Box
    axis: int = 2

    def __post_init__(self) -> None:
        if self.axis not in (0, 1, 2):
            raise ValueError(f"axis must be 0, 1 or 2, got {self.axis}")

    @property
    def axis_name(self) -> str:
        return _AXES[self.axis]

    def face_values(self) -> tuple[float, float]:
        """Coordinate values of the left (lo) and right (hi) faces."""
        return self.box.bounds(self.axis)

    def on_left_face(self, pt, tol: float = 0.0) -> bool:
        lo, _ = self.face_values()
        return abs(pt[self.axis] - lo) <= tol and self.box.contains(*pt, slack=tol)

    def on_right_face(self, pt, tol: float = 0.0) -> bool:
        _, hi = self.face_values()
        return abs(pt[self.axis] - hi) <= tol and self.box.contains(*pt, slack=tol)

    def halves(self) -> "HalfBoxes":
        return HalfBoxes.from_oriented(self)


@dataclass(frozen=True)
class HalfBoxes:
    """The two symbol-carrying halves split at the oriented midplane."""

    lower: Box  # symbol 0
    upper: Box  # symbol 1
    axis: int
    mid: float

    @classmethod
    def from_oriented(cls, ob: OrientedBox) -> "HalfBoxes":
        lo, hi = ob.face_values()
        mid = 0.5 * (lo + hi)
        name = _AXES[ob.axis]
        lower = ob.box.replace(**{f"{name}_r": mid})
        upper = ob.box.replace(**{f"{name}_l": mid})
        return cls(lower=lower, upper=upper, axis=ob.axis, mid=mid)

    def half(self, index: int) -> Box:
        if index == 0:
            return self.lower
        if index == 1:
            return self.upper
        raise ValueError(f"half index must be 0 or 1, got {index}")

    def symbol_of(self, pt) -> tuple[int, bool]:
        """Symbol of a point already known to lie in the box.

        Returns (symbol, tie): a point exactly on the midplane is assigned
        symbol 1 and flagged as a tie.
        """
        v = pt[self.axis]
        if v < self.mid:
            return 0, False
        if v > self.mid:
            return 1, False
        return 1, True
