"""Stadium and rectangle boundaries as four parametrised arcs.

Both domains are split into four arcs traversed counter-clockwise, each
parametrised by ``t`` in ``[-1, 1]``::

    arc 0   bottom edge      L t - i
    arc 1   right end        L + sqrt(1 - t^2) + i t   (stadium)
                             L + i t                   (rectangle)
    arc 2   top edge         -arc0(t)
    arc 3   left end         -arc1(t)

The solver works in the angle variable ``t = cos(theta)`` with theta in
``[0, pi]``; :meth:`DomainGeometry.arc_point_theta` evaluates arcs there
without the cancellation in ``sqrt(1 - t^2)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

N_ARCS = 4
DOME_ARCS = frozenset({1, 3})
SIDE_ARCS = frozenset({0, 2})


class Shape(str, enum.Enum):
    STADIUM = "stadium"
    RECTANGLE = "rectangle"


class Hit(enum.Enum):
    """Boundary component reached by an absorbed walker.

    For the rectangle ``DOME`` denotes the vertical ends (arcs 1 and 3).
    """

    DOME = "dome"
    SIDE = "side"


def _check_point(p) -> complex:
    p = complex(p)
    if not (math.isfinite(p.real) and math.isfinite(p.imag)):
        raise DomainError(f"point {p!r} is not finite")
    return p


def _check_arc(k) -> int:
    if isinstance(k, bool) or int(k) != k or not 0 <= k < N_ARCS:
        raise DomainError(f"arc index must be one of 0..3, got {k!r}")
    return int(k)


@dataclass(frozen=True)
class DomainGeometry:
    """A stadium or a ``2L x 2`` rectangle centred at the origin."""

    kind: Shape
    L: float

    def __post_init__(self):
        object.__setattr__(self, "kind", Shape(self.kind))
        L = float(self.L)
        if not (math.isfinite(L) and L > 0):
            raise DomainError(f"half-length L must be finite and positive, got {self.L!r}")
        object.__setattr__(self, "L", L)

    @classmethod
    def stadium(cls, L: float = 1.0) -> "DomainGeometry":
        return cls(Shape.STADIUM, L)

    @classmethod
    def rectangle(cls, L: float = 1.0) -> "DomainGeometry":
        return cls(Shape.RECTANGLE, L)

    @property
    def is_stadium(self) -> bool:
        return self.kind is Shape.STADIUM

    def arc_length_scale(self, k: int) -> float:
        """Half-length of a straight arc (``L`` for the edges, 1 for rectangle ends)."""
        if k % 2 == 0:
            return self.L
        if self.is_stadium:
            raise DomainError("stadium domes are not straight")
        return 1.0

    def arc_point_theta(self, k: int, theta):
        """Arc ``k`` at ``t = cos(theta)``; vectorised over ``theta``."""
        theta = np.asarray(theta, dtype=float)
        sign = 1.0 if k < 2 else -1.0
        if k % 2 == 0:
            z = self.L * np.cos(theta) - 1j
        elif self.is_stadium:
            z = self.L + np.sin(theta) + 1j * np.cos(theta)
        else:
            z = self.L + 1j * np.cos(theta)
        return sign * z

    def arc_point(self, k: int, t: float) -> complex:
        k = _check_arc(k)
        t = float(t)
        if not (math.isfinite(t) and -1.0 <= t <= 1.0):
            raise DomainError(f"arc parameter t must lie in [-1, 1], got {t!r}")
        sign = 1.0 if k < 2 else -1.0
        if k % 2 == 0:
            z = complex(self.L * t, -1.0)
        elif self.is_stadium:
            z = complex(self.L + math.sqrt(1.0 - t * t), t)
        else:
            z = complex(self.L, t)
        return sign * z

    def distance_to_boundary(self, x, y):
        """Signed distance to the boundary, positive inside; vectorised."""
        ax = np.abs(x)
        ay = np.abs(y)
        if self.is_stadium:
            dx = np.maximum(ax - self.L, 0.0)
            return 1.0 - np.hypot(dx, ay)
        return np.minimum(self.L - ax, 1.0 - ay)

    def inscribed_radius(self, p) -> float:
        """Radius of the largest disk centred at ``p`` inside the domain."""
        p = _check_point(p)
        d = float(self.distance_to_boundary(p.real, p.imag))
        if not d > 0:
            raise DomainError(f"point {p} is not strictly inside the {self.kind.value}")
        return d

    def contains(self, p) -> bool:
        p = complex(p)
        return bool(self.distance_to_boundary(p.real, p.imag) > 0)

    def end_mask(self, x, y):
        """True where an absorbed point counts as a hit on arcs 1 or 3.

        Stadium: ``|x| > L``. Rectangle: nearer to a vertical end than to a
        horizontal edge. Ties go to the sides.
        """
        ax = np.abs(x)
        if self.is_stadium:
            return ax > self.L
        return (self.L - ax) < (1.0 - np.abs(y))

    def classify_hit(self, p) -> Hit:
        p = _check_point(p)
        return Hit.DOME if bool(self.end_mask(p.real, p.imag)) else Hit.SIDE

    def unit_tangent(self, k: int, t: float) -> complex:
        """Unit tangent of arc ``k`` in the direction of increasing ``t``."""
        k = _check_arc(k)
        sign = 1.0 if k < 2 else -1.0
        if k % 2 == 0:
            d = 1.0 + 0j
        elif not self.is_stadium:
            d = 1j
        elif abs(t) >= 1.0:
            d = complex(-math.copysign(1.0, t), 0.0)
        else:
            d = complex(-t, math.sqrt(1.0 - t * t))
        return sign * d / abs(d)

    def inward_corner_direction(self, k: int) -> complex:
        """Unit vector pointing into the domain from the start of arc ``k``.

        ``i`` times the bisector of the incoming and outgoing tangents, which is
        the inward normal wherever the corner is smooth.
        """
        k = _check_arc(k)
        bis = self.unit_tangent(k, -1.0) + self.unit_tangent((k - 1) % N_ARCS, 1.0)
        return 1j * bis / abs(bis)


def arc_point(geom: DomainGeometry, k: int, t: float) -> complex:
    return geom.arc_point(k, t)


def inscribed_radius(geom: DomainGeometry, p) -> float:
    return geom.inscribed_radius(p)


def classify_hit(geom: DomainGeometry, p) -> Hit:
    return geom.classify_hit(p)
