"""Value-level quaternion algebra with distinct right and left products.

The operator side is carried by which product is called:

    hamilton_right(a, b)  ->  a -> b   (a acting to the right on b, i.e. ab)
    hamilton_left(a, b)   ->  b <- a   (a acting to the left on b, i.e. ba)

Both share the scalar part and the ``a0*b + b0*a`` vector part and differ
only in the sign of the cross term.  The symmetric and antisymmetric
combinations are computed from that shared structure directly, so the
cross term cancels exactly instead of up to rounding.

>>> i, j = Quaternion(0, 1, 0, 0), Quaternion(0, 0, 1, 0)
>>> hamilton_right(i, j)
Quaternion(w=0.0, x=0.0, y=0.0, z=1.0)
>>> hamilton_left(i, j)
Quaternion(w=0.0, x=0.0, y=0.0, z=-1.0)
"""

from __future__ import annotations

import enum
import math
from typing import NamedTuple

__all__ = [
    "Quaternion",
    "ProductSide",
    "hamilton_right",
    "hamilton_left",
    "product",
    "sym_product",
    "antisym_product",
    "conjugate",
    "norm",
]


class ProductSide(enum.Enum):
    """Which way an operator quaternion acts."""

    RIGHT = "right"  # d/dr -> X
    LEFT = "left"  # X <- d/dr


class Quaternion(NamedTuple):
    """Immutable quaternion ``w + x i + y j + z k``."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def of(cls, w: float = 0.0, x: float = 0.0, y: float = 0.0, z: float = 0.0) -> Quaternion:
        q = cls(float(w), float(x), float(y), float(z))
        if not all(math.isfinite(c) for c in q):
            raise ValueError(f"quaternion components must be finite, got {tuple(q)}")
        return q

    @property
    def vector(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def __add__(self, other: Quaternion) -> Quaternion:  # type: ignore[override]
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: Quaternion) -> Quaternion:
        return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> Quaternion:
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):  # type: ignore[override]
        if isinstance(other, Quaternion):
            return hamilton_right(self, other)
        s = float(other)
        return Quaternion(self.w * s, self.x * s, self.y * s, self.z * s)

    def __rmul__(self, other):  # type: ignore[override]
        s = float(other)
        return Quaternion(s * self.w, s * self.x, s * self.y, s * self.z)


def _parts(a: Quaternion, b: Quaternion):
    # scalar, a0*b + b0*a, and a x b: the three pieces every product is built from
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    scalar = a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3
    aligned = (a0 * b1 + b0 * a1, a0 * b2 + b0 * a2, a0 * b3 + b0 * a3)
    cross = (a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1)
    return scalar, aligned, cross


def hamilton_right(a: Quaternion, b: Quaternion) -> Quaternion:
    """``a -> b``: the ordinary Hamilton product ``ab``."""
    s, (p1, p2, p3), (c1, c2, c3) = _parts(a, b)
    return Quaternion(s, p1 + c1, p2 + c2, p3 + c3)


def hamilton_left(a: Quaternion, b: Quaternion) -> Quaternion:
    """``b <- a``: operator ``a`` acting to the left on ``b``; equals ``ba``."""
    s, (p1, p2, p3), (c1, c2, c3) = _parts(a, b)
    return Quaternion(s, p1 - c1, p2 - c2, p3 - c3)


def product(a: Quaternion, b: Quaternion, side: ProductSide) -> Quaternion:
    if side is ProductSide.RIGHT:
        return hamilton_right(a, b)
    return hamilton_left(a, b)


def sym_product(a: Quaternion, b: Quaternion) -> Quaternion:
    """``{a, b} = (a->b + b<-a)/2``; the cross terms drop out."""
    s, (p1, p2, p3), _ = _parts(a, b)
    return Quaternion(s, p1, p2, p3)


def antisym_product(a: Quaternion, b: Quaternion) -> Quaternion:
    """``[a, b] = (a->b - b<-a)/2``; only the cross term survives."""
    _, _, (c1, c2, c3) = _parts(a, b)
    return Quaternion(0.0, c1, c2, c3)


def conjugate(q: Quaternion) -> Quaternion:
    return Quaternion(q.w, -q.x, -q.y, -q.z)


def norm(q: Quaternion) -> float:
    """Euclidean norm; ``hypot`` avoids underflow and overflow of the squares."""
    return math.hypot(q.w, q.x, q.y, q.z)
