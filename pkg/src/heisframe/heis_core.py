"""Algebra of the first Heisenberg group H1.

Points are triples (x, y, z) with the product

    (x1, y1, z1) * (x2, y2, z2) = (x1 + x2, y1 + y2, z1 + z2 + y1 x2 - x1 y2).

The left-invariant frame is e1 = d/dx + y d/dz, e2 = d/dy - x d/dz,
T = d/dz, the contact form is dz + x dy - y dx, and the Levi metric makes
(e1, e2, T) orthonormal.

The array helpers (``mul``, ``theta``, ``split``) work on stacked
coordinates of shape (..., 3) and are what the rest of the package uses
in bulk; the dataclass API wraps them for single values.
"""

from dataclasses import dataclass
import math

import numpy as np

from heisframe.errors import NonHorizontal


@dataclass(frozen=True)
class HeisPoint:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise ValueError(f"non-finite point {self!r}")

    def as_array(self):
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_array(cls, a):
        return cls(float(a[0]), float(a[1]), float(a[2]))


ORIGIN = HeisPoint(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class TangentVector:
    """Vector with components along d/dx, d/dy, d/dz at ``base``."""

    base: HeisPoint
    vx: float
    vy: float
    vz: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.vx, self.vy, self.vz)):
            raise ValueError("non-finite tangent vector")

    def as_array(self):
        return np.array([self.vx, self.vy, self.vz], dtype=float)


@dataclass(frozen=True)
class FrameCoefficients:
    """Components along (e1, e2, T)."""

    c1: float
    c2: float
    cT: float = 0.0

    def as_array(self):
        return np.array([self.c1, self.c2, self.cT], dtype=float)

    @classmethod
    def from_array(cls, a):
        return cls(float(a[0]), float(a[1]), float(a[2]))


# -- array kernels ---------------------------------------------------------


def mul(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    out = p + q
    out[..., 2] += p[..., 1] * q[..., 0] - p[..., 0] * q[..., 1]
    return out


def inv(p):
    return -np.asarray(p, dtype=float)


def theta(base, v):
    """Contact form dz + x dy - y dx of ambient vectors ``v`` at ``base``."""
    base = np.asarray(base, dtype=float)
    v = np.asarray(v, dtype=float)
    return v[..., 2] + base[..., 0] * v[..., 1] - base[..., 1] * v[..., 0]


def split(base, v):
    """Ambient components -> (e1, e2, T) components."""
    v = np.asarray(v, dtype=float)
    out = np.empty(np.broadcast_shapes(np.shape(base), v.shape))
    out[..., 0] = v[..., 0]
    out[..., 1] = v[..., 1]
    out[..., 2] = theta(base, v)
    return out


def assemble(base, coeffs):
    """(e1, e2, T) components -> ambient components; inverse of ``split``."""
    base = np.asarray(base, dtype=float)
    c = np.asarray(coeffs, dtype=float)
    out = np.empty(np.broadcast_shapes(base.shape, c.shape))
    out[..., 0] = c[..., 0]
    out[..., 1] = c[..., 1]
    out[..., 2] = c[..., 2] + base[..., 1] * c[..., 0] - base[..., 0] * c[..., 1]
    return out


def levi(a, b):
    return np.sum(np.asarray(a, dtype=float) * np.asarray(b, dtype=float), axis=-1)


# -- value API -------------------------------------------------------------


def group_mul(p, q):
    return HeisPoint.from_array(mul(p.as_array(), q.as_array()))


def group_inv(p):
    return HeisPoint(-p.x, -p.y, -p.z)


def standard_frame(p):
    """(e1, e2, T) at ``p`` as ambient tangent vectors."""
    return (
        TangentVector(p, 1.0, 0.0, p.y),
        TangentVector(p, 0.0, 1.0, -p.x),
        TangentVector(p, 0.0, 0.0, 1.0),
    )


def contact_form(v):
    return v.vz + v.base.x * v.vy - v.base.y * v.vx


def split_velocity(v):
    return FrameCoefficients(v.vx, v.vy, contact_form(v))


def reassemble(base, c):
    """Inverse of ``split_velocity``: c1 e1 + c2 e2 + cT T at ``base``."""
    a = assemble(base.as_array(), c.as_array())
    return TangentVector(base, float(a[0]), float(a[1]), float(a[2]))


def horizontal_tolerance(c):
    return 1e-9 * (1.0 + math.sqrt(c.c1**2 + c.c2**2 + c.cT**2))


def almost_complex(c):
    """The CR structure J on a horizontal vector: J e1 = e2, J e2 = -e1."""
    if abs(c.cT) > horizontal_tolerance(c):
        raise NonHorizontal(f"vector has T-component {c.cT:.3e}")
    return FrameCoefficients(-c.c2, c.c1, 0.0)


def levi_inner(a, b):
    return a.c1 * b.c1 + a.c2 * b.c2 + a.cT * b.cT
