"""Pseudo-hermitian rigid motions PSH(1) and oriented frames.

A motion is a left translation by ``p`` composed with a rotation by
``angle`` of the contact plane.  Its 4x4 representation acts on the
column (1, x, y, z):

    [[1,  0,              0,              0],
     [p1, a,              b,              0],
     [p2, c,              d,              0],
     [p3, a p2 - c p1,    b p2 - d p1,    1]]

with (a, b; c, d) = (cos, -sin; sin, cos).  Oriented frames (p; X, Y, T)
correspond one-to-one with motions: the frame is the image of the standard
frame at the origin.
"""

from dataclasses import dataclass
import math

import numpy as np

from heisframe import heis_core as hc
from heisframe.errors import DegenerateFrame, TooFarFromGroup
from heisframe.heis_core import FrameCoefficients, HeisPoint


def _wrap(angle):
    return math.remainder(angle, 2.0 * math.pi)


@dataclass(frozen=True)
class RigidMotion:
    translation: HeisPoint
    angle: float

    @classmethod
    def identity(cls):
        return cls(hc.ORIGIN, 0.0)

    @classmethod
    def from_params(cls, p1, p2, p3, angle):
        return cls(HeisPoint(float(p1), float(p2), float(p3)), float(angle))

    def matrix(self):
        return _matrix(self.translation.as_array(), self.angle)

    def to_json(self):
        t = self.translation
        return {"p": [t.x, t.y, t.z], "angle": self.angle}

    @classmethod
    def from_json(cls, d):
        return cls(HeisPoint(*map(float, d["p"])), float(d["angle"]))

    def __call__(self, q):
        return apply(self, q)


def _matrix(p, angle):
    ca, sa = math.cos(angle), math.sin(angle)
    a, b, c, d = ca, -sa, sa, ca
    return np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [p[0], a, b, 0.0],
            [p[1], c, d, 0.0],
            [p[2], a * p[1] - c * p[0], b * p[1] - d * p[0], 1.0],
        ]
    )


@dataclass(frozen=True)
class MaurerCartanValue:
    """Values of the Maurer-Cartan forms w1, w2, w3 and the connection w12."""

    w1: float
    w2: float
    w3: float
    w12: float

    def matrix(self):
        return mc_matrix(self.w1, self.w2, self.w3, self.w12)


def mc_matrix(w1, w2, w3, w12):
    """The psh(1) matrix built from the four form values (broadcasts)."""
    w1, w2, w3, w12 = np.broadcast_arrays(*map(np.asarray, (w1, w2, w3, w12)))
    out = np.zeros(w1.shape + (4, 4))
    out[..., 1, 0] = w1
    out[..., 1, 2] = -w12
    out[..., 2, 0] = w2
    out[..., 2, 1] = w12
    out[..., 3, 0] = w3
    out[..., 3, 1] = w2
    out[..., 3, 2] = -w1
    return out


@dataclass(frozen=True)
class OrientedFrame:
    base: HeisPoint
    X: FrameCoefficients
    Y: FrameCoefficients

    @classmethod
    def standard(cls, base=hc.ORIGIN):
        return cls(base, FrameCoefficients(1.0, 0.0, 0.0), FrameCoefficients(0.0, 1.0, 0.0))

    @classmethod
    def from_angle(cls, base, angle):
        ca, sa = math.cos(angle), math.sin(angle)
        return cls(base, FrameCoefficients(ca, sa, 0.0), FrameCoefficients(-sa, ca, 0.0))


# -- the action ------------------------------------------------------------


def apply_array(g, q):
    """Vectorised ``apply`` on coordinates of shape (..., 3)."""
    q = np.asarray(q, dtype=float)
    p = g.translation
    ca, sa = math.cos(g.angle), math.sin(g.angle)
    a, b, c, d = ca, -sa, sa, ca
    x, y, z = q[..., 0], q[..., 1], q[..., 2]
    out = np.empty_like(q)
    out[..., 0] = a * x + b * y + p.x
    out[..., 1] = c * x + d * y + p.y
    out[..., 2] = (a * p.y - c * p.x) * x + (b * p.y - d * p.x) * y + z + p.z
    return out


def apply(g, q):
    return HeisPoint.from_array(apply_array(g, q.as_array()))


def jacobian(g):
    """Differential of ``apply(g, .)``; constant because the action is affine."""
    return _matrix(g.translation.as_array(), g.angle)[1:, 1:]


def pushforward_array(g, v):
    return np.asarray(v, dtype=float) @ jacobian(g).T


def pushforward(g, v):
    w = pushforward_array(g, v.as_array())
    return hc.TangentVector(apply(g, v.base), float(w[0]), float(w[1]), float(w[2]))


def compose(g, h):
    """Motion whose matrix is matrix(g) @ matrix(h)."""
    return RigidMotion(apply(g, h.translation), _wrap(g.angle + h.angle))


def inverse(g):
    rot_back = RigidMotion(hc.ORIGIN, -g.angle)
    return RigidMotion(apply(rot_back, hc.group_inv(g.translation)), _wrap(-g.angle))


# -- frames ----------------------------------------------------------------

FRAME_TOL = 1e-6


def frame_to_motion(f):
    x = f.X
    norm = math.hypot(x.c1, x.c2)
    if abs(norm - 1.0) > FRAME_TOL or abs(x.cT) > FRAME_TOL:
        raise DegenerateFrame(f"frame vector X has Levi norm {norm:.9g}, T-part {x.cT:.3e}")
    jx = (-x.c2, x.c1, 0.0)
    dev = max(abs(f.Y.c1 - jx[0]), abs(f.Y.c2 - jx[1]), abs(f.Y.cT))
    if dev > FRAME_TOL:
        raise DegenerateFrame(f"Y deviates from JX by {dev:.3e}")
    return RigidMotion(f.base, math.atan2(x.c2, x.c1))


def motion_to_frame(g):
    return OrientedFrame.from_angle(g.translation, g.angle)


# -- group membership ------------------------------------------------------


def validate(M):
    """Largest deviation of a 4x4 matrix from the PSH(1) pattern."""
    M = np.asarray(M, dtype=float)
    if M.shape != (4, 4):
        raise ValueError("expected a 4x4 matrix")
    p1, p2 = M[1, 0], M[2, 0]
    a, b, c, d = M[1, 1], M[1, 2], M[2, 1], M[2, 2]
    B = M[1:3, 1:3]
    devs = [
        np.max(np.abs(M[0] - [1.0, 0.0, 0.0, 0.0])),
        abs(M[1, 3]),
        abs(M[2, 3]),
        abs(M[3, 3] - 1.0),
        np.max(np.abs(B.T @ B - np.eye(2))),
        abs(np.linalg.det(B) - 1.0),
        abs(M[3, 1] - (a * p2 - c * p1)),
        abs(M[3, 2] - (b * p2 - d * p1)),
    ]
    return float(max(devs))


def _nearest_angle(B):
    # polar factor of a 2x2 matrix with positive determinant
    return math.atan2(B[1, 0] - B[0, 1], B[0, 0] + B[1, 1])


def retract(M):
    """Project a near-group 4x4 matrix onto PSH(1)."""
    M = np.asarray(M, dtype=float)
    B = M[1:3, 1:3]
    if np.linalg.det(B) <= 0.0:
        raise TooFarFromGroup("rotation block is not orientation preserving")
    angle = _nearest_angle(B)
    ca, sa = math.cos(angle), math.sin(angle)
    dist = np.linalg.norm(B - np.array([[ca, -sa], [sa, ca]]), 2)
    if dist > 0.5:
        raise TooFarFromGroup(f"rotation block is {dist:.3g} from SO(2)")
    return RigidMotion(HeisPoint.from_array(M[1:4, 0]), angle)


def retract_matrix(M):
    """``retract`` returning the matrix; used inside integrators."""
    B = M[1:3, 1:3]
    angle = math.atan2(B[1, 0] - B[0, 1], B[0, 0] + B[1, 1])
    return _matrix(M[1:4, 0], angle)


def moving_frame_step(f, mc, ds):
    """One explicit Euler step of dM = M w, followed by a retraction."""
    M = frame_to_motion(f).matrix()
    M_next = M + ds * (M @ mc.matrix())
    return motion_to_frame(retract(M_next))


def integrate_path(M0, omega, h):
    """Classical RK4 for dM/ds = M phi(s) with a retraction after each step.

    ``omega`` has shape (n_steps, 3, 4, 4): phi at the start, midpoint and
    end of every step.  Returns the (n_steps + 1, 4, 4) stack of matrices.
    """
    omega = np.asarray(omega, dtype=float)
    out = np.empty((omega.shape[0] + 1, 4, 4))
    M = np.asarray(M0, dtype=float)
    out[0] = M
    half = 0.5 * h
    for i, (w0, wm, w1) in enumerate(omega):
        k1 = M @ w0
        k2 = (M + half * k1) @ wm
        k3 = (M + half * k2) @ wm
        k4 = (M + h * k3) @ w1
        M = retract_matrix(M + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
        out[i + 1] = M
    return out


def frames_from_matrices(Ms):
    """Base points (n, 3) and frame angles (n,) of a stack of motion matrices."""
    Ms = np.asarray(Ms)
    base = Ms[:, 1:4, 0].copy()
    angle = np.arctan2(Ms[:, 2, 1], Ms[:, 1, 1])
    return base, angle


def _retract_batch(M):
    B = M[..., 1:3, 1:3]
    angle = np.arctan2(B[..., 1, 0] - B[..., 0, 1], B[..., 0, 0] + B[..., 1, 1])
    p = M[..., 1:4, 0]
    ca, sa = np.cos(angle), np.sin(angle)
    out = np.zeros(M.shape)
    out[..., 0, 0] = 1.0
    out[..., 1:4, 0] = p
    out[..., 1, 1], out[..., 1, 2] = ca, -sa
    out[..., 2, 1], out[..., 2, 2] = sa, ca
    out[..., 3, 1] = ca * p[..., 1] - sa * p[..., 0]
    out[..., 3, 2] = -sa * p[..., 1] - ca * p[..., 0]
    out[..., 3, 3] = 1.0
    return out


def integrate_paths(M0, omega, h):
    """Batched ``integrate_path``: M0 is (batch, 4, 4), omega (n_steps, 3, batch, 4, 4)."""
    omega = np.asarray(omega, dtype=float)
    M = np.asarray(M0, dtype=float)
    out = np.empty((omega.shape[0] + 1,) + M.shape)
    out[0] = M
    half = 0.5 * h
    for i, (w0, wm, w1) in enumerate(omega):
        k1 = M @ w0
        k2 = (M + half * k1) @ wm
        k3 = (M + half * k2) @ wm
        k4 = (M + h * k3) @ w1
        M = _retract_batch(M + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
        out[i + 1] = M
    return out
