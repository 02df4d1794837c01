"""Horizontal lines, p-area and a Monte Carlo check of the Crofton identity.

An oriented horizontal line is coded by (p, theta, t): it passes through
B = (p cos theta, p sin theta, t) with direction U = (sin theta, -cos theta, p).
Integrating the number of hits with a surface against dp dtheta dt gives
four times the p-area of the surface.  The estimator here samples the
chart uniformly in a box that contains every line meeting the mesh.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math

import numba
import numpy as np
from scipy.integrate import trapezoid

from heisframe import heis_core as hc
from heisframe.errors import EmptyMesh
from heisframe.heis_core import HeisPoint

BLOCK = 1 << 16
PARALLEL_TOL = 1e-12
PERTURB = 1e-9


@dataclass(frozen=True)
class HorizontalLine:
    p: float
    theta: float
    t: float

    def base(self):
        return np.array([self.p * math.cos(self.theta), self.p * math.sin(self.theta), self.t])

    def direction(self):
        return np.array([math.sin(self.theta), -math.cos(self.theta), self.p])

    def reversed(self):
        """Same point set traversed the other way."""
        return HorizontalLine(-self.p, math.fmod(self.theta + math.pi, 2 * math.pi), self.t)


def line_point(line, s):
    return HeisPoint.from_array(line.base() + s * line.direction())


@dataclass
class TriMesh:
    vertices: np.ndarray
    triangles: np.ndarray
    cells: np.ndarray | None = None

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=float).reshape(-1, 3)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if self.cells is None:
            self.cells = np.arange(len(self.triangles))
        if self.triangles.size and (self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices)):
            raise ValueError("triangle index out of range")
        if not np.all(np.isfinite(self.vertices)):
            raise ValueError("mesh vertices must be finite")
        if len(self.triangles) and np.min(self.areas()) <= _area_eps(self.vertices):
            raise ValueError("mesh contains degenerate triangles")

    def __len__(self):
        return len(self.triangles)

    def corners(self):
        return self.vertices[self.triangles]

    def areas(self):
        c = self.corners()
        return 0.5 * np.linalg.norm(np.cross(c[:, 1] - c[:, 0], c[:, 2] - c[:, 0]), axis=1)


def _area_eps(vertices):
    if len(vertices) == 0:
        return 0.0
    span = float(np.max(np.ptp(vertices, axis=0)))
    return 1e-14 * max(span, 1e-300) ** 2


def mesh_from_grid(g):
    """Two triangles per grid cell split along the (i,j)-(i+1,j+1) diagonal."""
    nu, nv = g.shape
    idx = np.arange(nu * nv).reshape(nu, nv)
    a, b = idx[:-1, :-1].ravel(), idx[1:, :-1].ravel()
    c, d = idx[1:, 1:].ravel(), idx[:-1, 1:].ravel()
    cell = np.arange(a.size)
    tris = np.concatenate([np.stack([a, b, c], 1), np.stack([a, c, d], 1)])
    cells = np.concatenate([cell, cell])
    verts = g.points.reshape(-1, 3)
    corners = verts[tris]
    area = 0.5 * np.linalg.norm(np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0]), axis=1)
    keep = area > _area_eps(verts)
    return TriMesh(verts, tris[keep], cells[keep])


def read_obj(path):
    verts, faces = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            try:
                if parts[0] == "v":
                    verts.append([float(x) for x in parts[1:4]])
                elif parts[0] == "f":
                    ids = [int(tok.split("/")[0]) for tok in parts[1:]]
                    ids = [i - 1 if i > 0 else len(verts) + i for i in ids]
                    faces.extend([ids[0], ids[k], ids[k + 1]] for k in range(1, len(ids) - 1))
            except (ValueError, IndexError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed OBJ record") from exc
    return TriMesh(np.array(verts, dtype=float).reshape(-1, 3), np.array(faces, dtype=np.int64).reshape(-1, 3))


def write_obj(mesh, path):
    with open(path, "w") as fh:
        for v in mesh.vertices:
            fh.write("v {:.17g} {:.17g} {:.17g}\n".format(*v))
        for f in mesh.triangles + 1:
            fh.write("f {} {} {}\n".format(*f))


# -- p-area ----------------------------------------------------------------


def p_area_density(points, F_u, F_v):
    """|E| per node, the Levi length of the horizontal field E."""
    tu = hc.theta(points, F_u)
    tv = hc.theta(points, F_v)
    E = tu[..., None] * F_v - tv[..., None] * F_u
    return np.hypot(E[..., 0], E[..., 1])


def p_area(g):
    """Composite trapezoid of |E| over the parameter grid."""
    from heisframe.surface_lab import foliation_field

    fol = foliation_field(g)
    dens = np.where(fol.singular, 0.0, np.hypot(fol.E[..., 0], fol.E[..., 1]))
    return float(trapezoid(trapezoid(dens, dx=g.dv, axis=1), dx=g.du))


def _triangle_rule(order):
    """Collapsed Gauss rule on the reference triangle {u, v >= 0, u + v <= 1}."""
    x, w = np.polynomial.legendre.leggauss(order)
    x, w = 0.5 * (x + 1), 0.5 * w
    s, t = np.meshgrid(x, x, indexing="ij")
    W = np.outer(w, w) * (1 - s)
    return s.ravel(), (t * (1 - s)).ravel(), W.ravel()


def mesh_p_area(mesh, order=8):
    """p-area of the piecewise planar surface, triangle by triangle."""
    if len(mesh) == 0:
        return 0.0
    c = mesh.corners()
    e1, e2 = c[:, 1] - c[:, 0], c[:, 2] - c[:, 0]
    u, v, w = _triangle_rule(order)
    pts = c[:, None, 0] + u[None, :, None] * e1[:, None] + v[None, :, None] * e2[:, None]
    dens = p_area_density(pts, np.broadcast_to(e1[:, None], pts.shape), np.broadcast_to(e2[:, None], pts.shape))
    return float(np.sum(dens * w))


# -- sampling box ----------------------------------------------------------


@dataclass(frozen=True)
class SamplingBox:
    p: tuple
    theta: tuple
    t: tuple

    def volume(self):
        return (self.p[1] - self.p[0]) * (self.theta[1] - self.theta[0]) * (self.t[1] - self.t[0])

    def scaled(self, factor):
        """Box with the p and t ranges stretched about their centres."""

        def grow(r):
            mid, half = 0.5 * (r[0] + r[1]), 0.5 * (r[1] - r[0]) * factor
            return (mid - half, mid + half)

        return SamplingBox(grow(self.p), self.theta, grow(self.t))

    def to_json(self):
        return {"p": list(self.p), "theta": list(self.theta), "t": list(self.t)}


def sampling_box(mesh):
    """Every oriented horizontal line meeting the mesh has its code in this box."""
    if len(mesh.vertices) == 0:
        raise EmptyMesh("mesh has no vertices")
    verts = mesh.vertices[np.unique(mesh.triangles)] if len(mesh) else mesh.vertices
    R = float(np.max(np.hypot(verts[:, 0], verts[:, 1])))
    R2 = R * R
    return SamplingBox((-R, R), (0.0, 2.0 * math.pi), (float(verts[:, 2].min()) - R2, float(verts[:, 2].max()) + R2))


# -- intersection kernel ---------------------------------------------------


ANGLE_BINS = 128


@numba.njit(cache=True, nogil=True, inline="always")
def _signed(k, e, ux, uy, uz, mx, my, mz, edge_d, edge_m, edge_sgn):
    side = (
        ux * edge_m[k, e, 0] + uy * edge_m[k, e, 1] + uz * edge_m[k, e, 2]
        + edge_d[k, e, 0] * mx + edge_d[k, e, 1] * my + edge_d[k, e, 2] * mz
    )
    return (1 if side >= 0.0 else -1) * edge_sgn[k, e]


@numba.njit(cache=True, nogil=True)
def _count_one(p, theta, t, mesh_data):
    """Hits of one line with the mesh; -1 flags a triangle containing the line."""
    normals, anchors, edge_xy, zrange, edge_d, edge_m, edge_sgn, order, proj, reach = mesh_data
    ct, st = math.cos(theta), math.sin(theta)
    bx, by, bz = p * ct, p * st, t
    ux, uy, uz = st, -ct, p
    # moment B x U of the line
    mx = by * uz - bz * uy
    my = bz * ux - bx * uz
    mz = bx * uy - by * ux
    unorm = math.sqrt(1.0 + p * p)
    nb = order.shape[0]
    turn = theta / (2.0 * math.pi)
    b = min(int((turn - math.floor(turn)) * nb), nb - 1)
    lo = np.searchsorted(proj[b], p - reach[b], side="left")
    hi = np.searchsorted(proj[b], p + reach[b], side="right")
    hits = 0
    for q in range(lo, hi):
        k = order[b, q]
        # the projected line must separate the projected corners, and the
        # line's height over them must meet the triangle's z-range
        d0 = anchors[k, 0] * ct + anchors[k, 1] * st - p
        d1 = d0 + edge_xy[k, 0] * ct + edge_xy[k, 1] * st
        d2 = d0 + edge_xy[k, 2] * ct + edge_xy[k, 3] * st
        s0 = anchors[k, 0] * st - anchors[k, 1] * ct
        s1 = s0 + edge_xy[k, 0] * st - edge_xy[k, 1] * ct
        s2 = s0 + edge_xy[k, 2] * st - edge_xy[k, 3] * ct
        h0, h1, h2 = t + p * s0, t + p * s1, t + p * s2
        z_lo = min(h0, min(h1, h2))
        z_hi = max(h0, max(h1, h2))
        slack = 1e-12 * (1.0 + abs(z_lo) + abs(z_hi))
        crosses = min(d0, min(d1, d2)) <= 0.0 <= max(d0, max(d1, d2))
        overlaps = (z_hi >= zrange[k, 0] - slack) & (z_lo <= zrange[k, 1] + slack)
        if not (crosses & overlaps):
            continue
        if abs(ux * normals[k, 0] + uy * normals[k, 1] + uz * normals[k, 2]) <= PARALLEL_TOL * unorm:
            off = (
                (bx - anchors[k, 0]) * normals[k, 0]
                + (by - anchors[k, 1]) * normals[k, 1]
                + (bz - anchors[k, 2]) * normals[k, 2]
            )
            if abs(off) <= PARALLEL_TOL * (1.0 + abs(bz) + abs(anchors[k, 2])):
                return -1
            continue
        # Pluecker side products against the edges in canonical vertex
        # order; an exact zero belongs to the canonical direction
        g0 = _signed(k, 0, ux, uy, uz, mx, my, mz, edge_d, edge_m, edge_sgn)
        g1 = _signed(k, 1, ux, uy, uz, mx, my, mz, edge_d, edge_m, edge_sgn)
        if g0 != g1:
            continue
        if _signed(k, 2, ux, uy, uz, mx, my, mz, edge_d, edge_m, edge_sgn) == g0:
            hits += 1
    return hits


@numba.njit(cache=True, nogil=True)
def _count_lines(P, TH, T, mesh_data, shift):
    out = np.empty(P.shape[0], dtype=np.int64)
    for i in range(P.shape[0]):
        p = P[i]
        h = _count_one(p, TH[i], T[i], mesh_data)
        tries = 0
        while h < 0 and tries < 16:
            p += shift
            tries += 1
            h = _count_one(p, TH[i], T[i], mesh_data)
        out[i] = max(h, 0)
    return out


def _prepared(mesh, bins=ANGLE_BINS):
    """Per-triangle normals, canonical edge data and angle-binned sort orders."""
    V, tri = mesh.vertices, mesh.triangles
    c = V[tri]
    nrm = np.cross(c[:, 1] - c[:, 0], c[:, 2] - c[:, 0])
    nrm /= np.linalg.norm(nrm, axis=1)[:, None]
    i = tri
    j = np.roll(tri, -1, axis=1)
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    # identical floats for both triangles sharing an edge
    edge_d = V[hi] - V[lo]
    edge_m = np.cross(V[lo], V[hi])
    edge_sgn = np.where(i < j, 1, -1).astype(np.int64)
    xy = c[:, :, :2]
    centre = xy.mean(axis=1)
    radius = np.max(np.linalg.norm(xy - centre[:, None], axis=2), axis=1) * (1 + 1e-12) + 1e-300
    edge_xy = np.concatenate([c[:, 1, :2] - c[:, 0, :2], c[:, 2, :2] - c[:, 0, :2]], axis=1)
    # within a bin the projection c.n(theta) drifts by at most |c| * half-width
    width = 2.0 * math.pi / bins
    mids = (np.arange(bins) + 0.5) * width
    proj = np.cos(mids)[:, None] * centre[None, :, 0] + np.sin(mids)[:, None] * centre[None, :, 1]
    order = np.argsort(proj, axis=1, kind="stable")
    proj = np.take_along_axis(proj, order, axis=1)
    drift = np.linalg.norm(centre, axis=1) * (0.5 * width) * (1 + 1e-9)
    reach = np.full(bins, float(np.max(radius + drift)) + 1e-12)
    zrange = np.stack([c[:, :, 2].min(axis=1), c[:, :, 2].max(axis=1)], axis=1)
    arrays = (nrm, c[:, 0], edge_xy, zrange, edge_d, edge_m, edge_sgn, order, proj, reach)
    return tuple(np.ascontiguousarray(a) for a in arrays)


def _shift(mesh):
    R = float(np.max(np.hypot(mesh.vertices[:, 0], mesh.vertices[:, 1]))) if len(mesh.vertices) else 1.0
    return PERTURB * max(R, 1e-300)


def count_intersections(line, mesh):
    if len(mesh) == 0:
        return 0
    arr = lambda x: np.array([float(x)])  # noqa: E731
    return int(_count_lines(arr(line.p), arr(line.theta), arr(line.t), _prepared(mesh), _shift(mesh))[0])


def count_many(P, TH, T, mesh):
    if len(mesh) == 0:
        return np.zeros(len(P), dtype=np.int64)
    f = lambda a: np.ascontiguousarray(a, dtype=float)  # noqa: E731
    return _count_lines(f(P), f(TH), f(T), _prepared(mesh), _shift(mesh))


# -- Monte Carlo -----------------------------------------------------------


@dataclass
class CroftonEstimate:
    estimate: float
    std_error: float
    n_samples: int
    box: SamplingBox
    seed: int

    def to_json(self, p_area=None, **extra):
        out = {
            "estimate": self.estimate,
            "std_error": self.std_error,
            "n_samples": self.n_samples,
            "box": self.box.to_json(),
            "seed": self.seed,
        }
        if p_area is not None:
            out["p_area"] = p_area
            out["ratio"] = self.estimate / (4.0 * p_area) if p_area > 0 else None
        out.update(extra)
        return out


def block_samples(box, seed, block, size):
    """Uniform codes for one block; depends only on (seed, block index)."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))
    u = rng.random((3, size))
    lo = np.array([box.p[0], box.theta[0], box.t[0]])[:, None]
    hi = np.array([box.p[1], box.theta[1], box.t[1]])[:, None]
    return lo + (hi - lo) * u


def crofton_estimate(mesh, n, seed, box=None, workers=1, block=BLOCK):
    """Monte Carlo estimate of the integral of n(line, mesh) dp dtheta dt."""
    if n < 1:
        raise ValueError("need at least one sample")
    box = sampling_box(mesh) if box is None else box
    if len(mesh) == 0:
        # bare vertices carry no area
        return CroftonEstimate(0.0, 0.0, n, box, seed)
    prep = _prepared(mesh)
    shift = _shift(mesh)
    sizes = [min(block, n - s) for s in range(0, n, block)]

    def run(b):
        P, TH, T = block_samples(box, seed, b, sizes[b])
        h = _count_lines(P, TH, T, prep, shift)
        return int(h.sum()), int((h * h).sum())

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(b) for b in range(len(sizes))]
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    vol = box.volume()
    mean = s1 / n
    var = (s2 - s1 * s1 / n) / (n - 1) if n > 1 else 0.0
    return CroftonEstimate(vol * mean, vol * math.sqrt(max(var, 0.0) / n), n, box, seed)


# -- deterministic oracle --------------------------------------------------


@numba.njit(cache=True, nogil=True)
def _tensor_counts(ps, thetas, t0, dt, nt, verts, tris):
    total = 0
    for i in range(ps.shape[0]):
        p = ps[i]
        for j in range(thetas.shape[0]):
            ct, st = math.cos(thetas[j]), math.sin(thetas[j])
            for k in range(tris.shape[0]):
                tv = np.empty(2)
                found = 0
                for e in range(3):
                    a = verts[tris[k, e]]
                    b = verts[tris[k, (e + 1) % 3]]
                    da = a[0] * ct + a[1] * st - p
                    db = b[0] * ct + b[1] * st - p
                    if (da >= 0.0) != (db >= 0.0) and found < 2:
                        lam = da / (da - db)
                        x = a[0] + lam * (b[0] - a[0])
                        y = a[1] + lam * (b[1] - a[1])
                        z = a[2] + lam * (b[2] - a[2])
                        tv[found] = z - (x * st - y * ct) * p
                        found += 1
                if found == 2:
                    lo, hi = min(tv[0], tv[1]), max(tv[0], tv[1])
                    k_lo = math.ceil((lo - t0) / dt - 0.5)
                    k_hi = math.ceil((hi - t0) / dt - 0.5)
                    k_lo = min(max(k_lo, 0), nt)
                    k_hi = min(max(k_hi, 0), nt)
                    total += k_hi - k_lo
    return total


def tensor_quadrature(mesh, resolution=200, box=None):
    """Midpoint rule for the line integral on a resolution^3 grid of codes.

    Each vertical plane x cos(theta) + y sin(theta) = p cuts a triangle in a
    segment; along it the hit height t = z - s p is affine, so the lines
    through the segment are an interval of t whose midpoint nodes are counted.
    """
    box = sampling_box(mesh) if box is None else box
    r = resolution
    mid = lambda lo, hi: lo + (np.arange(r) + 0.5) * (hi - lo) / r  # noqa: E731
    ps = mid(*box.p)
    thetas = mid(*box.theta)
    dt = (box.t[1] - box.t[0]) / r
    total = _tensor_counts(ps, thetas, box.t[0], dt, r, mesh.vertices, mesh.triangles)
    return float(total) * box.volume() / r**3
