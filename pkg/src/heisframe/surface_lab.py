"""Surfaces in H1 through the characteristic foliation.

In a normal parametrization F(u, v) the u-lines are unit-speed leaves of
the characteristic foliation.  With X = F_u and Y = JX the surface is
described by five functions

    a = <F_v, X>, b = <F_v, Y>, c = Theta(F_v),
    l = <X_u, Y>,  m = <X_v, Y>,

subject to a_u = b l, b_u = -a l + m, c_u = 2 b, l_v = m_u.  From them we
get alpha = b / c, the induced adapted metric and the Gaussian curvature
of that metric.
"""

from dataclasses import dataclass, field
import logging

import numpy as np
from scipy.interpolate import CubicSpline, RectBivariateSpline

from heisframe import heis_core as hc
from heisframe import rigid_motion as rm
from heisframe._fd import diff1, diff2, uniform_spacing
from heisframe.errors import (
    IntegrabilityViolated,
    NearSingular,
    NotNormalParametrization,
    SingularPointEncountered,
    TransversalNotFound,
)
from heisframe.rigid_motion import OrientedFrame

log = logging.getLogger(__name__)

EPS_SING = 1e-7
NORMAL_TOL = 1e-6
TOL_INT = 1e-6


def _order_for(n):
    return 4 if n >= 6 else 2


@dataclass
class SurfaceGrid:
    u_grid: np.ndarray
    v_grid: np.ndarray
    points: np.ndarray
    F_u: np.ndarray | None = None
    F_v: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.u_grid = np.asarray(self.u_grid, dtype=float)
        self.v_grid = np.asarray(self.v_grid, dtype=float)
        self.points = np.asarray(self.points, dtype=float)
        nu, nv = self.u_grid.size, self.v_grid.size
        if nu < 3 or nv < 3:
            raise ValueError("surface grids need at least 3 nodes in each direction")
        shape = (nu, nv, 3)
        if self.points.shape != shape:
            raise ValueError(f"points must have shape {shape}, got {self.points.shape}")
        if not np.all(np.isfinite(self.points)):
            raise ValueError("surface points must be finite")
        for name in ("F_u", "F_v"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.asarray(arr, dtype=float)
                if arr.shape != shape:
                    raise ValueError(f"{name} must have shape {shape}")
                setattr(self, name, arr)
        self.du = uniform_spacing(self.u_grid)
        self.dv = uniform_spacing(self.v_grid)

    @property
    def shape(self):
        return self.points.shape[:2]

    @classmethod
    def from_function(cls, F, u_grid, v_grid, F_u=None, F_v=None):
        """Sample ``F(U, V) -> (x, y, z)`` (and optional partials) on a grid."""
        U, V = np.meshgrid(u_grid, v_grid, indexing="ij")
        stack = lambda f: None if f is None else np.stack(np.broadcast_arrays(*f(U, V)), -1)  # noqa: E731
        return cls(u_grid, v_grid, stack(F), stack(F_u), stack(F_v))

    def to_json(self):
        nu, nv = self.shape
        out = {
            "u0": float(self.u_grid[0]),
            "du": float(self.du),
            "nu": nu,
            "v0": float(self.v_grid[0]),
            "dv": float(self.dv),
            "nv": nv,
            "points": self.points.reshape(-1, 3).tolist(),
        }
        partials = {k: getattr(self, k).reshape(-1, 3).tolist() for k in ("F_u", "F_v") if getattr(self, k) is not None}
        if partials:
            out["partials"] = partials
        if self.metadata:
            out["metadata"] = self.metadata
        return out

    @classmethod
    def from_json(cls, d):
        nu, nv = int(d["nu"]), int(d["nv"])
        u = d["u0"] + d["du"] * np.arange(nu)
        v = d["v0"] + d["dv"] * np.arange(nv)
        pts = np.asarray(d["points"], dtype=float).reshape(nu, nv, 3)
        partials = d.get("partials", {})
        get = lambda k: None if k not in partials else np.asarray(partials[k], dtype=float).reshape(nu, nv, 3)  # noqa: E731
        return cls(u, v, pts, get("F_u"), get("F_v"), dict(d.get("metadata", {})))


@dataclass
class SurfaceCoefficients:
    u_grid: np.ndarray
    v_grid: np.ndarray
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    l: np.ndarray  # noqa: E741
    m: np.ndarray
    mask: np.ndarray | None = None  # True at masked singular nodes

    def __post_init__(self):
        self.u_grid = np.asarray(self.u_grid, dtype=float)
        self.v_grid = np.asarray(self.v_grid, dtype=float)
        shape = (self.u_grid.size, self.v_grid.size)
        for name in ("a", "b", "c", "l", "m"):
            arr = np.array(np.broadcast_to(np.asarray(getattr(self, name), dtype=float), shape))
            setattr(self, name, arr)
        if self.mask is None:
            self.mask = np.zeros(shape, dtype=bool)
        for name in ("a", "b", "c", "l", "m"):
            if not np.all(np.isfinite(getattr(self, name)[~self.mask])):
                raise ValueError(f"coefficient {name} is not finite")
        self.du = uniform_spacing(self.u_grid)
        self.dv = uniform_spacing(self.v_grid)

    @property
    def shape(self):
        return self.a.shape

    def replace(self, **kw):
        d = {k: getattr(self, k) for k in ("u_grid", "v_grid", "a", "b", "c", "l", "m", "mask")}
        d.update(kw)
        return SurfaceCoefficients(**d)

    def stack(self):
        return np.stack([self.a, self.b, self.c, self.l, self.m])


@dataclass
class SurfaceInvariants:
    alpha: np.ndarray
    pmean: np.ndarray
    metric: np.ndarray
    gauss: np.ndarray
    alpha_u: np.ndarray | None = None


@dataclass
class FoliationField:
    theta_u: np.ndarray
    theta_v: np.ndarray
    E: np.ndarray
    singular: np.ndarray


# -- partials and the foliation -------------------------------------------


def partials(g):
    Fu = g.F_u if g.F_u is not None else diff1(g.points, g.du, axis=0, order=_order_for(g.shape[0]))
    Fv = g.F_v if g.F_v is not None else diff1(g.points, g.dv, axis=1, order=_order_for(g.shape[1]))
    return Fu, Fv


def _singular(theta_u, theta_v, Fu, Fv):
    scale = np.maximum(np.linalg.norm(Fu, axis=-1), np.linalg.norm(Fv, axis=-1))
    return np.maximum(np.abs(theta_u), np.abs(theta_v)) <= EPS_SING * scale


def foliation_field(g):
    Fu, Fv = partials(g)
    tu = hc.theta(g.points, Fu)
    tv = hc.theta(g.points, Fv)
    E = tu[..., None] * Fv - tv[..., None] * Fu
    return FoliationField(tu, tv, E, _singular(tu, tv, Fu, Fv))


# -- coefficients ---------------------------------------------------------


def _worst(arr):
    idx = np.unravel_index(int(np.argmax(arr)), arr.shape)
    return tuple(int(i) for i in idx), float(arr[idx])


def coefficients(g, tol=NORMAL_TOL):
    """The five coefficient functions of a normal parametrization."""
    Fu, Fv = partials(g)
    fol = foliation_field(g)
    X = hc.split(g.points, Fu)
    V = hc.split(g.points, Fv)
    ok = ~fol.singular
    speed = np.hypot(X[..., 0], X[..., 1])
    checks = {
        "F_u is not horizontal": np.abs(X[..., 2]) / (1.0 + np.linalg.norm(Fu, axis=-1)),
        "F_u is not unit": np.abs(speed - 1.0),
    }
    Eh = hc.split(g.points, fol.E)
    Enorm = np.hypot(Eh[..., 0], Eh[..., 1])
    with np.errstate(invalid="ignore", divide="ignore"):
        checks["F_u is not along the foliation"] = np.where(
            Enorm > 0, np.abs(Eh[..., 0] * X[..., 1] - Eh[..., 1] * X[..., 0]) / Enorm, 0.0
        )
    for what, dev in checks.items():
        node, worst = _worst(np.where(ok, dev, 0.0))
        if worst > tol:
            raise NotNormalParametrization(f"{what} at node {node}: deviation {worst:.3e}", node=node)

    x1, x2 = X[..., 0], X[..., 1]
    a = x1 * V[..., 0] + x2 * V[..., 1]
    b = -x2 * V[..., 0] + x1 * V[..., 1]
    c = V[..., 2]
    ou, ov = _order_for(g.shape[0]), _order_for(g.shape[1])
    l = x1 * diff1(x2, g.du, axis=0, order=ou) - x2 * diff1(x1, g.du, axis=0, order=ou)  # noqa: E741
    m = x1 * diff1(x2, g.dv, axis=1, order=ov) - x2 * diff1(x1, g.dv, axis=1, order=ov)
    mask = fol.singular.copy()
    if mask.any():
        log.info("masking %d singular nodes", int(mask.sum()))
        for arr in (a, b, c, l, m):
            arr[mask] = np.nan
    return SurfaceCoefficients(g.u_grid, g.v_grid, a, b, c, l, m, mask)


def second_kind_residual(g):
    """Largest of |<F_uu, X>| and |<F_uu, T>| over the grid (zero for normal grids)."""
    Fu, _ = partials(g)
    Fuu = diff2(g.points, g.du, axis=0, order=_order_for(g.shape[0]))
    X = hc.split(g.points, Fu)
    W = hc.split(g.points, Fuu)
    along = X[..., 0] * W[..., 0] + X[..., 1] * W[..., 1]
    return float(max(np.max(np.abs(along)), np.max(np.abs(W[..., 2]))))


# -- residuals -------------------------------------------------------------


def _du(c, f):
    return diff1(f, c.du, axis=0, order=_order_for(c.shape[0]))


def _dv(c, f):
    return diff1(f, c.dv, axis=1, order=_order_for(c.shape[1]))


def _masked(c, arr):
    return np.where(c.mask, np.nan, arr)


def integrability_residual(c):
    """Nodewise max of the four compatibility residuals (NaN at masked nodes)."""
    r = np.stack(
        [
            _du(c, c.a) - c.b * c.l,
            _du(c, c.b) + c.a * c.l - c.m,
            _du(c, c.c) - 2.0 * c.b,
            _dv(c, c.l) - _du(c, c.m),
        ]
    )
    return _masked(c, np.max(np.abs(r), axis=0))


def pminimal_residual(c):
    """Nodewise max of the p-minimal conditions, including |l| itself."""
    bu = _du(c, c.b)
    r = np.stack(
        [
            _du(c, c.a),
            _du(c, bu),
            _du(c, c.c) - 2.0 * c.b,
            c.m - bu,
            c.l,
        ]
    )
    return _masked(c, np.max(np.abs(r), axis=0))


def max_residual(arr):
    """Largest finite residual; masked nodes are skipped."""
    arr = np.asarray(arr)
    finite = arr[np.isfinite(arr)]
    return float(finite.max()) if finite.size else 0.0


# -- invariants ------------------------------------------------------------


def _require_nonsingular(c):
    bad = (np.abs(c.c) <= EPS_SING) & ~c.mask
    if bad.any():
        node = tuple(int(i) for i in np.argwhere(bad)[0])
        raise NearSingular(f"|c| <= {EPS_SING:g} at node {node}")


def connection_components(c, alpha, alpha_u):
    """(P, Q) with omega_hat_1^2 = P du + Q dv."""
    root = np.sqrt(1.0 + alpha**2)
    B = c.l * alpha / root
    C = 2.0 * alpha + alpha * alpha_u / (1.0 + alpha**2)
    return B, B * c.a + C * root * c.c


def invariants(g, c):
    """alpha, p-mean curvature, induced metric and Gaussian curvature."""
    _require_nonsingular(c)
    with np.errstate(invalid="ignore", divide="ignore"):
        alpha = c.b / c.c
    alpha_u = _du(c, alpha)
    P, Q = connection_components(c, alpha, alpha_u)
    area = np.sqrt(1.0 + alpha**2) * c.c
    K = -(_du(c, Q) - _dv(c, P)) / area
    metric = np.empty(c.shape + (2, 2))
    metric[..., 0, 0] = 1.0
    metric[..., 0, 1] = metric[..., 1, 0] = c.a
    metric[..., 1, 1] = c.a**2 + c.b**2 + c.c**2
    return SurfaceInvariants(
        _masked(c, alpha), _masked(c, c.l), metric, _masked(c, K), _masked(c, alpha_u)
    )


def induced_metric(g):
    """Pullback of Theta^2 + Levi computed directly from F_u, F_v."""
    Fu, Fv = partials(g)
    su, sv = hc.split(g.points, Fu), hc.split(g.points, Fv)
    G = np.empty(g.shape + (2, 2))
    G[..., 0, 0] = np.sum(su * su, -1)
    G[..., 0, 1] = G[..., 1, 0] = np.sum(su * sv, -1)
    G[..., 1, 1] = np.sum(sv * sv, -1)
    return G


def e_sigma(c, f, alpha):
    """Derivative of f along the unit tangent orthogonal to the leaves."""
    return (_dv(c, f) - c.a * _du(c, f)) / (c.c * np.sqrt(1.0 + alpha**2))


def surface_integrability_residual(inv, c):
    """Nodewise residual of the compatibility equation linking l, alpha and K.

    ``c`` supplies the coefficient grid, whose a and c define the direction
    e_Sigma.
    """
    _require_nonsingular(c)
    al, au, K, l = inv.alpha, inv.alpha_u, inv.gauss, inv.pmean  # noqa: E741
    al = np.nan_to_num(al)
    q = 1.0 + al**2
    root = np.sqrt(q)
    lhs = q * root * e_sigma(c, np.nan_to_num(l), al)
    rhs = (
        q * _du(c, np.nan_to_num(au))
        - al * au**2
        + 4.0 * al * q * au
        - al * q**2 * K
        + al * l * root * e_sigma(c, al, al)
        + al * q * l**2
    )
    return _masked(c, np.abs(lhs - rhs))


# -- rigid motions of grids -----------------------------------------------


def transform_grid(g, motion):
    """Image of a grid (and its analytic partials) under a rigid motion."""
    push = lambda v: None if v is None else rm.pushforward_array(motion, v)  # noqa: E731
    return SurfaceGrid(
        g.u_grid, g.v_grid, rm.apply_array(motion, g.points), push(g.F_u), push(g.F_v), dict(g.metadata)
    )


def frame_at(g, i=0, j=0):
    """Adapted frame (F; F_u, J F_u) at a grid node."""
    Fu, _ = partials(g)
    X = hc.split(g.points[i, j], Fu[i, j])
    return OrientedFrame.from_angle(hc.HeisPoint.from_array(g.points[i, j]), float(np.arctan2(X[1], X[0])))


# -- reconstruction --------------------------------------------------------


def _spline_mid(grid, values, axis):
    mid = grid[:-1] + 0.5 * (grid[1] - grid[0])
    return CubicSpline(grid, values, axis=axis)(mid)


def _omega_u(l, l_mid):
    """Generators along u for stacks of l values (n_steps, batch)."""
    z = np.zeros_like(l[:-1])
    one = np.ones_like(z)
    return np.stack(
        [rm.mc_matrix(one, z, z, l[:-1]), rm.mc_matrix(one, z, z, l_mid), rm.mc_matrix(one, z, z, l[1:])],
        axis=1,
    )


def _omega_v(coef, coef_mid):
    a, b, c, m = coef
    am, bm, cm, mm = coef_mid
    return np.stack(
        [
            rm.mc_matrix(a[:-1], b[:-1], c[:-1], m[:-1]),
            rm.mc_matrix(am, bm, cm, mm),
            rm.mc_matrix(a[1:], b[1:], c[1:], m[1:]),
        ],
        axis=1,
    )


def reconstruct_surface(c, f0=None, order="vu", check=True, tol_int=TOL_INT):
    """Integrate the frame equation over the coefficient grid.

    ``order="vu"`` walks along v at the first u node and then along every
    u-line; ``"uv"`` does the opposite.
    """
    if c.mask.any():
        raise NearSingular("cannot reconstruct across masked singular nodes")
    if check:
        worst = max_residual(integrability_residual(c))
        if worst > tol_int:
            raise IntegrabilityViolated(f"integrability residual {worst:.3e} exceeds {tol_int:g}")
    f0 = OrientedFrame.standard() if f0 is None else f0
    M0 = rm.frame_to_motion(f0).matrix()
    u, v = c.u_grid, c.v_grid
    avm = (c.a, c.b, c.c, c.m)
    if order == "vu":
        col = [arr[0][:, None] for arr in avm]
        col_mid = [_spline_mid(v, arr[0], 0)[:, None] for arr in avm]
        start = rm.integrate_paths(M0[None], _omega_v(col, col_mid), c.dv)[:, 0]
        l_mid = _spline_mid(u, c.l, 0)
        Ms = rm.integrate_paths(start, _omega_u(c.l, l_mid), c.du)
    elif order == "uv":
        l_mid = _spline_mid(u, c.l[:, 0], 0)[:, None]
        start = rm.integrate_paths(M0[None], _omega_u(c.l[:, :1], l_mid), c.du)[:, 0]
        rows = [arr.T for arr in avm]
        rows_mid = [_spline_mid(v, arr, 0) for arr in rows]
        Ms = rm.integrate_paths(start, _omega_v(rows, rows_mid), c.dv).transpose(1, 0, 2, 3)
    else:
        raise ValueError("order must be 'vu' or 'uv'")
    return SurfaceGrid(u, v, Ms[..., 1:4, 0].copy(), metadata={"order": order})


# -- normal parametrization -----------------------------------------------


class _SplineSurface:
    def __init__(self, g):
        self.g = g
        k = tuple(5 if n >= 6 else min(3, n - 1) for n in g.shape)
        self.sp = [RectBivariateSpline(g.u_grid, g.v_grid, g.points[..., i], kx=k[0], ky=k[1]) for i in range(3)]
        self.lo = np.array([g.u_grid[0], g.v_grid[0]])
        self.hi = np.array([g.u_grid[-1], g.v_grid[-1]])

    def __call__(self, u, v, du=0, dv=0):
        return np.stack([s(u, v, dx=du, dy=dv, grid=False) for s in self.sp], -1)

    def field(self, uv):
        """Parameter-space direction of E, its Levi length, and the scale of F_u, F_v."""
        u, v = uv[..., 0], uv[..., 1]
        F, Fu, Fv = self(u, v), self(u, v, du=1), self(u, v, dv=1)
        tu, tv = hc.theta(F, Fu), hc.theta(F, Fv)
        E = tu[..., None] * Fv - tv[..., None] * Fu
        norm = np.hypot(E[..., 0], E[..., 1])
        scale = np.maximum(np.linalg.norm(Fu, axis=-1), np.linalg.norm(Fv, axis=-1))
        return np.stack([-tv, tu], -1), norm, E, scale

    def inside(self, uv):
        return np.all((uv >= self.lo - 1e-12) & (uv <= self.hi + 1e-12), axis=-1)


def _rk4_trace(surf, seeds, sigma, h, n_steps):
    """Unit-speed streamlines of sigma * E / |E| in parameter space."""

    def rhs(uv):
        d, norm, _, scale = surf.field(uv)
        if np.any(norm <= EPS_SING * scale):
            raise SingularPointEncountered("streamline reached a singular point")
        return sigma[:, None] * d / norm[:, None]

    path = np.empty((n_steps + 1,) + seeds.shape)
    y = seeds.copy()
    path[0] = y
    for i in range(n_steps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        path[i + 1] = y
    return path


def _exit_lengths(surf, seeds, sigma, h):
    """Per-seed arclength until each streamline leaves the parameter domain."""
    y = seeds.copy()
    reach = np.full(len(seeds), np.inf)
    length = 0.0
    limit = 1e4 * (np.sum(surf.hi - surf.lo) + 1.0)
    while np.any(np.isinf(reach)) and length < limit:
        live = np.isinf(reach)
        d, norm, _, scale = surf.field(y[live])
        if np.any(norm <= EPS_SING * scale):
            raise SingularPointEncountered("streamline reached a singular point")
        y[live] = y[live] + h * sigma[live, None] * d / norm[:, None]
        out = live.copy()
        out[live] = ~surf.inside(y[live])
        reach[out] = length
        length += h
    return np.where(np.isinf(reach), length, reach)


def _seed_window(reach, centre, need):
    """Contiguous run of seeds around ``centre`` whose reach is at least ``need``."""
    if reach[centre] < need:
        return None
    lo = hi = centre
    while lo > 0 and reach[lo - 1] >= need:
        lo -= 1
    while hi < len(reach) - 1 and reach[hi + 1] >= need:
        hi += 1
    return lo, hi + 1


def normal_parametrize(g, n_u=None, half_length=None):
    """Resample a surface patch along its characteristic leaves.

    Leaves are traced from the v-line through the grid centre (or the
    u-line if the v-line is tangent to the foliation).  ũ is the Levi
    arclength along the leaves and ṽ the seed parameter, oriented so that
    Theta(F_ṽ) > 0 at the centre seed and (ũ, ṽ) is positively oriented
    with respect to (u, v).  Seeds whose leaves cannot be followed for
    ``half_length`` in both directions are dropped from the ends of the
    seed line; by default ``half_length`` is 95% of half the longest
    two-sided reach.
    """
    fol = foliation_field(g)
    if fol.singular.any():
        node = tuple(int(i) for i in np.argwhere(fol.singular)[0])
        raise SingularPointEncountered(f"singular point at grid node {node}")
    nu, nv = g.shape
    surf = _SplineSurface(g)
    ic, jc = nu // 2, nv // 2
    if np.all(np.abs(fol.theta_v[ic, :]) > EPS_SING):
        seed_dir = np.array([0.0, 1.0])
        seeds = np.stack([np.full(nv, g.u_grid[ic]), g.v_grid], -1)
        centre, t_seed, kind = jc, fol.theta_v[ic, jc], "v-line"
    elif np.all(np.abs(fol.theta_u[:, jc]) > EPS_SING):
        seed_dir = np.array([1.0, 0.0])
        seeds = np.stack([g.u_grid, np.full(nu, g.v_grid[jc])], -1)
        centre, t_seed, kind = ic, fol.theta_u[ic, jc], "u-line"
    else:
        raise TransversalNotFound("neither centre grid line is transversal to the foliation")
    flip = 1.0 if t_seed > 0 else -1.0
    if flip < 0:
        seeds = seeds[::-1]
        centre = len(seeds) - 1 - centre
    seed_dir = flip * seed_dir
    d, _, _, _ = surf.field(seeds)
    det = d[:, 0] * seed_dir[1] - d[:, 1] * seed_dir[0]
    sigma = np.sign(det)
    if np.any(sigma == 0) or np.any(sigma != sigma[0]):
        raise TransversalNotFound("seed line is tangent to the foliation somewhere")

    n_u = nu + (1 - nu % 2) if n_u is None else int(n_u)
    if n_u % 2 == 0 or n_u < 3:
        raise ValueError("n_u must be odd and at least 3 so the seed line sits on a node")
    probe = 0.25 * min(g.du, g.dv) / float(np.max(_param_speed(surf, seeds)))
    reach = np.minimum(_exit_lengths(surf, seeds, sigma, probe), _exit_lengths(surf, seeds, -sigma, probe))
    if half_length is None:
        half_length = 0.95 * 0.5 * float(np.max(reach))
    window = _seed_window(reach, centre, half_length / 0.95)
    if window is None or window[1] - window[0] < 3 or half_length <= 0:
        raise TransversalNotFound("too few seeds whose leaves stay inside the patch")
    lo, hi = window
    seeds, sigma, centre = seeds[lo:hi], sigma[lo:hi], centre - lo

    s = np.linspace(-half_length, half_length, n_u)
    step = s[1] - s[0]
    half_steps = (n_u - 1) // 2
    fwd = _rk4_trace(surf, seeds, sigma, 0.5 * step, 2 * half_steps)[::2]
    bwd = _rk4_trace(surf, seeds, -sigma, 0.5 * step, 2 * half_steps)[::2]
    uv = np.concatenate([bwd[:0:-1], fwd], axis=0)
    if not np.all(surf.inside(uv)):
        raise ValueError("half_length carries leaves outside the parameter domain")
    pts = surf(uv[..., 0], uv[..., 1])
    _, norm, E, _ = surf.field(uv)
    Fu = sigma[None, :, None] * E / norm[..., None]
    seed_param = seeds @ seed_dir - seeds[centre] @ seed_dir
    meta = {
        "seed": kind,
        "orientation": int(flip),
        "leaf_sign": int(sigma[0]),
        "half_length": float(half_length),
        "seed_window": [int(lo), int(hi)],
    }
    return SurfaceGrid(s, seed_param, pts, F_u=Fu, metadata=meta)


def _param_speed(surf, seeds):
    """Parameter-space length of (-theta_v, theta_u) per unit Levi length of E."""
    d, norm, _, _ = surf.field(seeds)
    return np.linalg.norm(d, axis=-1) / norm
