"""The nonlocal operator on the interval: strong form, weak form, residual.

The weak form is, by construction, the exact gradient of the discrete
modular assembled in `orlicz`: far pairs, the clipped band, and the
closed-form exterior strips all share their quadrature between energy and
form. Coercivity against the modular and honest energy identities then
hold at round-off level instead of at quadrature-error level.

The strong-form evaluator is separate and deliberately different in
texture: graded panels against the |x - y|^(-1-s) singularity over the
first cell, exact piecewise-linear values at cell midpoints outside the
band, and the same closed-form exterior as the weak side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError
from .orlicz import (
    GridFunction,
    _band_layout,
    _check_args,
    _far_geometry,
    _strip_factors,
)
from .quadrature import gauss_legendre, graded_panel_depth, panel_edges_graded
from .young import YoungFunction


@dataclass(frozen=True)
class OperatorConfig:
    """Discretization of the operator: growth family, order, band width,
    and how the exterior tail is handled."""

    young: YoungFunction
    s: float
    near_band: int = 1
    r_far: float = 100.0
    tail_mode: str = "analytic"

    def __post_init__(self):
        if not (0.0 < self.s < 1.0):
            raise ConfigurationError(f"s must lie in (0, 1), got {self.s}")
        if self.near_band < 1:
            raise ConfigurationError("near_band must be at least 1")
        if self.tail_mode not in ("analytic", "zero"):
            raise ConfigurationError("tail_mode must be 'analytic' or 'zero'")
        if self.r_far <= 1.0:
            raise ConfigurationError("r_far must exceed 1")


def _band_w(yf: YoungFunction, sigma: np.ndarray, radii: np.ndarray,
            s: float) -> np.ndarray:
    """W(sigma, T) = G(sigma T^(1-s)) / (sigma (1-s)): the sigma-derivative
    of the band energy density. Odd in sigma, zero at zero."""
    ex = 1.0 - s
    args = sigma * radii ** ex
    out = np.zeros(np.broadcast_shapes(sigma.shape, radii.shape))
    nz = np.broadcast_to(sigma != 0.0, out.shape)
    with np.errstate(invalid="ignore", divide="ignore"):
        vals = yf.G(args) / (np.broadcast_to(sigma, out.shape) * ex)
    out[nz] = vals[nz]
    return out


def _band_w_slope(yf: YoungFunction, sigma: np.ndarray, radii: np.ndarray,
                  s: float, mode: str) -> np.ndarray:
    """d W / d sigma for Newton assembly, or the secant ratio W/sigma."""
    ex = 1.0 - s
    rho = radii ** ex
    args = sigma * rho
    out = np.zeros(np.broadcast_shapes(sigma.shape, radii.shape))
    nz = np.broadcast_to(sigma != 0.0, out.shape)
    sig = np.broadcast_to(sigma, out.shape)
    with np.errstate(invalid="ignore", divide="ignore"):
        if mode == "newton":
            vals = (yf.g(args) * rho * sig - yf.G(args)) / (sig ** 2 * ex)
        else:
            vals = yf.G(args) / (sig ** 2 * ex)
    out[nz] = vals[nz]
    return out


def _strip_coeffs(cfg: OperatorConfig, mesh) -> tuple[np.ndarray, ...]:
    return _strip_factors(mesh, cfg.s, cfg.r_far, cfg.tail_mode)


def _strip_e(cfg: OperatorConfig, c: np.ndarray, coeffs) -> np.ndarray:
    """One-point exterior term [G(c a_l) + G(c a_r)] / (s c), odd in c,
    minus the truncated windows in zero mode."""
    yf = cfg.young
    a_l, a_r, z_l, z_r = coeffs
    out = np.zeros_like(c)
    nz = c != 0.0
    if not nz.any():
        return out
    cv = c[nz]
    num = yf.G(cv * a_l[nz]) + yf.G(cv * a_r[nz])
    if cfg.tail_mode == "zero":
        num = num - yf.G(cv * z_l[nz]) - yf.G(cv * z_r[nz])
    out[nz] = num / (cfg.s * cv)
    return out


def _strip_e_slope(cfg: OperatorConfig, c: np.ndarray, coeffs,
                   mode: str) -> np.ndarray:
    yf = cfg.young
    a_l, a_r, z_l, z_r = coeffs
    out = np.zeros_like(c)
    nz = c != 0.0
    if not nz.any():
        return out
    cv = c[nz]

    def side(a):
        av = a[nz]
        if mode == "newton":
            return (yf.g(cv * av) * av * cv - yf.G(cv * av)) / (cfg.s * cv ** 2)
        return yf.G(cv * av) / (cfg.s * cv ** 2)

    val = side(a_l) + side(a_r)
    if cfg.tail_mode == "zero":
        val = val - side(z_l) - side(z_r)
    out[nz] = val
    return out


def weak_form(cfg: OperatorConfig, u: GridFunction, v: GridFunction) -> float:
    """Ordered-pair bilinear pairing of the operator at u with the test
    function v; equals d/de of the modular energy of u + e v at e = 0."""
    _check_args(u, cfg.young, cfg.s, cfg.near_band, cfg.r_far, cfg.tail_mode)
    if not v.vanishes_on_boundary():
        raise DomainError("test functions must vanish on the boundary")
    if v.mesh.m != u.mesh.m:
        raise DomainError("u and v must share a mesh")
    yf = cfg.young
    mesh = u.mesh
    uv, vv = u.values, v.values

    mask, dist, ww = _far_geometry(mesh.m, cfg.near_band)
    du = (uv[:, None] - uv[None, :]) / dist ** cfg.s
    dv = vv[:, None] - vv[None, :]
    far = float(np.sum(np.where(mask, ww * yf.g(du) * dv / dist ** (1.0 + cfg.s), 0.0)))

    xq, xw, tl, tr = _band_layout(mesh.m, cfg.near_band)
    su = np.diff(uv)[:, None] / mesh.h
    sv = np.diff(vv) / mesh.h
    cell = np.sum(xw * (_band_w(yf, su, tl, cfg.s) + _band_w(yf, su, tr, cfg.s)),
                  axis=1)
    band = float(np.sum(cell * sv))

    coeffs = _strip_coeffs(cfg, mesh)
    wi = mesh.weights[1:-1]
    strip = 2.0 * float(np.sum(wi * vv[1:-1] * _strip_e(cfg, uv[1:-1], coeffs)))
    return far + band + strip


def residual(cfg: OperatorConfig, u: GridFunction, rhs) -> GridFunction:
    """Nodal residual of the weak problem: the i-th entry is the pairing
    with the hat function at node i minus the trapezoid-weighted load.
    Boundary entries are pinned to zero."""
    _check_args(u, cfg.young, cfg.s, cfg.near_band, cfg.r_far, cfg.tail_mode)
    yf = cfg.young
    mesh = u.mesh
    uv = u.values
    rhs_vals = rhs.values if isinstance(rhs, GridFunction) else np.asarray(rhs, float)

    mask, dist, ww = _far_geometry(mesh.m, cfg.near_band)
    du = (uv[:, None] - uv[None, :]) / dist ** cfg.s
    far_mat = np.where(mask, ww * yf.g(du) / dist ** (1.0 + cfg.s), 0.0)
    r = 2.0 * far_mat.sum(axis=1)

    xq, xw, tl, tr = _band_layout(mesh.m, cfg.near_band)
    su = np.diff(uv)[:, None] / mesh.h
    cell = np.sum(xw * (_band_w(yf, su, tl, cfg.s) + _band_w(yf, su, tr, cfg.s)),
                  axis=1) / mesh.h
    r[1:] += cell
    r[:-1] -= cell

    coeffs = _strip_coeffs(cfg, mesh)
    r[1:-1] += 2.0 * mesh.weights[1:-1] * _strip_e(cfg, uv[1:-1], coeffs)

    r[1:-1] -= mesh.weights[1:-1] * rhs_vals[1:-1]
    r[0] = r[-1] = 0.0
    return GridFunction(mesh, r)


def assemble_matrix(cfg: OperatorConfig, u: GridFunction,
                    mode: str = "newton") -> np.ndarray:
    """Interior-node system matrix: the residual Jacobian (mode="newton")
    or the frozen-ratio secant operator (mode="secant"). Symmetric and
    positive semidefinite in both modes."""
    if mode not in ("newton", "secant"):
        raise ConfigurationError("assembly mode must be 'newton' or 'secant'")
    yf = cfg.young
    mesh = u.mesh
    uv = u.values
    m = mesh.m

    mask, dist, ww = _far_geometry(m, cfg.near_band)
    du = (uv[:, None] - uv[None, :]) / dist ** cfg.s
    if mode == "newton":
        coeff = yf.g_prime(du)
    else:
        with np.errstate(invalid="ignore", divide="ignore"):
            coeff = np.where(du != 0.0, yf.g(du) / du, 0.0)
    far = np.where(mask, 2.0 * ww * coeff / dist ** (1.0 + 2.0 * cfg.s), 0.0)
    jac = np.diag(far.sum(axis=1)) - far

    xq, xw, tl, tr = _band_layout(m, cfg.near_band)
    su = np.diff(uv)[:, None] / mesh.h
    cp = np.sum(xw * (_band_w_slope(yf, su, tl, cfg.s, mode)
                      + _band_w_slope(yf, su, tr, cfg.s, mode)),
                axis=1) / mesh.h ** 2
    k = np.arange(m - 1)
    np.add.at(jac, (k, k), cp)
    np.add.at(jac, (k + 1, k + 1), cp)
    np.add.at(jac, (k, k + 1), -cp)
    np.add.at(jac, (k + 1, k), -cp)

    coeffs = _strip_coeffs(cfg, mesh)
    diag = 2.0 * mesh.weights[1:-1] * _strip_e_slope(cfg, uv[1:-1], coeffs, mode)
    idx = np.arange(1, m - 1)
    jac[idx, idx] += diag

    return jac[1:-1, 1:-1]


# ---------------------------------------------------------------------------
# strong form


def _first_cell_integral(cfg: OperatorConfig, sigma: np.ndarray,
                         h: float) -> np.ndarray:
    """int_0^h g(sigma tau^(1-s)) tau^(-1-s) dtau, odd in sigma.

    The integrand scales like tau^(p(1-s)-2) at zero; panels are graded to
    match, which is where the p_minus (1-s) > 1 restriction bites.
    """
    yf = cfg.young
    s = cfg.s
    expo = yf.p_minus * (1.0 - s) - 2.0
    depth = graded_panel_depth(expo)
    edges = panel_edges_graded(np.full(sigma.shape, h), depth)
    x, w = gauss_legendre(16)
    lo = edges[..., :-1, None]
    hi = edges[..., 1:, None]
    mid = 0.5 * (hi + lo)
    half = 0.5 * (hi - lo)
    tau = mid + half * x
    vals = yf.g(sigma[..., None, None] * tau ** (1.0 - s)) * tau ** (-1.0 - s)
    return np.sum(np.sum(vals * w, axis=-1) * half[..., 0], axis=-1)


def apply_interior(cfg: OperatorConfig, u: GridFunction) -> np.ndarray:
    """Strong-form operator values at every interior node.

    Per node: graded quadrature of the slope-substituted first cell on each
    side, exact piecewise-linear midpoint sums for the remaining interior
    cells, and the closed-form exterior strips.

    Unlike the energy side, boundary values need not vanish: the evaluation
    at one interior node stays finite for any nodal data.
    """
    yf = cfg.young
    s = cfg.s
    if yf.p_minus * (1.0 - s) <= 1.0 + 1e-12:
        raise ConfigurationError(
            "strong-form evaluation needs p_minus (1 - s) > 1; the first-cell "
            "integral diverges otherwise")
    mesh = u.mesh
    uv = u.values
    h = mesh.h
    m = mesh.m
    interior = np.arange(1, m - 1)

    # first cell on each side: difference is exactly linear in tau there
    slopes = np.diff(uv) / h
    sig_l = slopes[interior - 1]    # u(x_i) - u(x_i - tau) = sig_l tau
    sig_r = -slopes[interior]       # u(x_i) - u(x_i + tau) = -sig_r_raw tau
    out = (_first_cell_integral(cfg, sig_l, h)
           + _first_cell_integral(cfg, sig_r, h))

    # remaining band cells (near_band > 1): smooth, fixed-order Gauss with
    # exact piecewise-linear values; window clipped at the boundary
    gx, gw = gauss_legendre(12)
    for j in range(2, cfg.near_band + 1):
        lo_j, hi_j = (j - 1) * h, j * h
        tau = lo_j + (gx + 1.0) * (hi_j - lo_j) / 2.0
        wj = gw * (hi_j - lo_j) / 2.0
        for sgn in (-1.0, 1.0):
            ys = mesh.nodes[interior][:, None] + sgn * tau[None, :]
            inside = (ys > -1.0) & (ys < 1.0)
            vals = np.interp(ys, mesh.nodes, uv, left=0.0, right=0.0)
            diff = uv[interior][:, None] - vals
            contrib = yf.g(diff / tau[None, :] ** s) / tau[None, :] ** (1.0 + s)
            out += np.sum(np.where(inside, contrib * wj[None, :], 0.0), axis=1)

    # beyond the band: midpoint cells tile (band radius, distance to each
    # endpoint) exactly; midpoint values of a hat-interpolant are averages
    mids = 0.5 * (uv[:-1] + uv[1:])
    b = cfg.near_band
    max_k = m - 1 - b
    if max_k > 0:
        ks = np.arange(1, max_k + 1)
        tau_k = (b + ks - 0.5) * h
        kern = tau_k ** (-1.0 - s)
        ui = uv[interior][:, None]
        for sgn, count in ((-1, interior), (1, (m - 1) - interior)):
            live = ks[None, :] <= (count - b)[:, None]
            cell_idx = np.clip(interior[:, None] + sgn * (b + ks[None, :])
                               + (0 if sgn < 0 else -1), 0, m - 2)
            diff = ui - mids[cell_idx]
            vals = yf.g(diff / tau_k[None, :] ** s) * kern[None, :] * h
            out += np.sum(np.where(live, vals, 0.0), axis=1)

    # exterior strips, closed form
    coeffs = _strip_coeffs(cfg, mesh)
    out += _strip_e_apply(cfg, uv[interior], coeffs)
    return out


def _strip_e_apply(cfg: OperatorConfig, c: np.ndarray, coeffs) -> np.ndarray:
    # same as the weak-side strip term; the strong form carries one copy
    return _strip_e(cfg, c, coeffs)


def apply(cfg: OperatorConfig, u: GridFunction, i: int) -> float:
    """Strong-form value at interior node index ``i``."""
    mesh = u.mesh
    i = int(i)
    if not (0 < i < mesh.m - 1):
        raise DomainError(f"node index {i} is not interior (mesh has "
                          f"{mesh.m} nodes)")
    return float(apply_interior(cfg, u)[i - 1])
