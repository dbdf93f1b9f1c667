"""Meshes, grid functions, and discrete Orlicz energies on (-1, 1).

The nonlocal modular splits the ordered-pair double integral into three
regions that the operator module reuses with identical quadrature, so the
weak form is the exact gradient of the modular energy:

* far pairs: node pairs more than ``near_band`` indices apart, trapezoid
  weights in both variables;
* band: |x - y| below the band radius, integrated exactly for piecewise
  linear functions through the one-argument primitive
  Lambda(Y) = int_0^Y G(tau)/tau dtau, with the window clipped near the
  endpoints;
* strips: the exterior contribution, in closed form through Lambda after
  the substitution w = z^(-s) (`tail_mode="analytic"`), or truncated at
  ``r_far`` with the discarded mass reported (`tail_mode="zero"`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, ConvergenceError, DomainError
from .quadrature import gauss_legendre
from .young import YoungFunction

TAIL_MODES = ("analytic", "zero")

# x-quadrature order inside band cells; exact where the window is unclipped
# and ample for the linear clipping near the endpoints
_BAND_XQ = 8


class Mesh:
    """Uniform nodes on [-1, 1] including the endpoints.

    Node weights are trapezoidal. Two meshes are interchangeable whenever
    their node counts agree, so geometry caches key on ``m`` alone.
    """

    def __init__(self, m: int):
        if m < 9:
            raise ConfigurationError(f"mesh needs at least 9 nodes, got {m}")
        self.m = int(m)
        self.h = 2.0 / (self.m - 1)
        self.nodes = np.linspace(-1.0, 1.0, self.m)
        self.weights = np.full(self.m, self.h)
        self.weights[0] = self.weights[-1] = self.h / 2.0

    def refined(self) -> "Mesh":
        """Mesh with one extra node per cell; existing nodes are kept."""
        return Mesh(2 * self.m - 1)

    def middle_half(self) -> np.ndarray:
        return np.abs(self.nodes) <= 0.5 + 1e-12

    def coarse_index_in(self, fine: "Mesh") -> np.ndarray:
        """Indices of this mesh's nodes inside a nested finer mesh."""
        step, rem = divmod(fine.m - 1, self.m - 1)
        if rem != 0:
            raise ConfigurationError(
                f"meshes with {self.m} and {fine.m} nodes do not nest")
        return np.arange(self.m) * step

    def __repr__(self):
        return f"Mesh(m={self.m})"


@dataclass
class GridFunction:
    """Nodal values on a mesh, read as piecewise linear and zero outside."""

    mesh: Mesh
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.mesh.m,):
            raise DomainError(
                f"expected {self.mesh.m} nodal values, got shape {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("grid function values must be finite")

    @classmethod
    def from_callable(cls, mesh: Mesh, fn) -> "GridFunction":
        return cls(mesh, np.asarray(fn(mesh.nodes), dtype=float))

    @classmethod
    def zeros(cls, mesh: Mesh) -> "GridFunction":
        return cls(mesh, np.zeros(mesh.m))

    def copy(self) -> "GridFunction":
        return GridFunction(self.mesh, self.values.copy())

    def vanishes_on_boundary(self, tol: float = 0.0) -> bool:
        return abs(self.values[0]) <= tol and abs(self.values[-1]) <= tol

    def is_even(self, tol: float = 1e-9) -> bool:
        return bool(np.max(np.abs(self.values - self.values[::-1])) <= tol)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


def as_grid(mesh: Mesh, source) -> GridFunction:
    if isinstance(source, GridFunction):
        if source.mesh.m != mesh.m:
            raise DomainError("grid function lives on a different mesh")
        return source
    if callable(source):
        return GridFunction.from_callable(mesh, source)
    return GridFunction(mesh, np.asarray(source, dtype=float))


# ---------------------------------------------------------------------------
# geometry caches


@lru_cache(maxsize=32)
def _far_geometry(m: int, near_band: int):
    mesh = Mesh(m)
    idx = np.arange(m)
    gap = np.abs(idx[:, None] - idx[None, :])
    mask = gap > near_band
    dist = np.abs(mesh.nodes[:, None] - mesh.nodes[None, :])
    dist_safe = np.where(mask, dist, 1.0)
    ww = np.outer(mesh.weights, mesh.weights)
    return mask, dist_safe, ww


@lru_cache(maxsize=32)
def _band_layout(m: int, near_band: int):
    """Per-cell x-quadrature and clipped window radii.

    Returns xw (cells, q) weights, tl/tr (cells, q) window radii toward each
    endpoint, evaluated at the cell's Gauss points.
    """
    mesh = Mesh(m)
    radius = near_band * mesh.h
    gx, gw = gauss_legendre(_BAND_XQ)
    left = mesh.nodes[:-1]
    xq = left[:, None] + (gx[None, :] + 1.0) * (mesh.h / 2.0)
    xw = np.broadcast_to(gw[None, :] * (mesh.h / 2.0), xq.shape).copy()
    tl = np.minimum(radius, 1.0 + xq)
    tr = np.minimum(radius, 1.0 - xq)
    return xq, xw, tl, tr


def _validate_band(mesh: Mesh, near_band: int) -> None:
    if near_band < 1:
        raise ConfigurationError("near_band must be at least 1")
    if near_band * mesh.h >= 1.0:
        raise ConfigurationError(
            f"band radius {near_band * mesh.h:g} must stay below half the domain")


def _strip_factors(mesh: Mesh, s: float, r_far: float, tail_mode: str):
    """Closed-form strip coefficients A = d^(-s) per side, interior nodes.

    In zero mode the windows stop at |y| = r_far and the dropped coefficient
    pair is returned for the tail report.
    """
    x = mesh.nodes[1:-1]
    a_left = (1.0 + x) ** (-s)
    a_right = (1.0 - x) ** (-s)
    if tail_mode == "analytic":
        return a_left, a_right, None, None
    z_left = (r_far + x) ** (-s)
    z_right = (r_far - x) ** (-s)
    return a_left, a_right, z_left, z_right


def _check_args(u: GridFunction, yf: YoungFunction, s: float, near_band: int,
                r_far: float, tail_mode: str) -> None:
    if not (0.0 < s < 1.0):
        raise ConfigurationError(f"s must lie in (0, 1), got {s}")
    if tail_mode not in TAIL_MODES:
        raise ConfigurationError(f"tail_mode must be one of {TAIL_MODES}")
    if tail_mode == "zero" and r_far <= 1.0:
        raise ConfigurationError("r_far must exceed 1 when truncating the tail")
    if not u.vanishes_on_boundary():
        raise DomainError(
            "nonlocal energies need boundary values exactly zero; "
            "the exterior strip diverges otherwise")
    _validate_band(u.mesh, near_band)


# ---------------------------------------------------------------------------
# local modular and norm


def modular_LG(u: GridFunction, yf: YoungFunction) -> float:
    """Trapezoid integral of G(|u|) over the interval."""
    return float(np.sum(u.mesh.weights * yf.G(u.values)))


def luxemburg_norm_LG(u: GridFunction, yf: YoungFunction,
                      tol: float = 1e-10) -> float:
    """Scaling lam with modular_LG(u/lam) = 1, by geometric bisection."""
    return _luxemburg(lambda lam: modular_LG(_scaled(u, lam), yf), u, tol)


def _scaled(u: GridFunction, lam: float) -> GridFunction:
    return GridFunction(u.mesh, u.values / lam)


def _luxemburg(rho_of_lam, u: GridFunction, tol: float) -> float:
    if u.sup_norm() == 0.0:
        return 0.0
    lo, hi = 1e-12, 1e12
    if rho_of_lam(lo) < 1.0:
        return 0.0
    if rho_of_lam(hi) > 1.0:
        raise ConvergenceError("Luxemburg bisection: norm exceeds bracket 1e12")
    for _ in range(90):
        mid = np.sqrt(lo * hi)
        val = rho_of_lam(mid)
        if abs(val - 1.0) <= tol:
            return float(mid)
        if val > 1.0:
            lo = mid
        else:
            hi = mid
        if hi / lo - 1.0 < 1e-15:
            break
    return float(np.sqrt(lo * hi))


# ---------------------------------------------------------------------------
# nonlocal modular


def modular_W(u: GridFunction, yf: YoungFunction, s: float, *,
              near_band: int = 1, r_far: float = 100.0,
              tail_mode: str = "analytic") -> float:
    parts = modular_W_parts(u, yf, s, near_band=near_band, r_far=r_far,
                            tail_mode=tail_mode)
    return parts["total"]


def modular_W_parts(u: GridFunction, yf: YoungFunction, s: float, *,
                    near_band: int = 1, r_far: float = 100.0,
                    tail_mode: str = "analytic") -> dict:
    """Far, band, strip pieces of the nonlocal modular, plus the exact mass
    a truncated tail would drop (zero unless tail_mode="zero")."""
    _check_args(u, yf, s, near_band, r_far, tail_mode)
    mesh = u.mesh
    v = u.values

    mask, dist, ww = _far_geometry(mesh.m, near_band)
    diff = v[:, None] - v[None, :]
    far = float(np.sum(np.where(mask, ww * yf.G(diff / dist ** s) / dist, 0.0)))

    xq, xw, tl, tr = _band_layout(mesh.m, near_band)
    slope = np.abs(np.diff(v)) / mesh.h
    ex = 1.0 - s
    args_l = slope[:, None] * tl ** ex
    args_r = slope[:, None] * tr ** ex
    band = float(np.sum(xw * (yf.lam(args_l) + yf.lam(args_r))) / ex)

    a_l, a_r, z_l, z_r = _strip_factors(mesh, s, r_far, tail_mode)
    wi = mesh.weights[1:-1]
    c = np.abs(v[1:-1])
    strip_full = np.sum(wi * (yf.lam(c * a_l) + yf.lam(c * a_r))) / s
    if tail_mode == "analytic":
        strip = float(strip_full)
        tail = 0.0
    else:
        tail = float(np.sum(wi * (yf.lam(c * z_l) + yf.lam(c * z_r))) / s)
        strip = float(strip_full) - tail

    # ordered pairs: both (x, y) and (y, x) cross the boundary
    total = far + band + 2.0 * strip
    return {"far": far, "band": band, "strip": 2.0 * strip,
            "tail_dropped": 2.0 * tail, "total": total}


def luxemburg_seminorm_W(u: GridFunction, yf: YoungFunction, s: float, *,
                         near_band: int = 1, r_far: float = 100.0,
                         tail_mode: str = "analytic", tol: float = 1e-10) -> float:
    """Gauge seminorm of the nonlocal modular, geometric bisection as for
    the local norm."""

    def rho(lam):
        return modular_W(_scaled(u, lam), yf, s, near_band=near_band,
                         r_far=r_far, tail_mode=tail_mode)

    return _luxemburg(rho, u, tol)
