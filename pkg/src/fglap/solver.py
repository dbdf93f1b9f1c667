"""Regularized solve pipeline for the singular problem.

The chain mirrors the existence construction: a damped Newton solver for
the monotone auxiliary problem with a fixed right-hand side, a fixed-point
loop over the frozen singular term, and an outer family of truncated
problems indexed by n whose solutions increase toward the final one.
Barriers, boundary energies, and an interior regularity estimate provide
the a posteriori diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ConvergenceError, DomainError, InvariantError
from .fractional import OperatorConfig, apply_interior, assemble_matrix, residual
from .orlicz import GridFunction, Mesh, luxemburg_seminorm_W, modular_W
from .young import PhiWeight, submultiplicativity_constant

SUBMULT_GATE = 1e-12


@dataclass
class ProblemData:
    """Load f >= 0, singular exponent field q >= 0, and which structural
    case the run claims: "main1" (exponent at most 1 near the boundary) or
    "main2" (larger exponents near the boundary, controlled by q_star)."""

    f: GridFunction
    q: GridFunction
    case: str = "main1"
    q_star: float | None = None
    delta: float = 0.25

    def __post_init__(self):
        if self.case not in ("main1", "main2"):
            raise ConfigurationError("case must be 'main1' or 'main2'")
        if self.f.mesh.m != self.q.mesh.m:
            raise ConfigurationError("f and q must share a mesh")
        if np.any(self.f.values < 0.0):
            raise ConfigurationError("the load f must be nonnegative")
        if np.any(self.q.values < 0.0):
            raise ConfigurationError("the exponent field q must be nonnegative")
        if not (0.0 < self.delta < 1.0):
            raise ConfigurationError("the boundary strip width must lie in (0, 1)")
        strip = 1.0 - np.abs(self.f.mesh.nodes) <= self.delta + 1e-12
        q_strip = float(self.q.values[strip].max()) if strip.any() else 0.0
        if self.case == "main1":
            if q_strip > 1.0 + 1e-12:
                raise ConfigurationError(
                    f"case main1 needs q <= 1 near the boundary; found {q_strip:g}")
        else:
            if self.q_star is None:
                raise ConfigurationError("case main2 needs q_star")
            if not (self.q_star > 1.0):
                raise ConfigurationError("q_star must exceed 1")
            if q_strip > self.q_star + 1e-12:
                raise ConfigurationError(
                    f"q reaches {q_strip:g} on the boundary strip, above "
                    f"q_star = {self.q_star:g}")

    def validate_family(self, cfg: OperatorConfig) -> None:
        """Case main2 additionally needs a submultiplicative derivative and
        an admissible weight exponent; both checked at run start."""
        if self.case != "main2":
            return
        const = submultiplicativity_constant(cfg.young)
        if const <= SUBMULT_GATE:
            raise ConfigurationError(
                f"derivative is not usefully submultiplicative "
                f"(constant {const:.3g}); case main2 is not available")
        PhiWeight(cfg.young, self.q_star)  # raises if r q_star >= p_minus

    def truncated_load(self, n: int) -> np.ndarray:
        return np.minimum(self.f.values, float(n))

    def singular_rhs(self, u: GridFunction, n: int) -> np.ndarray:
        """f_n / (u_+ + 1/n)^q, the frozen right-hand side of one
        fixed-point stage."""
        base = np.maximum(u.values, 0.0) + 1.0 / n
        return self.truncated_load(n) * base ** (-self.q.values)


@dataclass
class SolveReport:
    mesh: Mesh
    cfg: OperatorConfig | None = None
    n_values: list[int] = field(default_factory=list)
    solutions: list[GridFunction] = field(default_factory=list)
    fixed_point_iters: list[int] = field(default_factory=list)
    residual_sups: list[float] = field(default_factory=list)
    sup_diffs: list[float] = field(default_factory=list)
    energies: list[float] = field(default_factory=list)
    energy_case: str = ""
    converged: bool = False
    l_middle: float = 0.0
    alpha_hat: float = float("nan")
    holder_seminorm: float = float("nan")
    warnings: list[str] = field(default_factory=list)

    @property
    def final(self) -> GridFunction:
        if not self.solutions:
            raise InvariantError("report holds no solutions")
        return self.solutions[-1]


# ---------------------------------------------------------------------------
# auxiliary problem: fixed right-hand side


def _cone_values(mesh: Mesh, height: float = 1.0) -> np.ndarray:
    return height * (1.0 - np.abs(mesh.nodes))

def _seed_from_cone(cfg: OperatorConfig, mesh: Mesh, rhs: np.ndarray) -> np.ndarray:
    """Scalar pre-seed: scale a cone until the summed residual changes sign.

    The operator is odd and monotone, so t -> sum residual(t cone) is
    strictly increasing and negative at t = 0 whenever the load is
    nontrivial; geometric bisection on t is cheap and global.
    """
    cone = _cone_values(mesh)

    def total(t: float) -> float:
        r = residual(cfg, GridFunction(mesh, t * cone), rhs)
        return float(np.sum(r.values[1:-1]))

    hi = 1.0
    for _ in range(80):
        if total(hi) > 0.0:
            break
        hi *= 4.0
    else:
        raise ConvergenceError("seeding: residual never changed sign")
    lo = hi / 4.0 if hi > 1.0 else 1e-10
    for _ in range(40):
        mid = np.sqrt(lo * hi)
        if total(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return np.sqrt(lo * hi) * cone


def solve_auxiliary(cfg: OperatorConfig, mesh: Mesh, rhs, *,
                    warm_start: GridFunction | None = None,
                    tol: float | None = None,
                    max_iter: int = 200) -> tuple[GridFunction, dict]:
    """Damped Newton for the monotone problem  A(u) = rhs  with zero
    boundary values.

    The Hessian degenerates at u = 0 (the derivative of g vanishes there
    for our growth class), so cold starts are seeded by scaling a cone.
    A Levenberg shift grows tenfold whenever a line search fails, and five
    consecutive failures trigger one frozen-ratio secant (Picard) sweep,
    which for this operator reproduces the residual exactly and is
    unconditionally solvable.
    """
    rhs_vals = rhs.values if isinstance(rhs, GridFunction) else np.asarray(rhs, float)
    if rhs_vals.shape != (mesh.m,):
        raise ConfigurationError("rhs must provide one value per node")
    if float(rhs_vals.min()) < 0.0:
        raise DomainError("the auxiliary problem expects a nonnegative load")
    if tol is None:
        tol = 1e-8 * (1.0 + float(np.max(np.abs(rhs_vals))))

    if warm_start is not None and warm_start.sup_norm() > 0.0:
        u = warm_start.values.copy()
    elif np.max(np.abs(rhs_vals[1:-1])) == 0.0:
        zero = GridFunction.zeros(mesh)
        return zero, {"iterations": 0, "residual_sup": 0.0, "picard_steps": 0}
    else:
        u = _seed_from_cone(cfg, mesh, rhs_vals)
    u[0] = u[-1] = 0.0

    lam = 0.0
    fails = 0
    picard_steps = 0
    stats = {}
    for it in range(max_iter):
        r = residual(cfg, GridFunction(mesh, u), rhs_vals).values[1:-1]
        rn = float(np.max(np.abs(r)))
        if rn <= tol:
            stats = {"iterations": it, "residual_sup": rn,
                     "picard_steps": picard_steps}
            break

        jac = assemble_matrix(cfg, GridFunction(mesh, u), "newton")
        scale = float(np.max(np.abs(np.diag(jac)))) or 1.0
        try:
            delta = np.linalg.solve(jac + lam * scale * np.eye(jac.shape[0]), -r)
        except np.linalg.LinAlgError:
            lam = max(lam * 10.0, 1e-8)
            continue

        step = 1.0
        accepted = False
        for _ in range(8):
            trial = u.copy()
            trial[1:-1] += step * delta
            rt = residual(cfg, GridFunction(mesh, trial), rhs_vals).values[1:-1]
            if float(np.max(np.abs(rt))) < rn:
                u = trial
                accepted = True
                break
            step *= 0.5
        if accepted:
            fails = 0
            lam *= 0.1
            if lam < 1e-14:
                lam = 0.0
            continue

        fails += 1
        lam = max(lam * 10.0, 1e-8)
        if fails >= 5:
            # frozen-ratio sweep: strictly solvable and globally stabilizing
            sec = assemble_matrix(cfg, GridFunction(mesh, u), "secant")
            u_new = np.zeros(mesh.m)
            u_new[1:-1] = np.linalg.solve(
                sec, mesh.weights[1:-1] * rhs_vals[1:-1])
            u = u_new
            picard_steps += 1
            fails = 0
            lam = 0.0
    else:
        raise ConvergenceError(
            f"auxiliary solve exhausted {max_iter} iterations "
            f"(residual sup {rn:.3e}, tol {tol:.3e})")

    floor = float(u.min())
    if floor < 0.0:
        if floor < -1e-9 * (1.0 + float(np.max(np.abs(u)))):
            raise InvariantError(
                f"nonnegative load produced a solution dipping to {floor:.3e}")
        u = np.maximum(u, 0.0)
    return GridFunction(mesh, u), stats


# ---------------------------------------------------------------------------
# fixed point in the frozen singular term


def fixed_point_S(cfg: OperatorConfig, data: ProblemData, n: int, *,
                  mesh: Mesh | None = None,
                  tol: float = 1e-8, max_iter: int = 500) -> tuple[GridFunction, dict]:
    """Iterate  u_{k+1} = solve_auxiliary(f_n (u_k^+ + 1/n)^{-q})  from
    u_0 = 0 until the sup change drops below tol."""
    if mesh is None:
        mesh = data.f.mesh
    u = GridFunction.zeros(mesh)
    stats = {}
    for k in range(max_iter):
        rhs = data.singular_rhs(u, n)
        warm = u if u.sup_norm() > 0.0 else None
        u_next, aux_stats = solve_auxiliary(cfg, mesh, rhs, warm_start=warm)
        diff = float(np.max(np.abs(u_next.values - u.values)))
        u = u_next
        if diff <= tol:
            stats = {"iterations": k + 1, "last_diff": diff,
                     "residual_sup": aux_stats.get("residual_sup", 0.0)}
            break
    else:
        raise ConvergenceError(
            f"fixed point for n = {n} did not settle in {max_iter} sweeps")
    return u, stats


# ---------------------------------------------------------------------------
# monotone truncation scheme


def monotone_scheme(cfg: OperatorConfig, data: ProblemData, *,
                    mesh: Mesh | None = None,
                    n_schedule: tuple[int, ...] = (1, 2, 4, 8, 16),
                    tol_stop: float = 1e-6,
                    tol_mono: float = 1e-7) -> SolveReport:
    """Solve the truncated problems along the n schedule, enforcing nodal
    monotonicity between stages and stopping early once consecutive stages
    agree to tol_stop in the sup norm."""
    if mesh is None:
        mesh = data.f.mesh
    if len(n_schedule) < 1 or any(b <= a for a, b in zip(n_schedule, n_schedule[1:])):
        raise ConfigurationError("the n schedule must be strictly increasing")
    data.validate_family(cfg)

    report = SolveReport(mesh=mesh, cfg=cfg)
    weight = PhiWeight(cfg.young, data.q_star) if data.case == "main2" else None
    report.energy_case = data.case
    prev: GridFunction | None = None
    for n in n_schedule:
        u, stats = fixed_point_S(cfg, data, n, mesh=mesh)
        report.n_values.append(n)
        report.solutions.append(u)
        report.fixed_point_iters.append(stats["iterations"])
        report.residual_sups.append(stats["residual_sup"])
        report.energies.append(modular_W(
            _energy_carrier(u, weight), cfg.young, cfg.s,
            near_band=cfg.near_band, r_far=cfg.r_far,
            tail_mode=cfg.tail_mode))
        if prev is not None:
            drop = float(np.min(u.values - prev.values))
            if drop < -tol_mono:
                err = InvariantError(
                    f"stage n = {n} dipped {-drop:.3e} below the previous "
                    f"stage; the truncation scheme must be monotone")
                err.snapshots = (prev.copy(), u.copy())
                raise err
            report.sup_diffs.append(float(np.max(np.abs(u.values - prev.values))))
            if report.sup_diffs[-1] <= tol_stop:
                report.converged = True
                prev = u
                break
        prev = u

    final = report.final
    mid = mesh.middle_half()
    report.l_middle = float(final.values[mid].min())
    if float(data.f.values.max()) > 0.0 and report.l_middle <= 0.0:
        raise InvariantError(
            "a nontrivial load must produce a solution bounded away from "
            "zero on the middle half")
    if data.f.is_even() and data.q.is_even() and mesh.m % 2 == 1:
        if not final.is_even(1e-9):
            raise InvariantError("even data produced an uneven solution")
    report.alpha_hat, report.holder_seminorm = holder_exponent_fit(final)
    return report


# ---------------------------------------------------------------------------
# diagnostics


def barrier_check(cfg: OperatorConfig, mesh: Mesh,
                  alphas: tuple[float, ...] = (2.0, 4.0, 8.0, 16.0)) -> list[float]:
    """Minimum strong-form value of the scaled cone over interior nodes,
    one entry per scale. Monotone in the scale for any admissible family."""
    out = []
    for alpha in alphas:
        if alpha <= 0.0:
            raise ConfigurationError("barrier scales must be positive")
        cone = GridFunction(mesh, alpha * (1.0 - np.abs(mesh.nodes)))
        out.append(float(apply_interior(cfg, cone).min()))
    return out


def _energy_carrier(u: GridFunction, weight: PhiWeight | None) -> GridFunction:
    if weight is None:
        return u
    return GridFunction(u.mesh, weight.phi(np.maximum(u.values, 0.0)))


def boundary_energy_report(report: SolveReport, data: ProblemData) -> dict:
    """Gauge seminorms along the schedule: of the solutions in case main1,
    of their composition with the boundary weight in case main2. Flags
    whether the sequence stays within twice the median of its last three
    entries."""
    if report.cfg is None:
        raise ConfigurationError("the report carries no operator settings")
    cfg = report.cfg
    weight = PhiWeight(cfg.young, data.q_star) if data.case == "main2" else None
    energies = []
    for u in report.solutions:
        energies.append(luxemburg_seminorm_W(
            _energy_carrier(u, weight), cfg.young, cfg.s,
            near_band=cfg.near_band, r_far=cfg.r_far,
            tail_mode=cfg.tail_mode))
    ref = float(np.median(energies[-3:])) if energies else 0.0
    bounded = all(e <= 2.0 * ref + 1e-12 for e in energies)
    return {"case": data.case, "energies": energies,
            "reference": ref, "bounded": bounded}


def holder_exponent_fit(u: GridFunction, *,
                        window: np.ndarray | None = None) -> tuple[float, float]:
    """Interior regularity estimate on the middle half.

    For every node distance d up to half the window width, take the largest
    increment over node pairs at that distance (the increment envelope),
    then fit log envelope against log d by least squares. The envelope
    rather than all pairs: interior flats would otherwise drag the fitted
    slope far below the true growth rate. Returns (exponent, seminorm).
    """
    mask = u.mesh.middle_half() if window is None else window
    vals = u.values[mask]
    if vals.size < 3:
        return 1.0, 0.0
    h = u.mesh.h
    width = (vals.size - 1) * h
    k_max = max(int(np.floor(0.5 * width / h)), 1)
    ds, env = [], []
    for k in range(1, k_max + 1):
        e = float(np.max(np.abs(vals[k:] - vals[:-k])))
        if e > 0.0:
            ds.append(k * h)
            env.append(e)
    if len(ds) < 2:
        return 1.0, 0.0
    slope, _ = np.polyfit(np.log(ds), np.log(env), 1)
    if not np.isfinite(slope) or slope <= 0.0:
        return 1.0, 0.0
    alpha = float(min(slope, 1.0))
    semi = 0.0
    for k, (d, e) in enumerate(zip(ds, env)):
        semi = max(semi, e / d ** alpha)
    return alpha, float(semi)
