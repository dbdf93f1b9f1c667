"""Randomized verification of the quantitative inequalities the solver
leans on.

Each check draws log-uniform samples, evaluates one inequality with its
explicit constant, and reports the worst signed margin. A failed check
means the growth family does not satisfy the assumption the convergence
argument needs, so the calling pipeline must refuse to solve with it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .fractional import OperatorConfig
from .orlicz import GridFunction, Mesh
from .young import PhiWeight, YoungFunction, eval_Gbar

DEFAULT_SEED = 0x5EED
SAMPLE_LO = 1e-3
SAMPLE_HI = 1e3

# rng streams keyed per check so outcomes do not depend on execution order
_STREAM = {"delta2": 1, "lindqvist": 2, "gdiff": 3, "conjugate": 4,
           "phi_mvt": 5, "rpower": 6, "comparison": 7}


@dataclass
class CheckOutcome:
    """One inequality, many samples, one verdict."""

    name: str
    family: str
    n_samples: int
    worst_margin: float
    tolerance: float
    passed: bool = field(init=False)
    offending: dict | None = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.passed = bool(self.worst_margin >= -self.tolerance)
        if self.passed:
            self.offending = None

    def __str__(self):
        flag = "pass" if self.passed else "FAIL"
        return (f"{self.name}[{self.family}] {flag}: worst margin "
                f"{self.worst_margin:.3e} over {self.n_samples} samples")


def _rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([int(seed), _STREAM[name]])


def _log_uniform(rng, n, lo=SAMPLE_LO, hi=SAMPLE_HI) -> np.ndarray:
    return np.exp(rng.uniform(np.log(lo), np.log(hi), n))


def _worst(margins: np.ndarray, payload: dict) -> tuple[float, dict]:
    k = int(np.argmin(margins))
    sample = {key: float(np.asarray(val)[k]) for key, val in payload.items()}
    return float(margins[k]), sample


def check_delta2(yf: YoungFunction, n_samples: int = 1000, *,
                 seed: int = DEFAULT_SEED) -> CheckOutcome:
    """Two-sided doubling control: scaling the argument by lam moves G by
    a factor between lam**p_minus and lam**p_plus (exponents swap roles
    for lam < 1). Margins are relative."""
    if n_samples < 1000:
        raise ConfigurationError("delta2 needs at least 1000 samples")
    rng = _rng(seed, "delta2")
    t = _log_uniform(rng, n_samples)
    lam = _log_uniform(rng, n_samples)
    gt, glt = yf.G(t), yf.G(lam * t)
    lo_exp = np.where(lam >= 1.0, yf.p_minus, yf.p_plus)
    hi_exp = np.where(lam >= 1.0, yf.p_plus, yf.p_minus)
    lower = lam ** lo_exp * gt
    upper = lam ** hi_exp * gt
    scale = np.maximum(glt, np.maximum(lower, upper))
    margins = np.minimum(glt - lower, upper - glt) / scale
    worst, bad = _worst(margins, {"lam": lam, "t": t})
    return CheckOutcome("delta2", yf.label, n_samples, worst, 1e-9,
                        offending=bad)


def lindqvist_constant(yf: YoungFunction) -> float:
    return min(0.5, 2.0 ** (-yf.p_plus) / (2.0 * yf.p_minus))


def check_lindqvist(yf: YoungFunction, n_samples: int = 1000, *,
                    seed: int = DEFAULT_SEED) -> CheckOutcome:
    """Strict monotonicity with a quantitative floor:
    (g(b) - g(a))(b - a) >= C_L * G(|b - a|). Absolute margins; the sample
    set mixes same-sign and straddling pairs."""
    rng = _rng(seed, "lindqvist")
    a = _log_uniform(rng, n_samples)
    b = _log_uniform(rng, n_samples)
    # thirds: both positive, both negative, straddling zero
    sign_a = np.where(rng.random(n_samples) < 1.0 / 3.0, -1.0, 1.0)
    flip = rng.random(n_samples) < 0.5
    sign_b = np.where(flip, -sign_a, sign_a)
    a, b = sign_a * a, sign_b * b
    lhs = (yf.g(b) - yf.g(a)) * (b - a)
    rhs = lindqvist_constant(yf) * yf.G(np.abs(b - a))
    margins = lhs - rhs
    worst, bad = _worst(margins, {"a": a, "b": b})
    info = {"constant": lindqvist_constant(yf),
            "best_constant": float(np.min(lhs / np.maximum(rhs, 1e-300)))
            * lindqvist_constant(yf)}
    return CheckOutcome("lindqvist", yf.label, n_samples, worst, 1e-10,
                        offending=bad, info=info)


def check_gdiff(yf: YoungFunction, n_samples: int = 1000, *,
                seed: int = DEFAULT_SEED) -> CheckOutcome:
    """Difference-of-slopes control with C_E = p_plus - 1, both links:
    |g(a)-g(b)| <= C_E |a-b| g(|a|+|b|)/(|a|+|b|) <= C_E g(|a|+|b|).

    Margins are relative: near-equal pairs at the top of the sample range
    put both sides around 1e9, where an absolute gap is pure cancellation
    noise."""
    rng = _rng(seed, "gdiff")
    a = _log_uniform(rng, n_samples)
    b = _log_uniform(rng, n_samples)
    sign_a = np.where(rng.random(n_samples) < 1.0 / 3.0, -1.0, 1.0)
    sign_b = np.where(rng.random(n_samples) < 0.5, -sign_a, sign_a)
    a, b = sign_a * a, sign_b * b
    ce = yf.p_plus - 1.0
    total = np.abs(a) + np.abs(b)
    mid = ce * np.abs(a - b) * yf.g(total) / total
    cap = ce * yf.g(total)
    scale = np.maximum(np.abs(yf.g(a) - yf.g(b)), np.maximum(mid, cap))
    margins = np.minimum(mid - np.abs(yf.g(a) - yf.g(b)), cap - mid) / scale
    worst, bad = _worst(margins, {"a": a, "b": b})
    return CheckOutcome("gdiff", yf.label, n_samples, worst, 1e-10,
                        offending=bad, info={"constant": ce})


def check_conjugate(yf: YoungFunction, n_samples: int = 1000, *,
                    seed: int = DEFAULT_SEED) -> CheckOutcome:
    """Conjugate sandwich (p_minus - 1) G(t) <= Gbar(g(t)) <=
    (p_plus - 1) G(t), relative margins. The middle term stacks the
    numeric inverse of g inside a panel quadrature, hence the looser
    tolerance."""
    rng = _rng(seed, "conjugate")
    t = _log_uniform(rng, n_samples)
    gt = yf.G(t)
    mid = eval_Gbar(yf, yf.g(t))
    lower = (yf.p_minus - 1.0) * gt
    upper = (yf.p_plus - 1.0) * gt
    scale = np.maximum(mid, upper)
    margins = np.minimum(mid - lower, upper - mid) / scale
    worst, bad = _worst(margins, {"t": t})
    return CheckOutcome("conjugate", yf.label, n_samples, worst, 1e-7,
                        offending=bad)


def check_phi_mvt(weight: PhiWeight, eps: float = 1.0,
                  n_samples: int = 1000, *,
                  seed: int = DEFAULT_SEED) -> CheckOutcome:
    """Reverse mean-value bound for the boundary weight: whenever
    max(x, y) >= eps, |phi(x) - phi(y)| >= C_M phi'(eps) |x - y| with
    C_M = min(theta, 1) and theta the weight's calibrated slope ratio."""
    if eps <= 0.0:
        raise ConfigurationError("the mean-value threshold must be positive")
    rng = _rng(seed, "phi_mvt")
    hi = np.exp(rng.uniform(np.log(eps), np.log(SAMPLE_HI), n_samples))
    low = rng.uniform(0.0, hi)
    swap = rng.random(n_samples) < 0.5
    x = np.where(swap, low, hi)
    y = np.where(swap, hi, low)
    cm = min(weight.mvt_constant(), 1.0)
    slope_eps = float(weight.phi_prime(eps))
    lhs = np.abs(weight.phi(x) - weight.phi(y))
    rhs = cm * slope_eps * np.abs(x - y)
    scale = np.maximum(np.maximum(lhs, rhs), 1e-300)
    margins = (lhs - rhs) / scale
    worst, bad = _worst(margins, {"x": x, "y": y})
    return CheckOutcome("phi_mvt", weight.base.label, n_samples, worst, 1e-9,
                        offending=bad,
                        info={"constant": cm, "slope_at_eps": slope_eps,
                              "eps": eps})


def check_rpower(weight: PhiWeight, n_samples: int = 1000, *,
                 seed: int = DEFAULT_SEED) -> CheckOutcome:
    """Large-argument domination t**(1/r) <= (2/r) phi(t): scans a
    log-spaced ladder on [1, 1e6], reports the smallest point from which
    the inequality holds, and requires it to keep holding beyond."""
    del seed  # deterministic ladder; kept for a uniform call signature
    t = np.logspace(0.0, 6.0, n_samples)
    r = weight.r
    lhs = t ** (1.0 / r)
    rhs = (2.0 / r) * weight.phi(t)
    ok = lhs <= rhs * (1.0 + 1e-12)
    fail_idx = np.nonzero(~ok)[0]
    onset = 0 if fail_idx.size == 0 else int(fail_idx[-1]) + 1
    margins = (rhs - lhs) / np.maximum(rhs, lhs)
    if onset >= n_samples:
        worst, bad = -1.0, {"t": float(t[int(np.argmin(margins))])}
        t0 = float("inf")
    else:
        worst = float(np.min(margins[onset:]))
        bad = {"t": float(t[onset + int(np.argmin(margins[onset:]))])}
        t0 = float(t[onset])
    return CheckOutcome("rpower", weight.base.label, n_samples, worst, 1e-12,
                        offending=bad, info={"t0": t0, "r": r})


def check_comparison(cfg: OperatorConfig, trials: int = 20, *,
                     mesh: Mesh | None = None,
                     seed: int = DEFAULT_SEED) -> CheckOutcome:
    """Discrete comparison principle: ordering the loads orders the
    solutions nodally (tolerance 1e-7). For exactly homogeneous families
    a doubled load must scale the solution by 2**(1/(p-1)) within 1e-6."""
    from .solver import solve_auxiliary

    if mesh is None:
        mesh = Mesh(33)
    rng = _rng(seed, "comparison")
    yf = cfg.young
    worst = np.inf
    bad = None
    for k in range(trials):
        base = rng.uniform(0.1, 2.0, mesh.m)
        bump = rng.uniform(0.0, 1.0, mesh.m)
        u, _ = solve_auxiliary(cfg, mesh, base)
        v, _ = solve_auxiliary(cfg, mesh, base + bump)
        margin = float(np.min(v.values - u.values))
        if margin < worst:
            worst, bad = margin, {"trial": k, "margin": margin}
    info = {}
    if abs(yf.p_plus - yf.p_minus) < 1e-12:
        scale = 2.0 ** (1.0 / (yf.p_minus - 1.0))
        load = rng.uniform(0.5, 1.5, mesh.m)
        u, _ = solve_auxiliary(cfg, mesh, load)
        v, _ = solve_auxiliary(cfg, mesh, 2.0 * load)
        drift = float(np.max(np.abs(v.values - scale * u.values)))
        info["doubling_drift"] = drift
        if drift > 1e-6:
            worst = min(worst, -drift)
            bad = {"doubling_drift": drift}
    return CheckOutcome("comparison", yf.label, trials, worst, 1e-7,
                        offending=bad, info=info)


def run_check_suite(yf: YoungFunction, *, q_star: float = 2.0,
                    eps: float = 1.0, n_samples: int = 1000,
                    seed: int = DEFAULT_SEED) -> list[CheckOutcome]:
    """The six sample-driven checks for one growth family. Solver-level
    comparison runs separately because it needs an operator config."""
    weight = PhiWeight(yf, q_star)
    return [
        check_delta2(yf, n_samples, seed=seed),
        check_lindqvist(yf, n_samples, seed=seed),
        check_gdiff(yf, n_samples, seed=seed),
        check_conjugate(yf, n_samples, seed=seed),
        check_phi_mvt(weight, eps, n_samples, seed=seed),
        check_rpower(weight, n_samples, seed=seed),
    ]
