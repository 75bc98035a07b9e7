"""Stochastic volatility path simulation and log-return correlation analysis.

Three model variants share one structure: log returns follow a drift plus
diffusion plus leverage-coupled jumps, and the variance is a mean-reverting
positive process fed by a Levy subordinator,

    dX = (mu + beta*sig2) dt + sig dW + rho dZ
    dsig2 = -lambda sig2 dt + dZ.

The classic variant is crisp. The fuzzy variant carries triangular values
through the same recursion. The generalized variant replaces the single
subordinator with a convex mixture ``(1-theta) dZ + theta dZ_b`` of an
ordinary and a higher-intensity process, where ``theta`` is a deterministic
step schedule in time (a superposed driver for the variance is available as
an alternative).

The variance recursion is exact between jumps (exponential decay plus
discounted jump increments); only the log-return uses an Euler step.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass
from typing import IO, Iterable, Union

import numpy as np

from .fuzzy import TriangularFuzzyNumber, crisp
from .levy import (
    JumpPath,
    RngStream,
    SubordinatorSpec,
    convex_combine,
    levy_moments,
    simulate_subordinator,
    superpose,
)

__all__ = [
    "ThetaSchedule",
    "ModelParams",
    "SimulatedPath",
    "FuzzySimulatedPath",
    "CorrelationEstimate",
    "variance_exact_step",
    "simulate_classic",
    "simulate_fuzzy",
    "simulate_generalized",
    "price_path",
    "corr_formula",
    "corr_monte_carlo",
    "path_to_csv",
    "path_to_json",
    "model_params_to_dict",
    "model_params_from_dict",
]


@dataclass(frozen=True)
class ThetaSchedule:
    """Right-continuous step function t -> [0, 1] with finitely many breaks.

    ``values[i]`` applies on [breakpoints[i-1], breakpoints[i]) with the
    obvious conventions at the ends; value(t) is defined for every t >= 0.
    """

    values: tuple[float, ...]
    breakpoints: tuple[float, ...] = ()

    def __post_init__(self):
        if len(self.values) != len(self.breakpoints) + 1:
            raise ValueError("need exactly one more value than breakpoints")
        for v in self.values:
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"schedule value {v} outside [0, 1]")
        for i, b in enumerate(self.breakpoints):
            if b <= 0.0:
                raise ValueError("breakpoints must be positive")
            if i > 0 and b <= self.breakpoints[i - 1]:
                raise ValueError("breakpoints must be strictly increasing")

    @classmethod
    def constant(cls, theta: float) -> "ThetaSchedule":
        return cls((float(theta),))

    @classmethod
    def alternating(
        cls, period: float, horizon: float, start_high: bool = True
    ) -> "ThetaSchedule":
        """Schedule switching between 1 and 0 every ``period`` up to horizon."""
        if period <= 0.0 or horizon <= 0.0:
            raise ValueError("period and horizon must be positive")
        breaks = []
        b = period
        while b < horizon:
            breaks.append(b)
            b += period
        first = 1.0 if start_high else 0.0
        vals = tuple(first if i % 2 == 0 else 1.0 - first for i in range(len(breaks) + 1))
        return cls(vals, tuple(breaks))

    @property
    def is_constant(self) -> bool:
        return len(self.values) == 1

    def value(self, t: float) -> float:
        return self.values[bisect.bisect_right(self.breakpoints, t)]

    def __call__(self, t: float) -> float:
        return self.value(t)

    def integrate(self, upto: float, transform=lambda v: v) -> float:
        """Integral of transform(theta(t)) over [0, upto], exact for steps."""
        if upto <= 0.0:
            return 0.0
        total = 0.0
        prev = 0.0
        for i, b in enumerate(self.breakpoints):
            seg_end = min(b, upto)
            if seg_end > prev:
                total += transform(self.values[i]) * (seg_end - prev)
                prev = seg_end
            if b >= upto:
                break
        if upto > prev:
            total += transform(self.values[len(self.breakpoints)]) * (upto - prev)
        return total


def _as_tfn(x: Union[TriangularFuzzyNumber, float, int]) -> TriangularFuzzyNumber:
    if isinstance(x, TriangularFuzzyNumber):
        return x
    return crisp(float(x))


@dataclass(frozen=True)
class ModelParams:
    """Parameters shared by the three model variants.

    rho must be non-positive (leverage); sigma0_sq strictly positive (crisp
    values are accepted and embedded); spec_b must have strictly greater
    intensity than spec.
    """

    mu: float = 0.0
    beta: float = 0.0
    rho: float = -0.5
    lam: float = 1.0
    sigma0_sq: TriangularFuzzyNumber = TriangularFuzzyNumber(0.5, 0.5, 0.5)
    rho_prime: float = 0.5
    theta_schedule: ThetaSchedule = ThetaSchedule.constant(0.0)
    spec: SubordinatorSpec = SubordinatorSpec(1.0, 2.0, 1.0)
    spec_b: SubordinatorSpec = SubordinatorSpec(1.0, 2.0, 4.0)
    fuzz_spread: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "sigma0_sq", _as_tfn(self.sigma0_sq))
        if self.rho > 0.0:
            raise ValueError("rho must be non-positive")
        if self.lam <= 0.0:
            raise ValueError("lambda must be positive")
        if self.sigma0_sq.l <= 0.0:
            raise ValueError("sigma0_sq must be strictly positive")
        if not (0.0 <= self.rho_prime <= 1.0):
            raise ValueError("rho_prime must lie in [0, 1]")
        if not (0.0 <= self.fuzz_spread < 1.0):
            raise ValueError("fuzz_spread must lie in [0, 1)")
        if self.spec_b.intensity <= self.spec.intensity:
            raise ValueError("spec_b must have strictly greater intensity than spec")


@dataclass(eq=False)
class SimulatedPath:
    """Crisp (X, sigma^2) trajectory on a uniform grid."""

    grid: np.ndarray
    x: np.ndarray
    sigma_sq: np.ndarray
    jump_paths: dict[str, JumpPath]

    @property
    def x_core(self) -> np.ndarray:
        return self.x

    @property
    def sigma_sq_core(self) -> np.ndarray:
        return self.sigma_sq


@dataclass(eq=False)
class FuzzySimulatedPath:
    """Fuzzy (X, sigma^2) trajectory; columns are the (l, m, u) lanes."""

    grid: np.ndarray
    x: np.ndarray
    sigma_sq: np.ndarray
    jump_paths: dict[str, JumpPath]

    @property
    def x_core(self) -> np.ndarray:
        return self.x[:, 1]

    @property
    def sigma_sq_core(self) -> np.ndarray:
        return self.sigma_sq[:, 1]

    def x_tfn(self, k: int) -> TriangularFuzzyNumber:
        return TriangularFuzzyNumber(*self.x[k])

    def sigma_sq_tfn(self, k: int) -> TriangularFuzzyNumber:
        return TriangularFuzzyNumber(*self.sigma_sq[k])


@dataclass(frozen=True)
class CorrelationEstimate:
    """Log-return correlation estimate for a lag pair s < t."""

    s: float
    t: float
    value: float
    std_error: float
    method: str
    n_paths: int = 0

    def __post_init__(self):
        if self.s > self.t:
            raise ValueError("need s <= t")
        if self.std_error < 0.0:
            raise ValueError("std_error must be non-negative")


def variance_exact_step(
    sigma_sq_t: float,
    lam: float,
    dt: float,
    jumps_in_step: Iterable[tuple[float, float]] = (),
) -> float:
    """One exact variance step over an interval of length dt.

    ``jumps_in_step`` holds (offset, size) pairs with offsets measured from
    the step start, each in (0, dt]. Returns
    exp(-lam*dt)*sigma_sq_t + sum_j exp(-lam*(dt - offset_j))*size_j.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if sigma_sq_t <= 0.0:
        raise ValueError("sigma_sq_t must be strictly positive")
    out = sigma_sq_t * math.exp(-lam * dt)
    for off, size in jumps_in_step:
        out += size * math.exp(-lam * (dt - off))
    return out


def _grid_for(horizon: float, dt: float) -> np.ndarray:
    if dt <= 0.0 or horizon <= dt:
        raise ValueError("need horizon > dt > 0")
    n_steps = int(round(horizon / dt))
    if n_steps < 1 or abs(n_steps * dt - horizon) > 1e-9 * max(1.0, horizon):
        raise ValueError(f"horizon {horizon} is not a multiple of dt {dt}")
    return np.arange(n_steps + 1) * dt


def _require_constant_zero_theta(params: ModelParams, who: str) -> None:
    sched = params.theta_schedule
    if not (sched.is_constant and sched.values[0] == 0.0):
        raise ValueError(f"{who} requires a constant-zero theta schedule")


def _iter_step_jumps(path: JumpPath, grid: np.ndarray):
    """Yield, for each step k, the list of (offset, mark) with epochs in
    (grid[k], grid[k+1]]."""
    n_steps = len(grid) - 1
    jp = 0
    times = path.times
    marks = path.marks
    for k in range(n_steps):
        t0 = grid[k]
        t1 = grid[k + 1]
        step: list[tuple[float, TriangularFuzzyNumber]] = []
        while jp < len(times) and times[jp] <= t1:
            step.append((times[jp] - t0, marks[jp]))
            jp += 1
        yield step


def simulate_classic(
    params: ModelParams,
    horizon: float,
    dt: float,
    rng: RngStream,
    z_path: JumpPath | None = None,
) -> SimulatedPath:
    """Simulate the crisp model: Euler step for X, exact recursion for
    sigma^2. Requires crisp initial variance, zero fuzz spread, and a
    constant-zero theta schedule."""
    if not params.sigma0_sq.is_crisp:
        raise ValueError("classic model requires a crisp sigma0_sq")
    if params.fuzz_spread != 0.0:
        raise ValueError("classic model requires fuzz_spread = 0")
    _require_constant_zero_theta(params, "simulate_classic")
    grid = _grid_for(horizon, dt)
    n_steps = len(grid) - 1
    if z_path is None:
        z_path = simulate_subordinator(params.spec, params.lam, horizon, 0.0, rng.derive("Z"))
    normals = rng.derive("W").generator().standard_normal(n_steps)

    mu, beta, rho, lam = params.mu, params.beta, params.rho, params.lam
    sqrt_dt = math.sqrt(dt)
    x = np.zeros(n_steps + 1)
    sig2 = np.empty(n_steps + 1)
    sig2[0] = params.sigma0_sq.m
    s2 = sig2[0]
    xk = 0.0
    for k, step in enumerate(_iter_step_jumps(z_path, grid)):
        drift = (mu + beta * s2) * dt
        diff = math.sqrt(s2) * (sqrt_dt * normals[k])
        jsum = 0.0
        for _, mk in step:
            jsum += mk.m
        xk = ((xk + drift) + diff) + rho * jsum
        s2 = variance_exact_step(s2, lam, dt, [(off, mk.m) for off, mk in step])
        x[k + 1] = xk
        sig2[k + 1] = s2
    return SimulatedPath(grid, x, sig2, {"z": z_path})


def _fuzzy_engine(
    params: ModelParams,
    grid: np.ndarray,
    normals: np.ndarray,
    x_driver: JumpPath,
    sigma_driver: JumpPath,
    jump_paths: dict[str, JumpPath],
) -> FuzzySimulatedPath:
    """Shared fuzzy recursion; the middle lane reproduces the classic
    arithmetic exactly when all inputs are crisp."""
    n_steps = len(grid) - 1
    mu, beta, rho, lam = params.mu, params.beta, params.rho, params.lam
    sqrt_dt = math.sqrt(grid[1] - grid[0])
    dt = grid[1] - grid[0]

    x = np.zeros((n_steps + 1, 3))
    sig2 = np.empty((n_steps + 1, 3))
    s0 = params.sigma0_sq
    sig2[0] = (s0.l, s0.m, s0.u)
    xl = xm = xu = 0.0
    s2l, s2m, s2u = s0.l, s0.m, s0.u

    x_steps = _iter_step_jumps(x_driver, grid)
    s_steps = _iter_step_jumps(sigma_driver, grid)
    for k in range(n_steps):
        x_step = next(x_steps)
        s_step = next(s_steps)

        # drift: dt * (mu + beta*sig2), reflecting lanes for beta < 0
        if beta >= 0.0:
            bl, bm, bu = beta * s2l, beta * s2m, beta * s2u
        else:
            bl, bm, bu = beta * s2u, beta * s2m, beta * s2l
        dl = (mu + bl) * dt
        dm = (mu + bm) * dt
        du = (mu + bu) * dt

        # diffusion: (sqrt_dt * N_k) * sigma with endpoint-wise square root
        s_n = sqrt_dt * normals[k]
        gl = math.sqrt(s2l)
        gm = math.sqrt(s2m)
        gu = math.sqrt(s2u)
        if s_n >= 0.0:
            fl, fm, fu = gl * s_n, gm * s_n, gu * s_n
        else:
            fl, fm, fu = gu * s_n, gm * s_n, gl * s_n

        # jump term: rho * (componentwise sum of marks), rho <= 0 reflects
        jl = jm = ju = 0.0
        for _, mk in x_step:
            jl += mk.l
            jm += mk.m
            ju += mk.u
        if rho == 0.0:
            tl = tm = tu = 0.0
        else:
            tl, tm, tu = rho * ju, rho * jm, rho * jl

        xl = ((xl + dl) + fl) + tl
        xm = ((xm + dm) + fm) + tm
        xu = ((xu + du) + fu) + tu

        lane_l = [(off, mk.l) for off, mk in s_step]
        lane_m = [(off, mk.m) for off, mk in s_step]
        lane_u = [(off, mk.u) for off, mk in s_step]
        s2l = variance_exact_step(s2l, lam, dt, lane_l)
        s2m = variance_exact_step(s2m, lam, dt, lane_m)
        s2u = variance_exact_step(s2u, lam, dt, lane_u)

        x[k + 1] = (xl, xm, xu)
        sig2[k + 1] = (s2l, s2m, s2u)
    return FuzzySimulatedPath(grid, x, sig2, jump_paths)


def simulate_fuzzy(
    params: ModelParams,
    horizon: float,
    dt: float,
    rng: RngStream,
    z_path: JumpPath | None = None,
) -> FuzzySimulatedPath:
    """Simulate the fuzzy model; with zero fuzz spread and crisp initial
    variance the middle lane equals the classic path bit for bit under the
    same stream."""
    _require_constant_zero_theta(params, "simulate_fuzzy")
    grid = _grid_for(horizon, dt)
    n_steps = len(grid) - 1
    if z_path is None:
        z_path = simulate_subordinator(
            params.spec, params.lam, horizon, params.fuzz_spread, rng.derive("Z")
        )
    normals = rng.derive("W").generator().standard_normal(n_steps)
    return _fuzzy_engine(params, grid, normals, z_path, z_path, {"z": z_path})


def simulate_generalized(
    params: ModelParams,
    horizon: float,
    dt: float,
    rng: RngStream,
    driver: str = "convex",
) -> FuzzySimulatedPath:
    """Simulate the generalized model.

    driver="convex" (default): one ordinary and one big-jump subordinator
    are mixed by the theta schedule and drive both X and sigma^2 (theta and
    theta' are taken equal).
    driver="convex-independent": as above but X and sigma^2 use independent
    subordinator draws.
    driver="superposed": X jumps come from the ordinary subordinator while
    sigma^2 is driven by the variance-preserving superposition with weight
    rho_prime.
    """
    grid = _grid_for(horizon, dt)
    n_steps = len(grid) - 1
    normals = rng.derive("W").generator().standard_normal(n_steps)
    delta = params.fuzz_spread
    sched = params.theta_schedule

    lam = params.lam
    if driver == "convex":
        z = simulate_subordinator(params.spec, lam, horizon, delta, rng.derive("Z"))
        zb = simulate_subordinator(params.spec_b, lam, horizon, delta, rng.derive("Zb"))
        combined = convex_combine(z, zb, sched)
        return _fuzzy_engine(
            params, grid, normals, combined, combined, {"z": z, "zb": zb}
        )
    if driver == "convex-independent":
        z = simulate_subordinator(params.spec, lam, horizon, delta, rng.derive("Z"))
        zb = simulate_subordinator(params.spec_b, lam, horizon, delta, rng.derive("Zb"))
        zs = simulate_subordinator(params.spec, lam, horizon, delta, rng.derive("Zsigma"))
        zbs = simulate_subordinator(
            params.spec_b, lam, horizon, delta, rng.derive("Zbsigma")
        )
        x_driver = convex_combine(z, zb, sched)
        s_driver = convex_combine(zs, zbs, sched)
        return _fuzzy_engine(
            params,
            grid,
            normals,
            x_driver,
            s_driver,
            {"z": z, "zb": zb, "z_sigma": zs, "zb_sigma": zbs},
        )
    if driver == "superposed":
        z = simulate_subordinator(params.spec, lam, horizon, delta, rng.derive("Z"))
        z_star = simulate_subordinator(
            params.spec, lam, horizon, delta, rng.derive("Zstar")
        )
        s_driver = superpose(z, z_star, params.rho_prime)
        return _fuzzy_engine(
            params, grid, normals, z, s_driver, {"z": z, "z_star": z_star}
        )
    raise ValueError(f"unknown driver {driver!r}")


def price_path(
    path: Union[SimulatedPath, FuzzySimulatedPath],
    s0: Union[TriangularFuzzyNumber, float],
) -> np.ndarray:
    """Fuzzy price sequence s0 * exp(X) applied endpoint-wise.

    Returns an array of shape (n_points, 3) with (l, m, u) columns; a crisp
    path contributes equal lanes.
    """
    s0 = _as_tfn(s0)
    if s0.l <= 0.0:
        raise ValueError("initial price must be strictly positive")
    if isinstance(path, FuzzySimulatedPath):
        ex = np.exp(path.x)
    else:
        ex = np.exp(path.x)[:, None].repeat(3, axis=1)
    return ex * np.array([s0.l, s0.m, s0.u])


_SIMULATORS = {
    "classic": simulate_classic,
    "fuzzy": simulate_fuzzy,
    "generalized": simulate_generalized,
}


def _grid_index(grid: np.ndarray, t: float) -> int:
    dt = grid[1] - grid[0]
    k = int(round(t / dt))
    if k < 0 or k >= len(grid) or abs(grid[k] - t) > 1e-9 * max(1.0, t):
        raise ValueError(f"time {t} does not lie on the simulation grid")
    return k


def _epoch_theta_weights(
    path: JumpPath, sched: ThetaSchedule, upto: float, big: bool
) -> np.ndarray:
    w = []
    for tau in path.times:
        if tau > upto:
            break
        v = sched.value(tau)
        w.append(v if big else 1.0 - v)
    return np.array(w)


def _jump_functional(
    sizes: np.ndarray, weights: np.ndarray, functional: str
) -> float:
    if len(sizes) == 0:
        return 0.0
    if functional == "squared":
        return float(np.sum((weights * sizes) ** 2))
    if functional == "count":
        return float(np.sum(weights**2))
    raise ValueError(f"unknown jump functional {functional!r}")


def _collect_path_stats(
    variant: str,
    params: ModelParams,
    s: float,
    t: float,
    n_paths: int,
    dt: float,
    rng: RngStream,
    j_functional: str,
) -> dict[str, np.ndarray]:
    if variant not in _SIMULATORS:
        raise ValueError(f"unknown model variant {variant!r}")
    simulate = _SIMULATORS[variant]
    sched = params.theta_schedule
    x_s = np.empty(n_paths)
    x_t = np.empty(n_paths)
    i_s = np.empty(n_paths)
    i_t = np.empty(n_paths)
    j_s = np.empty(n_paths)
    for i in range(n_paths):
        path = simulate(params, t, dt, rng.derive(f"path:{i}"))
        if i == 0:
            ks = _grid_index(path.grid, s)
            kt = _grid_index(path.grid, t)
        xc = path.x_core
        sc = path.sigma_sq_core
        x_s[i] = xc[ks]
        x_t[i] = xc[kt]
        i_s[i] = np.trapezoid(sc[: ks + 1], dx=dt)
        i_t[i] = np.trapezoid(sc[: kt + 1], dx=dt)
        if variant == "generalized":
            z = path.jump_paths["z"]
            zb = path.jump_paths["zb"]
            sz = np.array([mk.m for mk, tau in zip(z.marks, z.times) if tau <= s])
            szb = np.array([mk.m for mk, tau in zip(zb.marks, zb.times) if tau <= s])
            wz = _epoch_theta_weights(z, sched, s, big=False)
            wzb = _epoch_theta_weights(zb, sched, s, big=True)
            j_s[i] = _jump_functional(sz, wz, j_functional) + _jump_functional(
                szb, wzb, j_functional
            )
        else:
            z = path.jump_paths["z"]
            sz = np.array([mk.m for mk, tau in zip(z.marks, z.times) if tau <= s])
            j_s[i] = _jump_functional(sz, np.ones(len(sz)), j_functional)
    return {"x_s": x_s, "x_t": x_t, "i_s": i_s, "i_t": i_t, "j_s": j_s}


def _variance_terms(
    variant: str, params: ModelParams, s: float, t: float
) -> tuple[float, float]:
    rho_sq_lam = params.rho * params.rho * params.lam
    if variant == "generalized":
        _, var_z = levy_moments(params.spec)
        _, var_zb = levy_moments(params.spec_b)
        sched = params.theta_schedule
        mix = lambda v: (1.0 - v) ** 2 * var_z + v**2 * var_zb
        return (
            rho_sq_lam * sched.integrate(t, mix),
            rho_sq_lam * sched.integrate(s, mix),
        )
    _, var_z = levy_moments(params.spec)
    return rho_sq_lam * var_z * t, rho_sq_lam * var_z * s


def _formula_value(
    i_s: float, i_t: float, j_s: float, rho: float, vt: float, vs: float
) -> float:
    num = i_s + rho * rho * j_s
    den = math.sqrt((i_t + vt) * (i_s + vs))
    if den == 0.0:
        return 0.0
    return num / den


def corr_formula(
    variant: str,
    params: ModelParams,
    s: float,
    t: float,
    n_paths: int,
    rng: RngStream,
    dt: float = 1.0 / 288.0,
    j_functional: str = "squared",
    n_bootstrap: int = 200,
) -> CorrelationEstimate:
    """Evaluate the closed-form correlation of (X_s, X_t).

    Integrated-variance and jump functionals are estimated by Monte Carlo
    path averages (path cores for fuzzy variants); the subordinator variance
    terms come from the analytic unit-increment moments. The jump functional
    defaults to the sum of squared sizes; "count" selects the literal
    measure-mass reading. The standard error is a path-level bootstrap.
    """
    if s <= 0.0 or t <= 0.0:
        raise ValueError("s and t must be positive")
    if s > t:
        raise ValueError("need s <= t")
    if s == t:
        return CorrelationEstimate(s, t, 1.0, 0.0, f"formula_{variant}", n_paths)
    if n_paths < 100:
        raise ValueError("n_paths must be at least 100")
    stats = _collect_path_stats(variant, params, s, t, n_paths, dt, rng, j_functional)
    vt, vs = _variance_terms(variant, params, s, t)
    rho = params.rho
    value = _formula_value(
        float(np.mean(stats["i_s"])),
        float(np.mean(stats["i_t"])),
        float(np.mean(stats["j_s"])),
        rho,
        vt,
        vs,
    )
    gen = rng.derive("bootstrap").generator()
    n = n_paths
    boot = np.empty(n_bootstrap)
    for r in range(n_bootstrap):
        idx = gen.integers(0, n, n)
        boot[r] = _formula_value(
            float(np.mean(stats["i_s"][idx])),
            float(np.mean(stats["i_t"][idx])),
            float(np.mean(stats["j_s"][idx])),
            rho,
            vt,
            vs,
        )
    std_error = float(np.std(boot, ddof=1))
    return CorrelationEstimate(s, t, value, std_error, f"formula_{variant}", n_paths)


def corr_monte_carlo(
    variant: str,
    params: ModelParams,
    s: float,
    t: float,
    n_paths: int,
    rng: RngStream,
    dt: float = 1.0 / 288.0,
    n_bootstrap: int = 200,
) -> CorrelationEstimate:
    """Sample Pearson correlation of (X_s, X_t) over simulated paths, with a
    bootstrap standard error. Degenerate samples yield value 0 with an
    infinite standard error."""
    if s <= 0.0 or t <= 0.0:
        raise ValueError("s and t must be positive")
    if s > t:
        raise ValueError("need s <= t")
    if s == t:
        return CorrelationEstimate(s, t, 1.0, 0.0, "monte_carlo", n_paths)
    if n_paths < 100:
        raise ValueError("n_paths must be at least 100")
    stats = _collect_path_stats(variant, params, s, t, n_paths, dt, rng, "squared")
    xs, xt = stats["x_s"], stats["x_t"]
    if np.std(xs) == 0.0 or np.std(xt) == 0.0:
        return CorrelationEstimate(s, t, 0.0, math.inf, "monte_carlo", n_paths)
    value = float(np.corrcoef(xs, xt)[0, 1])
    gen = rng.derive("bootstrap").generator()
    n = n_paths
    boot = np.empty(n_bootstrap)
    for r in range(n_bootstrap):
        idx = gen.integers(0, n, n)
        a, b = xs[idx], xt[idx]
        if np.std(a) == 0.0 or np.std(b) == 0.0:
            boot[r] = 0.0
        else:
            boot[r] = np.corrcoef(a, b)[0, 1]
    std_error = float(np.std(boot, ddof=1))
    return CorrelationEstimate(s, t, value, std_error, "monte_carlo", n_paths)


def _lanes(path: Union[SimulatedPath, FuzzySimulatedPath]) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(path, FuzzySimulatedPath):
        return path.x, path.sigma_sq
    return (
        path.x[:, None].repeat(3, axis=1),
        path.sigma_sq[:, None].repeat(3, axis=1),
    )


def path_to_csv(path: Union[SimulatedPath, FuzzySimulatedPath], fp: IO[str]) -> None:
    """Write a path as delimited text with columns
    t, x_l, x_m, x_u, sig2_l, sig2_m, sig2_u."""
    x, sig2 = _lanes(path)
    fp.write("t,x_l,x_m,x_u,sig2_l,sig2_m,sig2_u\n")
    for k in range(len(path.grid)):
        row = (path.grid[k], x[k, 0], x[k, 1], x[k, 2], sig2[k, 0], sig2[k, 1], sig2[k, 2])
        fp.write(",".join(repr(float(v)) for v in row) + "\n")


def path_to_json(path: Union[SimulatedPath, FuzzySimulatedPath]) -> str:
    x, sig2 = _lanes(path)
    payload = {
        "grid": [float(v) for v in path.grid],
        "x": [[float(v) for v in row] for row in x],
        "sigma_sq": [[float(v) for v in row] for row in sig2],
    }
    return json.dumps(payload, sort_keys=True)


def _spec_to_dict(spec: SubordinatorSpec) -> dict:
    return {"a": spec.a, "b": spec.b, "c": spec.c, "allow_zero_rate": spec.allow_zero_rate}


def _spec_from_dict(d: dict) -> SubordinatorSpec:
    return SubordinatorSpec(
        d["a"], d["b"], d.get("c", 1.0), d.get("allow_zero_rate", False)
    )


def model_params_to_dict(params: ModelParams) -> dict:
    return {
        "mu": params.mu,
        "beta": params.beta,
        "rho": params.rho,
        "lambda": params.lam,
        "sigma0_sq": list(params.sigma0_sq.as_tuple()),
        "rho_prime": params.rho_prime,
        "theta_schedule": {
            "values": list(params.theta_schedule.values),
            "breakpoints": list(params.theta_schedule.breakpoints),
        },
        "spec": _spec_to_dict(params.spec),
        "spec_b": _spec_to_dict(params.spec_b),
        "fuzz_spread": params.fuzz_spread,
    }


def model_params_from_dict(d: dict) -> ModelParams:
    sched = d.get("theta_schedule", {"values": [0.0], "breakpoints": []})
    sigma0 = d.get("sigma0_sq", 0.5)
    if isinstance(sigma0, (list, tuple)):
        sigma0 = TriangularFuzzyNumber(*sigma0)
    return ModelParams(
        mu=d.get("mu", 0.0),
        beta=d.get("beta", 0.0),
        rho=d.get("rho", -0.5),
        lam=d.get("lambda", 1.0),
        sigma0_sq=sigma0,
        rho_prime=d.get("rho_prime", 0.5),
        theta_schedule=ThetaSchedule(
            tuple(sched["values"]), tuple(sched.get("breakpoints", ()))
        ),
        spec=_spec_from_dict(d["spec"]) if "spec" in d else SubordinatorSpec(1.0, 2.0, 1.0),
        spec_b=_spec_from_dict(d["spec_b"]) if "spec_b" in d else SubordinatorSpec(1.0, 2.0, 4.0),
        fuzz_spread=d.get("fuzz_spread", 0.05),
    )
