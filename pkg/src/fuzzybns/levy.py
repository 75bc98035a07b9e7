"""Levy subordinator simulation and combination.

The background driving process is a compound Poisson subordinator with
exponential jump sizes: jumps arrive at rate ``a * c * lambda`` in calendar
time and each crisp size is Exponential with mean ``1/b``. Sizes are
optionally fuzzified into symmetric triangular marks ``(s(1-d), s, s(1+d))``.
Two combination rules are provided: the variance-preserving superposition
``rho' dZ + sqrt(1-rho'^2) dZ*`` of two equal-variance subordinators, and the
convex mixture ``(1-theta) dZ + theta dZ_b`` with a higher-intensity
"big jump" process ``Z_b``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .fuzzy import TriangularFuzzyNumber, scale

__all__ = [
    "RngStream",
    "SubordinatorSpec",
    "JumpPath",
    "simulate_subordinator",
    "superpose",
    "convex_combine",
    "levy_moments",
    "jump_path_to_json",
    "jump_path_from_json",
]

_U64 = 2**64


@dataclass(frozen=True)
class RngStream:
    """A named, reproducible random stream.

    (seed, stream_id) fully determines the generated sequence; distinct
    stream ids give statistically independent streams. ``derive`` produces a
    child stream from a label, so one global seed can be fanned out to any
    number of independent consumers deterministically.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not (0 <= self.seed < _U64):
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not (0 <= self.stream_id < _U64):
            raise ValueError("stream_id must be an unsigned 64-bit integer")

    def generator(self) -> np.random.Generator:
        """Fresh generator; repeated calls restart the same sequence."""
        return np.random.Generator(
            np.random.PCG64(np.random.SeedSequence([self.seed, self.stream_id]))
        )

    def derive(self, label: Union[str, int]) -> "RngStream":
        """Child stream keyed by a label; stable across runs and platforms."""
        digest = hashlib.sha256(
            f"{self.seed}:{self.stream_id}:{label}".encode()
        ).digest()
        return RngStream(self.seed, int.from_bytes(digest[:8], "big"))


@dataclass(frozen=True)
class SubordinatorSpec:
    """Compound-Poisson-exponential subordinator parameters.

    a: jump rate per unit of subordinator time (> 0).
    b: exponential jump-size parameter; mean size 1/b.
    c: intensity factor (>= 1) multiplying ``a``; c > 1 defines the
       "big jump" process.
    allow_zero_rate: test hook admitting a = 0 (a no-jump degenerate spec).

    Unit-time increment moments: mean a*c/b, variance 2*a*c/b**2.
    """

    a: float
    b: float
    c: float = 1.0
    allow_zero_rate: bool = False

    def __post_init__(self):
        if self.allow_zero_rate:
            if self.a < 0.0:
                raise ValueError("jump rate a must be non-negative")
        elif self.a <= 0.0:
            raise ValueError("jump rate a must be positive")
        if self.b <= 0.0:
            raise ValueError("jump size parameter b must be positive")
        if self.c < 1.0:
            raise ValueError("intensity factor c must be at least 1")

    @property
    def intensity(self) -> float:
        """Effective jump rate a*c per unit of subordinator time."""
        return self.a * self.c


@dataclass(frozen=True)
class JumpPath:
    """Realized subordinator trajectory on [0, T] in calendar time.

    ``times`` are strictly increasing jump epochs, ``marks`` the triangular
    jump sizes (crisp when the fuzz spread is zero), ``lam`` the time-change
    rate so the path represents Z at subordinator time lam*t.
    """

    times: tuple[float, ...]
    marks: tuple[TriangularFuzzyNumber, ...]
    lam: float
    horizon: float

    def __post_init__(self):
        if self.lam <= 0.0:
            raise ValueError("lambda must be positive")
        if self.horizon <= 0.0:
            raise ValueError("horizon must be positive")
        if len(self.times) != len(self.marks):
            raise ValueError("times and marks must have equal length")
        prev = 0.0
        for i, t in enumerate(self.times):
            if t <= 0.0 or t > self.horizon:
                raise ValueError(f"epoch {t} outside (0, {self.horizon}]")
            if i > 0 and t <= prev:
                raise ValueError("jump epochs must be strictly increasing")
            prev = t
        for mk in self.marks:
            if mk.l < 0.0:
                raise ValueError("subordinator marks must be non-negative")

    def __len__(self) -> int:
        return len(self.times)

    def core_sizes(self) -> np.ndarray:
        return np.array([mk.m for mk in self.marks])

    def total_core_mass(self) -> float:
        return float(np.sum(self.core_sizes())) if self.marks else 0.0


def simulate_subordinator(
    spec: SubordinatorSpec,
    lam: float,
    horizon: float,
    fuzz_spread: float = 0.0,
    rng: RngStream = RngStream(0),
) -> JumpPath:
    """Simulate the subordinator path on [0, horizon].

    Jump epochs form a Poisson process of rate a*c*lam; crisp sizes are
    Exponential(b); each mark is (s(1-d), s, s(1+d)) for d = fuzz_spread.
    """
    if lam <= 0.0:
        raise ValueError("lambda must be positive")
    if horizon <= 0.0:
        raise ValueError("horizon must be positive")
    if not (0.0 <= fuzz_spread < 1.0):
        raise ValueError("fuzz_spread must lie in [0, 1)")
    gen = rng.generator()
    rate = spec.intensity * lam
    n = int(gen.poisson(rate * horizon)) if rate > 0.0 else 0
    if n == 0:
        return JumpPath((), (), lam, horizon)
    times = np.sort(gen.uniform(0.0, horizon, size=n))
    sizes = gen.exponential(scale=1.0 / spec.b, size=n)
    marks = tuple(
        TriangularFuzzyNumber(s * (1.0 - fuzz_spread), s, s * (1.0 + fuzz_spread))
        for s in sizes
    )
    return JumpPath(tuple(float(t) for t in times), marks, lam, horizon)


def _check_compatible(z1: JumpPath, z2: JumpPath) -> None:
    if z1.lam != z2.lam:
        raise ValueError(f"lambda mismatch: {z1.lam} vs {z2.lam}")
    if z1.horizon != z2.horizon:
        raise ValueError(f"horizon mismatch: {z1.horizon} vs {z2.horizon}")


def _merge_scaled(
    z1: JumpPath,
    z2: JumpPath,
    weight1: Callable[[float], float],
    weight2: Callable[[float], float],
) -> JumpPath:
    """Merge two paths with per-epoch non-negative scaling weights.

    Epochs whose weight is exactly zero are dropped, so boundary weights
    reproduce the surviving input path unchanged. Ties are broken by a
    stable merge with z1 epochs first.
    """
    events: list[tuple[float, int, TriangularFuzzyNumber]] = []
    for t, mk in zip(z1.times, z1.marks):
        w = weight1(t)
        if w != 0.0:
            events.append((t, 0, mk if w == 1.0 else scale(w, mk)))
    for t, mk in zip(z2.times, z2.marks):
        w = weight2(t)
        if w != 0.0:
            events.append((t, 1, mk if w == 1.0 else scale(w, mk)))
    events.sort(key=lambda e: (e[0], e[1]))
    times = tuple(e[0] for e in events)
    marks = tuple(e[2] for e in events)
    return JumpPath(times, marks, z1.lam, z1.horizon)


def superpose(z1: JumpPath, z2: JumpPath, rho_prime: float) -> JumpPath:
    """Variance-preserving mixture rho'*Z1 + sqrt(1-rho'^2)*Z2.

    Requires 0 <= rho_prime <= 1 and equal (lam, horizon). With
    equal-variance inputs the unit-increment variance of the result matches
    the inputs since rho'^2 + (1 - rho'^2) = 1.
    """
    if not (0.0 <= rho_prime <= 1.0):
        raise ValueError(f"rho_prime must lie in [0, 1], got {rho_prime}")
    _check_compatible(z1, z2)
    w1 = rho_prime
    w2 = math.sqrt(1.0 - rho_prime * rho_prime)
    return _merge_scaled(z1, z2, lambda t: w1, lambda t: w2)


ThetaLike = Union[float, Callable[[float], float]]


def convex_combine(z: JumpPath, zb: JumpPath, theta: ThetaLike) -> JumpPath:
    """Convex mixture (1-theta)*Z + theta*Z_b of an ordinary and a
    higher-intensity subordinator.

    ``theta`` is either a constant in [0, 1] or a callable evaluated at each
    jump epoch (a deterministic schedule). theta = 0 reproduces ``z`` and
    theta = 1 reproduces ``zb`` exactly.
    """
    _check_compatible(z, zb)
    if callable(theta):
        theta_fn = theta
    else:
        th = float(theta)
        if not (0.0 <= th <= 1.0):
            raise ValueError(f"theta must lie in [0, 1], got {theta}")
        theta_fn = lambda t: th

    def w_z(t: float) -> float:
        v = theta_fn(t)
        if not (0.0 <= v <= 1.0):
            raise ValueError(f"theta({t}) = {v} outside [0, 1]")
        return 1.0 - v

    def w_zb(t: float) -> float:
        v = theta_fn(t)
        if not (0.0 <= v <= 1.0):
            raise ValueError(f"theta({t}) = {v} outside [0, 1]")
        return v

    return _merge_scaled(z, zb, w_z, w_zb)


def levy_moments(spec: SubordinatorSpec) -> tuple[float, float]:
    """(mean, variance) of the unit-time increment: (a*c/b, 2*a*c/b**2)."""
    mean_rate = spec.intensity / spec.b
    var_rate = 2.0 * spec.intensity / (spec.b * spec.b)
    return mean_rate, var_rate


def jump_path_to_json(path: JumpPath) -> str:
    payload = {
        "lambda": path.lam,
        "horizon": path.horizon,
        "times": list(path.times),
        "marks": [list(mk.as_tuple()) for mk in path.marks],
    }
    return json.dumps(payload, sort_keys=True)


def jump_path_from_json(text: str) -> JumpPath:
    payload = json.loads(text)
    marks = tuple(TriangularFuzzyNumber(*mk) for mk in payload["marks"])
    return JumpPath(
        tuple(payload["times"]), marks, payload["lambda"], payload["horizon"]
    )
