import math

import numpy as np
import pytest

from fuzzybns.fuzzy import TriangularFuzzyNumber
from fuzzybns.levy import (
    JumpPath,
    RngStream,
    SubordinatorSpec,
    convex_combine,
    jump_path_from_json,
    jump_path_to_json,
    levy_moments,
    simulate_subordinator,
    superpose,
)


def unit_increments(path: JumpPath) -> np.ndarray:
    """Crisp mass per unit-time bucket of a jump path."""
    n = int(path.horizon)
    out = np.zeros(n)
    for t, mk in zip(path.times, path.marks):
        k = min(int(t), n - 1)
        out[k] += mk.m
    return out


# ------------------------------------------------------------------- streams


def test_rng_stream_determinism_and_independence():
    s = RngStream(12345, 7)
    a = s.generator().standard_normal(8)
    b = s.generator().standard_normal(8)
    assert np.array_equal(a, b)
    c = s.derive("other").generator().standard_normal(8)
    assert not np.array_equal(a, c)
    assert s.derive("x") == s.derive("x")
    assert s.derive("x") != s.derive("y")


def test_rng_stream_validation():
    with pytest.raises(ValueError):
        RngStream(-1)
    with pytest.raises(ValueError):
        RngStream(0, 2**64)


# ------------------------------------------------------------ specifications


def test_spec_validation():
    with pytest.raises(ValueError):
        SubordinatorSpec(0.0, 1.0)
    SubordinatorSpec(0.0, 1.0, allow_zero_rate=True)
    with pytest.raises(ValueError):
        SubordinatorSpec(1.0, 0.0)
    with pytest.raises(ValueError):
        SubordinatorSpec(1.0, 1.0, 0.5)


def test_levy_moments_examples():
    assert levy_moments(SubordinatorSpec(1, 1, 1)) == (1.0, 2.0)
    assert levy_moments(SubordinatorSpec(2, 2, 1)) == (1.0, 1.0)
    m1, v1 = levy_moments(SubordinatorSpec(1.5, 2.0, 1))
    m3, v3 = levy_moments(SubordinatorSpec(1.5, 2.0, 3))
    assert m3 == pytest.approx(3 * m1)
    assert v3 == pytest.approx(3 * v1)


def test_levy_moments_against_monte_carlo():
    # one long path gives 1e5 unit increments of the compound process
    spec = SubordinatorSpec(1.0, 1.0, 1.0)
    path = simulate_subordinator(spec, 1.0, 1e5, 0.0, RngStream(77))
    inc = unit_increments(path)
    mean, var = levy_moments(spec)
    se_mean = np.std(inc, ddof=1) / math.sqrt(len(inc))
    assert abs(np.mean(inc) - mean) < 3 * se_mean
    s2 = np.var(inc, ddof=1)
    m4 = np.mean((inc - np.mean(inc)) ** 4)
    se_var = math.sqrt(max(m4 - s2**2, 0.0) / len(inc))
    assert abs(s2 - var) < 3 * se_var


# ----------------------------------------------------------------- simulator


def test_simulate_determinism():
    spec = SubordinatorSpec(2.0, 1.5, 1.0)
    rng = RngStream(9, 3)
    p1 = simulate_subordinator(spec, 1.0, 50.0, 0.05, rng)
    p2 = simulate_subordinator(spec, 1.0, 50.0, 0.05, rng)
    assert p1 == p2


def test_simulate_zero_rate_gives_empty_path():
    spec = SubordinatorSpec(0.0, 1.0, allow_zero_rate=True)
    path = simulate_subordinator(spec, 1.0, 10.0, 0.0, RngStream(1))
    assert len(path) == 0
    assert path.total_core_mass() == 0.0


def test_simulate_argument_validation():
    spec = SubordinatorSpec(1.0, 1.0)
    with pytest.raises(ValueError):
        simulate_subordinator(spec, 0.0, 1.0, 0.0, RngStream(1))
    with pytest.raises(ValueError):
        simulate_subordinator(spec, 1.0, -1.0, 0.0, RngStream(1))
    with pytest.raises(ValueError):
        simulate_subordinator(spec, 1.0, 1.0, 1.0, RngStream(1))


def test_jump_count_poisson_moment():
    # rate a*c*lambda = 1, horizon 1000: mean count over 200 reps
    spec = SubordinatorSpec(1.0, 1.0, 1.0)
    rng = RngStream(42)
    counts = [
        len(simulate_subordinator(spec, 1.0, 1000.0, 0.0, rng.derive(i)))
        for i in range(200)
    ]
    expected = 1000.0
    se = math.sqrt(expected / len(counts))
    assert abs(np.mean(counts) - expected) < 3 * se


def test_total_mass_compound_poisson_mean():
    # mean total mass = a*c*lambda*T/b = 2*0.5*100/4 = 25
    spec = SubordinatorSpec(2.0, 4.0, 1.0)
    rng = RngStream(43)
    masses = [
        simulate_subordinator(spec, 0.5, 100.0, 0.0, rng.derive(i)).total_core_mass()
        for i in range(200)
    ]
    se = np.std(masses, ddof=1) / math.sqrt(len(masses))
    assert abs(np.mean(masses) - 25.0) < 3 * se


def test_fuzzified_marks():
    spec = SubordinatorSpec(1.0, 1.0)
    path = simulate_subordinator(spec, 1.0, 50.0, 0.1, RngStream(5))
    assert len(path) > 0
    for mk in path.marks:
        assert mk.l == pytest.approx(0.9 * mk.m)
        assert mk.u == pytest.approx(1.1 * mk.m)
        assert mk.l >= 0.0


# --------------------------------------------------------------- combinators


def make_pair(seed, horizon=200.0, spec=None, delta=0.0):
    spec = spec or SubordinatorSpec(1.0, 1.0)
    rng = RngStream(seed)
    z1 = simulate_subordinator(spec, 1.0, horizon, delta, rng.derive("a"))
    z2 = simulate_subordinator(spec, 1.0, horizon, delta, rng.derive("b"))
    return z1, z2


def test_superpose_boundaries():
    z1, z2 = make_pair(6)
    assert superpose(z1, z2, 1.0) == z1
    assert superpose(z1, z2, 0.0) == z2
    with pytest.raises(ValueError):
        superpose(z1, z2, 1.2)


def test_superpose_mismatch_errors():
    z1, _ = make_pair(7)
    other = simulate_subordinator(SubordinatorSpec(1, 1), 2.0, 200.0, 0.0, RngStream(8))
    with pytest.raises(ValueError):
        superpose(z1, other, 0.5)


def test_superpose_count_additivity_interior():
    z1, z2 = make_pair(9)
    for rho in (0.25, 0.5, 0.75):
        merged = superpose(z1, z2, rho)
        assert len(merged) == len(z1) + len(z2)
        assert all(mk.l >= 0 for mk in merged.marks)


def test_superpose_variance_preservation():
    # equal-variance inputs: the mixture weights are on the unit circle
    spec = SubordinatorSpec(1.0, 1.0)
    rng = RngStream(11)
    z1 = simulate_subordinator(spec, 1.0, 10000.0, 0.0, rng.derive("a"))
    z2 = simulate_subordinator(spec, 1.0, 10000.0, 0.0, rng.derive("b"))
    _, var = levy_moments(spec)
    merged = superpose(z1, z2, 0.6)
    inc = unit_increments(merged)
    s2 = np.var(inc, ddof=1)
    m4 = np.mean((inc - np.mean(inc)) ** 4)
    se = math.sqrt(max(m4 - s2**2, 0.0) / len(inc))
    assert abs(s2 - var) < 3 * se


def test_convex_combine_boundaries_exact():
    spec = SubordinatorSpec(1.0, 1.0, 1.0)
    spec_b = SubordinatorSpec(1.0, 1.0, 4.0)
    rng = RngStream(12)
    z = simulate_subordinator(spec, 1.0, 100.0, 0.05, rng.derive("z"))
    zb = simulate_subordinator(spec_b, 1.0, 100.0, 0.05, rng.derive("zb"))
    assert convex_combine(z, zb, 0.0) == z
    assert convex_combine(z, zb, 1.0) == zb
    with pytest.raises(ValueError):
        convex_combine(z, zb, -0.1)


def test_convex_combine_mean_linearity():
    # theta = 0.5 with c = 4: mean unit mass is the average of the extremes
    spec = SubordinatorSpec(1.0, 1.0, 1.0)
    spec_b = SubordinatorSpec(1.0, 1.0, 4.0)
    rng = RngStream(13)
    masses = []
    for i in range(200):
        z = simulate_subordinator(spec, 1.0, 50.0, 0.0, rng.derive(f"z{i}"))
        zb = simulate_subordinator(spec_b, 1.0, 50.0, 0.0, rng.derive(f"zb{i}"))
        masses.append(convex_combine(z, zb, 0.5).total_core_mass())
    lo = 1.0 * 50.0  # a*lambda*T/b
    hi = 4.0 * 50.0
    expected = 0.5 * lo + 0.5 * hi
    se = np.std(masses, ddof=1) / math.sqrt(len(masses))
    assert abs(np.mean(masses) - expected) < 3 * se


def test_convex_combine_schedule_weights():
    z = JumpPath((1.0, 3.0), (TriangularFuzzyNumber(1, 1, 1),) * 2, 1.0, 4.0)
    zb = JumpPath((2.0,), (TriangularFuzzyNumber(2, 2, 2),), 1.0, 4.0)
    sched = lambda t: 1.0 if t >= 2.0 else 0.0
    merged = convex_combine(z, zb, sched)
    # z keeps its epoch at t=1 (weight 1), loses t=3 (weight 0);
    # zb keeps t=2 with weight 1
    assert merged.times == (1.0, 2.0)
    assert merged.marks[0].m == 1.0
    assert merged.marks[1].m == 2.0


def test_non_negativity_after_chains():
    z1, z2 = make_pair(14, delta=0.05)
    spec_b = SubordinatorSpec(1.0, 1.0, 4.0)
    zb = simulate_subordinator(spec_b, 1.0, 200.0, 0.05, RngStream(15))
    merged = convex_combine(superpose(z1, z2, 0.3), zb, 0.7)
    assert all(mk.l >= 0.0 for mk in merged.marks)


# ------------------------------------------------------------- serialization


def test_jump_path_json_roundtrip():
    path, _ = make_pair(16, horizon=20.0, delta=0.05)
    restored = jump_path_from_json(jump_path_to_json(path))
    assert restored == path


def test_jump_path_validation():
    with pytest.raises(ValueError):
        JumpPath((2.0, 1.0), (TriangularFuzzyNumber(1, 1, 1),) * 2, 1.0, 4.0)
    with pytest.raises(ValueError):
        JumpPath((5.0,), (TriangularFuzzyNumber(1, 1, 1),), 1.0, 4.0)
    with pytest.raises(ValueError):
        JumpPath((1.0,), (TriangularFuzzyNumber(-1, 1, 1),), 1.0, 4.0)
