import math

import numpy as np
import pytest

from conftest import circle_cloud
from mucrit.flow import FlowError, integrate_flow, shell_starts, verify_retraction
from mucrit.geometry import PointCloud
from mucrit.shapes import ShapeSpec, generate

TWO = PointCloud([(-1.0, 0.0), (1.0, 0.0)])


def _assert_trace_invariants(trace, target, step):
    assert len(trace.points) == len(trace.dists) == trace.steps + 1
    assert np.all(np.diff(trace.dists) < 0)
    if trace.terminated == "reached-target":
        assert abs(trace.dists[-1] - target) <= step


def test_radial_trace():
    K = PointCloud([(0.0, 0.0)])
    t = integrate_flow((0, 2), K, 1.0, step=0.01)
    assert t.terminated == "reached-target"
    assert np.allclose(t.points[-1], (0, 1), atol=0.01)
    assert np.allclose(np.array(t.points)[:, 0], 0.0)
    _assert_trace_invariants(t, 1.0, 0.01)


def test_circle_trace_is_radial():
    K = circle_cloud(400)
    t = integrate_flow((1.5, 0), K, 0.2, step=0.01)
    assert t.terminated == "reached-target"
    assert np.allclose(t.points[-1], (1.2, 0), atol=0.01)
    _assert_trace_invariants(t, 0.2, 0.01)


def test_near_critical_start_stalls():
    t = integrate_flow((0, 0.001), TWO, 0.9, step=0.01)
    assert t.terminated in ("stalled", "reached-target")
    assert t.terminated == "stalled" and t.steps == 0
    _assert_trace_invariants(t, 0.9, 0.01)


def test_step_across_the_wall_stalls_without_threshold():
    # the target 0.9 lies below the critical value 1, so no descent step can make progress
    t = integrate_flow((0, 0.001), TWO, 0.9, step=0.01, tau_stall=0.0, max_steps=200)
    _assert_trace_invariants(t, 0.9, 0.01)
    assert t.terminated == "stalled" and t.dists[-1] >= 1.0


def test_integrate_flow_errors():
    with pytest.raises(FlowError, match="inside target"):
        integrate_flow((0, 0.5), TWO, 2.0)
    with pytest.raises(FlowError, match="critical start"):
        integrate_flow((0, 0), TWO, 0.5)


def test_max_steps():
    t = integrate_flow((0, 5), PointCloud([(0.0, 0.0)]), 1.0, step=0.01, max_steps=10)
    assert t.terminated == "max-steps" and t.steps == 10


@pytest.mark.parametrize("start, step", [((3.0, 1.0), 0.05), ((0.3, 2.0), 0.01), ((-2.5, -0.1), 0.2)])
def test_endpoint_tolerance(start, step):
    K = PointCloud(np.random.default_rng(3).uniform(-1, 1, size=(20, 2)))
    t = integrate_flow(start, K, 0.1, step=step)
    _assert_trace_invariants(t, 0.1, step)


def test_shell_starts_are_on_shell():
    K = circle_cloud(100)
    X = shell_starts(K, 0.5, 0.01, 30, seed=2)
    assert len(X) == 30
    d = np.array([np.min(np.linalg.norm(K.points - x, axis=1)) for x in X])
    assert np.all((d >= 0.49) & (d <= 0.5))
    assert np.array_equal(X, shell_starts(K, 0.5, 0.01, 30, seed=2))


def test_retraction_identical_clouds():
    K = circle_cloud(200)
    rep = verify_retraction(K, K, 0.5, 0.001, n_starts=32)
    assert rep.pass_fraction == 1.0 and rep.reached_fraction == 1.0
    rep = verify_retraction(PointCloud([(-5.0, 0.0), (5.0, 0.0)]), PointCloud([(-5.0, 0.0), (5.0, 0.0)]),
                            0.3, 0.001, n_starts=32)
    assert rep.pass_fraction == 1.0


def test_retraction_noisy_circle():
    K = circle_cloud(400)
    rng = np.random.default_rng(0)
    u = rng.normal(size=(400, 2))
    L = PointCloud(K.points + 0.0199 * rng.uniform(0, 1, (400, 1)) * u / np.linalg.norm(u, axis=1)[:, None])
    rep = verify_retraction(K, L, 0.5, 0.02, n_starts=48)
    assert rep.pass_fraction == 1.0
    d = rep.to_dict()
    assert d["empirical"] and len(d["traces"]) == 48
    assert [t["start_index"] for t in d["traces"]] == list(range(48))


def test_retraction_step_halving_keeps_verdicts():
    K, _ = generate(ShapeSpec("circle", {"radius": 1.0}, 0.0, 200, 0))
    full = verify_retraction(K, K, 0.4, 0.05, n_starts=24, step=0.02)
    half = verify_retraction(K, K, 0.4, 0.05, n_starts=24, step=0.01)
    for a, b in zip(full.checks, half.checks):
        if a.reached:
            assert b.stayed_in_Lr


def test_retraction_preconditions():
    K = circle_cloud(50)
    with pytest.raises(FlowError):
        verify_retraction(K, K.transformed(shift=(0.5, 0)), 0.5, 0.01)
    with pytest.raises(FlowError):
        verify_retraction(K, K, 0.5, 0.3)
