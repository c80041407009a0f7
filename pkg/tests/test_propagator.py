import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sshtransfer.core import ChainSpec
from sshtransfer.propagator import (
    PropagationConfig,
    PropagationError,
    average_state_fidelity,
    fidelity,
    fidelity_sweep,
    first_crossing,
    oscillation_amplitude,
    propagate,
    site_state,
    stabilization_time,
    total_descent,
)
from sshtransfer.protocols import Cosine, Exponential, Protocol, Static, TrivialLinear

C31 = ChainSpec(31)
UNIFORM3 = Static(ChainSpec(3), (1.0, 1.0))
RABI_T = math.pi / math.sqrt(2.0)


class TestFidelity:
    def test_site_state(self):
        np.testing.assert_array_equal(site_state(3, 3), [0, 0, 1])
        with pytest.raises(ValueError):
            site_state(3, 0)

    def test_values(self):
        assert fidelity(site_state(3, 3)) == 1.0
        assert fidelity(site_state(3, 1)) == 0.0
        assert fidelity(np.array([0.6, 0, 0.8j])) == pytest.approx(0.64)

    def test_average_state(self):
        assert average_state_fidelity(1.0) == pytest.approx(1.0)
        assert average_state_fidelity(0.0) == pytest.approx(0.5)
        assert average_state_fidelity(0.9) == pytest.approx(0.935, abs=1e-12)

    def test_average_state_range(self):
        for f in (-0.1, 1.1, float("nan")):
            with pytest.raises(ValueError):
                average_state_fidelity(f)

    @given(st.floats(0, 1), st.floats(0, 1))
    def test_average_state_monotone(self, a, b):
        if a <= b:
            assert average_state_fidelity(a) <= average_state_fidelity(b)


class TestRabi:
    @pytest.mark.parametrize("method", ["magnus4", "midpoint", "rk4"])
    def test_three_site_full_transfer(self, method):
        r = propagate(UNIFORM3, RABI_T, PropagationConfig(400, method))
        assert r.fidelity == pytest.approx(1.0, abs=1e-8)

    def test_spectral_exponential(self):
        r = propagate(UNIFORM3, RABI_T, PropagationConfig(200, exponential="spectral"))
        assert r.fidelity == pytest.approx(1.0, abs=1e-12)

    @given(st.floats(0.05, 6.0))
    @settings(max_examples=25, deadline=None)
    def test_three_site_analytic(self, t):
        # |<3|exp(-iHt)|1>|^2 = sin^4(t / sqrt 2) for the uniform 3-site chain
        r = propagate(UNIFORM3, t, PropagationConfig(400))
        assert r.fidelity == pytest.approx(math.sin(t / math.sqrt(2)) ** 4, abs=1e-10)

    def test_short_time(self):
        assert propagate(Exponential(C31), 0.1).fidelity < 0.01


class TestLongTransfer:
    def test_exponential_adiabatic(self):
        r = propagate(Exponential(C31), 1000.0, PropagationConfig(20))
        assert r.fidelity > 0.99
        # storage indices 1, 3, ... are the even sites of the chain
        assert np.sum(np.abs(r.final_state[1::2]) ** 2) < 1e-3

    def test_methods_agree(self):
        p = Exponential(C31)
        a = propagate(p, 50.0, PropagationConfig(200, "magnus4")).fidelity
        b = propagate(p, 50.0, PropagationConfig(200, "rk4")).fidelity
        c = propagate(p, 50.0, PropagationConfig(200, exponential="spectral")).fidelity
        assert abs(a - b) < 1e-6
        assert abs(a - c) < 1e-10

    def test_step_halving(self):
        cfg = PropagationConfig(200)
        p = Cosine(C31)
        assert abs(propagate(p, 80.0, cfg).fidelity - propagate(p, 80.0, cfg.halved()).fidelity) < 1e-8

    def test_fourth_order(self):
        p = Exponential(C31)
        ref = propagate(p, 20.0, PropagationConfig(800)).final_state
        e1 = np.linalg.norm(propagate(p, 20.0, PropagationConfig(10)).final_state - ref)
        e2 = np.linalg.norm(propagate(p, 20.0, PropagationConfig(20)).final_state - ref)
        assert 12 < e1 / e2 < 20

    def test_norm(self):
        r = propagate(TrivialLinear(C31), 300.0)
        assert r.norm_drift < 1e-10
        assert np.linalg.norm(r.final_state) == pytest.approx(1.0, abs=1e-10)

    def test_chunking_invariant(self):
        p = Cosine(C31)
        a = propagate(p, 30.0, PropagationConfig(200, chunk_steps=4096)).final_state
        b = propagate(p, 30.0, PropagationConfig(200, chunk_steps=7)).final_state
        assert np.array_equal(a, b)


class TestTimeReversal:
    @pytest.mark.parametrize("method", ["magnus4", "midpoint"])
    def test_mirror_drive_undoes_evolution(self, method):
        # running a drive backwards in time with conjugated state returns the start
        p = Exponential(C31)
        cfg = PropagationConfig(200, method)
        fwd = propagate(p, 15.0, cfg)
        back = propagate(_Reversed(p), 15.0, cfg, initial=np.conj(fwd.final_state))
        np.testing.assert_allclose(np.abs(back.final_state), np.abs(site_state(31, 1)), atol=1e-9)


class _Reversed(Protocol):
    def __init__(self, p):
        self.p = p

    @property
    def n_sites(self):
        return self.p.n_sites

    def profile(self, s):
        return self.p.profile(1.0 - np.asarray(s, dtype=float))

    def profile_rate(self, s):
        return -self.p.profile_rate(1.0 - np.asarray(s, dtype=float))

    def fields(self):
        return self.p.fields()


class _Broken(_Reversed):
    def profile(self, s):
        out = self.p.profile(s)
        out[np.asarray(s) > 0.5] = np.nan
        return out


class TestErrors:
    def test_bad_t_star(self):
        for t in (0.0, -1.0, math.inf):
            with pytest.raises(ValueError):
                propagate(Exponential(C31), t)

    def test_bad_initial(self):
        with pytest.raises(ValueError):
            propagate(Exponential(C31), 1.0, initial=np.ones(31))
        with pytest.raises(ValueError):
            propagate(Exponential(C31), 1.0, initial=np.ones(3))

    def test_non_finite_reports_step(self):
        with pytest.raises(PropagationError) as info:
            propagate(_Broken(Exponential(C31)), 10.0, PropagationConfig(10))
        assert info.value.step == 50
        assert info.value.t_star == 10.0

    def test_config(self):
        with pytest.raises(ValueError):
            PropagationConfig(method="euler")
        with pytest.raises(ValueError):
            PropagationConfig(steps_per_unit_time=0)
        with pytest.raises(ValueError):
            PropagationConfig(exponential="pade")


class TestSweep:
    def test_matches_single(self):
        p = Cosine(C31)
        curve = fidelity_sweep(p, [5.0, 10.0], PropagationConfig(50))
        assert curve[1] == (10.0, propagate(p, 10.0, PropagationConfig(50)).fidelity)

    def test_workers_identical(self):
        p = TrivialLinear(C31)
        grid = np.arange(1.0, 25.0)
        a = fidelity_sweep(p, grid, PropagationConfig(50), workers=1)
        b = fidelity_sweep(p, grid, PropagationConfig(50), workers=4)
        assert a == b

    @pytest.mark.parametrize("grid", [[], [2.0, 1.0], [0.0, 1.0], [[1.0]]])
    def test_bad_grid(self, grid):
        with pytest.raises(ValueError):
            fidelity_sweep(Cosine(C31), grid)


class TestCurveMeasures:
    curve = [(1, 0.2), (2, 0.95), (3, 0.85), (4, 0.91), (5, 0.93)]

    def test_stabilization(self):
        assert stabilization_time(self.curve) == 4
        assert stabilization_time([(1, 0.5)]) is None
        assert stabilization_time([(1, 0.95), (2, 0.99)]) == 1

    def test_first_crossing(self):
        assert first_crossing(self.curve) == 2
        assert first_crossing([(1, 0.5)]) is None

    def test_oscillation_amplitude(self):
        assert oscillation_amplitude(self.curve, window=2) == pytest.approx(0.75)
        assert oscillation_amplitude(self.curve, window=2, until=2) == 0.0
        assert oscillation_amplitude(self.curve, window=10) == pytest.approx(0.75)

    def test_total_descent(self):
        assert total_descent(self.curve) == pytest.approx(0.1)
        assert total_descent([(t, t / 10) for t in range(10)]) == 0.0

    @given(st.lists(st.floats(0, 1), min_size=1, max_size=40), st.floats(0, 1))
    def test_stabilization_property(self, fs, thr):
        curve = list(enumerate(fs))
        t = stabilization_time(curve, thr)
        if t is None:
            assert fs[-1] < thr
        else:
            assert all(f >= thr for _, f in curve[t:])
            assert t == 0 or fs[t - 1] < thr


@pytest.mark.slow
def test_fidelity_bounded_property():
    rng = np.random.default_rng(1)
    for _ in range(10):
        p = Static(ChainSpec(9), tuple(rng.uniform(0, 1, 8)))
        f = propagate(p, float(rng.uniform(1, 30)), PropagationConfig(100)).fidelity
        assert 0.0 <= f <= 1.0 + 1e-12
