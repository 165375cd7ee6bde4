import math

import numpy as np
import pytest

from generic_integrators import (
    Cosine,
    Harmonic,
    NonFiniteError,
    NotApplicableError,
    State,
    SystemParams,
    adg_step,
    get_stepper,
    integrate,
    irreversible_flow_exact,
    irreversible_flow_modified,
    modified_energy,
    mybaby_step,
    rk3_map,
    rk3_step,
    total_energy,
    verlet_step,
    ybaby_step,
)

from conftest import Free, Linear, random_states

UNIT = SystemParams(m=1.0, gamma=0.01, temperature=1.0)
UNDAMPED = SystemParams(m=1.0, gamma=0.0, temperature=1.0)


class TestVerlet:
    def test_hand_evaluated_step(self):
        got = verlet_step(State(1.0, 0.0, 0.0), 0.1, UNDAMPED, Harmonic(1.0))
        assert got.q == pytest.approx(0.995, rel=1e-14)
        assert got.p == pytest.approx(-0.09975, rel=1e-13)
        assert got.S == 0.0

    def test_free_flight(self, free_potential):
        got = verlet_step(State(0.0, 1.0, 0.0), 0.5, UNDAMPED, free_potential)
        assert got == State(0.5, 1.0, 0.0)

    def test_entropy_untouched(self):
        for state in random_states(50, seed=20):
            got = verlet_step(state, 0.3, UNIT, Cosine(1.0))
            assert got.S == state.S


class TestIrreversibleFlowExact:
    def test_hand_evaluated_halving(self):
        params = SystemParams(m=1.0, gamma=1.0, temperature=1.0)
        got = irreversible_flow_exact(State(0.0, 2.0, 0.0), math.log(2.0), params)
        assert got.q == 0.0
        assert got.p == pytest.approx(1.0, rel=1e-15)
        assert got.S == pytest.approx(1.5, rel=1e-15)

    def test_zero_damping_is_identity(self):
        for state in random_states(50, seed=21):
            assert irreversible_flow_exact(state, 0.7, UNDAMPED) == state

    def test_total_energy_invariant(self):
        pot = Cosine(1.0)
        rng = np.random.default_rng(22)
        for state in random_states(1000, seed=23):
            dt = float(rng.uniform(0.01, 2.0))
            before = total_energy(state, UNIT, pot)
            after = total_energy(irreversible_flow_exact(state, dt, UNIT), UNIT, pot)
            assert abs(after - before) <= 1e-13 * max(1.0, abs(before))


class TestIrreversibleFlowModified:
    def test_zero_hessian_matches_exact_flow(self, linear_potential):
        for state in random_states(50, seed=24):
            got = irreversible_flow_modified(state, 0.4, 0.5, UNIT, linear_potential)
            assert got == irreversible_flow_exact(state, 0.4, UNIT)

    def test_zero_damping_is_identity(self):
        for state in random_states(50, seed=25):
            assert irreversible_flow_modified(state, 0.4, 0.5, UNDAMPED, Cosine(1.0)) == state

    @pytest.mark.parametrize("h_outer", [0.1, 0.5])
    def test_modified_energy_invariant(self, h_outer):
        pot = Cosine(1.0)
        rng = np.random.default_rng(26)
        for state in random_states(1000, seed=27):
            dt = float(rng.uniform(0.01, 2.0))
            before = modified_energy(state, h_outer, UNIT, pot)
            after = modified_energy(
                irreversible_flow_modified(state, dt, h_outer, UNIT, pot),
                h_outer,
                UNIT,
                pot,
            )
            assert abs(after - before) <= 1e-13 * max(1.0, abs(before))


class TestYbaby:
    def test_reduces_to_verlet_without_damping(self):
        for state in random_states(100, seed=28):
            for pot in (Harmonic(1.0), Cosine(1.3)):
                assert ybaby_step(state, 0.25, UNDAMPED, pot) == verlet_step(
                    state, 0.25, UNDAMPED, pot
                )

    def test_hand_evaluated_free_step(self, free_potential):
        params = SystemParams(m=1.0, gamma=1.0, temperature=1.0)
        h = 2.0 * math.log(2.0)
        got = ybaby_step(State(0.0, 2.0, 0.0), h, params, free_potential)
        assert got.q == pytest.approx(2.0 * math.log(2.0), rel=1e-14)
        assert got.p == pytest.approx(0.5, rel=1e-14)
        assert got.S == pytest.approx(1.875, rel=1e-14)
        before = total_energy(State(0.0, 2.0, 0.0), params, free_potential)
        after = total_energy(got, params, free_potential)
        assert before == pytest.approx(2.0, rel=1e-15)
        assert after == pytest.approx(2.0, rel=1e-14)

    def test_entropy_never_decreases(self):
        params = SystemParams(m=0.7, gamma=2.0, temperature=0.3)
        for state in random_states(200, seed=29):
            for h in (0.01, 0.5, 2.0):
                assert ybaby_step(state, h, params, Cosine(1.0)).S >= state.S


class TestMybaby:
    def test_zero_hessian_reduces_to_ybaby(self, linear_potential):
        for state in random_states(100, seed=30):
            assert mybaby_step(state, 0.5, UNIT, linear_potential) == ybaby_step(
                state, 0.5, UNIT, linear_potential
            )

    def test_reduces_to_verlet_without_damping(self):
        for state in random_states(100, seed=31):
            for pot in (Harmonic(1.0), Cosine(1.3)):
                assert mybaby_step(state, 0.25, UNDAMPED, pot) == verlet_step(
                    state, 0.25, UNDAMPED, pot
                )

    def test_entropy_never_decreases(self):
        params = SystemParams(m=0.7, gamma=2.0, temperature=0.3)
        for state in random_states(200, seed=32):
            for h in (0.01, 0.5, 2.0):
                assert mybaby_step(state, h, params, Cosine(1.0)).S >= state.S


class TestRk3:
    def test_free_flight_exact(self, free_potential):
        got = rk3_step(State(0.0, 1.0, 0.0), 0.5, UNDAMPED, free_potential)
        assert got.q == pytest.approx(0.5, abs=1e-16)
        assert got.p == 1.0
        assert got.S == 0.0

    def test_scalar_stage_wiring(self):
        # dx/dt = x from x=1 over h=0.1 must give the third-order Taylor
        # value of e^0.1
        (got,) = rk3_map(lambda x: (x[0],), (1.0,), 0.1)
        assert got == pytest.approx(1.1051666666666666, rel=1e-15)

    def test_fixed_point(self):
        got = rk3_map(lambda x: (0.0, 0.0, 0.0), (1.0, 2.0, 3.0), 0.7)
        assert got == (1.0, 2.0, 3.0)


class TestAdg:
    def test_hand_evaluated_half_period(self):
        got = adg_step(State(1.0, 0.0, 0.0), 2.0, UNDAMPED, 1.0)
        assert got.q == pytest.approx(0.0, abs=1e-16)
        assert got.p == pytest.approx(-1.0, rel=1e-15)
        assert got.S == 0.0

    def test_undamped_energy_exact(self):
        pot = Harmonic(1.0)
        traj = integrate(get_stepper("adg"), State(1.0, 0.0, 0.0), 0.5, 200, UNDAMPED, pot)
        energies = traj.energy_series(UNDAMPED, pot)
        assert np.max(np.abs(energies - 0.5)) < 1e-13

    def test_entropy_increment_formula(self):
        params = SystemParams(m=2.0, gamma=0.4, temperature=1.5)
        for state in random_states(100, seed=33):
            h = 0.3
            got = adg_step(state, h, params, 1.0)
            p_mid = 0.5 * (state.p + got.p)
            expected = state.S + h * params.gamma * p_mid * p_mid / (params.m * params.temperature)
            assert got.S == pytest.approx(expected, rel=1e-15)
            assert got.S >= state.S

    def test_rejects_cosine(self):
        with pytest.raises(NotApplicableError):
            get_stepper("adg")(State(1.0, 0.0, 0.0), 0.1, UNIT, Cosine(1.0))


class TestIntegrate:
    def test_zero_steps_returns_initial_only(self):
        traj = integrate(get_stepper("ybaby"), State(1.0, 0.0, 0.0), 0.1, 0, UNIT, Harmonic(1.0))
        assert len(traj) == 1
        assert traj.state(0) == State(1.0, 0.0, 0.0)

    def test_bitwise_deterministic(self):
        args = (State(1.0, 0.0, 0.0), 0.1, 500, UNIT, Cosine(1.0))
        a = integrate(get_stepper("mybaby"), *args)
        b = integrate(get_stepper("mybaby"), *args)
        assert np.array_equal(a.xs, b.xs)

    def test_time_grid(self):
        traj = integrate(get_stepper("verlet"), State(1.0, 0.0, 0.0), 0.25, 8, UNDAMPED, Harmonic(1.0))
        assert np.array_equal(traj.times, 0.25 * np.arange(9))

    def test_nonfinite_detection(self):
        def blowup(state, h, params, pot):
            return State(state.q, state.p * 1e200, state.S)

        with pytest.raises(NonFiniteError):
            integrate(blowup, State(0.0, 1.0, 0.0), 0.1, 10, UNIT, Harmonic(1.0))

    def test_propagates_not_applicable(self):
        with pytest.raises(NotApplicableError):
            integrate(get_stepper("adg"), State(1.0, 0.0, 0.0), 0.1, 5, UNIT, Cosine(1.0))

    def test_energy_error_plateaus(self):
        # the energy error of the splitting settles into a bounded band
        # instead of drifting: the late-time band must not exceed the
        # mid-time band by much
        pot = Harmonic(1.0)
        traj = integrate(get_stepper("ybaby"), State(1.0, 0.0, 0.0), 0.1, 5000, UNIT, pot)
        err = np.abs(traj.energy_series(UNIT, pot) - 0.5)
        mid = np.max(err[1250:2500])
        late = np.max(err[3750:])
        assert late <= 1.5 * mid

    def test_subsample(self):
        traj = integrate(get_stepper("ybaby"), State(1.0, 0.0, 0.0), 0.1, 100, UNIT, Harmonic(1.0))
        sub = traj.subsample(10)
        assert len(sub) == 11
        assert sub.h == pytest.approx(1.0)
        assert np.array_equal(sub.xs, traj.xs[::10])
