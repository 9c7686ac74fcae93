import math
from dataclasses import replace

import numpy as np
import pytest

from omrouter.errors import ConvergenceError
from omrouter.model import CONSTANTS, drive_amplitudes
from omrouter.steady import (enumerate_branches, force_balance,
                             pin_effective_detunings, solve_steady_state,
                             steady_residual, SteadyState)

from test_model import make_params

TAU = 2.0 * math.pi


def balance_oracle(params, q):
    """Independent transcription of the static force balance."""
    hbar = CONSTANTS.hbar
    eps_l, eps_p = drive_amplitudes(params)
    mw = hbar * params.g2 * eps_p**2 / (
        (2 * params.kappa2) ** 2 + (params.delta_c - params.g2 * q) ** 2)
    opt = hbar * params.g1 * eps_l**2 / (
        (2 * params.kappa1) ** 2 + (params.delta_a + params.g1 * q) ** 2)
    return params.mass * params.omega_m**2 * q - mw + opt


class TestEnumerateBranches:
    def test_no_drive(self):
        p = make_params(power_l=0.0, power_p=0.0)
        assert enumerate_branches(p) == [0.0]

    def test_decoupled(self):
        p = make_params(g1=0.0, g2=0.0)
        assert enumerate_branches(p) == [0.0]

    def test_default_roots_satisfy_balance(self, params_on):
        roots = enumerate_branches(params_on)
        assert len(roots) % 2 == 1
        assert roots == sorted(roots)
        scale = params_on.mass * params_on.omega_m**2
        for q in roots:
            assert abs(balance_oracle(params_on, q)) < (
                1e-10 * scale * abs(q) + 1e-22)

    def test_matches_module_force_balance(self, params_on):
        qs = np.linspace(-1e-12, 1e-12, 7)
        ours = force_balance(params_on, qs)
        theirs = np.array([balance_oracle(params_on, q) for q in qs])
        np.testing.assert_allclose(ours, theirs, rtol=1e-12)

    def test_power_scale_reduces_to_no_drive(self):
        p = make_params()
        assert enumerate_branches(p, power_scale=0.0) == [0.0]


class TestSolveSteadyState:
    def test_no_drive(self):
        p = make_params(power_l=0.0, power_p=0.0)
        st = solve_steady_state(p)
        assert st.q_s == 0.0
        assert st.p_s == 0.0
        assert st.a_s == 0.0 and st.c_s == 0.0
        assert st.residual == 0.0

    def test_decoupled_closed_form(self):
        p = make_params(g1=0.0, g2=0.0, delta_a=TAU * 10.56e6, power_p=0.0)
        st = solve_steady_state(p)
        eps_l, _ = drive_amplitudes(p)
        expected = eps_l / (2.0 * p.kappa1 + 1j * p.omega_m)
        assert st.q_s == 0.0
        assert st.a_s == pytest.approx(expected, rel=1e-12)

    def test_default_residual(self, params_on, state_on):
        assert state_on.residual < 1e-10
        assert state_on.p_s == 0.0

    def test_branch_is_zero_power_connected(self, params_on, state_on):
        roots = enumerate_branches(params_on)
        # the connected branch is the small-displacement one, far from the
        # radiation-pressure resonances
        assert state_on.q_s == roots[state_on.branch_index]
        assert abs(state_on.q_s) < 1e-13

    def test_seed_selects_nearest_root(self, params_on, state_on):
        roots = enumerate_branches(params_on)
        assert len(roots) >= 3
        st = solve_steady_state(params_on, q_seed=roots[-1])
        assert st.q_s == pytest.approx(roots[-1], rel=1e-12)
        assert st.branch_index == len(roots) - 1

    def test_single_root_selected_when_unique(self):
        p = make_params(power_l=1e-9, power_p=1e-13)
        roots = enumerate_branches(p)
        assert len(roots) == 1
        st = solve_steady_state(p)
        assert st.q_s == pytest.approx(roots[0], abs=1e-25)

    def test_radiation_pressure_sign(self):
        # optical drive only, red-detuned: the static force pushes q down
        for delta in (0.5, 1.0, 1.7):
            p = make_params(power_p=0.0, delta_a=delta * TAU * 10.56e6)
            assert solve_steady_state(p).q_s <= 0.0

    def test_drive_swap_antisymmetry(self):
        common = dict(g1=5e18, g2=5e18, kappa1=TAU * 50e3, kappa2=TAU * 50e3,
                      delta_a=TAU * 10.56e6, delta_c=TAU * 10.56e6,
                      omega_l=TAU * 10e9, omega_p=TAU * 10e9)
        p = make_params(power_l=2e-7, power_p=5e-8, **common)
        p_swapped = make_params(power_l=5e-8, power_p=2e-7, **common)
        q = solve_steady_state(p).q_s
        q_swapped = solve_steady_state(p_swapped).q_s
        assert abs(q_swapped + q) <= 1e-12 * max(abs(q), abs(q_swapped))

    def test_residual_gate(self, params_on, monkeypatch):
        import omrouter.steady as steady_module
        monkeypatch.setattr(steady_module, "steady_residual",
                            lambda params, state: 1.0)
        with pytest.raises(ConvergenceError):
            solve_steady_state(params_on)


class TestSteadyResidual:
    def test_exact_fixed_point(self):
        p = make_params(g1=0.0, g2=0.0, power_p=0.0)
        eps_l, _ = drive_amplitudes(p)
        st = SteadyState(q_s=0.0, p_s=0.0,
                         a_s=eps_l / (2.0 * p.kappa1 + 1j * p.delta_a),
                         c_s=0.0, delta1=p.delta_a, delta2=p.delta_c,
                         residual=0.0, branch_index=0)
        assert steady_residual(p, st) < 1e-15

    def test_detects_perturbation(self, params_on, state_on):
        nudged = replace(state_on, q_s=state_on.q_s * 1.01)
        assert steady_residual(params_on, nudged) > 1e-4

    def test_converged_state(self, params_on, state_on):
        assert steady_residual(params_on, state_on) < 1e-10


class TestPinning:
    def test_both_sides_exact(self, params_on):
        st = solve_steady_state(params_on)
        wm = params_on.omega_m
        assert st.delta1 == pytest.approx(wm, rel=1e-12)
        assert st.delta2 == pytest.approx(wm, rel=1e-12)

    def test_single_side_iterative(self):
        base = make_params(delta_c=1.1 * TAU * 10.56e6)
        pinned = pin_effective_detunings(base, pin_optical=True,
                                         pin_microwave=False)
        st = solve_steady_state(pinned)
        assert abs(st.delta1 - base.omega_m) <= 1e-9 * base.omega_m
        assert pinned.delta_c == base.delta_c

    def test_noop_without_flags(self):
        p = make_params()
        assert pin_effective_detunings(p, False, False) is p

    def test_idempotent(self, default_cfg):
        p = default_cfg.system_params()
        again = pin_effective_detunings(p)
        assert again.delta_a == pytest.approx(p.delta_a, rel=1e-14)
        assert again.delta_c == pytest.approx(p.delta_c, rel=1e-14)


def test_randomized_root_counts_are_odd():
    rng = np.random.default_rng(1290)
    for _ in range(10):
        p = make_params(
            omega_m=TAU * 10 ** rng.uniform(6.0, 7.5),
            mass=10 ** rng.uniform(-13.0, -10.0),
            gamma_m=TAU * 10 ** rng.uniform(0.5, 2.5),
            kappa1=TAU * 10 ** rng.uniform(4.0, 5.5),
            kappa2=TAU * 10 ** rng.uniform(2.5, 4.0),
            g1=10 ** rng.uniform(17.0, 19.5),
            g2=10 ** rng.uniform(18.0, 20.0),
            delta_a=rng.uniform(-2.0, 2.0) * TAU * 10.56e6,
            delta_c=rng.uniform(-2.0, 2.0) * TAU * 10.56e6,
            power_l=10 ** rng.uniform(-7.0, -3.5),
            power_p=10 ** rng.uniform(-9.0, -6.0))
        assert len(enumerate_branches(p)) % 2 == 1
