import math

import numpy as np
import pytest

from weakdecay import (
    ClosedFormSingular,
    Operator,
    PostChoice,
    PostSelectionNull,
    SpinAxis,
    SpinParams,
    StateVector,
    WeakValueQuery,
    projector_from_state,
    spin_propagator,
    spin_strong_closed,
    spin_weak_closed,
    spin_weak_kernel,
    weak_value,
)
from weakdecay.spin import X_MINUS, X_PLUS, Y_PLUS


def test_propagator_special_angles():
    assert np.max(np.abs(spin_propagator(1.0, 0.0).matrix - np.eye(2))) <= 1e-14
    assert np.max(np.abs(spin_propagator(1.0, 2 * math.pi).matrix + np.eye(2))) <= 1e-12
    u = spin_propagator(1.0, math.pi)
    assert np.max(np.abs(u.matrix - np.diag([1j, -1j]))) <= 1e-12


def test_params_validation():
    with pytest.raises(ValueError):
        SpinParams(float("inf"), 0.0, 1.0)
    with pytest.raises(ValueError):
        SpinParams(1.0, 1.0, 1.0)


def test_post_choice_states():
    assert np.allclose(PostChoice.x_plus().state.amplitudes, X_PLUS.amplitudes)
    assert np.allclose(PostChoice.x_minus().state.amplitudes, X_MINUS.amplitudes)
    assert np.allclose(PostChoice.y_plus().state.amplitudes, Y_PLUS.amplitudes)
    with pytest.raises(ValueError):
        PostChoice.custom(StateVector(np.array([1.0, 0, 0])))


def test_weak_closed_trivial_post_selection_value():
    # whole cycle, probed at a quarter of it
    params = SpinParams(1.0, 0.0, 2.0 * math.pi)
    w = spin_weak_closed(PostChoice.x_plus(), params, 0.5 * math.pi)
    assert w == pytest.approx(0.5 + 0.0j, abs=1e-12)


def test_weak_closed_quarter_cycle_exceeds_one():
    params = SpinParams(1.0, 0.0, 0.5 * math.pi)
    w = spin_weak_closed(PostChoice.x_plus(), params, 0.25 * math.pi)
    assert w == pytest.approx(0.5 * (1.0 + math.sqrt(2.0)), abs=1e-12)


def test_weak_closed_x_minus_matches_kernel_at_quarter_cycle():
    # the kernel is ground truth for this value (it evaluates to 1/2 here)
    params = SpinParams(1.0, 0.0, 0.5 * math.pi)
    t = 0.25 * math.pi
    closed = spin_weak_closed(PostChoice.x_minus(), params, t)
    kernel = spin_weak_kernel(X_MINUS, params, t)
    assert abs(closed - kernel) <= 1e-12
    assert closed == pytest.approx(0.5 + 0.0j, abs=1e-12)


def test_strong_closed_values():
    assert spin_strong_closed(SpinAxis.X_PLUS, 1.0, 0.0, 0.0) == pytest.approx(1.0)
    assert spin_strong_closed(SpinAxis.Y_PLUS, 1.0, 0.0, 0.5 * math.pi) == pytest.approx(0.0, abs=1e-12)
    assert spin_strong_closed(SpinAxis.X_PLUS, 1.0, 0.0, math.pi) == pytest.approx(0.0, abs=1e-12)
    assert spin_strong_closed(SpinAxis.X_MINUS, 1.0, 0.0, math.pi) == pytest.approx(1.0, abs=1e-12)


def _nonsingular_draw(rng):
    while True:
        omega = rng.uniform(0.3, 3.0) * rng.choice([-1.0, 1.0])
        t_i = rng.uniform(-2.0, 2.0)
        t_f = t_i + rng.uniform(0.2, 6.0)
        h = 0.5 * omega * (t_f - t_i)
        if min(abs(math.cos(h)), abs(math.sin(h)), abs(math.cos(h) - math.sin(h))) >= 1e-2:
            return omega, t_i, rng.uniform(t_i, t_f), t_f


def test_closed_forms_match_kernel(rng):
    worst = 0.0
    for _ in range(200):
        omega, t_i, t, t_f = _nonsingular_draw(rng)
        params = SpinParams(omega, t_i, t_f)
        for choice in (PostChoice.y_plus(), PostChoice.x_minus(), PostChoice.x_plus()):
            closed = spin_weak_closed(choice, params, t)
            kernel = spin_weak_kernel(choice.state, params, t)
            worst = max(worst, abs(closed - kernel))
    assert worst <= 1e-10


def test_trivial_post_selection_reduction_multiple_cycles():
    for n in (1, 2, 3):
        params = SpinParams(1.0, 0.0, 2.0 * math.pi * n)
        for t in np.linspace(0.0, params.t_f, 41):
            w = spin_weak_closed(PostChoice.x_plus(), params, t)
            s = spin_strong_closed(SpinAxis.X_PLUS, 1.0, 0.0, t)
            assert abs(w - s) <= 1e-10


def test_half_cycle_reduction_to_strong_values():
    # post-selection along -x equals the freely evolved state after half a
    # cycle, so weak values collapse to strong expectations there
    params = SpinParams(1.0, 0.0, math.pi)
    for t in np.linspace(0.0, math.pi, 41):
        w_xplus = spin_weak_closed(PostChoice.x_minus(), params, t)
        assert abs(w_xplus - spin_strong_closed(SpinAxis.X_PLUS, 1.0, 0.0, t)) <= 1e-10
        assert abs((1.0 - w_xplus) - spin_strong_closed(SpinAxis.X_MINUS, 1.0, 0.0, t)) <= 1e-10


def test_quarter_cycle_form_boundaries_and_excess():
    params = SpinParams(1.0, 0.0, 0.5 * math.pi)
    w_start = spin_weak_closed(PostChoice.x_plus(), params, params.t_i)
    w_end = spin_weak_closed(PostChoice.x_plus(), params, params.t_f)
    assert w_start == pytest.approx(1.0 + 0.0j, abs=1e-12)
    assert w_end == pytest.approx(1.0 + 0.0j, abs=1e-12)
    interior = [
        spin_weak_closed(PostChoice.x_plus(), params, t).real
        for t in np.linspace(0.1, params.t_f - 0.1, 21)
    ]
    assert max(interior) > 1.0 + 1e-6


def test_complement_rule_every_post_choice(rng):
    p_xp = projector_from_state(X_PLUS)
    comp = Operator(np.eye(2) - p_xp.entries)
    for _ in range(50):
        omega, t_i, t, t_f = _nonsingular_draw(rng)
        u_mid = spin_propagator(omega, t - t_i)
        u_late = spin_propagator(omega, t_f - t)
        for choice in (PostChoice.y_plus(), PostChoice.x_minus(), PostChoice.x_plus()):
            w1 = weak_value(
                WeakValueQuery(X_PLUS, choice.state, p_xp, t_i, t, t_f), u_mid, u_late
            )
            w2 = weak_value(
                WeakValueQuery(X_PLUS, choice.state, comp, t_i, t, t_f), u_mid, u_late
            )
            assert abs(w1 + w2 - 1.0) <= 1e-10


def test_static_field_reduces_to_overlap_ratios():
    params = SpinParams(0.0, 0.0, 2.0)
    for t in (0.0, 0.7, 2.0):
        assert spin_weak_closed(PostChoice.x_plus(), params, t) == pytest.approx(1.0, abs=1e-12)
        assert spin_weak_closed(PostChoice.y_plus(), params, t) == pytest.approx(1.0, abs=1e-12)
    # -x post-selection is orthogonal to a frozen +x state
    with pytest.raises(ClosedFormSingular):
        spin_weak_closed(PostChoice.x_minus(), params, 1.0)
    with pytest.raises(PostSelectionNull):
        spin_weak_kernel(X_MINUS, params, 1.0)


def test_singular_window_raises():
    params = SpinParams(1.0, 0.0, math.pi)  # cos(h) = 0 for the +x form
    with pytest.raises(ClosedFormSingular):
        spin_weak_closed(PostChoice.x_plus(), params, 0.5)


def test_custom_choice_delegates_to_kernel(rng):
    state = StateVector.normalized(rng.normal(size=2) + 1j * rng.normal(size=2))
    params = SpinParams(1.1, 0.0, 2.0)
    w_choice = spin_weak_closed(PostChoice.custom(state), params, 0.8)
    assert w_choice == spin_weak_kernel(state, params, 0.8)


def test_out_of_window_time_rejected():
    params = SpinParams(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        spin_weak_closed(PostChoice.x_plus(), params, 1.5)
