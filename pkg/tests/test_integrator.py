import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rwndirac.dynsys import make_tau_field, tau_of_r
from rwndirac.integrator import (
    IntegratorConfig,
    StepLimitExceeded,
    StepSizeUnderflow,
    integrate,
    rk_step,
)
from rwndirac.metric import eta_of_r

from conftest import ORDER_PROBLEMS, fitted_order


def test_exponential():
    tr = integrate(lambda t, y: (y[0],), (1.0,), 0.0, 1.0)
    assert tr.status == "completed"
    assert tr.y_end[0] == pytest.approx(math.e, rel=1e-9)


def test_rational():
    tr = integrate(lambda t, y: (-2.0 * t * y[0] ** 2,), (1.0,), 0.0, 1.0)
    assert tr.y_end[0] == pytest.approx(0.5, abs=1e-9)


@pytest.mark.parametrize("name", sorted(ORDER_PROBLEMS))
def test_fixed_step_order(name):
    order, errs = fitted_order(name)
    assert order >= 7.0
    assert all(b < a for a, b in zip(errs, errs[1:]))


@pytest.mark.parametrize("name", sorted(ORDER_PROBLEMS))
def test_tighter_tolerance_never_worse(name):
    fun, y0, t_end, exact = ORDER_PROBLEMS[name]
    prev = math.inf
    for tol in (1e-6, 1e-8, 1e-10, 1e-12):
        tr = integrate(fun, (y0,), 0.0, t_end, IntegratorConfig(abs_tol=tol, rel_tol=tol))
        err = abs(tr.y_end[0] - exact(t_end)) / exact(t_end)
        assert err <= max(prev, 1e-14)
        prev = err


def test_rk_step_is_exact_on_cubic():
    # an order-8 stage set integrates a cubic in t exactly
    fun = lambda t, y: (3.0 * t * t,)
    y_new, *_ = rk_step(fun, 0.0, (0.0,), (0.0,), 0.7)
    assert y_new[0] == pytest.approx(0.7**3, rel=1e-14)


def test_event_location():
    tr = integrate(lambda t, y: (1.0,), (0.0,), 0.0, 10.0, event=lambda t, y: y[0] - math.pi)
    assert tr.status == "event-hit"
    assert tr.t_end == pytest.approx(math.pi, abs=1e-11)


def test_stop_predicate():
    tr = integrate(lambda t, y: (1.0,), (0.0,), 0.0, 10.0, stop=lambda t, y: y[0] > 2.0)
    assert tr.status == "stopped"
    assert 2.0 < tr.y_end[0] < 10.0


def test_step_limit():
    cfg = IntegratorConfig(max_steps=5, max_step=0.01)
    tr = integrate(lambda t, y: (1.0,), (0.0,), 0.0, 1.0, cfg)
    assert tr.status == "step-limit"


def test_underflow_near_blowup():
    # y' = y^2 blows up at t = 1
    with pytest.raises((StepSizeUnderflow, StepLimitExceeded)):
        integrate(lambda t, y: (y[0] ** 2,), (1.0,), 0.0, 2.0)


def test_bad_span():
    with pytest.raises(ValueError):
        integrate(lambda t, y: (1.0,), (0.0,), 1.0, 1.0)


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(abs_tol=0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(fixed_step=-1.0)


def test_deterministic():
    fun = lambda t, y: (y[1], -math.sin(y[0]))
    a = integrate(fun, (1.0, 0.0), 0.0, 20.0)
    b = integrate(fun, (1.0, 0.0), 0.0, 20.0)
    assert np.array_equal(a.t, b.t) and np.array_equal(a.y, b.y)


def test_physical_orbit_monotone_eta(hydrogen):
    r0, eta_max = 1e-6, 1.0 - 1e-5
    fld = make_tau_field(0.5, hydrogen)
    t0 = tau_of_r(r0, hydrogen)
    tr = integrate(fld, (eta_of_r(r0), 0.0), t0, t0 + 1e7, event=lambda t, y: y[0] - eta_max)
    assert tr.status == "event-hit"
    assert np.all(np.diff(tr.y[:, 0]) > 0)
    assert tr.y_end[0] == pytest.approx(eta_max, abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.floats(-3.0, 3.0), st.floats(0.1, 3.0))
def test_linear_decay(lam, T):
    tr = integrate(lambda t, y: (lam * y[0],), (1.0,), 0.0, T)
    assert tr.y_end[0] == pytest.approx(math.exp(lam * T), rel=1e-9)
