import math

import numpy as np
import warnings

import pytest

from rwndirac.params import PhysicalInput, SelfAdjointnessWarning, derive_params


def make_params(k=-1, **kw):
    """Model parameters with the self-adjointness warning silenced."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SelfAdjointnessWarning)
        return derive_params(PhysicalInput(**kw), k)


@pytest.fixture
def hydrogen():
    return make_params(Z=1)


@pytest.fixture
def hydrogen_flat():
    return make_params(Z=1, g_ratio=0.0)


# closed-form problems for the order check: (field, y0, span end, exact)
ORDER_PROBLEMS = {
    "exponential": (lambda t, y: (y[0],), 1.0, 8.0, lambda t: math.exp(t)),
    "rational": (lambda t, y: (-2.0 * t * y[0] ** 2,), 1.0, 5.0, lambda t: 1.0 / (1.0 + t * t)),
}
ORDER_STEPS = (1.0, 0.5, 0.25, 0.125)


def fitted_order(name):
    """Slope of log(relative global error) against log(h) under fixed steps."""
    from rwndirac.integrator import IntegratorConfig, integrate

    fun, y0, t_end, exact = ORDER_PROBLEMS[name]
    errs = []
    for h in ORDER_STEPS:
        tr = integrate(fun, (y0,), 0.0, t_end, IntegratorConfig(fixed_step=h), record=False)
        errs.append(abs(tr.y_end[0] - exact(t_end)) / abs(exact(t_end)))
    return float(np.polyfit(np.log(ORDER_STEPS), np.log(errs), 1)[0]), errs


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number, ok, detail):
    ACCEPTANCE_LINES[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(ACCEPTANCE_LINES[number])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
