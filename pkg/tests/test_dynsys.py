import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rwndirac.dynsys import (
    CylinderState,
    EquilibriumId,
    equilibria,
    jacobian,
    jacobian_stated,
    lift_winding,
    log_amplitude_prime_r,
    make_tau_field,
    manifold_curvature_s_minus,
    numerical_jacobian,
    omega_prime_r,
    reduce_angle,
    rhs_tau,
    stated_direction_s_minus,
    tau_of_r,
    unstable_direction_s_minus,
)
from rwndirac.integrator import integrate

from conftest import make_params

CURVED = make_params(k=-2, Z=30, A=10, g_ratio=1e-6)
FLAT = make_params(k=2, Z=30, g_ratio=0.0)


def test_equilibria_positions():
    eq = equilibria(0.5)
    th = math.acos(0.5)
    assert eq.s_minus == CylinderState(0.0, 0.0)
    assert eq.n_minus.omega_lift == -math.pi
    assert eq["s_plus"].omega_lift == pytest.approx(-th)
    assert eq[EquilibriumId.N_PLUS].omega_lift == pytest.approx(th)


@pytest.mark.parametrize("eps", [-0.9, 0.0, 0.7])
def test_fields_vanish_at_equilibria(eps):
    for name in ("s_minus", "n_minus", "s_plus", "n_plus"):
        d = rhs_tau(equilibria(eps)[name], eps, CURVED)
        assert d == pytest.approx((0.0, 0.0), abs=1e-12)


def test_eps_out_of_range():
    with pytest.raises(ValueError):
        equilibria(1.5)


@given(st.floats(-50, 50))
def test_reduce_angle_range(x):
    w = reduce_angle(x)
    assert -math.pi < w <= math.pi
    assert math.isclose(math.cos(w), math.cos(x), abs_tol=1e-9)


@pytest.mark.parametrize("p", [CURVED, FLAT], ids=["curved", "flat"])
@pytest.mark.parametrize("which", ["s_plus", "n_plus"])
@pytest.mark.parametrize("eps", [-0.5, 0.3, 0.9])
def test_jacobian_at_infinity(p, which, eps):
    J = jacobian(which, eps, p)
    Jn = numerical_jacobian(equilibria(eps)[which], eps, p, h=1e-6)
    np.testing.assert_allclose(J, Jn, atol=1e-5)


def test_stated_jacobian_differs():
    # the quoted diagonal is off by a factor of two
    J, Js = jacobian("s_plus", 0.3, CURVED), jacobian_stated("s_plus", 0.3, CURVED)
    assert J[1, 1] == pytest.approx(2 * Js[1, 1])


def test_saddle_and_node_character():
    eps = 0.4
    assert jacobian("s_plus", eps, CURVED)[1, 1] > 0  # repelling in Omega, eta-rate 0
    assert jacobian("n_plus", eps, CURVED)[1, 1] < 0
    Jm = jacobian("s_minus", eps, CURVED)
    assert Jm[0, 0] > 0 > Jm[1, 1]


def test_jacobian_at_origin_numerical():
    J = jacobian("s_minus", 0.2, CURVED)
    Jn = numerical_jacobian(equilibria(0.2)["s_minus"], 0.2, CURVED, h=1e-9)
    assert Jn[0, 0] == pytest.approx(J[0, 0], rel=1e-6)
    assert Jn[1, 1] == pytest.approx(J[1, 1], rel=1e-6)


def test_unstable_direction():
    J = jacobian("s_minus", 0.2, CURVED)
    v = unstable_direction_s_minus(CURVED)
    np.testing.assert_allclose(J @ v, v)
    w = stated_direction_s_minus(CURVED)
    assert not np.allclose(J @ w, w)


def test_unstable_manifold_curvature():
    eps = 0.2
    c = manifold_curvature_s_minus(eps, CURVED)
    fld = make_tau_field(eps, CURVED)
    # the next term is smaller by a factor of order eta / Z*
    e0 = 1e-9
    tr = integrate(fld, (e0, c * e0 * e0), math.log(e0), 0.0, event=lambda t, y: y[0] - 1e-7)
    eta, om = tr.y_end
    assert om / eta**2 == pytest.approx(c, rel=2e-3)


@given(st.floats(1e-3, 0.999), st.floats(-7, 7), st.floats(-0.99, 0.99))
def test_tau_field_matches_radial(eta, om, eps):
    r = eta / (1 - eta)
    for p, speed in ((CURVED, eta), (FLAT, eta * eta)):
        d = make_tau_field(eps, p, with_amplitude=True)(0.0, (eta, om, 0.0))
        assert d[1] == pytest.approx(speed * omega_prime_r(r, om, eps, p), rel=1e-9, abs=1e-12)
        assert d[2] == pytest.approx(speed * log_amplitude_prime_r(r, om, p), rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("p", [CURVED, FLAT], ids=["curved", "flat"])
def test_tau_of_r_is_primitive(p):
    r, h = 3.7, 1e-6
    dt = (tau_of_r(r + h, p) - tau_of_r(r - h, p)) / (2 * h)
    eta = r / (1 + r)
    speed = eta if not p.flat else eta * eta
    assert dt * speed == pytest.approx(1.0, rel=1e-8)


def test_prufer_against_linear_system():
    # Omega from the angle equation equals 2 atan2(v, u) of the linear system
    p, eps = CURVED.with_k(-1), 0.8
    from rwndirac.metric import f

    def lin(r, y):
        fr = f(r, p)
        a = (p.k / r - p.lam / r**2) / fr
        u, v = y
        return (-a * u + (fr - p.gamma / r + eps) / fr**2 * v, a * v + (fr + p.gamma / r - eps) / fr**2 * u)

    def ang(r, y):
        return (omega_prime_r(r, y[0], eps, p),)

    lin_tr = integrate(lin, (1.0, 0.3), 1.0, 5.0)
    ang_tr = integrate(ang, (2 * math.atan2(0.3, 1.0),), 1.0, 5.0)
    u, v = lin_tr.y_end
    assert reduce_angle(ang_tr.y_end[0] - 2 * math.atan2(v, u)) == pytest.approx(0.0, abs=1e-8)


def test_lift_winding():
    eps = 0.3
    th = math.acos(eps)
    assert lift_winding(th, eps) == 0
    assert lift_winding(th - 4 * math.pi, eps) == 2
