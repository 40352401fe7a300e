import math

import numpy as np
import pytest

from rwndirac.integrator import IntegratorConfig, integrate
from rwndirac.metric import f
from rwndirac.shooting import ShootingOptions, find_eigenvalue, launch_orbit
from rwndirac.wavefunction import (
    RADIAL_HEADER,
    NotAConnector,
    RadialSolution,
    connector_solution,
    far_field_rate,
    fit_small_r_exponent,
    reconstruct,
    residual,
    small_r_behaviour,
)

from conftest import make_params


@pytest.fixture(scope="module")
def ground():
    p = make_params(Z=1)
    rec = find_eigenvalue(-1, 0, p)
    return p, rec, connector_solution(rec, p)


def test_connector_residual(ground):
    p, rec, con = ground
    assert residual(con.solution, p) < 1e-7
    assert con.r_split > 100.0


def test_independent_linear_integration(ground):
    # integrate the original (u, v) system from r=1 and compare downstream
    p, rec, con = ground
    sol, eps = con.solution, con.solution.eps

    def lin(r, y):
        fr = f(r, p)
        a = (p.k / r - p.lam / r**2) / fr
        u, v = y
        return (-a * u + (fr - p.gamma / r + eps) / fr**2 * v, a * v + (fr + p.gamma / r - eps) / fr**2 * u)

    i0 = int(np.argmin(abs(sol.r - 1.0)))
    cfg = IntegratorConfig(abs_tol=1e-14, rel_tol=1e-12)
    for target in (10.0, 100.0, 300.0):
        j = int(np.argmin(abs(sol.r - target)))
        tr = integrate(lin, (sol.u[i0], sol.v[i0]), sol.r[i0], sol.r[j], cfg, record=False)
        scale = max(abs(sol.u[j]), abs(sol.v[j]))
        assert abs(tr.y_end[0] - sol.u[j]) / scale < 1e-6
        assert abs(tr.y_end[1] - sol.v[j]) / scale < 1e-6


def test_gauge_and_norm(ground):
    p, rec, con = ground
    sol = con.solution
    i = int(np.argmin(abs(sol.r - 1.0)))
    again = reconstruct(con.trajectory, sol.eps, p, r_ref=float(sol.r[i]), check=False)
    assert again.R[i] == pytest.approx(1.0, rel=1e-12)
    assert math.isfinite(sol.norm) and sol.norm > 0
    np.testing.assert_allclose(sol.u**2 + sol.v**2, sol.R**2, rtol=1e-12)


def test_far_field_rate(ground):
    p, rec, con = ground
    rate = far_field_rate(con.solution)
    assert rate == pytest.approx(-math.sqrt(1 - rec.eps**2), abs=1e-3)


def test_norm_dichotomy(ground):
    # off the eigenvalue the amplitude grows at large r; at it, it decays
    p, rec, con = ground
    opts = ShootingOptions(eta_max=1 - 1e-5, early_exit=False)
    off = launch_orbit(rec.eps - 1e-4, p, opts, keep_trajectory=True, with_amplitude=True)
    with pytest.raises(NotAConnector):
        reconstruct(off.trajectory, rec.eps - 1e-4, p)
    assert np.all(np.diff(con.solution.log_R[-10:]) < 0)


def test_requires_amplitude_channel(hydrogen):
    o = launch_orbit(0.5, hydrogen, keep_trajectory=True)
    with pytest.raises(ValueError):
        reconstruct(o.trajectory, 0.5, hydrogen)


def test_small_r_exponent_artificial_gravity():
    p = make_params(Z=1, g_ratio=1e-6)
    opts = ShootingOptions(r0=1e-12)
    rec = find_eigenvalue(-1, 0, p, opts=opts)
    sol = connector_solution(rec, p, opts).solution
    value, kind = small_r_behaviour(p)
    assert kind == "power"
    assert fit_small_r_exponent(sol) == pytest.approx(value, rel=1e-2)


def test_physical_exponent_unfittable(ground):
    p, rec, con = ground
    assert small_r_behaviour(p)[0] > 1e18
    with pytest.raises(ValueError):
        fit_small_r_exponent(con.solution)


def test_flat_behaviour(hydrogen_flat):
    assert small_r_behaviour(hydrogen_flat) == (hydrogen_flat.lam, "exponential")


def test_from_arrays_norm():
    r = np.linspace(0, 30, 30001)
    sol = RadialSolution.from_arrays(r, np.exp(-r))
    assert sol.norm == pytest.approx(math.sqrt(0.5), rel=1e-6)


def test_csv(ground, tmp_path):
    sol = ground[2].solution
    path = tmp_path / "radial.csv"
    sol.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(RADIAL_HEADER)
    assert len(lines) == len(sol.r) + 1
    assert float(lines[1].split(",")[0]) == sol.r[0]


def test_record_without_eigenvalue(hydrogen):
    from rwndirac.table import EigenvalueRecord

    with pytest.raises(ValueError):
        connector_solution(EigenvalueRecord.absent(-1, 0, 1.0, ""), hydrogen)
