import numpy as np
import pytest

from curvecross.model import Grid, franck_condon_matrix, harmonic_eigenstates
from curvecross.resolvent import (
    HarmonicSpectralSum,
    build_resolvent,
    build_resolvent_batch,
)


class FlatCurve:
    """Constant potential; the resolvent has the free-particle closed form."""

    def __init__(self, mass, level):
        self.mass = mass
        self.level = level

    def evaluate(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.level)

    def gradient(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))


def test_free_particle_closed_form(model):
    z = 600.0 + 450.0j
    curve = FlatCurve(model.ground.mass, 100.0)
    ev = build_resolvent(curve, z, Grid(-1.5, 1.5, 4096))
    k = np.sqrt(2.0 * curve.mass * (z - curve.level))
    if k.imag < 0:
        k = -k
    for x, x0 in [(0.0, 0.0), (0.3, -0.2), (-1.0, 0.9), (0.05, 0.08)]:
        exact = -1j * curve.mass * np.exp(1j * k * abs(x - x0)) / k
        assert ev.point(x, x0) == pytest.approx(exact, rel=1e-7)


def test_symmetry_is_structural(ev_allowed_fine):
    assert ev_allowed_fine.point(0.3, -0.2) == ev_allowed_fine.point(-0.2, 0.3)


def test_derivative_jump(ev_allowed_fine, model):
    for x in (-0.3, 0.02, 0.33):
        jump = ev_allowed_fine.derivative_jump(x)
        assert jump == pytest.approx(2.0 * model.allowed.mass, rel=1e-8)


def test_wronskian_constancy(model, grid):
    zs = model.resolvent_argument(np.array([10000.0, 11500.0, 13200.0]))
    for curve in (model.allowed, model.forbidden):
        for ev in build_resolvent_batch(curve, zs, grid):
            assert ev.wronskian_drift < 1e-8


def test_batch_matches_single_build(model, grid):
    zs = model.resolvent_argument(np.array([10800.0, 12000.0]))
    batch = build_resolvent_batch(model.allowed, zs, grid)
    for z, ev in zip(zs, batch):
        single = build_resolvent(model.allowed, z, grid)
        assert single.point(0.1, -0.2) == ev.point(0.1, -0.2)


def test_rejects_nonpositive_damping(model, grid):
    with pytest.raises(ValueError):
        build_resolvent(model.allowed, 11000.0 + 0.0j, grid)


def test_rejects_undersized_grid(model):
    # the right edge sits below Re z, inside the classically allowed zone
    with pytest.raises(ValueError):
        build_resolvent(model.allowed, 12700.0 + 450.0j, Grid(-1.5, 0.25, 1024))


def test_point_outside_grid_rejected(ev_allowed_fine):
    with pytest.raises(ValueError):
        ev_allowed_fine.point(2.0, 0.0)


# -- spectral-sum oracle ---------------------------------------------------


def test_matrix_element_own_eigenstate(ev_allowed_fine, model, fine_grid):
    phi = harmonic_eigenstates(model.allowed, 1, fine_grid.points)
    exact = 1.0 / (ev_allowed_fine.z - model.allowed.eigenvalue(0))
    elem = ev_allowed_fine.matrix_element(phi[0], phi[0])
    assert elem == pytest.approx(exact, rel=1e-8)
    cross = ev_allowed_fine.matrix_element(phi[0], phi[1])
    assert abs(cross) < 1e-8 * abs(exact)


def test_matrix_element_displaced_state(ev_allowed_fine, model, fine_grid):
    # Franck-Condon spectral sum with S ~ 2.1 weights is an independent
    # analytic oracle for the double integral
    chi0 = harmonic_eigenstates(model.ground, 0, fine_grid.points)[0]
    fc = franck_condon_matrix(model.ground, model.allowed, 0, 60)[0]
    energies = model.allowed.eigenvalue(np.arange(61).astype(float))
    oracle = np.sum(fc**2 / (ev_allowed_fine.z - energies))
    elem = ev_allowed_fine.matrix_element(chi0, chi0)
    assert elem == pytest.approx(oracle, rel=1e-6)


def test_vector_own_eigenstate(ev_allowed_fine, model, fine_grid):
    phi0 = harmonic_eigenstates(model.allowed, 0, fine_grid.points)[0]
    x0 = 0.05
    exact = harmonic_eigenstates(model.allowed, 0, np.array([x0]))[0, 0] / (
        ev_allowed_fine.z - model.allowed.eigenvalue(0)
    )
    assert ev_allowed_fine.vector(phi0, x0) == pytest.approx(exact, rel=1e-6)


def test_vector_displaced_state(ev_allowed_fine, model, fine_grid):
    chi0 = harmonic_eigenstates(model.ground, 0, fine_grid.points)[0]
    fc = franck_condon_matrix(model.ground, model.allowed, 0, 60)[0]
    energies = model.allowed.eigenvalue(np.arange(61).astype(float))
    for x0 in (-0.22, 0.04, 0.17):
        phi_at = harmonic_eigenstates(model.allowed, 60, np.array([x0]))[:, 0]
        oracle = np.sum(phi_at * fc / (ev_allowed_fine.z - energies))
        assert ev_allowed_fine.vector(chi0, x0) == pytest.approx(oracle, rel=1e-6)


def test_vector_grid_convergence(model, fine_grid):
    z = model.resolvent_argument(11200.0)
    chi0 = harmonic_eigenstates(model.ground, 0, fine_grid.points)[0]
    coarse = build_resolvent(model.allowed, z, fine_grid).vector(chi0, 0.05)
    doubled = fine_grid.refined()
    chi0d = harmonic_eigenstates(model.ground, 0, doubled.points)[0]
    refined = build_resolvent(model.allowed, z, doubled).vector(chi0d, 0.05)
    assert abs(refined - coarse) / abs(refined) < 1e-7


def test_pointwise_against_spectral_sum(ev_allowed_fine, model, fine_grid, rng):
    # the truncated expansion carries a slowly decaying completeness tail
    # at pointwise arguments; agreement is asserted within its own
    # reported remainder, and tightly wherever the tail happens to be small
    oracle = HarmonicSpectralSum(model.allowed, ev_allowed_fine.z, 200, fine_grid)
    for _ in range(5):
        x, x0 = rng.uniform(-0.6, 0.6, 2)
        g_ode = ev_allowed_fine.point(x, x0)
        g_sum = oracle.point(x, x0)
        bound = max(2.0 * oracle.point_tail_estimate(x, x0), 1e-6 * abs(g_ode))
        assert abs(g_ode - g_sum) <= bound


def test_imaginary_part_sign(ev_allowed_fine):
    for x in (-0.4, 0.0, 0.25):
        assert ev_allowed_fine.point(x, x).imag < 0.0


def test_damping_monotonicity(model, grid):
    values = []
    for gamma in (450.0, 900.0, 1800.0):
        ev = build_resolvent(model.allowed, 11200.0 + 1j * gamma, grid)
        values.append(abs(ev.point(0.1, 0.1)))
    assert values[0] > values[1] > values[2]


def test_harmonic_pole_positions(model, grid):
    # with small damping, |G(x, x; z)| peaks at the ladder energies; the
    # probe sits off the minimum so odd states keep weight
    scan = np.arange(10800.0, 12120.0, 2.0)
    probe = model.allowed.minimum_position + 0.05
    mags = np.empty(scan.size)
    pos = 0
    for start in range(0, scan.size, 128):
        for ev in build_resolvent_batch(
            model.allowed, scan[start : start + 128] + 5.0j, grid
        ):
            mags[pos] = abs(ev.point(probe, probe))
            pos += 1
    peaks = scan[1:-1][(mags[1:-1] > mags[:-2]) & (mags[1:-1] > mags[2:])]
    for n in range(3):
        expected = model.allowed.eigenvalue(n)
        assert np.min(np.abs(peaks - expected)) <= 2.0


def test_morse_pole_positions(model, grid):
    energies = model.forbidden.bound_energies()[:3]
    scan = np.arange(10900.0, 11902.0, 2.0)
    probes = (-0.02, -0.07)
    mags = np.empty(scan.size)
    pos = 0
    for start in range(0, scan.size, 128):
        for ev in build_resolvent_batch(
            model.forbidden, scan[start : start + 128] + 5.0j, grid
        ):
            mags[pos] = max(abs(ev.point(p, p)) for p in probes)
            pos += 1
    peaks = scan[1:-1][(mags[1:-1] > mags[:-2]) & (mags[1:-1] > mags[2:])]
    for expected in energies:
        assert np.min(np.abs(peaks - expected)) <= 2.0


def test_spectral_sum_tail_reporting(model, fine_grid):
    z = model.resolvent_argument(11200.0)
    oracle = HarmonicSpectralSum(model.allowed, z, 200, fine_grid)
    assert oracle.point_tail_estimate(0.1, 0.1) == np.inf
    assert oracle.point_tail_estimate(0.1, 0.3) > 0.0
    chi0 = harmonic_eigenstates(model.ground, 0, fine_grid.points)[0]
    assert abs(oracle.completeness_deficit(chi0)) < 1e-10


def test_spectral_sum_truncation_for_projections(model, fine_grid):
    # projections of smooth states converge fast in the expansion order,
    # unlike pointwise values
    z = model.resolvent_argument(11200.0)
    chi0 = harmonic_eigenstates(model.ground, 0, fine_grid.points)[0]
    small = HarmonicSpectralSum(model.allowed, z, 100, fine_grid)
    large = HarmonicSpectralSum(model.allowed, z, 200, fine_grid)
    a = small.matrix_element(chi0, chi0)
    b = large.matrix_element(chi0, chi0)
    assert abs(a - b) / abs(b) < 1e-10


def test_weak_form_identity(ev_allowed_fine, model, fine_grid):
    # project (z - H) G onto a smooth compact bump: the result must be the
    # bump's value at the source point
    x = fine_grid.points
    v = model.allowed.evaluate(x)
    m = model.allowed.mass
    width = 0.08
    a = 1.0 / (2.0 * width**2)
    for center, x0 in ((0.05, 0.12), (-0.1, -0.03)):
        s = x - center
        phi = np.exp(-a * s**2)
        second = (4.0 * a**2 * s**2 - 2.0 * a) * phi
        q = second / (2.0 * m) + (ev_allowed_fine.z - v) * phi
        phi0 = np.exp(-a * (x0 - center) ** 2)
        assert ev_allowed_fine.vector(q, x0) == pytest.approx(phi0, rel=1e-6)
