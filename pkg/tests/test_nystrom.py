import math

import numpy as np
import pytest
from scipy import integrate, special

from cornerscatter.errors import SolveFailure
from cornerscatter.geometry import build_corner_domain, disk, make_strong_corner, make_weak_profile
from cornerscatter.incident import CircularWave, PlaneWave, parse_incident
from cornerscatter.nystrom import (
    Densities,
    TransmissionProblem,
    assemble_and_solve,
    difference_operators,
    equispaced_angles,
    far_field,
    solve_far_field,
)
from cornerscatter.quadrature import build_mesh, grading, kress_weights
from cornerscatter.series import disk_series_farfield

# -- quadrature ---------------------------------------------------------------------


@pytest.mark.parametrize("n", [8, 16, 32])
def test_kress_weights_integrate_the_log_kernel(n):
    # int_0^{2pi} log(4 sin^2((s - t)/2)) cos(m t) dt = -2 pi cos(m s) / |m|, and 0 for m = 0
    t = np.arange(2 * n) * math.pi / n
    R = kress_weights(n)
    for m in range(0, n):
        got = R[np.arange(2 * n)] @ np.cos(m * t)
        want = 0.0 if m == 0 else -2 * math.pi / m
        assert got == pytest.approx(want, abs=1e-12)


def test_grading_is_monotone_and_flat_at_the_ends():
    u = np.linspace(0, 1, 1001)
    w, dw = grading(u, 3)
    assert w[0] == 0 and w[-1] == pytest.approx(1.0)
    assert np.all(np.diff(w) > 0)
    assert dw[0] == 0 and dw[-1] == pytest.approx(0.0, abs=1e-14)
    h = 1e-6
    fd = (grading(u[1:-1] + h, 3)[0] - grading(u[1:-1] - h, 3)[0]) / (2 * h)
    np.testing.assert_allclose(fd, dw[1:-1], atol=1e-7)


def test_mesh_lengths_and_corner_clustering():
    dom = build_corner_domain(make_weak_profile(1, 2, -1, 2))
    mesh = build_mesh(dom, 512)
    length = dom.piece_lengths().sum()
    assert mesh.weights.sum() == pytest.approx(length, rel=1e-6)
    # graded nodes approach the corner far closer than uniform spacing would
    assert np.linalg.norm(mesh.x, axis=1).min() < 0.01 * length / mesh.size
    with pytest.raises(ValueError):
        build_mesh(dom, 7)


def test_outward_normal_on_disk():
    mesh = build_mesh(disk(2.0), 32)
    np.testing.assert_allclose(mesh.normal, mesh.x / 2.0, atol=1e-14)


# -- layer operators on the circle -----------------------------------------------------


def _circle_eigenvalues(n, R, k):
    x = k * R
    j, jp = special.jv(n, x), special.jvp(n, x)
    h, hp = special.hankel1(n, x), special.h1vp(n, x)
    S = 0.5j * math.pi * R * j * h
    K = 0.5 + 0.5j * math.pi * x * j * hp
    Kp = -0.5 + 0.5j * math.pi * x * jp * h
    T = 0.5j * math.pi * k * x * jp * hp
    return {"S": S, "K": K, "Kp": Kp, "T": T}


@pytest.mark.parametrize("R,k0,q0", [(1.0, 1.0, 4.0), (1.5, 3.0, 2.0)])
def test_difference_operators_on_the_circle(R, k0, q0):
    mesh = build_mesh(disk(R), 128)
    k1 = k0 * math.sqrt(q0)
    ops = difference_operators(mesh, k0, k1)
    theta = np.arctan2(mesh.x[:, 1], mesh.x[:, 0])
    for n in (0, 1, 4, 9):
        mode = np.exp(1j * n * theta)
        e0, e1 = _circle_eigenvalues(n, R, k0), _circle_eigenvalues(n, R, k1)
        for name, mat in ops.items():
            np.testing.assert_allclose(mat @ mode, (e0[name] - e1[name]) * mode, atol=1e-10, err_msg=f"{name} n={n}")


# -- incident fields -------------------------------------------------------------------


@pytest.mark.parametrize("field", [PlaneWave(0.7), CircularWave(0), CircularWave(3), CircularWave(-2)])
def test_incident_fields_solve_helmholtz_with_consistent_gradients(field):
    k, h = 2.5, 1e-4
    x = np.array([[0.3, -0.4], [1.2, 0.5], [-0.7, 0.9]])
    u, grad = field.evaluate(x, k)
    ex, ey = np.array([h, 0.0]), np.array([0.0, h])
    fd = np.stack([(field.evaluate(x + e, k)[0] - field.evaluate(x - e, k)[0]) / (2 * h) for e in (ex, ey)], -1)
    np.testing.assert_allclose(fd, grad, atol=1e-7)
    lap = sum(field.evaluate(x + e, k)[0] + field.evaluate(x - e, k)[0] for e in (ex, ey)) - 4 * u
    np.testing.assert_allclose(lap / h**2 + k**2 * u, 0, atol=1e-5)


def test_plane_wave_expansion_coefficients():
    wave = PlaneWave(0.4)
    k, r, th = 1.7, 0.8, 2.2
    orders = np.arange(-30, 31)
    series = (wave.coefficients(orders) * special.jv(orders, k * r) * np.exp(1j * orders * th)).sum()
    exact = wave.evaluate(np.array([[r * math.cos(th), r * math.sin(th)]]), k)[0][0]
    assert series == pytest.approx(exact, abs=1e-14)


def test_incident_spec_parsing():
    assert parse_incident("plane:0.5") == PlaneWave(0.5)
    assert parse_incident("circular:2") == CircularWave(2)
    with pytest.raises(ValueError):
        parse_incident("spherical:1")


# -- transmission problem ---------------------------------------------------------------


def test_problem_validation():
    with pytest.raises(ValueError):
        TransmissionProblem(0.0, 2.0, disk())
    with pytest.raises(ValueError):
        TransmissionProblem(1.0, -2.0, disk())
    with pytest.raises(ValueError):
        TransmissionProblem(1.0, 1.0, disk())


@pytest.mark.parametrize("incident", [PlaneWave(0.0), PlaneWave(1.3), CircularWave(0), CircularWave(2)])
@pytest.mark.parametrize("k,q0", [(1.0, 2.0), (5.0, 4.0), (2.0, 0.5)])
def test_disk_matches_separation_of_variables(incident, k, q0):
    problem = TransmissionProblem(k, q0, disk(1.0), incident)
    theta = equispaced_angles(64)
    ff = far_field(assemble_and_solve(problem, 256), problem, theta)
    ref = disk_series_farfield(1.0, q0, k, incident, directions=theta)
    np.testing.assert_allclose(ff.values, ref.values, atol=1e-10)


def test_far_field_accepts_direction_vectors():
    problem = TransmissionProblem(2.0, 3.0, disk(1.0))
    dens = assemble_and_solve(problem, 64)
    theta = np.array([0.1, 2.0])
    a = far_field(dens, problem, theta)
    b = far_field(dens, problem, np.stack([np.cos(theta), np.sin(theta)], -1))
    np.testing.assert_allclose(a.values, b.values)


def test_zero_densities_radiate_nothing():
    problem = TransmissionProblem(2.0, 3.0, disk(1.0))
    mesh = build_mesh(problem.boundary, 32)
    zero = Densities(mesh, np.zeros(mesh.size, complex), np.zeros(mesh.size, complex))
    assert far_field(zero, problem, equispaced_angles(16)).l2_norm == 0.0


def test_l2_norm_is_the_trapezoid_rule():
    problem = TransmissionProblem(2.0, 3.0, disk(1.0))
    ff = solve_far_field(problem, 128, n_angles=256)
    ref = disk_series_farfield(1.0, 3.0, 2.0, PlaneWave(0.0))
    direct = integrate.quad(lambda t: abs(disk_series_farfield(1.0, 3.0, 2.0, PlaneWave(0.0),
                                                               directions=[t]).values[0]) ** 2,
                            0, 2 * math.pi, limit=200)[0]
    assert ff.l2_norm == pytest.approx(math.sqrt(direct), rel=1e-10)
    assert ref.l2_norm == pytest.approx(math.sqrt(direct), rel=1e-10)


def test_ill_conditioning_is_reported():
    problem = TransmissionProblem(2.0, 3.0, disk(1.0))
    with pytest.raises(SolveFailure) as info:
        assemble_and_solve(problem, 32, cond_limit=1.0)
    assert info.value.condition > 1.0


@pytest.mark.parametrize("germ", [make_weak_profile(1, 2, -1, 2), make_strong_corner(0, 1)])
def test_corner_domains_converge_under_refinement(germ):
    problem = TransmissionProblem(3.0, 2.0, build_corner_domain(germ))
    ffs = [solve_far_field(problem, n).values for n in (256, 512, 1024)]
    d1 = np.abs(ffs[1] - ffs[0]).max()
    d2 = np.abs(ffs[2] - ffs[1]).max()
    assert d2 < 1e-5
    assert d2 < 0.5 * d1


def test_far_field_fades_as_the_contrast_vanishes():
    dom = build_corner_domain(make_weak_profile(1, 2, -1, 2))
    norms = [solve_far_field(TransmissionProblem(2.0, q0, dom), 256).l2_norm for q0 in (1.1, 1.01, 1.001)]
    assert norms[0] > norms[1] > norms[2]
    # first-order (Born) scaling in the contrast
    assert norms[1] / norms[2] == pytest.approx(10.0, rel=0.05)


def test_translating_the_disk_only_shifts_the_phase():
    k, q0 = 2.0, 3.0
    c = np.array([0.4, -0.3])
    theta = equispaced_angles(32)
    base = solve_far_field(TransmissionProblem(k, q0, disk(1.0)), 128, n_angles=32)
    moved = solve_far_field(TransmissionProblem(k, q0, disk(1.0, tuple(c))), 128, n_angles=32)
    xhat = np.stack([np.cos(theta), np.sin(theta)], -1)
    # incident exp(i k x1) picks up exp(i k c1); the pattern picks up exp(-i k xhat.c)
    factor = np.exp(1j * k * c[0]) * np.exp(-1j * k * (xhat @ c))
    np.testing.assert_allclose(moved.values, base.values * factor, atol=1e-10)
