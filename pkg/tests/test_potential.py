import math
import warnings

import numpy as np
import pytest

from qfield.grid import Grid, curl, l2_norm
from qfield.potential import (
    NonPotentialFieldWarning, PotentialField, field_paths, fields_from_potential, identified_sources,
    identity_residual, law_residual, path_discrepancy, plane_wave_potential, potential_equation_residual,
    potential_identity_residual, quat_derivative, random_potential,
)
from qfield.quaternion import ProductSide
from qfield.state import FieldState, MissingTimeDerivative, Sources

R, L = ProductSide.RIGHT, ProductSide.LEFT


def _linear_y(n=8):
    g = Grid(n, n, n)
    _, y, _ = g.coords()
    A = g.zeros(3)
    A[0] = y
    return g, PotentialField.static_field(g, g.zeros(), A)


def _interior(g):
    # cells whose stencils do not touch the periodic seam
    return (slice(1, g.nx - 1), slice(1, g.ny - 1), slice(1, g.nz - 1))


def test_potential_validation():
    g = Grid.cube(8)
    with pytest.raises(ValueError):
        PotentialField(g, np.zeros((2, *g.shape)), np.zeros((2, 3, *g.shape)), dt=0.1)
    with pytest.raises(ValueError):
        PotentialField(g, np.zeros((3, *g.shape)), np.zeros((3, 3, *g.shape)))
    with pytest.raises(ValueError):
        PotentialField(g, g.zeros(), g.zeros(3), c=0.0)


def test_five_parts_static_linear_potential():
    g, P = _linear_y()
    box = _interior(g)
    r, l_ = quat_derivative(P, R), quat_derivative(P, L)
    assert np.all(r.curl_part[2][box] == -1.0) and np.all(r.curl_part[:2] == 0)
    assert np.all(l_.curl_part[2][box] == 1.0)
    for part in ("time_scalar", "div_part", "time_vector", "grad_part"):
        assert np.all(getattr(r, part) == 0)


def test_curl_free_potential_sides_agree(rng):
    g = Grid.cube(8)
    x, y, z = g.coords()
    A = np.stack([np.sin(2 * np.pi * x), np.cos(2 * np.pi * y), np.sin(4 * np.pi * z)])
    P = PotentialField.static_field(g, np.sin(2 * np.pi * y), A)
    r, l_ = quat_derivative(P, R), quat_derivative(P, L)
    assert np.all(r.curl_part == 0)
    assert np.array_equal(r.quaternion().vector, l_.quaternion().vector)


def test_right_minus_left_is_twice_curl(rng):
    g = Grid.cube(10)
    P = random_potential(g, rng, dt=0.05, slices=3)
    r, l_ = quat_derivative(P, R).quaternion(), quat_derivative(P, L).quaternion()
    d = r - l_
    assert np.all(d.scalar == 0)
    A_mid = P.A[1]
    assert np.allclose(d.vector, 2 * curl(g, A_mid), rtol=0, atol=1e-12)


def test_five_part_recombination_is_exact(rng):
    g = Grid.cube(8)
    P = random_potential(g, rng, dt=0.02, slices=3)
    for side in (R, L):
        f = quat_derivative(P, side)
        q = f.quaternion()
        assert np.array_equal(q.scalar, f.time_scalar - f.div_part)
        assert np.array_equal(q.vector, (f.time_vector + f.grad_part) + f.curl_part)


def test_missing_time_slices():
    g = Grid.cube(8)
    P = PotentialField(g, np.zeros((1, *g.shape)), np.zeros((1, 3, *g.shape)), dt=0.1)
    with pytest.raises(MissingTimeDerivative):
        quat_derivative(P, R)
    P3 = PotentialField(g, np.zeros((3, *g.shape)), np.zeros((3, 3, *g.shape)), dt=0.1)
    with pytest.raises(MissingTimeDerivative):
        potential_identity_residual(P3)


def test_electrostatic_limit():
    g = Grid(12, 4, 4, 0.1, 0.1, 0.1)
    x, _, _ = g.coords()
    F = fields_from_potential(PotentialField.static_field(g, x**2, g.zeros(3)))
    inner = slice(1, g.nx - 1)
    assert np.allclose(F.E[0][inner], -2 * x[inner], rtol=0, atol=1e-13)
    assert np.all(F.E[1:] == 0) and np.all(F.T == 0) and np.all(F.B == 0)


def test_linear_vector_potential_fields():
    g, P = _linear_y()
    F = fields_from_potential(P)
    assert np.all(F.T == 0) and np.all(F.E == 0)
    assert np.all(F.B[2][_interior(g)] == -1.0)


def test_plane_wave_fields():
    g = Grid.cube(128, dims=1)
    k = 2 * np.pi
    P = plane_wave_potential(g, dt=1e-3, slices=3)
    F = fields_from_potential(P)
    x = g.coords()[0]
    assert np.max(np.abs(F.T)) < 1e-12
    assert np.max(np.abs(F.E[1] - k * np.cos(k * x))) < 2e-3 * k
    assert np.max(np.abs(F.B[2] - k * np.cos(k * x))) < 2e-3 * k


def test_paths_agree_and_B_has_no_scalar(rng):
    g = Grid(8, 6, 10, 0.1, 0.15, 0.12)
    for _ in range(5):
        P = random_potential(g, rng, dt=0.03, slices=5, c=1.7)
        comb, direct = field_paths(P)
        assert path_discrepancy(comb, direct) <= 1e-13
        assert np.all(comb.magnetic().scalar == 0)


def test_law_vs_identity_contrast(rng):
    g = Grid.cube(10)
    law_big = 0
    for _ in range(6):
        P = random_potential(g, rng, dt=0.05, slices=5)
        F = fields_from_potential(P)
        assert identity_residual(F).linf() <= 1e-12
        assert potential_identity_residual(P).linf() <= 1e-12
        law_big += law_residual(F).l2() > 1e-2
        assert potential_equation_residual(P).l2() > 1e-2
    assert law_big == 6


def test_static_identity_residual(rng):
    P = random_potential(Grid.cube(10), rng, dt=None)
    assert identity_residual(fields_from_potential(P)).linf() <= 1e-12


def test_identity_for_non_potential_field_warns():
    g = Grid(8, 8, 8)
    _, y, _ = g.coords()
    E = g.zeros(3)
    E[0] = y
    F = FieldState(g, g.zeros(), E, g.zeros(3), dT_dt=g.zeros(), dE_dt=g.zeros(3), dB_dt=g.zeros(3))
    with pytest.warns(NonPotentialFieldWarning):
        res = identity_residual(F)
    assert np.all(res.scalar == 0)
    assert np.all(res.vector[2][_interior(g)] == -1.0)


def test_zero_fields_give_zero_residuals():
    g = Grid.cube(8)
    F = FieldState(g, g.zeros(), g.zeros(3), g.zeros(3), dT_dt=g.zeros(), dE_dt=g.zeros(3))
    assert law_residual(F).linf() == 0
    P = PotentialField(g, np.zeros((5, *g.shape)), np.zeros((5, 3, *g.shape)), dt=0.1)
    assert potential_equation_residual(P).linf() == 0
    assert potential_identity_residual(P).linf() == 0


def test_law_residual_needs_time_derivatives():
    g = Grid.cube(8)
    with pytest.raises(MissingTimeDerivative):
        law_residual(FieldState.zeros(g))


def _plane_wave_residuals(n):
    g = Grid.cube(n, dims=1)
    dt = 0.25 / n
    P = plane_wave_potential(g, dt=dt, slices=5)
    F = fields_from_potential(P)
    return l2_norm(g, law_residual(F).vector[1]), potential_equation_residual(P).l2()


def test_plane_wave_satisfies_laws_at_second_order():
    r = [_plane_wave_residuals(n) for n in (32, 64, 128)]
    for a, b in zip(r, r[1:]):
        assert a[0] / b[0] == pytest.approx(4, rel=0.05)
        assert a[1] / b[1] == pytest.approx(4, rel=0.05)
    assert potential_identity_residual(plane_wave_potential(Grid.cube(32, dims=1))).linf() <= 1e-12


def test_potential_equation_closure_with_explicit_sources():
    g = Grid.cube(16, dims=1)
    x = g.coords()[0]
    P = PotentialField.static_field(g, np.sin(2 * np.pi * x), g.zeros(3))
    lhs = potential_equation_residual(P)
    S = Sources.explicit(g, rho=lhs.scalar / (8 * math.pi), J=lhs.vector * P.c / (8 * math.pi))
    assert potential_equation_residual(P, S).linf() <= 1e-12
    with pytest.raises(ValueError):
        potential_equation_residual(P, Sources.identified())


def test_identified_sources_linear_patch():
    g = Grid(12, 4, 4, 0.1, 0.1, 0.1)
    x, _, _ = g.coords()
    a, b, c = 0.7, -1.3, 2.0
    F = FieldState(g, a * x, g.zeros(3), g.zeros(3), c=c, dT_dt=np.full(g.shape, b))
    S = identified_sources(F)
    inner = slice(1, g.nx - 1)
    assert np.allclose(S.rho, b / (4 * math.pi * c))
    assert np.allclose(S.J[0][inner], c * a / (4 * math.pi))
    assert np.all(S.J[1:] == 0)


def test_identified_sources_static_sine():
    g = Grid.cube(64, dims=1)
    x = g.coords()[0]
    F = FieldState(g, np.sin(2 * np.pi * x), g.zeros(3), g.zeros(3), dT_dt=g.zeros())
    S = identified_sources(F)
    assert np.all(S.rho == 0)
    assert np.max(np.abs(S.J[0] - (2 * np.pi / (4 * math.pi)) * np.cos(2 * np.pi * x))) < 1e-3
    with pytest.raises(MissingTimeDerivative):
        identified_sources(FieldState.zeros(g))
    const = FieldState(g, np.full(g.shape, 3.0), g.zeros(3), g.zeros(3), dT_dt=g.zeros())
    Sc = identified_sources(const)
    assert np.all(Sc.rho == 0) and np.all(Sc.J == 0)
