import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subordkit import fncat
from subordkit.errors import BranchCutError, OutsideDiskError


def test_exp_taylor_at_origin():
    assert fncat.evaluate(fncat.exp(), 0) == (1, 1, 1)


def test_sqrt1p_taylor_at_origin():
    f, f1, f2 = fncat.evaluate(fncat.sqrt1p(), 0)
    assert (f, f1, f2) == pytest.approx((1, 0.5, -0.25))


def test_moebius_derivatives_match_hand_differentiation():
    # (1 + Az)/(1 + Bz): f' = (A - B)/(1 + Bz)², f'' = -2B(A - B)/(1 + Bz)³
    A, B, z = 0.375, -0.5, 0.2 + 0.3j
    f, f1, f2 = fncat.evaluate(fncat.moebius(A, B), z)
    assert f == pytest.approx((1 + A * z) / (1 + B * z))
    assert f1 == pytest.approx((A - B) / (1 + B * z) ** 2)
    assert f2 == pytest.approx(-2 * B * (A - B) / (1 + B * z) ** 3)
    assert fncat.evaluate(fncat.moebius(0.375, 0), 0) == pytest.approx((1, 0.375, 0))


def test_fd_residuals_small():
    assert fncat.fd_residual(fncat.exp(), 0.3 + 0.1j) <= 1e-6
    assert fncat.fd_residual(fncat.constant(3.0), 0.4j) == 0
    assert fncat.fd_residual(fncat.polynomial([1, 1, 1]), 0) <= 1e-9


@pytest.mark.parametrize("name", sorted(fncat.catalog_constructors()))
def test_every_constructor_passes_fd_sweep(name):
    rng = np.random.default_rng(7)
    fmap = fncat.catalog_constructors()[name]
    z = 0.9 * np.sqrt(rng.uniform(size=50)) * np.exp(2j * np.pi * rng.uniform(size=50))
    assert max(fncat.fd_residual(fmap, w) for w in z) <= 1e-6


def test_boundary_samples_identity_and_affine():
    poly = fncat.boundary_samples(fncat.identity(), 4)
    assert np.allclose(poly.points, [1, 1j, -1, -1j])
    poly = fncat.boundary_samples(fncat.moebius(1, 0), 4)
    assert np.allclose(poly.points, [2, 1 + 1j, 0, 1 - 1j])


def test_boundary_samples_skip_halfplane_corner():
    poly = fncat.boundary_samples(fncat.moebius(1, -1), 4, corners=(0.0,))
    assert len(poly.points) == 3
    assert np.allclose(poly.points.real, 0)
    assert np.allclose(poly.points[0], 1j)


def test_branch_cut_raises():
    with pytest.raises(BranchCutError):
        fncat.evaluate(fncat.sqrt1p(), -1.5 + 0j, allow_outside=True)


def test_points_outside_disk_rejected():
    with pytest.raises(OutsideDiskError):
        fncat.evaluate(fncat.exp(), 1.5)


def test_diskgrid_validation_and_shape():
    g = fncat.DiskGrid((0.5, 0.9), 8)
    assert g.points().shape == (2, 8)
    assert fncat.DiskGrid((0.5,), 4, True).points().shape == (2, 4)
    with pytest.raises(ValueError):
        fncat.DiskGrid((0.9, 0.5), 8)
    with pytest.raises(ValueError):
        fncat.DiskGrid((1.0,), 8)


@pytest.mark.parametrize("name", sorted(fncat.catalog_constructors()))
def test_json_round_trip(name):
    fmap = fncat.catalog_constructors()[name]
    back = fncat.from_json(json.dumps(fncat.to_json(fmap)))
    z = np.array([0.1 + 0.2j, -0.3j, 0.5])
    for a, b in zip(fncat.evaluate(fmap, z), fncat.evaluate(back, z)):
        assert np.allclose(a, b, rtol=1e-15, atol=0)


def test_from_json_rejects_unknown_op():
    with pytest.raises(ValueError):
        fncat.from_json({"op": "gamma"})


coef = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(coef, min_size=1, max_size=6),
       st.floats(0, 0.95), st.floats(0, 2 * np.pi))
def test_polynomial_derivatives_match_numpy(coeffs, r, t):
    z = r * np.exp(1j * t)
    f, f1, f2 = fncat.evaluate(fncat.polynomial(coeffs), z)
    P = np.polynomial.Polynomial(coeffs)
    assert f == pytest.approx(P(z), abs=1e-12)
    assert f1 == pytest.approx(P.deriv()(z), abs=1e-11)
    assert f2 == pytest.approx(P.deriv(2)(z), abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 0.9), st.floats(0, 2 * np.pi))
def test_quotient_and_product_rules(r, t):
    z = r * np.exp(1j * t)
    f = fncat.exp() * fncat.sqrt1p() / fncat.moebius(0.5, -0.25)
    assert fncat.fd_residual(f, z) <= 1e-6
