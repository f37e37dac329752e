import math

import numpy as np
import pytest

from superhc import jet
from superhc.cartan import SuperDims, make_cartan_point as mk, random_regular_point
from superhc.closed_form import chi_closed_form, chi_expr
from superhc.errors import DimensionMismatch, SingularPoint
from superhc.radial_check import (apply_radial_laplacian, derivatives, eigen_residual,
                                  fd_error_bound, flat_eigen_residual, harmonic_residual,
                                  partial_fraction_identity_residuals, second_derivative,
                                  separation_residual)

SWEEP = [SuperDims(*d) for d in [(2, 1), (3, 1), (4, 1), (5, 1), (2, 2), (3, 2), (4, 2)]]


def test_second_derivative_examples():
    d = SuperDims(2, 0)
    p = mk(d, [1.7])
    assert second_derivative(lambda b, f: b[0] * b[0], p, 0) == pytest.approx(2.0)
    assert second_derivative(lambda b, f: jet.sin(b[0]), mk(d, [0.0]), 0) == 0.0
    assert second_derivative(lambda b, f: jet.exp(b[0]), mk(d, [1.0]), 0) == pytest.approx(
        2.718282, abs=1e-6)
    assert second_derivative(lambda b, f: jet.exp(b[0]), mk(d, [1.0]), 0, "fd") == pytest.approx(
        math.e, rel=1e-6)


def test_radial_laplacian_examples():
    d = SuperDims(2, 0)
    assert apply_radial_laplacian(lambda b, f: 1.0, mk(d, [0.4])) == 0
    assert apply_radial_laplacian(lambda b, f: b[0] * b[0], mk(d, [0.4])) == pytest.approx(1.0)
    d = SuperDims(3, 0)
    s, r = mk(d, [0.5]), mk(d, [0.4])
    lap = apply_radial_laplacian(lambda b, f: chi_expr(d, b, f, [0.4], []), s)
    assert lap == pytest.approx(-0.32 * chi_closed_form(s, r).value, rel=1e-12)


def test_harmonic_examples():
    assert harmonic_residual(SuperDims(2, 0), mk(SuperDims(2, 0), [0.8])) == 0.0
    assert harmonic_residual(SuperDims(2, 1), mk(SuperDims(2, 1), [1.3], [0.7])) < 1e-7
    p = random_regular_point(SuperDims(4, 2), np.random.default_rng(0))
    assert harmonic_residual(SuperDims(4, 2), p) < 1e-7
    with pytest.raises(SingularPoint):
        harmonic_residual(SuperDims(2, 1), mk(SuperDims(2, 1), [1.0], [0.0]))
    with pytest.raises(DimensionMismatch):
        harmonic_residual(SuperDims(3, 1), mk(SuperDims(2, 1), [1.3], [0.7]))


def test_partial_fraction_examples():
    assert partial_fraction_identity_residuals([1, 2])[0] == 0
    a, b = partial_fraction_identity_residuals([1, 2, 3])
    assert a < 1e-13 and b < 1e-13
    with pytest.raises(SingularPoint):
        partial_fraction_identity_residuals([1, 1, 2])


def test_eigen_examples():
    d = SuperDims(3, 0)
    assert eigen_residual(mk(d, [0.5]), mk(d, [0.4])) < 1e-8
    d = SuperDims(0, 1)
    assert eigen_residual(mk(d, [], [0.3]), mk(d, [], [0.5])) < 1e-8
    rng = np.random.default_rng(4)
    d = SuperDims(2, 1)
    assert eigen_residual(random_regular_point(d, rng), random_regular_point(d, rng)) < 1e-6


def test_flat_examples():
    d = SuperDims(3, 0)
    assert flat_eigen_residual(mk(d, [0.5]), mk(d, [0.4])) < 1e-10
    d = SuperDims(0, 1)
    assert flat_eigen_residual(mk(d, [], [0.3]), mk(d, [], [0.5])) < 1e-10
    d = SuperDims(1, 0)
    assert flat_eigen_residual(mk(d), mk(d)) == 0
    with pytest.raises(DimensionMismatch):
        flat_eigen_residual(mk(SuperDims(1, 0)), mk(SuperDims(3, 0), [0.2]))


def test_literal_flat_constant_fails():
    # with -str(r^2) in place of -2 str(r^2) the flat equation does not hold
    from superhc.closed_form import omega
    from superhc.radial_check import flat_laplacian, _omega_of_s
    from superhc.cartan import supertrace_square
    d = SuperDims(3, 0)
    s, r = mk(d, [0.5]), mk(d, [0.4])
    lap = flat_laplacian(_omega_of_s(r), s)
    w = omega(s, r)
    assert abs(lap + supertrace_square(r) * w) / abs(w) > 0.1


@pytest.mark.parametrize("dims", SWEEP, ids=str)
def test_sweep(dims):
    rng = np.random.default_rng(dims.k1 * 10 + dims.k2)
    for _ in range(15):
        s, r = random_regular_point(dims, rng), random_regular_point(dims, rng)
        assert harmonic_residual(dims, s) < 1e-7
        assert harmonic_residual(dims, s, "fd") < 1e-4
        assert eigen_residual(s, r) < 1e-6
        assert flat_eigen_residual(s, r) < 1e-10
        assert separation_residual(s, r) < 1e-9


@pytest.mark.parametrize("dims", SWEEP, ids=str)
def test_jet_and_fd_agree(dims):
    rng = np.random.default_rng(99)
    for _ in range(20):
        s, r = random_regular_point(dims, rng), random_regular_point(dims, rng)
        func = lambda b, f: chi_expr(dims, b, f, list(r.b), list(r.f))
        _, _, d2j = derivatives(func, s, "jet")
        _, _, d2f = derivatives(func, s, "fd")
        assert np.max(np.abs(d2j - d2f)) < fd_error_bound(func, s)


def test_partial_fraction_random():
    rng = np.random.default_rng(1)
    for n in range(2, 7):
        a, b = partial_fraction_identity_residuals(rng.uniform(0.1, 3, size=n))
        assert a < 1e-10 and b < 1e-10
