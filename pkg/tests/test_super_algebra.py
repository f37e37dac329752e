import itertools

import numpy as np
import pytest

from superhc.cartan import SuperDims, make_cartan_point as mk, metric_L, random_regular_point
from superhc.closed_form import berezinian_B
from superhc.errors import SingularPoint, SingularZeroRoot
from superhc.super_algebra import (RootData, adjoint_roots, berezinian_from_roots, block_leakage,
                                   build_basis, catalog_deviation, expand, literal_root_counts,
                                   root_count_report, sorted_roots)

DIMS_52 = [SuperDims(a, b) for a in range(6) for b in range(3) if (a, b) != (0, 0)]


@pytest.mark.parametrize("dims", DIMS_52 + [SuperDims(0, 0)], ids=str)
def test_basis_invariants(dims):
    basis = build_basis(dims)
    k1, k2 = dims.k1, dims.k2
    assert len(basis.even_gens) == k1 * (k1 - 1) // 2 + k2 * (2 * k2 + 1)
    assert len(basis.cartan_gens) == dims.m + k2
    assert len(basis.odd_gens) == 2 * k1 * k2
    L = metric_L(dims)
    for X in basis.even_gens:
        assert np.max(np.abs(X.T @ L + L @ X)) < 1e-14
        assert np.max(np.abs(X + X.conj().T)) < 1e-14


@pytest.mark.parametrize("dims", [SuperDims(3, 1), SuperDims(4, 2), SuperDims(2, 2)], ids=str)
def test_even_closure(dims):
    gens = build_basis(dims).even_gens
    for X, Y in itertools.combinations(gens, 2):
        _, res = expand(list(gens), X @ Y - Y @ X)
        assert res < 1e-12


def test_basis_examples():
    assert len(build_basis(SuperDims(2, 0)).even_gens) == 1
    assert len(build_basis(SuperDims(0, 1)).even_gens) == 3
    b = build_basis(SuperDims(0, 0))
    assert not b.even_gens and not b.odd_gens and not b.cartan_gens


def test_root_examples():
    rd = adjoint_roots(build_basis(SuperDims(3, 0)), mk(SuperDims(3, 0), [2]))
    assert np.allclose(sorted_roots(rd.even_roots), [-2, 2])
    rd = adjoint_roots(build_basis(SuperDims(0, 1)), mk(SuperDims(0, 1), [], [1]))
    assert np.allclose(sorted(rd.even_roots, key=lambda z: z.imag), [-2j, 2j])
    rd = adjoint_roots(build_basis(SuperDims(0, 0)), mk(SuperDims(0, 0)))
    assert rd.even_roots.size == 0 and rd.odd_roots.size == 0


def test_berezinian_from_roots_examples():
    for dims, b, f, want in [(SuperDims(2, 1), [1], [1], 1.0), (SuperDims(3, 0), [2], [], 4.0),
                             (SuperDims(0, 1), [], [1], 4.0)]:
        p = mk(dims, b, f)
        val = berezinian_from_roots(adjoint_roots(build_basis(dims), p), p)
        assert abs(val) == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("dims", DIMS_52, ids=str)
def test_roots_catalog_and_berezinian(dims):
    rng = np.random.default_rng(21)
    basis = build_basis(dims)
    for _ in range(10):
        p = random_regular_point(dims, rng)
        rd = adjoint_roots(basis, p)
        assert catalog_deviation(rd, p) < 1e-9
        # closed under negation
        assert catalog_deviation(RootData(-rd.even_roots, -rd.odd_roots), p) < 1e-9
        B2 = berezinian_B(p) ** 2
        assert abs(abs(berezinian_from_roots(rd, p)) - B2) / B2 < 1e-9
        assert block_leakage(basis, p) < 1e-12


def test_singular_point_rejected():
    d = SuperDims(4, 1)
    with pytest.raises(SingularPoint):
        adjoint_roots(build_basis(d), mk(d, [1.0, 1.0], [0.5]))


def test_zero_odd_root():
    p = mk(SuperDims(2, 1), [1.0], [1.0])
    rd = RootData(np.array([2.0, -2.0]), np.array([0.0, 1.0]))
    with pytest.raises(SingularZeroRoot):
        berezinian_from_roots(rd, p)


def test_root_count_report_flags_literal_mismatch():
    d = SuperDims(4, 2)
    rd = adjoint_roots(build_basis(d), mk(d, [0.3, 1.1], [0.7, 1.9]))
    rep = root_count_report(rd, d)
    assert rep["numeric"]["odd"] == 4 * d.m * d.k2
    assert rep["literal"] == literal_root_counts(d)
    assert "odd" in rep["mismatch"]
    assert rep["numeric"]["even"] == rep["literal"]["even"]
