import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from superhc.cartan import SuperDims, make_cartan_point as mk, random_regular_point
from superhc.closed_form import omega
from superhc.errors import RankTooLarge, SingularPoint
from superhc.weyl_sum import (RootSystemId, SignedPermutation, cartan_point_for, closed_form_dims,
                              enumerate_weyl_group, expand_determinant_form, expansion_residual,
                              hc_weyl_sum, positive_root_product, proportionality_ratios,
                              relative_spread, weyl_group_order)


def test_positive_root_product_examples():
    assert positive_root_product(RootSystemId("C", 1), [0.5]) == 1.0
    assert positive_root_product(RootSystemId("D", 2), [2, 1]) == 3.0
    assert positive_root_product(RootSystemId("B", 1), [0.37]) == 0.37


def test_group_examples():
    assert len(enumerate_weyl_group(RootSystemId("A", 1))) == 2
    assert len(enumerate_weyl_group(RootSystemId("B", 2))) == 8
    assert len(enumerate_weyl_group(RootSystemId("D", 2))) == 4
    with pytest.raises(RankTooLarge):
        enumerate_weyl_group(RootSystemId("B", 7))


@pytest.mark.parametrize("fam", "ABCD")
@pytest.mark.parametrize("rank", [1, 2, 3, 4])
def test_group_sizes(fam, rank):
    sys = RootSystemId(fam, rank)
    els = enumerate_weyl_group(sys)
    assert len(els) == weyl_group_order(sys)
    assert len({(w.perm, w.signs) for w in els}) == len(els)
    if fam == "D":
        assert all(w.n_negative % 2 == 0 for w in els)


def test_signed_permutation_validation():
    with pytest.raises(ValueError):
        SignedPermutation((0, 0), (1, 1))
    with pytest.raises(ValueError):
        SignedPermutation((0, 1), (1, 2))


@pytest.mark.parametrize("fam", "BCD")
@pytest.mark.parametrize("rank", [1, 2, 3])
def test_weyl_sum_symmetry_and_invariance(fam, rank):
    sys = RootSystemId(fam, rank)
    rng = np.random.default_rng(rank)
    d = closed_form_dims(sys)
    a, b = random_regular_point(d, rng).coords, random_regular_point(d, rng).coords
    ref = hc_weyl_sum(sys, a, b)
    assert abs(hc_weyl_sum(sys, b, a) - ref) <= 1e-12 * abs(ref)
    w = enumerate_weyl_group(sys)[-1]
    assert abs(hc_weyl_sum(sys, w.act(a), b) - ref) <= 1e-12 * abs(ref)


@pytest.mark.parametrize("fam", "BCD")
@pytest.mark.parametrize("rank", [1, 2, 3])
def test_proportional_to_closed_form(fam, rank):
    sys = RootSystemId(fam, rank)
    d = closed_form_dims(sys)
    rng = np.random.default_rng(40 + rank)
    pairs = [(random_regular_point(d, rng).coords, random_regular_point(d, rng).coords)
             for _ in range(10)]
    assert relative_spread(proportionality_ratios(sys, pairs)) < 1e-8


def test_anchor_pairs():
    r = proportionality_ratios(RootSystemId("B", 1), [([0.5], [0.4]), ([1.3], [0.2])])
    assert relative_spread(r) < 1e-12
    r = proportionality_ratios(RootSystemId("C", 1), [([0.3], [0.5]), ([1.1], [0.7])])
    assert relative_spread(r) < 1e-12


def test_weyl_sum_singular():
    with pytest.raises(SingularPoint):
        hc_weyl_sum(RootSystemId("D", 2), [1.0, 1.0], [0.2, 0.3])


def test_expansion_examples():
    d = SuperDims(3, 0)
    ex = expand_determinant_form(d, mk(d, [0.5]), mk(d, [0.4]))
    assert ex.term_count == 2
    assert sorted(c.real for c, _ in ex.terms) == [-0.5, 0.5]
    d = SuperDims(0, 1)
    ex = expand_determinant_form(d, mk(d, [], [0.3]), mk(d, [], [0.5]))
    assert ex.term_count == 2
    assert ex.value == pytest.approx(omega(mk(d, [], [0.3]), mk(d, [], [0.5])), rel=1e-14)
    d = SuperDims(2, 1)
    rng = np.random.default_rng(8)
    s, r = random_regular_point(d, rng), random_regular_point(d, rng)
    assert expansion_residual(s, r) < 1e-12


@pytest.mark.parametrize("dims", [SuperDims(a, b) for a in range(6) for b in range(3)
                                  if (a, b) != (0, 0)], ids=str)
def test_expansion_identity_and_term_count(dims):
    rng = np.random.default_rng(9)
    for _ in range(5):
        s, r = random_regular_point(dims, rng), random_regular_point(dims, rng)
        assert expansion_residual(s, r) < 1e-12
        assert expansion_residual(s, r, dps=None) < 1e-9
    ex = expand_determinant_form(dims, s, r)
    bos = RootSystemId("B" if dims.odd else "D", max(dims.m, 1))
    wb = weyl_group_order(bos) if dims.m else 1
    wc = weyl_group_order(RootSystemId("C", dims.k2)) if dims.k2 else 1
    assert ex.term_count == wb * wc


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_expansion_property(seed):
    rng = np.random.default_rng(seed)
    d = SuperDims(int(rng.integers(0, 6)), int(rng.integers(1, 3)))
    s, r = random_regular_point(d, rng), random_regular_point(d, rng)
    assert expansion_residual(s, r) < 1e-12
