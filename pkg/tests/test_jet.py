import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from superhc import jet
from superhc.jet import Jet2


def _d2(func, x):
    (v,) = Jet2.seed([x])
    out = func(v)
    return out.val, out.d1[0], out.d2[0]


def test_basic_rules():
    assert _d2(lambda x: x * x, 3.0) == (9.0, 6.0, 2.0)
    assert _d2(jet.sin, 0.0)[2] == 0.0
    assert _d2(jet.exp, 1.0)[2] == pytest.approx(math.e, rel=1e-15)
    assert _d2(lambda x: 1 / x, 2.0)[2] == pytest.approx(0.25)
    assert _d2(lambda x: x ** -2, 2.0)[2] == pytest.approx(6 / 16)


@settings(max_examples=80, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(-2, 2))
def test_product_rule(x, c):
    f = lambda v: jet.sin(c * v) * jet.exp(v) / (v * v + 1)
    val, d1, d2 = _d2(f, x)
    h = 1e-4
    g = lambda t: math.sin(c * t) * math.exp(t) / (t * t + 1)
    assert val == pytest.approx(g(x), rel=1e-14)
    assert d2 == pytest.approx((g(x + h) - 2 * g(x) + g(x - h)) / h ** 2, rel=1e-5, abs=1e-5)


def test_numpy_scalar_interop():
    (v,) = Jet2.seed([1.5])
    out = np.float64(2.0) * v
    assert isinstance(out, Jet2) and out.d1[0] == 2.0


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4, 5])
def test_determinant_matches_numpy(n):
    rng = np.random.default_rng(n)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    want = np.linalg.det(A) if n else 1.0
    assert jet.determinant(A.tolist()) == pytest.approx(want, rel=1e-12)
    rows = [[Jet2.constant(complex(x), 1) for x in row] for row in A]
    got = jet.determinant(rows) if n else 1.0
    assert jet.value(got) == pytest.approx(want, rel=1e-12)


def test_determinant_derivative():
    # d^2/dx^2 det [[x, 1], [1, x]] = d^2 (x^2 - 1) = 2 ; 4x4 diag(x, x, 1, 1) -> 2
    (x,) = Jet2.seed([0.7])
    rows = [[x, 0.0, 0.0, 0.3], [0.0, x, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]
    assert jet.determinant(rows).d2[0] == pytest.approx(2.0)
