"""Closed-form group integral chi = omega(s, r) / (B(s) B(r)).

The expression builders (``berezinian_expr``, ``omega_expr``, ``chi_expr``)
accept plain numbers or :class:`~superhc.jet.Jet2` coordinates, so the very
same code path is differentiated in :mod:`superhc.radial_check`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import jet
from .cartan import EPS_REG, CartanPoint, SuperDims, singular_reasons
from .errors import DimensionMismatch, NonConvergent, SingularPoint

RICHARDSON_EPS = (1e-3, 5e-4)
CALIBRATION_RTOL = 1e-5


@dataclass(frozen=True)
class ChiValue:
    value: complex
    dims: SuperDims

    def __complex__(self):
        return complex(self.value)


def require_regular(p: CartanPoint, eps_reg: float = EPS_REG):
    reasons = singular_reasons(p, eps_reg)
    if reasons:
        raise SingularPoint(f"point {p.to_dict()} is not regular: " + ", ".join(reasons))


def _same_dims(s: CartanPoint, r: CartanPoint):
    if s.dims != r.dims:
        raise DimensionMismatch(f"dims differ: {s.dims} vs {r.dims}")


def berezinian_expr(dims: SuperDims, b, f):
    """``B`` as a product expression in the coordinates (no regularity check)."""
    num = 2.0 ** dims.k2
    for p, q in itertools.combinations(range(len(b)), 2):
        num = num * (b[p] * b[p] - b[q] * b[q])
    for p, q in itertools.combinations(range(len(f)), 2):
        num = num * (f[p] * f[p] - f[q] * f[q])
    for x in (b if dims.odd else f):
        num = num * x
    den = 1.0
    for x in b:
        for y in f:
            den = den * (x * x + y * y)
    return num / den


def _det_of(func, s, r):
    return jet.determinant([[func(sp * rq) for rq in r] for sp in s])


def omega_expr(dims: SuperDims, sb, sf, rb, rf):
    pref = 1.0 / (math.factorial(dims.m) * math.factorial(dims.k2))
    isin = lambda x: 1j * jet.sin(2 * x)
    if dims.odd:
        bos = _det_of(isin, sb, rb)
        fer = _det_of(lambda x: 2 * jet.cos(2 * x), sf, rf)
    else:
        bos = _det_of(lambda x: jet.cos(2 * x), sb, rb) + _det_of(isin, sb, rb)
        fer = _det_of(lambda x: -2j * jet.sin(2 * x), sf, rf)
    return pref * bos * fer


def chi_expr(dims: SuperDims, sb, sf, rb, rf):
    return omega_expr(dims, sb, sf, rb, rf) / (
        berezinian_expr(dims, sb, sf) * berezinian_expr(dims, rb, rf))


def berezinian_B(p: CartanPoint, eps_reg: float = EPS_REG) -> float:
    """Square root of the Berezinian of ``sigma = u^-1 s u`` at a regular point.

    Examples
    --------
    >>> from superhc.cartan import SuperDims, make_cartan_point
    >>> berezinian_B(make_cartan_point(SuperDims(3, 1), [2.0], [1.0]))
    0.8
    """
    require_regular(p, eps_reg)
    return float(berezinian_expr(p.dims, p.b, p.f))


def omega(s: CartanPoint, r: CartanPoint) -> complex:
    _same_dims(s, r)
    return complex(omega_expr(s.dims, s.b, s.f, r.b, r.f))


def chi_closed_form(s: CartanPoint, r: CartanPoint, eps_reg: float = EPS_REG) -> ChiValue:
    _same_dims(s, r)
    require_regular(s, eps_reg)
    require_regular(r, eps_reg)
    return ChiValue(complex(chi_expr(s.dims, s.b, s.f, r.b, r.f)), s.dims)


def grad_log_berezinian(p: CartanPoint) -> np.ndarray:
    """Gradient of ``ln|B|`` from the factored form, one simple pole per term.

    Ordered like :attr:`CartanPoint.coords` (bosonic first).
    """
    b, f, odd = p.b, p.f, p.dims.odd
    gb = np.zeros(len(b))
    gf = np.zeros(len(f))
    for i, x in enumerate(b):
        g = sum(2 * x / (x * x - y * y) for j, y in enumerate(b) if j != i)
        g -= sum(2 * x / (x * x + y * y) for y in f)
        if odd:
            g += 1 / x
        gb[i] = g
    for i, x in enumerate(f):
        g = sum(2 * x / (x * x - y * y) for j, y in enumerate(f) if j != i)
        g -= sum(2 * x / (y * y + x * x) for y in b)
        if not odd:
            g += 1 / x
        gf[i] = g
    return np.concatenate([gb, gf])


def _unit(ray: CartanPoint) -> CartanPoint:
    n = np.linalg.norm(ray.coords)
    if n == 0:
        raise SingularPoint("calibration ray must be nonzero")
    return ray.scaled(1.0 / n)


def calibration_constant(dims: SuperDims, s: CartanPoint, ray: CartanPoint,
                         eps_reg: float = EPS_REG) -> complex:
    """Limit of ``chi(s, eps * ray)`` as ``eps -> 0+``.

    The ray is normalised to unit length and the closed form is averaged over
    ``+ray`` and ``-ray`` so that only even powers of ``eps`` remain; one
    Richardson step over ``eps in {1e-3, 5e-4}`` then removes the ``eps^2``
    term.  When the two symmetrised samples disagree by more than ``1e-5``
    relative to the extrapolated limit the limit is declared non-convergent;
    this is what happens whenever the closed form vanishes at ``r = 0``
    (``m * k2 > 0``).
    """
    if s.dims != dims or ray.dims != dims:
        raise DimensionMismatch(f"dims {dims} vs point dims {s.dims}, {ray.dims}")
    require_regular(s, eps_reg)
    require_regular(ray, eps_reg)
    if dims.rank == 0:
        return complex(chi_closed_form(s, ray).value)
    u = _unit(ray)

    def sym(eps):
        a = chi_closed_form(s, u.scaled(eps), eps_reg).value
        b = chi_closed_form(s, u.scaled(-eps), eps_reg).value
        return 0.5 * (a + b)

    e1, e2 = RICHARDSON_EPS
    g1, g2 = sym(e1), sym(e2)
    ratio = (e1 / e2) ** 2
    limit = (ratio * g2 - g1) / (ratio - 1)
    if not np.isfinite(limit) or abs(g1 - g2) > CALIBRATION_RTOL * abs(limit):
        raise NonConvergent(
            f"small-r limit of chi does not settle for dims {dims}: "
            f"chi(eps={e1})={g1:.6g}, chi(eps={e2})={g2:.6g}")
    return complex(limit)


def chi_normalized(s: CartanPoint, r: CartanPoint, ray: CartanPoint | None = None,
                   eps_reg: float = EPS_REG) -> complex:
    """``chi(s, r) / calibration_constant``; the ray defaults to ``r`` itself."""
    c = calibration_constant(s.dims, s, r if ray is None else ray, eps_reg)
    return chi_closed_form(s, r, eps_reg).value / c
