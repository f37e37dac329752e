"""Residuals of the differential identities behind the closed form.

Functions handed to these helpers take the coordinates as two sequences,
``f(b, f)``, holding plain floats or :class:`~superhc.jet.Jet2` values.
Two differentiation modes are available: ``"jet"`` (exact to rounding) and
``"fd"`` (central differences with ``h = max(|x|, 1) * eps**0.25``).
"""
from __future__ import annotations

import itertools

import numpy as np

from .cartan import EPS_REG, CartanPoint, SuperDims, supertrace_square
from .closed_form import (berezinian_expr, chi_expr, grad_log_berezinian,
                          omega_expr, require_regular)
from .errors import DimensionMismatch, SingularPoint
from .jet import Jet2

MODES = ("jet", "fd")
_FD_FACTOR = np.finfo(float).eps ** 0.25


def _split(x, m):
    return list(x[:m]), list(x[m:])


def derivatives(func, p: CartanPoint, mode: str = "jet"):
    """Value, gradient and diagonal Hessian of ``func`` at ``p``."""
    x = p.coords
    m, n = p.dims.m, len(x)
    if mode == "jet":
        out = func(*_split(Jet2.seed(x), m))
        if not isinstance(out, Jet2):
            return out, np.zeros(n, dtype=complex), np.zeros(n, dtype=complex)
        return out.val, np.asarray(out.d1, dtype=complex), np.asarray(out.d2, dtype=complex)
    if mode != "fd":
        raise ValueError(f"mode must be one of {MODES}")
    f0 = complex(func(*_split(x, m)))
    d1 = np.zeros(n, dtype=complex)
    d2 = np.zeros(n, dtype=complex)
    for c in range(n):
        h = max(abs(x[c]), 1.0) * _FD_FACTOR
        xp, xm = x.copy(), x.copy()
        xp[c] += h
        xm[c] -= h
        fp = complex(func(*_split(xp, m)))
        fm = complex(func(*_split(xm, m)))
        d1[c] = (fp - fm) / (2 * h)
        d2[c] = (fp - 2 * f0 + fm) / (h * h)
    return f0, d1, d2


def second_derivative(func, p: CartanPoint, coord: int, mode: str = "jet") -> complex:
    """``d^2 func / d x_coord^2`` at ``p`` (coordinates ordered bosonic first)."""
    if not 0 <= coord < p.dims.rank:
        raise IndexError(f"coordinate {coord} out of range for dims {p.dims}")
    return complex(derivatives(func, p, mode)[2][coord])


def flat_laplacian(func, p: CartanPoint, mode: str = "jet") -> complex:
    return complex(np.sum(derivatives(func, p, mode)[2]))


def apply_radial_laplacian(func, p: CartanPoint, mode: str = "jet") -> complex:
    """``1/2 sum_c [d_c^2 f + 2 (d_c ln B) d_c f]``, i.e. ``1/(2B^2) d(B^2 d f)``."""
    require_regular(p)
    _, d1, d2 = derivatives(func, p, mode)
    glb = grad_log_berezinian(p)
    return complex(0.5 * np.sum(d2 + 2 * glb * d1))


def _berezinian_func(dims):
    return lambda b, f: berezinian_expr(dims, b, f)


def harmonic_residual(dims: SuperDims, p: CartanPoint, mode: str = "jet") -> float:
    """``|sum_c d_c^2 B| / (sum_c |d_c^2 B| + |B|)`` at a regular point."""
    if p.dims != dims:
        raise DimensionMismatch(f"dims {dims} vs point dims {p.dims}")
    require_regular(p)
    val, _, d2 = derivatives(_berezinian_func(dims), p, mode)
    return float(abs(np.sum(d2)) / (np.sum(np.abs(d2)) + abs(val)))


def partial_fraction_identity_residuals(x) -> tuple[float, float]:
    """Residuals of the two pole-sum identities used to prove harmonicity.

    ``sum_{p != q} 1/(x_p^2 - x_q^2)`` and
    ``sum_{p, q, t distinct} x_p^2 / ((x_p^2 - x_q^2)(x_p^2 - x_t^2))``; the
    second is 0 for fewer than three entries.
    """
    sq = np.asarray(x, dtype=float) ** 2
    n = len(sq)
    for i, j in itertools.combinations(range(n), 2):
        if sq[i] == sq[j]:
            raise SingularPoint(f"coincident squares at positions {i}, {j}")
    first = sum(1.0 / (sq[p] - sq[q]) for p, q in itertools.permutations(range(n), 2))
    second = sum(sq[p] / ((sq[p] - sq[q]) * (sq[p] - sq[t]))
                 for p, q, t in itertools.permutations(range(n), 3))
    return abs(first), abs(second)


def _chi_of_s(r: CartanPoint):
    d = r.dims
    return lambda b, f: chi_expr(d, b, f, list(r.b), list(r.f))


def _omega_of_s(r: CartanPoint):
    d = r.dims
    return lambda b, f: omega_expr(d, b, f, list(r.b), list(r.f))


def _check_pair(s, r):
    if s.dims != r.dims:
        raise DimensionMismatch(f"dims differ: {s.dims} vs {r.dims}")


def eigen_residual(s: CartanPoint, r: CartanPoint, mode: str = "jet") -> float:
    """``|Delta_s chi + str(r^2) chi| / |chi|``."""
    _check_pair(s, r)
    require_regular(s)
    require_regular(r)
    func = _chi_of_s(r)
    chi = complex(chi_expr(s.dims, s.b, s.f, r.b, r.f))
    lap = apply_radial_laplacian(func, s, mode)
    return abs(lap + supertrace_square(r) * chi) / abs(chi)


def flat_eigen_residual(s: CartanPoint, r: CartanPoint, mode: str = "jet") -> float:
    """``|sum_c d_c^2 omega + 2 str(r^2) omega| / |omega|``.

    The flat eigenvalue is ``-2 str(r^2) = -4 |r|^2``: with ``str(r^2) =
    2 |r|^2`` and the factor 1/2 in the radial operator, this is the only
    constant compatible with the radial equation.
    """
    _check_pair(s, r)
    func = _omega_of_s(r)
    w = complex(omega_expr(s.dims, s.b, s.f, r.b, r.f))
    lap = flat_laplacian(func, s, mode)
    resid = abs(lap + 2 * supertrace_square(r) * w)
    return resid / abs(w) if w != 0 else resid


def separation_residual(s: CartanPoint, r: CartanPoint, mode: str = "jet") -> float:
    """Consistency of the ansatz: ``Delta_s(omega/B)`` against
    ``(1/2) (flat Laplacian of omega) / B``, relative to the latter."""
    _check_pair(s, r)
    require_regular(s)
    d = s.dims
    wfun = _omega_of_s(r)
    ratio = lambda b, f: wfun(b, f) / berezinian_expr(d, b, f)
    lhs = apply_radial_laplacian(ratio, s, mode)
    rhs = 0.5 * flat_laplacian(wfun, s, mode) / float(berezinian_expr(d, s.b, s.f))
    return abs(lhs - rhs) / max(abs(rhs), 1e-300)


def fd_error_bound(func, p: CartanPoint) -> float:
    """FD error model ``10 h^2 * scale`` for comparing the two modes.

    ``h`` is the largest step used and ``scale = max(1, |f| + sum_c |d_c^2 f|)``
    (taken from the jet evaluation) stands in for the unknown fourth
    derivatives that control the truncation error.
    """
    x = p.coords
    val, _, d2 = derivatives(func, p, "jet")
    h = max(np.max(np.abs(x), initial=0.0), 1.0) * _FD_FACTOR
    scale = max(1.0, abs(val) + float(np.sum(np.abs(d2))))
    return 10 * h * h * scale
