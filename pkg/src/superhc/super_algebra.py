"""Basis of uosp(k1/2k2) and the root data of a Cartan point's adjoint action.

Even generators span the compact form o(k1) + usp(2k2): every ``X`` obeys
``X^T L + L X = 0`` and ``X^dagger = -X``.  The odd sector is represented on
its complexified coefficient space: an odd "shape" generator has a unit
entry in the boson-fermion block and the partner block fixed by the
supertranspose condition, ``C = -J B^T``.  The Cartan point acts through
:func:`~superhc.cartan.embed_diag`, whose bosonic blocks are ``i`` times
compact generators, so roots come out as ``+-b_p +- b_q`` (real) and
``+-i f_p +- i f_q`` (imaginary).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .cartan import CartanPoint, SuperDims, embed_diag, symplectic_J, singular_reasons
from .errors import SingularPoint, SingularZeroRoot

ZERO_ROOT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class AlgebraBasis:
    dims: SuperDims
    even_gens: tuple
    odd_gens: tuple
    cartan_index: tuple  # positions of the Cartan generators inside even_gens

    @property
    def cartan_gens(self) -> list:
        return [self.even_gens[i] for i in self.cartan_index]

    @property
    def all_gens(self) -> list:
        return list(self.even_gens) + list(self.odd_gens)


@dataclass(frozen=True)
class RootData:
    even_roots: np.ndarray
    odd_roots: np.ndarray


def _unit(n, i, j):
    E = np.zeros((n, n), dtype=complex)
    E[i, j] = 1.0
    return E


def _orthogonal_gens(k1):
    """so(k1) generators, Cartan blocks (2p, 2p+1) listed first."""
    cartan = [(2 * p, 2 * p + 1) for p in range(k1 // 2)]
    rest = [pq for pq in itertools.combinations(range(k1), 2) if pq not in cartan]
    gens = [_unit(k1, p, q) - _unit(k1, q, p) for p, q in cartan + rest]
    return gens, len(cartan)


def _usp_gens(k2):
    """usp(2k2) generators ``[[A, B], [-conj B, conj A]]``, A skew-hermitian,
    B complex symmetric.  Cartan elements ``A = i E_pp`` come first."""
    def blk(A, B):
        return np.block([[A, B], [-B.conj(), A.conj()]])

    def e(i, j):
        return _unit(k2, i, j)

    Z = np.zeros((k2, k2), dtype=complex)
    gens = [blk(1j * e(p, p), Z) for p in range(k2)]
    for p, q in itertools.combinations(range(k2), 2):
        gens.append(blk(e(p, q) - e(q, p), Z))
        gens.append(blk(1j * (e(p, q) + e(q, p)), Z))
    for p in range(k2):
        gens.append(blk(Z, e(p, p)))
        gens.append(blk(Z, 1j * e(p, p)))
    for p, q in itertools.combinations(range(k2), 2):
        gens.append(blk(Z, e(p, q) + e(q, p)))
        gens.append(blk(Z, 1j * (e(p, q) + e(q, p))))
    return gens, k2


def build_basis(dims: SuperDims) -> AlgebraBasis:
    """Deterministically ordered basis: o(k1) gens, then usp(2k2) gens, then odd."""
    n, k1, k2 = dims.size, dims.k1, dims.k2
    og, n_oc = _orthogonal_gens(k1)
    ug, n_uc = _usp_gens(k2)
    even = []
    for g in og:
        X = np.zeros((n, n), dtype=complex)
        X[:k1, :k1] = g
        even.append(X)
    for g in ug:
        X = np.zeros((n, n), dtype=complex)
        X[k1:, k1:] = g
        even.append(X)
    cartan = tuple(range(n_oc)) + tuple(len(og) + i for i in range(n_uc))
    J = symplectic_J(k2)
    odd = []
    for p in range(k1):
        for q in range(2 * k2):
            Bm = np.zeros((k1, 2 * k2), dtype=complex)
            Bm[p, q] = 1.0
            X = np.zeros((n, n), dtype=complex)
            X[:k1, k1:] = Bm
            X[k1:, :k1] = -J @ Bm.T
            odd.append(X)
    return AlgebraBasis(dims, tuple(even), tuple(odd), cartan)


def expand(basis_mats, M) -> tuple[np.ndarray, float]:
    """Coefficients of ``M`` in the span of ``basis_mats`` and the residual norm."""
    if not basis_mats:
        return np.zeros(0, dtype=complex), float(np.linalg.norm(M))
    A = np.stack([g.reshape(-1) for g in basis_mats], axis=1)
    c, *_ = np.linalg.lstsq(A, M.reshape(-1), rcond=None)
    return c, float(np.linalg.norm(A @ c - M.reshape(-1)))


def adjoint_matrix(basis: AlgebraBasis, p: CartanPoint) -> np.ndarray:
    """Matrix of ``ad_s`` on the full (even + odd) basis, columns = images."""
    s = embed_diag(p)
    gens = basis.all_gens
    if not gens:
        return np.zeros((0, 0), dtype=complex)
    A = np.stack([g.reshape(-1) for g in gens], axis=1)
    images = np.stack([(s @ g - g @ s).reshape(-1) for g in gens], axis=1)
    ad, *_ = np.linalg.lstsq(A, images, rcond=None)
    return ad


def adjoint_roots(basis: AlgebraBasis, p: CartanPoint) -> RootData:
    """Nonzero ``ad_s`` eigenvalues on the even complement of the Cartan
    subalgebra and on the odd sector."""
    if basis.dims != p.dims:
        raise ValueError(f"basis dims {basis.dims} vs point dims {p.dims}")
    reasons = singular_reasons(p)
    if reasons:
        raise SingularPoint("degenerate ad spectrum: " + ", ".join(reasons))
    ad = adjoint_matrix(basis, p)
    ne = len(basis.even_gens)
    ev = np.linalg.eigvals(ad[:ne, :ne]) if ne else np.zeros(0, dtype=complex)
    od = np.linalg.eigvals(ad[ne:, ne:]) if len(basis.odd_gens) else np.zeros(0, dtype=complex)
    n_cartan = len(basis.cartan_index)
    order = np.argsort(np.abs(ev), kind="stable")
    zero, even = ev[order[:n_cartan]], ev[order[n_cartan:]]
    scale = max(1.0, float(np.max(np.abs(ev), initial=0.0)))
    if np.any(np.abs(zero) > ZERO_ROOT_TOL * scale):
        raise SingularPoint("Cartan directions do not commute with s")
    if np.any(np.abs(even) <= ZERO_ROOT_TOL * scale):
        raise SingularPoint("vanishing even root: point is not regular")
    return RootData(even, od)


def block_leakage(basis: AlgebraBasis, p: CartanPoint) -> float:
    """Largest entry of ``ad_s`` mixing the even and odd sectors."""
    ad = adjoint_matrix(basis, p)
    ne = len(basis.even_gens)
    off = np.concatenate([ad[:ne, ne:].reshape(-1), ad[ne:, :ne].reshape(-1)])
    return float(np.max(np.abs(off), initial=0.0))


def berezinian_from_roots(rd: RootData, p: CartanPoint | None = None) -> float:
    """``prod(even roots) / prod(odd roots)``; its modulus is ``B(p)^2``.

    The sign is kept: with the bosonic roots real and the fermionic ones
    imaginary, the ratio is real up to rounding.
    """
    if rd.odd_roots.size and np.min(np.abs(rd.odd_roots)) <= ZERO_ROOT_TOL:
        raise SingularZeroRoot("an odd root vanishes")
    val = np.prod(rd.even_roots) / np.prod(rd.odd_roots)
    return float(val.real)


def root_catalog(p: CartanPoint) -> RootData:
    """Expected roots written out by hand (the independent oracle)."""
    b, f, odd = p.b, p.f, p.dims.odd
    even, fodd = [], []
    for i, j in itertools.combinations(range(len(b)), 2):
        even += [sb * b[i] + sc * b[j] for sb in (1, -1) for sc in (1, -1)]
    if odd:
        even += [x for v in b for x in (v, -v)]
    for i, j in itertools.combinations(range(len(f)), 2):
        even += [1j * (sb * f[i] + sc * f[j]) for sb in (1, -1) for sc in (1, -1)]
    even += [x for v in f for x in (2j * v, -2j * v)]
    for v in b:
        for w in f:
            fodd += [sb * v + 1j * sc * w for sb in (1, -1) for sc in (1, -1)]
    if odd:
        fodd += [x for w in f for x in (1j * w, -1j * w)]
    return RootData(np.array(even, dtype=complex), np.array(fodd, dtype=complex))


def sorted_roots(x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    return x[np.lexsort((x.imag, x.real))]


def catalog_deviation(rd: RootData, p: CartanPoint) -> float:
    """Max distance between numeric and catalog roots under the best
    one-to-one pairing (``inf`` when the multiplicities differ)."""
    cat = root_catalog(p)
    worst = 0.0
    for got, want in ((rd.even_roots, cat.even_roots), (rd.odd_roots, cat.odd_roots)):
        if len(got) != len(want):
            return float("inf")
        if len(got):
            cost = np.abs(got[:, None] - want[None, :])
            i, j = linear_sum_assignment(cost)
            worst = max(worst, float(cost[i, j].max()))
    return worst


def literal_root_counts(dims: SuperDims) -> dict:
    """Root counts in the relabeled "2 k1 bosonic" counting convention,
    with the relabeled bosonic index read as ``m``.

    The odd count there reads ``2 m k2`` (+ ``2 m`` for odd k1), whereas four
    independent sign choices in ``+-b_p +- i f_q`` give ``4 m k2`` (+ ``2 k2``).
    """
    m, k2 = dims.m, dims.k2
    return {
        "even": 2 * m * (m - 1) + (2 * m if dims.odd else 0) + 2 * k2 * k2,
        "odd": 2 * m * k2 + (2 * m if dims.odd else 0),
    }


def root_count_report(rd: RootData, dims: SuperDims) -> dict:
    lit = literal_root_counts(dims)
    got = {"even": int(len(rd.even_roots)), "odd": int(len(rd.odd_roots))}
    return {"numeric": got, "literal": lit,
            "mismatch": sorted(k for k in got if got[k] != lit[k])}
