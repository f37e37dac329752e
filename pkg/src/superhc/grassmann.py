"""Finite Grassmann algebra, Grassmann-valued supermatrices and the plane-wave
eigenvalue check for the Laplacian on uosp(k1/2k2).

Elements are stored sparsely as ``{bitmask: coefficient}``; bit ``a`` set means
generator ``theta_a`` is present, and monomials are kept in ascending
generator order.

Odd coordinates come in conjugate pairs ``(eta, eta*)``.  Conjugation of the
second kind maps ``eta -> eta*`` and ``eta* -> -eta``, so ``(theta*)* = -theta``
and ``(theta eta)* = theta* eta*``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .cartan import CartanPoint, SuperDims, embed_diag, symplectic_J
from .errors import AlgebraMismatch, CapacityExceeded, DimensionMismatch
from .super_algebra import build_basis

PRUNE = 1e-30
MAX_GENERATORS = 20


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _merge_sign(a: int, b: int) -> int:
    """Sign of reordering ``(monomial a)(monomial b)`` into ascending order."""
    swaps = 0
    while b:
        low = b & -b
        j = low.bit_length() - 1
        swaps += _popcount(a >> (j + 1))
        b ^= low
    return -1 if swaps & 1 else 1


@dataclass(frozen=True, eq=False)
class GrassmannAlgebra:
    """``n`` generators with optional labels and a conjugation table.

    ``conj[a] = (c, b)`` means ``theta_a* = c * theta_b``.
    """
    n: int
    labels: tuple = ()
    conj: tuple = ()

    def __post_init__(self):
        if self.n > MAX_GENERATORS:
            raise CapacityExceeded(f"{self.n} generators exceed the limit of {MAX_GENERATORS}")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"t{a}" for a in range(self.n)))
        if len(self.labels) != self.n:
            raise ValueError("one label per generator required")

    def gen(self, a: int) -> "GrassmannElement":
        if not 0 <= a < self.n:
            raise IndexError(f"generator {a} out of range")
        return GrassmannElement(self, {1 << a: 1.0})

    def scalar(self, c) -> "GrassmannElement":
        return GrassmannElement(self, {0: complex(c)})

    def zero(self) -> "GrassmannElement":
        return GrassmannElement(self, {})

    def random_element(self, rng, density: float = 0.5) -> "GrassmannElement":
        terms = {}
        for mask in range(1 << self.n):
            if rng.random() < density:
                terms[mask] = complex(rng.normal(), rng.normal())
        return GrassmannElement(self, terms)

    @classmethod
    def with_pairs(cls, names) -> "GrassmannAlgebra":
        """Algebra of conjugate pairs ``name, name*`` for each entry of ``names``."""
        labels, conj = [], []
        for k, nm in enumerate(names):
            labels += [nm, nm + "*"]
            conj += [(1.0, 2 * k + 1), (-1.0, 2 * k)]
        return cls(2 * len(names), tuple(labels), tuple(conj))


class GrassmannElement:
    __slots__ = ("alg", "terms")

    def __init__(self, alg: GrassmannAlgebra, terms: dict):
        self.alg = alg
        self.terms = {m: complex(c) for m, c in terms.items() if abs(c) > PRUNE}

    def _check(self, other):
        if other.alg is not self.alg:
            raise AlgebraMismatch("elements belong to different algebras")

    def _coerce(self, other):
        if isinstance(other, GrassmannElement):
            self._check(other)
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return self.alg.scalar(other)
        return None

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (_popcount(m), m)):
            mono = "".join(self.alg.labels[a] for a in range(self.alg.n) if m >> a & 1)
            parts.append(f"({self.terms[m]:.6g}){mono}")
        return " + ".join(parts)

    @property
    def body(self) -> complex:
        return self.terms.get(0, 0j)

    @property
    def degree(self) -> int:
        return max((_popcount(m) for m in self.terms), default=0)

    @property
    def is_even(self) -> bool:
        return all(_popcount(m) % 2 == 0 for m in self.terms)

    @property
    def is_odd(self) -> bool:
        return all(_popcount(m) % 2 == 1 for m in self.terms)

    def max_abs(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def generators_used(self) -> set:
        out = set()
        for m in self.terms:
            out |= {a for a in range(self.alg.n) if m >> a & 1}
        return out

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        t = dict(self.terms)
        for m, c in o.terms.items():
            t[m] = t.get(m, 0j) + c
        return GrassmannElement(self.alg, t)

    __radd__ = __add__

    def __neg__(self):
        return GrassmannElement(self.alg, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, GrassmannElement):
            return grassmann_product(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return GrassmannElement(self.alg, {m: c * other for m, c in self.terms.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * other
        return NotImplemented

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).max_abs() == 0.0

    __hash__ = None

    def close_to(self, other, tol: float = 1e-12) -> bool:
        return (self - other).max_abs() <= tol

    def to_list(self) -> list:
        return [{"subset": [a for a in range(self.alg.n) if m >> a & 1],
                 "re": c.real, "im": c.imag}
                for m, c in sorted(self.terms.items())]

    def to_json(self) -> str:
        return json.dumps(self.to_list())

    @classmethod
    def from_list(cls, alg: GrassmannAlgebra, items) -> "GrassmannElement":
        terms = {}
        for it in items:
            gens = list(it["subset"])
            mask = 0
            for a in gens:
                mask |= 1 << a
            # entries are stored in ascending order; honour any other order given
            sign = 1
            for i, j in itertools.combinations(range(len(gens)), 2):
                if gens[i] > gens[j]:
                    sign = -sign
            terms[mask] = terms.get(mask, 0j) + sign * complex(it["re"], it["im"])
        return cls(alg, terms)


def grassmann_product(x: GrassmannElement, y: GrassmannElement) -> GrassmannElement:
    """Bilinear, associative product with the anticommutation sign rule.

    >>> A = GrassmannAlgebra(2)
    >>> grassmann_product(A.gen(1), A.gen(0)).terms
    {3: (-1+0j)}
    """
    x._check(y)
    out: dict = {}
    for a, ca in x.terms.items():
        for b, cb in y.terms.items():
            if a & b:
                continue
            m = a | b
            out[m] = out.get(m, 0j) + _merge_sign(a, b) * ca * cb
    return GrassmannElement(x.alg, out)


def grassmann_derivative(x: GrassmannElement, gen: int) -> GrassmannElement:
    """Left derivative: move ``theta_gen`` to the front, then delete it."""
    bit = 1 << gen
    below = bit - 1
    out = {}
    for m, c in x.terms.items():
        if m & bit:
            sign = -1 if _popcount(m & below) & 1 else 1
            out[m ^ bit] = sign * c
    return GrassmannElement(x.alg, out)


def berezin_integral(x: GrassmannElement, gens) -> GrassmannElement:
    """``int d theta_{g1} ... d theta_{gk} x``, innermost (last listed) first."""
    for g in reversed(list(gens)):
        x = grassmann_derivative(x, g)
    return x


def grassmann_exp(x: GrassmannElement) -> GrassmannElement:
    """``exp(body) * sum_j nil^j / j!``; the series stops once ``nil^j`` vanishes."""
    body = x.body
    nil = x - body
    out = x.alg.scalar(1.0)
    power = x.alg.scalar(1.0)
    for j in range(1, x.alg.n + 1):
        power = power * nil
        if not power.terms:
            break
        out = out + power * (1.0 / math.factorial(j))
    return out * complex(np.exp(body))


def conjugate(x: GrassmannElement) -> GrassmannElement:
    """Conjugation of the second kind (needs the algebra's conjugation table)."""
    alg = x.alg
    if len(alg.conj) != alg.n:
        raise AlgebraMismatch("algebra has no conjugation table")
    out = alg.zero()
    for m, c in x.terms.items():
        term = alg.scalar(np.conj(c))
        for a in range(alg.n):
            if m >> a & 1:
                k, b = alg.conj[a]
                term = term * (k * alg.gen(b))
        out = out + term
    return out


class SuperMatrixG:
    """Square supermatrix with Grassmann entries, rows/columns ordered
    ``k1`` bosonic then ``2 k2`` fermionic.

    ``pairs`` lists the ``(eta, eta*)`` generator indices that parametrise the
    odd block when the matrix plays the role of the differentiation variable.
    """

    def __init__(self, dims: SuperDims, alg: GrassmannAlgebra, entries, pairs=()):
        n = dims.size
        self.dims = dims
        self.alg = alg
        arr = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                v = entries[i][j]
                arr[i, j] = v if isinstance(v, GrassmannElement) else alg.scalar(v)
        self.entries = arr
        self.pairs = tuple(pairs)

    @classmethod
    def from_numeric(cls, dims: SuperDims, alg: GrassmannAlgebra, M) -> "SuperMatrixG":
        M = np.asarray(M, dtype=complex)
        if M.shape != (dims.size, dims.size):
            raise DimensionMismatch(f"matrix shape {M.shape} does not fit dims {dims}")
        return cls(dims, alg, M.tolist())

    @property
    def boson_block(self):
        k1 = self.dims.k1
        return self.entries[:k1, :k1]

    @property
    def bf_block(self):
        k1 = self.dims.k1
        return self.entries[:k1, k1:]

    @property
    def fb_block(self):
        k1 = self.dims.k1
        return self.entries[k1:, :k1]

    @property
    def fermion_block(self):
        k1 = self.dims.k1
        return self.entries[k1:, k1:]

    def _same(self, other):
        if self.dims != other.dims:
            raise DimensionMismatch(f"dims differ: {self.dims} vs {other.dims}")
        if self.alg is not other.alg:
            raise AlgebraMismatch("supermatrices live in different algebras")

    def __matmul__(self, other: "SuperMatrixG") -> "SuperMatrixG":
        self._same(other)
        n = self.dims.size
        out = [[sum((self.entries[i, k] * other.entries[k, j] for k in range(n)),
                    self.alg.zero()) for j in range(n)] for i in range(n)]
        return SuperMatrixG(self.dims, self.alg, out)

    def __add__(self, other: "SuperMatrixG") -> "SuperMatrixG":
        self._same(other)
        return SuperMatrixG(self.dims, self.alg, (self.entries + other.entries).tolist())

    def supertrace(self) -> GrassmannElement:
        k1, n = self.dims.k1, self.dims.size
        out = self.alg.zero()
        for i in range(n):
            out = out + (self.entries[i, i] if i < k1 else -self.entries[i, i])
        return out

    def body(self) -> np.ndarray:
        return np.array([[e.body for e in row] for row in self.entries], dtype=complex)

    def conjugated_by(self, g) -> "SuperMatrixG":
        """``g M g^-1`` for a numeric block-diagonal body element ``g``."""
        g = np.asarray(g, dtype=complex)
        gi = np.linalg.inv(g)
        G = SuperMatrixG.from_numeric(self.dims, self.alg, g)
        Gi = SuperMatrixG.from_numeric(self.dims, self.alg, gi)
        return G @ self @ Gi

    def membership_residual(self) -> float:
        """Largest violation of the uosp conditions on the four blocks.

        Bosonic block: antisymmetric with imaginary body (``i`` times o(k1)).
        Fermionic block: anti-hermitian and ``X^T J + J X = 0``.
        Odd blocks: ``BF* J = -BF`` and ``FB = BF^dagger``.
        """
        d = self.dims
        worst = 0.0
        bb = self.boson_block
        for i, j in itertools.product(range(d.k1), repeat=2):
            worst = max(worst, (bb[i, j] + bb[j, i]).max_abs(), abs(bb[i, j].body.real))
        if d.k2:
            X = np.array([[e.body for e in row] for row in self.fermion_block])
            J = symplectic_J(d.k2)
            worst = max(worst, float(np.max(np.abs(X + X.conj().T))),
                        float(np.max(np.abs(X.T @ J + J @ X))))
            bf, fb = self.bf_block, self.fb_block
            for i in range(d.k1):
                for q in range(2 * d.k2):
                    lhs = sum((conjugate(bf[i, r]) * J[r, q] for r in range(2 * d.k2)),
                              self.alg.zero())
                    worst = max(worst, (lhs + bf[i, q]).max_abs(),
                                (fb[q, i] - conjugate(bf[i, q])).max_abs())
        return worst


def _odd_names(prefix, dims):
    return [f"{prefix}{i}{q}" for i in range(dims.k1) for q in range(dims.k2)]


def plane_wave_algebra(dims: SuperDims) -> GrassmannAlgebra:
    """Generators ``eta_iq, eta*_iq`` for sigma followed by ``xi_iq, xi*_iq`` for rho."""
    n = 4 * dims.k1 * dims.k2
    if n > MAX_GENERATORS:
        raise CapacityExceeded(f"dims {dims} need {n} generators (limit {MAX_GENERATORS})")
    return GrassmannAlgebra.with_pairs(_odd_names("e", dims) + _odd_names("x", dims))


def even_basis(dims: SuperDims) -> list:
    """Real basis of the even (body) sector in the convention of the Cartan
    embedding: ``i`` times o(k1) generators, then usp(2k2) generators."""
    basis = build_basis(dims)
    k1 = dims.k1
    out = []
    for X in basis.even_gens:
        out.append(1j * X if np.any(X[:k1, :k1]) else X)
    return out


def random_body(dims: SuperDims, rng) -> np.ndarray:
    """Random numeric element of the even sector (real coefficients)."""
    E = even_basis(dims)
    M = np.zeros((dims.size, dims.size), dtype=complex)
    for X in E:
        M += rng.normal() * X
    return M


def random_body_group_element(dims: SuperDims, rng) -> np.ndarray:
    """``exp`` of a random even element: a numeric element of O(k1) x USp(2k2)."""
    from scipy.linalg import expm

    M = random_body(dims, rng)
    k1 = dims.k1
    # undo the factor i on the bosonic block to land in the real orthogonal group
    M[:k1, :k1] = (M[:k1, :k1] / 1j).real
    return expm(M)


def _odd_block(dims, alg, offset, coeffs):
    """BF block with ``BF[i, q] = c eta``, ``BF[i, q + k2] = -conj(c) eta*`` and
    FB = -J BF^T (equivalently FB = BF^dagger)."""
    k1, k2 = dims.k1, dims.k2
    n = dims.size
    E = [[alg.zero() for _ in range(n)] for _ in range(n)]
    pairs = []
    J = symplectic_J(k2)
    for i in range(k1):
        for q in range(k2):
            a = offset + 2 * (i * k2 + q)
            c = coeffs[i, q]
            E[i][k1 + q] = c * alg.gen(a)
            E[i][k1 + q + k2] = -np.conj(c) * alg.gen(a + 1)
            pairs.append((a, a + 1))
    for q in range(2 * k2):
        for i in range(k1):
            acc = alg.zero()
            for r in range(2 * k2):
                if J[q, r] != 0:
                    acc = acc - J[q, r] * E[i][k1 + r]
            E[k1 + q][i] = acc
    return E, pairs


def build_supermatrix(dims: SuperDims, alg: GrassmannAlgebra, body, which: str = "sigma",
                      coeffs=None) -> SuperMatrixG:
    """Body ``body`` plus an odd block on sigma's (``eta``) or rho's (``xi``)
    generators, with coefficients ``coeffs[i, q]`` (default 1)."""
    body = np.asarray(body, dtype=complex)
    if body.shape != (dims.size, dims.size):
        raise DimensionMismatch(f"body shape {body.shape} does not fit dims {dims}")
    offset = {"sigma": 0, "rho": 2 * dims.k1 * dims.k2}[which]
    if coeffs is None:
        coeffs = np.ones((dims.k1, dims.k2), dtype=complex)
    E, pairs = _odd_block(dims, alg, offset, np.asarray(coeffs, dtype=complex))
    n = dims.size
    for i in range(n):
        for j in range(n):
            if body[i, j] != 0:
                E[i][j] = E[i][j] + complex(body[i, j])
    return SuperMatrixG(dims, alg, E, pairs)


def random_configuration(dims: SuperDims, rng, alg: GrassmannAlgebra | None = None):
    """``(sigma, rho)`` with random numeric bodies; rho's odd block has random
    complex coefficients, sigma's odd entries are the bare generators."""
    alg = alg or plane_wave_algebra(dims)
    sigma = build_supermatrix(dims, alg, random_body(dims, rng), "sigma")
    coeffs = rng.normal(size=(dims.k1, dims.k2)) + 1j * rng.normal(size=(dims.k1, dims.k2))
    rho = build_supermatrix(dims, alg, random_body(dims, rng), "rho", coeffs)
    return sigma, rho


def cartan_supermatrix(p: CartanPoint, alg: GrassmannAlgebra) -> SuperMatrixG:
    return SuperMatrixG.from_numeric(p.dims, alg, embed_diag(p))


def plane_wave(sigma: SuperMatrixG, rho: SuperMatrixG) -> GrassmannElement:
    """``exp(i str(sigma rho))``, exact by nilpotency."""
    sigma._same(rho)
    return grassmann_exp(1j * (sigma @ rho).supertrace())


def supertrace_square_g(rho: SuperMatrixG) -> GrassmannElement:
    return (rho @ rho).supertrace()


def even_inverse_metric(dims: SuperDims) -> tuple[list, np.ndarray]:
    """Even basis ``E_t`` and the inverse of ``G_tt' = str(E_t E_t')``."""
    E = even_basis(dims)
    if not E:
        return E, np.zeros((0, 0))
    k1 = dims.k1

    def st(M):
        return np.trace(M[:k1, :k1]) - np.trace(M[k1:, k1:])

    G = np.array([[st(a @ b) for b in E] for a in E])
    if np.max(np.abs(G.imag)) > 1e-12:
        raise AlgebraMismatch("even supertrace metric is not real")
    return E, np.linalg.inv(G.real)


def apply_laplacian_to_plane_wave(sigma: SuperMatrixG, rho: SuperMatrixG) -> tuple:
    """``(Delta pw, pw)`` for ``pw = exp(i str(sigma rho))``.

    Even directions: the exponent is linear in sigma's even coordinates
    ``x_t`` (``sigma = sum_t x_t E_t + odd``), so
    ``d_t d_t' pw = -str(E_t rho) str(E_t' rho) pw``; contracting with the
    inverse supertrace metric gives the invariant Laplacian.  Odd directions:
    ``sum d/d eta d/d eta*`` over sigma's generator pairs, with left derivatives.
    """
    sigma._same(rho)
    d = sigma.dims
    pw = plane_wave(sigma, rho)
    E, Ginv = even_inverse_metric(d)
    k1 = d.k1
    rb = rho.body()
    c = np.array([np.trace((X @ rb)[:k1, :k1]) - np.trace((X @ rb)[k1:, k1:]) for X in E])
    even_factor = -complex(c @ Ginv @ c) if len(E) else 0j
    lap = pw * even_factor
    for a, astar in sigma.pairs:
        lap = lap + grassmann_derivative(grassmann_derivative(pw, astar), a)
    return lap, pw


def laplacian_plane_wave_residual(dims: SuperDims, sigma: SuperMatrixG, rho: SuperMatrixG) -> float:
    """``max|coef(Delta pw + str(rho^2) pw)| / max|coef(pw)|``."""
    if sigma.dims != dims or rho.dims != dims:
        raise DimensionMismatch(f"dims {dims} vs {sigma.dims}, {rho.dims}")
    if sigma.alg.n > MAX_GENERATORS:
        raise CapacityExceeded(f"{sigma.alg.n} generators exceed {MAX_GENERATORS}")
    lap, pw = apply_laplacian_to_plane_wave(sigma, rho)
    resid = lap + supertrace_square_g(rho) * pw
    return resid.max_abs() / pw.max_abs()
