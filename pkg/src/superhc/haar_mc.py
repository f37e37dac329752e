"""Monte-Carlo Haar averages over SO(k) and USp(2k) as an independent oracle
for the closed form at ``k2 = 0`` or ``k1 = 0``.

Sampling is split into fixed-size chunks, each driven by its own Philox
stream spawned from ``SeedSequence(seed)``; chunk sums are merged in chunk
order, so results do not depend on the number of worker threads.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .cartan import CartanPoint, SuperDims, embed_diag, symplectic_J
from .closed_form import chi_normalized, require_regular
from .errors import DimensionMismatch

CHUNK = 100_000
Z_THRESHOLD = 4.0

GROUPS = {
    "so3": SuperDims(3, 0),
    "so4": SuperDims(4, 0),
    "so5": SuperDims(5, 0),
    "usp2": SuperDims(0, 1),
    "usp4": SuperDims(0, 2),
}


@dataclass(frozen=True)
class MCEstimate:
    mean: complex
    stderr: float
    n: int
    seed: int


@dataclass(frozen=True)
class MCReport:
    group: str
    s: dict
    r: dict
    n: int
    seed: int
    mean_re: float
    mean_im: float
    stderr: float
    expected_re: float
    expected_im: float
    z: float
    passed: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


def _generator(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.Generator(np.random.Philox(rng))


def sample_orthogonal(k: int, rng, size: int | None = None) -> np.ndarray:
    """Haar-random element(s) of SO(k).

    Gaussian matrix, QR, columns rescaled so that ``R`` has a positive
    diagonal; the last column is negated where the determinant is ``-1``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = _generator(rng)
    batch = 1 if size is None else size
    A = rng.standard_normal((batch, k, k))
    Q, R = np.linalg.qr(A)
    d = np.sign(np.diagonal(R, axis1=1, axis2=2))
    d[d == 0] = 1.0
    Q = Q * d[:, None, :]
    neg = np.linalg.det(Q) < 0
    Q[neg, :, -1] *= -1
    return Q[0] if size is None else Q


def sample_unitary_symplectic(k2: int, rng, size: int | None = None) -> np.ndarray:
    """Haar-random element(s) of USp(2 k2) preserving ``J = kron(tau1, I)``.

    Quaternionic Gram-Schmidt: column ``x_j`` is drawn complex Gaussian and
    its partner ``y_j = -J conj(x_j)`` (the quaternion ``j``-multiple) is
    generated alongside; each new vector is orthogonalised against all
    previous columns and their partners.  This is QR over the quaternions
    with positive real diagonal, hence Haar.  ``U = [X, Y]`` in column order
    ``(x_1..x_k2, y_1..y_k2)`` satisfies ``U^T J U = J``.
    """
    if k2 < 1:
        raise ValueError("k2 must be >= 1")
    rng = _generator(rng)
    batch = 1 if size is None else size
    n = 2 * k2
    J = symplectic_J(k2)
    G = rng.standard_normal((batch, n, k2)) + 1j * rng.standard_normal((batch, n, k2))
    X = np.zeros((batch, n, k2), dtype=complex)
    Y = np.zeros((batch, n, k2), dtype=complex)
    for j in range(k2):
        v = G[:, :, j]
        for basis in (X[:, :, :j], Y[:, :, :j]):
            if j:
                coef = np.einsum("bik,bi->bk", basis.conj(), v)
                v = v - np.einsum("bik,bk->bi", basis, coef)
        v = v / np.linalg.norm(v, axis=1, keepdims=True)
        X[:, :, j] = v
        Y[:, :, j] = -np.einsum("ij,bj->bi", J, v.conj())
    U = np.concatenate([X, Y], axis=2)
    return U[0] if size is None else U


def _group_kind(dims: SuperDims) -> str:
    if dims.k2 == 0 and dims.k1 >= 1:
        return "so"
    if dims.k1 == 0 and dims.k2 >= 1:
        return "usp"
    raise DimensionMismatch(f"dims {dims} is not an ordinary group (need k1 = 0 or k2 = 0)")


def _chunk_sums(kind, dims, S, R, n, rng):
    """Sums of re, im and their squares for ``n`` samples of the integrand."""
    if kind == "so":
        U = sample_orthogonal(dims.k1, rng, size=n)
        Uinv = np.swapaxes(U, 1, 2)
        sign = 1.0  # str(u^T S u R) is the plain trace for the pure bosonic case
    else:
        U = sample_unitary_symplectic(dims.k2, rng, size=n)
        Uinv = np.conj(np.swapaxes(U, 1, 2))
        sign = -1.0
    M = Uinv @ (S @ U)
    # tr(M R) = sum_il M_il R_li
    vals = sign * np.sum(M * R.T, axis=(1, 2))
    f = np.exp(1j * vals)
    re, im = f.real, f.imag
    return (math.fsum(re), math.fsum(im), math.fsum(re * re), math.fsum(im * im), n)


def _block(M, dims):
    k1 = dims.k1
    return M[:k1, :k1] if dims.k2 == 0 else M[k1:, k1:]


def mc_group_integral(dims: SuperDims, s: CartanPoint, r: CartanPoint, n: int, seed: int,
                      workers: int | None = None) -> MCEstimate:
    """Sample mean of ``exp(i str(u^-1 s u r))`` over ``n`` Haar samples."""
    kind = _group_kind(dims)
    if s.dims != dims or r.dims != dims:
        raise DimensionMismatch(f"dims {dims} vs point dims {s.dims}, {r.dims}")
    if n < 1:
        raise ValueError("n must be positive")
    S = _block(embed_diag(s), dims)
    R = _block(embed_diag(r), dims)
    sizes = [CHUNK] * (n // CHUNK) + ([n % CHUNK] if n % CHUNK else [])
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    rngs = [np.random.Generator(np.random.Philox(ss)) for ss in streams]
    workers = workers or min(len(sizes), os.cpu_count() or 1)
    jobs = list(zip(sizes, rngs))
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda job: _chunk_sums(kind, dims, S, R, job[0], job[1]), jobs))
    else:
        parts = [_chunk_sums(kind, dims, S, R, m, g) for m, g in jobs]
    sre = math.fsum(p[0] for p in parts)
    sim = math.fsum(p[1] for p in parts)
    qre = math.fsum(p[2] for p in parts)
    qim = math.fsum(p[3] for p in parts)
    mean = complex(sre / n, sim / n)
    if n > 1:
        var_re = max(qre - n * mean.real ** 2, 0.0) / (n - 1)
        var_im = max(qim - n * mean.imag ** 2, 0.0) / (n - 1)
        stderr = math.sqrt(max(var_re, var_im) / n)
    else:
        stderr = 0.0
    return MCEstimate(mean, stderr, n, int(seed))


def compare_mc_vs_closed(group: str, s: CartanPoint, r: CartanPoint, n: int, seed: int,
                         workers: int | None = None) -> MCReport:
    """MC estimate against ``chi / calibration_constant`` (ray = r); passes iff z < 4."""
    if group not in GROUPS:
        raise ValueError(f"group must be one of {sorted(GROUPS)}")
    dims = GROUPS[group]
    require_regular(s)
    require_regular(r)
    est = mc_group_integral(dims, s, r, n, seed, workers)
    expected = chi_normalized(s, r)
    diff = abs(est.mean - expected)
    z = diff / est.stderr if est.stderr > 0 else (0.0 if diff < 1e-12 else math.inf)
    return MCReport(group, s.to_dict(), r.to_dict(), n, int(seed), est.mean.real, est.mean.imag,
                    est.stderr, expected.real, expected.imag, float(z), bool(z < Z_THRESHOLD))
