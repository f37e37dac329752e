"""Cartan-subalgebra points of uosp(k1/2k2) and their matrix embedding.

A point carries ``m = k1 // 2`` bosonic coordinates ``b`` and ``k2``
fermionic coordinates ``f``.  The embedding places ``i*b_p*tau1`` blocks on
the bosonic diagonal (plus a trailing zero for odd ``k1``) and
``diag(i*f, -i*f)`` on the fermionic diagonal.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch

EPS_REG = 1e-8

TAU1 = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class SuperDims:
    k1: int
    k2: int

    def __post_init__(self):
        for name in ("k1", "k2"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 0:
                raise ValueError(f"{name} must be a nonnegative integer, got {v!r}")
        object.__setattr__(self, "k1", int(self.k1))
        object.__setattr__(self, "k2", int(self.k2))

    @property
    def m(self) -> int:
        return self.k1 // 2

    @property
    def odd(self) -> bool:
        return self.k1 % 2 == 1

    @property
    def parity(self) -> str:
        return "odd" if self.odd else "even"

    @property
    def size(self) -> int:
        return self.k1 + 2 * self.k2

    @property
    def rank(self) -> int:
        """Number of radial coordinates, ``m + k2``."""
        return self.m + self.k2

    @classmethod
    def parse(cls, text: str) -> "SuperDims":
        k1, k2 = (int(t) for t in text.replace(" ", "").split(","))
        return cls(k1, k2)

    def __str__(self):
        return f"({self.k1},{self.k2})"


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CartanPoint:
    dims: SuperDims
    b: np.ndarray = field(default_factory=lambda: _frozen([]))
    f: np.ndarray = field(default_factory=lambda: _frozen([]))

    def __post_init__(self):
        object.__setattr__(self, "b", _frozen(self.b))
        object.__setattr__(self, "f", _frozen(self.f))
        if len(self.b) != self.dims.m or len(self.f) != self.dims.k2:
            raise DimensionMismatch(
                f"dims {self.dims} need {self.dims.m} bosonic and {self.dims.k2} "
                f"fermionic coordinates, got {len(self.b)} and {len(self.f)}")

    def __eq__(self, other):
        if not isinstance(other, CartanPoint):
            return NotImplemented
        return (self.dims == other.dims and np.array_equal(self.b, other.b)
                and np.array_equal(self.f, other.f))

    __hash__ = None

    @property
    def coords(self) -> np.ndarray:
        """Bosonic then fermionic coordinates as one vector."""
        return np.concatenate([self.b, self.f])

    def with_coords(self, x) -> "CartanPoint":
        x = np.asarray(x, dtype=float)
        m = self.dims.m
        return CartanPoint(self.dims, x[:m], x[m:])

    def scaled(self, eps: float) -> "CartanPoint":
        return CartanPoint(self.dims, eps * self.b, eps * self.f)

    def is_regular(self, eps_reg: float = EPS_REG) -> bool:
        return not singular_reasons(self, eps_reg)

    def to_dict(self) -> dict:
        return {"k1": self.dims.k1, "k2": self.dims.k2,
                "b": self.b.tolist(), "f": self.f.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "CartanPoint":
        return make_cartan_point(SuperDims(d["k1"], d["k2"]), d["b"], d["f"])

    @classmethod
    def from_json(cls, text: str) -> "CartanPoint":
        return cls.from_dict(json.loads(text))


def make_cartan_point(dims: SuperDims, b=(), f=()) -> CartanPoint:
    """Validated constructor; regularity is *not* required."""
    return CartanPoint(dims, b, f)


def singular_reasons(p: CartanPoint, eps_reg: float = EPS_REG) -> list[str]:
    """Why ``p`` is not regular (empty list when it is)."""
    out = []
    for name, x in (("b", p.b), ("f", p.f)):
        ax = np.abs(x)
        for i in range(len(ax)):
            for j in range(i + 1, len(ax)):
                if abs(ax[i] - ax[j]) <= eps_reg:
                    out.append(f"|{name}[{i}]| ~ |{name}[{j}]|")
    must_be_nonzero = ("b", p.b) if p.dims.odd else ("f", p.f)
    name, x = must_be_nonzero
    for i, v in enumerate(x):
        if abs(v) <= eps_reg:
            out.append(f"{name}[{i}] ~ 0")
    return out


def regularize(p: CartanPoint, eps_reg: float = EPS_REG) -> CartanPoint:
    """Nudge ``p`` to a nearby regular point.

    Offending coordinates are pushed to a separation of ``10 * eps_reg`` from
    zero or from the neighbouring modulus; already regular points are
    returned unchanged.
    """
    if p.is_regular(eps_reg):
        return p
    gap = 10 * eps_reg

    def fix(x, nonzero):
        x = np.array(x, dtype=float)
        sign = np.where(x < 0, -1.0, 1.0)
        mod = np.abs(x)
        order = np.argsort(mod, kind="stable")
        floor = gap if nonzero else -np.inf
        for idx in order:
            if mod[idx] < floor:
                mod[idx] = floor
            floor = mod[idx] + gap
        return sign * mod

    b = fix(p.b, p.dims.odd)
    f = fix(p.f, not p.dims.odd)
    return CartanPoint(p.dims, b, f)


def random_regular_point(dims: SuperDims, rng: np.random.Generator,
                         low: float = -2.0, high: float = 2.0,
                         sep: float = 1e-2) -> CartanPoint:
    """Uniform draw from ``[low, high]`` per coordinate, redrawn until regular
    with separation ``sep``."""
    while True:
        x = rng.uniform(low, high, size=dims.rank)
        p = CartanPoint(dims, x[:dims.m], x[dims.m:])
        if p.is_regular(sep):
            return p


def metric_L(dims: SuperDims) -> np.ndarray:
    """Graded metric ``diag(1_k1, J)`` with ``J = tau1 (x) 1_k2``."""
    L = np.zeros((dims.size, dims.size))
    L[:dims.k1, :dims.k1] = np.eye(dims.k1)
    L[dims.k1:, dims.k1:] = symplectic_J(dims.k2)
    return L


def symplectic_J(k2: int) -> np.ndarray:
    return np.kron(TAU1, np.eye(k2))


def embed_diag(p: CartanPoint) -> np.ndarray:
    """Diagonal supermatrix of the Cartan point (complex, size k1 + 2 k2)."""
    d = p.dims
    M = np.zeros((d.size, d.size), dtype=complex)
    for i, s in enumerate(p.b):
        M[2 * i:2 * i + 2, 2 * i:2 * i + 2] = 1j * s * TAU1
    n = d.k1
    for q, s in enumerate(p.f):
        M[n + q, n + q] = 1j * s
        M[n + d.k2 + q, n + d.k2 + q] = -1j * s
    return M


def supertrace(M: np.ndarray, dims: SuperDims):
    """Bosonic-block trace minus fermionic-block trace."""
    k1 = dims.k1
    return np.trace(M[:k1, :k1]) - np.trace(M[k1:, k1:])


def supertrace_square(p: CartanPoint) -> float:
    """``str(s^2) = 2 (sum b^2 + sum f^2)``."""
    return 2.0 * (float(np.dot(p.b, p.b)) + float(np.dot(p.f, p.f)))
