"""Weyl-group sums for the classical root systems and the exponential
expansion of the closed-form determinants.

Weyl groups of types B, C and D act on ``R^n`` by signed permutations
``(w x)_i = eps_i * x[perm[i]]``; type A by plain permutations.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .cartan import CartanPoint, SuperDims
from .closed_form import chi_closed_form, omega, omega_expr, require_regular
from .errors import DimensionMismatch, RankTooLarge, SingularPoint

MAX_RANK = 6
# working precision for the expansion identity (see expansion_residual)
EXPANSION_DPS = 40
FAMILIES = ("A", "B", "C", "D")


@dataclass(frozen=True)
class SignedPermutation:
    perm: tuple
    signs: tuple

    def __post_init__(self):
        n = len(self.perm)
        if sorted(self.perm) != list(range(n)):
            raise ValueError(f"not a permutation: {self.perm}")
        if len(self.signs) != n or any(s not in (1, -1) for s in self.signs):
            raise ValueError(f"bad signs: {self.signs}")

    def act(self, x) -> np.ndarray:
        x = np.asarray(x)
        return np.array([s * x[p] for p, s in zip(self.perm, self.signs)])

    @property
    def parity(self) -> int:
        """Determinant of the signed permutation matrix."""
        return permutation_sign(self.perm) * math.prod(self.signs)

    @property
    def n_negative(self) -> int:
        return sum(1 for s in self.signs if s < 0)


def permutation_sign(perm) -> int:
    sign, seen = 1, [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class RootSystemId:
    family: str
    rank: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.rank < 1:
            raise ValueError("rank must be >= 1")

    @property
    def n(self) -> int:
        """Length of the coordinate vector (rank + 1 for type A)."""
        return self.rank + 1 if self.family == "A" else self.rank

    def __str__(self):
        return f"{self.family}{self.rank}"


def _check_len(sys: RootSystemId, a):
    if len(a) != sys.n:
        raise DimensionMismatch(f"{sys} needs {sys.n} coordinates, got {len(a)}")


def positive_root_product(sys: RootSystemId, a) -> float:
    a = np.asarray(a, dtype=float)
    _check_len(sys, a)
    out = 1.0
    for p, q in itertools.combinations(range(len(a)), 2):
        out *= a[p] - a[q]
        if sys.family != "A":
            out *= a[p] + a[q]
    if sys.family == "B":
        out *= float(np.prod(a))
    elif sys.family == "C":
        out *= float(np.prod(2 * a))
    return out


def enumerate_weyl_group(sys: RootSystemId) -> list[SignedPermutation]:
    """All elements, in a fixed order (permutations outer, signs inner)."""
    if sys.rank > MAX_RANK:
        raise RankTooLarge(f"rank {sys.rank} exceeds {MAX_RANK}")
    n = sys.n
    perms = list(itertools.permutations(range(n)))
    if sys.family == "A":
        return [SignedPermutation(p, (1,) * n) for p in perms]
    out = []
    for p in perms:
        for signs in itertools.product((1, -1), repeat=n):
            if sys.family == "D" and signs.count(-1) % 2:
                continue
            out.append(SignedPermutation(p, signs))
    return out


def weyl_group_order(sys: RootSystemId) -> int:
    n = sys.n
    if sys.family == "A":
        return math.factorial(n)
    if sys.family == "D":
        return 2 ** (n - 1) * math.factorial(n)
    return 2 ** n * math.factorial(n)


def hc_weyl_sum(sys: RootSystemId, a, b, phase: str = "i") -> complex:
    """``(1/|W|) sum_w exp(c <w a, b>) / (Pi(a) Pi(w b))``.

    ``phase="i"`` uses ``c = 2i``, the convention under which the sum lines up
    with the closed forms; ``phase="plain"`` uses ``c = 1``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _check_len(sys, a)
    _check_len(sys, b)
    c = {"i": 2j, "plain": 1.0}[phase]
    pa = positive_root_product(sys, a)
    if pa == 0 or positive_root_product(sys, b) == 0:
        raise SingularPoint(f"{sys}: vanishing positive-root product")
    group = enumerate_weyl_group(sys)
    total = 0j
    for w in group:
        wa = w.act(a)
        total += cmath.exp(c * float(np.dot(wa, b))) / (pa * positive_root_product(sys, w.act(b)))
    return total / len(group)


def closed_form_dims(sys: RootSystemId) -> SuperDims:
    """Ordinary group whose closed form corresponds to ``sys``."""
    return {"B": SuperDims(2 * sys.rank + 1, 0), "C": SuperDims(0, sys.rank),
            "D": SuperDims(2 * sys.rank, 0)}[sys.family]


def cartan_point_for(sys: RootSystemId, x) -> CartanPoint:
    d = closed_form_dims(sys)
    x = np.asarray(x, dtype=float)
    return CartanPoint(d, x, []) if d.k2 == 0 else CartanPoint(d, [], x)


@dataclass
class DeterminantExpansion:
    terms: list  # (coefficient, exponent value); term = c * exp(2i * value)
    value: complex
    elements: list = field(default_factory=list)  # (boson w, fermion w) per term

    @property
    def term_count(self) -> int:
        return len(self.terms)


def _sector_terms(n, coeff):
    """Signed permutations of ``n`` slots with their coefficients."""
    out = []
    for perm in itertools.permutations(range(n)):
        sgn = permutation_sign(perm)
        for signs in itertools.product((1, -1), repeat=n):
            c = coeff(signs)
            if c == 0:
                continue
            out.append((SignedPermutation(perm, signs), sgn * c))
    return out


def _dot(x, y, mp):
    if mp:
        return mpmath.fsum(mpmath.mpf(float(a)) * mpmath.mpf(float(b)) for a, b in zip(x, y))
    return float(np.dot(x, y)) if len(x) else 0.0


def expand_determinant_form(dims: SuperDims, s: CartanPoint, r: CartanPoint,
                            dps: int | None = None) -> DeterminantExpansion:
    """Rewrite ``omega(s, r)`` as a sum of plane waves ``c_w exp(2i <w s, r>)``.

    Per slot: ``i sin x = (e^{ix} - e^{-ix})/2``, ``cos x = (e^{ix} + e^{-ix})/2``,
    ``2 cos x = e^{ix} + e^{-ix}``, ``-2i sin x = -(e^{ix} - e^{-ix})``.  For even
    ``k1`` the cos and i*sin determinants combine into the even-sign-change
    (type D) sum.  Terms come out one per super-Weyl element; the implied
    group order is the term count.  With ``dps`` set, exponents and the sum
    are carried in mpmath at that many digits and ``value`` is rounded at
    the end.
    """
    if s.dims != dims or r.dims != dims:
        raise DimensionMismatch(f"dims {dims} vs {s.dims}, {r.dims}")
    m, k2 = dims.m, dims.k2
    if dims.odd:
        bos = _sector_terms(m, lambda e: math.prod(e) / 2 ** m)
        fer = _sector_terms(k2, lambda e: 1.0)
    else:
        # det[cos] + det[i sin]: (1 + prod eps) / 2^m
        bos = _sector_terms(m, lambda e: (1 + math.prod(e)) / 2 ** m)
        fer = _sector_terms(k2, lambda e: math.prod(-x for x in e))
    mp = dps is not None
    ctx = mpmath.workdps(dps) if mp else _nullctx()
    with ctx:
        pref = (mpmath.mpf(1) if mp else 1.0) / (math.factorial(m) * math.factorial(k2))
        terms, elements, parts = [], [], []
        for wb, cb in bos:
            xb = _dot(wb.act(s.b), r.b, mp)
            for wf, cf in fer:
                x = xb + _dot(wf.act(s.f), r.f, mp)
                c = pref * cb * cf
                terms.append((complex(c), float(x)))
                elements.append((wb, wf))
                parts.append(c * (mpmath.expj(2 * x) if mp else cmath.exp(2j * x)))
        total = complex(mpmath.fsum(parts)) if mp else complex(sum(parts))
    return DeterminantExpansion(terms, total, elements)


class _nullctx:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def omega_mp(s: CartanPoint, r: CartanPoint, dps: int = EXPANSION_DPS) -> complex:
    """The determinant form evaluated at ``dps`` digits, rounded to complex."""
    with mpmath.workdps(dps):
        conv = lambda xs: [mpmath.mpf(float(v)) for v in xs]
        return complex(omega_expr(s.dims, conv(s.b), conv(s.f), conv(r.b), conv(r.f)))


def expansion_residual(s: CartanPoint, r: CartanPoint, dps: int | None = EXPANSION_DPS) -> float:
    """Relative difference between the expanded sum and ``omega``.

    Both sides are cancellation-prone: at small ``|omega|`` the sum of term
    moduli exceeds ``|omega|`` by factors up to ~1e5, so double precision
    floors near ``1e-16 * kappa``.  By default both sides are therefore
    evaluated with ``dps`` significant digits; ``dps=None`` compares the
    double-precision evaluations.
    """
    if s.dims != r.dims:
        raise DimensionMismatch(f"dims differ: {s.dims} vs {r.dims}")
    ex = expand_determinant_form(s.dims, s, r, dps)
    w = omega(s, r) if dps is None else omega_mp(s, r, dps)
    return abs(ex.value - w) / max(abs(w), 1e-300)


def expansion_conditioning(s: CartanPoint, r: CartanPoint) -> float:
    """``sum |c_w| / |omega|``, the amplification of rounding in either form."""
    ex = expand_determinant_form(s.dims, s, r)
    return sum(abs(c) for c, _ in ex.terms) / max(abs(omega(s, r)), 1e-300)


def proportionality_ratios(sys: RootSystemId, pairs) -> np.ndarray:
    """``hc_weyl_sum / chi_closed_form`` over ``(a, b)`` pairs."""
    out = []
    for a, b in pairs:
        s, r = cartan_point_for(sys, a), cartan_point_for(sys, b)
        require_regular(s)
        require_regular(r)
        out.append(hc_weyl_sum(sys, a, b, "i") / chi_closed_form(s, r).value)
    return np.array(out)


def relative_spread(values) -> float:
    """Largest deviation from the mean, relative to the mean's modulus."""
    v = np.asarray(values, dtype=complex)
    if v.size == 0:
        return 0.0
    ref = np.mean(v)
    if ref == 0:
        return float("inf") if np.any(v != 0) else float("nan")
    return float(np.max(np.abs(v - ref)) / abs(ref))
