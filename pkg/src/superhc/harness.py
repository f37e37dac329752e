"""Suite orchestration and report emission.

Each suite maps a :class:`SuiteConfig` to a list of case records.  Cases run
in a thread pool and are merged back in submission order, so a report is a
pure function of its configuration (apart from ``wall_time``).
"""
from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import grassmann, haar_mc, radial_check, super_algebra, weyl_sum
from .cartan import CartanPoint, SuperDims, random_regular_point
from .closed_form import berezinian_B, calibration_constant
from .errors import SuperHCError, UnknownSuite

SCHEMA_VERSION = 1
DEFAULT_SEED = 20240601

SUITES = ("harmonic", "eigen", "flat", "berezinian", "grassmann", "mc", "weyl",
          "expansion", "calibration")

SWEEP_DIMS = [(2, 1), (3, 1), (4, 1), (5, 1), (2, 2), (3, 2), (4, 2)]


def _dims_upto(k1max, k2max):
    return [(a, b) for a in range(k1max + 1) for b in range(k2max + 1) if (a, b) != (0, 0)]


DEFAULT_TOL = {
    "harmonic": 1e-7,
    "harmonic_fd": 1e-4,
    "eigen": 1e-6,
    "flat": 1e-10,
    "berezinian": 1e-9,
    "grassmann": 1e-10,
    "mc": haar_mc.Z_THRESHOLD,
    "weyl": 1e-8,
    "expansion": 1e-12,
    "calibration": 1e-5,
}

DEFAULT_DIMS = {
    "harmonic": SWEEP_DIMS,
    "eigen": SWEEP_DIMS,
    "flat": SWEEP_DIMS,
    "berezinian": _dims_upto(5, 2),
    "grassmann": [(1, 1), (2, 1)],
    "mc": [],
    "weyl": [],
    "expansion": _dims_upto(5, 2),
    "calibration": _dims_upto(4, 2),
}

DEFAULT_POINTS = {
    "harmonic": 100, "eigen": 100, "flat": 100, "berezinian": 50, "grassmann": 10,
    "mc": 5, "weyl": 20, "expansion": 50, "calibration": 20,
}

DEFAULT_GROUPS = ["so3", "so4", "so5", "usp2", "usp4"]
DEFAULT_SYSTEMS = [(f, r) for f in ("B", "C", "D") for r in (1, 2, 3)]


def default_seed() -> int:
    env = os.environ.get("SUPERHC_SEED")
    return int(env) if env else DEFAULT_SEED


@dataclass
class SuiteConfig:
    suite: str
    dims: list = field(default_factory=list)
    points: int | None = None
    seed: int = field(default_factory=default_seed)
    tolerances: dict = field(default_factory=dict)
    out: str | None = None
    fmt: str = "json"
    mode: str = "jet"
    groups: list = field(default_factory=list)
    n: int = 1_000_000
    systems: list = field(default_factory=list)
    workers: int | None = None

    def __post_init__(self):
        if self.suite not in SUITES:
            raise UnknownSuite(self.suite)
        self.dims = [d if isinstance(d, SuperDims) else SuperDims(*d) for d in
                     (self.dims or DEFAULT_DIMS[self.suite])]
        if self.points is None:
            self.points = DEFAULT_POINTS[self.suite]
        if self.points < 0:
            raise ValueError("points must be nonnegative")
        tol = dict(DEFAULT_TOL)
        tol.update(self.tolerances)
        if any(v <= 0 for v in tol.values()):
            raise ValueError("tolerances must be positive")
        self.tolerances = tol
        if self.fmt not in ("json", "csv"):
            raise ValueError("format must be json or csv")
        if self.mode not in radial_check.MODES:
            raise ValueError(f"mode must be one of {radial_check.MODES}")
        self.groups = list(self.groups or DEFAULT_GROUPS)
        self.systems = [tuple(s) for s in (self.systems or DEFAULT_SYSTEMS)]

    @property
    def tol(self) -> float:
        if self.suite == "harmonic" and self.mode == "fd":
            return self.tolerances["harmonic_fd"]
        return self.tolerances[self.suite]

    def echo(self) -> dict:
        return {
            "suite": self.suite, "dims": [f"{d.k1},{d.k2}" for d in self.dims],
            "points": self.points, "seed": self.seed, "tol": self.tol, "mode": self.mode,
            "groups": self.groups if self.suite == "mc" else [],
            "n": self.n if self.suite == "mc" else None,
            "systems": [f"{f}{r}" for f, r in self.systems] if self.suite == "weyl" else [],
        }


@dataclass
class Report:
    suite: str
    config: dict
    cases: list
    wall_time: float = 0.0
    schema_version: int = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        """Every case passes (vacuously true for an empty report)."""
        return all(c["pass"] for c in self.cases)

    @property
    def aggregate(self) -> dict:
        res = [c["residual"] for c in self.cases if c["residual"] is not None]
        return {
            "cases": len(self.cases),
            "pass_count": sum(1 for c in self.cases if c["pass"]),
            "max_residual": max(res) if res else None,
            "pass": self.passed,
        }

    def to_dict(self, timing: bool = True) -> dict:
        d = {"schema_version": self.schema_version, "suite": self.suite,
             "config": self.config, "cases": self.cases, "aggregate": self.aggregate}
        if timing:
            d["wall_time"] = self.wall_time
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(d["suite"], d["config"], d["cases"], d.get("wall_time", 0.0),
                   d["schema_version"])


def _case(case_id, dims, inputs, func, tol):
    """Evaluate one case; module errors become failing records."""
    rec = {"case": case_id, "dims": dims, "inputs": inputs}
    try:
        out = func()
    except SuperHCError as exc:
        rec.update(residual=None, error=f"{type(exc).__name__}: {exc}", extra={}, **{"pass": False})
        return rec
    residual, extra = out if isinstance(out, tuple) else (out, {})
    residual = float(residual)
    rec.update(residual=residual, error=None, extra=extra,
               **{"pass": bool(np.isfinite(residual) and residual < tol)})
    return rec


def _rng(seed, *key):
    return np.random.default_rng([seed, *key])


def _point_pairs(cfg, d: SuperDims, count: int):
    rng = _rng(cfg.seed, d.k1, d.k2)
    return [(random_regular_point(d, rng), random_regular_point(d, rng)) for _ in range(count)]


def _dims_label(d: SuperDims) -> str:
    return f"{d.k1},{d.k2}"


def _radial_jobs(cfg):
    jobs = []
    for d in cfg.dims:
        for i, (s, r) in enumerate(_point_pairs(cfg, d, cfg.points)):
            if cfg.suite == "harmonic":
                fn = lambda d=d, s=s: radial_check.harmonic_residual(d, s, cfg.mode)
                inputs = {"s": s.to_dict()}
            elif cfg.suite == "eigen":
                fn = lambda s=s, r=r: radial_check.eigen_residual(s, r, cfg.mode)
                inputs = {"s": s.to_dict(), "r": r.to_dict()}
            else:
                fn = lambda s=s, r=r: radial_check.flat_eigen_residual(s, r, cfg.mode)
                inputs = {"s": s.to_dict(), "r": r.to_dict()}
            jobs.append((f"{_dims_label(d)}#{i}", _dims_label(d), inputs, fn))
    return jobs


def _berezinian_case(p: CartanPoint):
    basis = super_algebra.build_basis(p.dims)
    rd = super_algebra.adjoint_roots(basis, p)
    B2 = berezinian_B(p) ** 2
    ratio = abs(super_algebra.berezinian_from_roots(rd, p))
    return abs(ratio - B2) / B2, {"B": berezinian_B(p),
                                  "catalog_deviation": super_algebra.catalog_deviation(rd, p)}


def _berezinian_jobs(cfg):
    jobs = []
    for d in cfg.dims:
        for i, (s, _) in enumerate(_point_pairs(cfg, d, cfg.points)):
            jobs.append((f"{_dims_label(d)}#{i}", _dims_label(d), {"s": s.to_dict()},
                         lambda s=s: _berezinian_case(s)))
    return jobs


def _grassmann_case(d, seed, i):
    rng = _rng(seed, d.k1, d.k2, i)
    sigma, rho = grassmann.random_configuration(d, rng)
    return grassmann.laplacian_plane_wave_residual(d, sigma, rho), {
        "generators": sigma.alg.n,
        "membership": max(sigma.membership_residual(), rho.membership_residual())}


def _grassmann_jobs(cfg):
    return [(f"{_dims_label(d)}#{i}", _dims_label(d), {"seed": cfg.seed, "index": i},
             lambda d=d, i=i: _grassmann_case(d, cfg.seed, i))
            for d in cfg.dims for i in range(cfg.points)]


def _mc_case(cfg, group, s, r, seed):
    rep = haar_mc.compare_mc_vs_closed(group, s, r, cfg.n, seed)
    d = rep.to_dict()
    return rep.z, {k: d[k] for k in ("mean_re", "mean_im", "stderr", "expected_re",
                                      "expected_im", "z", "n", "seed")}


def _mc_jobs(cfg):
    jobs = []
    for gi, group in enumerate(cfg.groups):
        if group not in haar_mc.GROUPS:
            raise ValueError(f"unknown group {group!r}; choose from {sorted(haar_mc.GROUPS)}")
        d = haar_mc.GROUPS[group]
        rng = _rng(cfg.seed, d.k1, d.k2)
        for i in range(cfg.points):
            s, r = random_regular_point(d, rng), random_regular_point(d, rng)
            seed = int(np.random.SeedSequence([cfg.seed, gi, i]).generate_state(1, np.uint64)[0])
            jobs.append((f"{group}#{i}", _dims_label(d), {"s": s.to_dict(), "r": r.to_dict()},
                         lambda group=group, s=s, r=r, seed=seed: _mc_case(cfg, group, s, r, seed)))
    return jobs


def _weyl_case(cfg, sys):
    d = weyl_sum.closed_form_dims(sys)
    rng = _rng(cfg.seed, ord(sys.family), sys.rank)
    pairs = []
    for _ in range(cfg.points):
        s, r = random_regular_point(d, rng), random_regular_point(d, rng)
        pairs.append((s.coords, r.coords))
    ratios = weyl_sum.proportionality_ratios(sys, pairs)
    mean = complex(np.mean(ratios)) if len(ratios) else 0j
    return weyl_sum.relative_spread(ratios), {"ratio_re": mean.real, "ratio_im": mean.imag}


def _weyl_jobs(cfg):
    jobs = []
    for fam, rank in cfg.systems:
        sys = weyl_sum.RootSystemId(fam, int(rank))
        jobs.append((str(sys), _dims_label(weyl_sum.closed_form_dims(sys)),
                     {"family": fam, "rank": int(rank), "pairs": cfg.points},
                     lambda sys=sys: _weyl_case(cfg, sys)))
    return jobs


def _expansion_case(s, r):
    ex = weyl_sum.expand_determinant_form(s.dims, s, r)
    return weyl_sum.expansion_residual(s, r), {
        "terms": ex.term_count,
        "residual_double": weyl_sum.expansion_residual(s, r, dps=None),
        "conditioning": weyl_sum.expansion_conditioning(s, r)}


def _expansion_jobs(cfg):
    jobs = []
    for d in cfg.dims:
        for i, (s, r) in enumerate(_point_pairs(cfg, d, cfg.points)):
            jobs.append((f"{_dims_label(d)}#{i}", _dims_label(d),
                         {"s": s.to_dict(), "r": r.to_dict()},
                         lambda s=s, r=r: _expansion_case(s, r)))
    return jobs


def _calibration_case(cfg, d):
    values = [calibration_constant(d, s, ray) for s, ray in _point_pairs(cfg, d, cfg.points)]
    mean = complex(np.mean(values)) if values else 0j
    return weyl_sum.relative_spread(values), {"constant_re": mean.real, "constant_im": mean.imag}


def _calibration_jobs(cfg):
    return [(_dims_label(d), _dims_label(d), {"draws": cfg.points},
             lambda d=d: _calibration_case(cfg, d)) for d in cfg.dims]


_JOBS = {
    "harmonic": _radial_jobs, "eigen": _radial_jobs, "flat": _radial_jobs,
    "berezinian": _berezinian_jobs, "grassmann": _grassmann_jobs, "mc": _mc_jobs,
    "weyl": _weyl_jobs, "expansion": _expansion_jobs, "calibration": _calibration_jobs,
}


def run_suite(cfg: SuiteConfig) -> Report:
    if cfg.suite not in _JOBS:
        raise UnknownSuite(cfg.suite)
    t0 = time.perf_counter()
    jobs = _JOBS[cfg.suite](cfg)
    tol = cfg.tol
    run = lambda job: _case(job[0], job[1], job[2], job[3], tol)
    # MC cases already fan out over threads internally
    workers = 1 if cfg.suite == "mc" else (cfg.workers or min(8, os.cpu_count() or 1))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers) as ex:
            cases = list(ex.map(run, jobs))
    else:
        cases = [run(j) for j in jobs]
    return Report(cfg.suite, cfg.echo(), cases, time.perf_counter() - t0)


def run_all(seed: int | None = None, **overrides) -> list[Report]:
    seed = default_seed() if seed is None else seed
    return [run_suite(SuiteConfig(s, seed=seed, **overrides)) for s in SUITES]


CSV_HEADER = ["suite", "dims", "case", "residual", "pass"]


def emit_report(rep: Report, path, fmt: str = "json"):
    """Write ``rep`` as full JSON or as flat CSV rows (one per case)."""
    if fmt == "json":
        with open(path, "w") as fh:
            json.dump(rep.to_dict(), fh, sort_keys=True, indent=2)
            fh.write("\n")
    elif fmt == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for c in rep.cases:
                w.writerow([rep.suite, c["dims"], c["case"],
                            "" if c["residual"] is None else repr(c["residual"]),
                            str(c["pass"]).lower()])
    else:
        raise ValueError("format must be json or csv")


def report_json(rep: Report, timing: bool = True) -> str:
    return json.dumps(rep.to_dict(timing), sort_keys=True, indent=2)
