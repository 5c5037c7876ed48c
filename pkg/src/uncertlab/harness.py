"""Verification harness: named check suites over configured state families,
deterministic machine-readable reports.

A run configuration is a versioned JSON document (``"schema": 1``). The
``tolerances`` map doubles as the check-enablement list: a check runs iff
its id has a tolerance entry.  Checks whose semantics are "at least"
(the uncertainty product) pass when value >= threshold; all residual
checks pass when value <= threshold.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import dsl
from .grids import GridSpec, build_grid
from .ncalg import NCPoly, build_paper_ops, commutator, hbar_over_i, sum_over_axes
from .operators import apply as op_apply
from .states import MOMENTUM, StateSpec, WaveFunction, synthesize_state
from .stats import residual, uncertainty_check
from .evolution import (
    asymptotic_scan,
    closed_form_velocity,
    energy_sq_residual,
    propagate_free,
    velocity_residual,
)

SUITES = ("commutators", "uncertainty", "asymptotics", "symbolic", "dsl")

# checks that pass when value >= threshold instead of <=
GEQ_CHECKS = {"uncertainty_product"}


class ConfigError(ValueError):
    """Invalid run configuration or report I/O problem (CLI exit code 2)."""


@dataclass(frozen=True)
class CheckReport:
    suite: str
    check: str
    state: str
    params: dict
    value: float
    threshold: float
    passed: bool
    wall_ms: float

    def to_json_obj(self, timings: bool = True) -> dict:
        obj = {
            "suite": self.suite,
            "check": self.check,
            "state": self.state,
            "params": self.params,
            "value": self.value,
            "threshold": self.threshold,
            "pass": self.passed,
        }
        if timings:
            obj["wall_ms"] = self.wall_ms
        return obj

    def to_csv_row(self) -> str:
        t = self.params.get("t")
        j = self.params.get("j")
        return (f"{self.suite},{self.check},{self.state},"
                f"{'' if t is None else repr(t)},{'' if j is None else j},"
                f"{self.value!r},{self.threshold!r},{str(self.passed).lower()}")


@dataclass(frozen=True)
class RunConfig:
    grid: GridSpec
    states: tuple[StateSpec, ...]
    t_values: tuple[float, ...]
    mass: float
    tolerances: dict[str, float]
    suites: tuple[str, ...]
    asymptotics_t: tuple[float, ...] = (0.25, 0.5, 1.0)
    compliance_p_min: float = 0.5
    compliance_edge_tol: float = 1e-4
    dsl_seed: int = 20230907

    @staticmethod
    def from_json(obj: dict | str) -> "RunConfig":
        if isinstance(obj, str):
            try:
                obj = json.loads(obj)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        if obj.get("schema") != 1:
            raise ConfigError(f"unsupported config schema {obj.get('schema')!r}")
        try:
            g = obj["grid"]
            grid = build_grid(g["n"], g["L"], g.get("hbar", 1.0))
            states = tuple(StateSpec.from_json(s) for s in obj["states"])
            t_values = tuple(float(t) for t in obj["t_values"])
            mass = float(obj.get("mass", 1.0))
            tolerances = {str(k): float(v) for k, v in obj["tolerances"].items()}
            suites = tuple(obj.get("suites", list(SUITES)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad config field: {exc}") from exc
        if not states:
            raise ConfigError("no states configured")
        if any(t == 0 for t in t_values):
            raise ConfigError("t_values must be nonzero")
        if not t_values:
            raise ConfigError("no t_values configured")
        if mass <= 0:
            raise ConfigError("mass must be positive")
        for s in suites:
            if s not in SUITES and s != "all":
                raise ConfigError(f"unknown suite {s!r}")
        asym = tuple(float(t) for t in obj.get("asymptotics_t", (0.25, 0.5, 1.0)))
        return RunConfig(
            grid=grid,
            states=states,
            t_values=t_values,
            mass=mass,
            tolerances=tolerances,
            suites=suites,
            asymptotics_t=asym,
            compliance_p_min=float(obj.get("compliance_p_min", 0.5)),
            compliance_edge_tol=float(obj.get("compliance_edge_tol", 1e-4)),
            dsl_seed=int(obj.get("dsl_seed", 20230907)),
        )

    @staticmethod
    def load(path: str) -> "RunConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                return RunConfig.from_json(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc


class _Runner:
    def __init__(self, config: RunConfig):
        self.cfg = config
        self._states: dict[str, WaveFunction] = {}

    def state(self, spec: StateSpec) -> WaveFunction:
        label = spec.label()
        if label not in self._states:
            self._states[label] = synthesize_state(self.cfg.grid, spec)
        return self._states[label]

    def enabled(self, check: str) -> bool:
        return check in self.cfg.tolerances

    def report(self, out: list, suite: str, check: str, state: str, params: dict,
               value: float, started: float, threshold: Optional[float] = None) -> None:
        thr = self.cfg.tolerances[check] if threshold is None else threshold
        passed = value >= thr if check in GEQ_CHECKS else value <= thr
        out.append(CheckReport(
            suite=suite, check=check, state=state, params=params,
            value=float(value), threshold=float(thr), passed=bool(passed),
            wall_ms=(time.perf_counter() - started) * 1e3,
        ))

    # -- suites ---------------------------------------------------------------

    def run_commutators(self) -> list[CheckReport]:
        out: list[CheckReport] = []
        cfg = self.cfg
        for spec in cfg.states:
            f = self.state(spec)
            label = spec.label()
            if self.enabled("eq9_x_absp"):
                for j in (1, 2, 3):
                    t0 = time.perf_counter()
                    r = residual("eq9_x_absp", f, 1.0, j=j,
                                 compliance_edge_tol=cfg.compliance_edge_tol)
                    self.report(out, "commutators", "eq9_x_absp", label,
                                {"t": None, "j": j, "m": cfg.mass}, r.value, t0)
            for t in cfg.t_values:
                if self.enabled("component_commutator"):
                    for j in (1, 2, 3):
                        t0 = time.perf_counter()
                        r = residual("component_commutator", f, t, j=j,
                                     compliance_edge_tol=cfg.compliance_edge_tol)
                        self.report(out, "commutators", "component_commutator", label,
                                    {"t": t, "j": j, "m": cfg.mass}, r.value, t0)
                if self.enabled("sum_commutator"):
                    t0 = time.perf_counter()
                    r = residual("sum_commutator", f, t,
                                 compliance_edge_tol=cfg.compliance_edge_tol)
                    self.report(out, "commutators", "sum_commutator", label,
                                {"t": t, "j": None, "m": cfg.mass}, r.value, t0)
        return out

    def run_uncertainty(self) -> list[CheckReport]:
        out: list[CheckReport] = []
        cfg = self.cfg
        for spec in cfg.states:
            f = self.state(spec)
            label = spec.label()
            products = []
            for t in cfg.t_values:
                if self.enabled("uncertainty_product"):
                    t0 = time.perf_counter()
                    u = uncertainty_check(f, t, tol=cfg.tolerances["uncertainty_product"],
                                          compliance_edge_tol=cfg.compliance_edge_tol)
                    products.append(u.product)
                    thr = u.bound * (1.0 - cfg.tolerances["uncertainty_product"])
                    self.report(out, "uncertainty", "uncertainty_product", label,
                                {"t": t, "j": None, "m": cfg.mass}, u.product, t0,
                                threshold=thr)
                for check in ("eq5_time_norm", "schwarz_chain"):
                    if self.enabled(check):
                        t0 = time.perf_counter()
                        r = residual(check, f, t,
                                     compliance_edge_tol=cfg.compliance_edge_tol)
                        self.report(out, "uncertainty", check, label,
                                    {"t": t, "j": None, "m": cfg.mass}, r.value, t0)
            if self.enabled("product_t_invariance") and len(products) >= 2:
                t0 = time.perf_counter()
                spread = max(products) - min(products)
                self.report(out, "uncertainty", "product_t_invariance", label,
                            {"t": None, "j": None, "m": cfg.mass}, spread, t0)
        return out

    def run_asymptotics(self) -> list[CheckReport]:
        out: list[CheckReport] = []
        cfg = self.cfg
        for spec in cfg.states:
            f = self.state(spec)
            label = spec.label()
            scan = asymptotic_scan(f, cfg.asymptotics_t, cfg.mass)
            if self.enabled("velocity_closed_form"):
                for row in scan.rows:
                    for j in (1, 2, 3):
                        t0 = time.perf_counter()
                        rel = (abs(row.velocity_residual[j - 1] - row.closed_form_velocity[j - 1])
                               / row.closed_form_velocity[j - 1])
                        self.report(out, "asymptotics", "velocity_closed_form", label,
                                    {"t": row.t, "j": j, "m": cfg.mass}, rel, t0)
            if self.enabled("energy_monotone") and len(scan.rows) >= 2:
                t0 = time.perf_counter()
                worst = 0.0
                for a, b in zip(scan.rows, scan.rows[1:]):
                    worst = max(worst, (b.energy_sq_residual - a.energy_sq_residual)
                                / a.energy_sq_residual)
                self.report(out, "asymptotics", "energy_monotone", label,
                            {"t": None, "j": None, "m": cfg.mass}, max(0.0, worst), t0)
            if self.enabled("energy_slope_dev") and scan.slope is not None:
                t0 = time.perf_counter()
                self.report(out, "asymptotics", "energy_slope_dev", label,
                            {"t": None, "j": None, "m": cfg.mass},
                            abs(scan.slope - (-1.0)), t0)
            if self.enabled("time_reversal_mirror"):
                t0 = time.perf_counter()
                conj = WaveFunction(f.grid, MOMENTUM,
                                    np.conj(f.to_rep(MOMENTUM).amp))
                worst = 0.0
                for t in cfg.asymptotics_t:
                    e_pos = energy_sq_residual(f, t, cfg.mass)
                    e_neg = energy_sq_residual(conj, -t, cfg.mass)
                    worst = max(worst, abs(e_pos - e_neg) / e_pos)
                self.report(out, "asymptotics", "time_reversal_mirror", label,
                            {"t": None, "j": None, "m": cfg.mass}, worst, t0)
        return out

    def run_symbolic(self) -> list[CheckReport]:
        out: list[CheckReport] = []
        if self.enabled("sum_commutator_exact"):
            t0 = time.perf_counter()
            total = sum_over_axes(lambda j: commutator(*build_paper_ops(j)))
            ok = total == hbar_over_i()
            self.report(out, "symbolic", "sum_commutator_exact", "-",
                        {"t": None, "j": None, "m": None}, 0.0 if ok else 1.0, t0)
        if self.enabled("component_commutator_exact"):
            for j in (1, 2, 3):
                t0 = time.perf_counter()
                tj, ej = build_paper_ops(j)
                four = NCPoly.scalar(4) * commutator(tj, ej)
                target = (NCPoly.scalar(2) * hbar_over_i()
                          + NCPoly.scalar(0, 2, hbar_pow=1) * NCPoly.p(j) * NCPoly.p(j)
                          * NCPoly.r(-2))
                ok = four == target
                self.report(out, "symbolic", "component_commutator_exact", "-",
                            {"t": None, "j": j, "m": None}, 0.0 if ok else 1.0, t0)
        if self.enabled("paper_ops_dsl_match"):
            texts = {
                1: ("t * p1 * |p|^-1", "1/4 * t^-1 * (|p|*x1 + x1*|p|)"),
                2: ("t * p2 * |p|^-1", "1/4 * t^-1 * (|p|*x2 + x2*|p|)"),
                3: ("t * p3 * |p|^-1", "1/4 * t^-1 * (|p|*x3 + x3*|p|)"),
            }
            for j in (1, 2, 3):
                t0 = time.perf_counter()
                tj, ej = build_paper_ops(j)
                ok = (dsl.lower(dsl.parse(texts[j][0])) == tj
                      and dsl.lower(dsl.parse(texts[j][1])) == ej)
                self.report(out, "symbolic", "paper_ops_dsl_match", "-",
                            {"t": None, "j": j, "m": None}, 0.0 if ok else 1.0, t0)
        return out

    def run_dsl(self) -> list[CheckReport]:
        out: list[CheckReport] = []
        cfg = self.cfg
        rng = random.Random(cfg.dsl_seed)
        if self.enabled("dsl_roundtrip"):
            t0 = time.perf_counter()
            failures = 0
            for _ in range(500):
                ast = _random_ast(rng, rng.randrange(0, 6))
                if dsl.parse(dsl.format_ast(ast)) != ast:
                    failures += 1
            self.report(out, "dsl", "dsl_roundtrip", "-",
                        {"t": None, "j": None, "m": None}, float(failures), t0)
        if self.enabled("dsl_semantic_coherence"):
            t0 = time.perf_counter()
            f = self.state(cfg.states[0])
            t_value = 2.0
            worst = 0.0
            for _ in range(50):
                ast = _random_ast(rng, rng.randrange(0, 5), numeric_safe=True)
                direct = op_apply(dsl.compile_ast(ast, cfg.grid, t_value), f)
                canon = dsl.poly_to_ast(dsl.lower(ast))
                via = op_apply(dsl.compile_ast(canon, cfg.grid, t_value), f)
                scale = max(direct.norm(), via.norm())
                if scale > 1e-12:
                    worst = max(worst, (direct - via).norm() / scale)
            self.report(out, "dsl", "dsl_semantic_coherence", cfg.states[0].label(),
                        {"t": t_value, "j": None, "m": None}, worst, t0)
        return out

    def run(self, suite: str) -> list[CheckReport]:
        if suite == "all":
            out = []
            for s in SUITES:
                out.extend(self.run(s))
            return out
        if suite == "commutators":
            return self.run_commutators()
        if suite == "uncertainty":
            return self.run_uncertainty()
        if suite == "asymptotics":
            return self.run_asymptotics()
        if suite == "symbolic":
            return self.run_symbolic()
        if suite == "dsl":
            return self.run_dsl()
        raise ConfigError(f"unknown suite {suite!r}")


def _random_ast(rng: random.Random, depth: int, numeric_safe: bool = False):
    """Seeded random AST; numeric_safe keeps exponents small enough for the
    compiled pipeline to stay within spectral accuracy."""
    kinds = ["name", "rat"]
    if depth > 0:
        kinds += ["pow", "prod", "sum", "comm"]
    k = rng.choice(kinds)
    if k == "name":
        return dsl.Name(rng.choice(dsl.ATOMS))
    if k == "rat":
        return dsl.Rational(Fraction(rng.randrange(0, 12), rng.randrange(1, 7)))
    if k == "pow":
        if rng.random() < 0.4:
            lo = -2 if numeric_safe else -3
            return dsl.Power(dsl.Name(rng.choice(("abs_p", "t"))), rng.randrange(lo, 3))
        return dsl.Power(_random_ast(rng, depth - 1, numeric_safe), rng.randrange(0, 3))
    if k == "prod":
        return dsl.Product(tuple(_random_ast(rng, depth - 1, numeric_safe)
                                 for _ in range(rng.randrange(2, 4))))
    if k == "sum":
        n = rng.randrange(1, 4)
        terms = tuple((rng.choice((1, -1)), _random_ast(rng, depth - 1, numeric_safe))
                      for _ in range(n))
        if n == 1 and terms[0][0] == 1:
            terms = ((-1, terms[0][1]),)
        return dsl.Sum(terms)
    return dsl.Commutator(_random_ast(rng, depth - 1, numeric_safe),
                          _random_ast(rng, depth - 1, numeric_safe))


def run_suite(config: RunConfig, suite: str) -> list[CheckReport]:
    """Run one suite (or 'all'); deterministic report order."""
    if suite not in SUITES and suite != "all":
        raise ConfigError(f"unknown suite {suite!r}")
    return _Runner(config).run(suite)


def reports_to_json(reports: list[CheckReport], timings: bool = True) -> str:
    return json.dumps([r.to_json_obj(timings) for r in reports], indent=2) + "\n"


def reports_to_csv(reports: list[CheckReport]) -> str:
    lines = ["suite,check,state,t,j,value,threshold,pass"]
    lines.extend(r.to_csv_row() for r in reports)
    return "\n".join(lines) + "\n"
