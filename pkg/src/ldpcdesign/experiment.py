"""Experiment configuration, the alpha sweep, and CSV emission.

Configs are a line-oriented ``key = value`` format; the sweep runs one solve
per (alpha, solver) pair, certifies it, measures the DE trace, and emits
deterministic CSV rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import certify
from .desim import de_trace
from .lp import SolveRequest, solve_semi_infinite
from .polynomials import DegreeDistribution, poly_from_edge_coeffs
from .sos import build_sos_problem, solve_sdp

KNOWN_KEYS = ("rho", "epsilon", "dv_max", "alpha", "solver", "target",
              "out_csv", "out_svg")
DEFAULT_ALPHA_SPEC = "0.2:0.1:1.0"
SOLVERS = ("lp", "sdp")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    rho_coeffs: dict
    epsilon: float
    dv_max: int
    alpha_values: tuple
    solver: str = "both"
    target: float = 1e-6
    out_csv: str = "sweep.csv"
    out_svg: str = "sweep.svg"

    def solvers(self) -> tuple:
        return SOLVERS if self.solver == "both" else (self.solver,)


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    solver: str
    status: str
    rate: float | None
    gap: float | None
    min_slack: float | None
    iters: int | None
    lambdas: tuple


def parse_degree_poly(spec: str) -> dict:
    """Edge-perspective degree map from 'x^k' shorthand or 'j:coeff,...'."""
    spec = spec.strip()
    if spec.startswith("x"):
        if spec == "x":
            return {2: 1.0}
        if not spec.startswith("x^"):
            raise ConfigError(f"bad monomial spec {spec!r}")
        power = int(spec[2:])
        if power < 1:
            raise ConfigError(f"monomial power must be >= 1 in {spec!r}")
        return {power + 1: 1.0}
    coeffs = {}
    for part in spec.split(","):
        if ":" not in part:
            raise ConfigError(f"bad coefficient entry {part!r}")
        deg_s, coeff_s = part.split(":", 1)
        deg = int(deg_s)
        if deg in coeffs:
            raise ConfigError(f"duplicate degree {deg}")
        coeffs[deg] = float(coeff_s)
    total = sum(coeffs.values())
    if abs(total - 1.0) > 1e-12:
        raise ConfigError(f"coefficients sum to {total}, not 1")
    if any(c < 0 for c in coeffs.values()):
        raise ConfigError("coefficients must be nonnegative")
    if any(d < 2 for d in coeffs):
        raise ConfigError("degrees must be >= 2")
    return coeffs


def parse_alpha_values(spec: str) -> tuple:
    """Alpha list from 'start:step:stop', a comma list, or a single value."""
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(f"alpha range must be start:step:stop, got {spec!r}")
        start, step, stop = (float(p) for p in parts)
        if step <= 0:
            raise ConfigError("alpha range step must be positive")
        count = int(round((stop - start) / step)) + 1
        values = tuple(start + k * step for k in range(count)
                       if start + k * step <= stop + 1e-12)
    else:
        values = tuple(float(p) for p in spec.split(","))
    if not values:
        raise ConfigError("empty alpha list")
    for a in values:
        if not 0.0 < a <= 1.0:
            raise ConfigError(f"alpha {a} outside (0, 1]")
    return values


def parse_config(text: str) -> ExperimentConfig:
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        seen[key] = (lineno, value)

    def take(key, default=None):
        if key in seen:
            return seen[key][1]
        return default

    for required in ("rho", "epsilon", "dv_max"):
        if required not in seen:
            raise ConfigError(f"missing required key {required!r}")

    try:
        rho_coeffs = parse_degree_poly(seen["rho"][1])
    except ConfigError as exc:
        raise ConfigError(f"rho: {exc}") from None
    try:
        epsilon = float(seen["epsilon"][1])
    except ValueError:
        raise ConfigError("epsilon: not a number") from None
    if not 0.0 < epsilon < 1.0:
        raise ConfigError(f"epsilon: {epsilon} outside (0, 1)")
    try:
        dv_max = int(seen["dv_max"][1])
    except ValueError:
        raise ConfigError("dv_max: not an integer") from None
    if dv_max < 2:
        raise ConfigError(f"dv_max: {dv_max} must be >= 2")
    try:
        alpha_values = parse_alpha_values(take("alpha", DEFAULT_ALPHA_SPEC))
    except ConfigError as exc:
        raise ConfigError(f"alpha: {exc}") from None
    solver = take("solver", "both")
    if solver not in ("lp", "sdp", "both"):
        raise ConfigError(f"solver: {solver!r} not one of lp, sdp, both")
    try:
        target = float(take("target", "1e-6"))
    except ValueError:
        raise ConfigError("target: not a number") from None
    if not 0.0 < target < 1.0:
        raise ConfigError(f"target: {target} outside (0, 1)")

    return ExperimentConfig(
        rho_coeffs=rho_coeffs, epsilon=epsilon, dv_max=dv_max,
        alpha_values=alpha_values, solver=solver, target=target,
        out_csv=take("out_csv", "sweep.csv"), out_svg=take("out_svg", "sweep.svg"),
    )


def render_config(cfg: ExperimentConfig) -> str:
    rho = ",".join(f"{d}:{c!r}" for d, c in sorted(cfg.rho_coeffs.items()))
    alpha = ",".join(repr(a) for a in cfg.alpha_values)
    lines = [
        f"rho = {rho}",
        f"epsilon = {cfg.epsilon!r}",
        f"dv_max = {cfg.dv_max}",
        f"alpha = {alpha}",
        f"solver = {cfg.solver}",
        f"target = {cfg.target!r}",
        f"out_csv = {cfg.out_csv}",
        f"out_svg = {cfg.out_svg}",
    ]
    return "\n".join(lines) + "\n"


def _solve_one(cfg: ExperimentConfig, alpha: float, solver: str) -> SweepRow:
    rho = poly_from_edge_coeffs(cfg.rho_coeffs)
    req = SolveRequest(rho=rho, epsilon=cfg.epsilon, alpha=alpha, d_v=cfg.dv_max)
    if solver == "lp":
        res = solve_semi_infinite(req)
        status, lam = res.status, res.lambda_coeffs
    else:
        sol, _ = solve_sdp(build_sos_problem(req))
        status, lam = sol.status, sol.lambda_coeffs
    if status != "optimal" or not lam:
        return SweepRow(alpha=alpha, solver=solver, status=status, rate=None,
                        gap=None, min_slack=None, iters=None, lambdas=())

    margin = certify.min_normalized_slack(lam, rho, cfg.epsilon, alpha)
    rho_mean = rho.integral01()
    lam_mean = sum(c / i for i, c in lam.items())
    rate = 1.0 - rho_mean / lam_mean
    gap = 1.0 - rate / (1.0 - cfg.epsilon)
    dist = DegreeDistribution(lam, cfg.rho_coeffs)
    trace = de_trace(dist, cfg.epsilon, target=cfg.target)
    lambdas = tuple(lam.get(i, 0.0) for i in range(2, cfg.dv_max + 1))
    return SweepRow(alpha=alpha, solver=solver, status=status, rate=rate,
                    gap=gap, min_slack=margin.min_slack,
                    iters=trace.iterations_to_target, lambdas=lambdas)


def run_sweep(cfg: ExperimentConfig) -> list[SweepRow]:
    """One row per (alpha, solver) pair; infeasible alphas produce flagged
    rows rather than aborting the sweep."""
    rows = []
    for alpha in cfg.alpha_values:
        for solver in cfg.solvers():
            rows.append(_solve_one(cfg, alpha, solver))
    rows.sort(key=lambda r: (r.alpha, r.solver))
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def csv_header(d_v: int) -> str:
    lam_cols = ",".join(f"lambda_{i}" for i in range(2, d_v + 1))
    return f"alpha,solver,status,rate,gap,min_slack,iters,{lam_cols}"


def emit_csv(rows, path, d_v: int) -> None:
    """Deterministic CSV: 12 significant digits, byte-identical re-runs."""
    lines = [csv_header(d_v)]
    for r in rows:
        lambdas = list(r.lambdas) + [None] * (d_v - 1 - len(r.lambdas))
        cells = [_fmt(r.alpha), r.solver, r.status, _fmt(r.rate), _fmt(r.gap),
                 _fmt(r.min_slack), _fmt(r.iters)] + [_fmt(v) for v in lambdas]
        lines.append(",".join(cells))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv_rows(path, epsilon: float) -> list[SweepRow]:
    """Load emitted CSV, recomputing and cross-checking the gap column."""
    with open(path) as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        rec = dict(zip(header, cells))
        rate = float(rec["rate"]) if rec["rate"] else None
        gap = float(rec["gap"]) if rec["gap"] else None
        if rate is not None and gap is not None:
            expected = 1.0 - rate / (1.0 - epsilon)
            if abs(gap - expected) > 1e-10:
                raise ValueError(
                    f"gap column {gap} does not match 1 - rate/capacity = {expected}")
        lambdas = tuple(float(rec[k]) for k in header if k.startswith("lambda_")
                        and rec[k])
        rows.append(SweepRow(
            alpha=float(rec["alpha"]), solver=rec["solver"], status=rec["status"],
            rate=rate, gap=gap,
            min_slack=float(rec["min_slack"]) if rec["min_slack"] else None,
            iters=int(rec["iters"]) if rec["iters"] else None,
            lambdas=lambdas))
    return rows
