"""Reproducible Monte Carlo experiments over the degree asymptotics.

An experiment is described by a single INI file (sections ``[model]``,
``[scaling]``, ``[experiment]``; exact schema in the package README) and
produces a flat report: provenance header lines, then CSV rows

    n,statistic,value,stderr,exact,pass

Every statistic carries either a Monte Carlo standard-error proxy or an
exactness marker.  Reports are byte-identical across reruns of the same
config and seed and across thread counts; wall-clock metadata lives in a
JSON sidecar next to the report, never inside it.
"""

from __future__ import annotations

import configparser
import datetime
import enum
import hashlib
import json
import math
import os
from dataclasses import dataclass

import numpy as np

from . import _rng
from ._version import __version__
from .bounds import DEFAULT_C_STAR, optimize_bound
from .degree_dist import DegreePmfTable
from .errors import ConfigError, InvalidParamsError, RegimeError
from .limits import (
    LogNormalSpec,
    cdf_approx,
    kl_params,
    kl_reconciled_law,
    lambda_limit_probe,
    lognormal_cdf,
    transform_degree,
)
from .model import (
    ModelParams,
    Regime,
    Rounding,
    Scaling,
    classify_regime,
    derive_constants,
    require_supercritical,
)
from .sampler import DegreeSampleSet, sample_degrees_direct, sample_degrees_fullgraph
from .stats import chi_square_gof, dkw_proxy, ks_statistic, tv_to_exact, two_sample_ks

__all__ = [
    "SupDelta",
    "empirical_sup_delta",
    "ExperimentKind",
    "ExperimentConfig",
    "parse_config",
    "canonical_text",
    "config_hash",
    "ReportRow",
    "ExperimentReport",
    "run_experiment",
]

#: Residual tolerances of the reconciliation identities.
KL_VAR_TOL = 1e-12
KL_MEAN_TOL = 1e-10
KL_CDF_TOL = 1e-12


# =====================================================================
# Kolmogorov distance to the limit, with the zero atom
# =====================================================================

@dataclass(frozen=True)
class SupDelta:
    """Empirical Kolmogorov distance of transformed degrees to the limit.

    ``sup_delta = max(zero_fraction, ks_nonzero)``: the limit law puts no
    mass at 0, so the empirical zero atom is itself a lower bound on the
    distance, and the nonzero draws carry the usual KS statistic.
    """

    sup_delta: float
    ks_nonzero: float
    zero_fraction: float
    proxy: float
    n_total: int
    n_nonzero: int


def empirical_sup_delta(samples: DegreeSampleSet, scaling: Scaling,
                        alpha: float = 0.05) -> SupDelta:
    """KS distance of ``transform_degree`` draws to LogNormal(0, sigma**2).

    Zero degrees are excluded from the KS part and reported (and folded in)
    through the zero atom; the stderr proxy is the DKW half-width at level
    ``alpha`` for the nonzero sample size.
    """
    params = samples.params
    n = samples.n
    require_supercritical(params, scaling.rho, "the log-normal KS statistic")
    c = derive_constants(params)
    if c.sigma == 0.0:
        raise RegimeError("sigma = 0 (gamma0 = gamma1): KS statistic undefined")
    l = scaling.attr_count(n)
    if samples.l != l:
        raise InvalidParamsError(
            f"sample set was drawn at l={samples.l}, but the scaling gives L_n={l} at n={n}"
        )
    d = samples.degrees
    zero_fraction = float((d == 0).mean())
    nonzero = d[d > 0]
    if len(nonzero) == 0:
        raise InvalidParamsError("all draws are zero; KS statistic undefined")
    w = transform_degree(nonzero.astype(np.float64), n, scaling, params)
    spec = LogNormalSpec(m=0.0, sigma2=c.sigma ** 2)
    ks = ks_statistic(w, lambda x: lognormal_cdf(x, spec))
    return SupDelta(
        sup_delta=max(zero_fraction, ks),
        ks_nonzero=ks,
        zero_fraction=zero_fraction,
        proxy=dkw_proxy(len(nonzero), alpha),
        n_total=len(d),
        n_nonzero=len(nonzero),
    )


# =====================================================================
# Configuration
# =====================================================================

class ExperimentKind(enum.Enum):
    DEGREE_FIT = "degree_fit"
    LOGNORMAL_KS = "lognormal_ks"
    ZERO_ONE_LAW = "zero_one_law"
    LAMBDA_PROBE = "lambda_probe"
    BOUND_CHECK = "bound_check"
    KL_RECONCILE = "kl_reconcile"


@dataclass(frozen=True)
class ExperimentConfig:
    """Parsed experiment description; see the README for the file schema."""

    params: ModelParams
    scaling: Scaling
    kind: ExperimentKind
    n_grid: tuple[int, ...]
    draws: int
    seed: int
    out: str | None = None
    graph_draws: int | None = None          # degree_fit
    t_values: tuple[float, ...] = (0.1, 1.0, 10.0)  # lambda_probe
    tolerance: float = 0.07                 # lambda_probe |frac - 1/2| limit
    param_sets: int = 20                    # kl_reconcile random parameter sets
    c_star: float = DEFAULT_C_STAR          # bound_check / lognormal_ks
    tv_direct_max: float = 0.01             # degree_fit pass thresholds
    tv_graph_max: float = 0.02
    p_min: float = 1e-3
    final_sup_delta_max: float = 0.1        # lognormal_ks
    final_p0_min: float = 0.9               # zero_one_law, subcritical
    final_p0_max: float = 0.1               # zero_one_law, supercritical

    def __post_init__(self) -> None:
        if not self.n_grid:
            raise ConfigError("n_grid must be nonempty")
        if any(not isinstance(n, int) or n < 2 for n in self.n_grid):
            raise ConfigError("n_grid entries must be integers >= 2")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ConfigError("n_grid must be strictly increasing")
        if not (isinstance(self.draws, int) and self.draws >= 100):
            raise ConfigError(f"draws must be an integer >= 100, got {self.draws!r}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2 ** 64):
            raise ConfigError("seed must be an integer in [0, 2**64)")
        if self.graph_draws is not None and (
            not isinstance(self.graph_draws, int) or self.graph_draws < 100
        ):
            raise ConfigError("graph_draws must be an integer >= 100")
        if any(t <= 0 for t in self.t_values):
            raise ConfigError("t_values must be positive")
        if not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")
        if not (isinstance(self.param_sets, int) and self.param_sets >= 1):
            raise ConfigError("param_sets must be an integer >= 1")

    @property
    def effective_graph_draws(self) -> int:
        return self.graph_draws if self.graph_draws is not None else max(100, self.draws // 4)


_MODEL_KEYS = {"q11", "q10", "q00", "mu1"}
_SCALING_KEYS = {"rho", "rounding"}
_EXPERIMENT_KEYS = {
    "kind", "n_grid", "draws", "seed", "out", "graph_draws", "t_values",
    "tolerance", "param_sets", "c_star", "tv_direct_max", "tv_graph_max",
    "p_min", "final_sup_delta_max", "final_p0_min", "final_p0_max",
}


def parse_config(path: str) -> ExperimentConfig:
    """Read and validate an experiment INI file."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cp.read_file(fh)
    except (configparser.Error, UnicodeDecodeError) as exc:
        raise ConfigError(f"malformed config file: {exc}") from exc

    for section, allowed in (
        ("model", _MODEL_KEYS), ("scaling", _SCALING_KEYS), ("experiment", _EXPERIMENT_KEYS)
    ):
        if not cp.has_section(section):
            raise ConfigError(f"missing [{section}] section")
        unknown = set(cp.options(section)) - allowed
        if unknown:
            raise ConfigError(f"unknown keys in [{section}]: {sorted(unknown)}")
    extra = set(cp.sections()) - {"model", "scaling", "experiment"}
    if extra:
        raise ConfigError(f"unknown sections: {sorted(extra)}")

    def fget(section: str, key: str, default=None, *, cast=float):
        if not cp.has_option(section, key):
            if default is None:
                raise ConfigError(f"missing required key {section}.{key}")
            return default
        raw = cp.get(section, key).strip()
        try:
            return cast(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {section}.{key}: {raw!r}") from exc

    try:
        params = ModelParams(
            q11=fget("model", "q11"), q10=fget("model", "q10"),
            q00=fget("model", "q00"), mu1=fget("model", "mu1"),
        )
    except InvalidParamsError as exc:
        raise ConfigError(str(exc)) from exc
    rounding_raw = fget("scaling", "rounding", default="round", cast=str).lower()
    try:
        rounding = Rounding(rounding_raw)
    except ValueError as exc:
        raise ConfigError(f"bad scaling.rounding: {rounding_raw!r}") from exc
    try:
        scaling = Scaling(rho=fget("scaling", "rho"), rounding=rounding)
    except InvalidParamsError as exc:
        raise ConfigError(str(exc)) from exc

    kind_raw = fget("experiment", "kind", cast=str)
    try:
        kind = ExperimentKind(kind_raw)
    except ValueError as exc:
        raise ConfigError(
            f"unknown experiment kind {kind_raw!r}; valid: "
            f"{[k.value for k in ExperimentKind]}"
        ) from exc

    def int_tuple(raw: str) -> tuple[int, ...]:
        return tuple(int(tok) for tok in raw.split())

    def float_tuple(raw: str) -> tuple[float, ...]:
        return tuple(float(tok) for tok in raw.split())

    kwargs = dict(
        params=params,
        scaling=scaling,
        kind=kind,
        n_grid=fget("experiment", "n_grid", cast=int_tuple),
        draws=fget("experiment", "draws", cast=int),
        seed=fget("experiment", "seed", cast=int),
    )
    if cp.has_option("experiment", "out"):
        kwargs["out"] = fget("experiment", "out", cast=str)
    if cp.has_option("experiment", "graph_draws"):
        kwargs["graph_draws"] = fget("experiment", "graph_draws", cast=int)
    if cp.has_option("experiment", "t_values"):
        kwargs["t_values"] = fget("experiment", "t_values", cast=float_tuple)
    if cp.has_option("experiment", "param_sets"):
        kwargs["param_sets"] = fget("experiment", "param_sets", cast=int)
    for key in ("tolerance", "c_star", "tv_direct_max", "tv_graph_max", "p_min",
                "final_sup_delta_max", "final_p0_min", "final_p0_max"):
        if cp.has_option("experiment", key):
            kwargs[key] = fget("experiment", key)
    try:
        return ExperimentConfig(**kwargs)
    except InvalidParamsError as exc:
        raise ConfigError(str(exc)) from exc


def canonical_text(config: ExperimentConfig) -> str:
    """Canonical serialization of the parsed config (the hash input).

    The output path is excluded: it does not influence any number.
    """
    items = {
        "model.q11": repr(config.params.q11),
        "model.q10": repr(config.params.q10),
        "model.q00": repr(config.params.q00),
        "model.mu1": repr(config.params.mu1),
        "scaling.rho": repr(config.scaling.rho),
        "scaling.rounding": config.scaling.rounding.value,
        "experiment.kind": config.kind.value,
        "experiment.n_grid": " ".join(str(n) for n in config.n_grid),
        "experiment.draws": str(config.draws),
        "experiment.seed": str(config.seed),
        "experiment.graph_draws": str(config.effective_graph_draws),
        "experiment.t_values": " ".join(repr(t) for t in config.t_values),
        "experiment.tolerance": repr(config.tolerance),
        "experiment.param_sets": str(config.param_sets),
        "experiment.c_star": repr(config.c_star),
        "experiment.tv_direct_max": repr(config.tv_direct_max),
        "experiment.tv_graph_max": repr(config.tv_graph_max),
        "experiment.p_min": repr(config.p_min),
        "experiment.final_sup_delta_max": repr(config.final_sup_delta_max),
        "experiment.final_p0_min": repr(config.final_p0_min),
        "experiment.final_p0_max": repr(config.final_p0_max),
    }
    return "\n".join(f"{k} = {items[k]}" for k in sorted(items)) + "\n"


def config_hash(config: ExperimentConfig) -> str:
    return hashlib.sha256(canonical_text(config).encode("utf-8")).hexdigest()


# =====================================================================
# Report
# =====================================================================

@dataclass(frozen=True)
class ReportRow:
    n: int
    statistic: str
    value: float
    stderr: float | None = None
    exact: bool = False
    passed: bool | None = None

    def to_csv(self) -> str:
        err = "" if self.stderr is None else repr(float(self.stderr))
        ok = "" if self.passed is None else str(self.passed).lower()
        return (
            f"{self.n},{self.statistic},{float(self.value)!r},{err},"
            f"{str(self.exact).lower()},{ok}"
        )


@dataclass(frozen=True)
class ExperimentReport:
    kind: ExperimentKind
    provenance: dict[str, str]
    rows: tuple[ReportRow, ...]

    def all_passed(self) -> bool:
        return all(r.passed for r in self.rows if r.passed is not None)

    def to_text(self) -> str:
        lines = ["# magnet experiment report"]
        lines.extend(f"# {k}={self.provenance[k]}" for k in sorted(self.provenance))
        lines.append("n,statistic,value,stderr,exact,pass")
        lines.extend(r.to_csv() for r in self.rows)
        return "\n".join(lines) + "\n"

    def write(self, path: str, sidecar: bool = True) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_text())
        if sidecar:
            meta = {
                "written_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
                "report": os.path.basename(path),
            }
            with open(path + ".meta.json", "w", encoding="utf-8") as fh:
                json.dump(meta, fh, indent=2, sort_keys=True)
                fh.write("\n")


# =====================================================================
# Runners
# =====================================================================

def _sub_seed(seed: int, *components: int) -> int:
    """Fold (seed, components...) through the avalanche mixer."""
    k = _rng.mix64(seed)
    for c in components:
        k = _rng.mix64((k ^ ((c * _rng.GOLDEN) & ((1 << 64) - 1))) & ((1 << 64) - 1))
    return k


_ROLE_DIRECT = 1
_ROLE_GRAPH = 2
_ROLE_PARAMS = 3


def run_experiment(config: ExperimentConfig, threads: int = 1) -> ExperimentReport:
    """Execute the experiment described by ``config`` and build its report."""
    runner = {
        ExperimentKind.DEGREE_FIT: _run_degree_fit,
        ExperimentKind.LOGNORMAL_KS: _run_lognormal_ks,
        ExperimentKind.ZERO_ONE_LAW: _run_zero_one_law,
        ExperimentKind.LAMBDA_PROBE: _run_lambda_probe,
        ExperimentKind.BOUND_CHECK: _run_bound_check,
        ExperimentKind.KL_RECONCILE: _run_kl_reconcile,
    }[config.kind]
    rows = runner(config, threads)
    prov = {
        "kind": config.kind.value,
        "config_hash": config_hash(config),
        "seed": str(config.seed),
        "version": __version__,
        "params": (
            f"q11={config.params.q11!r} q10={config.params.q10!r} "
            f"q00={config.params.q00!r} mu1={config.params.mu1!r}"
        ),
        "rho": repr(config.scaling.rho),
        "rounding": config.scaling.rounding.value,
        "n_grid": " ".join(str(n) for n in config.n_grid),
        "draws": str(config.draws),
    }
    return ExperimentReport(kind=config.kind, provenance=prov, rows=tuple(rows))


def _run_degree_fit(config: ExperimentConfig, threads: int) -> list[ReportRow]:
    rows: list[ReportRow] = []
    for n in config.n_grid:
        l = config.scaling.attr_count(n)
        direct = sample_degrees_direct(
            config.params, n, l, config.draws,
            _sub_seed(config.seed, _ROLE_DIRECT, n), threads=threads,
        )
        graph = sample_degrees_fullgraph(
            config.params, n, l, config.effective_graph_draws,
            _sub_seed(config.seed, _ROLE_GRAPH, n), threads=threads,
        )
        table = DegreePmfTable.from_model(config.params, n, l)
        d_hi = int(max(direct.degrees.max(), graph.degrees.max()))
        exact = np.asarray(table.pmf(np.arange(d_hi + 1)))

        tv_d = tv_to_exact(direct.degrees, exact)
        tv_g = tv_to_exact(graph.degrees, exact)
        _, chi_p, _ = chi_square_gof(direct.degrees, exact)
        _, ks_p = two_sample_ks(direct.degrees, graph.degrees)
        rows.extend([
            ReportRow(n, "tv_direct", tv_d, stderr=dkw_proxy(direct.count),
                      passed=tv_d < config.tv_direct_max),
            ReportRow(n, "tv_fullgraph", tv_g, stderr=dkw_proxy(graph.count),
                      passed=tv_g < config.tv_graph_max),
            ReportRow(n, "chisq_p_direct", chi_p, passed=chi_p > config.p_min),
            ReportRow(n, "ks2_p", ks_p, passed=ks_p > config.p_min),
        ])
    return rows


def _run_lognormal_ks(config: ExperimentConfig, threads: int) -> list[ReportRow]:
    rows: list[ReportRow] = []
    deltas: list[SupDelta] = []
    totals: list[float] = []
    for n in config.n_grid:
        l = config.scaling.attr_count(n)
        samples = sample_degrees_direct(
            config.params, n, l, config.draws,
            _sub_seed(config.seed, _ROLE_DIRECT, n), threads=threads,
        )
        sd = empirical_sup_delta(samples, config.scaling)
        deltas.append(sd)
        cert = optimize_bound(config.params, n, config.scaling, c_star=config.c_star)
        totals.append(cert.total)
        dominates = cert.vacuous or (sd.sup_delta + 3.0 * sd.proxy <= cert.total)
        rows.extend([
            ReportRow(n, "zero_fraction", sd.zero_fraction,
                      stderr=math.sqrt(max(sd.zero_fraction * (1 - sd.zero_fraction), 1e-300)
                                       / sd.n_total)),
            ReportRow(n, "ks_nonzero", sd.ks_nonzero, stderr=sd.proxy),
            ReportRow(n, "sup_delta", sd.sup_delta, stderr=sd.proxy),
            ReportRow(n, "bound_total", cert.total, exact=True),
            ReportRow(n, "bound_vacuous", float(cert.vacuous), exact=True),
            ReportRow(n, "bound_dominates", cert.total - (sd.sup_delta + 3.0 * sd.proxy),
                      exact=False, passed=dominates),
        ])
    n_last = config.n_grid[-1]
    increases = [
        b.sup_delta - a.sup_delta - 2.0 * (a.proxy + b.proxy)
        for a, b in zip(deltas, deltas[1:])
    ]
    rows.append(ReportRow(
        n_last, "sup_delta_nonincreasing",
        max(increases) if increases else 0.0,
        passed=all(x <= 0 for x in increases),
    ))
    rows.append(ReportRow(
        n_last, "sup_delta_final", deltas[-1].sup_delta, stderr=deltas[-1].proxy,
        passed=deltas[-1].sup_delta < config.final_sup_delta_max,
    ))
    return rows


def _run_zero_one_law(config: ExperimentConfig, threads: int) -> list[ReportRow]:
    regime = classify_regime(config.params, config.scaling.rho)
    if regime.regime is Regime.BOUNDARY:
        raise RegimeError("the zero-one law experiment needs a non-boundary regime")
    p0s = []
    rows: list[ReportRow] = []
    for n in config.n_grid:
        l = config.scaling.attr_count(n)
        p0 = DegreePmfTable.from_model(config.params, n, l).prob_zero()
        p0s.append(p0)
        rows.append(ReportRow(n, "p0", p0, exact=True))
    n_last = config.n_grid[-1]
    steps = [b - a for a, b in zip(p0s, p0s[1:])]
    if regime.regime is Regime.SUBCRITICAL:
        monotone = all(s > 0 for s in steps)
        final_ok = p0s[-1] > config.final_p0_min
        worst = min(steps) if steps else 0.0
    else:
        monotone = all(s < 0 for s in steps)
        final_ok = p0s[-1] < config.final_p0_max
        worst = max(steps) if steps else 0.0
    rows.append(ReportRow(n_last, "p0_trend_monotone", worst, exact=True, passed=monotone))
    rows.append(ReportRow(n_last, "p0_final", p0s[-1], exact=True, passed=final_ok))
    return rows


def _run_lambda_probe(config: ExperimentConfig, threads: int) -> list[ReportRow]:
    rows: list[ReportRow] = []
    for n in config.n_grid:
        l = config.scaling.attr_count(n)
        samples = sample_degrees_direct(
            config.params, n, l, config.draws,
            _sub_seed(config.seed, _ROLE_DIRECT, n), threads=threads,
        )
        for t in config.t_values:
            frac = lambda_limit_probe(t, samples, config.scaling)
            rows.append(ReportRow(
                n, f"lambda_frac[t={t:g}]", frac,
                stderr=math.sqrt(max(frac * (1.0 - frac), 1e-300) / samples.count),
                passed=abs(frac - 0.5) <= config.tolerance,
            ))
    return rows


def _run_bound_check(config: ExperimentConfig, threads: int) -> list[ReportRow]:
    rows: list[ReportRow] = []
    totals: list[float] = []
    for n in config.n_grid:
        cert = optimize_bound(config.params, n, config.scaling, c_star=config.c_star)
        totals.append(cert.total)
        rows.extend([
            ReportRow(n, "delta_opt", cert.delta, exact=True),
            ReportRow(n, "eta_opt", cert.eta, exact=True),
            ReportRow(n, "term_clt", cert.term_clt, exact=True),
            ReportRow(n, "term_be", cert.term_be, exact=True),
            ReportRow(n, "term_hoeffding", cert.term_hoeffding, exact=True),
            ReportRow(n, "term_chernoff", cert.term_chernoff, exact=True),
            ReportRow(n, "bound_total", cert.total, exact=True),
            ReportRow(n, "bound_vacuous", float(cert.vacuous), exact=True),
        ])
    rows.append(ReportRow(
        config.n_grid[-1], "total_shrinks_across_grid", totals[0] - totals[-1],
        exact=True, passed=totals[-1] < totals[0],
    ))
    return rows


def _random_params(gen: np.random.Generator) -> ModelParams:
    q11, q10, q00, mu1 = gen.uniform(0.05, 0.95, size=4)
    return ModelParams(q11=float(q11), q10=float(q10), q00=float(q00), mu1=float(mu1))


def _run_kl_reconcile(config: ExperimentConfig, threads: int) -> list[ReportRow]:
    gen = np.random.Generator(np.random.PCG64(_sub_seed(config.seed, _ROLE_PARAMS)))
    param_sets = [config.params] + [_random_params(gen) for _ in range(config.param_sets)]
    rows: list[ReportRow] = []
    for n in config.n_grid:
        var_resid = 0.0
        mean_resid = 0.0
        cdf_resid = 0.0
        log_n = math.log(n)
        for p in param_sets:
            c = derive_constants(p)
            l = config.scaling.attr_count(n)
            rho_n = l / log_n
            kp = kl_params(p, n, config.scaling)
            if kp.sigma2 > 0:
                var_resid = max(
                    var_resid,
                    abs(kp.sigma2 - rho_n * c.sigma ** 2 * log_n) / kp.sigma2,
                )
            m_direct = (1.0 + rho_n * c.log_gamma_bar) * log_n \
                + 0.5 * (c.sigma ** 2) * rho_n * log_n
            mean_resid = max(mean_resid, abs(kp.m - m_direct) / max(abs(kp.m), 1e-300))
            if (
                classify_regime(p, config.scaling.rho).regime is Regime.SUPERCRITICAL
                and c.sigma != 0.0
            ):
                law = kl_reconciled_law(p, n, config.scaling)
                sd = math.sqrt(law.sigma2)
                for z in (-2.0, -1.0, 0.0, 1.0, 2.0):
                    t = math.exp(law.m + z * sd)
                    cdf_resid = max(
                        cdf_resid,
                        abs(lognormal_cdf(t, law) - cdf_approx(t, n, config.scaling, p)),
                    )
        rows.extend([
            ReportRow(n, "kl_var_resid_max", var_resid, exact=True,
                      passed=var_resid <= KL_VAR_TOL),
            ReportRow(n, "kl_mean_resid_max", mean_resid, exact=True,
                      passed=mean_resid <= KL_MEAN_TOL),
            ReportRow(n, "kl_cdf_resid_max", cdf_resid, exact=True,
                      passed=cdf_resid <= KL_CDF_TOL),
        ])
    return rows
