"""Config-driven experiment sweeps, rate fitting, aggregation, and the
numerical oracle suites.

A sweep config names a kernel spec, a list of methods, the N grid, and a
repetition count; the runner derives one independent RNG stream per
(method, N, rep) triple, computes the exact squared error of each rule, and
writes a CSV with schema ``method,N,rep,seed,squared_error,wall_time_ms,status``.
Per-record failures are recorded in the status column and never abort a sweep.
Deterministic designs (grids, Halton, tensor Gauss-Hermite) collapse their
repetitions to a single record with rep=0 and seed=0.
"""

from __future__ import annotations

import concurrent.futures
import io
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import baselines, quadrature, sampling, spectral, theory
from .baselines import BaselineConfig
from .errors import ConfigError, DppQuadError, InsufficientData
from .spectral import CONSTANT_ONE, Integrand, KernelSpec

CSV_HEADER = "method,N,rep,seed,squared_error,wall_time_ms,status"

_DETERMINISTIC = ("UGBQ", "HaltonBQ", "GHBQ")
_METHOD_NAMES = ("DPPKQ", "DPPUQ", "MC", "Herding", "SBQ", "LVSQ") + _DETERMINISTIC


@dataclass(frozen=True)
class MethodSpec:
    name: str
    lam: float = 0.0

    @property
    def label(self) -> str:
        if self.name == "LVSQ":
            return f"LVSQ-{self.lam:g}"
        return self.name


@dataclass(frozen=True)
class ExperimentConfig:
    spec: KernelSpec
    methods: tuple[MethodSpec, ...]
    n_values: tuple[int, ...]
    repetitions: int
    master_seed: int
    output_path: str | None = None
    g: Integrand = CONSTANT_ONE
    baselines: BaselineConfig = field(default_factory=BaselineConfig)


@dataclass(frozen=True)
class ExperimentRecord:
    method: str
    N: int
    rep: int
    seed: int
    squared_error: float
    wall_time_ms: float
    status: str = "ok"


def _validate(config: ExperimentConfig) -> None:
    if not config.methods:
        raise ConfigError("methods must be non-empty")
    if not config.n_values:
        raise ConfigError("n_values must be non-empty")
    if any(b >= a for a, b in zip(config.n_values[1:], config.n_values)):
        raise ConfigError("n_values must be strictly increasing")
    if any(n < 1 for n in config.n_values):
        raise ConfigError("n_values must be positive")
    if config.repetitions < 1:
        raise ConfigError("repetitions must be >= 1")
    for m in config.methods:
        if m.name not in _METHOD_NAMES:
            raise ConfigError(f"unknown method {m.name!r}")
        if m.name in ("LVSQ", "UGBQ", "HaltonBQ") and not config.spec.is_periodic:
            raise ConfigError(f"{m.name} requires a periodic family")
        if m.name == "HaltonBQ" and config.spec.d > 2:
            raise ConfigError("HaltonBQ supports d <= 2")
        if m.name == "GHBQ" and config.spec.family != "gaussian":
            raise ConfigError("GHBQ requires the gaussian family")
        if m.name in ("DPPUQ", "MC", "Herding") and config.g.kind != "constant_one":
            raise ConfigError(f"{m.name} supports only the constant integrand")


def _build_rule(
    spec: KernelSpec,
    g: Integrand,
    method: MethodSpec,
    N: int,
    seed: int,
    bconf: BaselineConfig,
) -> quadrature.QuadratureRule:
    stream = sampling.rng_stream(seed)
    name = method.name
    if name == "DPPKQ":
        return quadrature.solve_weights(spec, sampling.dpp_nodes(spec, N, stream), g)
    if name == "DPPUQ":
        return quadrature.uniform_weight_rule(spec, sampling.dpp_nodes(spec, N, stream), g)
    if name == "MC":
        return quadrature.uniform_weight_rule(spec, baselines.mc_nodes(spec, N, stream), g)
    if name == "Herding":
        nodes = baselines.herding_nodes(spec, N, bconf, stream, g)
        return quadrature.uniform_weight_rule(spec, nodes, g)
    if name == "SBQ":
        nodes = baselines.sbq_nodes(spec, N, bconf, stream, g)
        return quadrature.solve_weights(spec, nodes, g)
    if name == "LVSQ":
        return baselines.lvsq_rule(spec, N, method.lam, stream, g)
    if name == "UGBQ":
        return quadrature.solve_weights(spec, baselines.grid_nodes(spec, N), g)
    if name == "HaltonBQ":
        return quadrature.solve_weights(spec, baselines.halton_nodes(spec, N), g)
    if name == "GHBQ":
        return quadrature.solve_weights(spec, baselines.gauss_hermite_tensor_nodes(spec, N), g)
    raise ConfigError(f"unknown method {name!r}")


def _execute_task(args) -> ExperimentRecord:
    spec, g, method, N, rep, seed, bconf = args
    start = time.perf_counter()
    try:
        rule = _build_rule(spec, g, method, N, seed, bconf)
        err = quadrature.squared_error(rule)
        status = "ok"
    except DppQuadError as exc:
        err = math.nan
        status = type(exc).__name__
    elapsed_ms = (time.perf_counter() - start) * 1e3
    return ExperimentRecord(
        method=method.label,
        N=N,
        rep=rep,
        seed=seed,
        squared_error=err,
        wall_time_ms=elapsed_ms,
        status=status,
    )


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> list[ExperimentRecord]:
    _validate(config)
    tasks = []
    for method in config.methods:
        reps = 1 if method.name in _DETERMINISTIC else config.repetitions
        for N in config.n_values:
            for rep in range(reps):
                if method.name in _DETERMINISTIC:
                    seed = 0
                else:
                    seed = sampling.derive_seed(config.master_seed, method.label, N, rep)
                tasks.append((config.spec, config.g, method, N, rep, seed, config.baselines))
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_execute_task, tasks, chunksize=8))
    else:
        records = [_execute_task(t) for t in tasks]
    if config.output_path:
        with open(config.output_path, "w") as fh:
            fh.write(records_to_csv(records))
    return records


# ---------------------------------------------------------------------------
# CSV and aggregation


def records_to_csv(records) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for r in records:
        buf.write(
            f"{r.method},{r.N},{r.rep},{r.seed},{r.squared_error!r},"
            f"{r.wall_time_ms:.3f},{r.status}\n"
        )
    return buf.getvalue()


def records_from_csv(text: str) -> list[ExperimentRecord]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ConfigError(f"csv header must be {CSV_HEADER!r}")
    out = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 7:
            raise ConfigError(f"malformed csv row: {ln!r}")
        out.append(
            ExperimentRecord(
                method=parts[0],
                N=int(parts[1]),
                rep=int(parts[2]),
                seed=int(parts[3]),
                squared_error=float(parts[4]),
                wall_time_ms=float(parts[5]),
                status=parts[6],
            )
        )
    return out


def _method_means(records, method: str) -> dict[int, float]:
    by_n: dict[int, list[float]] = {}
    for r in records:
        if r.method == method and r.status == "ok":
            by_n.setdefault(r.N, []).append(r.squared_error)
    return {n: float(np.mean(v)) for n, v in sorted(by_n.items())}


def fit_rate(records, method: str) -> tuple[float, float, float]:
    """OLS slope of log(mean squared error) against log N.

    Returns (slope, intercept, stderr of the slope); needs at least three
    distinct N with positive mean error.
    """
    means = {n: m for n, m in _method_means(records, method).items() if m > 0}
    if len(means) < 3:
        raise InsufficientData(
            f"need >= 3 distinct N with positive mean error for {method!r}, have {len(means)}"
        )
    x = np.log(np.array(sorted(means.keys()), dtype=np.float64))
    y = np.log(np.array([means[n] for n in sorted(means.keys())]))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    dof = max(len(x) - 2, 1)
    sigma2 = float(resid @ resid) / dof
    stderr = math.sqrt(sigma2 / float(np.sum((x - x.mean()) ** 2)))
    return float(slope), float(intercept), stderr


def aggregate(records) -> list[tuple[str, int, float, float, float]]:
    """Per (method, N): mean, lower quartile, upper quartile of the ok-status
    squared errors, ordered by method then N.  This is the shared definition
    the figure renderer must reproduce exactly."""
    groups: dict[tuple[str, int], list[float]] = {}
    order: list[str] = []
    for r in records:
        if r.status != "ok":
            continue
        if r.method not in order:
            order.append(r.method)
        groups.setdefault((r.method, r.N), []).append(r.squared_error)
    out = []
    for method in order:
        ns = sorted(n for (m, n) in groups if m == method)
        for n in ns:
            vals = np.array(groups[(method, n)])
            out.append(
                (
                    method,
                    n,
                    float(np.mean(vals)),
                    float(np.quantile(vals, 0.25)),
                    float(np.quantile(vals, 0.75)),
                )
            )
    return out


def aggregate_to_csv(rows) -> str:
    buf = io.StringIO()
    buf.write("method,N,mean,q25,q75\n")
    for method, n, mean, q25, q75 in rows:
        buf.write(f"{method},{n},{mean!r},{q25!r},{q75!r}\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# config (de)serialization


def config_from_json(obj: dict) -> ExperimentConfig:
    try:
        spec = spectral.spec_from_json(obj["spec"])
        methods = []
        for m in obj["methods"]:
            if isinstance(m, str):
                methods.append(MethodSpec(name=m))
            else:
                methods.append(MethodSpec(name=m["name"], lam=float(m.get("lam", 0.0))))
        g = spectral.integrand_from_json(obj.get("g", {"kind": "constant_one"}))
        bl = obj.get("baselines", {})
        bconf = BaselineConfig(
            candidate_pool_size=int(bl.get("candidate_pool_size", 4096)),
            sbq_jitter=float(bl.get("sbq_jitter", 1e-10)),
        )
        config = ExperimentConfig(
            spec=spec,
            methods=tuple(methods),
            n_values=tuple(int(n) for n in obj["n_values"]),
            repetitions=int(obj["repetitions"]),
            master_seed=int(obj["master_seed"]),
            output_path=obj.get("output_path"),
            g=g,
            baselines=bconf,
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc
    _validate(config)
    return config


def load_config(path: str) -> ExperimentConfig:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid json: {exc}") from exc
    return config_from_json(obj)


# ---------------------------------------------------------------------------
# oracle suites


def _suite(quantity: str, value: float, stderr: float, bound: float, ok: bool) -> dict:
    return {
        "quantity": quantity,
        "value": value,
        "stderr": stderr,
        "bound": bound,
        "pass": bool(ok),
    }


def _prop4_suite(master_seed: int, N: int, draws: int) -> dict:
    spec = spectral.gaussian_spec(0.5, 1.0)
    basis = spectral.spectral_basis(spec, N)
    expected, _ = theory.expected_cos_product(spec, N, truncation=200)
    vals = np.empty(draws)
    for i in range(draws):
        stream = sampling.child_stream(master_seed, "prop4", N, i)
        nodes = sampling.sample_hermite_ensemble(spec, N, stream)
        vals[i] = theory.cos_product_statistic(basis, nodes)
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(draws))
    return _suite(f"prop4_gaussian_N{N}", mean, se, expected, abs(mean - expected) <= 3 * se)


def _theorem1_suite(master_seed: int, draws: int) -> dict:
    spec = spectral.gaussian_spec(0.5, 1.0)
    worst = -math.inf
    ok = True
    for N in range(5, 16):
        bound = theory.theorem_bound(spec, N, g_norm1=1.0)
        errs = np.empty(draws)
        for i in range(draws):
            stream = sampling.child_stream(master_seed, "thm1", N, i)
            nodes = sampling.sample_hermite_ensemble(spec, N, stream)
            rule = quadrature.solve_weights(spec, nodes, CONSTANT_ONE)
            errs[i] = quadrature.squared_error(rule)
        ratio = float(errs.mean() / bound)
        worst = max(worst, ratio)
        ok = ok and ratio <= 1.0
    return _suite("theorem1_gaussian_mean_vs_bound", worst, 0.0, 1.0, ok)


def _cauchy_binet_suite(master_seed: int, trials: int) -> dict:
    spec = spectral.gaussian_spec(0.5, 1.0)
    N = 5
    basis = spectral.spectral_basis(spec, N)
    min_slack = math.inf
    for i in range(trials):
        stream = sampling.child_stream(master_seed, "cb", i)
        nodes = baselines.mc_nodes(spec, N, stream)
        E = basis.eval_matrix(nodes.points)
        scales = np.sqrt(np.sum(E * E, axis=1))
        _, logdet_scaled = np.linalg.slogdet(E / scales[:, None])
        logdet_e2 = 2.0 * (logdet_scaled + float(np.sum(np.log(scales))))
        K = quadrature.gram_matrix(spec, nodes)
        logdet_k = float(np.linalg.slogdet(K)[1])
        slack = logdet_k - (float(np.sum(np.log(basis.eigenvalues))) + logdet_e2)
        min_slack = min(min_slack, slack)
    return _suite("cauchy_binet_log_slack", min_slack, 0.0, -1e-8, min_slack >= -1e-8)


def _rank1_suite(master_seed: int, trials: int) -> dict:
    worst = 0.0
    gen = np.random.default_rng(sampling.derive_seed(master_seed, "rank1"))
    for _ in range(trials):
        A = gen.standard_normal((4, 10))
        i = int(gen.integers(0, 10))
        rho = float(gen.uniform(0.1, 3.0))
        _, predicted = theory.leverage_rank1_update(A, i, rho)
        A2 = A.copy()
        A2[:, i] *= math.sqrt(1.0 + rho)
        direct, _ = theory.leverage_scores(A2)
        worst = max(worst, float(np.abs(predicted - direct).max()))
    return _suite("rank1_update_max_abs_diff", worst, 0.0, 1e-10, worst <= 1e-10)


def _maclaurin_suite(master_seed: int, trials: int) -> dict:
    import itertools

    gen = np.random.default_rng(sampling.derive_seed(master_seed, "maclaurin"))
    worst = 0.0
    for _ in range(trials):
        m = int(gen.integers(4, 13))
        nu = gen.uniform(0.0, 1.0, m)
        ell = int(gen.integers(2, min(m, 10) + 1))
        p, bound = theory.maclaurin_check(nu, ell)
        brute = sum(
            float(np.prod(nu[list(comb)])) for comb in itertools.combinations(range(m), ell)
        )
        denom = max(brute, 1e-300)
        worst = max(worst, abs(p - brute) / denom)
        if p > bound * (1 + 1e-12):
            worst = math.inf
    return _suite("maclaurin_dp_vs_bruteforce_rel", worst, 0.0, 1e-10, worst <= 1e-10)


def _rate_proxy_suite() -> dict:
    spec = spectral.korobov_spec(1, 1)
    worst_lo, worst_hi = math.inf, 0.0
    for N in range(10, 201, 10):
        sig, proxy = theory.eigenvalue_rate_proxy(spec, N)
        ratio = sig / proxy
        worst_lo = min(worst_lo, ratio)
        worst_hi = max(worst_hi, ratio)
    ok = worst_lo >= 0.1 and worst_hi <= 10.0
    return _suite("rate_proxy_korobov_d1_ratio", worst_hi, 0.0, 10.0, ok)


def _finite_rank_suite(master_seed: int, trials: int) -> dict:
    spec = spectral.truncate(spectral.gaussian_spec(0.5, 1.0), 8)
    value, _ = theory.expected_cos_product(spec, 8, truncation=8)
    worst = abs(value - 1.0)
    for i in range(trials):
        stream = sampling.child_stream(master_seed, "frank", i)
        nodes = sampling.dpp_nodes(spec, 8, stream)
        rule = quadrature.solve_weights(spec, nodes, CONSTANT_ONE)
        worst = max(worst, quadrature.squared_error(rule))
    return _suite("finite_rank_exactness", worst, 0.0, 1e-8, worst <= 1e-8)


def run_oracles(master_seed: int = 2026, fast: bool = False) -> list[dict]:
    """All oracle suites as JSON-ready dicts; `fast` shrinks the Monte Carlo
    sizes for smoke runs."""
    draws = 400 if fast else 2000
    thm_draws = 50 if fast else 200
    trials = 30 if fast else 100
    report = [
        _prop4_suite(master_seed, 2, draws),
        _prop4_suite(master_seed, 3, draws),
        _theorem1_suite(master_seed, thm_draws),
        _cauchy_binet_suite(master_seed, trials),
        _rank1_suite(master_seed, trials),
        _maclaurin_suite(master_seed, trials),
        _rate_proxy_suite(),
        _finite_rank_suite(master_seed, 20),
    ]
    return report
