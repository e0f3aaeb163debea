"""Scenario sweeps, randomized instance suites, and solver-vs-oracle
verification.

A sweep rebuilds the cost tables at every token length (effective compute
depends on the workload), runs each requested strategy under the shared
timeline evaluator, and reports the solver's improvement over the best
baseline at the same token length.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import baselines, cost_tables, dp_scheduler
from .device_model import DeviceProfile, RadioParams
from .errors import InfeasibleError, PlanError
from .model_profile import ModelConfig, build_profiles
from .presets import TAB1_RANGES
from .timeline import Timeline, evaluate

BASELINE_STRATEGIES = ("even", "heuristic", "single_device")

RELATIVE_TOLERANCE = 1e-9


def close_enough(a: float, b: float, rel: float = RELATIVE_TOLERANCE) -> bool:
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class Scenario:
    """Everything needed to reproduce one experiment run."""

    model: ModelConfig
    devices: tuple[DeviceProfile, ...]
    token_lengths: tuple[int, ...]
    strategies: tuple[str, ...]
    seed: int = 0
    heuristic_normalized: bool = False
    model_name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "devices", tuple(self.devices))
        object.__setattr__(self, "token_lengths", tuple(self.token_lengths))
        object.__setattr__(self, "strategies", tuple(self.strategies))
        if not self.devices:
            raise ValueError("scenario needs at least one device")
        if not self.token_lengths or any(t < 1 for t in self.token_lengths):
            raise ValueError("token_lengths must be nonempty and positive")
        if not self.strategies:
            raise ValueError("scenario needs at least one strategy")
        for s in self.strategies:
            if s not in baselines.STRATEGIES:
                raise ValueError(
                    f"unknown strategy {s!r}; valid: {baselines.STRATEGIES}")


@dataclass(frozen=True)
class ResultRow:
    """One (token length, strategy) cell of a sweep."""

    token_length: int
    strategy: str
    makespan_s: float
    load_s_total: float
    comm_s_total: float
    comp_s_total: float
    wait_s_total: float
    improvement_pct: float | None  # set only on optimal_dp rows
    timeline: Timeline = field(compare=False)


def run_cell(scenario: Scenario, strategy: str,
             tables: cost_tables.CostTables) -> Timeline:
    """Timeline of one strategy on prebuilt tables."""
    if strategy == "optimal_dp":
        result = dp_scheduler.solve(tables)
        return evaluate(result.plan, tables)
    if strategy == "brute_force":
        _, plan = baselines.brute_force(tables)
        return evaluate(plan, tables)
    plan = baselines.plan_for_strategy(
        strategy, scenario.devices, scenario.model.num_layers,
        heuristic_normalized=scenario.heuristic_normalized)
    return evaluate(plan, tables, check_memory=(strategy != "single_device"))


def _run_token_length(scenario: Scenario, t: int) -> list[ResultRow]:
    profiles = build_profiles(scenario.model, t)
    tables = cost_tables.build(profiles, list(scenario.devices), t)
    timelines: dict[str, Timeline] = {}
    for strategy in scenario.strategies:
        try:
            timelines[strategy] = run_cell(scenario, strategy, tables)
        except (InfeasibleError, PlanError) as err:
            raise InfeasibleError(
                f"strategy {strategy!r} at token length {t}: {err}") from err

    baseline_makespans = [timelines[s].makespan_s for s in scenario.strategies
                          if s in BASELINE_STRATEGIES]
    rows = []
    for strategy in scenario.strategies:
        tl = timelines[strategy]
        improvement = None
        if strategy == "optimal_dp" and baseline_makespans:
            best = min(baseline_makespans)
            improvement = (best - tl.makespan_s) / best * 100.0
        rows.append(ResultRow(
            token_length=t,
            strategy=strategy,
            makespan_s=tl.makespan_s,
            load_s_total=tl.total_load_s,
            comm_s_total=tl.total_comm_s,
            comp_s_total=tl.total_comp_s,
            wait_s_total=tl.total_wait_s,
            improvement_pct=improvement,
            timeline=tl,
        ))
    return rows


def run_sweep(scenario: Scenario, max_workers: int = 1) -> list[ResultRow]:
    """One row per (token length, strategy), in scenario order regardless of
    how many worker threads computed the cells."""
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            per_token = list(pool.map(
                lambda t: _run_token_length(scenario, t), scenario.token_lengths))
    else:
        per_token = [_run_token_length(scenario, t) for t in scenario.token_lengths]
    return [row for rows in per_token for row in rows]


def average_improvement_pct(rows: Sequence[ResultRow]) -> float:
    """Mean improvement of the optimal_dp rows over each token length's best
    baseline."""
    values = [r.improvement_pct for r in rows
              if r.strategy == "optimal_dp" and r.improvement_pct is not None]
    if not values:
        raise ValueError("no optimal_dp rows with baselines to compare against")
    return sum(values) / len(values)


# ---------------------------------------------------------------------------
# Randomized small instances for solver-vs-oracle verification.

@dataclass(frozen=True)
class SuiteInstance:
    scenario: Scenario
    single_device_feasible: bool


def _log_uniform(rng: random.Random, lo: float, hi: float) -> float:
    if lo == hi:
        return lo
    return math.exp(rng.uniform(math.log(lo), math.log(hi)))


def _range10(key: str) -> tuple[float, float]:
    lo, hi = TAB1_RANGES[key]
    return lo / 10.0, hi * 10.0


def _quantize(value: float, step: float) -> float:
    """Snap to a multiple of step (a binary fraction of the display unit),
    like real spec sheets do; keeps config round-trips exact."""
    return max(step, round(value / step) * step)


def _random_device(rng: random.Random, idx: int) -> DeviceProfile:
    radio = RadioParams(
        bandwidth_hz=_quantize(_log_uniform(rng, *_range10("bandwidth_hz")), 1.25e5),
        tx_power_up_dbm=rng.uniform(TAB1_RANGES["tx_power_up_dbm"][0] - 10,
                                    TAB1_RANGES["tx_power_up_dbm"][1] + 10),
        tx_power_down_dbm=rng.uniform(TAB1_RANGES["tx_power_down_dbm"][0] - 10,
                                      TAB1_RANGES["tx_power_down_dbm"][1] + 10),
        noise_dbm_per_hz=-174.0,
        distance_m=_log_uniform(rng, *_range10("distance_m")),
        ref_distance_m=1.0,
        path_loss_exp=rng.uniform(2.0, 4.0),
        ref_gain_db=rng.uniform(-57.2, -37.2),
        efficiency=min(1.0, _log_uniform(rng, *_range10("efficiency"))),
    )
    return DeviceProfile(
        id=idx + 1,
        peak_flops=_quantize(_log_uniform(rng, *_range10("peak_flops")), 1.25e11),
        util_ceiling=min(1.0, _log_uniform(rng, *_range10("util_ceiling"))),
        util_rate=_log_uniform(rng, *_range10("util_rate")),
        disk_bytes_per_s=_quantize(
            _log_uniform(rng, *_range10("disk_bytes_per_s")), 1e6),
        memory_bytes=_quantize(_log_uniform(rng, *_range10("memory_bytes")), 1.25e8),
        radio=radio,
    )


def _random_model(rng: random.Random, num_layers: int) -> ModelConfig:
    d_model = rng.choice([256, 512, 1024, 2048, 4096, 8192])
    h_q = rng.choice([2, 4, 8, 16, 32, 40])
    return ModelConfig(
        d_model=d_model,
        h_q=h_q,
        h_kv=rng.randint(1, h_q),
        d_head=rng.choice([32, 64, 128]),
        d_ff=d_model * rng.choice([2, 3, 4]),
        num_layers=num_layers,
        bytes_per_element=2,
    )


def random_instance_suite(count: int, seed: int = 0) -> list[SuiteInstance]:
    """Deterministic-from-seed instances sized for the brute-force oracle
    (at most 4 devices and 8 layers)."""
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = random.Random(seed)
    instances = []
    for _ in range(count):
        num_devices = rng.randint(1, 4)
        num_layers = rng.randint(1, 8)
        model = _random_model(rng, num_layers)
        devices = tuple(_random_device(rng, i) for i in range(num_devices))
        t = round(_log_uniform(rng, 64, 8192))
        scenario = Scenario(
            model=model,
            devices=devices,
            token_lengths=(t,),
            strategies=("optimal_dp", "brute_force"),
            seed=seed,
        )
        profiles = build_profiles(model, t)
        footprint = (sum(p.param_bytes for p in profiles)
                     + max(p.activation_bytes for p in profiles))
        feasible = any(dev.memory_bytes >= footprint for dev in devices)
        instances.append(SuiteInstance(scenario=scenario,
                                       single_device_feasible=feasible))
    return instances


@dataclass(frozen=True)
class VerifyOutcome:
    index: int
    ok: bool
    detail: str
    dp_makespan: float | None = None
    oracle_makespan: float | None = None


Solver = Callable[[cost_tables.CostTables], dp_scheduler.SolveResult]


def verify_suite(instances: Sequence[SuiteInstance],
                 solver: Solver | None = None) -> list[VerifyOutcome]:
    """Check the solver against the brute-force oracle on every instance.

    The solver is injectable (late-bound to dp_scheduler.solve) so the
    harness can prove to itself that it detects a miscosted solver.
    """
    if solver is None:
        solver = dp_scheduler.solve
    outcomes = []
    for idx, inst in enumerate(instances):
        sc = inst.scenario
        t = sc.token_lengths[0]
        profiles = build_profiles(sc.model, t)
        tables = cost_tables.build(profiles, list(sc.devices), t)
        try:
            result = solver(tables)
            dp_value = result.makespan_s
        except InfeasibleError:
            result, dp_value = None, None
        try:
            oracle_value, _ = baselines.brute_force(tables)
        except InfeasibleError:
            oracle_value = None

        if dp_value is None and oracle_value is None:
            outcomes.append(VerifyOutcome(idx, True, "both infeasible"))
            continue
        if dp_value is None or oracle_value is None:
            side = "solver" if dp_value is None else "oracle"
            outcomes.append(VerifyOutcome(
                idx, False, f"only the {side} reports infeasibility",
                dp_value, oracle_value))
            continue
        replay = evaluate(result.plan, tables).makespan_s
        if not close_enough(dp_value, oracle_value):
            detail = f"solver {dp_value!r} != oracle {oracle_value!r}"
            outcomes.append(VerifyOutcome(idx, False, detail, dp_value, oracle_value))
        elif not close_enough(replay, dp_value):
            detail = f"plan replays to {replay!r}, solver claimed {dp_value!r}"
            outcomes.append(VerifyOutcome(idx, False, detail, dp_value, oracle_value))
        else:
            outcomes.append(VerifyOutcome(idx, True, "ok", dp_value, oracle_value))
    return outcomes
