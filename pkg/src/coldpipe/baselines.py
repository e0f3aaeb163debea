"""Comparison strategies and a brute-force exact oracle.

Three static baselines:
  single_device  everything on the strongest device, memory deliberately
                 waived (an idealized reference point);
  even           near-equal layer counts, stronger devices first;
  heuristic      layer counts proportional to the harmonic mean of compute
                 and disk speed, stronger devices first.

The default heuristic score is the harmonic mean of raw peak FLOPS and raw
disk bytes/s (dominated by the smaller rate); heuristic_normalized=True
switches to normalizing both by their fleet maxima first, for sensitivity
checks.

brute_force enumerates every stage count, ordered device selection, and
layer composition on small instances, scoring each candidate with the same
timeline evaluator the solver is checked against.
"""

from __future__ import annotations

from itertools import permutations
from typing import Iterator, Sequence

from .cost_tables import CostTables
from .device_model import DeviceProfile
from .dp_scheduler import Plan, PlanStage
from .errors import InfeasibleError
from .timeline import evaluate

STRATEGIES = ("optimal_dp", "even", "heuristic", "single_device", "brute_force")

BRUTE_FORCE_MAX_DEVICES = 5
BRUTE_FORCE_MAX_LAYERS = 10


def _by_strength(devices: Sequence[DeviceProfile]) -> list[int]:
    """Device indices sorted by descending peak compute (index breaks ties)."""
    return sorted(range(len(devices)), key=lambda d: (-devices[d].peak_flops, d))


def _plan_from_counts(ordered_devices: Sequence[int],
                      counts: Sequence[int]) -> Plan:
    stages = []
    start = 1
    for dev, count in zip(ordered_devices, counts):
        if count <= 0:
            continue
        stages.append(PlanStage(device=dev, start_layer=start,
                                end_layer=start + count - 1))
        start += count
    return Plan(stages=tuple(stages))


def single_device_plan(devices: Sequence[DeviceProfile], num_layers: int) -> Plan:
    """All layers on the strongest device.  The memory constraint is waived
    for this strategy; evaluate it with check_memory=False."""
    strongest = _by_strength(devices)[0]
    return Plan(stages=(PlanStage(device=strongest, start_layer=1,
                                  end_layer=num_layers),))


def even_plan(devices: Sequence[DeviceProfile], num_layers: int) -> Plan:
    """Layer counts differing by at most one; remainder layers and earlier
    stages go to stronger devices.  Weakest devices are dropped when there
    are fewer layers than devices."""
    order = _by_strength(devices)[:min(len(devices), num_layers)]
    base, extra = divmod(num_layers, len(order))
    counts = [base + 1 if rank < extra else base for rank in range(len(order))]
    return _plan_from_counts(order, counts)


def heuristic_scores(devices: Sequence[DeviceProfile],
                     normalized: bool = False) -> list[float]:
    """Harmonic mean of compute and disk speed per device."""
    compute = [dev.peak_flops for dev in devices]
    disk = [dev.disk_bytes_per_s for dev in devices]
    if normalized:
        c_max, r_max = max(compute), max(disk)
        compute = [c / c_max for c in compute]
        disk = [r / r_max for r in disk]
    return [2.0 * c * r / (c + r) for c, r in zip(compute, disk)]


def heuristic_plan(devices: Sequence[DeviceProfile], num_layers: int,
                   normalized: bool = False) -> Plan:
    """Layer counts proportional to the harmonic-mean score, rounded by
    largest remainder (remainder ties favor stronger devices)."""
    scores = heuristic_scores(devices, normalized=normalized)
    total = sum(scores)
    order = _by_strength(devices)
    quotas = [num_layers * scores[d] / total for d in order]
    counts = [int(q) for q in quotas]
    remainder = num_layers - sum(counts)
    by_remainder = sorted(range(len(order)),
                          key=lambda rank: (-(quotas[rank] - counts[rank]), rank))
    for rank in by_remainder[:remainder]:
        counts[rank] += 1
    return _plan_from_counts(order, counts)


def plan_for_strategy(strategy: str, devices: Sequence[DeviceProfile],
                      num_layers: int, heuristic_normalized: bool = False) -> Plan:
    """Build the named baseline plan (not valid for optimal_dp/brute_force,
    which need cost tables)."""
    if strategy == "single_device":
        return single_device_plan(devices, num_layers)
    if strategy == "even":
        return even_plan(devices, num_layers)
    if strategy == "heuristic":
        return heuristic_plan(devices, num_layers, normalized=heuristic_normalized)
    raise ValueError(f"no static plan for strategy {strategy!r}")


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All orderings of `total` into `parts` positive integers."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_plans(num_devices: int, num_layers: int) -> Iterator[Plan]:
    """Every (stage count, ordered device selection, composition) candidate."""
    for n_stages in range(1, min(num_devices, num_layers) + 1):
        for selection in permutations(range(num_devices), n_stages):
            for counts in _compositions(num_layers, n_stages):
                yield _plan_from_counts(selection, counts)


def brute_force(tables: CostTables) -> tuple[float, Plan]:
    """Exhaustive exact optimum on guarded-size instances.

    Memory-infeasible candidates are skipped; ties break exactly like the
    solver's: fewer stages first, then smaller boundaries, then smaller
    device indices.
    """
    if tables.num_devices > BRUTE_FORCE_MAX_DEVICES:
        raise ValueError(
            f"brute force is limited to {BRUTE_FORCE_MAX_DEVICES} devices "
            f"(got {tables.num_devices}); use the solver instead")
    if tables.num_layers > BRUTE_FORCE_MAX_LAYERS:
        raise ValueError(
            f"brute force is limited to {BRUTE_FORCE_MAX_LAYERS} layers "
            f"(got {tables.num_layers}); use the solver instead")

    best_key = None
    best: tuple[float, Plan] | None = None
    for plan in enumerate_plans(tables.num_devices, tables.num_layers):
        if any(tables.mem_footprint(s.start_layer, s.end_layer)
               > tables.memory_bytes[s.device] for s in plan.stages):
            continue
        makespan = evaluate(plan, tables, check_memory=False).makespan_s
        key = (makespan, len(plan.stages),
               tuple(s.end_layer for s in plan.stages), plan.devices)
        if best_key is None or key < best_key:
            best_key = key
            best = (makespan, plan)
    if best is None:
        raise InfeasibleError(
            "no layer partition satisfies the per-device memory constraints")
    return best
