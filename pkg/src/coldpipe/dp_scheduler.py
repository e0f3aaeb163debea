"""Exact cold-start makespan minimization over layer partitions and device
assignments.

State space: (S, j, d) = minimum completion time after scheduling layers
1..j with the device subset S, the segment ending at layer j running on
device d in S.  Subsets are bitmasks, so masks are processed in increasing
numeric order (every proper subset precedes its superset) and the whole
j-column for one (S, d) pair is computed in a single vectorized step.

Tie-breaking is pinned for reproducibility: within a state, candidates are
compared by (finish time, split point, predecessor device); at answer
extraction, by (finish time, number of devices used, mask, device).
Improvements are strict, so first-found candidates win exact ties.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cost_tables import CostTables
from .errors import InfeasibleError, PlanError

MAX_DEVICES = 24  # 2**K state tables; beyond this the instance is refused


@dataclass(frozen=True)
class PlanStage:
    """One pipeline stage: device runs layers start_layer..end_layer."""

    device: int
    start_layer: int
    end_layer: int

    @property
    def layer_count(self) -> int:
        return self.end_layer - self.start_layer + 1


@dataclass(frozen=True)
class Plan:
    """Ordered pipeline stages covering layers 1..L with distinct devices."""

    stages: tuple[PlanStage, ...]

    @property
    def devices(self) -> tuple[int, ...]:
        return tuple(s.device for s in self.stages)

    @property
    def layer_counts(self) -> tuple[int, ...]:
        return tuple(s.layer_count for s in self.stages)

    def layer_share(self, device: int) -> int:
        """Number of layers assigned to the given device index (0 if unused)."""
        return sum(s.layer_count for s in self.stages if s.device == device)


def validate_plan(plan: Plan, tables: CostTables, check_memory: bool = True) -> None:
    """Raise PlanError unless the plan covers layers 1..L contiguously with
    distinct in-range devices (and, optionally, fits each device's memory)."""
    if not plan.stages:
        raise PlanError("plan has no stages")
    if plan.stages[0].start_layer != 1:
        raise PlanError("first stage must start at layer 1")
    if plan.stages[-1].end_layer != tables.num_layers:
        raise PlanError(f"last stage must end at layer {tables.num_layers}")
    prev_end = 0
    for stage in plan.stages:
        if stage.start_layer != prev_end + 1:
            raise PlanError(
                f"stage starting at layer {stage.start_layer} is not contiguous "
                f"with previous end {prev_end}")
        if stage.start_layer > stage.end_layer:
            raise PlanError(f"empty stage {stage}")
        if not 0 <= stage.device < tables.num_devices:
            raise PlanError(f"unknown device index {stage.device}")
        prev_end = stage.end_layer
    devices = [s.device for s in plan.stages]
    if len(set(devices)) != len(devices):
        raise PlanError(f"devices reused across stages: {devices}")
    if check_memory:
        for stage in plan.stages:
            need = tables.mem_footprint(stage.start_layer, stage.end_layer)
            have = tables.memory_bytes[stage.device]
            if need > have:
                raise PlanError(
                    f"stage {stage} needs {need:.3e} B but device "
                    f"{tables.devices[stage.device].id} has {have:.3e} B")


def state_count(num_devices: int, num_layers: int) -> int:
    """Size of the state table, K * L * 2**K; refuses oversized fleets."""
    if num_devices < 1 or num_layers < 1:
        raise ValueError("need at least one device and one layer")
    if num_devices > MAX_DEVICES:
        raise ValueError(
            f"{num_devices} devices would need {num_devices} * L * 2**{num_devices} "
            f"states; the solver is limited to {MAX_DEVICES} devices")
    return num_devices * num_layers * (1 << num_devices)


@dataclass
class DpTable:
    """Solved state table plus back-pointers for plan reconstruction."""

    values: np.ndarray       # (2**K, L+1, K) completion times, +inf if unreachable
    split: np.ndarray        # (2**K, L+1, K) final-segment boundary i (0 = base)
    prev_device: np.ndarray  # (2**K, L+1, K) predecessor device (-1 = base)
    num_layers: int
    num_devices: int


@dataclass(frozen=True)
class SolveResult:
    makespan_s: float
    plan: Plan


def compute_table(tables: CostTables) -> DpTable:
    """Fill the full (S, j, d) table bottom-up."""
    L = tables.num_layers
    K = tables.num_devices
    state_count(K, L)  # enforces the fleet-size guard

    pp = tables.prefix_param_bytes
    pw = tables.prefix_workload_flops
    act_bits = tables.activation_bits
    footprint = tables.footprint

    # seg_load[d][i, j] = load time of layers i+1..j on device d (garbage
    # where i >= j; those cells are masked out below).
    seg_load = [(pp[None, :] - pp[:, None]) / tables.disk_bytes_per_s[d]
                for d in range(K)]
    seg_comp = [(pw[None, :] - pw[:, None]) / tables.compute_flops_per_s[d]
                for d in range(K)]
    valid = []
    for d in range(K):
        ok = footprint <= tables.memory_bytes[d]  # already False where i >= j
        ok[0, :] = False  # boundary 0 belongs to the base case, not transitions
        valid.append(ok)

    n_masks = 1 << K
    values = np.full((n_masks, L + 1, K), np.inf)
    split = np.full((n_masks, L + 1, K), -1, dtype=np.int32)
    prev_device = np.full((n_masks, L + 1, K), -1, dtype=np.int32)

    # Base cases: a single segment 1..j on device d, no communication.
    for d in range(K):
        mask = 1 << d
        base = seg_load[d][0, :] + seg_comp[d][0, :]
        feasible = footprint[0, :] <= tables.memory_bytes[d]
        feasible[0] = False
        values[mask, feasible, d] = base[feasible]
        split[mask, feasible, d] = 0
        # prev_device stays -1: the base marker

    big_i = np.int32(np.iinfo(np.int32).max)
    for s_mask in range(1, n_masks):
        if s_mask.bit_count() < 2:
            continue
        for d in range(K):
            if not (s_mask >> d) & 1:
                continue
            sub = s_mask ^ (1 << d)
            load_d = seg_load[d]
            comp_d = seg_comp[d]
            valid_d = valid[d]
            best_val = np.full(L + 1, np.inf)
            best_i = np.full(L + 1, big_i, dtype=np.int32)
            best_d = np.full(L + 1, -1, dtype=np.int32)
            for d_prev in range(K):
                if not (sub >> d_prev) & 1:
                    continue
                prev = values[sub, :, d_prev]
                comm = act_bits / tables.min_link_bits_per_s[d_prev, d]
                cand = (np.maximum(load_d, prev[:, None]) + comm[:, None]) + comp_d
                cand = np.where(valid_d, cand, np.inf)
                idx = np.argmin(cand, axis=0).astype(np.int32)
                vals = cand[idx, np.arange(L + 1)]
                finite = vals < np.inf
                better = finite & ((vals < best_val)
                                   | ((vals == best_val) & (idx < best_i)))
                best_val[better] = vals[better]
                best_i[better] = idx[better]
                best_d[better] = d_prev
            reached = best_val < np.inf
            values[s_mask, reached, d] = best_val[reached]
            split[s_mask, reached, d] = best_i[reached]
            prev_device[s_mask, reached, d] = best_d[reached]

    return DpTable(values=values, split=split, prev_device=prev_device,
                   num_layers=L, num_devices=K)


def best_final_state(table: DpTable) -> tuple[float, int, int]:
    """Minimum over all (S, d) of the full-model completion time.

    Ties prefer fewer devices, then the smaller mask, then the smaller
    device index.  Raises InfeasibleError if every state is unreachable.
    """
    finals = table.values[:, table.num_layers, :]
    best = finals.min()
    if not np.isfinite(best):
        raise InfeasibleError(
            "no layer partition satisfies the per-device memory constraints")
    masks, devs = np.nonzero(finals == best)
    order = min(range(len(masks)),
                key=lambda k: (int(masks[k]).bit_count(), masks[k], devs[k]))
    return float(best), int(masks[order]), int(devs[order])


def reconstruct(table: DpTable, final_mask: int, final_device: int) -> Plan:
    """Walk back-pointers from (final_mask, L, final_device) to the base
    marker, emitting stages in pipeline order."""
    if not np.isfinite(table.values[final_mask, table.num_layers, final_device]):
        raise ValueError("cannot reconstruct from an unreachable state")
    stages: list[PlanStage] = []
    mask, j, dev = final_mask, table.num_layers, final_device
    for _ in range(table.num_devices + 1):
        i = int(table.split[mask, j, dev])
        d_prev = int(table.prev_device[mask, j, dev])
        if i < 0 or not (mask >> dev) & 1 or i >= j:
            raise RuntimeError(f"corrupt back-pointer at state ({mask}, {j}, {dev})")
        stages.append(PlanStage(device=dev, start_layer=i + 1, end_layer=j))
        if i == 0:
            if d_prev != -1:
                raise RuntimeError("base state carries a predecessor device")
            stages.reverse()
            return Plan(stages=tuple(stages))
        mask, j, dev = mask ^ (1 << dev), i, d_prev
    raise RuntimeError("back-pointer chain longer than the device count")


def solve(tables: CostTables) -> SolveResult:
    """Exact optimum of the cold-start makespan for this scenario."""
    table = compute_table(tables)
    makespan, mask, dev = best_final_state(table)
    plan = reconstruct(table, mask, dev)
    validate_plan(plan, tables, check_memory=True)
    return SolveResult(makespan_s=makespan, plan=plan)
