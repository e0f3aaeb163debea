"""Cold-start timeline evaluation for an arbitrary plan.

This is the single source of truth for what a plan costs: the solver's
optimum is cross-checked against it, the brute-force oracle is built on it,
and the Gantt renderers and CSV writer consume its output.

Per stage n (with finish_0 = 0):
    start_n  = max(load_n, finish_{n-1})
    finish_n = start_n + comm_n + comp_n      (comm_1 = 0)
    wait_n   = max(0, finish_{n-1} - load_n)  (idle after loading)
Loading starts at time 0 on every device; communication into a stage is
booked at the start of its active window, on the receiving device.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cost_tables import CostTables
from .dp_scheduler import Plan, validate_plan


@dataclass(frozen=True)
class StageTiming:
    """Resolved intervals for one pipeline stage on its device."""

    device: int
    start_layer: int
    end_layer: int
    load_s: float   # disk read, interval [0, load_s]
    comm_s: float   # activation transfer in, [start_s, start_s + comm_s]
    comp_s: float   # forward compute, [start_s + comm_s, finish_s]
    start_s: float
    finish_s: float
    wait_s: float   # idle between load completion and upstream finish


@dataclass(frozen=True)
class Timeline:
    """Per-stage schedule plus the overall makespan."""

    stages: tuple[StageTiming, ...]
    makespan_s: float

    @property
    def total_load_s(self) -> float:
        return sum(s.load_s for s in self.stages)

    @property
    def total_comm_s(self) -> float:
        return sum(s.comm_s for s in self.stages)

    @property
    def total_comp_s(self) -> float:
        return sum(s.comp_s for s in self.stages)

    @property
    def total_wait_s(self) -> float:
        return sum(s.wait_s for s in self.stages)

    def to_dict(self) -> dict:
        """Plain-data form consumed by the Gantt renderers and JSON output."""
        return {
            "makespan_s": self.makespan_s,
            "stages": [
                {
                    "device": s.device,
                    "start_layer": s.start_layer,
                    "end_layer": s.end_layer,
                    "load_s": s.load_s,
                    "comm_s": s.comm_s,
                    "comp_s": s.comp_s,
                    "start_s": s.start_s,
                    "finish_s": s.finish_s,
                    "wait_s": s.wait_s,
                }
                for s in self.stages
            ],
        }


def evaluate(plan: Plan, tables: CostTables, check_memory: bool = True) -> Timeline:
    """Run the timeline recurrence over the plan's stages."""
    validate_plan(plan, tables, check_memory=check_memory)
    stages: list[StageTiming] = []
    finish_prev = 0.0
    prev_device = None
    for stage in plan.stages:
        load = tables.t_load(stage.start_layer, stage.end_layer, stage.device)
        comp = tables.t_comp(stage.start_layer, stage.end_layer, stage.device)
        if prev_device is None:
            comm = 0.0
        else:
            comm = tables.t_comm(prev_device, stage.device, stage.start_layer - 1)
        start = max(load, finish_prev)
        finish = (start + comm) + comp
        wait = max(0.0, finish_prev - load)
        stages.append(StageTiming(
            device=stage.device,
            start_layer=stage.start_layer,
            end_layer=stage.end_layer,
            load_s=float(load),
            comm_s=float(comm),
            comp_s=float(comp),
            start_s=float(start),
            finish_s=float(finish),
            wait_s=float(wait),
        ))
        finish_prev = finish
        prev_device = stage.device
    return Timeline(stages=tuple(stages), makespan_s=float(finish_prev))


@dataclass(frozen=True)
class BubbleReport:
    """Obstructive idle time per stage (loading done, input not yet there).

    Idle after a stage's compute could be filled by later requests and does
    not affect the makespan, so it is not reported here.
    """

    stage_waits: tuple[float, ...]
    total_wait_s: float


def bubble_report(timeline: Timeline) -> BubbleReport:
    waits = tuple(s.wait_s for s in timeline.stages)
    return BubbleReport(stage_waits=waits, total_wait_s=sum(waits))
