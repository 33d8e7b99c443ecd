"""Offline trace analysis, sensitivity sweeps and report arithmetic."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Sequence

from .geometry import in_fov
from .model import camera_fpr, tolerable_latency
from .oracle import feasible_latency_scan
from .trace import ScenarioTrace, ground_truth_trajectory
from .types import (
    KinematicState,
    L0_FIXED,
    LatencyEstimate,
    ModelParams,
    constant_separation_trajectory,
)

OVER_MAX = math.inf  # sweep cell needing more than the fastest grid rate


def fraction_of_provisioned(max_total_fpr: float, num_cameras: int, params: ModelParams) -> float:
    """Share of a fully provisioned system the peak demand represents.

    The reference is every camera running at the maximum rate; rounded to
    two decimals for reporting.
    """
    if num_cameras < 1:
        raise ValueError("need at least one camera")
    _, cap = params.fpr_bounds()
    return round(max_total_fpr / (num_cameras * cap), 2)


@dataclass
class AnalysisResult:
    records: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def analyze_trace(
    trace: ScenarioTrace,
    params: ModelParams,
    mrf: bool = False,
    collision_radius: float = 0.5,
) -> AnalysisResult:
    """Per-tick per-camera required rates over a recorded trace.

    Post-run analysis uses the recorded future of each actor (a single
    known trajectory) and the latency the trace was recorded at as the
    reference latency l0.
    """
    l0 = trace.operating_latency()
    fixed = params.replace(l0_policy=L0_FIXED)
    out = AnalysisResult()
    per_camera_max: dict[str, float] = {c.camera_id: 0.0 for c in trace.cameras}
    max_total = 0.0
    max_total_t = 0.0
    any_infeasible = False

    for k, tick in enumerate(trace.ticks):
        estimates: list[tuple[str, LatencyEstimate]] = []
        for aid in trace.actor_ids:
            traj = ground_truth_trajectory(trace, aid, k)
            estimates.append((aid, tolerable_latency(tick.ego, traj, l0, fixed)))
        for aid, est in estimates:
            out.records.append(
                {
                    "tick": k,
                    "t": tick.t,
                    "actor": aid,
                    "latency": est.latency,
                }
            )
        total = 0.0
        for cam in trace.cameras:
            members = {
                aid for aid, st in tick.actors.items() if in_fov(tick.ego, st, cam)
            }
            rep = camera_fpr(estimates, members, params)
            any_infeasible = any_infeasible or rep.infeasible
            total += rep.fpr
            cid = cam.camera_id
            per_camera_max[cid] = max(per_camera_max[cid], rep.fpr)
            out.records.append(
                {
                    "tick": k,
                    "t": tick.t,
                    "camera": cid,
                    "fpr": rep.fpr,
                    "latency": rep.latency,
                    "binding_actor": rep.binding_actor,
                    "infeasible": rep.infeasible,
                }
            )
        if total > max_total:
            max_total = total
            max_total_t = tick.t

    out.summary = {
        "ticks": len(trace.ticks),
        "cameras": len(trace.cameras),
        "max_fpr_per_camera": per_camera_max,
        "max_total_fpr": max_total,
        "max_total_fpr_t": max_total_t,
        "fraction_of_provisioned": fraction_of_provisioned(
            max_total, max(1, len(trace.cameras)), params
        ),
        "any_infeasible": any_infeasible,
    }

    if mrf:
        from .oracle import scenario_mrf
        from .scenarios import script_from_dict

        script_obj = trace.metadata.get("script")
        if not script_obj:
            raise ValueError("trace metadata carries no scenario script; cannot compute MRF")
        value = scenario_mrf(
            script_from_dict(script_obj), params, collision_radius=collision_radius
        )
        out.summary["mrf"] = value
        out.summary["mrf_infeasible_at_max"] = value is None
    return out


def required_fpr_cell(
    ego_speed: float,
    actor_speed: float,
    separation: float,
    params: ModelParams,
    l0: float | None = None,
) -> float | None:
    """Minimum required rate for one (ego speed, actor speed) sweep cell.

    The synthetic actor holds the separation budget constant while reporting
    a constant speed. Returns the rate in Hz, OVER_MAX when only the
    zero-latency limit is safe (a faster-than-grid rate would be needed), or
    None when even instantaneous perception cannot avoid the collision.
    """
    if separation <= 0.0:
        raise ValueError("separation must be > 0")
    ego = KinematicState(x=0.0, y=0.0, v=ego_speed, a=0.0, heading=0.0)
    traj = constant_separation_trajectory(separation, actor_speed, duration=params.horizon)
    l0_eff = params.latency_min if l0 is None else l0
    est = tolerable_latency(ego, traj, l0_eff, params)
    if not est.infeasible:
        return 1.0 / est.latency
    if feasible_latency_scan(ego, traj, l0_eff, 0.0, params):
        return OVER_MAX
    return None


def sweep_grid(
    separation: float,
    ego_speeds: Sequence[float],
    actor_speeds: Sequence[float],
    params: ModelParams,
    l0: float | None = None,
) -> list[list[float | None]]:
    """Rows indexed by ego speed, columns by actor speed."""
    return [
        [required_fpr_cell(ve, va, separation, params, l0) for va in actor_speeds]
        for ve in ego_speeds
    ]


def format_cell(value: float | None, params: ModelParams) -> str:
    if value is None:
        return "INFEASIBLE"
    _, cap = params.fpr_bounds()
    if math.isinf(value):
        return f">{cap:g}"
    return f"{round(value, 4):g}"


def write_sweep_csv(
    grid: list[list[float | None]],
    ego_speeds: Sequence[float],
    actor_speeds: Sequence[float],
    params: ModelParams,
    dest: str | Path | IO[str],
) -> None:
    """Dense CSV with axis headers in m/s; cells are rates or sentinels."""

    def _write(fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["ve0_mps\\van_mps"] + [f"{v:g}" for v in actor_speeds])
        for ve, row in zip(ego_speeds, grid):
            w.writerow([f"{ve:g}"] + [format_cell(c, params) for c in row])

    if hasattr(dest, "write"):
        _write(dest)
    else:
        with open(dest, "w", newline="") as fh:
            _write(fh)
