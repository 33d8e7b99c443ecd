"""Scenario trace schema and line-delimited file format.

A trace is everything a run recorded: one header line with the tick
interval, camera rig and metadata, then one line per tick carrying the ego
and actor states. All numbers are SI; floats round-trip exactly through the
canonical formatting.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO

from .geometry import CameraConfig
from .types import KinematicState, Trajectory


class TraceFormatError(ValueError):
    """A trace file violated the schema; message names the field and tick."""


@dataclass(frozen=True)
class TickRecord:
    """States of the ego and every actor at one instant."""

    t: float
    ego: KinematicState
    actors: dict[str, KinematicState] = field(default_factory=dict)


@dataclass(frozen=True)
class ScenarioTrace:
    dt: float
    ticks: tuple[TickRecord, ...]
    cameras: tuple[CameraConfig, ...]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.dt <= 0.0:
            raise TraceFormatError(f"dt must be > 0, got {self.dt}")
        ids: set[str] | None = None
        for i, tick in enumerate(self.ticks):
            expected = i * self.dt
            if abs(tick.t - expected) > 1e-9 + 1e-12 * i:
                raise TraceFormatError(
                    f"non-monotone or misaligned time at tick {i}: "
                    f"t={tick.t}, expected {expected}"
                )
            tick_ids = set(tick.actors)
            if ids is None:
                ids = tick_ids
            elif tick_ids != ids:
                raise TraceFormatError(f"actor ids changed at tick {i}")
        object.__setattr__(self, "ticks", tuple(self.ticks))
        object.__setattr__(self, "cameras", tuple(self.cameras))

    @property
    def actor_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.ticks[0].actors)) if self.ticks else ()

    def duration(self) -> float:
        return self.ticks[-1].t if self.ticks else 0.0

    def operating_latency(self) -> float:
        """Processing latency the trace was recorded at (defaults to dt)."""
        fpr0 = self.metadata.get("fpr0")
        return 1.0 / float(fpr0) if fpr0 else self.dt


def _state_to_obj(s: KinematicState) -> dict:
    return {"x": s.x, "y": s.y, "v": s.v, "a": s.a, "heading": s.heading}


def _state_from_obj(obj, where: str) -> KinematicState:
    if not isinstance(obj, dict):
        raise TraceFormatError(f"{where}: expected an object")
    try:
        return KinematicState(
            x=float(obj["x"]),
            y=float(obj["y"]),
            v=float(obj["v"]),
            a=float(obj.get("a", 0.0)),
            heading=float(obj.get("heading", 0.0)),
        )
    except KeyError as e:
        raise TraceFormatError(f"{where}: missing field {e}") from None
    except (TypeError, ValueError) as e:
        raise TraceFormatError(f"{where}: {e}") from None


def save_trace(trace: ScenarioTrace, dest: str | Path | IO[str]) -> None:
    """Write the canonical line-delimited form."""
    header = {
        "dt": trace.dt,
        "cameras": [
            {"camera_id": c.camera_id, "azimuth": c.azimuth, "fov": c.fov}
            for c in trace.cameras
        ],
        "metadata": trace.metadata,
    }
    lines = [json.dumps(header, sort_keys=True)]
    for tick in trace.ticks:
        lines.append(
            json.dumps(
                {
                    "t": tick.t,
                    "ego": _state_to_obj(tick.ego),
                    "actors": {aid: _state_to_obj(s) for aid, s in sorted(tick.actors.items())},
                },
                sort_keys=True,
            )
        )
    text = "\n".join(lines) + "\n"
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        Path(dest).write_text(text)


def load_trace(source: str | Path | IO[str]) -> ScenarioTrace:
    """Parse and validate a trace file (path, file object, or text)."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        p = Path(source)
        if p.exists():
            text = p.read_text()
        else:
            raise TraceFormatError(f"no such trace file: {source}")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise TraceFormatError("empty trace")

    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as e:
        raise TraceFormatError(f"header: invalid JSON ({e})") from None
    if not isinstance(header, dict) or "dt" not in header:
        raise TraceFormatError("header: missing field 'dt'")
    dt = float(header["dt"])
    cameras = []
    for j, cam in enumerate(header.get("cameras", [])):
        try:
            cameras.append(
                CameraConfig(
                    camera_id=str(cam["camera_id"]),
                    azimuth=float(cam["azimuth"]),
                    fov=float(cam["fov"]),
                )
            )
        except (KeyError, TypeError, ValueError) as e:
            raise TraceFormatError(f"header camera {j}: {e}") from None
    metadata = header.get("metadata", {})

    ticks = []
    for i, line in enumerate(lines[1:]):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise TraceFormatError(f"tick {i}: invalid JSON ({e})") from None
        if "t" not in obj:
            raise TraceFormatError(f"tick {i}: missing field 't'")
        if "ego" not in obj:
            raise TraceFormatError(f"tick {i}: missing field 'ego'")
        ego = _state_from_obj(obj["ego"], f"tick {i} ego")
        actors = {
            str(aid): _state_from_obj(s, f"tick {i} actor {aid!r}")
            for aid, s in obj.get("actors", {}).items()
        }
        ticks.append(TickRecord(t=float(obj["t"]), ego=ego, actors=actors))

    return ScenarioTrace(dt=dt, ticks=tuple(ticks), cameras=tuple(cameras), metadata=metadata)


def ground_truth_trajectory(trace: ScenarioTrace, actor_id: str, from_tick: int) -> Trajectory:
    """The actor's recorded future re-based to t = 0 at ``from_tick``.

    This is the singleton trajectory set of offline analysis: the future is
    known, probability 1. A query at the final tick pads a constant-hold
    second sample so the result is still a valid trajectory.
    """
    if not 0 <= from_tick < len(trace.ticks):
        raise IndexError(f"from_tick {from_tick} outside trace of {len(trace.ticks)} ticks")
    if actor_id not in trace.ticks[from_tick].actors:
        raise KeyError(f"unknown actor {actor_id!r}")
    base = trace.ticks[from_tick].t
    samples = [
        (tick.t - base, tick.actors[actor_id]) for tick in trace.ticks[from_tick:]
    ]
    if len(samples) == 1:
        held = samples[0][1]
        samples.append((trace.dt, held))
    return Trajectory(samples=tuple(samples), probability=1.0)
