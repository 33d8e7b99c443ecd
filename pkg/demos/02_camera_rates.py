"""From one traffic scene to per-camera frame-rate requirements.

Builds a five-actor scene around the ego, fans each actor into predicted
futures, aggregates per-actor latencies and folds them into the five-camera
rig by field-of-view membership. Ends with the actor importance ranking a
work scheduler would consume.
"""

from safefpr import (
    DEFAULT_CAMERA_RIG,
    KinematicState,
    ModelParams,
    PredictorConfig,
    evaluate_scene,
    predict_trajectories,
    rank_actors,
)

params = ModelParams(l0_policy="fixed")
ego = KinematicState(x=0.0, y=0.0, v=13.4, a=0.0)  # ~30 mph

scene = {
    "lead": KinematicState(28.0, 0.0, 12.0, -1.5),      # braking lead, same lane
    "oncoming": KinematicState(60.0, 3.5, 15.0, 0.0),   # adjacent lane ahead
    "parked": KinematicState(45.0, -3.5, 0.0, 0.0),     # curbside
    "follower": KinematicState(-20.0, 0.0, 14.0, 0.0),  # closing from behind
    "crossing": KinematicState(18.0, 9.0, 6.0, 0.0),    # left side
}

predictor = PredictorConfig(num_variants=5, decel_spread=4.9)
trajectories = {aid: predict_trajectories(st, predictor) for aid, st in scene.items()}

per_actor, per_camera = evaluate_scene(
    ego, trajectories, DEFAULT_CAMERA_RIG, l0=1 / 30, params=params
)

print("Per-actor tolerable latency (worst predicted future):")
for aid, est in sorted(per_actor.items()):
    lat = "unavoidable" if est.infeasible else f"{est.latency * 1000:7.1f} ms"
    print(f"  {aid:10s} {lat}")

print("\nPer-camera requirements:")
for cam_id, report in sorted(per_camera.items()):
    binding = report.binding_actor or "-"
    flag = "  [no safe latency]" if report.infeasible else ""
    print(f"  {cam_id:13s} {report.fpr:5.1f} frames/s  bound by {binding}{flag}")

total = sum(r.fpr for r in per_camera.values())
print(f"\nTotal demand {total:.1f} frames/s of a {5 * 30} frames/s provisioned system "
      f"({total / 150:.0%})")

print("\nActor importance (inverse latency):")
for rank in rank_actors(per_actor, params):
    tag = " (unbounded)" if rank.unbounded else ""
    print(f"  {rank.actor_id:10s} {rank.importance:5.1f}{tag}")
