"""Scratch rehearsal v2: envelope bounds + central sampling + full stages."""
import json
import time
import warnings

import numpy as np

warnings.filterwarnings("ignore")

from kinedeep import bench, ik_pso, regressor as reg
from kinedeep import skeleton as sk

t_start = time.perf_counter()

hand = bench.benchmark_skeleton()
margin = bench.benchmark_interior_margin()
print("bench skeleton:", hand.name, "margin:", round(margin, 4), flush=True)

train = bench.make_dataset(hand, n=20000, noise_sigma_mm=10.0, occlusion_prob=0.1,
                           seed=501, interior_margin=margin, pose_shape="central")
val = bench.make_dataset(hand, n=2000, noise_sigma_mm=10.0, occlusion_prob=0.1,
                         seed=502, interior_margin=margin, pose_shape="central")
F = train.features.shape[1]
ev = list(hand.eval_subset)
print(f"datasets ready ({time.perf_counter()-t_start:.0f}s)", flush=True)


def stage_train(run, stages, lam):
    for lr, ep in stages:
        reg.train(run, train, hand, reg.SgdConfig(batch_size=64, learning_rate=lr,
                  momentum=0.9, epochs=ep, lam=lam), val=None)
    return run


def report(tag, run):
    j, a, inv = reg.validation_stats(run, val, hand)
    print(f"{tag:18s} joint={j:7.2f} angle={a:7.2f} inv={inv:.4f} "
          f"epochs={len(run.history)} ({time.perf_counter()-t_start:.0f}s elapsed)",
          flush=True)
    return j, a, inv


results = {}
stats = {}
pose_scales = reg.pose_output_scale(hand, 50)
lr = 1e-6
pose_stages = [(lr/100, 2), (lr/10, 4), (lr/3, 6), (lr, 138), (lr*0.3, 75), (lr*0.1, 75)]

for mode, lam in (("ours", 1.0), ("ours_no_phy", 0.0)):
    cfg = reg.MlpConfig((F, 256, 256, 26), seed=11, input_scale=0.01,
                        input_clip_abs=400.0, output_scale=pose_scales)
    run = reg.init(cfg, mode=mode)
    stage_train(run, pose_stages, lam)
    results[mode] = run
    stats[mode] = report(mode, run)

cfg = reg.MlpConfig((F, 256, 256, 26), seed=11, input_scale=0.01, input_clip_abs=400.0)
run = reg.init(cfg, mode="direct_parameter")
dp_lr = 3e-4
stage_train(run, [(dp_lr/10, 3), (dp_lr, 147), (dp_lr*0.3, 50)], 1.0)
results["direct_parameter"] = run
stats["direct_parameter"] = report("direct_parameter", run)

cfg = reg.MlpConfig((F, 256, 256, 3*len(ev)), seed=11, input_scale=0.01,
                    input_clip_abs=400.0, output_scale=(50.0,)*(3*len(ev)))
run = reg.init(cfg, mode="direct_joint")
stage_train(run, [(lr/100, 2), (lr/10, 4), (lr/3, 6), (lr, 138), (lr*0.3, 80)], 1.0)
results["direct_joint"] = run
stats["direct_joint"] = report("direct_joint", run)

n_fit = 300
out = reg.forward(results["direct_joint"], val.features[:n_fit])
pred_joints = out.reshape(n_fit, len(ev), 3)
t0 = time.perf_counter()
fit_cfg = ik_pso.PsoConfig(seed=9, iterations=150, phase_iterations=75)
fitted = np.stack([
    ik_pso.angles_from_joints(hand, pred_joints[i], fit_cfg).theta
    for i in range(n_fit)
])
fit_time = time.perf_counter() - t0
print(f"IK fit {n_fit} frames in {fit_time:.0f}s ({fit_time/n_fit*1000:.0f} ms/frame)", flush=True)

rot = hand.dof_is_rotation
dj_angle = float(np.degrees(np.abs(fitted[:, rot] - val.thetas[:n_fit, rot]).mean()))

print("orderings:")
print("  (a) ours joint <= dp joint:", stats["ours"][0] <= stats["direct_parameter"][0],
      f"({stats['ours'][0]:.2f} vs {stats['direct_parameter'][0]:.2f})")
print(f"  (b) ours angle < dj+IK angle: {stats['ours'][1] < dj_angle} "
      f"({stats['ours'][1]:.2f} vs {dj_angle:.2f})")
print(f"  (c) ours inv <= 1% and < no_phy: inv_ours={stats['ours'][2]:.4f} "
      f"inv_no_phy={stats['ours_no_phy'][2]:.4f}")
print(f"total {time.perf_counter()-t_start:.0f}s")
