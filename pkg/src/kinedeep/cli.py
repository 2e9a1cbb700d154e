"""Command-line entry point.

One binary with subcommands: fk, jacobian, gradcheck, ik, synth, train,
eval, reproduce. Every run that writes artifacts also writes a JSON
manifest next to them (resolved configuration, seed, inputs, outputs, tool
version, wall-clock duration); re-running a command with the same seed
reproduces its outputs byte for byte.

Exit codes: 0 success; 1 validation or parse error; 2 numerical failure
(non-finite values); 3 an acceptance-style check failed (gradcheck
tolerance or a reproduce ordering).

The default skeleton is the built-in 23-joint hand; --skeleton or the
KINEDEEP_SKELETON environment variable select a config file.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import replace

import numpy as np

from . import __version__, bench, fileio, ik_pso
from . import kinematics as kin
from . import loss as loss_mod
from . import regressor as reg
from . import skeleton as sk

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2
EXIT_CHECK_FAILED = 3

SKELETON_ENV = "KINEDEEP_SKELETON"


class _CliError(Exception):
    def __init__(self, message, code=EXIT_INVALID):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; here 1 means "bad input"
    def error(self, message):
        raise _CliError(f"{self.prog}: {message}")


def _resolve_skeleton(path) -> sk.Skeleton:
    path = path or os.environ.get(SKELETON_ENV)
    if path is None:
        return sk.default_hand()
    return sk.load_skeleton(path)


def _manifest_path(out_path) -> str:
    return str(out_path) + ".manifest.json"


def _write_manifest(path, subcommand, config, seed, inputs, outputs, started):
    payload = {
        "tool": "kinedeep",
        "version": __version__,
        "subcommand": subcommand,
        "config": config,
        "seed": seed,
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "duration_s": time.monotonic() - started,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_fk(args) -> int:
    started = time.monotonic()
    skel = _resolve_skeleton(args.skeleton)
    name, poses = fileio.read_pose_file(args.poses, expected_dims=skel.n_dofs)
    joints = (kin.forward_kinematics_batch(skel, poses)
              if len(poses) else np.zeros((0, skel.n_joints, 3)))
    fileio.write_joint_file(args.out, skel.name, joints)
    _write_manifest(_manifest_path(args.out), "fk",
                    {"skeleton": skel.name, "frames": int(len(poses))},
                    None, [args.poses], [args.out], started)
    print(f"fk: {len(poses)} poses -> {args.out}")
    return EXIT_OK


def cmd_jacobian(args) -> int:
    started = time.monotonic()
    skel = _resolve_skeleton(args.skeleton)
    name, poses = fileio.read_pose_file(args.poses, expected_dims=skel.n_dofs)
    with open(args.out, "w") as fh:
        fh.write(f"# kinedeep-jacobian v1 skeleton={skel.name} "
                 f"rows={3 * skel.n_joints} cols={skel.n_dofs}\n")
        for pose in poses:
            _, jac = kin.fk_jacobian(skel, pose)
            fh.write(",".join(repr(float(v)) for v in jac.reshape(-1)) + "\n")
    _write_manifest(_manifest_path(args.out), "jacobian",
                    {"skeleton": skel.name, "frames": int(len(poses))},
                    None, [args.poses], [args.out], started)
    print(f"jacobian: {len(poses)} poses -> {args.out}")
    return EXIT_OK


def _gradcheck_fk(skel, rng, trials):
    worst = 0.0
    eps = np.eye(skel.n_dofs) * 1e-5
    for _ in range(trials):
        theta = rng.uniform(skel.dof_lower, skel.dof_upper)
        _, jac = kin.fk_jacobian(skel, theta)
        plus = kin.forward_kinematics_batch(skel, theta[None, :] + eps)
        minus = kin.forward_kinematics_batch(skel, theta[None, :] - eps)
        fd = (plus - minus).reshape(skel.n_dofs, -1).T / 2e-5
        worst = max(worst, float(np.max(np.abs(jac - fd) / (1.0 + np.abs(fd)))))
    return worst


def _gradcheck_loss(skel, rng, trials):
    span = skel.dof_upper - skel.dof_lower
    worst = 0.0
    ev = list(skel.eval_subset)
    for _ in range(trials):
        theta = rng.uniform(skel.dof_lower + 0.01 * span,
                            skel.dof_upper - 0.01 * span)
        near = theta + rng.normal(scale=0.02, size=theta.shape)
        target = kin.forward_kinematics_batch(skel, near[None], joint_indices=ev)[0]
        report = loss_mod.total_loss(skel, theta, target, lam=1.0)
        fd = np.empty(skel.n_dofs)
        for d in range(skel.n_dofs):
            step = np.zeros(skel.n_dofs)
            step[d] = 1e-5
            up = loss_mod.total_loss(skel, theta + step, target, lam=1.0).total
            dn = loss_mod.total_loss(skel, theta - step, target, lam=1.0).total
            fd[d] = (up - dn) / 2e-5
        worst = max(worst, float(np.max(np.abs(report.grad - fd) / (1.0 + np.abs(fd)))))
    return worst


def _gradcheck_net(skel, rng, samples):
    run = reg.init(reg.MlpConfig((6, 8, skel.n_dofs), seed=int(rng.integers(2**31))),
                   mode="ours")
    feats = rng.normal(size=(samples, 6))
    thetas = rng.uniform(skel.dof_lower, skel.dof_upper, size=(samples, skel.n_dofs))
    targets = kin.forward_kinematics_batch(skel, thetas,
                                           joint_indices=list(skel.eval_subset))
    _, (gw, gb) = reg.backward_through_model(run, feats, targets, skel, lam=1.0)
    worst = 0.0
    h = 1e-5
    for li, mat in enumerate(run.weights):
        it = np.nditer(mat, flags=["multi_index"])
        for _ in it:
            i = it.multi_index
            orig = mat[i]
            mat[i] = orig + h
            up, _ = reg.backward_through_model(run, feats, targets, skel, lam=1.0)
            mat[i] = orig - h
            dn, _ = reg.backward_through_model(run, feats, targets, skel, lam=1.0)
            mat[i] = orig
            fd = (up - dn) / (2 * h)
            worst = max(worst, abs(gw[li][i] - fd) / (1.0 + abs(fd)))
    return worst


def cmd_gradcheck(args) -> int:
    skel = _resolve_skeleton(args.skeleton)
    if args.trials < 1:
        raise _CliError("--trials must be >= 1")
    rng = np.random.default_rng(args.seed)
    fk_err = _gradcheck_fk(skel, rng, args.trials)
    loss_err = _gradcheck_loss(skel, rng, min(args.trials, 20))
    net_err = _gradcheck_net(skel, rng, min(args.trials, 16))
    print(f"fk-jacobian   max rel err {fk_err:.3e}  (tolerance 1e-06)")
    print(f"loss-gradient max rel err {loss_err:.3e}  (tolerance 1e-06)")
    print(f"net-through-model max rel err {net_err:.3e}  (tolerance 1e-05)")
    if fk_err < 1e-6 and loss_err < 1e-6 and net_err < 1e-5:
        print("gradcheck: PASS")
        return EXIT_OK
    print("gradcheck: FAIL")
    return EXIT_CHECK_FAILED


def cmd_ik(args) -> int:
    started = time.monotonic()
    skel = _resolve_skeleton(args.skeleton)
    name, frames = fileio.read_joint_file(args.targets)
    n_eval = len(skel.eval_subset)
    if frames.shape[0] and frames.shape[1] == skel.n_joints:
        frames = frames[:, list(skel.eval_subset), :]
    elif frames.shape[0] and frames.shape[1] != n_eval:
        raise _CliError(
            f"{args.targets}: frames carry {frames.shape[1]} joints, expected "
            f"{n_eval} (eval subset) or {skel.n_joints} (all)"
        )
    config = ik_pso.PsoConfig(
        swarm_size=args.swarm, iterations=args.iters, seed=args.seed,
        polish_steps=50 if args.polish else 0,
    )
    results = ik_pso.fit_batch(skel, frames, config, warm_start=args.warm_start)
    fileio.write_pose_file(args.out, skel.name, np.stack([r.theta for r in results]))
    mean, var = ik_pso.residual_stats(results)
    report = {
        "frames": len(results),
        "residual_mean_mm": mean,
        "residual_variance_mm2": var,
        "converged": sum(1 for r in results if r.converged),
        "iterations_used": [r.iterations_used for r in results],
    }
    report_path = args.report or str(args.out) + ".report.json"
    with open(report_path, "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    _write_manifest(_manifest_path(args.out), "ik",
                    {"skeleton": skel.name, "swarm": args.swarm,
                     "iters": args.iters, "warm_start": args.warm_start,
                     "polish": args.polish},
                    args.seed, [args.targets], [args.out, report_path], started)
    print(f"ik: {len(results)} frames, residual mean {mean!r} mm, "
          f"variance {var!r} mm^2")
    return EXIT_OK


def cmd_synth(args) -> int:
    started = time.monotonic()
    skel = _resolve_skeleton(args.skeleton)
    data = bench.make_dataset(skel, n=args.n, noise_sigma_mm=args.sigma,
                              occlusion_prob=args.occlusion, seed=args.seed,
                              interior_margin=args.interior_margin,
                              pose_shape=args.pose_shape)
    fileio.write_dataset(args.out, data)
    _write_manifest(_manifest_path(args.out), "synth",
                    {"skeleton": skel.name, "n": args.n, "sigma": args.sigma,
                     "occlusion": args.occlusion,
                     "interior_margin": args.interior_margin,
                     "pose_shape": args.pose_shape},
                    args.seed, [], [args.out], started)
    print(f"synth: {args.n} samples -> {args.out}")
    return EXIT_OK


# Desk-scale training profile: staged learning rate (warm-up, main phase,
# two decay phases) as fractions of the mode's base rate and of the epoch
# budget. Raw joint-loss gradients at blast-off distances are orders of
# magnitude above their converged scale, so fixed-rate SGD either diverges
# or crawls; the schedule is plain SGD throughout.
_STAGE_PLAN = ((0.01, 0.01), (0.1, 0.015), (1.0 / 3.0, 0.025), (1.0, 0.45),
               (0.3, 0.25), (0.1, 0.25))
_BASE_LR = {"ours": 1e-6, "ours_no_phy": 1e-6, "direct_joint": 1e-6,
            "direct_parameter": 3e-4}


def _stages(base_lr, epochs):
    out = []
    for frac_lr, frac_ep in _STAGE_PLAN:
        ep = max(1, int(round(frac_ep * epochs)))
        out.append((base_lr * frac_lr, ep))
    return out


def _build_run(skel, mode, feature_width, hidden, seed):
    ev = len(skel.eval_subset)
    out_width = 3 * ev if mode == "direct_joint" else skel.n_dofs
    output_scale = None
    if mode in ("ours", "ours_no_phy"):
        output_scale = reg.pose_output_scale(skel)
    elif mode == "direct_joint":
        output_scale = (50.0,) * out_width
    cfg = reg.MlpConfig(
        layer_widths=(feature_width, *hidden, out_width),
        seed=seed, input_scale=0.01, input_clip_abs=400.0,
        output_scale=output_scale,
    )
    return reg.init(cfg, mode=mode)


def _train_mode(skel, mode, train_data, val_data, args_lr, batch, epochs, lam,
                seed, staged=True, val_during=False):
    base_lr = args_lr if args_lr is not None else _BASE_LR[mode]
    run = _build_run(skel, mode, train_data.features.shape[1],
                     (256, 256), seed)
    mode_lam = 0.0 if mode == "ours_no_phy" else lam
    plan = _stages(base_lr, epochs) if staged else [(base_lr, epochs)]
    for lr, ep in plan:
        sgd = reg.SgdConfig(batch_size=batch, learning_rate=lr, momentum=0.9,
                            epochs=ep, lam=mode_lam)
        reg.train(run, train_data, skel, sgd,
                  val=val_data if val_during else None)
    return run


def cmd_train(args) -> int:
    started = time.monotonic()
    skel = _resolve_skeleton(args.skeleton)
    train_data = fileio.read_dataset(args.train)
    val_data = fileio.read_dataset(args.val) if args.val else None
    run = _train_mode(skel, args.mode, train_data, val_data,
                      args.lr, args.batch, args.epochs, args.lam, args.seed,
                      staged=not args.flat_lr, val_during=args.val is not None)
    reg.save_checkpoint(run, args.out)
    if val_data is not None:
        joint_err, angle_err, invalid = reg.validation_stats(run, val_data, skel)
        print(f"val joint error {joint_err!r} mm, angle error {angle_err!r} deg, "
              f"invalid fraction {invalid!r}")
    _write_manifest(_manifest_path(args.out), "train",
                    {"skeleton": skel.name, "mode": args.mode, "lr": args.lr,
                     "batch": args.batch, "epochs": args.epochs,
                     "lambda": args.lam, "flat_lr": args.flat_lr},
                    args.seed, [args.train, args.val or ""], [args.out], started)
    print(f"train: mode {args.mode}, {len(run.history)} epochs -> {args.out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    started = time.monotonic()
    skel = _resolve_skeleton(args.skeleton)
    run = reg.load_checkpoint(args.ckpt)
    data = fileio.read_dataset(args.data)
    out = reg.forward(run, data.features)
    fit_cfg = None
    if run.mode == "direct_joint":
        fit_cfg = ik_pso.PsoConfig(seed=args.seed, iterations=args.fit_iters)
        predictions = out.reshape(len(data), len(skel.eval_subset), 3)
    else:
        predictions = out
    report = bench.evaluate(skel, predictions, data, fit_config=fit_cfg)
    with open(args.out, "w") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    if args.curve_csv:
        with open(args.curve_csv, "w") as fh:
            fh.write(report.curve_csv())
    print(report.to_text())
    _write_manifest(_manifest_path(args.out), "eval",
                    {"skeleton": skel.name, "mode": run.mode,
                     "fit_iters": args.fit_iters},
                    args.seed, [args.ckpt, args.data],
                    [args.out] + ([args.curve_csv] if args.curve_csv else []),
                    started)
    return EXIT_OK


# Published reference errors on the NYU protocol; a different data domain,
# printed for context only and never compared against.
_NYU_REFERENCE = (
    ("direct_joint", 17.2, 21.4, None),
    ("direct_parameter", 26.7, 12.2, None),
    ("ours_no_phy", 16.9, 12.0, 0.186),
    ("ours", 16.9, 12.2, 0.009),
)


def _format_table(rows) -> str:
    lines = [f"{'mode':18s} {'joint err (mm)':>16s} {'angle err (deg)':>16s} "
             f"{'invalid frac':>13s}"]
    for mode, joint, angle, invalid in rows:
        inv = "-" if invalid is None or np.isnan(invalid) else repr(round(invalid, 6))
        lines.append(f"{mode:18s} {round(joint, 4)!r:>16} {round(angle, 4)!r:>16} "
                     f"{inv:>13s}")
    return "\n".join(lines)


def cmd_reproduce(args) -> int:
    started = time.monotonic()
    os.makedirs(args.out, exist_ok=True)
    skel = (sk.load_skeleton(args.skeleton) if args.skeleton
            else bench.benchmark_skeleton())
    margin = bench.benchmark_interior_margin()
    t0 = time.monotonic()

    def log(msg):
        print(f"[{time.monotonic()-t0:7.1f}s] {msg}", flush=True)

    log(f"skeleton {skel.name}: J={skel.n_joints} D={skel.n_dofs}")
    train_data = bench.make_dataset(skel, n=args.train_n, noise_sigma_mm=args.sigma,
                                    occlusion_prob=args.occlusion, seed=args.seed,
                                    interior_margin=margin, pose_shape="central")
    val_data = bench.make_dataset(skel, n=args.val_n, noise_sigma_mm=args.sigma,
                                  occlusion_prob=args.occlusion, seed=args.seed + 1,
                                  interior_margin=margin, pose_shape="central")
    log(f"datasets: {args.train_n} train / {args.val_n} val, sigma "
        f"{args.sigma} mm, occlusion {args.occlusion}")

    ev = list(skel.eval_subset)
    modes = ("ours", "ours_no_phy", "direct_joint", "direct_parameter")
    table = {}
    outputs = []
    for mode in modes:
        run = _train_mode(skel, mode, train_data, None, None, args.batch,
                          args.epochs, args.lam, args.seed)
        ckpt = os.path.join(args.out, f"{mode}.ckpt.json")
        reg.save_checkpoint(run, ckpt)
        outputs.append(ckpt)
        out = reg.forward(run, val_data.features)
        if mode == "direct_joint":
            pred_joints = out.reshape(len(val_data), len(ev), 3)
            log(f"{mode}: trained ({len(run.history)} epochs); fitting "
                f"{args.fit_frames} val frames")
            n_fit = min(args.fit_frames, len(val_data))
            fit_cfg = ik_pso.PsoConfig(seed=args.seed, iterations=150,
                                       phase_iterations=75)
            fitted = np.stack([
                ik_pso.angles_from_joints(skel, pred_joints[i], fit_cfg).theta
                for i in range(n_fit)
            ])
            report = bench.evaluate(skel, pred_joints[:n_fit],
                                    val_data.subset(range(n_fit)),
                                    fitted_poses=fitted)
        else:
            report = bench.evaluate(skel, out, val_data)
        table[mode] = report
        log(f"{mode}: joint {report.avg_joint_error_mm:.2f} mm, angle "
            f"{report.avg_angle_error_deg:.2f} deg, invalid "
            f"{report.invalid_pose_fraction:.4f}")

    rows = [(m, table[m].avg_joint_error_mm, table[m].avg_angle_error_deg,
             table[m].invalid_pose_fraction) for m in modes]
    text = _format_table(rows)
    text += ("\n\ncontext: published NYU-protocol reference errors "
             "(different data domain, not comparable):\n")
    text += _format_table(_NYU_REFERENCE)
    text += "\n"

    checks = {
        "ours_joint_le_direct_parameter": bool(
            table["ours"].avg_joint_error_mm
            <= table["direct_parameter"].avg_joint_error_mm),
        "ours_angle_lt_direct_joint_ik": bool(
            table["ours"].avg_angle_error_deg
            < table["direct_joint"].avg_angle_error_deg),
        "ours_invalid_le_1pct": bool(table["ours"].invalid_pose_fraction <= 0.01),
        "ours_invalid_lt_no_phy": bool(
            table["ours"].invalid_pose_fraction
            < table["ours_no_phy"].invalid_pose_fraction),
    }

    table_txt = os.path.join(args.out, "table.txt")
    with open(table_txt, "w") as fh:
        fh.write(text)
    table_json = os.path.join(args.out, "table.json")
    with open(table_json, "w") as fh:
        json.dump({
            "modes": {m: table[m].to_dict() for m in modes},
            "orderings": checks,
        }, fh, indent=2, sort_keys=True)
        fh.write("\n")
    outputs += [table_txt, table_json]
    _write_manifest(os.path.join(args.out, "manifest.json"), "reproduce",
                    {"skeleton": skel.name, "train_n": args.train_n,
                     "val_n": args.val_n, "sigma": args.sigma,
                     "occlusion": args.occlusion, "epochs": args.epochs,
                     "batch": args.batch, "lambda": args.lam,
                     "fit_frames": args.fit_frames,
                     "interior_margin": margin, "pose_shape": "central"},
                    args.seed, [], outputs, started)

    print(text)
    for name, ok in checks.items():
        print(f"check {name}: {'PASS' if ok else 'FAIL'}")
    if all(checks.values()):
        return EXIT_OK
    return EXIT_CHECK_FAILED


def build_parser() -> _Parser:
    parser = _Parser(prog="kinedeep",
                     description="Differentiable hand kinematics toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_skeleton(p):
        p.add_argument("--skeleton", default=None,
                       help=f"skeleton config (default: built-in hand or "
                            f"${SKELETON_ENV})")

    p = sub.add_parser("fk", help="forward kinematics over a pose file")
    add_skeleton(p)
    p.add_argument("--poses", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fk)

    p = sub.add_parser("jacobian", help="analytic Jacobians over a pose file")
    add_skeleton(p)
    p.add_argument("--poses", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_jacobian)

    p = sub.add_parser("gradcheck", help="finite-difference gradient checks")
    add_skeleton(p)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("ik", help="fit poses to target joint frames")
    add_skeleton(p)
    p.add_argument("--targets", required=True, help="joint file")
    p.add_argument("--out", required=True, help="pose file to write")
    p.add_argument("--swarm", type=int, default=64)
    p.add_argument("--iters", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--warm-start", action="store_true")
    p.add_argument("--polish", action=argparse.BooleanOptionalAction, default=True,
                   help="gradient polish after each swarm phase")
    p.add_argument("--report", default=None, help="JSON report path")
    p.set_defaults(func=cmd_ik)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    add_skeleton(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sigma", type=float, default=10.0, help="noise sigma, mm")
    p.add_argument("--occlusion", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--interior-margin", type=float, default=0.0)
    p.add_argument("--pose-shape", choices=("uniform", "central"),
                   default="uniform")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train a regressor on a dataset")
    add_skeleton(p)
    p.add_argument("--mode", choices=reg.MODES, default="ours")
    p.add_argument("--train", required=True, help="training dataset file")
    p.add_argument("--val", default=None, help="validation dataset file")
    p.add_argument("--lr", type=float, default=None,
                   help="base learning rate (default per mode)")
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("--batch", type=int, default=64)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--flat-lr", action="store_true",
                   help="single flat learning rate instead of the staged plan")
    p.add_argument("--out", required=True, help="checkpoint path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a dataset")
    add_skeleton(p)
    p.add_argument("--ckpt", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="JSON report path")
    p.add_argument("--curve-csv", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fit-iters", type=int, default=150,
                   help="swarm iterations for direct_joint angle fitting")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("reproduce",
                       help="train all four modes and print the comparison table")
    p.add_argument("--skeleton", default=None,
                   help="override the benchmark skeleton")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-n", type=int, default=20000)
    p.add_argument("--val-n", type=int, default=2000)
    p.add_argument("--sigma", type=float, default=10.0)
    p.add_argument("--occlusion", type=float, default=0.1)
    p.add_argument("--epochs", type=int, default=300)
    p.add_argument("--batch", type=int, default=64)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--fit-frames", type=int, default=2000,
                   help="val frames to fit for direct_joint angle metrics")
    p.set_defaults(func=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _CliError as e:
        print(str(e), file=sys.stderr)
        return e.code
    except (sk.SkeletonError, fileio.FileFormatError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except reg.NumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
