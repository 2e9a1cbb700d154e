"""Feedforward pose regressor trained through the kinematic layer.

The network is a plain ReLU MLP (linear output). Four training modes wire
its output differently:

  ours             output is a pose; joint loss through forward kinematics
                   plus the angle-range penalty (weight lambda)
  ours_no_phy      same, with the penalty off (lambda forced to 0)
  direct_joint     output is the flattened eval-joint coordinates; plain
                   squared error against ground-truth joints
  direct_parameter output is a pose; plain squared error against the
                   ground-truth pose (mixed units: mm for the translation
                   components, radians for angles)

Optimization is stochastic gradient descent with momentum, single-threaded
and bitwise deterministic given (seed, data, config). ``input_scale``
rescales raw mm features once at the input; it is part of the architecture
and of checkpoints (raw joint coordinates span hundreds of mm, which makes
first-layer steps disproportionate at any single learning rate).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import loss as loss_mod
from .kinematics import forward_kinematics_batch
from .skeleton import Skeleton

MODES = ("ours", "ours_no_phy", "direct_joint", "direct_parameter")
CHECKPOINT_FORMAT = "kinedeep-checkpoint"
CHECKPOINT_VERSION = 1


class NumericalError(RuntimeError):
    """Training produced a non-finite loss."""


@dataclass(frozen=True)
class MlpConfig:
    layer_widths: tuple  # input, hidden..., output
    seed: int = 0
    input_scale: float = 1.0
    input_clip_abs: float | None = None  # clamp |feature| before scaling
    output_scale: tuple | None = None  # fixed per-output gains, default 1

    def __post_init__(self):
        object.__setattr__(self, "layer_widths", tuple(int(w) for w in self.layer_widths))
        if len(self.layer_widths) < 2:
            raise ValueError("need at least input and output widths")
        if any(w <= 0 for w in self.layer_widths):
            raise ValueError(f"zero-width layer in {self.layer_widths}")
        if self.output_scale is not None:
            scale = tuple(float(s) for s in self.output_scale)
            if len(scale) != self.layer_widths[-1]:
                raise ValueError("output_scale length must match the output width")
            if any(s <= 0 for s in scale):
                raise ValueError("output_scale entries must be positive")
            object.__setattr__(self, "output_scale", scale)


@dataclass(frozen=True)
class SgdConfig:
    batch_size: int = 512
    learning_rate: float = 0.003
    momentum: float = 0.9
    epochs: int = 200
    lam: float = 1.0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError("momentum must lie in [0, 1)")
        if self.learning_rate <= 0.0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.lam < 0.0:
            raise ValueError("lambda must be >= 0")


@dataclass
class EpochStats:
    train_loss: float
    val_joint_err_mm: float
    val_angle_err_deg: float
    val_invalid_frac: float


class TrainRun:
    """Weights, optimizer state, mode, and per-epoch history."""

    def __init__(self, config: MlpConfig, mode: str, weights, biases,
                 vel_w=None, vel_b=None, history=None):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")
        self.config = config
        self.mode = mode
        self.weights = weights
        self.biases = biases
        self.vel_w = vel_w if vel_w is not None else [np.zeros_like(w) for w in weights]
        self.vel_b = vel_b if vel_b is not None else [np.zeros_like(b) for b in biases]
        self.history = history if history is not None else []

    @property
    def n_layers(self) -> int:
        return len(self.weights)


def pose_output_scale(skel: Skeleton, gain: float = 50.0,
                      max_scale: float = 1.0) -> tuple:
    """Per-DOF output gains that even out joint-loss curvature.

    The joint loss is much stiffer along a proximal flexion (a radian moves
    every descendant by its lever arm) than along a root translation, which
    cripples a single learning rate. Scaling each output by
    gain / ||Jacobian column at the rest pose|| roughly whitens the loss.
    Rotation gains are capped at `max_scale` rad per unit so weakly observed
    distal angles cannot be flung onto wrap-equivalent branches far outside
    their bounds during early training; DOFs that move no eval joint keep
    gain 1. Meant for the pose-emitting modes; direct_parameter regresses
    raw DOFs whose loss is already isotropic.
    """
    from .kinematics import fk_jacobian

    _, jac = fk_jacobian(skel, np.zeros(skel.n_dofs),
                         joint_indices=list(skel.eval_subset))
    norms = np.linalg.norm(jac, axis=0)
    scale = np.where(norms > 1e-6, gain / np.maximum(norms, 1e-6), 1.0)
    scale = np.where(skel.dof_is_rotation, np.minimum(scale, max_scale), scale)
    return tuple(float(s) for s in scale)


def init(config: MlpConfig, mode: str = "ours") -> TrainRun:
    """Seeded uniform init scaled by 1/sqrt(fan_in); zero biases."""
    rng = np.random.default_rng([config.seed, 0])
    weights, biases = [], []
    for fan_in, fan_out in zip(config.layer_widths, config.layer_widths[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return TrainRun(config, mode, weights, biases)


def _forward_acts(run: TrainRun, features: np.ndarray):
    """Layer activations; hidden pre-activations kept for the ReLU mask."""
    h = np.asarray(features, dtype=float)
    if run.config.input_clip_abs is not None:
        # tames the occlusion sentinel (-1000 mm) into an in-scale flag
        h = np.clip(h, -run.config.input_clip_abs, run.config.input_clip_abs)
    h = h * run.config.input_scale
    if h.ndim != 2 or h.shape[1] != run.config.layer_widths[0]:
        raise ValueError(
            f"feature width {h.shape[-1]} does not match input width "
            f"{run.config.layer_widths[0]}"
        )
    acts = [h]
    pre = []
    last = run.n_layers - 1
    for i, (w, b) in enumerate(zip(run.weights, run.biases)):
        z = h @ w + b
        if i < last:
            pre.append(z)
            h = np.maximum(z, 0.0)
        else:
            h = z
            if run.config.output_scale is not None:
                h = h * np.asarray(run.config.output_scale)
        acts.append(h)
    return acts, pre


def forward(run: TrainRun, features: np.ndarray) -> np.ndarray:
    """Network outputs for a batch of feature rows."""
    return _forward_acts(run, features)[0][-1]


def _backprop(run: TrainRun, acts, pre, delta):
    """Gradients of the mean loss; `delta` is dLoss/d_output (already /N)."""
    grads_w = [None] * run.n_layers
    grads_b = [None] * run.n_layers
    if run.config.output_scale is not None:
        delta = delta * np.asarray(run.config.output_scale)
    for i in reversed(range(run.n_layers)):
        grads_w[i] = acts[i].T @ delta
        grads_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ run.weights[i].T) * (pre[i - 1] > 0.0)
    return grads_w, grads_b


def backward_through_model(run: TrainRun, features, targets, skel: Skeleton,
                           lam: float):
    """Loss and weight gradients with the kinematic layer on the output.

    `targets` are ground-truth eval-joint coordinates, (N, n_eval, 3) or
    flattened. Returns (mean loss over the batch, (weight grads, bias grads)).
    """
    if run.mode not in ("ours", "ours_no_phy"):
        raise ValueError(f"mode {run.mode!r} does not use the kinematic layer")
    if run.mode == "ours_no_phy" and lam != 0.0:
        raise ValueError("ours_no_phy requires lambda = 0")
    acts, pre = _forward_acts(run, features)
    poses = acts[-1]
    if not np.all(np.isfinite(poses)):
        raise NumericalError("non-finite network output")
    n = poses.shape[0]
    jt_vals, jt_grads = loss_mod.joint_loss_batch(skel, poses, targets)
    if lam != 0.0:
        phy_vals, phy_grads = loss_mod.phy_loss_batch(skel, poses)
        total = jt_vals + lam * phy_vals
        pose_grads = jt_grads + lam * phy_grads
    else:
        total = jt_vals
        pose_grads = jt_grads
    value = float(total.mean())
    grads = _backprop(run, acts, pre, pose_grads / n)
    return value, grads


def backward_direct(run: TrainRun, features, targets, mode: str | None = None):
    """Plain squared-error loss 0.5*||output - target||^2, no model layer."""
    mode = mode or run.mode
    if mode not in ("direct_joint", "direct_parameter"):
        raise ValueError(f"mode {mode!r} is not a direct-regression mode")
    acts, pre = _forward_acts(run, features)
    out = acts[-1]
    targets = np.asarray(targets, dtype=float).reshape(out.shape[0], -1)
    if targets.shape[1] != out.shape[1]:
        raise ValueError(
            f"target width {targets.shape[1]} does not match output width "
            f"{out.shape[1]} for mode {mode!r}"
        )
    resid = out - targets
    value = float(0.5 * np.einsum("nk,nk->n", resid, resid).mean())
    grads = _backprop(run, acts, pre, resid / out.shape[0])
    return value, grads


def sgd_step(run: TrainRun, grads, sgd: SgdConfig) -> TrainRun:
    """Momentum update in place: v <- mu*v - lr*g; w <- w + v."""
    grads_w, grads_b = grads
    for i in range(run.n_layers):
        if grads_w[i].shape != run.weights[i].shape:
            raise ValueError(
                f"gradient shape {grads_w[i].shape} does not match layer {i} "
                f"weights {run.weights[i].shape}"
            )
        run.vel_w[i] = sgd.momentum * run.vel_w[i] - sgd.learning_rate * grads_w[i]
        run.weights[i] = run.weights[i] + run.vel_w[i]
        run.vel_b[i] = sgd.momentum * run.vel_b[i] - sgd.learning_rate * grads_b[i]
        run.biases[i] = run.biases[i] + run.vel_b[i]
    return run


def _mode_targets(run_mode: str, dataset, skel: Skeleton) -> np.ndarray:
    ev = list(skel.eval_subset)
    if run_mode == "direct_parameter":
        return dataset.thetas
    return dataset.joints[:, ev, :].reshape(len(dataset), -1)


def validation_stats(run: TrainRun, dataset, skel: Skeleton):
    """(joint err mm, angle err deg, invalid fraction) on a dataset.

    Angle and validity metrics apply to pose-emitting modes only; the
    direct_joint baseline gets NaN there (its angles exist only after a
    post-hoc fit, which is far too costly per epoch).
    """
    ev = list(skel.eval_subset)
    out = forward(run, dataset.features)
    gt = dataset.joints[:, ev, :]
    if run.mode == "direct_joint":
        pred_joints = out.reshape(len(dataset), len(ev), 3)
        return float(np.linalg.norm(pred_joints - gt, axis=2).mean()), float("nan"), float("nan")
    pred_joints = forward_kinematics_batch(skel, out, joint_indices=ev)
    joint_err = float(np.linalg.norm(pred_joints - gt, axis=2).mean())
    rot = skel.dof_is_rotation
    angle_err = float(np.degrees(np.abs(out[:, rot] - dataset.thetas[:, rot]).mean()))
    invalid = (out[:, rot] < skel.dof_lower[rot]) | (out[:, rot] > skel.dof_upper[rot])
    return joint_err, angle_err, float(invalid.any(axis=1).mean())


def train(run: TrainRun, dataset, skel: Skeleton, sgd: SgdConfig,
          mode: str | None = None, val=None) -> TrainRun:
    """Mini-batch SGD until the epoch budget or validation plateau.

    Stops early when the best validation joint error of the last 10 epochs
    improves on the earlier best by less than 0.1%. Raises NumericalError
    (with epoch and batch) if the loss goes non-finite.
    """
    if len(dataset) == 0:
        raise ValueError("training dataset is empty")
    if mode is not None:
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")
        run.mode = mode
    targets = _mode_targets(run.mode, dataset, skel)
    through_model = run.mode in ("ours", "ours_no_phy")
    lam = 0.0 if run.mode == "ours_no_phy" else sgd.lam

    rng = np.random.default_rng([run.config.seed, 1])
    n = len(dataset)
    val_errors = []
    for epoch in range(sgd.epochs):
        order = rng.permutation(n)
        epoch_losses = []
        for start in range(0, n, sgd.batch_size):
            idx = order[start:start + sgd.batch_size]
            feats = dataset.features[idx]
            tgt = targets[idx]
            try:
                if through_model:
                    value, grads = backward_through_model(run, feats, tgt, skel, lam)
                else:
                    value, grads = backward_direct(run, feats, tgt)
            except NumericalError as e:
                raise NumericalError(
                    f"{e} at epoch {epoch} batch {start // sgd.batch_size}"
                ) from None
            if not np.isfinite(value):
                raise NumericalError(
                    f"non-finite loss at epoch {epoch} batch {start // sgd.batch_size}"
                )
            sgd_step(run, grads, sgd)
            epoch_losses.append(value)

        if val is not None:
            joint_err, angle_err, invalid = validation_stats(run, val, skel)
        else:
            joint_err = angle_err = invalid = float("nan")
        run.history.append(EpochStats(
            train_loss=float(np.mean(epoch_losses)),
            val_joint_err_mm=joint_err,
            val_angle_err_deg=angle_err,
            val_invalid_frac=invalid,
        ))
        if val is not None:
            val_errors.append(joint_err)
            if len(val_errors) > 10:
                recent = min(val_errors[-10:])
                earlier = min(val_errors[:-10])
                if recent > earlier * (1.0 - 1e-3):
                    break
    return run


def save_checkpoint(run: TrainRun, path) -> None:
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "mlp": {
            "layer_widths": list(run.config.layer_widths),
            "seed": run.config.seed,
            "input_scale": run.config.input_scale,
            "input_clip_abs": run.config.input_clip_abs,
            "output_scale": list(run.config.output_scale) if run.config.output_scale else None,
        },
        "mode": run.mode,
        "weights": [w.tolist() for w in run.weights],
        "biases": [b.tolist() for b in run.biases],
        "vel_w": [v.tolist() for v in run.vel_w],
        "vel_b": [v.tolist() for v in run.vel_b],
        "history": [
            [h.train_loss, h.val_joint_err_mm, h.val_angle_err_deg, h.val_invalid_frac]
            for h in run.history
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_checkpoint(path) -> TrainRun:
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"{path}: not a {CHECKPOINT_FORMAT} file")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {payload.get('version')}")
    raw_scale = payload["mlp"].get("output_scale")
    config = MlpConfig(
        layer_widths=tuple(payload["mlp"]["layer_widths"]),
        seed=int(payload["mlp"]["seed"]),
        input_scale=float(payload["mlp"]["input_scale"]),
        input_clip_abs=payload["mlp"].get("input_clip_abs"),
        output_scale=tuple(raw_scale) if raw_scale else None,
    )
    run = TrainRun(
        config,
        payload["mode"],
        [np.array(w, dtype=float) for w in payload["weights"]],
        [np.array(b, dtype=float) for b in payload["biases"]],
        vel_w=[np.array(v, dtype=float) for v in payload["vel_w"]],
        vel_b=[np.array(v, dtype=float) for v in payload["vel_b"]],
        history=[EpochStats(*row) for row in payload["history"]],
    )
    return run
