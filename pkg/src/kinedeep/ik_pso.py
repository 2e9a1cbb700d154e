"""Swarm fitting of pose parameters to target joint locations.

The optimizer minimizes the joint loss over the pose box. One call runs a
sequence of particle-swarm phases under a shared iteration budget: each
phase draws a fresh swarm (uniformly inside the bounds, or around a given
center pose), runs the standard global-best update

    v <- inertia*v + cognitive*r1*(pbest - x) + social*r2*(gbest - x)

with fresh uniform r1, r2 per particle and dimension, clamps positions to
the DOF bounds each step (zeroing the velocity component that hit a bound),
and hands its incumbent to a damped Gauss-Newton polish that descends the
joint loss with the analytic kinematics Jacobian. Restart phases recover
from bad swarm collapses (a global-rotation basin missed by one phase is
usually found by another); the polish finishes inside a basin, which the
swarm alone does slowly on this badly conditioned objective. Set
``polish_steps=0`` for the pure derivative-free behaviour.

Ties in best-selection resolve to the lowest particle index, and a single
seeded generator drives every draw, so results are reproducible bit for bit
given (seed, config, target).

Two entry points share the machinery: :func:`fit_pose` recovers a pose from
trusted joint positions (ground-truth construction), while
:func:`angles_from_joints` names the post-hoc fit of possibly invalid
predicted joints; its residual measures how far the input is from any
achievable geometry.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .kinematics import fk_jacobian_batch, forward_kinematics_batch
from .skeleton import Skeleton, clamp_pose


@dataclass(frozen=True)
class PsoConfig:
    swarm_size: int = 64
    iterations: int = 300              # total swarm iterations across phases
    inertia: float = 0.72
    cognitive: float = 1.49
    social: float = 1.49
    seed: int = 0
    init_center: tuple | None = None   # pose to seed the first phase around
    init_sigma_frac: float = 0.10      # Gaussian sigma as fraction of range
    tol_mm: float = 0.1                # stop when the residual reaches this
    max_velocity_frac: float = 0.5     # velocity clamp as fraction of range
    phase_iterations: int = 75         # budget slice per restart phase
    polish_steps: int = 50             # Gauss-Newton steps per phase; 0 = off
    record_trace: bool = False

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be >= 2")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0.0 <= self.inertia < 1.0:
            raise ValueError("inertia must lie in [0, 1)")
        if self.cognitive < 0 or self.social < 0:
            raise ValueError("cognitive and social weights must be >= 0")
        if self.phase_iterations < 1:
            raise ValueError("phase_iterations must be >= 1")


@dataclass
class FitResult:
    theta: np.ndarray
    residual_mm: float          # mean per-joint Euclidean error at theta
    iterations_used: int        # swarm iterations actually consumed
    converged: bool             # residual_mm <= tol_mm
    trace: tuple | None = None  # best joint loss after each swarm iteration


def _target_eval(skel, target):
    target = np.asarray(target, dtype=float)
    n_eval = len(skel.eval_subset)
    if target.shape == (3 * n_eval,):
        target = target.reshape(n_eval, 3)
    if target.shape != (n_eval, 3):
        raise ValueError(
            f"target shape {target.shape} does not match the eval subset "
            f"({n_eval} joints)"
        )
    if not np.all(np.isfinite(target)):
        raise ValueError("target contains non-finite values")
    return target


class _Objective:
    """Joint loss over the eval subset for one target frame."""

    def __init__(self, skel, target):
        self.skel = skel
        self.ev = list(skel.eval_subset)
        self.target = target
        self.flat = target.reshape(-1)

    def batch(self, thetas):
        joints = forward_kinematics_batch(self.skel, thetas, joint_indices=self.ev)
        resid = joints - self.target[None, :, :]
        loss = 0.5 * np.einsum("nkc,nkc->n", resid, resid)
        per_joint = np.linalg.norm(resid, axis=2).mean(axis=1)
        return loss, per_joint

    def residual_and_jacobian(self, theta):
        pos, jac = fk_jacobian_batch(self.skel, theta[None], joint_indices=self.ev)
        return pos[0].reshape(-1) - self.flat, jac[0]

    def value(self, theta):
        loss, per_joint = self.batch(theta[None])
        return float(loss[0]), float(per_joint[0])


def _swarm_phase(obj, rng, config, budget, center, trace):
    """One swarm run; returns (theta, loss, residual, iterations used)."""
    skel = obj.skel
    lower, upper = skel.dof_lower, skel.dof_upper
    span = upper - lower
    S, D = config.swarm_size, skel.n_dofs

    if center is None:
        X = rng.uniform(lower, upper, size=(S, D))
    else:
        X = center + rng.normal(0.0, config.init_sigma_frac, size=(S, D)) * span
        X = np.clip(X, lower, upper)
        X[0] = center  # keep the center itself in the swarm
    V = np.zeros((S, D))
    vmax = config.max_velocity_frac * span

    fit, per_joint = obj.batch(X)
    pbest = X.copy()
    pbest_fit = fit.copy()
    g = int(np.argmin(pbest_fit))
    gbest = pbest[g].copy()
    gbest_fit = float(pbest_fit[g])
    gbest_res = float(per_joint[g])

    used = 0
    for _ in range(budget):
        if gbest_res <= config.tol_mm:
            break
        r1 = rng.uniform(size=(S, D))
        r2 = rng.uniform(size=(S, D))
        V = (config.inertia * V
             + config.cognitive * r1 * (pbest - X)
             + config.social * r2 * (gbest - X))
        np.clip(V, -vmax, vmax, out=V)
        X = X + V
        out_low = X < lower
        out_high = X > upper
        if out_low.any() or out_high.any():
            X = np.clip(X, lower, upper)
            V[out_low | out_high] = 0.0

        fit, per_joint = obj.batch(X)
        better = fit < pbest_fit
        pbest[better] = X[better]
        pbest_fit[better] = fit[better]
        g = int(np.argmin(pbest_fit))
        if pbest_fit[g] < gbest_fit:
            gbest = pbest[g].copy()
            gbest_fit = float(pbest_fit[g])
            gbest_res = obj.value(gbest)[1]
        used += 1
        if trace is not None:
            trace.append(gbest_fit)
    return gbest, gbest_fit, gbest_res, used


def _gauss_newton_polish(obj, theta, steps):
    """Damped Gauss-Newton descent on the joint loss, clamped to bounds."""
    skel = obj.skel
    theta = theta.copy()
    value, residual = obj.value(theta)
    damping = 1e-3
    for _ in range(steps):
        if residual == 0.0:
            break
        r, jac = obj.residual_and_jacobian(theta)
        hess = jac.T @ jac
        grad = jac.T @ r
        diag = np.diag(np.diag(hess) + 1e-12)
        accepted = False
        for _ in range(10):
            try:
                step = np.linalg.solve(hess + damping * diag, -grad)
            except np.linalg.LinAlgError:
                damping *= 10.0
                continue
            candidate = clamp_pose(skel, theta + step)
            cand_value, cand_residual = obj.value(candidate)
            if cand_value < value:
                theta, value, residual = candidate, cand_value, cand_residual
                damping = max(damping * 0.3, 1e-10)
                accepted = True
                break
            damping *= 10.0
        if not accepted:
            break
    return theta, value, residual


def fit_pose(skel: Skeleton, target, config: PsoConfig | None = None) -> FitResult:
    """Fit a pose whose eval joints match `target` ((n_eval, 3) mm)."""
    config = config or PsoConfig()
    target = _target_eval(skel, target)
    obj = _Objective(skel, target)
    rng = np.random.default_rng(config.seed)
    trace = [] if config.record_trace else None

    best_theta = None
    best_fit = np.inf
    best_res = np.inf
    budget = config.iterations
    used_total = 0

    init_center = None
    if config.init_center is not None:
        init_center = clamp_pose(skel, np.asarray(config.init_center, dtype=float))
        # a warm-start center is an incumbent: descend from it before
        # spending any swarm iterations
        if config.polish_steps > 0:
            best_theta, best_fit, best_res = _gauss_newton_polish(
                obj, init_center, config.polish_steps)
        else:
            best_theta = init_center
            best_fit, best_res = obj.value(init_center)

    first = True
    while budget > 0 and best_res > config.tol_mm:
        center = init_center if first else None
        first = False
        phase_budget = min(config.phase_iterations, budget)
        theta, fit, res, used = _swarm_phase(obj, rng, config, phase_budget,
                                             center, trace)
        budget -= phase_budget
        used_total += used
        if config.polish_steps > 0:
            theta, fit, res = _gauss_newton_polish(obj, theta,
                                                   config.polish_steps)
        if fit < best_fit:
            best_theta, best_fit, best_res = theta, fit, res

    if trace is not None and trace:
        # phases restart their own swarms; the reported trace is the running
        # best joint loss of the whole fit, which is non-increasing
        trace = np.minimum.accumulate(np.array(trace)).tolist()

    return FitResult(
        theta=best_theta,
        residual_mm=best_res,
        iterations_used=used_total,
        converged=best_res <= config.tol_mm,
        trace=tuple(trace) if trace is not None else None,
    )


def fit_batch(skel: Skeleton, targets, config: PsoConfig | None = None,
              warm_start: bool = False) -> list:
    """Fit a sequence of frames; optionally seed each fit from the previous.

    Every frame reuses the same config seed, so identical targets produce
    identical results.
    """
    config = config or PsoConfig()
    results = []
    prev_theta = None
    for target in targets:
        if warm_start and prev_theta is not None:
            frame_config = replace(config, init_center=tuple(prev_theta))
        else:
            frame_config = config
        results.append(fit_pose(skel, target, frame_config))
        prev_theta = results[-1].theta
    if not results:
        raise ValueError("fit_batch needs at least one target frame")
    return results


def angles_from_joints(skel: Skeleton, predicted_joints,
                       config: PsoConfig | None = None) -> FitResult:
    """Fit pose parameters to predicted (possibly invalid) joint locations.

    Same machinery as :func:`fit_pose`; the residual quantifies how far the
    prediction sits from the model's reachable geometry.
    """
    return fit_pose(skel, predicted_joints, config)


def residual_stats(results) -> tuple:
    """(mean, population variance) of residual_mm across fit results."""
    residuals = np.array([r.residual_mm for r in results], dtype=float)
    return float(residuals.mean()), float(residuals.var())
