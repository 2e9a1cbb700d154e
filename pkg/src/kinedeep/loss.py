"""Joint-location loss, angle-range penalty, and their pose gradients.

The joint term is summed (not averaged) over the selected joints:
0.5 * ||joints(pose) - target||^2 in mm^2; its gradient is the kinematics
Jacobian transposed against the residual. The range penalty is a hinge on
every rotation DOF, measured in radians: amounts below the lower bound and
above the upper bound add up linearly. Components sitting exactly on a
bound contribute zero penalty and zero subgradient, so in-range poses are
penalty-free.

All functions are pure; batched variants stack poses along the first axis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kinematics import fk_jacobian_batch
from .skeleton import Skeleton


@dataclass
class LossReport:
    l_jt: float
    l_phy: float
    total: float
    grad: np.ndarray
    lam: float


def _target_array(skel, target, joint_indices):
    """Normalize a target to (n_sel, 3): accepts (n_sel,3), (3*n_sel,), (J,3)."""
    target = np.asarray(target, dtype=float)
    n_sel = len(joint_indices)
    if target.shape == (n_sel, 3):
        return target
    if target.shape == (3 * n_sel,):
        return target.reshape(n_sel, 3)
    if target.shape == (skel.n_joints, 3):
        return target[list(joint_indices)]
    raise ValueError(
        f"target shape {target.shape} matches neither ({n_sel}, 3) nor "
        f"({skel.n_joints}, 3)"
    )


def joint_loss_batch(skel: Skeleton, thetas, targets, joint_indices=None):
    """Batched joint loss: values (N,), gradients (N, D).

    `targets` is (N, n_sel, 3) or (N, 3*n_sel) matching the selected joints
    (default: the skeleton's eval subset).
    """
    sel = list(joint_indices) if joint_indices is not None else list(skel.eval_subset)
    thetas = np.asarray(thetas, dtype=float)
    targets = np.asarray(targets, dtype=float).reshape(thetas.shape[0], len(sel) * 3)
    pos, jac = fk_jacobian_batch(skel, thetas, joint_indices=sel)
    resid = pos.reshape(thetas.shape[0], -1) - targets
    values = 0.5 * np.einsum("nk,nk->n", resid, resid)
    grads = np.einsum("nkd,nk->nd", jac, resid)
    return values, grads


def joint_loss(skel: Skeleton, theta, target, joint_indices=None):
    """0.5 * sum of squared joint residuals (mm^2) and its pose gradient."""
    sel = list(joint_indices) if joint_indices is not None else list(skel.eval_subset)
    target = _target_array(skel, target, sel)
    values, grads = joint_loss_batch(
        skel, np.asarray(theta, dtype=float)[None, :], target[None], joint_indices=sel
    )
    return float(values[0]), grads[0]


def phy_loss_batch(skel: Skeleton, thetas):
    """Batched angle-range hinge: values (N,), subgradients (N, D)."""
    thetas = np.asarray(thetas, dtype=float)
    if thetas.shape[-1] != skel.n_dofs:
        raise ValueError(
            f"pose has {thetas.shape[-1]} components, skeleton has {skel.n_dofs} DOFs"
        )
    rot = skel.dof_is_rotation
    below = np.maximum(skel.dof_lower - thetas, 0.0) * rot
    above = np.maximum(thetas - skel.dof_upper, 0.0) * rot
    values = below.sum(axis=-1) + above.sum(axis=-1)
    grads = (above > 0).astype(float) - (below > 0).astype(float)
    grads *= rot
    return values, grads


def phy_loss(skel: Skeleton, theta):
    """Total out-of-range amount over rotation DOFs (radians) and subgradient."""
    values, grads = phy_loss_batch(skel, np.asarray(theta, dtype=float)[None, :])
    return float(values[0]), grads[0]


def total_loss(skel: Skeleton, theta, target, lam: float = 1.0,
               joint_indices=None) -> LossReport:
    """Joint loss plus `lam` times the range penalty."""
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    l_jt, g_jt = joint_loss(skel, theta, target, joint_indices=joint_indices)
    l_phy, g_phy = phy_loss(skel, theta)
    return LossReport(
        l_jt=l_jt,
        l_phy=l_phy,
        total=l_jt + lam * l_phy,
        grad=g_jt + lam * g_phy,
        lam=lam,
    )
