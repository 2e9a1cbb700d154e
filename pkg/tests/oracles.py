"""Independent reference implementations used only by the tests.

Everything here is deliberately naive: full 4x4 homogeneous matrices,
straight-line per-joint chain products recomputed from the root for every
joint, and no sharing with the library's fast path beyond the documented
frame conventions.
"""
import math

import numpy as np


def mat_rot(axis: int, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    m = np.eye(4)
    if axis == 0:
        m[1:3, 1:3] = [[c, -s], [s, c]]
    elif axis == 1:
        m[0, 0], m[0, 2], m[2, 0], m[2, 2] = c, s, -s, c
    else:
        m[0:2, 0:2] = [[c, -s], [s, c]]
    return m


def mat_drot(axis: int, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    m = np.zeros((4, 4))
    if axis == 0:
        m[1:3, 1:3] = [[-s, -c], [c, -s]]
    elif axis == 1:
        m[0, 0], m[0, 2], m[2, 0], m[2, 2] = -s, c, -c, -s
    else:
        m[0:2, 0:2] = [[-s, -c], [c, -s]]
    return m


def mat_trans(axis: int, length: float) -> np.ndarray:
    m = np.eye(4)
    m[axis, 3] = length
    return m


def mat_dtrans(axis: int) -> np.ndarray:
    m = np.zeros((4, 4))
    m[axis, 3] = 1.0
    return m


def _rest_mat(rest_offset_deg) -> np.ndarray:
    rx, ry, rz = (math.radians(v) for v in rest_offset_deg)
    return mat_rot(0, rx) @ mat_rot(1, ry) @ mat_rot(2, rz)


_AXIS = {"X": 0, "Y": 1, "Z": 2}


def chain_matrices(skel, theta, joint: int, replace_dof=None):
    """All elementary 4x4s from the root to `joint`, in product order.

    If `replace_dof` is a flat DOF index, that DOF's matrix is swapped for
    its elementwise derivative (zero matrix contribution if the DOF is not
    on this joint's chain).
    """
    path = []
    u = joint
    while u is not None:
        path.append(u)
        u = skel.joints[u].parent
    path.reverse()

    dof_base = np.cumsum([0] + [len(j.dofs) for j in skel.joints])
    mats = []
    found = replace_dof is None
    for u in path:
        spec = skel.joints[u]
        if any(v != 0 for v in spec.rest_offset_deg):
            mats.append(_rest_mat(spec.rest_offset_deg))
        if spec.parent is not None:
            mats.append(mat_trans(0, spec.bone_length))
        for k, dof in enumerate(spec.dofs):
            d = dof_base[u] + k
            ax = _AXIS[dof.axis]
            val = theta[d]
            if d == replace_dof:
                found = True
                mats.append(mat_drot(ax, val) if dof.is_rotation else mat_dtrans(ax))
            elif dof.is_rotation:
                mats.append(mat_rot(ax, val))
            else:
                mats.append(mat_trans(ax, val))
    return mats, found


def naive_forward_kinematics(skel, theta) -> np.ndarray:
    """Per-joint full chain product; O(J * depth) matrix multiplies."""
    theta = np.asarray(theta, dtype=float)
    origin = np.array([0.0, 0.0, 0.0, 1.0])
    out = np.empty((skel.n_joints, 3))
    for u in range(skel.n_joints):
        mats, _ = chain_matrices(skel, theta, u)
        m = np.eye(4)
        for e in mats:
            m = m @ e
        out[u] = (m @ origin)[:3]
    return out


def naive_jacobian(skel, theta) -> np.ndarray:
    """(3J, D) Jacobian by the replace-one-matrix-with-its-derivative rule."""
    theta = np.asarray(theta, dtype=float)
    origin = np.array([0.0, 0.0, 0.0, 1.0])
    J, D = skel.n_joints, skel.n_dofs
    jac = np.zeros((3 * J, D))
    for u in range(J):
        for d in range(D):
            mats, on_chain = chain_matrices(skel, theta, u, replace_dof=d)
            if not on_chain:
                continue
            m = np.eye(4)
            for e in mats:
                m = m @ e
            jac[3 * u:3 * u + 3, d] = (m @ origin)[:3]
    return jac


def fd_jacobian(f, x, h=1e-5) -> np.ndarray:
    """Central finite differences of a vector function, columns per input."""
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        dx = np.zeros_like(x)
        dx[i] = h
        cols.append((f(x + dx) - f(x - dx)) / (2 * h))
    return np.stack([c.ravel() for c in cols], axis=1)


def rel_err(a, b) -> float:
    """max |a - b| / (1 + |b|), the gradient-check metric."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / (1.0 + np.abs(b))))
