import json
import math

import numpy as np
import pytest

from conftest import sample_in_bounds
from kinedeep import skeleton as sk


def single_joint_config():
    return {
        "name": "dot",
        "joints": [
            {
                "name": "root",
                "parent": None,
                "bone_length_mm": 0.0,
                "dofs": [
                    {"kind": "translation", "axis": a, "lower_mm": -100.0, "upper_mm": 100.0}
                    for a in "XYZ"
                ] + [
                    {"kind": "rotation", "axis": a, "lower_deg": -180.0, "upper_deg": 180.0}
                    for a in "XYZ"
                ],
            }
        ],
    }


def test_default_hand_counts(hand):
    assert hand.n_joints == 23
    assert hand.n_dofs == 26
    assert len(hand.dof_names) == 26


def test_default_hand_dof_split(hand):
    # 6 root DOFs (3 translation + 3 rotation), the rest are joint rotations
    root_dofs = [d for d in range(hand.n_dofs) if hand.dof_joint[d] == 0]
    assert len(root_dofs) == 6
    assert sum(not r for r in hand.dof_is_rotation) == 3
    assert sum(1 for d in range(hand.n_dofs)
               if hand.dof_is_rotation[d] and hand.dof_joint[d] != 0) == 20


def test_default_hand_tips_have_no_dofs(hand):
    for u, joint in enumerate(hand.joints):
        if joint.name.endswith("_tip"):
            assert joint.dofs == ()


def test_default_hand_finger_depth(hand):
    # root -> wrist -> base -> mid -> end -> tip
    for finger in ("thumb", "index", "middle", "ring", "pinky"):
        u = hand.joint_index(f"{finger}_tip")
        depth = 0
        while u >= 0:
            depth += 1
            u = hand.parent_index[u]
        assert depth == 6


def test_default_hand_eval_subset(hand):
    assert len(hand.eval_subset) == 14
    assert all(0 <= i < hand.n_joints for i in hand.eval_subset)


def test_load_single_joint(tmp_path):
    path = tmp_path / "dot.json"
    path.write_text(json.dumps(single_joint_config()))
    skel = sk.load_skeleton(path)
    assert skel.n_joints == 1
    assert skel.n_dofs == 6


def test_self_parent_is_cycle(tmp_path):
    cfg = single_joint_config()
    cfg["joints"].append(
        {"name": "loop", "parent": "loop", "bone_length_mm": 10.0, "dofs": []}
    )
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(cfg))
    with pytest.raises(sk.SkeletonError, match="cycle"):
        sk.load_skeleton(path)


def test_child_before_parent_rejected():
    joints = [
        sk.JointSpec("root", None, 0.0),
        sk.JointSpec("late_child", 2, 5.0),
        sk.JointSpec("mid", 0, 5.0),
    ]
    with pytest.raises(sk.SkeletonError, match="topological"):
        sk.Skeleton(joints)


def test_two_roots_rejected():
    joints = [sk.JointSpec("a", None, 0.0), sk.JointSpec("b", None, 0.0)]
    with pytest.raises(sk.SkeletonError, match="root"):
        sk.Skeleton(joints)


def test_duplicate_names_rejected():
    joints = [sk.JointSpec("a", None, 0.0), sk.JointSpec("a", 0, 1.0)]
    with pytest.raises(sk.SkeletonError, match="duplicate"):
        sk.Skeleton(joints)


def test_bad_bounds_rejected():
    with pytest.raises(sk.SkeletonError, match="lower bound"):
        sk.DofSpec("rotation", "X", 0.5, -0.5)
    with pytest.raises(sk.SkeletonError, match="pi"):
        sk.DofSpec("rotation", "X", -1.0, 4.0)


def test_error_names_offending_joint(tmp_path):
    cfg = single_joint_config()
    cfg["joints"].append({
        "name": "elbow", "parent": "root", "bone_length_mm": 10.0,
        "dofs": [{"kind": "rotation", "axis": "Z", "lower_deg": 30.0, "upper_deg": -30.0}],
    })
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(cfg))
    with pytest.raises(sk.SkeletonError, match="elbow"):
        sk.load_skeleton(path)


def test_parse_failure(tmp_path):
    path = tmp_path / "nope.json"
    path.write_text("{ not json")
    with pytest.raises(sk.SkeletonError, match="JSON"):
        sk.load_skeleton(path)


def test_roundtrip_save_load(hand, tmp_path):
    path = tmp_path / "hand.json"
    sk.save_skeleton(hand, path)
    again = sk.load_skeleton(path)
    assert again.to_dict() == hand.to_dict()
    assert again.n_dofs == hand.n_dofs
    assert np.array_equal(again.dof_lower, hand.dof_lower)
    assert np.array_equal(again.dof_upper, hand.dof_upper)
    assert np.array_equal(again.path_mask, hand.path_mask)


def test_shipped_config_matches_embedded(hand):
    with open("configs/hand23.json") as fh:
        raw = json.load(fh)
    assert sk.skeleton_from_dict(raw).to_dict() == hand.to_dict()


def test_clamp_zero_pose_unchanged(hand):
    theta = np.zeros(hand.n_dofs)
    assert np.array_equal(sk.clamp_pose(hand, theta), theta)


def test_clamp_overrun_component(hand):
    theta = np.zeros(hand.n_dofs)
    d = 7  # a finger rotation
    theta[d] = hand.dof_upper[d] + 0.5
    clamped = sk.clamp_pose(hand, theta)
    assert clamped[d] == hand.dof_upper[d]
    mask = np.ones(hand.n_dofs, dtype=bool)
    mask[d] = False
    assert np.array_equal(clamped[mask], theta[mask])


def test_clamp_in_range_is_fixpoint(hand, rng):
    for _ in range(20):
        theta = sample_in_bounds(hand, rng)
        assert np.array_equal(sk.clamp_pose(hand, theta), theta)


def test_clamp_idempotent(hand, rng):
    theta = rng.normal(scale=5.0, size=hand.n_dofs)
    once = sk.clamp_pose(hand, theta)
    assert np.array_equal(sk.clamp_pose(hand, once), once)


def test_clamp_dimension_mismatch(hand):
    with pytest.raises(ValueError, match="26"):
        sk.clamp_pose(hand, np.zeros(25))
