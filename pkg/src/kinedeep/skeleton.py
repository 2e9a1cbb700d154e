"""Kinematic tree definition, validation, and the built-in 23-joint hand.

A skeleton is an ordered list of joints forming a rooted tree. Each joint
carries the length of the bone connecting it to its parent (mm), an optional
fixed rest-pose rotation offset, and an ordered list of degrees of freedom.
The flat concatenation of all DOFs, in joint order, defines the layout of a
pose vector: for the default hand that is 3 global translations (mm), 3
global rotations, then 20 finger angles (radians).

Angles are radians everywhere in the API; config files use degrees.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

AXES = ("X", "Y", "Z")
_AXIS_INDEX = {"X": 0, "Y": 1, "Z": 2}

KIND_TRANSLATION = "translation"
KIND_ROTATION = "rotation"


class SkeletonError(ValueError):
    """A skeleton config violates a structural invariant."""


def axis_index(axis) -> int:
    """Map an axis name ('X'|'Y'|'Z', case-insensitive) or index to 0..2."""
    if isinstance(axis, str):
        try:
            return _AXIS_INDEX[axis.upper()]
        except KeyError:
            raise SkeletonError(f"unknown axis {axis!r}, expected one of {AXES}") from None
    i = int(axis)
    if i not in (0, 1, 2):
        raise SkeletonError(f"axis index {axis!r} out of range")
    return i


@dataclass(frozen=True)
class DofSpec:
    """One degree of freedom: a rotation angle or a translation component.

    Bounds are radians for rotations (within [-pi, pi]) and mm for
    translations.
    """

    kind: str
    axis: str
    lower: float
    upper: float

    def __post_init__(self):
        if self.kind not in (KIND_TRANSLATION, KIND_ROTATION):
            raise SkeletonError(f"unknown dof kind {self.kind!r}")
        object.__setattr__(self, "axis", AXES[axis_index(self.axis)])
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise SkeletonError("dof bounds must be finite")
        if self.lower > self.upper:
            raise SkeletonError(
                f"dof lower bound {self.lower} exceeds upper bound {self.upper}"
            )
        if self.kind == KIND_ROTATION:
            # Closed interval: -pi is accepted so a full +-180 deg range is
            # representable; ranges never exceed one period.
            if self.lower < -math.pi - 1e-12 or self.upper > math.pi + 1e-12:
                raise SkeletonError(
                    f"rotation bounds [{self.lower}, {self.upper}] outside [-pi, pi]"
                )

    @property
    def is_rotation(self) -> bool:
        return self.kind == KIND_ROTATION


@dataclass(frozen=True)
class JointSpec:
    """A joint: its parent link, incoming bone length, and DOF list.

    ``rest_offset_deg`` is a fixed rotation (X, Y, Z degrees, applied in that
    order) baked into the joint's local frame before its DOF transforms; it
    shapes the rest pose (finger splay) without consuming DOFs.
    """

    name: str
    parent: int | None
    bone_length: float
    dofs: tuple[DofSpec, ...] = ()
    rest_offset_deg: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "dofs", tuple(self.dofs))
        object.__setattr__(self, "rest_offset_deg", tuple(self.rest_offset_deg))
        if not self.name:
            raise SkeletonError("joint name must be non-empty")
        if self.bone_length < 0:
            raise SkeletonError(f"joint {self.name!r}: negative bone length")
        if len(self.rest_offset_deg) != 3:
            raise SkeletonError(f"joint {self.name!r}: rest_offset_deg needs 3 values")


def _rest_rotation(rest_offset_deg):
    """3x3 rotation Rx*Ry*Rz of the given degree offsets, or None if zero."""
    if all(v == 0 for v in rest_offset_deg):
        return None
    rx, ry, rz = (math.radians(v) for v in rest_offset_deg)
    cx, sx = math.cos(rx), math.sin(rx)
    cy, sy = math.cos(ry), math.sin(ry)
    cz, sz = math.cos(rz), math.sin(rz)
    mx = np.array([[1, 0, 0], [0, cx, -sx], [0, sx, cx]])
    my = np.array([[cy, 0, sy], [0, 1, 0], [-sy, 0, cy]])
    mz = np.array([[cz, -sz, 0], [sz, cz, 0], [0, 0, 1]])
    return mx @ my @ mz


class Skeleton:
    """Validated kinematic tree with precomputed lookup tables.

    Immutable after construction (all arrays are write-protected), so
    instances can be shared freely across threads.

    Derived attributes used by the kinematics code:
      parent_index   (J,) int, -1 at the root
      bone_lengths   (J,) float mm
      rest_rotations list of 3x3 arrays or None per joint
      dof_joint      (D,) int, owning joint of each DOF
      dof_is_rotation(D,) bool
      dof_axis       (D,) int 0..2
      dof_lower/dof_upper (D,) float
      path_mask      (J, D) bool, True where the DOF lies on the joint's
                     root path (inclusive)
    """

    def __init__(self, joints, eval_subset=None, name="skeleton"):
        self.name = str(name)
        self.joints = tuple(joints)
        self._validate_tree()

        J = len(self.joints)
        self.parent_index = np.array(
            [-1 if j.parent is None else j.parent for j in self.joints], dtype=np.int64
        )
        self.bone_lengths = np.array([j.bone_length for j in self.joints], dtype=float)
        self.rest_rotations = [_rest_rotation(j.rest_offset_deg) for j in self.joints]

        dof_joint, dof_rot, dof_axis, lo, hi, names = [], [], [], [], [], []
        for u, joint in enumerate(self.joints):
            for dof in joint.dofs:
                dof_joint.append(u)
                dof_rot.append(dof.is_rotation)
                dof_axis.append(axis_index(dof.axis))
                lo.append(dof.lower)
                hi.append(dof.upper)
                tag = "r" if dof.is_rotation else "t"
                names.append(f"{joint.name}:{tag}{dof.axis.lower()}")
        self.dof_joint = np.array(dof_joint, dtype=np.int64)
        self.dof_is_rotation = np.array(dof_rot, dtype=bool)
        self.dof_axis = np.array(dof_axis, dtype=np.int64)
        self.dof_lower = np.array(lo, dtype=float)
        self.dof_upper = np.array(hi, dtype=float)
        self.dof_names = tuple(names)

        mask = np.zeros((J, len(dof_joint)), dtype=bool)
        for u in range(J):
            v = u
            while v >= 0:
                mask[u, self.dof_joint == v] = True
                v = self.parent_index[v]
        self.path_mask = mask

        if eval_subset is None:
            self.eval_subset = tuple(range(J))
        else:
            self.eval_subset = tuple(int(i) for i in eval_subset)
            bad = [i for i in self.eval_subset if not 0 <= i < J]
            if bad:
                raise SkeletonError(f"eval_subset indices out of range: {bad}")

        for arr in (self.parent_index, self.bone_lengths, self.dof_joint,
                    self.dof_is_rotation, self.dof_axis, self.dof_lower,
                    self.dof_upper, self.path_mask):
            arr.flags.writeable = False
        for r in self.rest_rotations:
            if r is not None:
                r.flags.writeable = False

    def _validate_tree(self):
        seen = set()
        roots = []
        for u, joint in enumerate(self.joints):
            if joint.name in seen:
                raise SkeletonError(f"duplicate joint name {joint.name!r}")
            seen.add(joint.name)
            if joint.parent is None:
                roots.append(joint.name)
                if joint.bone_length != 0:
                    raise SkeletonError(
                        f"root joint {joint.name!r} must have bone length 0"
                    )
            else:
                p = joint.parent
                if p == u:
                    raise SkeletonError(f"cycle: joint {joint.name!r} is its own parent")
                if not 0 <= p < len(self.joints):
                    raise SkeletonError(
                        f"joint {joint.name!r}: parent index {p} out of range"
                    )
                if p > u:
                    raise SkeletonError(
                        f"joint {joint.name!r} appears before its parent "
                        f"{self.joints[p].name!r} (order must be topological)"
                    )
        if len(roots) != 1:
            raise SkeletonError(
                f"expected exactly one root joint, found {len(roots)}: {roots}"
            )

    @property
    def n_joints(self) -> int:
        return len(self.joints)

    @property
    def n_dofs(self) -> int:
        return len(self.dof_joint)

    @property
    def joint_names(self):
        return tuple(j.name for j in self.joints)

    def joint_index(self, name: str) -> int:
        for u, joint in enumerate(self.joints):
            if joint.name == name:
                return u
        raise SkeletonError(f"no joint named {name!r}")

    def to_dict(self) -> dict:
        joints = []
        for j in self.joints:
            entry = {
                "name": j.name,
                "parent": None if j.parent is None else self.joints[j.parent].name,
                "bone_length_mm": j.bone_length,
                "dofs": [_dof_to_dict(d) for d in j.dofs],
            }
            if any(v != 0 for v in j.rest_offset_deg):
                entry["rest_offset_deg"] = list(j.rest_offset_deg)
            joints.append(entry)
        return {
            "name": self.name,
            "joints": joints,
            "eval_subset": [self.joints[i].name for i in self.eval_subset],
        }


def _dof_to_dict(dof: DofSpec) -> dict:
    if dof.is_rotation:
        return {
            "kind": dof.kind,
            "axis": dof.axis,
            "lower_deg": math.degrees(dof.lower),
            "upper_deg": math.degrees(dof.upper),
        }
    return {
        "kind": dof.kind,
        "axis": dof.axis,
        "lower_mm": dof.lower,
        "upper_mm": dof.upper,
    }


def _dof_from_dict(raw: dict, joint_name: str) -> DofSpec:
    try:
        kind = raw["kind"]
        axis = raw["axis"]
    except KeyError as e:
        raise SkeletonError(f"joint {joint_name!r}: dof missing key {e}") from None
    if kind == KIND_ROTATION:
        try:
            lower = math.radians(float(raw["lower_deg"]))
            upper = math.radians(float(raw["upper_deg"]))
        except KeyError as e:
            raise SkeletonError(
                f"joint {joint_name!r}: rotation dof missing key {e}"
            ) from None
    elif kind == KIND_TRANSLATION:
        try:
            lower = float(raw["lower_mm"])
            upper = float(raw["upper_mm"])
        except KeyError as e:
            raise SkeletonError(
                f"joint {joint_name!r}: translation dof missing key {e}"
            ) from None
    else:
        raise SkeletonError(f"joint {joint_name!r}: unknown dof kind {kind!r}")
    try:
        return DofSpec(kind, axis, lower, upper)
    except SkeletonError as e:
        raise SkeletonError(f"joint {joint_name!r}: {e}") from None


def skeleton_from_dict(raw: dict, name=None) -> Skeleton:
    """Build and validate a Skeleton from its JSON-style dict form."""
    if "joints" not in raw or not isinstance(raw["joints"], list):
        raise SkeletonError("config must contain a 'joints' list")
    name_to_index = {}
    for i, entry in enumerate(raw["joints"]):
        jname = entry.get("name")
        if not jname:
            raise SkeletonError(f"joint #{i} has no name")
        if jname in name_to_index:
            raise SkeletonError(f"duplicate joint name {jname!r}")
        name_to_index[jname] = i

    joints = []
    for entry in raw["joints"]:
        jname = entry["name"]
        parent_name = entry.get("parent")
        if parent_name is None:
            parent = None
        else:
            if parent_name not in name_to_index:
                raise SkeletonError(
                    f"joint {jname!r}: unknown parent {parent_name!r}"
                )
            parent = name_to_index[parent_name]
        dofs = tuple(
            _dof_from_dict(d, jname) for d in entry.get("dofs", [])
        )
        joints.append(
            JointSpec(
                name=jname,
                parent=parent,
                bone_length=float(entry.get("bone_length_mm", 0.0)),
                dofs=dofs,
                rest_offset_deg=tuple(entry.get("rest_offset_deg", (0.0, 0.0, 0.0))),
            )
        )

    eval_subset = None
    if "eval_subset" in raw:
        eval_subset = []
        for ename in raw["eval_subset"]:
            if ename not in name_to_index:
                raise SkeletonError(f"eval_subset names unknown joint {ename!r}")
            eval_subset.append(name_to_index[ename])
    return Skeleton(joints, eval_subset=eval_subset,
                    name=raw.get("name", name or "skeleton"))


def load_skeleton(path) -> Skeleton:
    """Load and validate a skeleton config (JSON, degrees/mm)."""
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as e:
            raise SkeletonError(f"{path}: not valid JSON ({e})") from None
    fallback = os.path.splitext(os.path.basename(str(path)))[0]
    return skeleton_from_dict(raw, name=fallback)


def save_skeleton(skel: Skeleton, path) -> None:
    with open(path, "w") as fh:
        json.dump(skel.to_dict(), fh, indent=2)
        fh.write("\n")


def clamp_pose(skel: Skeleton, theta) -> np.ndarray:
    """Clamp every pose component into its DOF's [lower, upper] interval."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape[-1] != skel.n_dofs:
        raise ValueError(
            f"pose has {theta.shape[-1]} components, skeleton has {skel.n_dofs} DOFs"
        )
    return np.clip(theta, skel.dof_lower, skel.dof_upper)


# Built-in hand: 23 joints / 26 DOF. Root carries the 6 global DOFs, two
# rigid wrist joints fan out to the thumb and the palm, and each finger is a
# base(flexion+abduction) -> mid(flexion) -> end(flexion) -> tip chain.
# Bone lengths are a plausible adult hand; bounds are anatomical defaults.
# Rest offsets splay the metacarpals in-plane and arch them across the palm,
# so the root/base cluster spans all three dimensions (no mirror-symmetric
# near-duplicate poses when fitting joint positions).

_FINGERS = (
    # name, parent wrist, base bone, proximal, middle, distal (mm),
    # splay deg (about Z), twist pitch deg (about Y)
    ("thumb", "wrist_thumb", 35.0, 45.0, 35.0, 28.0, -10.0, 0.0),
    ("index", "wrist_palm", 65.0, 45.0, 26.0, 24.0, 15.0, 12.0),
    ("middle", "wrist_palm", 68.0, 50.0, 30.0, 25.0, 3.0, 12.0),
    ("ring", "wrist_palm", 62.0, 46.0, 28.0, 24.0, -9.0, -12.0),
    ("pinky", "wrist_palm", 55.0, 36.0, 22.0, 22.0, -22.0, -12.0),
)


def _hand23_dict() -> dict:
    def rot(axis, lo, hi):
        return {"kind": "rotation", "axis": axis, "lower_deg": lo, "upper_deg": hi}

    def trans(axis):
        return {"kind": "translation", "axis": axis, "lower_mm": -200.0, "upper_mm": 200.0}

    joints = [
        {
            "name": "root",
            "parent": None,
            "bone_length_mm": 0.0,
            "dofs": [
                trans("X"), trans("Y"), trans("Z"),
                rot("X", -180.0, 180.0), rot("Y", -180.0, 180.0), rot("Z", -180.0, 180.0),
            ],
        },
        {"name": "wrist_palm", "parent": "root", "bone_length_mm": 35.0, "dofs": []},
        {
            "name": "wrist_thumb",
            "parent": "root",
            "bone_length_mm": 25.0,
            "dofs": [],
            "rest_offset_deg": [0.0, 40.0, -50.0],
        },
    ]
    for name, wrist, base_bone, proximal, middle, distal, splay, arch in _FINGERS:
        rest = [20.0, arch, splay] if name == "thumb" else [0.0, arch, splay]
        joints.extend([
            {
                "name": f"{name}_base",
                "parent": wrist,
                "bone_length_mm": base_bone,
                "dofs": [rot("Y", -10.0, 100.0), rot("Z", -20.0, 20.0)],
                "rest_offset_deg": rest,
            },
            {
                "name": f"{name}_mid",
                "parent": f"{name}_base",
                "bone_length_mm": proximal,
                "dofs": [rot("Y", 0.0, 110.0)],
            },
            {
                "name": f"{name}_end",
                "parent": f"{name}_mid",
                "bone_length_mm": middle,
                "dofs": [rot("Y", 0.0, 110.0)],
            },
            {
                "name": f"{name}_tip",
                "parent": f"{name}_end",
                "bone_length_mm": distal,
                "dofs": [],
            },
        ])
    # 14 joints: root, the five finger bases, three long-finger mids, and all
    # five tips. Root and the bases are rigid with respect to the global
    # frame (anchors model fitting); the tips make every finger DOF move at
    # least one scored joint.
    eval_subset = ["root"]
    eval_subset += [f"{f}_base" for f, *_ in _FINGERS]
    eval_subset += [f"{f}_mid" for f in ("index", "middle", "ring")]
    eval_subset += [f"{f}_tip" for f, *_ in _FINGERS]
    return {"name": "hand23", "joints": joints, "eval_subset": eval_subset}


def default_hand() -> Skeleton:
    """The built-in 23-joint, 26-DOF hand."""
    return skeleton_from_dict(_hand23_dict())


def write_default_hand_config(path) -> None:
    """Write the built-in hand as a JSON config (ships as configs/hand23.json)."""
    with open(path, "w") as fh:
        json.dump(_hand23_dict(), fh, indent=2)
        fh.write("\n")
