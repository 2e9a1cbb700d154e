"""Text formats for poses, joint frames, and datasets.

All files are line-oriented with a single header line:

  poses    "# kinedeep-poses v1 skeleton=<name> dims=<D>"
           then one pose per line, D comma-separated values
           (mm for translation DOFs, radians for rotations)
  joints   "# kinedeep-joints v1 skeleton=<name> joints=<K>"
           then one frame per line, 3*K comma-separated mm values
  dataset  "# kinedeep-dataset v1 skeleton=<name> sigma_mm=<s>
            occlusion=<p> seed=<n> n=<n>"
           then one sample per line, "features;theta;joints" with each
           section comma-separated

Floats are written with repr (shortest round-trip), so write -> read -> write
is byte-stable. Parse errors carry 1-based line numbers.
"""
from __future__ import annotations

import numpy as np

from .bench import Dataset

POSES_MAGIC = "kinedeep-poses"
JOINTS_MAGIC = "kinedeep-joints"
DATASET_MAGIC = "kinedeep-dataset"


class FileFormatError(ValueError):
    """A data file violates its documented format."""


def _fmt_row(values) -> str:
    return ",".join(repr(float(v)) for v in values)


def _parse_row(text, line_no, path):
    try:
        return np.array([float(tok) for tok in text.split(",")], dtype=float)
    except ValueError:
        raise FileFormatError(f"{path}: malformed number on line {line_no}") from None


def _parse_header(line, magic, path):
    parts = line.lstrip("#").split()
    if len(parts) < 2 or parts[0] != magic or parts[1] != "v1":
        raise FileFormatError(f"{path}: expected a '{magic} v1' header on line 1")
    fields = {}
    for tok in parts[2:]:
        if "=" not in tok:
            raise FileFormatError(f"{path}: malformed header field {tok!r}")
        key, value = tok.split("=", 1)
        fields[key] = value
    return fields


def write_pose_file(path, skeleton_name: str, poses) -> None:
    poses = np.atleast_2d(np.asarray(poses, dtype=float))
    with open(path, "w") as fh:
        fh.write(f"# {POSES_MAGIC} v1 skeleton={skeleton_name} dims={poses.shape[1]}\n")
        for row in poses:
            fh.write(_fmt_row(row) + "\n")


def read_pose_file(path, expected_dims=None):
    """Returns (skeleton name, poses (N, D)); N may be zero."""
    return _read_table(path, POSES_MAGIC, "dims", expected_dims)


def write_joint_file(path, skeleton_name: str, joints) -> None:
    joints = np.asarray(joints, dtype=float)
    if joints.ndim == 3:
        joints = joints.reshape(joints.shape[0], 3 * joints.shape[1])
    joints = np.atleast_2d(joints)
    with open(path, "w") as fh:
        fh.write(f"# {JOINTS_MAGIC} v1 skeleton={skeleton_name} joints={joints.shape[1] // 3}\n")
        for row in joints:
            fh.write(_fmt_row(row) + "\n")


def read_joint_file(path, expected_joints=None):
    """Returns (skeleton name, frames (N, K, 3)); N may be zero."""
    name, flat = _read_table(path, JOINTS_MAGIC, "joints", expected_joints,
                             width_factor=3)
    return name, flat.reshape(flat.shape[0], -1, 3)


def _read_table(path, magic, width_key, expected=None, width_factor=1):
    rows = []
    name = ""
    width = None
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        return name, np.zeros((0, 0)) if expected is None else np.zeros(
            (0, expected * width_factor))
    fields = _parse_header(lines[0], magic, path)
    name = fields.get("skeleton", "")
    if width_key in fields:
        try:
            width = int(fields[width_key]) * width_factor
        except ValueError:
            raise FileFormatError(f"{path}: bad header field {width_key}") from None
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        row = _parse_row(line, i, path)
        if width is None:
            width = row.size
        if row.size != width:
            raise FileFormatError(
                f"{path}: line {i} has {row.size} values, expected {width}"
            )
        rows.append(row)
    if expected is not None:
        want = expected * width_factor
        if width is not None and width != want:
            raise FileFormatError(
                f"{path}: rows carry {width} values, expected {want}"
            )
        width = want
    data = np.stack(rows) if rows else np.zeros((0, width or 0))
    return name, data


def write_dataset(path, data: Dataset) -> None:
    with open(path, "w") as fh:
        fh.write(
            f"# {DATASET_MAGIC} v1 skeleton={data.skeleton_name} "
            f"sigma_mm={data.sigma_mm!r} occlusion={data.occlusion_prob!r} "
            f"seed={data.seed} n={len(data)}\n"
        )
        for i in range(len(data)):
            fh.write(_fmt_row(data.features[i]) + ";" +
                     _fmt_row(data.thetas[i]) + ";" +
                     _fmt_row(data.joints[i].reshape(-1)) + "\n")


def read_dataset(path) -> Dataset:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise FileFormatError(f"{path}: empty dataset file")
    fields = _parse_header(lines[0], DATASET_MAGIC, path)
    feats, thetas, joints = [], [], []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        sections = line.split(";")
        if len(sections) != 3:
            raise FileFormatError(
                f"{path}: line {i} has {len(sections)} sections, expected "
                "features;theta;joints"
            )
        feats.append(_parse_row(sections[0], i, path))
        thetas.append(_parse_row(sections[1], i, path))
        joints.append(_parse_row(sections[2], i, path))
    if not feats:
        raise FileFormatError(f"{path}: dataset has no samples")
    joints = np.stack(joints)
    try:
        return Dataset(
            skeleton_name=fields.get("skeleton", ""),
            sigma_mm=float(fields.get("sigma_mm", "nan")),
            occlusion_prob=float(fields.get("occlusion", "nan")),
            seed=int(fields.get("seed", "0")),
            features=np.stack(feats),
            thetas=np.stack(thetas),
            joints=joints.reshape(joints.shape[0], -1, 3),
        )
    except ValueError as e:
        raise FileFormatError(f"{path}: bad header ({e})") from None
