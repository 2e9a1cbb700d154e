import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from kinedeep import skeleton as sk


@pytest.fixture(scope="session")
def hand():
    return sk.default_hand()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240917)


def sample_in_bounds(skel, rng, n=1, margin=0.0):
    """Uniform poses strictly inside the DOF box (margin as range fraction)."""
    lo = skel.dof_lower + margin * (skel.dof_upper - skel.dof_lower)
    hi = skel.dof_upper - margin * (skel.dof_upper - skel.dof_lower)
    out = rng.uniform(lo, hi, size=(n, skel.n_dofs))
    return out[0] if n == 1 else out
