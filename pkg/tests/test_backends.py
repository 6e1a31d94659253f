import os
import subprocess
import sys

import numpy as np
import pytest

from areabilliard import _pykernels
from areabilliard._backend import BACKEND
from areabilliard.sampling import random_config

kernels = pytest.importorskip("areabilliard._kernels", reason="compiled kernels not built")


def test_compiled_backend_selected():
    assert BACKEND == "cython"


def test_pure_python_override():
    code = "from areabilliard._backend import BACKEND; print(BACKEND)"
    env = dict(os.environ, AREABILLIARD_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_backends_agree_bit_for_bit(rng):
    for _ in range(200):
        cfg = random_config(rng)
        arrays = cfg.poly.kernel_args("cython")
        lists = cfg.poly.kernel_args("python")
        s = float(rng.uniform(-2, 2))
        assert kernels.locate(arrays.cum, s % 1.0) == _pykernels.locate(lists.cum, s % 1.0)
        a = kernels.lift_iterate(*arrays, cfg.A, s, 50)
        b = _pykernels.lift_iterate(*lists, cfg.A, s, 50)
        assert a == b
        side, t = _pykernels.locate(lists.cum, s % 1.0)
        assert kernels.step(*arrays, cfg.A, side, t) == _pykernels.step(*lists, cfg.A, side, t)
        areas = list(rng.uniform(0.05, 0.45, 5) * cfg.poly.area)
        assert kernels.lift_areas(*arrays, areas, s) == _pykernels.lift_areas(*lists, areas, s)


def test_displacement_grid_agrees(rng):
    cfg = random_config(rng)
    svals = np.linspace(0, 1, 33)
    a = kernels.displacement_grid(*cfg.poly.kernel_args("cython"), cfg.A, svals, 1, 5)
    b = _pykernels.displacement_grid(*cfg.poly.kernel_args("python"), cfg.A, svals, 1, 5)
    assert np.array_equal(np.asarray(a), np.asarray(b))


def test_oversized_area_reported(square):
    arrays, lists = square.kernel_args("cython"), square.kernel_args("python")
    assert kernels.step(*arrays, 2.0, 0, 0.5)[0] == -1
    assert _pykernels.step(*lists, 2.0, 0, 0.5)[0] == -1
    with pytest.raises(ValueError):
        kernels.lift_iterate(*arrays, 2.0, 0.1, 3)
    with pytest.raises(ValueError):
        _pykernels.lift_iterate(*lists, 2.0, 0.1, 3)
