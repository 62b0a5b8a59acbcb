import os
import subprocess
import sys

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twointerval import _accel, kernels
from twointerval.gaussian_core import CovarianceKind, Geometry, build_covariance
from twointerval.symbol import from_step


def as_list(out):
    return list(out) if isinstance(out, tuple) else [out]


@pytest.mark.parametrize("size", [1, 5, 18])
def test_ladder_forms_agree(size):
    k = max(size // 2 - 1, 0)
    geo = Geometry(k, size - k - 2, 4 * size) if size > 1 else None
    if geo is None:
        mat = np.array([[0.3 + 2j]])
    else:
        mat = build_covariance(from_step(1.0), geo, CovarianceKind.NEGATIVITY).entries + 2j * np.eye(size)
    etas_a, fail_a = kernels.lu_ladder(mat)
    etas_b, fail_b = kernels.lu_ladder_numpy(mat, 1e-14)
    assert fail_a == fail_b == -1
    assert np.allclose(etas_a, etas_b, rtol=1e-12, atol=0)
    assert np.prod(etas_a) == pytest.approx(np.linalg.det(mat), rel=1e-10)


def test_ladder_reports_a_vanishing_pivot():
    mat = np.array([[1.0, 2.0], [3.0, 4.0]], dtype=complex)
    mat[0, 0] = 0.0
    for fn in (kernels.lu_ladder_numpy, kernels.lu_ladder_loop):
        _, fail = fn(mat, 1e-14)
        assert fail == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_dispersion_root_forms_agree(seed):
    rng = np.random.default_rng(seed)
    levels = int(rng.integers(1, 6))
    energies = rng.uniform(-2.0, 2.0, 7)
    poles = np.sort(rng.uniform(-1.0, 3.0, levels)) + np.arange(levels) * 1e-3
    c2 = rng.uniform(1e-3, 1e-1, levels)
    fast = as_list(kernels.dispersion_roots(energies, poles, c2))
    slow = as_list(kernels.dispersion_roots_numpy(energies, poles, c2))
    for a, b in zip(fast, slow):
        assert np.allclose(a, b, rtol=1e-10, atol=1e-12)


def test_taylor_walk_follows_the_exponential_integral():
    # a = 0 admits w = Ei(z), for which w' = e^z / z
    start, end = 1.0 + 0j, 3.0 + 2j
    w, dw, steps, ok = kernels.kummer_taylor_walk(0.0, start, complex(mpmath.ei(1.0)),
                                                  np.e + 0j, end, 0.35, 1.0)
    assert ok and steps > 1
    assert w == pytest.approx(complex(mpmath.ei(end)), rel=1e-12)
    assert dw == pytest.approx(np.exp(end) / end, rel=1e-12)


def test_environment_flag_selects_numpy_backend():
    env = dict(os.environ, TWOINTERVAL_DISABLE_NUMBA="1")
    code = ("from twointerval import _accel; from twointerval.orthopoly import det_ratio;"
            "from twointerval.symbol import from_step; from twointerval.gaussian_core import Geometry;"
            "print(_accel.backend_name()); print(repr(det_ratio(from_step(1.0), Geometry(6, 6, 30), 2j)))")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True).stdout.split()
    assert out[0] == "numpy"
    from twointerval.orthopoly import det_ratio
    assert complex(out[1]) == pytest.approx(det_ratio(from_step(1.0), Geometry(6, 6, 30), 2j),
                                            rel=1e-12)


def test_backend_name_reports_state():
    assert _accel.backend_name() in ("numba", "numpy")
