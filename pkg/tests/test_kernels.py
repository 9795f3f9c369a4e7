"""The numba kernels and their numpy fallbacks must agree exactly."""

import numpy as np
import pytest

from treecut import _kernels
from treecut.tree import from_parents

from util import random_tree

needs_numba = pytest.mark.skipif(not _kernels.HAS_NUMBA,
                                 reason="numba backend not available")


def _tree_args(n, seed, tall=False):
    t = random_tree(n, seed, tall)
    return t, (t.parent, t.order, t.level_ptr)


@needs_numba
@pytest.mark.parametrize("seed,tall", [(0, False), (1, True), (2, False)])
def test_size_and_load_parity(seed, tall):
    t, args = _tree_args(400, seed, tall)
    s_np, l_np = _kernels.IMPLS["numpy"]["size_and_load"](*args)
    s_nb, l_nb = _kernels.IMPLS["numba"]["size_and_load"](*args)
    assert np.array_equal(s_np, s_nb)
    assert np.array_equal(l_np, l_nb)


@needs_numba
def test_tree_solve_parity():
    t, args = _tree_args(300, seed=5)
    deg = t.degrees()
    b = np.ones(t.n)
    b[t.root] = 0.0
    x_np = _kernels.IMPLS["numpy"]["tree_solve"](*args, deg, b)
    x_nb = _kernels.IMPLS["numba"]["tree_solve"](*args, deg, b)
    assert np.allclose(x_np, x_nb, rtol=0, atol=1e-12)


@needs_numba
def test_matvec_parity():
    t, _ = _tree_args(250, seed=9, tall=True)
    x = np.linspace(-1, 2, t.n)
    y_np = _kernels.IMPLS["numpy"]["laplacian_matvec"](t.parent, t.degrees(), x)
    y_nb = _kernels.IMPLS["numba"]["laplacian_matvec"](t.parent, t.degrees(), x)
    assert np.allclose(y_np, y_nb, rtol=0, atol=1e-12)


@needs_numba
def test_tv_parity():
    rng = np.random.default_rng(3)
    P = rng.random((80, 80))
    a = _kernels.IMPLS["numpy"]["tv_from_kernel"](P, 1 / 80)
    b = _kernels.IMPLS["numba"]["tv_from_kernel"](P, 1 / 80)
    assert a == pytest.approx(b, abs=1e-13)


def test_matvec_against_dense():
    t = random_tree(60, seed=4)
    from treecut.spectral import laplacian
    Q = laplacian(t)
    x = np.sin(np.arange(t.n, dtype=float))
    y = _kernels.laplacian_matvec(t.parent, t.degrees(), x)
    assert np.allclose(y, Q @ x, atol=1e-12)


def test_tree_solve_solves_dirichlet_system():
    t = random_tree(45, seed=8, tall=True)
    from treecut.spectral import laplacian
    Q = laplacian(t)
    b = np.arange(t.n, dtype=float)
    b[t.root] = 0.0
    x = _kernels.tree_solve(t.parent, t.order, t.level_ptr, t.degrees(), b)
    resid = Q @ x - b
    resid[t.root] = 0.0  # the root row is replaced by the pin x[root]=0
    assert np.abs(resid).max() < 1e-9
    assert x[t.root] == 0.0


def test_env_flag_selects_numpy(tmp_path):
    # a fresh interpreter with TREECUT_NUMBA=0 must report the numpy backend
    import subprocess
    import sys
    code = "import treecut._kernels as k; print(k.BACKEND, k.HAS_NUMBA)"
    out = subprocess.run([sys.executable, "-c", code],
                         env={"TREECUT_NUMBA": "0", "PATH": "/usr/bin:/bin"},
                         capture_output=True, text=True, cwd="/")
    assert out.stdout.split() == ["numpy", "False"]
