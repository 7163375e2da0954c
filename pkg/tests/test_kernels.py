import importlib.util
import os
import subprocess
import sys

import numpy as np
import pytest
from scipy import sparse

from srlab.modulus import kernels

HAVE_COMPILED = importlib.util.find_spec("srlab.modulus._kernels") is not None


def family(rng, n_curves=30, n_nodes=60, length=6):
    rows = np.repeat(np.arange(n_curves), length)
    cols = np.concatenate([rng.choice(n_nodes, length, replace=False) for _ in range(n_curves)])
    W = sparse.csr_matrix((rng.uniform(0.1, 1, rows.size), (rows, cols)),
                          shape=(n_curves, n_nodes))
    W.sort_indices()
    return W, rng.uniform(0.5, 2, n_nodes)


def run(backend, W, mu, q, sweeps):
    lam = np.zeros(W.shape[0])
    s = np.zeros(W.shape[1])
    kernels.ascent_sweeps(W, mu, q, lam, s, sweeps, backend)
    return lam, s


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled kernel not built")
@pytest.mark.parametrize("q", [2.0, 4.0, 1.5])
def test_backends_agree(rng, q):
    W, mu = family(rng)
    lam_p, s_p = run("python", W, mu, q, 15)
    lam_c, s_c = run("cython", W, mu, q, 15)
    assert np.allclose(lam_p, lam_c, rtol=1e-12, atol=1e-14)
    assert np.allclose(s_p, s_c, rtol=1e-12, atol=1e-14)


def test_load_consistent_with_multipliers(rng):
    W, mu = family(rng)
    lam, s = run("python", W, mu, 4.0, 10)
    assert np.all(lam >= 0)
    assert np.allclose(s, W.T @ lam, rtol=1e-10, atol=1e-12)


def test_ascent_increases_dual(rng):
    from srlab.modulus.solver import dual_value
    W, mu = family(rng)
    lam = np.zeros(W.shape[0])
    s = np.zeros(W.shape[1])
    prev = 0.0
    for _ in range(5):
        kernels.ascent_sweeps(W, mu, 4.0, lam, s, 1)
        cur = dual_value(lam, s, mu, 4.0)
        assert cur >= prev - 1e-12
        prev = cur


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels._backend("fortran")


def test_pure_python_env_switch():
    env = dict(os.environ, SRLAB_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c",
                          "from srlab.modulus import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
