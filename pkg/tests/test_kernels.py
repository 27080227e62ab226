"""JIT kernels agree with their pure-numpy twins and the env flag works."""

import numpy as np
import pytest

import oracles
from kgquiz import _kernels


def _dataset(seed=0, m=120, n=8):
    rng = np.random.RandomState(seed)
    X = rng.normal(size=(m, n))
    y = (X[:, 0] + 0.5 * rng.normal(size=m) > 0).astype(np.float64)
    return X, y


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba unavailable")
def test_fit_paths_agree():
    X, y = _dataset()
    w_np, b_np, e_np = _kernels.logreg_fit_numpy(X, y, 0.1, 300, 0.01, 1e-9)
    w_nb, b_nb, e_nb = _kernels._logreg_fit_jit(X, y, 0.1, 300, 0.01, 1e-9)
    assert e_np == e_nb
    assert b_np == pytest.approx(b_nb, abs=1e-9)
    assert np.allclose(w_np, w_nb, atol=1e-9)


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba unavailable")
def test_tau_paths_agree():
    rng = np.random.RandomState(1)
    a = rng.randint(0, 5, size=200).astype(np.float64)
    b = rng.randint(0, 5, size=200).astype(np.float64)
    assert _kernels.tau_counts_numpy(a, b) == _kernels._tau_counts_jit(a, b)


def test_env_flag_forces_numpy(monkeypatch):
    monkeypatch.setenv("KGQUIZ_NUMBA", "0")
    assert not _kernels.use_numba()
    X, y = _dataset(seed=3)
    w, b, e = _kernels.logreg_fit(X, y, 0.1, 50, 0.01, 1e-9)
    w2, b2, e2 = _kernels.logreg_fit_numpy(X, y, 0.1, 50, 0.01, 1e-9)
    assert np.array_equal(w, w2) and b == b2 and e == e2


def test_flag_unset_prefers_numba(monkeypatch):
    monkeypatch.delenv("KGQUIZ_NUMBA", raising=False)
    assert _kernels.use_numba() == _kernels.HAVE_NUMBA


def test_tau_counts_match_definition_oracle():
    rng = np.random.RandomState(2)
    for _ in range(30):
        n = rng.randint(2, 40)
        a = rng.randint(0, 6, size=n).astype(np.float64)
        b = rng.randint(0, 6, size=n).astype(np.float64)
        c, d, ta, tb = _kernels.tau_counts(a, b)
        # re-classify every pair independently
        cc = dd = taa = tbb = 0
        for i in range(n):
            for j in range(i + 1, n):
                da = np.sign(a[i] - a[j])
                db = np.sign(b[i] - b[j])
                if da == 0 and db == 0:
                    continue
                if da == 0:
                    taa += 1
                elif db == 0:
                    tbb += 1
                elif da == db:
                    cc += 1
                else:
                    dd += 1
        assert (c, d, ta, tb) == (cc, dd, taa, tbb)


def test_gradient_matches_loss_finite_differences():
    X, y = _dataset(seed=4, m=60, n=5)
    rng = np.random.RandomState(5)
    for _ in range(5):
        w = rng.normal(size=5)
        b = float(rng.normal())
        gw, gb = _kernels.logreg_grad(X, y, w, b, 0.01)

        def f(params):
            return _kernels.logreg_loss(X, y, np.array(params[:-1]), params[-1], 0.01)

        fd = oracles.central_diff_gradient(f, list(w) + [b])
        analytic = list(gw) + [gb]
        for a_i, f_i in zip(analytic, fd):
            assert a_i == pytest.approx(f_i, rel=1e-4, abs=1e-8)
