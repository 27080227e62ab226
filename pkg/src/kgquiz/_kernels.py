"""Numeric hot loops: logistic-regression fitting and rank-pair counting.

Each kernel has a JIT-compiled implementation and a pure-numpy twin.  The
JIT path is used when numba is importable; set ``KGQUIZ_NUMBA=0`` to force
the numpy fallback (checked per call, so the flag can be flipped at runtime).
Both paths implement the same algorithm; within one path results are
bit-reproducible.

``benchmarks/bench_kernels.py`` compares the two paths.
"""

import os

import numpy as np

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap


def use_numba() -> bool:
    if os.environ.get("KGQUIZ_NUMBA", "") == "0":
        return False
    return HAVE_NUMBA


# --- logistic regression ----------------------------------------------------
#
# Full-batch gradient descent on the mean negative log-likelihood plus an
# L2 penalty (l2/2)*||w||^2 on the weights only; the bias is unregularized.
# Weights start at zero.  Training stops at the epoch cap or when the max
# absolute gradient component (bias included) drops below the tolerance.
# If an update would increase the loss, the step is halved and the epoch
# retried; the reduced step is kept, so the loss sequence is non-increasing.

_MIN_STEP = 1e-15


def _sigmoid_np(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logreg_loss(X, y, w, b, l2) -> float:
    """Regularized mean NLL at (w, b)."""
    z = X @ w + b
    # log(1 + e^-|z|) + max(z, 0) - z*y, elementwise-stable NLL
    nll = np.log1p(np.exp(-np.abs(z))) + np.maximum(z, 0.0) - z * y
    return float(nll.mean() + 0.5 * l2 * float(w @ w))


def logreg_grad(X, y, w, b, l2):
    """Analytic gradient of :func:`logreg_loss` as (d/dw, d/db)."""
    m = X.shape[0]
    d = _sigmoid_np(X @ w + b) - y
    return X.T @ d / m + l2 * w, float(d.mean())


def logreg_fit_numpy(X, y, lr, epochs, l2, tol):
    """Pure-numpy twin of the JIT kernel.  Returns (weights, bias, epochs_run)."""
    n = X.shape[1]
    w = np.zeros(n)
    b = 0.0
    step = lr
    loss = logreg_loss(X, y, w, b, l2)
    epochs_run = 0
    for _ in range(epochs):
        gw, gb = logreg_grad(X, y, w, b, l2)
        if max(np.max(np.abs(gw)), abs(gb)) < tol:
            break
        while True:
            w2 = w - step * gw
            b2 = b - step * gb
            new_loss = logreg_loss(X, y, w2, b2, l2)
            if new_loss <= loss:
                break
            step *= 0.5
            if step < _MIN_STEP:
                return w, b, epochs_run
        w, b, loss = w2, b2, new_loss
        epochs_run += 1
    return w, b, epochs_run


@njit(cache=True)
def _logreg_fit_jit(X, y, lr, epochs, l2, tol):  # pragma: no cover - exercised via dispatcher
    m, n = X.shape
    w = np.zeros(n)
    b = 0.0
    step = lr

    z = np.zeros(m)
    loss = 0.0
    for i in range(m):
        loss += np.log1p(np.exp(-abs(z[i]))) + max(z[i], 0.0) - z[i] * y[i]
    loss /= m

    epochs_run = 0
    for _ in range(epochs):
        for i in range(m):
            zi = b
            for j in range(n):
                zi += X[i, j] * w[j]
            z[i] = zi
        gw = np.zeros(n)
        gb = 0.0
        for i in range(m):
            if z[i] >= 0:
                h = 1.0 / (1.0 + np.exp(-z[i]))
            else:
                ez = np.exp(z[i])
                h = ez / (1.0 + ez)
            d = h - y[i]
            for j in range(n):
                gw[j] += d * X[i, j]
            gb += d
        g_max = abs(gb / m)
        for j in range(n):
            gw[j] = gw[j] / m + l2 * w[j]
            if abs(gw[j]) > g_max:
                g_max = abs(gw[j])
        gb /= m
        if g_max < tol:
            break
        w2 = np.zeros(n)
        b2 = 0.0
        new_loss = 0.0
        while True:
            for j in range(n):
                w2[j] = w[j] - step * gw[j]
            b2 = b - step * gb
            new_loss = 0.0
            for i in range(m):
                zi = b2
                for j in range(n):
                    zi += X[i, j] * w2[j]
                new_loss += np.log1p(np.exp(-abs(zi))) + max(zi, 0.0) - zi * y[i]
            new_loss /= m
            reg = 0.0
            for j in range(n):
                reg += w2[j] * w2[j]
            new_loss += 0.5 * l2 * reg
            if new_loss <= loss:
                break
            step *= 0.5
            if step < _MIN_STEP:
                return w, b, epochs_run
        for j in range(n):
            w[j] = w2[j]
        b = b2
        loss = new_loss
        epochs_run += 1
    return w, b, epochs_run


def logreg_fit(X, y, lr, epochs, l2, tol):
    """Dispatch to the JIT kernel or the numpy twin per ``KGQUIZ_NUMBA``."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if use_numba():
        w, b, epochs_run = _logreg_fit_jit(X, y, float(lr), int(epochs), float(l2), float(tol))
        return w, float(b), int(epochs_run)
    return logreg_fit_numpy(X, y, float(lr), int(epochs), float(l2), float(tol))


# --- rank pair counting -----------------------------------------------------
#
# Counts over all index pairs i<j of two score vectors: concordant,
# discordant, tied only in a, tied only in b.  The tau-b statistic is
# assembled from these by the caller.


def tau_counts_numpy(a, b):
    da = np.sign(a[:, None] - a[None, :])
    db = np.sign(b[:, None] - b[None, :])
    iu = np.triu_indices(len(a), k=1)
    da, db = da[iu], db[iu]
    prod = da * db
    concordant = int(np.count_nonzero(prod > 0))
    discordant = int(np.count_nonzero(prod < 0))
    tied_a = int(np.count_nonzero((da == 0) & (db != 0)))
    tied_b = int(np.count_nonzero((db == 0) & (da != 0)))
    return concordant, discordant, tied_a, tied_b


@njit(cache=True)
def _tau_counts_jit(a, b):  # pragma: no cover - exercised via dispatcher
    n = a.shape[0]
    concordant = 0
    discordant = 0
    tied_a = 0
    tied_b = 0
    for i in range(n):
        for j in range(i + 1, n):
            da = a[i] - a[j]
            db = b[i] - b[j]
            if da == 0.0 and db == 0.0:
                continue
            if da == 0.0:
                tied_a += 1
            elif db == 0.0:
                tied_b += 1
            elif (da > 0.0) == (db > 0.0):
                concordant += 1
            else:
                discordant += 1
    return concordant, discordant, tied_a, tied_b


def tau_counts(a, b):
    """Pair counts (concordant, discordant, tied-only-in-a, tied-only-in-b)."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if use_numba():
        c, d, ta, tb = _tau_counts_jit(a, b)
        return int(c), int(d), int(ta), int(tb)
    return tau_counts_numpy(a, b)
