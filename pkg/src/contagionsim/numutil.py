"""Shared numeric helpers: stable sigmoid, golden-section search, spectral radius."""
from __future__ import annotations

import math

import numpy as np


def sigmoid(x):
    """Numerically stable logistic function, elementwise."""
    arr = np.asarray(x, dtype=np.float64)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)
    pos = arr >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-arr[pos]))
    ex = np.exp(arr[~pos])
    out[~pos] = ex / (1.0 + ex)
    return float(out[0]) if scalar else out


def log1pexp(x):
    """log(1 + exp(x)) without overflow."""
    return np.logaddexp(0.0, x)


def golden_section_maximize(f, lo, hi, tol=1e-8, max_iter=200):
    """Maximize a unimodal function on [lo, hi].

    Returns (argmax, value, evaluations).
    """
    if not hi > lo:
        raise ValueError("need hi > lo")
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    evals = 2
    for _ in range(max_iter):
        if b - a < tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
        evals += 1
    x = c if fc >= fd else d
    fx = max(fc, fd)
    return x, fx, evals


def spectral_radius(mat, exact_max_n=600, iters=200):
    """Largest eigenvalue magnitude of a square matrix.

    Exact eigenvalues for small matrices; for larger ones a power iteration
    whose growth rates are averaged over the tail half of the iterations,
    which copes with complex-conjugate eigenvalue pairs.
    """
    mat = np.asarray(mat, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("expected a square matrix")
    n = mat.shape[0]
    if n <= exact_max_n:
        return float(np.max(np.abs(np.linalg.eigvals(mat)))) if n else 0.0
    rng = np.random.default_rng(0)
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    logs = []
    for it in range(iters):
        y = mat @ x
        nrm = np.linalg.norm(y)
        if nrm == 0.0:
            return 0.0
        x = y / nrm
        if it >= iters // 2:
            logs.append(math.log(nrm))
    return float(math.exp(np.mean(logs)))


def design_condition(x):
    """Condition number of a design matrix plus the near-null direction.

    Returns (condition, null_vector) where null_vector is the right singular
    vector of the smallest singular value.
    """
    _, s, vt = np.linalg.svd(np.asarray(x, dtype=np.float64), full_matrices=False)
    if s[-1] == 0.0:
        cond = math.inf
    else:
        cond = float(s[0] / s[-1])
    return cond, vt[-1]
