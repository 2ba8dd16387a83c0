"""Sequential SGD inner loop for skip-gram training.

The loop is jitted with numba when available and falls back to the same
Python code otherwise (slow, but identical update order). All randomness
is drawn ahead of time by the caller, so results are bitwise reproducible
either way.
"""
from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap(args[0]) if args and callable(args[0]) else wrap


@njit(cache=True)
def _sigmoid(z):
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


@njit(cache=True)
def apply_sgns_updates(alpha, beta, centers, contexts, negatives,
                       eta0, eta_end, total_updates, first_update,
                       trace_i, trace_j, trace):
    """Run one pair-update per (center, context) row, in order.

    The step size interpolates linearly from eta0 (update 0) to eta_end
    (update total_updates - 1). A negative equal to the positive context
    is skipped. When trace_i >= 0, trace[k] records alpha[trace_i] .
    beta[trace_j] after update k.
    """
    n_pairs = centers.shape[0]
    dims = alpha.shape[1]
    n_neg = negatives.shape[1]
    denom = float(total_updates - 1) if total_updates > 1 else 1.0
    grad = np.zeros(dims)
    for k in range(n_pairs):
        eta = eta0 + (eta_end - eta0) * ((first_update + k) / denom)
        ci = centers[k]
        cj = contexts[k]
        for d in range(dims):
            grad[d] = 0.0
        z = 0.0
        for d in range(dims):
            z += alpha[ci, d] * beta[cj, d]
        g = eta * (1.0 - _sigmoid(z))
        for d in range(dims):
            grad[d] += g * beta[cj, d]
            beta[cj, d] += g * alpha[ci, d]
        for t in range(n_neg):
            kn = negatives[k, t]
            if kn == cj:
                continue
            z = 0.0
            for d in range(dims):
                z += alpha[ci, d] * beta[kn, d]
            g = -eta * _sigmoid(z)
            for d in range(dims):
                grad[d] += g * beta[kn, d]
                beta[kn, d] += g * alpha[ci, d]
        for d in range(dims):
            alpha[ci, d] += grad[d]
        if trace_i >= 0:
            z = 0.0
            for d in range(dims):
                z += alpha[trace_i, d] * beta[trace_j, d]
            trace[k + first_update] = z
