"""Small numerical helpers: compensated sums, seeded generators, p-norms."""
import math
import os

import numpy as np

_BLOCK = 4096


def csum(values):
    """Deterministic compensated sum of an array (real or complex).

    Blocks are reduced with numpy's pairwise sum, and the block sums are then
    accumulated exactly with :func:`math.fsum`, so the result does not depend on
    how a caller chunks the work.
    """
    a = np.ravel(np.asarray(values))
    if np.iscomplexobj(a):
        return complex(csum(a.real), csum(a.imag))
    if a.size <= _BLOCK:
        return math.fsum(a.tolist())
    pad = (-a.size) % _BLOCK
    if pad:
        a = np.concatenate([a, np.zeros(pad, dtype=a.dtype)])
    partial = a.reshape(-1, _BLOCK).sum(axis=1)
    return math.fsum(partial.tolist())


def rng(seed, *stream):
    """Counter-based (Philox) generator keyed by ``seed`` and optional stream ids."""
    key = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(s) & 0xFFFFFFFFFFFFFFFF for s in stream]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def conjugate_exponent(p):
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def weighted_pnorm(values, weights, p):
    """(sum |v|^p w)^(1/p) with compensated accumulation."""
    total = csum(np.abs(values) ** p * weights)
    return max(total, 0.0) ** (1.0 / p)


def expm1_over(u):
    """(e^u - 1)/u for complex arrays, using a Taylor series near 0."""
    u = np.asarray(u, dtype=complex)
    out = np.empty_like(u)
    small = np.abs(u) < 1e-4
    big = ~small
    out[big] = np.expm1(u[big]) / u[big]
    us = u[small]
    out[small] = 1.0 + us / 2.0 + us * us / 6.0 + us ** 3 / 24.0
    return out


THREADS_ENV = "LAPLACE_CARLESON_THREADS"


def thread_count(default=1):
    """Worker threads for per-function loops, from ``LAPLACE_CARLESON_THREADS``."""
    raw = os.environ.get(THREADS_ENV, "")
    try:
        n = int(raw) if raw.strip() else default
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return max(1, n)


def ordered_map(func, items, workers=None):
    """``[func(x) for x in items]``, optionally on a thread pool; order is preserved."""
    items = list(items)
    workers = thread_count() if workers is None else max(1, int(workers))
    if workers == 1 or len(items) < 2:
        return [func(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(func, items))
