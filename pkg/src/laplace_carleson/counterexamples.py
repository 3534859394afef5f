"""Factorization audit for the measure ``sum_n c_n delta_{n^2 + i}``.

A factorization ``mu = w_0 w_1 dM`` with ``M = sum_n c_n delta_{n^2+i}`` needs
``w_{0,n} w_{1,n} c_n = 1`` at every atom, a global bound
``C0 = sum_n w_{0,n}^2 c_n <= cap0`` and a box bound
``C1 = sup_I (1/|I|) sum_{n^2 in I} w_{1,n}^2 c_n <= cap1``.  Since
``(w_0^2 c)(w_1^2 c) = 1`` per atom,

    N = sum_n (w_{0,n}^2 c_n)(w_{1,n}^2 c_n) <= C1 * C0,

so no candidate with ``N`` atoms fits under caps with ``cap0 * cap1 < N``.
All constraints depend only on ``t_n = w_{1,n}^2 c_n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._numerics import rng
from .measures import SquaresAtHeightOne, carleson_sup


def _exact(x) -> Fraction:
    """Exact value of a cap: decimal strings and floats by their shortest repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(str(x))


@dataclass
class FactorizationCandidate:
    """Values of ``c``, ``w_0`` and ``w_1`` at the atoms ``n^2 + i``, ``n = 1..N``."""

    c: np.ndarray
    w0: np.ndarray
    w1: np.ndarray
    rtol: float = 1e-12

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.w0 = np.asarray(self.w0, dtype=float)
        self.w1 = np.asarray(self.w1, dtype=float)
        if not (self.c.shape == self.w0.shape == self.w1.shape) or self.c.ndim != 1:
            raise ValueError("c, w0 and w1 must be equal-length sequences")
        if np.any(self.c <= 0):
            raise ValueError("atom masses c_n must be positive")
        if np.any(self.w0 < 0) or np.any(self.w1 < 0):
            raise ValueError("weights must be nonnegative")
        prod = self.w0 * self.w1 * self.c
        bad = np.flatnonzero(np.abs(prod - 1.0) > self.rtol)
        if bad.size:
            n = int(bad[0]) + 1
            raise ValueError(f"product condition w0*w1*c = 1 fails at atom n = {n} "
                             f"(value {prod[bad[0]]:.6g})")

    @property
    def N(self):
        return len(self.c)

    @classmethod
    def from_profile(cls, t, c=None):
        """Candidate with ``w_1^2 c = t`` and ``w_0 = 1 / (w_1 c)``."""
        t = np.asarray(t, dtype=float)
        c = np.ones_like(t) if c is None else np.asarray(c, dtype=float)
        w1 = np.sqrt(t / c)
        return cls(c, 1.0 / (w1 * c), w1)

    @classmethod
    def uniform(cls, N, t=1.0):
        return cls.from_profile(np.full(int(N), float(t)))

    def scaled(self, lam):
        """``c -> lam c``, ``w_i -> w_i / sqrt(lam)``: products and conditions are unchanged."""
        s = math.sqrt(lam)
        return FactorizationCandidate(self.c * lam, self.w0 / s, self.w1 / s, self.rtol)

    def profile(self):
        return self.w1 ** 2 * self.c

    def to_dict(self):
        return {"N": self.N, "c": self.c.tolist(), "w0": self.w0.tolist(), "w1": self.w1.tolist()}


def box_condition(t):
    """``sup_I (1/max(|I|, 1)) sum_{n^2 in I} t_n`` over closed intervals.

    Boxes shorter than 1 miss the atoms at height 1, so only ``|I| >= 1``
    counts; the extremal interval for a run of atoms ``i..j`` is
    ``[i^2, j^2]`` (lengthened to 1 for a single atom).

    Returns ``(value, (i, j))`` with 1-based atom indices.
    """
    t = np.asarray(t, dtype=float)
    N = len(t)
    if N == 0:
        return 0.0, None
    best, arg = -1.0, None
    cum = np.concatenate([[0.0], np.cumsum(t)])
    n = np.arange(1, N + 1, dtype=float)
    for i in range(N):
        span = np.maximum(n[i:] ** 2 - n[i] ** 2, 1.0)
        vals = (cum[i + 1:] - cum[i]) / span
        j = int(np.argmax(vals))
        if vals[j] > best:
            best, arg = float(vals[j]), (i + 1, i + 1 + j)
    return best, arg


@dataclass
class AuditResult:
    N: int
    C0: float
    C1: float
    caps: tuple
    feasible: bool
    witness: dict = field(default_factory=dict)

    def to_dict(self):
        return {"N": self.N, "C0": self.C0, "C1": self.C1, "caps": list(self.caps),
                "feasible": self.feasible, "witness": self.witness}


def audit_factorization(cand: FactorizationCandidate, caps=(1.0, 1.0)) -> AuditResult:
    """Evaluate both factorization conditions and compare with ``caps``.

    Examples
    --------
    >>> r = audit_factorization(FactorizationCandidate.uniform(10), caps=(2, 2))
    >>> (r.C0, r.C1, r.feasible)
    (10.0, 1.0, False)
    """
    cap0, cap1 = (float(c) for c in caps)
    if cap0 <= 0 or cap1 <= 0:
        raise ValueError("caps must be positive")
    t = cand.profile()
    C0 = math.fsum((cand.w0 ** 2 * cand.c).tolist())
    C1, arg = box_condition(t)
    unit = float(np.max(t)) if t.size else 0.0
    feasible = C0 <= cap0 and C1 <= cap1
    witness = {"per_box_max": unit, "box_atoms": list(arg) if arg else None,
               "count_bound": {"N": cand.N, "C0_times_C1": C0 * C1}}
    if _exact(cand.N) > _exact(cap0) * _exact(cap1):
        witness["reason"] = (f"N = {cand.N} exceeds cap0 * cap1 = {cap0 * cap1:g}, "
                             "and every candidate satisfies N <= C0 * C1")
    elif not feasible:
        failed = [name for name, v, cap in (("C0", C0, cap0), ("C1", C1, cap1)) if v > cap]
        witness["reason"] = "condition(s) above cap: " + ", ".join(failed)
    else:
        witness["reason"] = "both conditions within caps"
    return AuditResult(cand.N, C0, C1, (cap0, cap1), feasible, witness)


def uniform_search_values(N, cap0, cap1, points=61):
    """Log grid of ``t`` on ``[1e-3, 1e3]`` plus the endpoints ``N/cap0`` and ``cap1``
    of the feasible interval for the uniform profile."""
    grid = [float(x) for x in np.logspace(-3, 3, points)]
    ends = [float(_exact(N) / _exact(cap0)), float(_exact(cap1))]
    return sorted(set(grid + ends))


def _uniform_feasible_exact(N, t, cap0, cap1):
    t = _exact(t)
    return _exact(N) / t <= _exact(cap0) and t <= _exact(cap1)


def grid_search(N, cap0, cap1, random_profiles=1000, seed=0, points=61):
    """Look for a feasible candidate: the uniform family on the ``t`` grid, then
    seeded log-uniform random profiles.  Returns a witness dict or ``None``."""
    for t in uniform_search_values(N, cap0, cap1, points):
        if _uniform_feasible_exact(N, t, cap0, cap1):
            res = audit_factorization(FactorizationCandidate.uniform(N, t), (cap0, cap1))
            return {"family": "uniform", "t": t, "C0": float(_exact(N) / _exact(t)), "C1": t,
                    "audit_C0": res.C0}
    g = rng(seed, 300, N)
    for k in range(random_profiles):
        t = 10.0 ** g.uniform(-3, 3, N)
        res = audit_factorization(FactorizationCandidate.from_profile(t), (cap0, cap1))
        if res.feasible:
            return {"family": "random", "index": k, "C0": res.C0, "C1": res.C1}
    return None


def infeasibility_certificate(N, cap0, cap1, search=True, random_profiles=1000, seed=0):
    """``infeasible`` iff ``N > cap0 * cap1`` in exact arithmetic, else ``unknown``
    together with a feasible witness from :func:`grid_search` when one exists.

    Examples
    --------
    >>> infeasibility_certificate(10, 2, 2)["status"]
    'infeasible'
    >>> infeasibility_certificate(3, 2, 2)["witness"]["family"]
    'uniform'
    """
    N = int(N)
    if N < 1:
        raise ValueError("N must be a positive integer")
    c0, c1 = _exact(cap0), _exact(cap1)
    if c0 <= 0 or c1 <= 0:
        raise ValueError("caps must be positive")
    out = {"N": N, "caps": [str(c0), str(c1)], "product": str(c0 * c1)}
    if N > c0 * c1:
        out.update(status="infeasible",
                   reason=f"N = {N} > cap0 * cap1 = {c0 * c1}, while N <= C0 * C1 for every candidate")
        return out
    out["status"] = "unknown"
    if search:
        out["witness"] = grid_search(N, float(c0), float(c1), random_profiles, seed)
    return out


def squares_measure_carleson(N, beta=0.5):
    """Exact Carleson supremum of ``sum_{n <= N} delta_{n^2 + i}`` at exponent ``beta``."""
    return carleson_sup(SquaresAtHeightOne(int(N)), beta, family="exhaustive")


def annulus_family(p_prime=4.0, radii=(4, 8, 16, 32, 64)):
    """Annulus indicators ``1_{A_R}`` and their transforms' Sobolev norms, as rows."""
    from .littlewood_paley import annulus_decay_check
    return [r.to_dict() for r in annulus_decay_check(p_prime, radii)]
