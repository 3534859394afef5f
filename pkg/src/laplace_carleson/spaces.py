"""Target-space norms on the upper half-plane and the disk.

* ``lq_mu_norm``: ``(int |F|^q dmu)^(1/q)``, exact for atomic measures.
* ``bergman_norm``: ``(int int |F(x+iy)|^q y^gamma dx dy)^(1/q)`` on a sinh-mapped
  x-grid times a logarithmic y-grid, plus analytic tail bounds.
* ``hardy_norm``: ``sup_y ||F(. + iy)||_{L^p}`` along a decreasing y-sequence.
* ``disk_bergman_norm``: polar quadrature of ``|sum a_k w^k|^q (1-|w|^2)^gamma``.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import special

from ._numerics import csum
from .errors import DomainError, QuadratureError
from .laplace import LaplaceField, laplace_tensor, laplace_values
from .measures import Atomic, MeasureRepr
from .signals import (CoeffSeries, ExpPoly, Indicator, NormValue,
                      SpaceDescriptor, StepDyadic, TestFunction)


def _root(total, err, q):
    """Norm and error estimate from an integral of ``|F|^q`` and its error."""
    total = max(total, 0.0)
    val = total ** (1.0 / q)
    err_n = (total + err) ** (1.0 / q) - val
    return val, max(err_n, 0.0)


def _evaluate_field(F, z):
    if isinstance(F, TestFunction):
        return laplace_values(F, z)
    if isinstance(F, LaplaceField):
        out = np.empty(z.shape, dtype=complex)
        for i, zz in enumerate(z.ravel()):
            try:
                out.flat[i] = F.at(zz)
            except KeyError:
                raise DomainError(f"atom {zz} is not a node of the sampled field") from None
        return out
    if callable(F):
        return np.asarray(F(z), dtype=complex)
    raise TypeError("field must be a TestFunction, a LaplaceField or a callable")


def lq_mu_norm(F, q: float, mu: MeasureRepr) -> NormValue:
    """``L^q(mu)`` norm of a field.

    Parameters
    ----------
    F : TestFunction, LaplaceField or callable
        A test function stands for its Laplace transform, which is evaluated
        exactly at the atoms.
    q : float
    mu : MeasureRepr
        Atomic measures give exact sums; densities are summed with their
        cell masses at the grid nodes.
    """
    if not q > 0:
        raise ValueError("q must be positive")
    a = mu.atoms()
    space = SpaceDescriptor("LqMu", q=q)
    keep = a.mass > 0
    if not np.any(keep):
        return NormValue(0.0, 0.0, space, {"atoms": 0})
    z = a.points[keep]
    vals = _evaluate_field(F, z)
    terms = np.abs(vals) ** q * a.mass[keep]
    total = csum(terms)
    exact = isinstance(mu, (Atomic,)) or mu.kind == "squares"
    return NormValue(total ** (1.0 / q), 0.0, space,
                     {"atoms": int(keep.sum()), "exact": bool(exact)})


# ---------------------------------------------------------------------------
# Bergman

def _field_profile(f):
    """Centre, decay constant, decay order, z-scale and L^1 norm of ``Lf``."""
    if isinstance(f, Indicator):
        f = f.as_step()
    decay = f.laplace_decay()
    if decay is None:
        return None
    xc, C, m = decay
    if isinstance(f, StepDyadic):
        scale = 1.0 / f.breakpoints[-1]
    elif isinstance(f, ExpPoly):
        scale = f.a / (2 * np.pi)
    else:
        scale = 1.0 / max(f.support_bound(), 1e-12)
    l1 = f.l1_norm()
    if l1 is None and hasattr(f, "l1_bound"):
        l1 = f.l1_bound()
    return xc, C, m, scale, l1


def bergman_tail_bound(C, m, q, gamma, R):
    """``int int_{|z - x_c| > R, y > 0} (C / |z - x_c|^m)^q y^gamma dA``."""
    e = q * m - gamma - 2
    if e <= 0:
        return math.inf
    return C ** q * R ** (-e) / e * special.beta((gamma + 1) / 2, 0.5)


def _strip_bound(C, m, q, gamma, l1, y_min):
    """Bound for ``0 < y < y_min`` using ``|F| <= min(||f||_1, C / |x - x_c|^m)``."""
    if l1 is None or l1 == 0:
        return 0.0
    if q * m <= 1:
        return math.inf
    u = (C / l1) ** (1.0 / m)
    line = 2 * (l1 ** q * u + C ** q * u ** (1 - q * m) / (q * m - 1))
    return line * y_min ** (gamma + 1) / (gamma + 1)


def _bergman_quadrature(field, xc, scale, q, gamma, n, R, y_min):
    c0 = scale / 8
    U = math.asinh(R / c0)
    u = np.linspace(-U, U, n)
    du = u[1] - u[0]
    xs = xc + c0 * np.sinh(u)
    wx = c0 * np.cosh(u) * du
    wx[[0, -1]] *= 0.5
    lv = np.linspace(math.log(y_min), math.log(R), n + 1)
    ys = np.exp(0.5 * (lv[1:] + lv[:-1]))
    wy = ys * (lv[1] - lv[0]) * ys ** gamma
    # boundary cell (0, y_min): one node carrying int_0^{y_min} y^gamma dy
    ys = np.concatenate([[0.5 * y_min], ys])
    wy = np.concatenate([[y_min ** (gamma + 1) / (gamma + 1)], wy])
    rows = max(1, (1 << 22) // n)
    parts = []
    for i in range(0, n, rows):
        F = field(xs[i:i + rows], ys)
        parts.append(csum((np.abs(F) ** q * wy[None, :]).sum(axis=1) * wx[i:i + rows]))
    total = math.fsum(parts)
    return total


def bergman_norm(F, q: float, alpha: float, level: int = 10, decay=None, R=None,
                 y_min=None) -> NormValue:
    """Weighted Bergman norm ``||F||_{A^q_alpha}`` on the upper half-plane.

    Parameters
    ----------
    F : TestFunction or callable
        A test function stands for ``Lf``.  A callable ``F(xs, ys)`` must return
        the tensor of values and comes with ``decay = (x_c, C, m, scale, l1)``.
    q : float
    alpha : float
        Weight exponent ``> -1``.
    level : int
        ``2^level`` nodes per axis; the error estimate compares with level - 1.
    R : float, optional
        Truncation radius (default: tail below ``1e-8`` of the field scale).

    Notes
    -----
    The rectangle ``[x_c - R, x_c + R] x [y_min, R]`` is integrated with a
    trapezoid rule in ``u`` for ``x = x_c + c sinh u`` and a midpoint rule in
    ``log y``.  Outside the half-disk of radius ``R`` the decay
    ``|F| <= C / |z - x_c|^m`` bounds the tail; below ``y_min`` the bound
    ``|F| <= ||f||_1`` does.
    """
    if alpha <= -1:
        raise ValueError("Bergman weight must exceed -1")
    space = SpaceDescriptor("Bergman", q=q, alpha=alpha)
    if isinstance(F, TestFunction):
        f = F
        if isinstance(f, StepDyadic) and not np.any(np.abs(f.values)):
            return NormValue(0.0, 0.0, space, {"level": level})
        prof = _field_profile(f)
        if prof is None:
            raise DomainError(f"no decay bound available for the transform of {f.kind}")
        if isinstance(f, Indicator):
            f = f.as_step()

        def field(xs, ys):
            return laplace_tensor(f, xs, ys)
    elif callable(F):
        if decay is None:
            raise DomainError("a sampled field needs decay metadata (x_c, C, m, scale, l1)")
        prof = tuple(decay)
        field = F
    else:
        raise TypeError("field source must be a TestFunction or a callable")
    xc, C, m, scale, l1 = prof
    if C == 0:
        return NormValue(0.0, 0.0, space, {"level": level})
    e = q * m - alpha - 2
    if e <= 0:
        raise DomainError("the decay of the field is too slow for this weight: "
                          "the Bergman integral diverges or cannot be bounded")
    if R is None:
        R = scale * min(max(1e4, (1e8) ** (1.0 / e)), 1e12)
    if y_min is None:
        # strip below y_min scales like y_min^(alpha+1); go deeper for alpha < 0
        y_min = scale * 2.0 ** -min(12.0 / min(alpha + 1, 1.0), 40.0)
    n = 2 ** level
    fine = _bergman_quadrature(field, xc, scale, q, alpha, n, R, y_min)
    coarse = _bergman_quadrature(field, xc, scale, q, alpha, n // 2, R, y_min)
    tail = bergman_tail_bound(C, m, q, alpha, R)
    strip = _strip_bound(C, m, q, alpha, l1, y_min)
    err = abs(fine - coarse) / 3.0 + tail + strip
    val, err_n = _root(fine, err, q)
    return NormValue(val, err_n, space,
                     {"level": level, "R": R, "y_min": y_min, "tail": tail, "strip": strip,
                      "coarse_value": max(coarse, 0.0) ** (1 / q)})


# ---------------------------------------------------------------------------
# Hardy

def default_y_sequence(f, count=15):
    prof = _field_profile(f)
    scale = 1.0 if prof is None else prof[3]
    return [scale * 2.0 ** (-k) for k in range(count)]


def _step_numerator(f, h):
    """Periodic numerator of ``Lf`` on the lattice ``x_n = n h`` for dyadic steps.

    ``2 pi i z Lf(z) = sum_j w_j e^{2 pi i b_j z}``; when every ``b_j h`` is a
    multiple of ``1/P`` the factor ``e^{2 pi i b_j n h}`` is ``P``-periodic in ``n``,
    so one FFT of length ``P`` gives the numerator on the whole lattice.
    Returns ``None`` when no small dyadic period exists.
    """
    b = np.asarray(f.breakpoints, dtype=float)
    for k in range(0, 31):
        m = b * h * 2.0 ** k
        if np.all(m == np.round(m)):
            P = 1 << k
            break
    else:
        return None
    if P > 1 << 22:
        return None
    m = np.round(b * h * P).astype(np.int64) % P
    w = f.jump_weights

    def numerator(y):
        coeff = np.zeros(P, dtype=complex)
        np.add.at(coeff, m, w * np.exp(-2 * np.pi * b * y))
        return np.fft.ifft(coeff) * P
    return numerator, P


def _exppoly_line(f, p, y):
    """``int |Lf(x + iy)|^p dx`` for a single exponential-polynomial term."""
    s = p * (f.k + 1) / 2
    A = f.a + 2 * np.pi * y
    c = abs(f.amplitude) * math.factorial(f.k)
    return c ** p / (2 * np.pi) * A ** (1 - 2 * s) * special.beta(0.5, s - 0.5)


def _periodic_line(numerator, P, h, p, periods=64):
    """Lattice sum of ``|N_n|^p / |2 pi (n h + i y)|^p`` for ``P``-periodic ``N``.

    ``periods`` periods on each side are summed directly; the remainder is the
    midpoint Euler-Maclaurin integral of the slowly varying denominator.
    """
    n = np.arange(-periods * P, periods * P)
    r = np.arange(P)

    def integral(y):
        g = np.abs(2 * np.pi * (n * h + 1j * y)) ** -p
        S = g.reshape(2 * periods, P).sum(axis=0)
        # sum_{k >= K} g((r + kP) h) ~ (1/(P h)) int_{(r + (K - 1/2) P) h}^inf g
        L_hi = (r + (periods - 0.5) * P) * h
        L_lo = ((periods + 0.5) * P - r) * h
        S = S + ((2 * np.pi) ** -p / (p - 1) / (P * h)) * (L_hi ** (1 - p) + L_lo ** (1 - p))
        N = numerator(y)
        return float(np.dot(np.abs(N) ** p, S)) * h
    return integral


def _generic_line(f, p, h, X, xc):
    """Truncated lattice sum with a tail fitted to ``|x|^{-p}`` decay."""
    half = int(X / h)
    n = np.arange(-half, half + 1)
    x = xc + n * h

    if isinstance(f, StepDyadic) and len(f.breakpoints) * len(x) <= 1 << 25:
        b = np.asarray(f.breakpoints, dtype=float)
        phase = np.exp(2j * np.pi * np.outer(x, b))

        def values(y):
            N = phase @ (f.jump_weights * np.exp(-2 * np.pi * b * y))
            return N / (2j * np.pi * (x + 1j * y))
    else:
        def values(y):
            return laplace_values(f, x + 1j * y)

    def integral(y):
        v = np.abs(values(y)) ** p
        outer = np.abs(n) > 0.75 * half
        A = float(np.mean(v[outer] * np.abs(x[outer] - xc) ** p))
        tail = 2 * A * (X + h / 2) ** (1 - p) / (p - 1)
        return float(np.sum(v)) * h + tail
    return integral


def hardy_norm(f: TestFunction, p: float, y_sequence=None, monotone_tol=1e-6,
               max_nodes=1 << 20) -> NormValue:
    """Hardy norm ``sup_{y > 0} ||Lf(. + iy)||_{L^p(R)}``.

    Parameters
    ----------
    f : TestFunction
    p : float
        Exponent ``> 1``.
    y_sequence : sequence of float, optional
        Decreasing heights; default ``scale * 2^-k`` for ``k = 0..14``.
    monotone_tol : float
        Allowed relative increase of line norms as ``y`` grows.
    max_nodes : int
        Lattice size for sources without a periodic numerator.

    Raises
    ------
    QuadratureError
        If the line norms fail to be nonincreasing in ``y``.

    Notes
    -----
    Exponential polynomials have closed-form line integrals.  Dyadic steps
    on ``[0, T]`` use the lattice ``h = 2^-ceil(log2 2T)``, fine enough that
    the lattice sum of ``|Lf|^2`` is exact, and a periodic numerator that
    reduces the infinite lattice to one period.  Other sources use a
    truncated lattice with a fitted ``|x|^{-p}`` tail.  The error estimate is
    the change between the two smallest heights.
    """
    if not p > 1:
        raise ValueError("p must exceed 1")
    space = SpaceDescriptor("Hardy", p=p)
    if isinstance(f, Indicator):
        f = f.as_step()
    if isinstance(f, StepDyadic) and not np.any(np.abs(f.values)):
        return NormValue(0.0, 0.0, space, {"line_norms": []})
    prof = _field_profile(f)
    if prof is None:
        raise DomainError(f"no decay bound available for the transform of {f.kind}")
    xc, C, m, scale, l1 = prof
    if y_sequence is None:
        y_sequence = default_y_sequence(f)
    ys = np.asarray(sorted(y_sequence, reverse=True), dtype=float)
    if np.any(ys <= 0):
        raise ValueError("heights must be positive")
    method = "generic"
    if isinstance(f, ExpPoly):
        method = "closed-form"

        def integral(y):
            return _exppoly_line(f, p, y)
    else:
        T = f.support_bound()
        h = 2.0 ** -math.ceil(math.log2(2 * T))
        num = _step_numerator(f, h) if isinstance(f, StepDyadic) else None
        if num is not None:
            method = "periodic"
            integral = _periodic_line(num[0], num[1], h, p)
        else:
            integral = _generic_line(f, p, h, 0.5 * max_nodes * h, xc)
    rel = np.array([integral(y) ** (1 / p) for y in ys])
    inc = np.diff(rel)  # y decreasing, so norms should not decrease
    if np.any(inc < -monotone_tol * rel[:-1]):
        raise QuadratureError("line norms are not monotone in y; quadrature failed")
    step = abs(rel[-1] - rel[-2]) if len(rel) > 1 else 0.0
    converged = len(rel) > 1 and step <= 1e-3 * max(rel[-1], 1e-300)
    return NormValue(float(rel.max()), step, space,
                     {"line_norms": list(map(float, rel)), "y_sequence": list(map(float, ys)),
                      "smallest_y": float(ys[-1]), "converged": bool(converged),
                      "method": method})


# ---------------------------------------------------------------------------
# disk

def disk_bergman_exact_q2(a, gamma):
    """``int_D |sum a_k w^k|^2 (1 - |w|^2)^gamma dA = pi sum |a_k|^2 B(k + 1, gamma + 1)``."""
    a = np.asarray(a, dtype=complex)
    k = np.arange(len(a))
    return csum(np.pi * np.abs(a) ** 2 * special.beta(k + 1, gamma + 1))


def disk_bergman_norm(a, q: float, gamma: float, n_theta: int | None = None,
                      n_radial: int | None = None) -> NormValue:
    """``(int_D |sum a_k w^k|^q (1 - |w|^2)^gamma dA(w))^(1/q)``.

    With ``s = r^2`` the integral is ``pi int_0^1 M_q(s) (1 - s)^gamma ds`` where
    ``M_q(s)`` is the angular mean of ``|P(sqrt(s) e^{i theta})|^q``.  The s-integral
    uses Gauss-Jacobi nodes for the weight ``(1 - s)^gamma``, which cluster at
    ``|w| = 1``; for even ``q`` the angular mean is a polynomial in ``s`` and the
    rule is exact once ``n_radial > q deg / 4``.  The angular mean is a periodic
    trapezoid rule evaluated by FFT.  The error estimate compares with
    ``n_radial // 2`` nodes.

    Examples
    --------
    >>> v = disk_bergman_norm([1.0], 4, 1.0).value
    >>> bool(abs(v ** 4 - np.pi / 2) < 1e-12)
    True
    """
    if gamma <= -1:
        raise ValueError("disk Bergman weight needs gamma > -1")
    if isinstance(a, CoeffSeries):
        a = a.a
    a = np.asarray(a, dtype=complex).ravel()
    space = SpaceDescriptor("DiskBergman", q=q, alpha=gamma)
    if a.size == 0 or not np.any(a):
        return NormValue(0.0, 0.0, space, {})
    deg = len(a) - 1
    if n_theta is None:
        n_theta = 1 << max(6, int(math.ceil(math.log2(4 * (q / 2 + 1) * (deg + 1)))))
    if n_radial is None:
        n_radial = int(max(32, 2 * math.ceil(q * deg / 4) + 16))

    def integral(nr):
        x, w = special.roots_jacobi(nr, gamma, 0.0)
        sq = 0.5 * (x + 1)
        r = np.sqrt(sq)
        coeff = np.zeros((nr, n_theta), dtype=complex)
        rk = r[:, None] ** np.arange(deg + 1)[None, :]
        np.add.at(coeff, (slice(None), np.arange(deg + 1) % n_theta), a[None, :] * rk)
        vals = np.fft.ifft(coeff, axis=1) * n_theta
        ang = np.mean(np.abs(vals) ** q, axis=1)
        # ds (1 - s)^gamma = 2^{-gamma-1} dx (1 - x)^gamma
        return np.pi * csum(ang * w) * 2.0 ** (-gamma - 1)

    fine = integral(n_radial)
    coarse = integral(max(n_radial // 2, 1))
    val, err_n = _root(fine, abs(fine - coarse), q)
    return NormValue(val, err_n, space, {"n_theta": n_theta, "n_radial": n_radial,
                                         "coarse_value": max(coarse, 0) ** (1 / q)})
