"""Test-function dictionary, discretization grids and reference norms.

Every object here is immutable.  A test function knows how to evaluate
itself, and where possible carries closed forms for its L^p norms, Fourier
transform and Laplace transform.  Grids carry nodes and quadrature weights.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import ClassVar

import numpy as np
from scipy import special

from ._numerics import csum, rng, weighted_pnorm
from .errors import (AliasingWarning, DivergentNormError, DomainError,
                     GridMismatchError)

HALF_LINE = "half_line"
REAL_LINE = "real_line"
PLANE = "plane"
HALF_PLANE = "half_plane"
DISK = "disk"

_DOMAINS = (HALF_LINE, REAL_LINE, PLANE, HALF_PLANE)
_EXP_CUTOFF = math.log(1e14)   # e^{-aT} < 1e-14 truncation rule
_GAUSS_CUTOFF = 6.2            # exp(-pi u^2) < 1e-52 beyond this many widths


# ---------------------------------------------------------------------------
# norm descriptors

@dataclass(frozen=True)
class SpaceDescriptor:
    """Function space family together with its exponents."""

    family: str
    p: float | None = None
    q: float | None = None
    s: float | None = None
    alpha: float | None = None
    homogeneous: bool | None = None

    FAMILIES: ClassVar[tuple] = ("Lp", "LpWeighted", "Hardy", "Bergman", "LqMu",
                                 "Besov", "TriebelLizorkin", "Sobolev",
                                 "DiskBergman", "ell_p")

    def __post_init__(self):
        if self.family not in self.FAMILIES:
            raise ValueError(f"unknown space family {self.family!r}")
        if self.family in ("Bergman", "DiskBergman") and self.alpha is not None \
                and self.alpha <= -1:
            raise ValueError("Bergman weight exponent must exceed -1")

    def to_dict(self):
        out = {"family": self.family}
        for k in ("p", "q", "s", "alpha", "homogeneous"):
            v = getattr(self, k)
            if v is not None:
                out[k] = v
        return out

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: d[k] for k in ("family", "p", "q", "s", "alpha", "homogeneous")
                      if k in d})


@dataclass(frozen=True)
class NormValue:
    """A computed norm, an absolute error estimate and the space it lives in."""

    value: float
    abs_error_estimate: float
    space: SpaceDescriptor
    details: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (self.value >= 0.0) or not math.isfinite(self.value):
            raise ValueError(f"norm value must be finite and nonnegative, got {self.value}")
        if not math.isfinite(self.abs_error_estimate) or self.abs_error_estimate < 0:
            raise ValueError("error estimate must be finite and nonnegative")

    def __float__(self):
        return float(self.value)

    def to_dict(self):
        out = {"value": self.value, "abs_error_estimate": self.abs_error_estimate,
               "space": self.space.to_dict()}
        if self.details:
            out["details"] = _jsonable(self.details)
        return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


# ---------------------------------------------------------------------------
# grids

def _axis_nodes(n, lo, hi, spacing, rule, periodic):
    if spacing == "log":
        if lo <= 0:
            raise DomainError("log spacing needs a positive lower bound")
        if rule == "midpoint":
            edges = np.geomspace(lo, hi, n + 1)
            return np.sqrt(edges[:-1] * edges[1:]), np.diff(edges)
        x = np.geomspace(lo, hi, n)
        w = np.empty(n)
        w[1:-1] = (x[2:] - x[:-2]) / 2
        w[0] = (x[1] - x[0]) / 2
        w[-1] = (x[-1] - x[-2]) / 2
        return x, w
    if periodic:
        h = (hi - lo) / n
        off = 0.5 if rule == "midpoint" else 0.0
        return lo + h * (np.arange(n) + off), np.full(n, h)
    if rule == "midpoint":
        h = (hi - lo) / n
        return lo + h * (np.arange(n) + 0.5), np.full(n, h)
    x = np.linspace(lo, hi, n)
    h = (hi - lo) / (n - 1)
    w = np.full(n, h)
    w[0] = w[-1] = h / 2
    return x, w


@dataclass(frozen=True)
class GridSpec:
    """Tensor discretization of a half-line, line, plane or half-plane rectangle.

    Parameters
    ----------
    domain : {"half_line", "real_line", "plane", "half_plane"}
    nodes : int or tuple of int
        Nodes per axis.
    bounds : tuple of float
        ``(lo, hi)`` for one-dimensional domains, ``(lo, hi)`` per axis for the
        plane (a single pair is reused), ``(x_min, x_max, y_min, y_max)`` for the
        half-plane rectangle.
    spacing : str or tuple of str
        ``"uniform"`` or ``"log"`` per axis.
    rule : {"trapezoid", "midpoint"}

    Notes
    -----
    ``real_line`` and ``plane`` grids are periodic (the upper bound is not a
    node) so that they pair with the DFT; their weights are the uniform
    spacing.  Half-line and half-plane grids include both endpoints under the
    trapezoid rule.
    """

    domain: str
    nodes: tuple
    bounds: tuple
    spacing: tuple = ("uniform",)
    rule: str = "trapezoid"

    def __post_init__(self):
        if self.domain not in _DOMAINS:
            raise DomainError(f"unknown grid domain {self.domain!r}")
        ndim = 1 if self.domain in (HALF_LINE, REAL_LINE) else 2
        nodes = self.nodes
        if isinstance(nodes, (int, np.integer)):
            nodes = (int(nodes),) * ndim
        nodes = tuple(int(n) for n in nodes)
        bounds = tuple(float(b) for b in np.ravel(self.bounds))
        if self.domain == PLANE and len(bounds) == 2:
            bounds = bounds * 2
        spacing = self.spacing
        if isinstance(spacing, str):
            spacing = (spacing,) * ndim
        if self.domain == HALF_PLANE and tuple(self.spacing) == ("uniform",):
            spacing = ("uniform", "log")
        spacing = tuple(spacing)
        if len(spacing) == 1:
            spacing = spacing * ndim
        if len(nodes) != ndim or len(bounds) != 2 * ndim or len(spacing) != ndim:
            raise ValueError(f"inconsistent grid description for domain {self.domain}")
        if min(nodes) < 2:
            raise ValueError("grids need at least 2 nodes per axis")
        for i in range(ndim):
            if not bounds[2 * i] < bounds[2 * i + 1]:
                raise ValueError("grid bounds must be increasing")
        if any(s not in ("uniform", "log") for s in spacing):
            raise ValueError("spacing must be 'uniform' or 'log'")
        if self.rule not in ("trapezoid", "midpoint"):
            raise ValueError("rule must be 'trapezoid' or 'midpoint'")
        if self.domain == HALF_LINE and bounds[0] < 0:
            raise DomainError("half-line grids live in [0, inf)")
        if self.domain == HALF_PLANE and (bounds[2] < 0 or (bounds[2] == 0 and not (
                spacing[1] == "uniform" and self.rule == "midpoint"))):
            raise DomainError("half-plane grids need y_min > 0 (y_min = 0 only for uniform midpoint)")
        if self.domain in (REAL_LINE, PLANE) and "log" in spacing:
            raise DomainError("periodic grids must be uniform")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "spacing", spacing)

    # constructors -----------------------------------------------------------
    @classmethod
    def half_line(cls, n, lo, hi, spacing="uniform", rule="trapezoid"):
        return cls(HALF_LINE, n, (lo, hi), spacing, rule)

    @classmethod
    def real_line(cls, n, lo, hi, rule="trapezoid"):
        return cls(REAL_LINE, n, (lo, hi), "uniform", rule)

    @classmethod
    def plane(cls, n, lo, hi):
        return cls(PLANE, n, (lo, hi), "uniform")

    @classmethod
    def half_plane(cls, nx, ny, x_min, x_max, y_min, y_max, y_spacing="log",
                   rule="trapezoid"):
        return cls(HALF_PLANE, (nx, ny), (x_min, x_max, y_min, y_max),
                   ("uniform", y_spacing), rule)

    # geometry ---------------------------------------------------------------
    @property
    def ndim(self):
        return len(self.nodes)

    @property
    def periodic(self):
        return self.domain in (REAL_LINE, PLANE)

    @property
    def shape(self):
        return self.nodes

    def axis(self, i=0):
        """Nodes and quadrature weights along axis ``i``."""
        lo, hi = self.bounds[2 * i], self.bounds[2 * i + 1]
        return _axis_nodes(self.nodes[i], lo, hi, self.spacing[i], self.rule, self.periodic)

    def spacing_step(self, i=0):
        if self.spacing[i] != "uniform":
            raise GridMismatchError("grid axis is not uniform")
        x, _ = self.axis(i)
        return float(x[1] - x[0])

    def points(self):
        """Node coordinates: a 1-D array, or a pair of ``indexing='ij'`` meshes."""
        if self.ndim == 1:
            return self.axis(0)[0]
        x, _ = self.axis(0)
        y, _ = self.axis(1)
        return np.meshgrid(x, y, indexing="ij")

    def weights(self):
        if self.ndim == 1:
            return self.axis(0)[1]
        return np.outer(self.axis(0)[1], self.axis(1)[1])

    def measure(self):
        if self.ndim == 1:
            return self.bounds[1] - self.bounds[0]
        return (self.bounds[1] - self.bounds[0]) * (self.bounds[3] - self.bounds[2])

    def refined(self, factor=2):
        return GridSpec(self.domain, tuple(n * factor for n in self.nodes), self.bounds,
                        self.spacing, self.rule)

    def scaled(self, c):
        """Grid with every coordinate multiplied by ``c > 0``."""
        return GridSpec(self.domain, self.nodes, tuple(c * b for b in self.bounds),
                        self.spacing, self.rule)

    def to_dict(self):
        return {"domain": self.domain, "nodes": list(self.nodes),
                "bounds": list(self.bounds), "spacing": list(self.spacing),
                "rule": self.rule}

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(d["domain"], d["nodes"], d["bounds"],
                       d.get("spacing", "uniform"), d.get("rule", "trapezoid"))
        except KeyError as exc:
            raise ValueError(f"grid description is missing field {exc.args[0]!r}") from None

    from_toml = from_dict


def default_grid(dim=1):
    """Default periodic grid for Fourier-side work in dimension 1 or 2."""
    if dim == 1:
        return GridSpec.real_line(2 ** 16, -256.0, 256.0)
    if dim == 2:
        return GridSpec.plane(2 ** 10, -32.0, 32.0)
    raise DomainError("only d = 1 and d = 2 are supported")


# ---------------------------------------------------------------------------
# sampled signals

@dataclass(frozen=True, eq=False)
class SampledSignal:
    """Samples of a function on the nodes of a grid."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != tuple(self.grid.nodes):
            raise GridMismatchError(f"values of shape {v.shape} do not match grid {self.grid.nodes}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def norm(self, p=2.0, weight=None):
        w = self.grid.weights()
        if weight is not None:
            w = w * weight
        return weighted_pnorm(self.values, w, p)

    def value_at(self, *coords, tol=1e-9):
        """Sample at the node that coincides with ``coords``."""
        idx = []
        for i, c in enumerate(coords):
            x, _ = self.grid.axis(i)
            j = int(np.argmin(np.abs(x - c)))
            if abs(x[j] - c) > tol * max(1.0, abs(c)):
                raise GridMismatchError(f"{c} is not a grid node")
            idx.append(j)
        return complex(self.values[tuple(idx)])

    def __add__(self, other):
        _check_same_grid(self.grid, other.grid)
        return SampledSignal(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self.grid, other.grid)
        return SampledSignal(self.grid, self.values - other.values)

    def __mul__(self, c):
        return SampledSignal(self.grid, self.values * c)

    __rmul__ = __mul__


def _check_same_grid(g1, g2):
    if g1 != g2:
        raise GridMismatchError("signals live on different grids")


# ---------------------------------------------------------------------------
# test functions

_REGISTRY = {}


def _register(cls):
    _REGISTRY[cls.kind] = cls
    return cls


def _cplx(v):
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, dict):
        return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
    return complex(v)


def _cplx_out(z):
    z = complex(z)
    return [z.real, z.imag]


class TestFunction:
    """Base class of the closed-form dictionary.

    Subclasses are frozen dataclasses.  ``domain`` is one of ``"half_line"``,
    ``"real_line"``, ``"plane"`` or ``"disk"``.
    """

    __test__ = False  # keep pytest from collecting the class
    kind: ClassVar[str] = ""
    domain: ClassVar[str] = HALF_LINE

    @property
    def dim(self):
        return 2 if self.domain == PLANE else 1

    def __call__(self, *coords):
        return self.evaluate(*coords)

    def evaluate(self, *coords):
        raise NotImplementedError

    # closed forms; ``None`` means "not available"
    def exact_lp(self, p, alpha=0.0):
        return None

    def fourier(self, *xi):
        return None

    def laplace_exact(self, z):
        return None

    def pieces(self):
        """Smooth pieces on the half-line: list of ``(a, b, callable)``."""
        raise DomainError(f"{self.kind} has no half-line representation")

    def laplace_decay(self):
        """``(x_c, C, m)`` with ``|Lf(z)| <= C / |z - x_c|^m`` on the upper half-plane."""
        return None

    def l1_norm(self):
        return None

    def support_bound(self):
        """``T`` such that the function is negligible (or zero) on ``t > T``."""
        return None

    def dilate(self, lam):
        """The function ``t -> f(t / lam)``."""
        raise NotImplementedError(f"dilation is not implemented for {self.kind}")

    def to_json(self):
        raise NotImplementedError

    @staticmethod
    def from_json(d):
        return function_from_json(d)


def function_from_json(d):
    """Rebuild a test function from its JSON object (``{"kind": ..., ...}``)."""
    if not isinstance(d, dict):
        raise ValueError("a test function must be a JSON object")
    if "kind" not in d:
        raise ValueError("test function is missing field 'kind'")
    cls = _REGISTRY.get(d["kind"])
    if cls is None:
        raise ValueError(f"unknown test function kind {d['kind']!r} in field 'kind'")
    try:
        return cls._from_json(d)
    except KeyError as exc:
        raise ValueError(f"test function of kind {d['kind']!r} is missing field {exc.args[0]!r}") from None


def function_to_json(f):
    return f.to_json()


@_register
@dataclass(frozen=True)
class StepDyadic(TestFunction):
    """Piecewise constant function on ``[0, inf)`` with finite support.

    ``values[j]`` is taken on ``[breakpoints[j], breakpoints[j+1])``.
    """

    breakpoints: tuple
    values: tuple
    kind: ClassVar[str] = "step"
    domain: ClassVar[str] = HALF_LINE

    def __post_init__(self):
        b = tuple(float(x) for x in self.breakpoints)
        v = tuple(complex(x) for x in self.values)
        if len(b) != len(v) + 1:
            raise ValueError("need exactly one more breakpoint than values")
        if b[0] < 0 or not all(math.isfinite(x) for x in b):
            raise DomainError("breakpoints must be finite and nonnegative")
        if any(b1 <= b0 for b0, b1 in zip(b, b[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if not all(math.isfinite(x.real) and math.isfinite(x.imag) for x in v):
            raise ValueError("step values must be finite")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    @classmethod
    def indicator(cls, a=0.0, b=1.0):
        return cls((a, b), (1.0,))

    @classmethod
    def unit_steps(cls, coeffs, offsets=None):
        """``sum_k a_k 1_(k, k+1)``, optionally only at integer ``offsets``."""
        coeffs = [complex(c) for c in coeffs]
        offsets = list(range(len(coeffs))) if offsets is None else [int(k) for k in offsets]
        bps, vals = [], []
        for k, c in sorted(zip(offsets, coeffs)):
            if bps and bps[-1] == k:
                vals.append(c)
            else:
                if bps:
                    vals.append(0.0)
                bps.append(float(k))
                vals.append(c)
            bps.append(float(k + 1))
        return cls(tuple(bps), tuple(vals))

    @cached_property
    def _arrays(self):
        return np.asarray(self.breakpoints), np.asarray(self.values, dtype=complex)

    @cached_property
    def jump_weights(self):
        """Weights ``w_m`` with ``Lf(z) = sum_m w_m exp(2 pi i b_m z) / (2 pi i z)``."""
        _, v = self._arrays
        w = np.zeros(len(self.breakpoints), dtype=complex)
        w[1:] += v
        w[:-1] -= v
        return w

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        b, v = self._arrays
        idx = np.searchsorted(b, t, side="right") - 1
        ok = (idx >= 0) & (idx < len(v))
        out = np.zeros(t.shape, dtype=complex)
        out[ok] = v[idx[ok]]
        return out

    def exact_lp(self, p, alpha=0.0):
        b, v = self._arrays
        mag = np.abs(v) ** p
        if alpha > -1:
            seg = (b[1:] ** (alpha + 1) - b[:-1] ** (alpha + 1)) / (alpha + 1)
        else:
            if b[0] == 0 and mag[0] > 0:
                raise DivergentNormError("t^alpha is not integrable at 0 for alpha <= -1")
            lo = np.where(b[:-1] > 0, b[:-1], 1.0)
            hi = np.where(b[:-1] > 0, b[1:], 1.0)
            seg = np.log(hi / lo) if alpha == -1 else (hi ** (alpha + 1) - lo ** (alpha + 1)) / (alpha + 1)
        return max(csum(mag * seg), 0.0) ** (1.0 / p)

    def l1_norm(self):
        return self.exact_lp(1.0)

    def laplace_exact(self, z):
        z = np.asarray(z, dtype=complex)
        b, v = self._arrays
        lengths = np.diff(b)
        u = 2j * np.pi * z[..., None]
        terms = v * lengths * np.exp(u * b[:-1]) * _expm1_over(u * lengths)
        return terms.sum(axis=-1)

    def fourier(self, xi):
        return self.laplace_exact(-np.asarray(xi, dtype=complex))

    def laplace_decay(self):
        return 0.0, float(np.abs(self.jump_weights).sum() / (2 * np.pi)), 1

    def pieces(self):
        return [(b0, b1, (lambda t, c=c: np.full(np.shape(t), c, dtype=complex)))
                for b0, b1, c in zip(self.breakpoints, self.breakpoints[1:], self.values)]

    def support_bound(self):
        return self.breakpoints[-1]

    def dilate(self, lam):
        return StepDyadic(tuple(lam * x for x in self.breakpoints), self.values)

    def to_json(self):
        return {"kind": self.kind, "breakpoints": list(self.breakpoints),
                "values": [_cplx_out(v) for v in self.values]}

    @classmethod
    def _from_json(cls, d):
        return cls(tuple(d["breakpoints"]), tuple(_cplx(v) for v in d["values"]))


def half_gauss_integral(A, B, C):
    """``int_0^inf exp(-A t^2 + B t + C) dt`` for real ``A > 0`` and complex ``B, C``.

    Uses the Faddeeva function, switching branches so that no exponential
    overflows when the Gaussian peak sits far inside ``t > 0``.
    """
    B = np.asarray(B, dtype=complex)
    C = np.asarray(C, dtype=complex)
    sA = math.sqrt(A)
    B, C = np.broadcast_arrays(B, C)
    zeta = -1j * B / (2 * sA)
    pref = 0.5 * math.sqrt(np.pi / A)
    out = np.empty(B.shape, dtype=complex)
    up = B.real <= 0
    out[up] = pref * np.exp(C[up]) * special.wofz(zeta[up])
    lo = ~up
    out[lo] = pref * (2 * np.exp(C[lo] + B[lo] ** 2 / (4 * A)) - np.exp(C[lo]) * special.wofz(-zeta[lo]))
    return out if out.ndim else out[()]


def _expm1_over(u):
    u = np.asarray(u, dtype=complex)
    small = np.abs(u) < 1e-4
    safe = np.where(small, 1.0, u)
    big = np.expm1(safe) / safe
    series = 1.0 + u / 2 + u * u / 6 + u ** 3 / 24
    return np.where(small, series, big)


@_register
@dataclass(frozen=True)
class ExpPoly(TestFunction):
    """``amplitude * t^k * exp((-a + i b) t)`` on ``[0, inf)``, ``a > 0``."""

    a: float
    b: float = 0.0
    k: int = 0
    amplitude: complex = 1.0
    kind: ClassVar[str] = "exppoly"
    domain: ClassVar[str] = HALF_LINE

    def __post_init__(self):
        if not (self.a > 0) or not math.isfinite(self.a):
            raise ValueError("ExpPoly needs a finite decay rate a > 0")
        if int(self.k) != self.k or self.k < 0:
            raise ValueError("ExpPoly power k must be a nonnegative integer")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "amplitude", complex(self.amplitude))

    @classmethod
    def kernel(cls, lam):
        """``t -> exp(-2 pi i conj(lam) t)``; its transform is ``i / (2 pi (z - conj(lam)))``."""
        lam = complex(lam)
        if lam.imag <= 0:
            raise DomainError("kernel parameter must lie in the upper half-plane")
        return cls(2 * np.pi * lam.imag, -2 * np.pi * lam.real, 0, 1.0)

    @property
    def rate(self):
        return complex(self.a, -self.b)

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        tt = np.where(t >= 0, t, 0.0)
        out = self.amplitude * tt ** self.k * np.exp(-self.rate * tt)
        return np.where(t >= 0, out, 0.0)

    def exact_lp(self, p, alpha=0.0):
        if alpha <= -1:
            raise DivergentNormError("t^alpha is not integrable at 0 for alpha <= -1")
        e = self.k * p + alpha + 1
        logv = p * math.log(abs(self.amplitude)) + special.gammaln(e) - e * math.log(p * self.a) \
            if abs(self.amplitude) > 0 else -math.inf
        return math.exp(logv / p)

    def l1_norm(self):
        return self.exact_lp(1.0)

    def laplace_exact(self, z):
        z = np.asarray(z, dtype=complex)
        return self.amplitude * math.factorial(self.k) / (self.rate - 2j * np.pi * z) ** (self.k + 1)

    def fourier(self, xi):
        xi = np.asarray(xi, dtype=complex)
        return self.amplitude * math.factorial(self.k) / (self.rate + 2j * np.pi * xi) ** (self.k + 1)

    def laplace_decay(self):
        c = abs(self.amplitude) * math.factorial(self.k) / (2 * np.pi) ** (self.k + 1)
        return -self.b / (2 * np.pi), c, self.k + 1

    def support_bound(self):
        # e^{-aT} T^k below 1e-14 of the peak scale
        T = _EXP_CUTOFF / self.a
        for _ in range(60):
            T_new = (_EXP_CUTOFF + self.k * math.log(max(T * self.a, 1.0))) / self.a
            if abs(T_new - T) < 1e-12 * T:
                break
            T = T_new
        return T

    def pieces(self):
        return [(0.0, math.inf, self.evaluate)]

    def dilate(self, lam):
        return ExpPoly(self.a / lam, self.b / lam, self.k, self.amplitude * lam ** (-self.k))

    def to_json(self):
        return {"kind": self.kind, "a": self.a, "b": self.b, "k": self.k,
                "amplitude": _cplx_out(self.amplitude)}

    @classmethod
    def _from_json(cls, d):
        return cls(float(d["a"]), float(d.get("b", 0.0)), int(d.get("k", 0)),
                   _cplx(d.get("amplitude", 1.0)))


@_register
@dataclass(frozen=True)
class Gaussian(TestFunction):
    """``exp(-pi |x - center|^2 / width^2)`` on the line or the plane."""

    center: tuple = (0.0,)
    width: float = 1.0
    kind: ClassVar[str] = "gaussian"

    def __post_init__(self):
        c = tuple(float(x) for x in np.ravel(self.center))
        if len(c) not in (1, 2):
            raise DomainError("Gaussian lives in dimension 1 or 2")
        if not self.width > 0:
            raise ValueError("Gaussian width must be positive")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "width", float(self.width))

    @property
    def domain(self):
        return REAL_LINE if len(self.center) == 1 else PLANE

    def evaluate(self, *coords):
        r2 = sum((np.asarray(x, dtype=float) - c) ** 2 for x, c in zip(coords, self.center))
        return np.exp(-np.pi * r2 / self.width ** 2).astype(complex)

    def exact_lp(self, p, alpha=0.0):
        if alpha != 0:
            return None
        d = len(self.center)
        return (self.width ** d * p ** (-d / 2)) ** (1.0 / p)

    def fourier(self, *xi):
        d = len(self.center)
        r2 = sum(np.asarray(x, dtype=float) ** 2 for x in xi)
        phase = sum(np.asarray(x, dtype=float) * c for x, c in zip(xi, self.center))
        return self.width ** d * np.exp(-np.pi * self.width ** 2 * r2) * np.exp(-2j * np.pi * phase)

    def l1_norm(self):
        return self.width ** len(self.center)

    def laplace_exact(self, z):
        """Transform of the restriction to ``[0, inf)`` (one dimension only)."""
        if len(self.center) != 1:
            raise DomainError("only one-dimensional Gaussians restrict to the half-line")
        z = np.asarray(z, dtype=complex)
        c, w = self.center[0], self.width
        A = np.pi / w ** 2
        return half_gauss_integral(A, 2 * A * c + 2j * np.pi * z, -A * c * c)

    def laplace_decay(self):
        f0 = math.exp(-np.pi * self.center[0] ** 2 / self.width ** 2)
        return 0.0, (f0 + 2.0) / (2 * np.pi), 1

    def pieces(self):
        if len(self.center) != 1:
            raise DomainError("only one-dimensional Gaussians restrict to the half-line")
        return [(0.0, math.inf, self.evaluate)]

    def support_bound(self):
        return max(self.center[0] + _GAUSS_CUTOFF * self.width, 0.0)

    def dilate(self, lam):
        return Gaussian(tuple(lam * c for c in self.center), lam * self.width)

    def to_json(self):
        return {"kind": self.kind, "center": list(self.center), "width": self.width}

    @classmethod
    def _from_json(cls, d):
        return cls(tuple(d.get("center", (0.0,))), float(d["width"]))


@_register
@dataclass(frozen=True)
class BandLimited(TestFunction):
    """Seeded sum of Gaussian wave packets centred at dyadic frequencies.

    Packet ``i`` has frequency ``xi_i`` with ``|xi_i| = 2^j`` for ``j`` in the
    inclusive ``band``, frequency width ``rel_width * 2^j`` and a random
    spatial shift.  In one dimension each level carries the two frequencies
    ``+-2^j``; in two dimensions three random directions.  Both the signal and
    its Fourier transform have closed forms.
    """

    seed: int
    band: tuple = (0, 4)
    coefficients: tuple | None = None
    dim: int = 1
    rel_width: float = 1.0 / 32.0
    shift_span: float = 32.0
    kind: ClassVar[str] = "bandlimited"

    def __post_init__(self):
        jlo, jhi = (int(x) for x in self.band)
        if jhi < jlo:
            raise ValueError("band must be an increasing dyadic index range")
        if self.dim not in (1, 2):
            raise DomainError("BandLimited lives in dimension 1 or 2")
        object.__setattr__(self, "band", (jlo, jhi))
        object.__setattr__(self, "seed", int(self.seed))
        n = self.n_packets
        if self.coefficients is None:
            g = rng(self.seed, 0)
            c = (g.standard_normal(n) + 1j * g.standard_normal(n)) / math.sqrt(2)
            coeffs = tuple(complex(x) for x in c)
        else:
            coeffs = tuple(complex(x) for x in self.coefficients)
        if len(coeffs) != n:
            raise ValueError(f"expected {n} coefficients for this band, got {len(coeffs)}")
        if not all(math.isfinite(c.real) and math.isfinite(c.imag) for c in coeffs):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def domain(self):
        return REAL_LINE if self.dim == 1 else PLANE

    @property
    def per_level(self):
        return 2 if self.dim == 1 else 3

    @property
    def n_packets(self):
        return self.per_level * (self.band[1] - self.band[0] + 1)

    @cached_property
    def packets(self):
        """Arrays ``(freq (n, d), width (n,), shift (n, d), coeff (n,))``."""
        levels = np.repeat(np.arange(self.band[0], self.band[1] + 1), self.per_level)
        radius = 2.0 ** levels
        n = self.n_packets
        if self.dim == 1:
            sign = np.tile([1.0, -1.0], n // 2)
            freq = (sign * radius)[:, None]
        else:
            theta = rng(self.seed, 2).uniform(0, 2 * np.pi, n)
            freq = radius[:, None] * np.stack([np.cos(theta), np.sin(theta)], axis=1)
        shift = rng(self.seed, 1).uniform(-self.shift_span, self.shift_span, (n, self.dim))
        width = self.rel_width * radius
        return freq, width, shift, np.asarray(self.coefficients)

    def evaluate(self, *coords):
        freq, width, shift, c = self.packets
        coords = [np.asarray(x, dtype=float) for x in coords]
        out = np.zeros(np.broadcast(*coords).shape, dtype=complex)
        d = self.dim
        for i in range(self.n_packets):
            r2 = 0.0
            ph = 0.0
            for ax in range(d):
                u = coords[ax] - shift[i, ax]
                r2 = r2 + u * u
                ph = ph + freq[i, ax] * u
            out += c[i] * width[i] ** d * np.exp(-np.pi * width[i] ** 2 * r2 + 2j * np.pi * ph)
        return out

    def fourier(self, *xi):
        freq, width, shift, c = self.packets
        xi = [np.asarray(x, dtype=float) for x in xi]
        out = np.zeros(np.broadcast(*xi).shape, dtype=complex)
        for i in range(self.n_packets):
            r2 = 0.0
            ph = 0.0
            for ax in range(self.dim):
                r2 = r2 + (xi[ax] - freq[i, ax]) ** 2
                ph = ph + xi[ax] * shift[i, ax]
            out += c[i] * np.exp(-np.pi * r2 / width[i] ** 2 - 2j * np.pi * ph)
        return out

    def l2_norm(self):
        """Exact L^2 norm from the Gram matrix of the packets."""
        freq, width, shift, c = self.packets
        inv = 1.0 / width ** 2
        A = np.pi * (inv[:, None] + inv[None, :])
        G = np.ones((self.n_packets, self.n_packets), dtype=complex)
        for ax in range(self.dim):
            B = 2 * np.pi * (freq[:, ax] * inv)[:, None] + 2 * np.pi * (freq[:, ax] * inv)[None, :] \
                - 2j * np.pi * (shift[:, ax][:, None] - shift[:, ax][None, :])
            C0 = -np.pi * ((freq[:, ax] ** 2 * inv)[:, None] + (freq[:, ax] ** 2 * inv)[None, :])
            G = G * np.sqrt(np.pi / A) * np.exp(B * B / (4 * A) + C0)
        val = csum((np.conj(c)[None, :] * G * c[:, None]).ravel())
        return math.sqrt(max(val.real, 0.0))

    def exact_lp(self, p, alpha=0.0):
        if p == 2 and alpha == 0:
            return self.l2_norm()
        return None

    def default_grid(self):
        return default_grid(self.dim)

    def l1_bound(self):
        return float(np.sum(np.abs(self.packets[3])))  # each packet has unit L^1 norm

    def laplace_exact(self, z):
        """Transform of the restriction to ``[0, inf)`` (one dimension only)."""
        if self.dim != 1:
            raise DomainError("only one-dimensional signals restrict to the half-line")
        z = np.asarray(z, dtype=complex)
        freq, width, shift, c = self.packets
        out = np.zeros(z.shape, dtype=complex)
        for i in range(self.n_packets):
            A = np.pi * width[i] ** 2
            x0, f0 = shift[i, 0], freq[i, 0]
            B = 2 * A * x0 + 2j * np.pi * f0 + 2j * np.pi * z
            C = -A * x0 * x0 - 2j * np.pi * f0 * x0
            out += c[i] * width[i] * half_gauss_integral(A, B, C)
        return out

    def laplace_decay(self):
        freq, width, _, c = self.packets
        f0 = abs(complex(self.evaluate(np.array([0.0]))[0]))
        tv = float(np.sum(np.abs(c) * (2 * width + 2 * np.pi * np.abs(freq[:, 0]))))
        return 0.0, (f0 + tv) / (2 * np.pi), 1

    def pieces(self):
        if self.dim != 1:
            raise DomainError("only one-dimensional signals restrict to the half-line")
        return [(0.0, math.inf, self.evaluate)]

    def support_bound(self):
        _, width, shift, _ = self.packets
        return max(float(np.max(shift[:, 0] + _GAUSS_CUTOFF / width)), 0.0)

    def to_json(self):
        return {"kind": self.kind, "seed": self.seed, "band": list(self.band),
                "coefficients": [_cplx_out(c) for c in self.coefficients],
                "dim": self.dim, "rel_width": self.rel_width, "shift_span": self.shift_span}

    @classmethod
    def _from_json(cls, d):
        coeffs = d.get("coefficients")
        return cls(int(d["seed"]), tuple(d.get("band", (0, 4))),
                   None if coeffs is None else tuple(_cplx(c) for c in coeffs),
                   int(d.get("dim", 1)), float(d.get("rel_width", 1 / 32)),
                   float(d.get("shift_span", 32.0)))


@_register
@dataclass(frozen=True)
class Indicator(TestFunction):
    """Indicator of a finite union of disjoint open intervals on the line."""

    intervals: tuple
    kind: ClassVar[str] = "indicator"

    def __post_init__(self):
        ivs = tuple(sorted((float(a), float(b)) for a, b in self.intervals))
        if not ivs:
            raise ValueError("need at least one interval")
        for (a0, b0), (a1, b1) in zip(ivs, ivs[1:]):
            if a1 < b0:
                raise ValueError("intervals must be disjoint")
        if any(not a < b for a, b in ivs):
            raise ValueError("each interval needs a < b")
        object.__setattr__(self, "intervals", ivs)

    @property
    def domain(self):
        return HALF_LINE if self.intervals[0][0] >= 0 else REAL_LINE

    def as_step(self):
        if self.domain != HALF_LINE:
            raise DomainError("indicator is not supported on [0, inf)")
        bps, vals = [], []
        for a, b in self.intervals:
            if bps and bps[-1] == a:
                vals.append(1.0)
            else:
                if bps:
                    vals.append(0.0)
                bps.append(a)
                vals.append(1.0)
            bps.append(b)
        return StepDyadic(tuple(bps), tuple(vals))

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for a, b in self.intervals:
            out[(x > a) & (x < b)] = 1.0
        return out

    def exact_lp(self, p, alpha=0.0):
        if alpha == 0:
            return sum(b - a for a, b in self.intervals) ** (1.0 / p)
        if self.domain != HALF_LINE:
            return None
        return self.as_step().exact_lp(p, alpha)

    def l1_norm(self):
        return self.exact_lp(1.0)

    def fourier(self, xi):
        xi = np.asarray(xi, dtype=float)
        out = np.zeros(xi.shape, dtype=complex)
        for a, b in self.intervals:
            u = -2j * np.pi * xi
            out += (b - a) * np.exp(u * a) * _expm1_over(u * (b - a))
        return out

    def laplace_exact(self, z):
        return self.as_step().laplace_exact(z)

    def laplace_decay(self):
        return self.as_step().laplace_decay()

    def pieces(self):
        return self.as_step().pieces()

    def support_bound(self):
        return self.intervals[-1][1]

    def dilate(self, lam):
        return Indicator(tuple((lam * a, lam * b) for a, b in self.intervals))

    def to_json(self):
        return {"kind": self.kind, "intervals": [list(iv) for iv in self.intervals]}

    @classmethod
    def _from_json(cls, d):
        return cls(tuple(tuple(iv) for iv in d["intervals"]))


@_register
@dataclass(frozen=True)
class Annulus(TestFunction):
    """Indicator of ``{R < |x| < R + 1}`` in dimension 1 or 2."""

    radius: float
    dim: int = 1
    kind: ClassVar[str] = "annulus"

    def __post_init__(self):
        if not self.radius >= 0:
            raise ValueError("annulus radius must be nonnegative")
        if self.dim not in (1, 2):
            raise DomainError("annulus lives in dimension 1 or 2")

    @property
    def domain(self):
        return REAL_LINE if self.dim == 1 else PLANE

    def evaluate(self, *coords):
        r = np.sqrt(sum(np.asarray(x, dtype=float) ** 2 for x in coords))
        return ((r > self.radius) & (r < self.radius + 1)).astype(complex)

    def measure(self):
        R = self.radius
        return 2.0 if self.dim == 1 else np.pi * ((R + 1) ** 2 - R ** 2)

    def exact_lp(self, p, alpha=0.0):
        if alpha != 0:
            return None
        return self.measure() ** (1.0 / p)

    def l1_norm(self):
        return self.measure()

    def fourier(self, *xi):
        R = self.radius
        if self.dim == 1:
            x = np.asarray(xi[0], dtype=float)
            return (2 * np.cos(2 * np.pi * (R + 0.5) * x) * np.sinc(x)).astype(complex)
        rho = np.sqrt(sum(np.asarray(x, dtype=float) ** 2 for x in xi))
        safe = np.where(rho > 0, rho, 1.0)
        val = ((R + 1) * special.j1(2 * np.pi * (R + 1) * safe) - R * special.j1(2 * np.pi * R * safe)) / safe
        return np.where(rho > 0, val, self.measure()).astype(complex)

    def to_json(self):
        return {"kind": self.kind, "radius": self.radius, "dim": self.dim}

    @classmethod
    def _from_json(cls, d):
        return cls(float(d["radius"]), int(d.get("dim", 1)))


@_register
@dataclass(frozen=True)
class CoeffSeries(TestFunction):
    """Finite power series ``sum_k a_k w^k`` on the unit disk."""

    a: tuple
    kind: ClassVar[str] = "coeffs"
    domain: ClassVar[str] = DISK

    def __post_init__(self):
        a = tuple(complex(x) for x in self.a)
        if not all(math.isfinite(x.real) and math.isfinite(x.imag) for x in a):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "a", a)

    def evaluate(self, w):
        return np.polynomial.polynomial.polyval(np.asarray(w, dtype=complex), np.asarray(self.a))

    def exact_lp(self, p, alpha=0.0):
        """The sequence norm ``(sum |a_k|^p)^(1/p)``."""
        return max(csum(np.abs(np.asarray(self.a)) ** p), 0.0) ** (1.0 / p)

    def as_step(self):
        """The half-line function ``sum_k a_k 1_(k, k+1)``."""
        if not self.a:
            return StepDyadic((0.0, 1.0), (0.0,))
        return StepDyadic.unit_steps(self.a)

    def to_json(self):
        return {"kind": self.kind, "a": [_cplx_out(x) for x in self.a]}

    @classmethod
    def _from_json(cls, d):
        return cls(tuple(_cplx(x) for x in d["a"]))


def zero_function():
    """The zero function on the half-line."""
    return StepDyadic((0.0, 1.0), (0.0,))


# ---------------------------------------------------------------------------
# sampling, convolution, norms

def _domain_compatible(f, grid):
    if f.domain == DISK:
        raise DomainError("disk power series are not sampled on grids")
    if f.domain == HALF_LINE:
        return grid.domain in (HALF_LINE, REAL_LINE)
    if f.domain == REAL_LINE:
        return grid.domain in (REAL_LINE, HALF_LINE)
    if f.domain == PLANE:
        return grid.domain == PLANE
    return False


def sample(f: TestFunction, grid: GridSpec) -> np.ndarray:
    """Evaluate ``f`` at the nodes of ``grid``.

    Half-line functions are extended by zero on the negative axis; line
    functions sampled on a half-line grid are restricted to it.
    """
    if not _domain_compatible(f, grid):
        raise DomainError(f"cannot sample a {f.domain} function on a {grid.domain} grid")
    pts = grid.points()
    if grid.ndim == 1:
        return np.asarray(f.evaluate(pts), dtype=complex)
    return np.asarray(f.evaluate(*pts), dtype=complex)


def sample_signal(f, grid):
    return SampledSignal(grid, sample(f, grid))


def convolve(f, g, grid: GridSpec) -> SampledSignal:
    """Discrete convolution of two functions sampled on the same uniform grid.

    The result is ``h * sum_j f(x_j) g(x - x_j)`` on the grid of pairwise node
    sums, which has ``2N - 1`` nodes with the same spacing.  Either argument
    may already be a :class:`SampledSignal`.
    """
    sf = f if isinstance(f, SampledSignal) else sample_signal(f, grid)
    sg = g if isinstance(g, SampledSignal) else sample_signal(g, grid)
    if sf.grid != sg.grid:
        raise GridMismatchError("convolution needs both factors on the same grid")
    gr = sf.grid
    if gr.ndim != 1 or gr.spacing[0] != "uniform":
        raise GridMismatchError("convolution is implemented on uniform one-dimensional grids")
    open_below = not (sf.grid.domain == HALF_LINE and sf.grid.bounds[0] == 0.0)
    for s in (sf, sg):
        v = s.values
        edge = max(abs(v[0]) if open_below else 0.0, abs(v[-1]))
        if edge > 1e-12 * max(np.max(np.abs(v)), 1e-300):
            warnings.warn("sampled support reaches the grid boundary; the convolution "
                          "is truncated", AliasingWarning, stacklevel=2)
            break
    x, _ = gr.axis(0)
    h = float(x[1] - x[0])
    n = len(x)
    m = 2 * n - 1
    nfft = 1 << (m - 1).bit_length()
    out = np.fft.ifft(np.fft.fft(sf.values, nfft) * np.fft.fft(sg.values, nfft))[:m] * h
    x0 = 2 * x[0]
    if gr.periodic:
        lo = x0 - (0.5 * h if gr.rule == "midpoint" else 0.0)
        out_grid = GridSpec(REAL_LINE, m, (lo, lo + m * h), "uniform", gr.rule)
    elif gr.rule == "midpoint":
        lo = x0 - 0.5 * h
        out_grid = GridSpec(gr.domain, m, (lo, lo + m * h), "uniform", "midpoint")
    else:
        out_grid = GridSpec(gr.domain, m, (x0, 2 * x[-1]), "uniform", "trapezoid")
    return SampledSignal(out_grid, out)


def _halfline_integral(func, a, b, alpha, p, n):
    """Integral of ``|func|^p t^alpha`` over ``[a, b]`` on a log-midpoint grid in ``t - a``."""
    length = b - a
    eps = 1e-13 * length
    edges = np.geomspace(eps, length, n + 1)
    s = np.sqrt(edges[:-1] * edges[1:])
    widths = np.diff(edges)
    t = a + s
    vals = np.abs(func(t)) ** p * t ** alpha
    total = csum(vals * widths)
    # remainder on [a, a + eps]
    f0 = float(np.abs(func(np.array([a + 0.5 * eps])))[0]) ** p
    if a == 0:
        rem = f0 * eps ** (alpha + 1) / (alpha + 1)
    else:
        rem = f0 * a ** alpha * eps
    return total + rem, rem


def _quadrature_lp(f, p, alpha, grid):
    if grid is not None and grid.domain == HALF_LINE and f.domain != HALF_LINE:
        raise DomainError(f"a half-line grid would only cover part of a {f.domain} function")
    if f.domain == HALF_LINE:
        n = grid.nodes[0] if grid is not None else 2 ** 14
        total = 0.0
        err = 0.0
        T = f.support_bound() if hasattr(f, "support_bound") else None
        for a, b, func in f.pieces():
            if math.isinf(b):
                b = T if T is not None else a + 50.0
                tail = 1e-14 * max(abs(complex(func(np.array([a]))[0])), 1.0)
                err += tail
            if b <= a:
                continue
            fine, rem = _halfline_integral(func, a, b, alpha, p, n)
            coarse, _ = _halfline_integral(func, a, b, alpha, p, max(n // 2, 2))
            total += fine
            err += abs(fine - coarse) / 3.0 + rem
        val = max(total, 0.0) ** (1 / p)
        eval_err = (max(total, 0.0) + err) ** (1 / p) - val if total > 0 else err ** (1 / p)
        return val, eval_err
    if alpha != 0:
        raise DomainError("weighted norms are only defined on the half-line")
    if grid is None:
        grid = default_grid(f.dim)
    v = sample(f, grid)
    w = grid.weights()
    fine = csum(np.abs(v) ** p * w)
    if grid.ndim == 1:
        coarse = csum(np.abs(v[::2]) ** p * 2 * w[::2])
    else:
        coarse = csum(np.abs(v[::2, ::2]) ** p * 4 * w[::2, ::2])
    val = max(fine, 0.0) ** (1 / p)
    return val, abs(max(coarse, 0.0) ** (1 / p) - val)


def lp_norm(f: TestFunction, p: float, alpha: float = 0.0, grid: GridSpec | None = None,
            method: str = "auto") -> NormValue:
    """Norm of ``f`` in ``L^p(x^alpha dx)``.

    Parameters
    ----------
    f : TestFunction
    p : float
        Exponent in (1, inf); ``p = 1`` is accepted for L^1 bookkeeping.
    alpha : float
        Power weight, ``> -1``; nonzero weights require the half-line.
    grid : GridSpec, optional
        Quadrature grid.  On the half-line only the node count is used (per
        smooth piece); on the line or plane the nodes are used directly.
    method : {"auto", "exact", "quadrature"}
        ``auto`` uses a closed form when one exists.

    Returns
    -------
    NormValue
        Closed forms report a zero error estimate.
    """
    if not (p >= 1) or math.isinf(p):
        raise ValueError("p must be finite and at least 1")
    if alpha <= -1:
        raise DivergentNormError("power weights need alpha > -1")
    if f.domain == DISK:
        raise DomainError("use the sequence norm of CoeffSeries.exact_lp for disk series")
    if alpha != 0 and f.domain != HALF_LINE:
        raise DomainError("weighted norms are only defined for functions on [0, inf)")
    family = "Lp" if alpha == 0 else "LpWeighted"
    space = SpaceDescriptor(family, p=p, alpha=alpha)
    if method != "quadrature":
        exact = f.exact_lp(p, alpha)
        if exact is not None:
            return NormValue(float(exact), 0.0, space, {"method": "closed_form"})
        if method == "exact":
            raise ValueError(f"no closed form for the L^{p} norm of {f.kind}")
    val, err = _quadrature_lp(f, p, alpha, grid)
    return NormValue(float(val), float(err), space, {"method": "quadrature"})
