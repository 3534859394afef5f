"""Positive measures on the upper half-plane and Carleson-box suprema.

A Carleson box over a closed interval ``I = [a, b]`` is
``Q_I = {x + iy : a <= x <= b, 0 < y <= b - a}``; atoms on the top edge and
on the vertical sides count.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._numerics import csum
from .errors import DomainError, EmptyFamilyError
from .signals import HALF_PLANE, GridSpec


@dataclass(frozen=True)
class CarlesonBox:
    """Box ``[a, b] x (0, b - a]`` over the interval ``I = [a, b]``."""

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
            raise ValueError("a Carleson box needs a finite interval with a < b")

    @property
    def length(self):
        return self.b - self.a

    @property
    def center(self):
        return 0.5 * (self.a + self.b)

    def contains(self, x, y):
        x = np.asarray(x)
        y = np.asarray(y)
        return (x >= self.a) & (x <= self.b) & (y > 0) & (y <= self.length)

    def to_dict(self):
        return {"a": self.a, "b": self.b}


class MeasureRepr:
    """Base class; subclasses are immutable."""

    kind = ""

    def box_mass(self, box):
        raise NotImplementedError

    def total_mass(self):
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Atomic(MeasureRepr):
    """Finite sum of point masses ``sum m_j delta_{x_j + i y_j}``."""

    x: np.ndarray
    y: np.ndarray
    mass: np.ndarray
    kind = "atomic"

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).ravel()
        y = np.asarray(self.y, dtype=float).ravel()
        m = np.asarray(self.mass, dtype=float).ravel()
        if not (len(x) == len(y) == len(m)):
            raise ValueError("atom coordinate and mass arrays differ in length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y)) and np.all(np.isfinite(m))):
            raise ValueError("atoms must be finite")
        if np.any(y <= 0):
            raise DomainError("atoms must lie in the open upper half-plane (y > 0)")
        if np.any(m < 0):
            raise ValueError("atom masses must be nonnegative")
        for a in (x, y, m):
            a.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "mass", m)

    @classmethod
    def from_atoms(cls, atoms):
        """From an iterable of ``(x, y, mass)`` or of complex points (unit mass)."""
        atoms = list(atoms)
        if atoms and isinstance(atoms[0], (complex, np.complexfloating)):
            atoms = [(z.real, z.imag, 1.0) for z in atoms]
        if not atoms:
            return cls(np.zeros(0), np.zeros(0), np.zeros(0))
        arr = np.asarray(atoms, dtype=float)
        return cls(arr[:, 0], arr[:, 1], arr[:, 2])

    @classmethod
    def point(cls, z, mass=1.0):
        return cls(np.array([complex(z).real]), np.array([complex(z).imag]), np.array([mass]))

    def __len__(self):
        return len(self.x)

    @property
    def points(self):
        return self.x + 1j * self.y

    def atoms(self):
        return self

    def box_mass(self, box):
        inside = box.contains(self.x, self.y)
        return csum(self.mass[inside])

    def total_mass(self):
        return csum(self.mass)

    def __add__(self, other):
        o = other.atoms()
        return Atomic(np.concatenate([self.x, o.x]), np.concatenate([self.y, o.y]),
                      np.concatenate([self.mass, o.mass]))

    def to_json(self):
        return {"kind": "atomic",
                "atoms": [{"x": float(a), "y": float(b), "mass": float(c)}
                          for a, b, c in zip(self.x, self.y, self.mass)]}


@dataclass(frozen=True, eq=False)
class SquaresAtHeightOne(MeasureRepr):
    """``sum_{n=1}^{N} delta_{n^2 + i}``."""

    n: int
    kind = "squares"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("SquaresAtHeightOne needs an integer N >= 1")
        object.__setattr__(self, "n", int(self.n))

    def atoms(self):
        k = np.arange(1, self.n + 1, dtype=float)
        return Atomic(k * k, np.ones(self.n), np.ones(self.n))

    def box_mass(self, box):
        if box.length < 1:
            return 0.0
        # integer count of n <= N with a <= n^2 <= b
        lo = 1
        if box.a > 1:
            lo = math.isqrt(math.ceil(box.a))
            if lo * lo < box.a:
                lo += 1
        if box.b < 1:
            return 0.0
        hi = min(math.isqrt(math.floor(box.b)), self.n)
        return float(max(0, hi - max(lo, 1) + 1))

    def total_mass(self):
        return float(self.n)

    def to_json(self):
        return {"kind": "squares", "n": self.n}


@dataclass(frozen=True, eq=False)
class GridDensity(MeasureRepr):
    """Density ``rho(x, y) dx dy`` sampled on a half-plane grid.

    Box masses use the grid's quadrature weights for the nodes inside the box.
    """

    grid: GridSpec
    density: np.ndarray
    kind = "density"

    def __post_init__(self):
        if self.grid.domain != HALF_PLANE:
            raise DomainError("a density lives on a half_plane grid")
        d = np.asarray(self.density, dtype=float)
        if d.shape != tuple(self.grid.nodes):
            raise ValueError("density shape does not match its grid")
        if np.any(d < 0) or not np.all(np.isfinite(d)):
            raise ValueError("density must be finite and nonnegative")
        d.setflags(write=False)
        object.__setattr__(self, "density", d)

    @classmethod
    def lebesgue_box(cls, x_min, x_max, y_min, y_max, n=64, rule="midpoint"):
        """Unit density on a rectangle, midpoint rule so box masses are cell sums."""
        g = GridSpec.half_plane(n, n, x_min, x_max, y_min, y_max, "uniform", rule)
        return cls(g, np.ones((n, n)))

    @property
    def cell_masses(self):
        return self.density * self.grid.weights()

    def nodes(self):
        X, Y = self.grid.points()
        return X, Y

    def box_mass(self, box):
        X, Y = self.nodes()
        return csum(self.cell_masses[box.contains(X, Y)])

    def total_mass(self):
        return csum(self.cell_masses)

    def atoms(self):
        """Node-mass representation (each node carries its cell mass)."""
        X, Y = self.nodes()
        m = self.cell_masses
        keep = m > 0
        return Atomic(X[keep], Y[keep], m[keep])

    def to_json(self):
        d = {"kind": "density", "values": self.density.tolist()}
        d.update(self.grid.to_dict())
        return d


# ---------------------------------------------------------------------------
# I/O

def measure_from_json(d) -> MeasureRepr:
    """Parse the measure JSON schema.

    ``{"kind": "atomic", "atoms": [{"x", "y", "mass"}, ...]}``,
    ``{"kind": "density", <grid fields>, "values": [[...]]}`` or
    ``{"kind": "squares", "n": N}``.
    """
    if not isinstance(d, dict):
        raise ValueError("measure must be a JSON object")
    kind = d.get("kind")
    if kind is None:
        raise ValueError("measure is missing field 'kind'")
    if kind == "atomic":
        if "atoms" not in d:
            raise ValueError("atomic measure is missing field 'atoms'")
        atoms = []
        for i, a in enumerate(d["atoms"]):
            for key in ("x", "y", "mass"):
                if key not in a:
                    raise ValueError(f"atom {i} is missing field {key!r}")
                if not isinstance(a[key], (int, float)) or isinstance(a[key], bool):
                    raise ValueError(f"field {key!r} of atom {i} must be a number")
            if a["y"] <= 0:
                raise ValueError(f"field 'y' of atom {i} must be positive")
            if a["mass"] < 0:
                raise ValueError(f"field 'mass' of atom {i} must be nonnegative")
            atoms.append((a["x"], a["y"], a["mass"]))
        return Atomic.from_atoms(atoms)
    if kind == "squares":
        if "n" not in d:
            raise ValueError("squares measure is missing field 'n'")
        n = d["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ValueError("field 'n' must be an integer >= 1")
        return SquaresAtHeightOne(n)
    if kind == "density":
        if "values" not in d:
            raise ValueError("density measure is missing field 'values'")
        grid = GridSpec.from_dict({"domain": d.get("domain", HALF_PLANE), **{
            k: d[k] for k in ("nodes", "bounds", "spacing", "rule") if k in d}})
        return GridDensity(grid, np.asarray(d["values"], dtype=float))
    raise ValueError(f"unknown measure kind {kind!r} in field 'kind'")


def load_measure(path) -> MeasureRepr:
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed measure JSON: {exc}") from None
    return measure_from_json(d)


def scale_measure(mu: MeasureRepr, c: float) -> Atomic:
    """Push forward under ``z -> c z``; masses are unchanged."""
    if not c > 0:
        raise ValueError("scale factor must be positive")
    if isinstance(mu, GridDensity):
        raise DomainError("scaling is implemented for atomic measures only")
    a = mu.atoms()
    if c == 1:
        return a
    return Atomic(c * a.x, c * a.y, a.mass)


# ---------------------------------------------------------------------------
# Carleson suprema

@dataclass(frozen=True)
class BoxReport:
    """Supremum of ``mu(Q_I) / |I|^beta`` over a family of intervals."""

    beta: float
    sup_ratio: float
    argmax: CarlesonBox | None
    n_examined: int
    exhaustive: bool = False
    method: str = "dyadic"
    converged: bool = True
    k_range: tuple | None = None
    details: dict = field(default_factory=dict, compare=False)

    def to_dict(self):
        out = {"beta": self.beta, "sup_ratio": self.sup_ratio,
               "argmax": None if self.argmax is None else self.argmax.to_dict(),
               "intervals_examined": self.n_examined, "exhaustive": self.exhaustive,
               "method": self.method, "converged": self.converged}
        if self.k_range is not None:
            out["k_range"] = list(self.k_range)
        if self.exhaustive:
            out["note"] = ("candidate family is exhaustive: every interval is dominated "
                           "by a candidate with the same box mass and no larger length")
        return out


def default_k_range(mu):
    a = mu.atoms()
    if len(a) == 0:
        return (0, 0)
    diam = max(float(a.x.max() - a.x.min()), float(a.y.max()), 1e-300)
    return (int(math.floor(math.log2(a.y.min()))) - 2, int(math.ceil(math.log2(diam))) + 2)


def _better(r, iv, best_r, best_iv):
    """Deterministic max: larger ratio, ties to the lexicographically smallest interval."""
    if best_iv is None or r > best_r:
        return True
    return r == best_r and iv < best_iv


def dyadic_sup(mu, beta, k_range=None, density_grid=None):
    """Supremum over dyadic intervals ``[j 2^k, (j+1) 2^k]`` meeting the support."""
    if isinstance(mu, GridDensity):
        X, Y = mu.nodes()
        a = Atomic(X.ravel(), Y.ravel(), mu.cell_masses.ravel())
    else:
        a = mu.atoms()
    if k_range is None:
        k_range = default_k_range(a)
        if isinstance(mu, GridDensity):
            # boxes narrower than two cells see node masses as atoms
            x_min, x_max = mu.grid.bounds[0], mu.grid.bounds[1]
            cell = (x_max - x_min) / mu.grid.nodes[0]
            k_range = (max(k_range[0], int(math.ceil(math.log2(2 * cell)))),
                       max(k_range[1], int(math.ceil(math.log2(2 * cell)))))
    kmin, kmax = k_range
    if kmax < kmin:
        raise EmptyFamilyError("dyadic k-range is empty")
    if len(a) == 0 or a.mass.sum() == 0:
        return BoxReport(beta, 0.0, None, 0, False, "dyadic", True, (kmin, kmax))
    order = np.argsort(a.x, kind="stable")
    xs, ys, ms = a.x[order], a.y[order], a.mass[order]
    best_r, best_iv, best_k = -1.0, None, None
    count = 0
    for k in range(kmin, kmax + 1):
        L = 2.0 ** k
        sel = ys <= L
        if not np.any(sel):
            count += int(math.floor(xs[-1] / L) - math.floor(xs[0] / L) + 1)
            continue
        xk, mk = xs[sel], ms[sel]
        j0 = int(math.floor(xs[0] / L))
        j1 = int(math.floor(xs[-1] / L))
        js = np.arange(j0, j1 + 1)
        lo = js * L
        hi = (js + 1) * L
        cum = np.concatenate([[0.0], np.cumsum(mk)])
        i_lo = np.searchsorted(xk, lo, side="left")
        i_hi = np.searchsorted(xk, hi, side="right")
        mass = cum[i_hi] - cum[i_lo]
        count += len(js)
        ratio = mass / L ** beta
        i = int(np.argmax(ratio))
        if _better(float(ratio[i]), (float(lo[i]), float(hi[i])), best_r,
                   None if best_iv is None else (best_iv.a, best_iv.b)):
            best_r, best_iv, best_k = float(ratio[i]), CarlesonBox(float(lo[i]), float(hi[i])), k
    converged = best_r <= 0 or kmin < best_k < kmax
    return BoxReport(beta, max(best_r, 0.0), best_iv, count, False, "dyadic", converged,
                     (kmin, kmax))


def exhaustive_sup(mu, beta, max_pairs=4_000_000):
    """Exact supremum over all intervals for an atomic measure.

    For a box with positive mass, shrink ``I`` until its closed x-range is
    ``[x_a, x_b]`` for atoms ``a, b`` and its length is the smallest value
    ``L >= x_b - x_a`` keeping the same atoms: either ``x_b - x_a`` itself or
    one of the atom heights.  The mass can only drop when ``L`` drops past an
    atom height, so the candidates ``(a, b, L)`` dominate every interval and
    the supremum is attained among them.  Each candidate is reported as the
    interval of length ``L`` centred on ``[x_a, x_b]``.
    """
    a = mu.atoms()
    keep = a.mass > 0
    if not np.any(keep):
        return BoxReport(beta, 0.0, None, 0, True, "exhaustive", True)
    x, y, m = a.x[keep], a.y[keep], a.mass[keep]
    ux, inv = np.unique(x, return_inverse=True)
    uh = np.unique(y)
    nx, nh = len(ux), len(uh)
    # table[r, i]: mass of atoms with height <= uh[r] and x-index < i
    hidx = np.searchsorted(uh, y)
    table = np.zeros((nh, nx + 1))
    np.add.at(table, (hidx, inv + 1), m)
    table = np.cumsum(np.cumsum(table, axis=0), axis=1)
    ia, ib = np.triu_indices(nx)
    span = ux[ib] - ux[ia]
    best_r, best_key = -1.0, None
    count = 0
    # candidate length = span (when positive)
    pos = span > 0
    if np.any(pos):
        r_idx = np.searchsorted(uh, span[pos], side="right") - 1
        ok = r_idx >= 0
        sa, sb, sp, rr = ia[pos][ok], ib[pos][ok], span[pos][ok], r_idx[ok]
        mass = table[rr, sb + 1] - table[rr, sa]
        count += int(pos.sum())
        if len(mass):
            ratio = mass / sp ** beta
            best_r, best_key = _pick(ratio, ux[sa], ux[sb], sp, best_r, best_key)
    # candidate length = a height strictly above the span
    if nx * (nx + 1) // 2 * nh > max_pairs:
        chunks = max(1, (nx * (nx + 1) // 2 * nh) // max_pairs + 1)
    else:
        chunks = 1
    for r_block in np.array_split(np.arange(nh), chunks):
        for r in r_block:
            L = uh[r]
            sel = span < L
            if not np.any(sel):
                continue
            sa, sb = ia[sel], ib[sel]
            mass = table[r, sb + 1] - table[r, sa]
            count += int(sel.sum())
            ratio = mass / L ** beta
            best_r, best_key = _pick(ratio, ux[sa], ux[sb], np.full(len(sa), L), best_r, best_key)
    xa, xb, L = best_key
    lo = 0.5 * (xa + xb) - L / 2
    hi = lo + L
    while hi - lo < L:
        hi = np.nextafter(hi, np.inf)
    box = CarlesonBox(float(lo), float(hi))
    return BoxReport(beta, float(best_r), box, count, True, "exhaustive", True)


def _pick(ratio, xa, xb, L, best_r, best_key):
    top = ratio.max()
    if top < best_r:
        return best_r, best_key
    cand = np.flatnonzero(ratio == top)
    c = 0.5 * (xa[cand] + xb[cand])
    lo = c - L[cand] / 2
    hi = c + L[cand] / 2
    j = int(np.lexsort((hi, lo))[0])
    key = (float(xa[cand[j]]), float(xb[cand[j]]), float(L[cand[j]]))
    if top > best_r or best_key is None:
        return float(top), key
    cur = (0.5 * (best_key[0] + best_key[1]) - best_key[2] / 2,
           0.5 * (best_key[0] + best_key[1]) + best_key[2] / 2)
    if (lo[j], hi[j]) < cur:
        return float(top), key
    return best_r, best_key


def carleson_sup(mu: MeasureRepr, beta: float, family: str = "auto", k_range=None) -> BoxReport:
    """Supremum of ``mu(Q_I) / |I|^beta``.

    Parameters
    ----------
    mu : MeasureRepr
    beta : float
        Exponent, ``> 0``.
    family : {"auto", "dyadic", "exhaustive"}
        ``exhaustive`` (atomic measures) is exact; ``dyadic`` scans dyadic
        intervals over ``k_range``; ``auto`` picks exhaustive for atoms and
        dyadic for densities.

    Returns
    -------
    BoxReport
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    if family not in ("auto", "dyadic", "exhaustive"):
        raise ValueError(f"unknown interval family {family!r}")
    if k_range is not None and k_range[1] < k_range[0]:
        raise EmptyFamilyError("dyadic k-range is empty")
    if family == "exhaustive" and isinstance(mu, GridDensity):
        raise DomainError("the exhaustive family needs an atomic measure")
    if family == "dyadic" or (family == "auto" and isinstance(mu, GridDensity)):
        return dyadic_sup(mu, beta, k_range)
    return exhaustive_sup(mu, beta)
