"""Embedding quotients of the Laplace transform and their campaigns.

An :class:`EmbeddingCase` fixes exponents ``(p, q, alpha)`` and a target: a
measure space ``L^q(mu)``, the Bergman space ``A^q_gamma`` with
``gamma = q/p' - 2 - alpha q/p``, or the Hardy space ``H^q``.  Campaigns
evaluate ``||Lf||_target / ||f||_{L^p(x^alpha)}`` over seeded families at two
refinement levels.  Reports state "no violation found", never a proof.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from ._numerics import conjugate_exponent, ordered_map, rng
from .errors import DomainError, EmptyFamilyError, HypothesisError
from .measures import CarlesonBox, MeasureRepr, carleson_sup, load_measure, measure_from_json
from .signals import (ExpPoly, NormValue, SpaceDescriptor, StepDyadic, TestFunction,
                      function_from_json, lp_norm)
from .spaces import bergman_norm, default_y_sequence, disk_bergman_norm, hardy_norm, lq_mu_norm

REGIONS = ("I", "II", "III", "IV")
TARGETS = ("LqMu", "Bergman", "Hardy")


def classify_region(p: float, q: float, boundary: bool = False) -> str:
    """Region of ``(1/p, 1/q)`` in the diagram of Laplace-Carleson embeddings.

    I: ``p <= 2`` and ``q >= p'``; II: ``p > 2`` and ``q >= p``;
    III: ``p <= 2`` and ``p <= q < p'``; IV: ``q < p``.  Points on the dividing
    lines ``p = 2``, ``q = p`` and ``q = p'`` keep these labels unless
    ``boundary`` is set, in which case they are labelled ``"boundary"``.

    Examples
    --------
    >>> classify_region(1.5, 3), classify_region(4, 4), classify_region(1.5, 2), classify_region(3, 2)
    ('I', 'II', 'III', 'IV')
    """
    if not (p > 1 and q > 1):
        raise ValueError("exponents must exceed 1")
    # decide in (1/p, 1/q) so lattice points on the lines land on the closed side
    u, v = 1.0 / p, 1.0 / q
    if boundary:
        on_line = (math.isclose(u, 0.5, abs_tol=1e-12) and v <= 0.5 + 1e-12) \
            or math.isclose(u, v, abs_tol=1e-12) \
            or (u >= 0.5 - 1e-12 and math.isclose(u + v, 1.0, abs_tol=1e-12))
        if on_line:
            return "boundary"
    if v - u > 1e-12:
        return "IV"
    if u < 0.5 - 1e-12:
        return "II"
    return "I" if u + v <= 1.0 + 1e-12 else "III"


@dataclass(frozen=True)
class EmbeddingCase:
    """Exponents and target of an embedding ``L^p(R_+, x^alpha dx) -> target``."""

    p: float
    q: float
    alpha: float = 0.0
    target: str = "Bergman"
    measure: MeasureRepr | None = field(default=None, compare=False)

    def __post_init__(self):
        if not (self.p > 1 and self.q > 1):
            raise ValueError("exponents must exceed 1")
        if self.target not in TARGETS:
            raise ValueError(f"target must be one of {TARGETS}")
        if self.target == "LqMu" and self.measure is None:
            raise ValueError("an L^q(mu) target needs a measure")
        if self.target == "Bergman" and not self.gamma > -1:
            raise DomainError(f"Bergman weight {self.gamma:g} must exceed -1")

    @property
    def p_prime(self):
        return conjugate_exponent(self.p)

    @property
    def beta(self):
        """Carleson exponent ``q/p' - alpha q/p``."""
        return self.q / self.p_prime - self.alpha * self.q / self.p

    @property
    def gamma(self):
        """Bergman weight ``q/p' - 2 - alpha q/p``."""
        return self.beta - 2.0

    @property
    def region(self):
        return classify_region(self.p, self.q)

    def source_space(self):
        return SpaceDescriptor("LpWeighted" if self.alpha else "Lp", p=self.p, alpha=self.alpha)

    def to_dict(self):
        d = {"p": self.p, "q": self.q, "alpha": self.alpha, "target": self.target,
             "beta": self.beta, "region": self.region}
        if self.target == "Bergman":
            d["gamma"] = self.gamma
        if self.measure is not None:
            d["measure"] = self.measure.to_json()
        return d


@dataclass
class EmbeddingResult:
    ratio: float
    source: NormValue
    target: NormValue

    def to_dict(self):
        return {"ratio": self.ratio, "source": self.source.to_dict(), "target": self.target.to_dict()}


def target_norm(case: EmbeddingCase, f: TestFunction, level: int = 10) -> NormValue:
    """``||Lf||`` in the target of ``case`` at refinement ``level``."""
    if case.target == "Bergman":
        return bergman_norm(f, case.q, case.gamma, level=level)
    if case.target == "Hardy":
        return hardy_norm(f, case.q, y_sequence=default_y_sequence(f, count=level + 5))
    return lq_mu_norm(f, case.q, case.measure)


def embedding_ratio(case: EmbeddingCase, f: TestFunction, level: int = 10) -> EmbeddingResult:
    """``||Lf||_target / ||f||_{L^p(x^alpha)}`` with both norms recorded.

    Raises
    ------
    ZeroDivisionError
        If the source norm vanishes.
    """
    src = lp_norm(f, case.p, case.alpha)
    if src.value == 0:
        raise ZeroDivisionError("source norm is zero")
    tgt = target_norm(case, f, level)
    return EmbeddingResult(tgt.value / src.value, src, tgt)


# ---------------------------------------------------------------------------
# families

def random_steps(g, max_pieces=16, resolution=3):
    """Step function on ``[0, T]``, ``T`` in ``{1/2, 1, 2, 4}``, breakpoints on ``2^-resolution``."""
    T = 2.0 ** int(g.integers(-1, 3))
    cells = int(T * 2 ** resolution)
    n = int(g.integers(1, min(max_pieces, cells) + 1))
    cuts = np.sort(g.choice(np.arange(1, cells), size=min(n - 1, cells - 1), replace=False)) \
        if n > 1 else np.array([], dtype=int)
    bp = np.concatenate([[0], cuts, [cells]]) / 2.0 ** resolution
    return StepDyadic(tuple(float(b) for b in bp), tuple(float(v) for v in g.standard_normal(len(bp) - 1)))


def random_exppoly(g):
    a = 2 * np.pi * 2.0 ** g.uniform(-2, 2)
    b = g.uniform(-8 * np.pi, 8 * np.pi)
    k = int(g.integers(0, 4))
    return ExpPoly(float(a), float(b), k, 1.0)


def lacunary_steps(g, levels=6):
    """``sum_j c_j 1_(2^j, 2^j + 1)``: unit steps at lacunary integer positions."""
    offsets = [2 ** j for j in range(levels)]
    c = g.standard_normal(levels)
    return StepDyadic.unit_steps([float(x) for x in c], offsets)


def kernel_family_member(g):
    lam = complex(g.uniform(-4, 4), 2.0 ** g.uniform(-2, 2))
    return ExpPoly.kernel(lam)


def default_family(seed: int = 0, n: int = 100):
    """Seeded mixture: 40% steps, 30% exponential polynomials, 20% lacunary
    steps and 10% reproducing-kernel functions ``f_lambda``.

    Returns a list of ``(function_id, TestFunction)``.
    """
    counts = [("step", 0.4, random_steps), ("exppoly", 0.3, random_exppoly),
              ("lacunary", 0.2, lacunary_steps), ("kernel", 0.1, kernel_family_member)]
    sizes = [int(round(n * w)) for _, w, _ in counts]
    sizes[0] += n - sum(sizes)
    out = []
    for (name, _, make), m in zip(counts, sizes):
        for i in range(m):
            g = rng(seed, 100 + len(out))
            out.append((f"{name}-{i:03d}", make(g)))
    return out


# ---------------------------------------------------------------------------
# necessity

def kernel_for_interval(box: CarlesonBox):
    """``f_lambda`` with ``lambda`` the centre of the Carleson box ``Q_I``."""
    lam = complex(box.center, 0.5 * box.length)
    return lam, ExpPoly.kernel(lam)


BOX_FAR_CORNER = math.sqrt(10.0) / 2.0  # max_{z in Q_I} |z - conj(lambda_I)| / |I|


@dataclass
class NecessityResult:
    bound: float
    geometric_bound: float
    source_norm: float
    box_mass: float
    interval: CarlesonBox

    def to_dict(self):
        return {"bound": self.bound, "geometric_bound": self.geometric_bound,
                "source_norm": self.source_norm, "box_mass": self.box_mass,
                "interval": self.interval.to_dict()}


def necessity_bound(case: EmbeddingCase, interval, measure: MeasureRepr | None = None) -> NecessityResult:
    """Lower bound for the embedding norm from the kernel function of ``Q_I``.

    ``bound`` is ``||Lf_lambda||_{L^q(mu restricted to Q_I)} / ||f_lambda||``
    evaluated exactly at the atoms; ``geometric_bound`` uses only
    ``mu(Q_I)`` and ``|Lf_lambda| >= 1 / (2 pi (sqrt(10)/2) |I|)`` on ``Q_I``.
    """
    mu = measure if measure is not None else case.measure
    if mu is None:
        raise ValueError("a necessity bound needs a measure")
    box = interval if isinstance(interval, CarlesonBox) else CarlesonBox(*interval)
    lam, f = kernel_for_interval(box)
    src = lp_norm(f, case.p, case.alpha).value
    mass = mu.box_mass(box)
    if mass == 0:
        return NecessityResult(0.0, 0.0, src, 0.0, box)
    a = mu.atoms()
    inside = box.contains(a.x, a.y) & (a.mass > 0)
    z = a.points[inside]
    vals = np.abs(f.laplace_exact(z)) ** case.q * a.mass[inside]
    restricted = math.fsum(vals.tolist()) ** (1.0 / case.q)
    geo = mass ** (1.0 / case.q) / (2 * np.pi * BOX_FAR_CORNER * box.length)
    return NecessityResult(restricted / src, geo / src, src, mass, box)


# ---------------------------------------------------------------------------
# campaigns

@dataclass
class EmbeddingReport:
    case: EmbeddingCase
    levels: tuple
    rows: list
    sup_ratio: float
    sup_ratio_coarse: float
    drift: float
    converged: bool
    region: str
    tolerance: float
    seeds: dict
    failures: list = field(default_factory=list)
    carleson: dict | None = None
    statement: str = ""

    def to_dict(self):
        d = {"case": self.case.to_dict(), "levels": list(self.levels),
             "sup_ratio": self.sup_ratio, "sup_ratio_coarse": self.sup_ratio_coarse,
             "drift": self.drift, "converged": self.converged, "region": self.region,
             "tolerance": self.tolerance, "seeds": self.seeds, "failures": self.failures,
             "statement": self.statement, "rows": self.rows, "version": __version__}
        if self.carleson is not None:
            d["carleson"] = self.carleson
        return d

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), sort_keys=True, **kw)

    def to_csv(self, fh=None):
        return write_ratio_csv(self.rows, fh)


CSV_COLUMNS = ("function_id", "source_norm", "target_norm", "ratio", "err_src", "err_tgt")


def write_ratio_csv(rows, fh=None):
    """Ratio table with the fixed columns ``CSV_COLUMNS``; returns the text if ``fh`` is None."""
    buf = fh if fh is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([r["function_id"]] + [repr(float(r[c])) for c in CSV_COLUMNS[1:]])
    return buf.getvalue() if fh is None else None


def _row(fid, res: EmbeddingResult, coarse: EmbeddingResult | None):
    row = {"function_id": fid, "source_norm": res.source.value, "target_norm": res.target.value,
           "ratio": res.ratio, "err_src": res.source.abs_error_estimate,
           "err_tgt": res.target.abs_error_estimate}
    if coarse is not None:
        row["ratio_coarse"] = coarse.ratio
    return row


def run_campaign(case: EmbeddingCase, family=None, levels=(10, 11), tolerance: float = 0.1,
                 seed: int = 0, carleson_family: str = "auto", workers=None) -> EmbeddingReport:
    """Evaluate embedding quotients over a family at two refinement levels.

    Parameters
    ----------
    case : EmbeddingCase
    family : list of (id, TestFunction) or list of TestFunction, optional
        Default :func:`default_family` with ``seed``.
    levels : (int, int)
        Coarse and fine refinement levels (``2^level`` nodes per axis for
        Bergman targets, ``level + 5`` heights for Hardy targets; measure
        targets are exact).
    tolerance : float
        Maximal relative change of the sup ratio between levels for the run to
        count as converged.
    workers : int, optional
        Threads for the per-function loop (default from the environment);
        rows keep the family order.

    Notes
    -----
    For ``L^q(mu)`` targets the kernel function of the maximizing Carleson box
    is added to the family so that the sup ratio dominates the necessity
    bound on that box, and the report includes
    ``sup ratio / (Carleson constant)^{1/q}``.  Per-function failures are
    recorded and skipped.
    """
    if family is None:
        family = default_family(seed)
    family = [(x if isinstance(x, tuple) else (f"f-{i:03d}", x)) for i, x in enumerate(family)]
    if not family:
        raise EmptyFamilyError("campaign family is empty")
    carleson = None
    if case.target == "LqMu":
        rep = carleson_sup(case.measure, case.beta, family=carleson_family)
        carleson = {"report": rep.to_dict(), "constant": rep.sup_ratio}
        if rep.argmax is not None:
            lam, fk = kernel_for_interval(rep.argmax)
            family = family + [("kernel-argmax", fk)]
            nb = necessity_bound(case, rep.argmax)
            carleson["necessity_bound"] = nb.to_dict()
    lo, hi = levels
    exact_target = case.target == "LqMu"

    def evaluate(item):
        fid, f = item
        try:
            fine = embedding_ratio(case, f, hi)
            coarse = fine if exact_target else embedding_ratio(case, f, lo)
        except (ArithmeticError, ValueError, RuntimeError) as exc:
            return None, {"function_id": fid, "error": f"{type(exc).__name__}: {exc}"}
        return _row(fid, fine, coarse), None

    rows, failures = [], []
    for row, fail in ordered_map(evaluate, family, workers):
        if row is None:
            failures.append(fail)
        else:
            rows.append(row)
    if not rows:
        raise EmptyFamilyError("every function in the campaign failed")
    sup_f = max(r["ratio"] for r in rows)
    sup_c = max(r["ratio_coarse"] for r in rows)
    drift = abs(sup_f / sup_c - 1.0) if sup_c > 0 else 0.0
    converged = math.isfinite(sup_f) and drift < tolerance
    if carleson is not None:
        C = carleson["constant"]
        carleson["quotient"] = sup_f / C ** (1.0 / case.q) if C > 0 else None
    statement = (f"no violation found at tolerance {tolerance:g} over {len(rows)} functions"
                 if converged else
                 f"unconverged: sup ratio drifted by {drift:.3g} between levels {lo} and {hi}")
    return EmbeddingReport(case, (lo, hi), rows, sup_f, sup_c, drift, converged, case.region,
                           tolerance, {"family": seed}, failures, carleson, statement)


# ---------------------------------------------------------------------------
# disk campaign

def disk_family(seed: int = 0, n: int = 200, max_len: int = 64):
    """Seeded complex coefficient sequences of length ``1..max_len``."""
    out = []
    for i in range(n):
        g = rng(seed, 200, i)
        m = int(g.integers(1, max_len + 1))
        a = (g.standard_normal(m) + 1j * g.standard_normal(m)) / math.sqrt(2)
        out.append((f"coeffs-{i:03d}", a))
    return out


@dataclass
class DiskReport:
    p: float
    q: float
    gamma: float
    rows: list
    sup_ratio: float
    sup_ratio_coarse: float
    drift: float
    converged: bool
    tolerance: float
    seeds: dict
    statement: str = ""

    def to_dict(self):
        return {"p": self.p, "q": self.q, "gamma": self.gamma, "rows": self.rows,
                "sup_ratio": self.sup_ratio, "sup_ratio_coarse": self.sup_ratio_coarse,
                "drift": self.drift, "converged": self.converged, "tolerance": self.tolerance,
                "seeds": self.seeds, "statement": self.statement, "version": __version__}

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), sort_keys=True, **kw)

    def to_csv(self, fh=None):
        return write_ratio_csv(self.rows, fh)


def run_disk_campaign(p=4.0, q=4.0, seed=0, n=200, max_len=64, tolerance=0.1) -> DiskReport:
    """Ratios ``||sum a_k w^k||_{A^q_gamma(D)} / ||a||_{l^p}``, ``gamma = q/p' - 2``,
    with the radial rule at ``m`` and ``2m`` nodes."""
    gamma = q / conjugate_exponent(p) - 2.0
    if not gamma > -1:
        raise DomainError(f"disk weight {gamma:g} must exceed -1")
    rows = []
    for fid, a in disk_family(seed, n, max_len):
        src = float(np.sum(np.abs(a) ** p) ** (1.0 / p))
        coarse = disk_bergman_norm(a, q, gamma)
        fine = disk_bergman_norm(a, q, gamma, n_radial=2 * coarse.details["n_radial"])
        rows.append({"function_id": fid, "source_norm": src, "target_norm": fine.value,
                     "ratio": fine.value / src, "ratio_coarse": coarse.value / src,
                     "err_src": 0.0, "err_tgt": fine.abs_error_estimate})
    sup_f = max(r["ratio"] for r in rows)
    sup_c = max(r["ratio_coarse"] for r in rows)
    drift = abs(sup_f / sup_c - 1.0)
    converged = math.isfinite(sup_f) and drift < tolerance
    statement = (f"no violation found at tolerance {tolerance:g} over {len(rows)} sequences"
                 if converged else f"unconverged: drift {drift:.3g}")
    return DiskReport(p, q, gamma, rows, sup_f, sup_c, drift, converged, tolerance,
                      {"family": seed}, statement)


# ---------------------------------------------------------------------------
# campaign specs

def _load_toml(path):
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def case_from_spec(spec: dict, base_dir=None) -> EmbeddingCase:
    """Build a case from ``{p, q, alpha, target, measure}``; ``measure`` is a path or a table."""
    for key in ("p", "q"):
        if key not in spec:
            raise ValueError(f"campaign file is missing field {key!r}")
    target = spec.get("target", "Bergman")
    mu = None
    if "measure" in spec:
        m = spec["measure"]
        if isinstance(m, str):
            path = m if base_dir is None or os.path.isabs(m) else os.path.join(base_dir, m)
            mu = load_measure(path)
        else:
            mu = measure_from_json(m)
    return EmbeddingCase(float(spec["p"]), float(spec["q"]), float(spec.get("alpha", 0.0)),
                         target, mu)


def load_campaign_spec(path):
    """Read a TOML campaign file; returns ``(case, options)``."""
    spec = _load_toml(path)
    case = case_from_spec(spec, os.path.dirname(os.path.abspath(path)))
    opts = {"seed": int(spec.get("seed", 0)),
            "levels": tuple(spec.get("levels", (10, 11))),
            "n": int(spec.get("n", 100))}
    if "functions" in spec:
        opts["family"] = [(d.get("id", f"f-{i:03d}"), function_from_json(d))
                          for i, d in enumerate(spec["functions"])]
    return case, opts


def check_hypotheses(case: EmbeddingCase, hypotheses):
    """Raise :class:`HypothesisError` naming the first violated ``(predicate, text)``."""
    for pred, text in hypotheses:
        if not pred(case):
            raise HypothesisError(f"hypothesis violated: {text}", text)
