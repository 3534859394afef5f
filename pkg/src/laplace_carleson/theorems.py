"""Registry of verifiable inequalities, keyed by their external theorem ids.

Each entry names the inequality, lists its hypotheses as ``(predicate, text)``
pairs and runs a campaign that returns a report with ``to_dict``, ``to_csv``
and a ``converged`` flag.  Ids are stable identifiers of the command-line
interface; ``1.3`` is an alias of ``1.6``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from ._numerics import ordered_map
from .embeddings import (EmbeddingCase, classify_region, default_family, run_campaign,
                         run_disk_campaign, write_ratio_csv)
from .errors import HypothesisError
from .littlewood_paley import (annulus_decay_check, besov_refinement_check,
                               convolution_lemma_check, fourier_sobolev_ratio,
                               hl_weighted_terms, optimality_scaling_check,
                               random_step_signal, spectral_grid)
from .measures import GridDensity
from .signals import BandLimited, Gaussian, GridSpec, default_grid


@dataclass
class CheckReport:
    """Rows of ``(function_id, source, target, ratio, errors)`` for a Fourier-side check."""

    theorem: str
    name: str
    params: dict
    rows: list
    sup_ratio: float
    sup_ratio_coarse: float
    drift: float
    converged: bool
    tolerance: float
    statement: str
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return {"theorem": self.theorem, "name": self.name, "params": self.params,
                "rows": self.rows, "sup_ratio": self.sup_ratio,
                "sup_ratio_coarse": self.sup_ratio_coarse, "drift": self.drift,
                "converged": self.converged, "tolerance": self.tolerance,
                "statement": self.statement, "extra": self.extra, "version": __version__}

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), sort_keys=True, **kw)

    def to_csv(self, fh=None):
        return write_ratio_csv(self.rows, fh)


def _summarize(theorem, name, params, rows, tolerance, bound=None, extra=None):
    sup_f = max(r["ratio"] for r in rows)
    sup_c = max(r.get("ratio_coarse", r["ratio"]) for r in rows)
    drift = abs(sup_f / sup_c - 1.0) if sup_c > 0 else 0.0
    converged = bool(math.isfinite(sup_f) and drift < tolerance)
    if not converged:
        statement = f"unconverged: sup ratio drifted by {drift:.3g} between grids"
    elif bound is not None and sup_f > bound:
        statement = f"violation of the bound {bound:g}: sup ratio {sup_f:.6g}"
    else:
        statement = f"no violation found at tolerance {tolerance:g} over {len(rows)} functions"
    return CheckReport(theorem, name, params, rows, sup_f, sup_c, drift, converged, tolerance,
                       statement, extra or {})


def _row(fid, src, tgt, coarse_ratio=None, err_src=0.0, err_tgt=0.0):
    r = {"function_id": fid, "source_norm": float(src), "target_norm": float(tgt),
         "ratio": float(tgt / src) if src > 0 else 0.0, "err_src": float(err_src),
         "err_tgt": float(err_tgt)}
    if coarse_ratio is not None:
        r["ratio_coarse"] = float(coarse_ratio)
    return r


def _coarse(grid: GridSpec) -> GridSpec:
    """Same window with half the nodes per axis."""
    d = grid.to_dict()
    d["nodes"] = [n // 2 for n in d["nodes"]]
    return GridSpec.from_dict(d)


# ---------------------------------------------------------------------------
# families for Fourier-side checks

def gaussian_family(n, seed=0, dim=1):
    """Seeded Gaussians with centres in ``[-1, 1]^d`` and widths in ``[1/2, 2]``."""
    from ._numerics import rng
    out = []
    for i in range(n):
        g = rng(seed, 400, i)
        c = tuple(float(x) for x in g.uniform(-1, 1, dim))
        out.append((f"gauss-{i:03d}", Gaussian(c, float(2.0 ** g.uniform(-1, 1)))))
    return out


def bandlimited_family(n, seed=0, dim=1, band=(0, 4)):
    return [(f"band-{i:03d}", BandLimited(seed * 1000 + i, band, dim=dim)) for i in range(n)]


def step_family(n, seed=0):
    return [(f"step-{i:03d}", random_step_signal(seed * 1000 + i)) for i in range(n)]


# ---------------------------------------------------------------------------
# runners

def carleson_density(beta, n=32):
    """``y^{beta-2} dx dy`` on ``[0, 1] x (0, 1]``: ``mu(Q_I) <~ |I|^beta`` at every scale."""
    box = GridDensity.lebesgue_box(0.0, 1.0, 0.0, 1.0, n=n)
    _, Y = box.grid.points()
    return GridDensity(box.grid, Y ** (beta - 2.0))


def _embedding_runner(target, alpha_rule=None):
    def run(params):
        alpha = params["alpha"]
        q = params["q"]
        if alpha_rule is not None:
            alpha = alpha_rule(params)
            q = params["p"]
        mu = params.get("measure")
        if target == "LqMu" and mu is None:
            probe = EmbeddingCase(params["p"], q, alpha, "Hardy")
            mu = carleson_density(probe.beta)
        case = EmbeddingCase(params["p"], q, alpha, target, mu)
        family = params.get("family")
        if family is None and params.get("n"):
            family = default_family(params["seed"], params["n"])
        return run_campaign(case, family=family, levels=params["levels"],
                            tolerance=params["tolerance"], seed=params["seed"])
    return run


def _run_disk(params):
    return run_disk_campaign(params["p"], params["q"], seed=params["seed"],
                             n=params.get("n") or 200, max_len=params["coeff_len"],
                             tolerance=params["tolerance"])


def _hl_runner(weight):
    def run(params):
        p, dim = params["p"], params["dim"]
        fam = gaussian_family(params.get("n") or 20, params["seed"], dim)
        grid = default_grid(dim)
        coarse = _coarse(grid)

        def one(item):
            fid, f = item
            lhs, rhs = hl_weighted_terms(f, p, weight, grid)
            lc, rc = hl_weighted_terms(f, p, weight, coarse)
            return _row(fid, rhs, lhs, lc / rc if rc > 0 else 0.0)

        rows = ordered_map(one, fam)
        return _summarize(params["theorem"], REGISTRY[params["theorem"]].name,
                          _echo(params), rows, params["tolerance"],
                          extra={"quantity": "int |f_hat|^p over int |f|^p w", "weight": weight,
                                 "grid": grid.to_dict()})
    return run


def _sobolev_runner(homogeneous):
    def run(params):
        p = params["p"]
        dim = params["dim"]
        fam = bandlimited_family(params.get("n") or 20, params["seed"], dim)
        grid = spectral_grid(dim)
        coarse = _coarse(grid)

        def one(item):
            fid, f = item
            ratio, tgt, src = fourier_sobolev_ratio(f, p, homogeneous, grid)
            rc, _, _ = fourier_sobolev_ratio(f, p, homogeneous, coarse)
            return _row(fid, src.value, tgt.value, rc, 0.0, tgt.abs_error_estimate)

        rows = ordered_map(one, fam)
        return _summarize(params["theorem"], REGISTRY[params["theorem"]].name, _echo(params),
                          rows, params["tolerance"],
                          extra={"s": dim * (2.0 / p - 1.0), "grid": grid.to_dict()})
    return run


def _run_besov(params):
    p = params["p"]
    fam = bandlimited_family(params.get("n") or 100, params["seed"], params["dim"])
    grid = spectral_grid(params["dim"])
    coarse = _coarse(grid)

    def one(item):
        fid, f = item
        r = besov_refinement_check(f, p, grid)
        rc = besov_refinement_check(f, p, coarse)
        row = _row(fid, r.source.value, r.homogeneous.value, rc.ratio, 0.0,
                   r.homogeneous.abs_error_estimate)
        row["ratio_nonhomogeneous"] = r.ratio_nonhomogeneous
        return row

    rows = ordered_map(one, fam)
    return _summarize("1.13", REGISTRY["1.13"].name, _echo(params), rows, params["tolerance"],
                      bound=1.0 + 1e-6, extra={"grid": grid.to_dict()})


def _run_convolution(params):
    p = params["p"]
    fam = step_family(params.get("n") or 20, params["seed"])
    grid = GridSpec.real_line(2 ** 14, -8.0, 8.0, rule="midpoint")
    coarse = GridSpec.real_line(2 ** 13, -8.0, 8.0, rule="midpoint")

    def one(item):
        fid, f = item
        return _row(fid, 1.0, convolution_lemma_check(f, p, grid),
                    convolution_lemma_check(f, p, coarse))

    rows = ordered_map(one, fam)
    return _summarize("L3.1", REGISTRY["L3.1"].name, _echo(params), rows, params["tolerance"],
                      extra={"quantity": "int |f*f|^p |x|^{p-2} over int |f|^{2p} |x|^{2p-2}"})


def _run_optscale(params):
    rows = []
    for r in params["r_values"]:
        dev = optimality_scaling_check(r=r, dim=params["dim"])
        for n, v in sorted(dev.items()):
            rows.append({"function_id": f"r={r:g},n={n}", "source_norm": 1.0,
                         "target_norm": 1.0 + v, "ratio": 1.0 + v, "err_src": 0.0,
                         "err_tgt": 0.0, "deviation": v})
    worst = max(r["deviation"] for r in rows)
    rep = _summarize("optscale", REGISTRY["optscale"].name, _echo(params), rows,
                     params["tolerance"], extra={"max_deviation": worst})
    if worst >= 1e-6:
        rep.statement = f"scaling identity deviates by {worst:.3g}"
    return rep


def _run_annulus(params):
    p_prime = params["p"] if params["p"] > 2 else 4.0
    rows_raw = annulus_decay_check(p_prime, tuple(params["radii"]))
    rows = []
    for r in rows_raw:
        rows.append({"function_id": f"R={r.radius:g}", "source_norm": r.lp_norm,
                     "target_norm": r.sobolev.value, "ratio": r.sobolev.value / r.lp_norm,
                     "err_src": 0.0, "err_tgt": r.sobolev.abs_error_estimate})
    vals = [r["target_norm"] for r in rows]
    decreasing = all(b < a for a, b in zip(vals, vals[1:]))
    decay = vals[-1] / vals[0]
    rep = _summarize("annulus", REGISTRY["annulus"].name, _echo(params), rows,
                     params["tolerance"],
                     extra={"strictly_decreasing": decreasing, "final_over_initial": decay,
                            "p_prime": p_prime})
    rep.statement = (f"Sobolev norms {'strictly decrease' if decreasing else 'do not decrease'}; "
                     f"final/initial = {decay:.4g}")
    return rep


# ---------------------------------------------------------------------------
# registry

def _p_le_q(c): return 2 < c["p"] <= c["q"] < math.inf


HYP_P_LE_Q = (_p_le_q, r"2< p\le q<\infty")
HYP_P_GE_2 = (lambda c: c["p"] >= 2, r"p\ge 2")


@dataclass(frozen=True)
class Entry:
    id: str
    name: str
    inequality: str
    hypotheses: tuple
    runner: object
    defaults: dict = field(default_factory=dict)
    alias_of: str | None = None


def _alpha_weighted_hardy(params):
    return params["p"] - 2.0


def _weighted_hardy_hyps():
    return (
        (lambda c: 2 < c["p"] < math.inf, r"2<p<\infty"),
        (lambda c: c["alpha_given"] is None or math.isclose(c["alpha_given"], c["p"] - 2.0),
         r"\alpha = p-2"),
        (lambda c: c["q_given"] is None or math.isclose(c["q_given"], c["p"]), r"q = p"),
    )


def _alpha_below(strict):
    def pred(c):
        lim = c["p"] / (c["q"] / (c["q"] - 1.0)) - 1.0
        return c["alpha"] < lim if strict else c["alpha"] <= lim + 1e-12
    return pred


REGISTRY = {}


def _reg(e: Entry):
    REGISTRY[e.id] = e


_reg(Entry("1.1", "laplace-carleson-embedding", "L^p(R_+) -> L^q(mu) under mu(Q_I) <~ |I|^{q/p'}",
           (HYP_P_LE_Q,), _embedding_runner("LqMu")))
_reg(Entry("1.2", "laplace-bergman-embedding", "L^p(R_+) -> A^q_{q/p'-2}(C_+)",
           (HYP_P_LE_Q,), _embedding_runner("Bergman")))
_reg(Entry("1.4", "disk-bergman-coefficients", "l^p -> A^q_{q/p'-2}(D) for power series",
           (HYP_P_LE_Q,), _run_disk))
_reg(Entry("1.5", "weighted-laplace-bergman-embedding",
           "L^p(x^alpha) -> A^q_{q/p'-2-alpha q/p}(C_+)",
           (HYP_P_LE_Q, (_alpha_below(True), r"\alpha <p/q'-1")), _embedding_runner("Bergman")))
_reg(Entry("1.6", "weighted-laplace-hardy-embedding", "L^p(x^{p-2}) -> H^p(C_+)",
           _weighted_hardy_hyps(), _embedding_runner("Hardy", _alpha_weighted_hardy)))
_reg(Entry("1.3", "weighted-laplace-hardy-embedding", "alias of 1.6",
           _weighted_hardy_hyps(), _embedding_runner("Hardy", _alpha_weighted_hardy),
           alias_of="1.6"))
_reg(Entry("1.7", "weighted-laplace-carleson-embedding",
           "L^p(x^alpha) -> L^q(mu) under mu(Q_I) <~ |I|^{q/p'-alpha q/p}",
           (HYP_P_LE_Q, (_alpha_below(False), r"\alpha \le p/q'-1")), _embedding_runner("LqMu")))
_reg(Entry("1.8", "hardy-littlewood-product-weight",
           "int |f_hat|^p <~ int |f|^p (prod |x_k|)^{p-2}", (HYP_P_GE_2,), _hl_runner("product"),
           {"dim": 2}))
_reg(Entry("1.9", "hardy-littlewood-radial-weight",
           "int |f_hat|^p <~ int |f|^p |x|^{(p-2)d}", (HYP_P_GE_2,), _hl_runner("radial")))
_reg(Entry("1.10", "fourier-to-homogeneous-sobolev", "F: L^p -> dot W^p_{d(2/p-1)}",
           (HYP_P_GE_2,), _sobolev_runner(True)))
_reg(Entry("1.11", "fourier-to-nonhomogeneous-sobolev", "F: L^p -> W^p_{d(2/p-1)}",
           (HYP_P_GE_2,), _sobolev_runner(False)))
_reg(Entry("1.13", "fourier-to-besov", "F: L^p -> dot B^{p',p}_0 cap B^{p',p}_0",
           ((lambda c: 1 <= c["p"] <= 2, r"1\le p\le 2"),
            (lambda c: c["p"] > 1, r"p>1 (the endpoint p=1 is outside the numeric campaigns)")),
           _run_besov, {"p": 1.5}))
_reg(Entry("L3.1", "convolution-inequality",
           "int |f*f|^p |x|^{p-2} <~ int |f|^{2p} |x|^{2p-2}",
           ((lambda c: c["p"] > 1, r"p>1"), (lambda c: c["dim"] == 1, r"d=1")),
           _run_convolution, {"p": 3.0}))
_reg(Entry("optscale", "dyadic-self-convolution-scaling",
           "||phi_n * phi_n||_r = 2^{nd/r'} ||phi_0 * phi_0||_r",
           ((lambda c: all(1 < r < math.inf for r in c["r_values"]), r"1<r<\infty"),
            (lambda c: c["dim"] in (1, 2), r"d\in\{1,2\}")), _run_optscale))
_reg(Entry("annulus", "annulus-sobolev-decay",
           "||1_hat_{A_R}||_{dot W^{p'}_{2/p'-1}} -> 0 while ||1_{A_R}||_{p'} ~ 1",
           ((lambda c: c["p"] > 2, r"p'>2"),), _run_annulus, {"p": 4.0}))


BASE_DEFAULTS = {"p": 4.0, "q": None, "alpha": 0.0, "seed": 0, "levels": (10, 11),
                 "tolerance": 0.1, "coeff_len": 64, "n": None, "dim": 1,
                 "r_values": (1.5, 2.0, 3.0), "radii": (4, 8, 16, 32, 64)}


def resolve(theorem_id):
    if theorem_id not in REGISTRY:
        raise KeyError(f"unknown theorem id {theorem_id!r}; known ids: {', '.join(REGISTRY)}")
    return REGISTRY[theorem_id]


def id_table():
    """Rows ``(id, name, inequality, hypotheses)`` for every registered id."""
    out = []
    for k, e in REGISTRY.items():
        hyp = "; ".join(t for _, t in e.hypotheses)
        name = e.name + (f" (alias of {e.alias_of})" if e.alias_of else "")
        out.append((k, name, e.inequality, hyp))
    return out


def _echo(params):
    skip = {"family", "measure", "alpha_given", "q_given"}
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in params.items() if k not in skip}


def prepare(theorem_id, **overrides):
    """Merge defaults and overrides into a parameter dict and check the hypotheses.

    Raises
    ------
    HypothesisError
        Naming the first violated hypothesis.
    """
    e = resolve(theorem_id)
    params = dict(BASE_DEFAULTS)
    params.update(e.defaults)
    params["alpha_given"] = overrides.get("alpha")
    params["q_given"] = overrides.get("q")
    for k, v in overrides.items():
        if v is not None:
            params[k] = v
    if params["q"] is None:
        params["q"] = params["p"]
    params["theorem"] = theorem_id
    for k in ("p", "q", "alpha", "tolerance"):
        params[k] = float(params[k])
    for pred, text in e.hypotheses:
        if not pred(params):
            raise HypothesisError(f"theorem {theorem_id} requires {text}", text)
    return params


def run_theorem(theorem_id, **overrides):
    """Run the campaign registered under ``theorem_id``; returns ``(report, params)``."""
    params = prepare(theorem_id, **overrides)
    report = resolve(theorem_id).runner(params)
    return report, params


def region_grid(n=99):
    """Labels of ``(1/p, 1/q)`` on the interior lattice ``k/(n+1)``, ``k = 1..n``."""
    vals = np.arange(1, n + 1) / (n + 1.0)
    rows = []
    for u in vals:
        for v in vals:
            rows.append((float(u), float(v), classify_region(1.0 / u, 1.0 / v)))
    return rows
