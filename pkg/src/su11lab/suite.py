"""Suite orchestration: configuration, catalog-driven checks, sweeps and reports.

Tolerances live in ``data/catalog.json``; this module only knows how to
measure each check.  Reports are deterministic: checks run in catalog
order and every number is serialised through ``repr``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, replace
from functools import cached_property
from importlib import resources
from typing import Any, Callable, Sequence

import numpy as np

from . import intertwine as itw
from . import timeops as tops
from .conformal import (OmegaVector, algebra_defects, case_a_spectrum, conformal_triple,
                        energy_eigenvector, family_defects, _family)
from .matcore import Window, commutator, hermiticity_defect, window_defect
from .records import Tier, convergence_orders, empirical_orders
from .su11 import (Sector, bg_state_exponential, bg_state_series, casimir, identity_defect,
                   k_from_g, g_from_k)

SUITES = ("algebra", "coherent", "conformal", "timeops", "intertwine", "all")
REPORT_VERSION = 1
REF_OMEGA = 0.5
K_CROSS_DEFAULT = 1.25
COHERENT_Z = (0.5, 1 + 0.5j)
TREND_WINDOW = 8


class ConfigError(ValueError):
    """Invalid configuration; maps to exit status 2."""


def load_catalog() -> list[dict]:
    text = resources.files("su11lab").joinpath("data/catalog.json").read_text()
    return json.loads(text)["checks"]


# --- configuration --------------------------------------------------------------------

@dataclass(frozen=True)
class SuiteConfig:
    """One verification run.

    ``window`` defaults to ``min(16, N // 4)``.  ``omega`` defaults to the
    reference value 0.5 for checks; exporting an omega-dependent operator
    requires it explicitly.
    """
    N: int
    k: float | None = None
    g: float | None = None
    window: int | None = None
    omega: float | None = None
    suite: str = "all"
    tolerances: dict[str, float] = field(default_factory=dict)
    output: str | None = None
    format: str = "json"

    def validate(self) -> "SuiteConfig":
        if (self.k is None) == (self.g is None):
            raise ConfigError("give exactly one of k and g")
        if self.k is not None and not self.k > 0:
            raise ConfigError(f"k must be positive, got {self.k}")
        if self.g is not None and not self.g >= 0:
            raise ConfigError(f"g must be >= 0, got {self.g}")
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.format!r}")
        n_min = 4 if self.suite == "algebra" else 32
        if int(self.N) != self.N or self.N < n_min:
            raise ConfigError(f"suite {self.suite!r} needs an integer N >= {n_min}, got {self.N}")
        if self.window is not None and not (1 <= self.window < self.N):
            raise ConfigError(f"window must satisfy 1 <= M < N, got M={self.window}")
        if self.omega is not None:
            if self.suite in ("conformal", "timeops", "all") and not (0 < self.omega < 1):
                raise ConfigError(f"suite {self.suite!r} needs omega in (0, 1), got {self.omega}")
            if not self.omega > 0:
                raise ConfigError(f"omega must be positive, got {self.omega}")
        known = {c["id"] for c in load_catalog()}
        unknown = sorted(set(self.tolerances) - known)
        if unknown:
            raise ConfigError(f"tolerance override for unknown check(s): {', '.join(unknown)}")
        return self

    @property
    def k_value(self) -> float:
        return float(self.k) if self.k is not None else k_from_g(self.g)

    @property
    def M(self) -> int:
        return self.window if self.window is not None else min(16, self.N // 4)

    @property
    def omega_value(self) -> float:
        return self.omega if self.omega is not None else REF_OMEGA

    def sector(self, N: int | None = None) -> Sector:
        N = N or self.N
        if self.g is not None:
            return Sector(k_from_g(self.g), N, float(self.g))
        return Sector(float(self.k), N)

    def params(self) -> dict[str, Any]:
        d = asdict(self)
        d["tolerances"] = dict(sorted(self.tolerances.items()))
        d["window"] = self.M
        d["omega"] = self.omega_value
        d.pop("output")
        return d


# --- check implementations ----------------------------------------------------------

@dataclass
class CheckResult:
    residual: float | None
    components: dict[str, Any] = field(default_factory=dict)
    table: Sequence[dict] = ()
    ok: bool | None = None              # overrides "residual <= tolerance" when set
    tolerance: float | None = None      # data-dependent bound reported instead of the catalog value


class Context:
    """Lazily built operators shared between checks of one run."""

    def __init__(self, cfg: SuiteConfig):
        self.cfg = cfg
        self.N = cfg.N
        self.M = cfg.M
        self.omega = cfg.omega_value
        self.k = cfg.k_value
        self.k_cross = self.k if self.k != tops.K_FREE else K_CROSS_DEFAULT

    @cached_property
    def sector(self) -> Sector:
        return self.cfg.sector()

    @cached_property
    def triple(self):
        return conformal_triple(self.sector)

    def trend_dims(self, n: int = 3) -> tuple[int, ...]:
        return tuple(self.N // 2 ** i for i in reversed(range(n)))

    @cached_property
    def t_min(self):
        return tops.t_minimal(self.triple)

    @cached_property
    def t_min_trend(self):
        return tops.t_minimal_trend(self.k, self.trend_dims(), Window(TREND_WINDOW))

    @cached_property
    def small_omega(self):
        w0 = min(self.omega, 0.5)
        return tops.small_omega_report(self.triple, [w0, w0 / 2, w0 / 4], Window(TREND_WINDOW))

    @cached_property
    def harmonic(self):
        return tops.t_harmonic_report(self.omega, self.trend_dims(2), Window(TREND_WINDOW))

    @cached_property
    def k_identity(self):
        return [tops.k_identity_defect(Sector(tops.K_FREE, N), Window(TREND_WINDOW))
                for N in self.trend_dims()]


def _trend_ok(values: Sequence[float]) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def _max_abs(A) -> float:
    return float(np.abs(A.entries).max())


# algebra

def _k3_kplus(c: Context, tol):
    g = c.sector.generators
    return CheckResult(_max_abs(commutator(g.K3, g.Kplus) - g.Kplus))


def _k3_kminus(c: Context, tol):
    g = c.sector.generators
    return CheckResult(_max_abs(commutator(g.K3, g.Kminus) + g.Kminus))


def _kminus_kplus_window(c: Context, tol):
    g = c.sector.generators
    C = commutator(g.Kminus, g.Kplus)
    return CheckResult(window_defect(C, g.K3 * 2, Window(c.N - 1)), {"M": c.N - 1})


def _kminus_kplus_corner(c: Context, tol):
    g = c.sector.generators
    D = commutator(g.Kminus, g.Kplus) - g.K3 * 2
    expected = -(c.N - 1) * (c.N - 2 + 2 * c.k) - 2 * (c.N - 1 + c.k)
    got = D.entries[-1, -1].real
    return CheckResult(abs(got - expected) / abs(expected), {"corner": got, "expected": expected})


def _casimir_window(c: Context, value: float) -> float:
    C = casimir(c.sector)
    return window_defect(C, C.identity() * value, Window(c.N - 1))


def _casimir(c: Context, tol):
    return CheckResult(_casimir_window(c, c.k * (c.k - 1)), {"value": c.k * (c.k - 1)})


def _casimir_g(c: Context, tol):
    g = c.cfg.g if c.cfg.g is not None else g_from_k(c.k)
    return CheckResult(_casimir_window(c, g / 4 - 3 / 16), {"g": g})


def _gamma_shift(c: Context, tol):
    per = {}
    for n in range(1, min(10, c.N - 2) + 1):
        per[str(n)] = identity_defect(c.sector, "gamma_shift", Window(c.N - n), n).residual
    return CheckResult(max(per.values()), {"per_n": per})


def _canonical_pair(c: Context, tol):
    r = identity_defect(c.sector, "canonical_pair", Window(c.N - 1))
    return CheckResult(r.residual, {"M": c.N - 1})


def _canonical_corner(c: Context, tol):
    r = identity_defect(c.sector, "canonical_pair", Window(c.N - 1))
    got, exp = r.components["corner"], r.components["corner_expected"]
    return CheckResult(abs(got - exp) / abs(exp), {"corner": got, "expected": exp})


# coherent

def _series_vs_exponential(c: Context, tol):
    per = {}
    for z in COHERENT_Z:
        a = bg_state_series(c.sector, z).coefficients
        b = bg_state_exponential(c.sector, z).coefficients
        per[str(z)] = float(np.linalg.norm(a - b) / np.linalg.norm(a))
    return CheckResult(max(per.values()), {"per_z": per})


def _eigen_residual(c: Context, tol):
    rows = []
    for N in (c.N // 2, c.N):
        s = c.cfg.sector(N)
        vs = [bg_state_series(s, z) for z in COHERENT_Z]
        rows.append({"N": N, "residual": max(v.residual for v in vs),
                     "tail_residual": max(v.tail_residual for v in vs)})
    tails = [r["tail_residual"] for r in rows]
    res = rows[-1]["residual"]
    return CheckResult(res, {"tail_decreasing": _trend_ok(tails)}, rows,
                       ok=res <= tol and _trend_ok(tails))


# conformal

def _conformal_algebra(c: Context, tol):
    r = algebra_defects(c.triple, Window(c.N - 2))
    comps = {k: v for k, v in r.components.items() if k != "casimir"}
    return CheckResult(max(comps.values()), comps)


def _conformal_casimir(c: Context, tol):
    r = algebra_defects(c.triple, Window(c.N - 2))
    return CheckResult(r.components["casimir"], {"value": c.triple.casimir_constant})


def _omega_family(c: Context, tol):
    d = family_defects(_family(c.triple, c.omega))
    return CheckResult(max(d.values()), d)


def _case_a_spectrum(c: Context, tol):
    count = min(10, c.N // 4)
    sc = case_a_spectrum(c.sector, OmegaVector(0.3, 0.0, 1.0), count)
    bound = np.maximum(tol, sc.self_convergence)
    rows = [{"n": i, "eigenvalue": float(sc.eigenvalues[i]), "reference": float(sc.reference[i]),
             "deviation": float(sc.deviations[i]), "self_convergence": float(sc.self_convergence[i])}
            for i in range(count)]
    return CheckResult(float(sc.deviations.max()), {"count": count}, rows,
                       ok=bool(np.all(sc.deviations <= bound)))


def _case_a_diagonal(c: Context, tol):
    count = min(10, c.N // 4)
    sc = case_a_spectrum(c.sector, OmegaVector(0.0, 0.0, 1.0), count)
    return CheckResult(float(sc.deviations.max()), {"count": count})


def _energy_eigenvector(c: Context, tol):
    r = energy_eigenvector(c.triple, c.omega, 1.0, Window(min(c.M, c.N // 2)),
                           dims=(c.N // 2, c.N))
    return CheckResult(r.residual, r.components, r.table)


# timeops

def _fallback(res_primary: float, tol: float, decrease: float, measure: Callable[[int], float],
              N: int) -> tuple[bool, dict]:
    if res_primary <= tol:
        return True, {"fallback_used": False}
    lo, hi = measure(32), measure(N)
    ratio = lo / hi if hi > 0 else math.inf
    return N > 32 and ratio >= decrease, {"fallback_used": True, "residual_N32_M8": lo,
                                          "residual_N_M8": hi, "decrease": ratio}


def _bch_series(c: Context, tol):
    return CheckResult(tops.bch_series_defect(c.triple, c.omega).residual, {"M": c.N - 2})


def _bch_conjugation(c: Context, tol, decrease=100.0):
    M = min(c.M, c.N // 4)
    r = tops.bch_conjugation_defect(c.triple, c.omega, Window(M)).residual

    def at(N):
        return tops.bch_conjugation_defect(conformal_triple(c.cfg.sector(N)), c.omega,
                                           Window(TREND_WINDOW)).residual
    ok, extra = _fallback(r, tol, decrease, at, c.N)
    return CheckResult(r, dict(extra, M=M), ok=ok)


def _t_omega_commutator(c: Context, tol, decrease=100.0):
    def at(N, M=TREND_WINDOW):
        t = conformal_triple(c.cfg.sector(N))
        return tops.commutator_defect(t.H, tops.t_omega(t, c.omega), Window(M)).residual
    r = at(c.N, c.M)
    ok, extra = _fallback(r, tol, decrease, at, c.N)
    return CheckResult(r, dict(extra, M=c.M), ok=ok)


def _t_omega_adjoint(c: Context, tol):
    per = {}
    for om in (c.omega, c.omega / 2, c.omega / 4):
        per[repr(om)] = tops.adjoint_symmetry_defect(c.triple, om, Window(c.M)).residual
    return CheckResult(max(per.values()), {"per_omega": per})


def _t_minimal_hermitian(c: Context, tol):
    T = c.t_min.matrix
    return CheckResult(hermiticity_defect(T) / T.max_abs())


def _t_minimal_commutator(c: Context, tol):
    r = c.t_min_trend
    return CheckResult(r.residual, r.components, r.table, ok=r.components["monotone"])


def _x_sandwich(c: Context, tol):
    xd = tops.x_defect(c.triple.H, c.t_min, Window(TREND_WINDOW))
    return CheckResult(xd.sandwich_scaled, {"defect_norm": xd.defect_norm, "sandwich_norm": xd.sandwich_norm},
                       ok=xd.sandwich_scaled <= xd.defect_norm, tolerance=xd.defect_norm)


def _shift_invariance(c: Context, tol):
    H = c.triple.H
    T = c.t_min
    C0 = commutator(H, T.matrix)
    C1 = commutator(H, T.shifted(H + H @ H).matrix)
    return CheckResult(window_defect(C0, C1, Window(TREND_WINDOW)), {"M": TREND_WINDOW})


def _small_omega_hermitian(c: Context, tol):
    r = c.small_omega
    return CheckResult(r.table[0]["hermitian_error"], r.components, r.table)


def _small_omega_antihermitian(c: Context, tol):
    r = c.small_omega
    rows = [{"omega": row["omega"], "antihermitian_error": row["antihermitian_error"],
             "ratio_to_leading": row["antihermitian_error"] / row["leading_magnitude"],
             "corrected_antihermitian_error": row["corrected_antihermitian_error"]}
            for row in r.table]
    return CheckResult(rows[0]["ratio_to_leading"], {"M": TREND_WINDOW}, rows)


def _t_omega_closed_form(c: Context, tol):
    T = tops.t_omega(c.triple, c.omega).matrix
    d = window_defect(T, tops.t_omega_closed_form(c.triple, c.omega), Window(c.M))
    return CheckResult(d, {"M": c.M})


def _k_identity_forms(c: Context, tol):
    rows = [{"N": r.components["N"], "forms_agreement": r.components["forms_agreement"]}
            for r in c.k_identity]
    return CheckResult(max(r["forms_agreement"] for r in rows), {"M": TREND_WINDOW}, rows)


def _k_identity_residual(c: Context, tol):
    rows = [{"N": r.components["N"], "form_t0": r.components["form_t0"],
             "form_q": r.components["form_q"]} for r in c.k_identity]
    res = [r["form_t0"] for r in rows]
    return CheckResult(res[-1], {"decreasing": _trend_ok(res),
                                 "orders": convergence_orders([r["N"] for r in rows], res)},
                       rows, ok=_trend_ok(res))


def _t_harmonic_commutator(c: Context, tol):
    r = c.harmonic
    rows = [{k: row[k] for k in ("N", "minus_i", "plus_i", "q_commutator_plus_i")} for row in r.table]
    return CheckResult(r.residual, {"omega": c.omega, "M": TREND_WINDOW}, rows)


def _t_harmonic_limit(c: Context, tol):
    r = c.harmonic
    rows = [{"N": row["N"], "limit_to_minus_t0": row["limit_to_minus_t0"]} for row in r.table]
    return CheckResult(rows[-1]["limit_to_minus_t0"], {"limit_omega": r.components["limit_omega"]}, rows)


def _hh_identity(c: Context, tol):
    return CheckResult(tops.harmonic_identity_defect(Sector(tops.K_FREE, c.N), c.omega))


# intertwine

def _overlap_methods(c: Context, tol):
    n = min(21, c.N)
    ks = (0.75, 1.25, 2.5)
    per = {}
    for a in ks:
        for b in ks:
            G = itw.overlap_gamma_sum(a, b, n)
            Q = itw.overlap_matrix(a, b, max(n, 4)).S.entries.real[:n, :n]
            per[f"{a}->{b}"] = float(np.abs(G - Q).max())
    return CheckResult(max(per.values()), {"size": n, "per_pair": per})


def _overlap_s00(c: Context, tol):
    S = itw.overlap_matrix(0.75, 1.25, c.N).S.entries[0, 0].real
    return CheckResult(abs(S - math.sqrt(8 / (3 * math.pi))), {"S00": float(S)})


def _overlap_symmetry(c: Context, tol):
    A = itw.overlap_matrix(tops.K_FREE, c.k_cross, c.N).S.entries
    B = itw.overlap_matrix(c.k_cross, tops.K_FREE, c.N).S.entries
    return CheckResult(float(np.abs(A - B.T).max()), {"k": c.k_cross})


def _unitarity(c: Context, tol):
    u = itw.unitary_U(c.k_cross, tops.K_FREE, c.N)
    r = itw.unitarity_defect(u, Window(c.M))
    return CheckResult(r.residual, dict(r.components, k=c.k_cross,
                                        min_row_norm=float(itw.row_norms(u, c.M).min())))


def _h_transport(c: Context, tol):
    r = itw.transport_trend(c.k_cross, tops.K_FREE, c.trend_dims(), Window(TREND_WINDOW), "H")
    return CheckResult(r.residual, r.components, r.table, ok=r.components["monotone"])


def _t_transport(c: Context, tol):
    r = itw.transport_trend(c.k_cross, tops.K_FREE, c.trend_dims(2), Window(TREND_WINDOW), "T")
    return CheckResult(r.residual, r.components, r.table)


def _u1_intertwining(c: Context, tol):
    r = itw.u1_intertwining(c.k_cross, tops.K_FREE, c.omega, c.trend_dims(), Window(TREND_WINDOW))
    return CheckResult(r.residual, dict(r.components, k=c.k_cross), r.table)


def _t_cs_commutator(c: Context, tol):
    r = itw.t_cs_report(c.k_cross, c.omega, c.trend_dims(2), Window(TREND_WINDOW))
    return CheckResult(r.residual, r.components, r.table)


def _even(N: int) -> int:
    return N - N % 2


def _t0_forms(c: Context, tol):
    dims = (_even(c.N // 2), _even(c.N))
    r = itw.t0_forms_table(dims, (0.2, 0.5, 1.0), Window(TREND_WINDOW))
    return CheckResult(r.residual, r.components, r.table)


def _fock_canonical(c: Context, tol):
    f = itw.fock_line(_even(c.N))
    C = commutator(f.x, f.p)
    return CheckResult(window_defect(C, C.identity() * 1j, Window(f.N - 1)), {"M": f.N - 1})


def _fock_oscillator(c: Context, tol):
    f = itw.fock_line(_even(c.N))
    target = np.diag(np.arange(f.N) + 0.5)
    d = np.abs((f.H0line + f.Kline).entries - target)[:f.N - 1, :f.N - 1].max()
    return CheckResult(float(d), {"M": f.N - 1})


CHECKS: dict[str, Callable[[Context, float | None], CheckResult]] = {
    "k3_kplus": _k3_kplus, "k3_kminus": _k3_kminus,
    "kminus_kplus_window": _kminus_kplus_window, "kminus_kplus_corner": _kminus_kplus_corner,
    "casimir": _casimir, "casimir_g": _casimir_g, "gamma_shift": _gamma_shift,
    "canonical_pair": _canonical_pair, "canonical_corner": _canonical_corner,
    "series_vs_exponential": _series_vs_exponential, "eigen_residual": _eigen_residual,
    "conformal_algebra": _conformal_algebra, "conformal_casimir": _conformal_casimir,
    "omega_family": _omega_family, "case_a_spectrum": _case_a_spectrum,
    "case_a_diagonal": _case_a_diagonal, "energy_eigenvector": _energy_eigenvector,
    "bch_series": _bch_series, "bch_conjugation": _bch_conjugation,
    "t_omega_commutator": _t_omega_commutator, "t_omega_adjoint": _t_omega_adjoint,
    "t_minimal_hermitian": _t_minimal_hermitian, "t_minimal_commutator": _t_minimal_commutator,
    "x_sandwich": _x_sandwich, "shift_invariance": _shift_invariance,
    "small_omega_hermitian": _small_omega_hermitian,
    "small_omega_antihermitian": _small_omega_antihermitian,
    "t_omega_closed_form": _t_omega_closed_form, "k_identity_forms": _k_identity_forms,
    "k_identity_residual": _k_identity_residual, "t_harmonic_commutator": _t_harmonic_commutator,
    "t_harmonic_limit": _t_harmonic_limit, "hh_identity": _hh_identity,
    "overlap_methods": _overlap_methods, "overlap_s00": _overlap_s00,
    "overlap_symmetry": _overlap_symmetry, "unitarity": _unitarity,
    "h_transport": _h_transport, "t_transport": _t_transport,
    "u1_intertwining": _u1_intertwining, "t_cs_commutator": _t_cs_commutator,
    "t0_forms": _t0_forms, "fock_canonical": _fock_canonical, "fock_oscillator": _fock_oscillator,
}


# --- running ---------------------------------------------------------------------------

def _clean(x):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (complex, np.complexfloating)):
        return [_clean(x.real), _clean(x.imag)]
    return x


@dataclass(frozen=True)
class SuiteReport:
    version: int
    params: dict[str, Any]
    checks: tuple[dict[str, Any], ...]

    @property
    def failed(self) -> bool:
        return any(c["status"] == "fail" for c in self.checks)

    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def to_dict(self) -> dict:
        return {"version": self.version, "params": self.params, "checks": list(self.checks)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "paper_eq", "tier", "residual", "tolerance", "status"])
        for c in self.checks:
            w.writerow([c["id"], c["paper_eq"], c["tier"], _num(c["residual"]),
                        _num(c["tolerance"]), c["status"]])
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        return self.to_json() if fmt == "json" else self.to_csv()


def _num(x) -> str:
    return "" if x is None else repr(x)


def selected(suite: str, only: Sequence[str] | None = None) -> list[dict]:
    cat = load_catalog()
    out = [c for c in cat if suite == "all" or c["suite"] == suite]
    if only:
        unknown = sorted(set(only) - {c["id"] for c in cat})
        if unknown:
            raise ConfigError(f"unknown check id(s): {', '.join(unknown)}")
        out = [c for c in out if c["id"] in only]
        if not out:
            raise ConfigError(f"none of {', '.join(only)} belongs to suite {suite!r}")
    return out


def tolerance_for(entry: dict, cfg: SuiteConfig) -> float | None:
    if entry["id"] in cfg.tolerances:
        return float(cfg.tolerances[entry["id"]])
    tol = entry.get("tolerance")
    if tol is None:
        return None
    return tol * cfg.N if entry.get("scale") == "N" else tol


def run_check(entry: dict, ctx: Context) -> dict[str, Any]:
    tier = Tier(entry["tier"])
    tol = tolerance_for(entry, ctx.cfg)
    fn = CHECKS[entry["id"]]
    extra = {}
    if "fallback_decrease" in entry:
        extra["decrease"] = entry["fallback_decrease"]
    try:
        r = fn(ctx, tol, **extra)
    except Exception as exc:  # a diagnostic that errors out fails the suite
        return {"id": entry["id"], "paper_eq": entry["paper_eq"], "tier": tier.value,
                "residual": None, "tolerance": _clean(tol), "status": "fail",
                "error": f"{type(exc).__name__}: {exc}"}
    if r.tolerance is not None:
        tol = r.tolerance
    residual = _clean(r.residual)
    if tier is Tier.REPORT_ONLY:
        status = "report"
    elif residual is None:
        status = "fail"
    elif r.ok is not None:
        status = "pass" if r.ok else "fail"
    else:
        status = "pass" if tol is not None and residual <= tol else "fail"
    out = {"id": entry["id"], "paper_eq": entry["paper_eq"], "tier": tier.value,
           "residual": residual, "tolerance": _clean(tol), "status": status}
    if r.components:
        out["components"] = _clean(r.components)
    if r.table:
        out["table"] = _clean(list(r.table))
    return out


def run_suite(cfg: SuiteConfig, only: Sequence[str] | None = None) -> SuiteReport:
    cfg.validate()
    ctx = Context(cfg)
    checks = tuple(run_check(e, ctx) for e in selected(cfg.suite, only))
    return SuiteReport(REPORT_VERSION, _clean(cfg.params()), checks)


# --- sweeps -------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepResult:
    axis: str
    values: tuple[float, ...]
    reports: tuple[SuiteReport, ...]
    trend: tuple[dict[str, Any], ...]

    def exit_code(self) -> int:
        return max(r.exit_code() for r in self.reports)

    def trend_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["value", "check_id", "residual", "order"])
        for row in self.trend:
            w.writerow([repr(row["value"]), row["check_id"], _num(row["residual"]), _num(row["order"])])
        return buf.getvalue()

    def to_json(self) -> str:
        d = {"version": REPORT_VERSION, "axis": self.axis, "values": list(self.values),
             "trend": list(self.trend), "reports": [r.to_dict() for r in self.reports]}
        return json.dumps(d, indent=2) + "\n"

    def render(self, fmt: str) -> str:
        return self.to_json() if fmt == "json" else self.trend_csv()


def sweep(cfg: SuiteConfig, axis: str, values: Sequence[float],
          only: Sequence[str] | None = None) -> SweepResult:
    """One report per value plus a ``value, check_id, residual, order`` trend table.

    ``order`` is the empirical order between consecutive values, filled for
    convergent-tier checks only: ``p`` in ``N^-p`` along ``dim`` and in
    ``omega^p`` along ``omega``.  Along ``dim`` the window is held fixed at
    its value for the smallest dimension.
    """
    if axis not in ("dim", "omega"):
        raise ConfigError(f"axis must be 'dim' or 'omega', got {axis!r}")
    values = [float(v) for v in values]
    if len(values) < 2:
        raise ConfigError("a sweep needs at least two values")
    inc = all(b > a for a, b in zip(values, values[1:]))
    dec = all(b < a for a, b in zip(values, values[1:]))
    if not (inc or dec):
        raise ConfigError("sweep values must be strictly monotone")
    if axis == "dim":
        if any(v != int(v) for v in values):
            raise ConfigError("dimension values must be integers")
        M = cfg.window if cfg.window is not None else min(16, int(min(values)) // 4)
        cfgs = [replace(cfg, N=int(v), window=M) for v in values]
    else:
        cfgs = [replace(cfg, omega=v) for v in values]
    reports = tuple(run_suite(c, only) for c in cfgs)
    trend = []
    tiers = {c["id"]: c["tier"] for c in load_catalog()}
    ids = [c["id"] for c in reports[0].checks]
    for cid in ids:
        res = [next(c for c in r.checks if c["id"] == cid)["residual"] for r in reports]
        orders: list = [None] * len(values)
        if tiers[cid] == Tier.CONVERGENT.value and all(x is not None for x in res):
            est = convergence_orders if axis == "dim" else empirical_orders
            orders = [None] + est(values, res)
        for v, x, o in zip(values, res, orders):
            trend.append({"value": v, "check_id": cid, "residual": x, "order": _clean(o)})
    return SweepResult(axis, tuple(values), reports, tuple(trend))


# --- export ---------------------------------------------------------------------------

EXPORTS = ("K3", "Kplus", "Kminus", "H", "D", "K", "T_min", "T_omega", "Q", "T_h", "T_CS",
           "S", "U", "U1", "x", "p")
_NEEDS_OMEGA = ("T_omega", "T_h", "T_CS")
_FREE_ONLY = ("Q", "T_h")


def export_operator(op: str, cfg: SuiteConfig):
    """Build the named operator for ``cfg``; raises :class:`ConfigError` on bad input."""
    if op not in EXPORTS:
        raise ConfigError(f"unknown operator {op!r}; choose from {', '.join(EXPORTS)}")
    if (cfg.k is None) == (cfg.g is None):
        raise ConfigError("give exactly one of k and g")
    if int(cfg.N) != cfg.N or cfg.N < 4:
        raise ConfigError(f"N must be an integer >= 4, got {cfg.N}")
    if op in _NEEDS_OMEGA and cfg.omega is None:
        raise ConfigError(f"operator {op} needs an explicit omega")
    k = cfg.k_value
    if op in _FREE_ONLY and k != tops.K_FREE:
        raise ConfigError(f"operator {op} lives in the k = 3/4 sector, got k={k}")
    s = cfg.sector()
    g = s.generators
    t = conformal_triple(s)
    if op in ("K3", "Kplus", "Kminus"):
        return getattr(g, op)
    if op in ("H", "D", "K"):
        return getattr(t, op)
    if op == "T_min":
        return tops.t_minimal(t).matrix
    if op == "T_omega":
        if not 0 < cfg.omega < 1:
            raise ConfigError(f"T_omega needs omega in (0, 1), got {cfg.omega}")
        return tops.t_omega(t, cfg.omega).matrix
    if op == "Q":
        return tops.q_operator(s).matrix
    if op == "T_h":
        return tops.t_harmonic(s, cfg.omega).matrix
    if op == "T_CS":
        return itw.t_cs(k, tops.K_FREE, cfg.omega, cfg.N).matrix
    if op == "S":
        return itw.overlap_matrix(tops.K_FREE, k, cfg.N).S
    if op == "U":
        return itw.unitary_U(k, tops.K_FREE, cfg.N).matrix
    if op == "U1":
        return itw.intertwiner_U1(k, tops.K_FREE, cfg.N).matrix
    if cfg.N % 2:
        raise ConfigError("x and p need an even N")
    f = itw.fock_line(cfg.N)
    return f.x if op == "x" else f.p
