"""Sweeps, log-log fits and probes for the error-bound and slope exponents.

A local sweep walks the ray ``X_t = X_star + t D`` from a feasible point along
a random unit direction and records ``f``, the slope lower bound and the
distance estimate at log-spaced ``t``. Generic rays give ``f ~ t^2`` and
``dist ~ m_f ~ t``, so the fitted exponents come out near 0.5. The
theoretical exponent ``tau`` is far smaller, which makes the theoretical
checks true but nearly vacuous at double precision; both are reported.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from joblib import Parallel, delayed

from ._rng import make_rng
from .distance import dist_estimate
from .exponent import LogScalar
from .instance import metadata
from .residual import _frames, _residual
from .variational import _slope

COLUMNS = ("t", "f", "tail", "affine_sq", "dist", "dist_converged", "m_f", "degenerate", "seed")
NOISE_FLOOR = 1e-18
WITNESS_TOL = 1e-16


@dataclass
class SweepTable:
    """Per-point sweep measurements; one array per column in ``COLUMNS``."""

    columns: dict
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.columns["t"])

    def __getitem__(self, name):
        return self.columns[name]

    @classmethod
    def from_columns(cls, metadata=None, **cols):
        """Build a table from partial columns (missing ones are filled with defaults)."""
        size = len(next(iter(cols.values())))
        full = {}
        for name in COLUMNS:
            if name in cols:
                full[name] = np.asarray(cols[name])
            elif name in ("dist_converged",):
                full[name] = np.ones(size, dtype=bool)
            elif name in ("degenerate",):
                full[name] = np.zeros(size, dtype=bool)
            elif name == "seed":
                full[name] = np.zeros(size, dtype=np.int64)
            else:
                full[name] = np.full(size, np.nan)
        return cls(full, metadata or {})

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for i in range(len(self)):
            writer.writerow([_fmt(self.columns[c][i]) for c in COLUMNS])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, metadata=None):
        reader = csv.DictReader(io.StringIO(text))
        rows = list(reader)
        cols = {}
        for c in COLUMNS:
            vals = [row[c] for row in rows]
            if c in ("dist_converged", "degenerate"):
                cols[c] = np.array([v == "1" for v in vals], dtype=bool)
            elif c == "seed":
                cols[c] = np.array([int(v) for v in vals], dtype=np.int64)
            else:
                cols[c] = np.array([float(v) for v in vals])
        return cls(cols, metadata or {})

    def to_dict(self):
        return {
            "metadata": self.metadata,
            "rows": [{c: _py(self.columns[c][i]) for c in COLUMNS} for i in range(len(self))],
        }

    @classmethod
    def from_dict(cls, d):
        rows = d["rows"]
        cols = {c: np.array([row[c] for row in rows]) for c in COLUMNS}
        return cls(cols, d.get("metadata", {}))


def _py(v):
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    return float(v)


def _fmt(v):
    if isinstance(v, (np.bool_, bool)):
        return "1" if v else "0"
    if isinstance(v, (np.integer, int)):
        return str(int(v))
    return repr(float(v))


def _derived_seed(*keys):
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1, np.uint64)[0])


def unit_direction(shape, seed, index=0):
    """Unit-Frobenius Gaussian direction drawn from the stream ``(seed, 1, index)``."""
    D = make_rng(seed, 1, index).standard_normal(shape)
    return D / np.linalg.norm(D)


def _sweep_row(inst, witness, X, t, i, seed, direction, dist_cfg, slope_cfg):
    Xi = inst.internal(X)
    rep = _residual(inst, Xi)
    sl = _slope(inst, Xi, slope_cfg["gap_tol"], slope_cfg["degen_samples"], (seed, 3, direction, i))
    dr = dist_estimate(inst, X, witness=witness, seed=_derived_seed(seed, 2, direction, i), **dist_cfg)
    return {
        "t": float(t),
        "f": rep.f_value,
        "tail": rep.tail_sq_sum,
        "affine_sq": rep.affine_sq_norm,
        "dist": dr.dist_estimate,
        "dist_converged": bool(dr.converged),
        "m_f": sl.slope_lb,
        "degenerate": bool(sl.degenerate),
        "seed": int(seed),
    }


def sweep_local(inst, witness, t_min=1e-6, t_max=1e-1, points=30, seed=0, direction=0,
                restarts=20, max_iter=5000, feas_tol=1e-16, gap_tol=1e-8, degen_samples=256,
                n_jobs=1):
    """Measure ``f``, ``m_f`` and ``dist`` along a ray from a feasible point.

    Parameters
    ----------
    inst : Instance
    witness : array_like or PlantedWitness
        Feasible base point (``f <= 1e-16``).
    t_min, t_max, points :
        Log-spaced grid of step sizes, strictly positive and increasing.
    seed : int
        Master seed; the direction and every per-row stream derive from it.
    direction : int
        Index of the ray, so several independent rays share one seed.
    n_jobs : int
        Rows are evaluated in parallel with joblib when ``n_jobs != 1``.
        Output does not depend on it.

    Returns
    -------
    SweepTable
    """
    X0 = np.asarray(getattr(witness, "X_star", witness), dtype=float)
    f0 = _residual(inst, inst.internal(X0)).f_value
    if f0 > WITNESS_TOL:
        raise ValueError(f"witness is not feasible: f = {f0:.3e}")
    if not 0 < t_min < t_max or points < 2:
        raise ValueError("need 0 < t_min < t_max and at least 2 grid points")
    ts = np.logspace(np.log10(t_min), np.log10(t_max), points)
    D = unit_direction(X0.shape, seed, direction)
    dist_cfg = {"restarts": restarts, "max_iter": max_iter, "feas_tol": feas_tol}
    slope_cfg = {"gap_tol": gap_tol, "degen_samples": degen_samples}
    jobs = (delayed(_sweep_row)(inst, X0, X0 + t * D, t, i, seed, direction, dist_cfg, slope_cfg)
            for i, t in enumerate(ts))
    if n_jobs == 1:
        rows = [fn(*a, **kw) for fn, a, kw in jobs]
    else:
        rows = Parallel(n_jobs=n_jobs)(jobs)
    cols = {c: np.array([row[c] for row in rows]) for c in COLUMNS}
    f = cols["f"]
    meta = metadata(inst, {
        "t_min": t_min, "t_max": t_max, "points": points, "seed": seed, "direction": direction,
        **dist_cfg, **slope_cfg,
    })
    meta.update({
        "direction_seed": [int(seed), 1, int(direction)],
        "non_monotone_rows": int(np.sum(np.diff(f) < 0)),
        "unconverged_rows": int(np.sum(~cols["dist_converged"])),
        "below_noise_floor": int(np.sum(f < NOISE_FLOOR)),
    })
    return SweepTable(cols, meta)


def sweep_rays(inst, witness, directions=1, **kwargs):
    """Independent rays ``direction = 0 .. directions-1`` with a shared seed."""
    return [sweep_local(inst, witness, direction=k, **kwargs) for k in range(directions)]


# -- fitting ---------------------------------------------------------------


@dataclass
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    n_points: int
    x_column: str
    y_column: str
    min_ratio_constant: float
    exponent: float = math.nan

    def to_dict(self):
        return asdict(self)


def _power(x, exponent):
    # x**exponent through logs so exponents below 1e-300 stay meaningful
    return np.power(10.0, exponent * np.log10(x))


def fit_power_law(x, y, exponent=None, x_column="x", y_column="y"):
    """Least squares fit of ``log10 y = slope * log10 x + intercept``.

    ``min_ratio_constant`` is ``min y / x**exponent``; ``exponent`` defaults to
    the fitted slope. ``r_squared`` is reported as 0 when ``y`` is constant.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        raise ValueError(f"need at least 3 usable rows for a fit, got {x.size}")
    lx, ly = np.log10(x), np.log10(y)
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    ss_res = float(np.sum((ly - (slope * lx + intercept)) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 0.0 if ss_tot <= 1e-300 else min(max(1.0 - ss_res / ss_tot, 0.0), 1.0)
    if exponent is None:
        exponent = float(slope)
    ratio = float(np.min(y / _power(x, exponent)))
    return FitResult(float(slope), float(intercept), r2, int(x.size), x_column, y_column,
                     ratio, float(exponent))


def usable_rows(table, x_col, y_col):
    """Rows entering a fit: positive values, above the noise floor, converged distances."""
    x, y = table[x_col], table[y_col]
    ok = (x > 0) & (y > 0) & np.isfinite(x) & np.isfinite(y)
    f = table["f"]
    ok &= ~(f < NOISE_FLOOR)  # NaN f (synthetic tables) passes
    if "dist" in (x_col, y_col):
        ok &= table["dist_converged"].astype(bool)
    return ok


def theoretical_exponent(x_col, y_col, tau):
    """Exponent the theory attaches to an ``(x, y)`` pair, or None."""
    t = tau.linear if isinstance(tau, LogScalar) else tau
    if (x_col, y_col) == ("f", "dist"):
        return t
    if (x_col, y_col) == ("f", "m_f"):
        return 1.0 - t
    return None


def fit_loglog(table, x_col, y_col, tau=None, exponent=None):
    """Fit a log-log line through the usable rows of a sweep table.

    With ``tau`` given, ``min_ratio_constant`` uses the theoretical exponent of
    the pair: ``tau`` for ``(f, dist)`` and ``1 - tau`` for ``(f, m_f)``.
    """
    ok = usable_rows(table, x_col, y_col)
    if exponent is None and tau is not None:
        exponent = theoretical_exponent(x_col, y_col, tau)
    return fit_power_law(table[x_col][ok], table[y_col][ok], exponent, x_col, y_col)


# -- bound checks ------------------------------------------------------------


@dataclass
class BoundsReport:
    tau_log10: float
    eb_slope: float
    kl_slope: float
    eb_r_squared: float
    kl_r_squared: float
    c_eb: float
    c_kl: float
    global_constant: float
    verdicts: dict
    fit_margin: float
    n_tables: int

    @property
    def passed(self):
        return all(self.verdicts.values())

    def to_dict(self):
        d = asdict(self)
        d["passed"] = self.passed
        return d


def check_bounds(tables, tau, fit_margin=0.05):
    """Compare sweep measurements with the theoretical exponents.

    Verdicts
    --------
    eb_slope : fitted slope of log dist vs log f is at least ``tau``.
    kl_slope : fitted slope of log m_f vs log f is at most ``1 - tau + fit_margin``.
    c_eb_positive : ``min f**tau / dist`` over rows is positive.
    c_kl_positive : ``min m_f / f**(1 - tau)`` over rows is positive.

    ``global_constant`` is ``max dist / (f**tau + f)``. Several tables (rays)
    are combined by the median slope and the extreme constants. ``tau`` below
    the smallest double is clamped to it, so ``eb_slope`` then asks for a
    positive slope.
    """
    if not isinstance(tables, (list, tuple)):
        tables = [tables]
    if not isinstance(tau, LogScalar):
        tau = LogScalar(math.log10(tau), float(tau))
    t = tau.clamped()
    t_exact = tau.linear
    eb, kl, c_eb, c_kl, glob = [], [], [], [], []
    for tab in tables:
        fe = fit_loglog(tab, "f", "dist", exponent=t_exact)
        fk = fit_loglog(tab, "f", "m_f", exponent=1.0 - t_exact)
        eb.append(fe)
        kl.append(fk)
        ok = usable_rows(tab, "f", "dist")
        f, d = tab["f"][ok], tab["dist"][ok]
        f_tau = _power(f, t_exact)
        c_eb.append(float(np.min(f_tau / d)))
        glob.append(float(np.max(d / (f_tau + f))))
        ok = usable_rows(tab, "f", "m_f")
        c_kl.append(float(np.min(tab["m_f"][ok] / _power(tab["f"][ok], 1.0 - t_exact))))
    eb_slope = float(np.median([x.slope for x in eb]))
    kl_slope = float(np.median([x.slope for x in kl]))
    verdicts = {
        "eb_slope": eb_slope >= t,
        "kl_slope": kl_slope <= tau.complement + fit_margin,
        "c_eb_positive": min(c_eb) > 0,
        "c_kl_positive": min(c_kl) > 0,
    }
    return BoundsReport(
        tau.log10, eb_slope, kl_slope,
        float(np.median([x.r_squared for x in eb])), float(np.median([x.r_squared for x in kl])),
        min(c_eb), min(c_kl), max(glob), {k: bool(v) for k, v in verdicts.items()},
        fit_margin, len(tables),
    )


# -- probes ------------------------------------------------------------------


@dataclass
class StabilityReport:
    scales: np.ndarray
    h: np.ndarray
    alpha: float
    r_squared: float
    monotone: bool
    degenerate: bool
    mode: str

    def to_dict(self):
        return {
            "scales": self.scales.tolist(), "h": self.h.tolist(), "alpha": self.alpha,
            "r_squared": self.r_squared, "monotone": self.monotone,
            "degenerate": self.degenerate, "mode": self.mode,
        }


def frame_distance(inst, X, X_bar, gap_tol=1e-8):
    """Distance from the minimizing frames of ``X`` to those of ``X_bar``.

    For a non-degenerate ``X_bar`` this is the projector distance
    ``||V V^T - Vb Vb^T||_F``. For a degenerate one, E(X_bar) contains every
    frame inside the span of the tied and lower singular directions, and the
    distance is ``||(I - P) V||_F`` with ``P`` the projector onto that span.
    """
    fb = _frames(inst, inst.internal(X_bar), gap_tol)
    V = _frames(inst, inst.internal(X), gap_tol).base_frame
    if not fb.degenerate:
        Vb = fb.base_frame
        return float(np.linalg.norm(V @ V.T - Vb @ Vb.T))
    span = fb.right_vectors[:, fb.cluster[0]:]
    return float(np.linalg.norm(V - span @ (span.T @ V)))


def probe_stability(inst, X_bar, scales=None, samples=1, seed=0, direction=None, gap_tol=1e-8):
    """Fit a Hoelder exponent for ``X -> E(X)`` around ``X_bar``.

    ``h_k`` is the largest :func:`frame_distance` over ``samples`` unit
    directions at scale ``s_k``; ``alpha`` is the log-log slope of ``h``
    against ``s``. A fixed ``direction`` overrides the random ones.
    """
    X_bar = np.asarray(X_bar, dtype=float)
    scales = np.logspace(-6, -1, 11) if scales is None else np.asarray(scales, dtype=float)
    if direction is not None:
        dirs = [np.asarray(direction, dtype=float) / np.linalg.norm(direction)]
    else:
        dirs = [unit_direction(X_bar.shape, seed, j) for j in range(samples)]
    fb = _frames(inst, inst.internal(X_bar), gap_tol)
    h = np.array([max(frame_distance(inst, X_bar + s * D, X_bar, gap_tol) for D in dirs)
                  for s in scales])
    ok = h > 0
    if ok.sum() >= 3:
        fit = fit_power_law(scales[ok], h[ok])
        alpha, r2 = fit.slope, fit.r_squared
    else:
        alpha, r2 = math.nan, 0.0
    order = np.argsort(scales)
    monotone = bool(np.all(np.diff(h[order]) >= 0))
    mode = "degenerate base point" if fb.degenerate else "projector"
    return StabilityReport(scales, h, float(alpha), float(r2), monotone, fb.degenerate, mode)


@dataclass
class RegularityReport:
    radii: list
    min_slope: list
    falsified_at: float | None
    falsify_tol: float

    @property
    def verdict(self):
        if self.falsified_at is None:
            return "not falsified"
        return f"falsified at radius {self.falsified_at:g}"

    def to_dict(self):
        d = asdict(self)
        d["verdict"] = self.verdict
        return d


def probe_regularity(inst, radii, samples_per_radius=32, seed=0, falsify_tol=1e-6,
                     gap_tol=1e-8, degen_samples=64):
    """Search for points of large norm with small slope.

    At each radius ``R`` the probe evaluates the slope lower bound at Gaussian
    points rescaled to norm ``R`` and at rescaled random rank-``r`` matrices.
    Sampling can only falsify a uniform lower bound, never confirm one.
    """
    radii = [float(R) for R in radii]
    if len(radii) < 2 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be increasing with at least 2 values")
    shape = inst.shape
    mins = []
    falsified_at = None
    for k, R in enumerate(radii):
        rng = make_rng(seed, 4, k)
        pts = []
        for _ in range(samples_per_radius):
            G = rng.standard_normal(shape)
            pts.append(R * G / np.linalg.norm(G))
            if inst.r > 0:
                L = rng.standard_normal((shape[0], inst.r)) @ rng.standard_normal((inst.r, shape[1]))
                pts.append(R * L / np.linalg.norm(L))
        vals = [_slope(inst, inst.internal(P), gap_tol, degen_samples, (seed, 5, k, j)).slope_lb
                for j, P in enumerate(pts)]
        mins.append(float(min(vals)))
        if falsified_at is None and mins[-1] < falsify_tol:
            falsified_at = R
    return RegularityReport(radii, mins, falsified_at, falsify_tol)


def dumps(obj):
    """JSON encoding used by reports (numpy scalars and arrays allowed)."""
    def default(o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, np.generic):
            return o.item()
        raise TypeError(f"not serializable: {type(o)}")
    return json.dumps(obj, default=default, sort_keys=True, indent=2)
