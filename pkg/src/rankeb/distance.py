"""Projections and an alternating-projections estimate of ``dist(X, S)``.

The estimate is an upper bound: it is the distance from ``X`` to a point
that certifies (approximate) feasibility, namely an affine-side iterate with
``f <= feas_tol``. It is exact in two cases, no affine constraint (truncated
SVD) and a fully observed mask (S is a single point).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._rng import make_rng
from .residual import _residual, _svd

PERTURBATION_SCALES = tuple(10.0**-k for k in range(7))


@dataclass
class DistReport:
    dist_estimate: float
    best_point: np.ndarray
    restarts: int
    iterations_best: int
    feasibility_residual: float
    converged: bool
    map_rank_deficient: bool = False
    per_restart: list = field(default_factory=list, repr=False)

    def to_dict(self):
        return {
            "dist_estimate": self.dist_estimate,
            "best_point": {
                "m": self.best_point.shape[0],
                "n": self.best_point.shape[1],
                "entries": self.best_point.ravel().tolist(),
            },
            "restarts": self.restarts,
            "iterations_best": self.iterations_best,
            "feasibility_residual": self.feasibility_residual,
            "converged": self.converged,
            "map_rank_deficient": self.map_rank_deficient,
        }


def _project_affine(inst, X):
    if inst.l == 0:
        return X.copy()
    if inst.kind == "mask":
        Y = X.copy()
        Y[inst.indices[:, 0], inst.indices[:, 1]] = inst.b
        return Y
    pinv, _ = inst._gram_pinv
    return X - inst._adjoint(pinv @ inst._affine_residual(X))


def _project_rank(X, r):
    U, s, Vt = _svd(X)
    return (U[:, :r] * s[:r]) @ Vt[:r]


def project_affine(inst, X):
    """Metric projection onto ``{X : A(X) = b}``.

    Dense maps use ``X - A^*(A A^*)^+ (A(X) - b)`` with the pseudo-inverse
    truncated at relative 1e-12 (see ``inst.map_rank_deficient``); masks
    simply overwrite the observed entries.
    """
    return inst.external(_project_affine(inst, inst.internal(X)))


def project_rank(X, r):
    """Nearest matrix of rank at most ``r`` (truncated SVD).

    Ties at the cut are broken by the SVD routine's ordering.
    """
    X = np.asarray(X, dtype=float)
    if not 0 <= r <= min(X.shape):
        raise ValueError(f"rank bound r={r} outside [0, {min(X.shape)}]")
    return _project_rank(X, r)


def _alternating(inst, Y, max_iter, step_tol):
    """Run ``Y <- P_rank(P_affine(Y))``; return the last affine iterate."""
    r = inst.r
    Z = _project_affine(inst, Y)
    for it in range(1, max_iter + 1):
        Y_new = _project_rank(Z, r)
        Z = _project_affine(inst, Y_new)
        step = np.linalg.norm(Y_new - Y)
        Y = Y_new
        if step <= step_tol * (1.0 + np.linalg.norm(Y)):
            return Z, it, True
    return Z, max_iter, False


def _starts(X, restarts, seed, witness):
    norm = max(np.linalg.norm(X), 1.0)
    starts = [X]
    if witness is not None:
        starts.append(witness)
    k = 0
    while len(starts) < restarts:
        rng = make_rng(seed, k)
        G = rng.standard_normal(X.shape)
        scale = PERTURBATION_SCALES[k % len(PERTURBATION_SCALES)] * norm
        starts.append(X + scale * G / np.linalg.norm(G))
        k += 1
    return starts[:max(restarts, 1)]


def dist_estimate(inst, X, witness=None, restarts=20, max_iter=5000, feas_tol=1e-16,
                  step_tol=1e-12, seed=0):
    """Estimate ``dist(X, S)`` from above by multistart alternating projections.

    Starts are ``X`` itself, the planted witness when given, and Gaussian
    perturbations of ``X`` whose relative size cycles through
    ``1, 1e-1, ..., 1e-6``. Start ``k`` draws from the stream ``(seed, k)`` so
    a run with more restarts extends a run with fewer.

    Parameters
    ----------
    inst : Instance
    X : array_like
        Query point, user orientation.
    witness : array_like or PlantedWitness, optional
        A known feasible point used as an extra start.

    Returns
    -------
    DistReport
        ``best_point`` is in the user's orientation.
    """
    Xi = inst.internal(X)
    if inst.l == 0:
        P = _project_rank(Xi, inst.r)
        rep = _residual(inst, Xi)
        return DistReport(float(np.sqrt(rep.tail_sq_sum)), inst.external(P), 0, 0,
                          _residual(inst, P).f_value, True)
    W = None
    if witness is not None:
        W = inst.internal(getattr(witness, "X_star", witness))
    best = None
    per_restart = []
    for Y0 in _starts(Xi, restarts, seed, W):
        Z, its, conv = _alternating(inst, Y0, max_iter, step_tol)
        fz = _residual(inst, Z).f_value
        d = float(np.linalg.norm(Xi - Z))
        ok = conv and fz <= feas_tol
        per_restart.append((d, its, fz, ok))
        # certified candidates beat uncertified ones
        key = (not ok, d if ok else fz)
        if best is None or key < best[0]:
            best = (key, d, Z, its, fz, ok)
    _, d, Z, its, fz, ok = best
    return DistReport(d, inst.external(Z), len(per_restart), its, fz, ok,
                      inst.map_rank_deficient, per_restart)
