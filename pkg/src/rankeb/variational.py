"""Gradients of the lift and a certified lower bound on the slope of ``f``.

Every limiting subgradient of ``f`` at ``X`` has the form
``grad_X g(X, U)`` for some minimizing frame ``U``, so

    m_f(X) = dist(0, subdiff f(X)) >= min_U ||2 X U U^T + A^*(A(X) - b)||.

Away from ties at the rank boundary the minimizing projector ``U U^T`` is
unique and the bound is the gradient norm of ``f``. At ties the minimum over
the tied subspace is searched by sampling plus planar rotations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import make_rng
from .residual import _check_frame_shape, _frames

GAP_CLOSED_FORM = "gap-closed-form"
DEGENERATE_SAMPLED = "degenerate-sampled"


@dataclass
class SlopeReport:
    slope_lb: float
    attaining_frame: np.ndarray
    method: str
    samples_used: int
    degenerate: bool

    def to_dict(self):
        return {
            "slope_lb": self.slope_lb,
            "attaining_frame": {
                "rows": self.attaining_frame.shape[0],
                "cols": self.attaining_frame.shape[1],
                "entries": self.attaining_frame.ravel().tolist(),
            },
            "method": self.method,
            "samples_used": self.samples_used,
            "degenerate": self.degenerate,
        }


def _grad_x(inst, X, V):
    G = 2.0 * (X @ V) @ V.T
    if inst.l:
        G = G + inst._adjoint(inst._affine_residual(X))
    return G


def grad_g_X(inst, X, V):
    """Gradient of ``g`` in ``X``: ``2 X V V^T + A^*(A(X) - b)`` (user orientation)."""
    Xi = inst.internal(X)
    return inst.external(_grad_x(inst, Xi, _check_frame_shape(inst, V)))


def grad_g_V(inst, X, V):
    """Gradient of ``g`` in ``V``: ``2 X^T X V`` (internal orientation, like ``V``)."""
    Xi = inst.internal(X)
    V = _check_frame_shape(inst, V)
    return 2.0 * Xi.T @ (Xi @ V)


def multiplier_Y(X, V, tol=1e-6):
    """Lagrange multiplier ``Y = (X V)^T (X V)`` of a minimizing frame.

    Raises ``ValueError`` when ``V`` is not stationary, i.e. when
    ``||X^T X V - V Y|| > tol * (1 + ||X||^2)``.
    """
    X = np.asarray(X, dtype=float)
    V = np.asarray(V, dtype=float)
    if V.ndim == 1:
        V = V.reshape(-1, 1)
    XV = X @ V
    Y = XV.T @ XV
    stat = np.linalg.norm(X.T @ XV - V @ Y)
    if stat > tol * (1.0 + np.linalg.norm(X) ** 2):
        raise ValueError(f"frame is not a minimizer: stationarity residual {stat:.3e}")
    return Y


def _frame_pool(fam, r):
    """Split the right singular vectors into the forced part and the tied block."""
    n = fam.right_vectors.shape[0]
    start, stop = fam.cluster
    below = fam.right_vectors[:, stop:]
    tied = fam.right_vectors[:, start:stop]
    k = (n - r) - (n - stop)
    return below, tied, k


def _refine(inst, X, below, tied, W, Wc, n_angles=16):
    """One pass of planar rotations mixing frame columns with their complement."""

    def value(W_):
        return np.linalg.norm(_grad_x(inst, X, np.hstack([below, tied @ W_])))

    angles = np.linspace(-np.pi / 2, np.pi / 2, n_angles + 1)[1:]
    best = value(W)
    for a in range(W.shape[1]):
        for c in range(Wc.shape[1]):
            w, wc = W[:, a].copy(), Wc[:, c].copy()
            best_th = None
            for th in angles:
                W_ = W.copy()
                W_[:, a] = np.cos(th) * w + np.sin(th) * wc
                val = value(W_)
                if val < best:
                    best, best_th = val, th
            if best_th is not None:
                W = W.copy()
                Wc = Wc.copy()
                W[:, a] = np.cos(best_th) * w + np.sin(best_th) * wc
                Wc[:, c] = -np.sin(best_th) * w + np.cos(best_th) * wc
    return best, np.hstack([below, tied @ W])


def _slope(inst, X, gap_tol=1e-8, degen_samples=256, seed=0):
    fam = _frames(inst, X, gap_tol)
    r = inst.r
    if not fam.degenerate:
        V = fam.base_frame
        return SlopeReport(float(np.linalg.norm(_grad_x(inst, X, V))), V, GAP_CLOSED_FORM, 0, False)
    if degen_samples < 1:
        raise ValueError("degen_samples must be >= 1")
    below, tied, k = _frame_pool(fam, r)
    c = tied.shape[1]
    keys = seed if isinstance(seed, (tuple, list)) else (seed,)
    rng = make_rng(*keys)
    best_val, best_W = np.inf, None
    # the SVD's own choice is always among the candidates
    candidates = [np.eye(c)[:, c - k:]]
    for _ in range(degen_samples - 1):
        Q, R = np.linalg.qr(rng.standard_normal((c, c)))
        candidates.append((Q * np.sign(np.diag(R)))[:, :k])
    for W in candidates:
        U = np.hstack([below, tied @ W])
        val = np.linalg.norm(_grad_x(inst, X, U))
        if val < best_val:
            best_val, best_W = val, W
    # orthonormal complement of best_W inside the tied block
    Qfull, _ = np.linalg.qr(np.hstack([best_W, rng.standard_normal((c, c - k))]))
    Wc = Qfull[:, k:]
    val, U = _refine(inst, X, below, tied, best_W, Wc)
    if val > best_val:
        val, U = best_val, np.hstack([below, tied @ best_W])
    return SlopeReport(float(val), U, DEGENERATE_SAMPLED, len(candidates), True)


def slope_mf(inst, X, gap_tol=1e-8, degen_samples=256, seed=0):
    """Certified lower bound on the slope ``m_f(X)``.

    Parameters
    ----------
    inst : Instance
    X : array_like
        Point in the user's orientation.
    gap_tol : float
        Relative boundary gap below which ``X`` is treated as degenerate.
    degen_samples : int
        Number of candidate frames drawn inside the tied subspace.
    seed : int or tuple of int
        Keys for the sampling stream, e.g. ``(master_seed, point_index)``.

    Returns
    -------
    SlopeReport
        ``attaining_frame`` is in the internal orientation.
    """
    return _slope(inst, inst.internal(X), gap_tol, degen_samples, seed)
