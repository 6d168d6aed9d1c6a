"""The residual ``f``, its Stiefel lift ``g`` and the minimizing frames.

For ``X`` in R^{m x n} (``m >= n``) with descending singular values
``s_1 >= ... >= s_n``::

    f(X)    = sum_{i > r} s_i^2 + 0.5 * ||A(X) - b||^2
    g(X, V) = ||X V||_F^2 + 0.5 * ||A(X) - b||^2,   V in R^{n x (n-r)}

The minimum of ``g(X, .)`` over orthonormal frames equals ``f(X)`` and is
attained exactly at the right singular frames of the ``n - r`` smallest
singular values.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np


@dataclass
class ResidualReport:
    f_value: float
    tail_sq_sum: float
    affine_sq_norm: float
    singular_values: np.ndarray

    def to_dict(self):
        d = asdict(self)
        d["singular_values"] = [float(s) for s in self.singular_values]
        return d


@dataclass
class FrameFamily:
    """Description of the argmin set E(X).

    When ``degenerate`` is False every minimizer is ``base_frame @ Q`` with
    ``Q`` orthogonal, so only the projector ``base_frame @ base_frame.T`` is
    meaningful. When True the tied singular subspace makes E(X) larger.
    """

    base_frame: np.ndarray
    boundary_gap: float
    degenerate: bool
    tail_multiplicity: int
    singular_values: np.ndarray
    right_vectors: np.ndarray  # columns are right singular vectors, descending
    cluster: tuple  # (start, stop) of singular values tied with s_{r+1}


def _svd(X, compute_uv=True):
    try:
        return np.linalg.svd(X, full_matrices=False, compute_uv=compute_uv)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"SVD failed for {X.shape} matrix with norm {np.linalg.norm(X):.3e}, "
            f"finite={np.isfinite(X).all()}"
        ) from exc


def _residual(inst, X):
    s = _svd(X, compute_uv=False)
    tail = float(np.sum(s[inst.r:] ** 2))
    res = inst._affine_residual(X)
    aff = float(res @ res)
    return ResidualReport(tail + 0.5 * aff, tail, aff, s)


def residual_f(inst, X):
    """Evaluate ``f(X)`` with its tail and affine parts and the full spectrum."""
    return _residual(inst, inst.internal(X))


def _lift(inst, X, V):
    XV = X @ V
    res = inst._affine_residual(X)
    return float(np.sum(XV * XV) + 0.5 * (res @ res))


def _check_frame_shape(inst, V):
    V = np.asarray(V, dtype=float)
    if V.ndim == 1 and inst.n - inst.r == 1:
        V = V.reshape(-1, 1)
    if V.shape != (inst.n, inst.n - inst.r):
        raise ValueError(f"frame has shape {V.shape}, expected {(inst.n, inst.n - inst.r)}")
    return V


def lift_g(inst, X, V):
    """Evaluate ``g(X, V) = ||X V||^2 + 0.5 ||A(X) - b||^2``.

    ``V`` is an ``n x (n - r)`` matrix in the internal orientation (for a
    transposed instance it acts on ``X.T``). It need not be orthonormal.
    """
    return _lift(inst, inst.internal(X), _check_frame_shape(inst, V))


def _frames(inst, X, gap_tol):
    _, s, Vt = _svd(X)
    n, r = inst.n, inst.r
    V = Vt.T
    scale = max(s[0] if s.size else 0.0, 1.0)
    if r == 0 or r == n:
        gap = np.inf
        degenerate = False
    else:
        gap = float(s[r - 1] - s[r])
        degenerate = gap / scale <= gap_tol
    if r < n:
        tied = np.abs(s - s[r]) <= gap_tol * scale
        multiplicity = int(tied.sum())
        idx = np.flatnonzero(tied)
        cluster = (int(idx[0]), int(idx[-1]) + 1)
    else:
        multiplicity = 0
        cluster = (n, n)
    return FrameFamily(V[:, r:].copy(), gap, bool(degenerate), multiplicity, s, V, cluster)


def argmin_frames(inst, X, gap_tol=1e-8):
    """Return the frame family E(X) for a user-oriented point ``X``.

    ``degenerate`` is set when ``(s_r - s_{r+1}) / max(s_1, 1) <= gap_tol``.
    The gap is ``inf`` when ``r = 0`` or ``r = n`` since there is no boundary.
    """
    if not 0 < gap_tol < 1:
        raise ValueError("gap_tol must lie in (0, 1)")
    return _frames(inst, inst.internal(X), gap_tol)


def is_stiefel(V, tol=1e-10):
    V = np.asarray(V, dtype=float)
    if V.ndim == 1:
        V = V.reshape(-1, 1)
    return bool(np.linalg.norm(V.T @ V - np.eye(V.shape[1])) <= tol)
