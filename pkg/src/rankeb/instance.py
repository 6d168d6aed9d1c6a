"""Problem instances for the rank-constrained affine feasibility set.

An instance describes

    S = {X in R^{m x n} : A(X) = b, rank(X) <= r}

where the linear map ``A`` is either a dense ``l x (m*n)`` matrix acting on the
column-major vectorization of ``X`` or an entry mask (matrix completion).

Internally every instance is stored with ``m >= n``. A user instance with more
columns than rows is transposed once at construction; ``Instance.internal`` and
``Instance.external`` convert points between the two orientations, and every
public function in the package accepts and returns points in the user's
orientation.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from ._rng import RNG_NAME, make_rng

SPEC_VERSION = "1"


@dataclass(frozen=True, eq=False)
class Instance:
    """Immutable problem data, always stored with ``m >= n``.

    Attributes
    ----------
    m, n : int
        Internal (normalized) dimensions, ``m >= n``.
    r : int
        Rank bound, ``0 <= r <= n``.
    kind : {"dense", "mask"}
        Representation of the linear map.
    rows : ndarray, shape (l, m*n)
        Dense map acting on column-major ``vec(X)`` (``None`` for masks).
    indices : ndarray of int, shape (l, 2)
        Zero-based observed entries (``None`` for dense maps).
    b : ndarray, shape (l,)
    transposed : bool
        True when the user supplied an ``n x m`` problem.
    seed : int or None
        Generator seed for planted instances.
    """

    m: int
    n: int
    r: int
    kind: str
    rows: np.ndarray | None
    indices: np.ndarray | None
    b: np.ndarray
    transposed: bool = False
    seed: int | None = None

    # -- construction -------------------------------------------------------

    @classmethod
    def dense(cls, m, n, r, rows, b, seed=None):
        """Build an instance from a dense map on column-major ``vec(X)``.

        ``m, n`` are the user's dimensions; the map is re-indexed when the
        problem has to be transposed.
        """
        m, n, r = _check_dims(m, n, r)
        b = np.array(b, dtype=float).reshape(-1)
        l = b.size
        rows = np.array(rows, dtype=float)
        if rows.size != l * m * n:
            raise ValueError(f"dense map must have shape ({l}, {m * n}), got {rows.shape}")
        rows = rows.reshape(l, m * n)
        transposed = m < n
        if transposed:
            # vec index i + j*m of X  ->  j + i*n of X^T
            rows = rows.reshape(l, n, m).transpose(0, 2, 1).reshape(l, m * n)
            m, n = n, m
        rows = np.ascontiguousarray(rows)
        _check_rank(n, r)
        return cls(m, n, r, "dense", rows, None, b, transposed, seed)

    @classmethod
    def mask(cls, m, n, r, indices, b, seed=None, one_based=False):
        """Build an entry-mask instance; ``indices`` are ``(i, j)`` pairs."""
        m, n, r = _check_dims(m, n, r)
        b = np.array(b, dtype=float).reshape(-1)
        idx = np.array(indices, dtype=np.int64).reshape(-1, 2)
        if one_based:
            idx = idx - 1
        if idx.shape[0] != b.size:
            raise ValueError(f"mask has {idx.shape[0]} entries but b has length {b.size}")
        if idx.size and (idx.min() < 0 or np.any(idx[:, 0] >= m) or np.any(idx[:, 1] >= n)):
            raise ValueError("mask index out of range")
        if len({tuple(p) for p in idx.tolist()}) != idx.shape[0]:
            raise ValueError("mask indices must be distinct")
        transposed = m < n
        if transposed:
            idx = idx[:, ::-1]
            m, n = n, m
        _check_rank(n, r)
        return cls(m, n, r, "mask", None, np.ascontiguousarray(idx), b, transposed, seed)

    # -- shapes and orientation --------------------------------------------

    @property
    def l(self):
        return self.b.size

    @property
    def shape(self):
        """Shape of points in the user's orientation."""
        return (self.n, self.m) if self.transposed else (self.m, self.n)

    def internal(self, X):
        """Validate a user-oriented point and return it as an ``m x n`` array."""
        X = np.asarray(X, dtype=float)
        if X.shape != self.shape:
            raise ValueError(f"point has shape {X.shape}, expected {self.shape}")
        return X.T if self.transposed else X

    def external(self, X):
        """Map an internal ``m x n`` matrix back to the user's orientation."""
        return X.T if self.transposed else X

    # -- the linear map -----------------------------------------------------

    def _map(self, X):
        if self.l == 0:
            return np.zeros(0)
        if self.kind == "dense":
            return self.rows @ X.ravel(order="F")
        return X[self.indices[:, 0], self.indices[:, 1]].copy()

    def _adjoint(self, y):
        if self.kind == "dense" and self.l:
            return (self.rows.T @ y).reshape((self.m, self.n), order="F")
        Z = np.zeros((self.m, self.n))
        if self.l:
            Z[self.indices[:, 0], self.indices[:, 1]] = y
        return Z

    def _affine_residual(self, X):
        return self._map(X) - self.b

    @cached_property
    def _gram_pinv(self):
        # (A A^*)^+ for dense maps, truncated at relative 1e-12
        G = self.rows @ self.rows.T
        w, Q = np.linalg.eigh(G)
        keep = w > 1e-12 * max(w.max(initial=0.0), np.finfo(float).tiny)
        inv = np.zeros_like(w)
        inv[keep] = 1.0 / w[keep]
        return (Q * inv) @ Q.T, int(keep.sum())

    @property
    def map_rank(self):
        if self.kind == "mask":
            return self.l
        return self._gram_pinv[1] if self.l else 0

    @property
    def map_rank_deficient(self):
        return self.map_rank < self.l

    # -- serialization ------------------------------------------------------

    def to_dict(self):
        if self.kind == "dense":
            amap = {"type": "dense", "rows": self.rows.tolist()}
        else:
            amap = {"type": "mask", "indices": (self.indices + 1).tolist()}
        return {
            "m": self.m,
            "n": self.n,
            "r": self.r,
            "map": amap,
            "b": self.b.tolist(),
            "transposed": bool(self.transposed),
            "seed": self.seed,
            "spec_version": SPEC_VERSION,
        }

    @classmethod
    def from_dict(cls, d):
        """Inverse of :meth:`to_dict`; dimensions in ``d`` are internal."""
        m, n, r = int(d["m"]), int(d["n"]), int(d["r"])
        b = np.array(d["b"], dtype=float).reshape(-1)
        transposed = bool(d.get("transposed", False))
        seed = d.get("seed")
        amap = d["map"]
        if m < n:
            raise ValueError("stored instances must have m >= n")
        if amap["type"] == "dense":
            rows = np.array(amap["rows"], dtype=float).reshape(b.size, m * n)
            inst = cls(m, n, r, "dense", rows, None, b, transposed, seed)
        elif amap["type"] == "mask":
            inst = cls.mask(m, n, r, amap["indices"], b, seed=seed, one_based=True)
            inst = replace(inst, transposed=transposed)
        else:
            raise ValueError(f"unknown map type {amap['type']!r}")
        _check_rank(n, r)
        return inst

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(fh.read())

    @cached_property
    def hash(self):
        """Short sha256 of the canonical JSON encoding."""
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return self.to_json() == other.to_json()

    __hash__ = object.__hash__


@dataclass(frozen=True)
class PlantedWitness:
    """A known feasible point ``X_star = G @ H`` (user orientation)."""

    X_star: np.ndarray
    factor_norms: tuple


def _check_dims(m, n, r):
    m, n, r = int(m), int(n), int(r)
    if m < 1 or n < 1:
        raise ValueError(f"dimensions must be positive, got m={m}, n={n}")
    if not 0 <= r <= min(m, n):
        raise ValueError(f"rank bound r={r} outside [0, {min(m, n)}]")
    return m, n, r


def _check_rank(n, r):
    if not 0 <= r <= n:
        raise ValueError(f"rank bound r={r} outside [0, {n}]")


def apply_map(inst, X):
    """Evaluate ``A(X)``; ``X`` is in the user's orientation."""
    return inst._map(inst.internal(X))


def apply_adjoint(inst, y):
    """Evaluate ``A^*(y)`` as a matrix in the user's orientation."""
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.size != inst.l:
        raise ValueError(f"vector has length {y.size}, expected {inst.l}")
    return inst.external(inst._adjoint(y))


def generate_planted(m, n, r, map_kind="dense", l_or_density=0, seed=0):
    """Random instance with a planted rank-``r`` solution.

    ``X_star = G @ H`` with standard normal factors ``G`` (m x r) and
    ``H`` (r x n). A dense map has ``l = l_or_density`` standard normal rows
    scaled by ``1/sqrt(l)``; a mask observes each entry independently with
    probability ``density = l_or_density``. Then ``b = A(X_star)``.

    Returns
    -------
    inst : Instance
    witness : PlantedWitness
    """
    m, n, r = _check_dims(m, n, r)
    rng = make_rng(seed)
    G = rng.standard_normal((m, r))
    H = rng.standard_normal((r, n))
    X_star = G @ H
    if map_kind == "dense":
        l = int(l_or_density)
        if l < 0:
            raise ValueError("number of measurements must be >= 0")
        rows = rng.standard_normal((l, m * n)) / np.sqrt(l) if l else np.zeros((0, m * n))
        b = rows @ X_star.ravel(order="F") if l else np.zeros(0)
        inst = Instance.dense(m, n, r, rows, b, seed=seed)
    elif map_kind == "mask":
        density = float(l_or_density)
        if not 0.0 < density <= 1.0:
            raise ValueError(f"density must lie in (0, 1], got {density}")
        keep = rng.random((m, n)) < density
        idx = np.argwhere(keep)  # row-major order
        if idx.shape[0] == 0:
            raise ValueError(f"density {density} produced an empty mask for {m}x{n}")
        b = X_star[idx[:, 0], idx[:, 1]]
        inst = Instance.mask(m, n, r, idx, b, seed=seed)
    else:
        raise ValueError(f"unknown map kind {map_kind!r}")
    witness = PlantedWitness(X_star, (float(np.linalg.norm(G)), float(np.linalg.norm(H))))
    return inst, witness


def load_point(path):
    """Read a point file ``{"m", "n", "entries": [row-major floats]}``."""
    with open(path) as fh:
        d = json.load(fh)
    return np.array(d["entries"], dtype=float).reshape(int(d["m"]), int(d["n"]))


def save_point(path, X):
    X = np.asarray(X, dtype=float)
    with open(path, "w") as fh:
        json.dump({"m": X.shape[0], "n": X.shape[1], "entries": X.ravel().tolist()}, fh)


def metadata(inst, cfg=None):
    """Provenance block embedded in every report."""
    return {
        "spec_version": SPEC_VERSION,
        "instance_hash": inst.hash,
        "rng": RNG_NAME,
        "cfg": cfg or {},
    }
