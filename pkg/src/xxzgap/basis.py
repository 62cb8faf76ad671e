"""Sector bases for the finite spin-J chain.

A classical configuration of the chain [1, L] is the tuple of S^3
eigenvalues (m_1, ..., m_L).  All spin quantum numbers are stored as
*doubled* integers (2J, 2M, 2m) so half-integer spins stay exact.  The
Hamiltonian conserves total magnetization, so everything happens inside
the fixed-2M sector spanned by configurations with sum(2m_alpha) = 2M.

Configurations are ordered lexicographically on their doubled values
with site 1 most significant; ranking and unranking walk a memoized
prefix-count table in O(L * two_j) without touching the enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._backend import USING_NUMBA, njit
from .errors import DomainError

__all__ = [
    "SpinParams",
    "SectorBasis",
    "local_values",
    "sector_dimension",
    "enumerate_sector",
]

# int8 configuration storage caps the spin; far beyond desk scale anyway.
MAX_TWO_J = 120


@dataclass(frozen=True)
class SpinParams:
    """Chain parameters: spin (doubled), length, anisotropy.

    delta_inv is the scan parameter Delta^{-1} in [0, 1); delta_inv = 0
    is the Ising limit, handled as a flagged limit case (q = 0, eta
    infinite).
    """

    two_j: int
    length: int
    delta_inv: float

    def __post_init__(self):
        if not isinstance(self.two_j, (int, np.integer)) or self.two_j < 1:
            raise DomainError(f"two_j must be a positive integer, got {self.two_j!r}")
        if self.two_j > MAX_TWO_J:
            raise DomainError(f"two_j={self.two_j} exceeds supported maximum {MAX_TWO_J}")
        if not isinstance(self.length, (int, np.integer)) or self.length < 2:
            raise DomainError(f"length must be an integer >= 2, got {self.length!r}")
        if not (0.0 <= self.delta_inv < 1.0):
            raise DomainError(
                f"delta_inv must lie in [0, 1) (Delta > 1), got {self.delta_inv!r}"
            )

    @property
    def spin(self) -> float:
        return self.two_j / 2.0

    @property
    def is_ising(self) -> bool:
        return self.delta_inv == 0.0

    @property
    def delta(self) -> float:
        return math.inf if self.is_ising else 1.0 / self.delta_inv

    @property
    def q(self) -> float:
        # q = Delta - sqrt(Delta^2 - 1), written to stay stable as
        # delta_inv -> 0 (q ~ delta_inv/2, no cancellation).
        d = self.delta_inv
        return d / (1.0 + math.sqrt((1.0 - d) * (1.0 + d)))

    @property
    def eta(self) -> float:
        return math.inf if self.is_ising else -math.log(self.q)

    @property
    def a_delta(self) -> float:
        """A(Delta) = sqrt(1 - Delta^{-2}), from delta_inv directly
        (never through q, which would cancel catastrophically near
        delta_inv -> 1)."""
        d = self.delta_inv
        return math.sqrt((1.0 - d) * (1.0 + d))


def local_values(two_j: int) -> np.ndarray:
    """Allowed doubled single-site values {-2J, -2J+2, ..., 2J}."""
    return np.arange(-two_j, two_j + 1, 2, dtype=np.int64)


def _validate_sector(two_j, length, two_m):
    if not isinstance(two_j, (int, np.integer)) or two_j < 1:
        raise DomainError(f"two_j must be a positive integer, got {two_j!r}")
    if not isinstance(length, (int, np.integer)) or length < 1:
        raise DomainError(f"length must be a positive integer, got {length!r}")
    if not isinstance(two_m, (int, np.integer)):
        raise DomainError(f"two_m must be an integer, got {two_m!r}")
    if abs(two_m) > two_j * length:
        raise DomainError(
            f"|two_m|={abs(two_m)} exceeds the saturated value two_j*length={two_j * length}"
        )
    if (two_m - two_j * length) % 2 != 0:
        raise DomainError(
            f"parity mismatch: two_m={two_m} must have the parity of two_j*length={two_j * length}"
        )


@lru_cache(maxsize=None)
def _suffix_counts_exact(two_j: int, length: int):
    """counts[k][i] = number of ways to fill k sites with doubled sum s,
    where i = (s + two_j*k)//2 in [0, two_j*k].  Exact Python integers."""
    rows = [[1]]
    for k in range(1, length + 1):
        prev = rows[-1]
        cur = [0] * (two_j * k + 1)
        for i, cnt in enumerate(prev):
            if cnt:
                for step in range(two_j + 1):
                    cur[i + step] += cnt
        rows.append(cur)
    return rows


@lru_cache(maxsize=None)
def _suffix_counts_i64(two_j: int, length: int):
    """Padded int64 array of the same table for the vectorized kernels,
    or None when the counts would overflow int64."""
    rows = _suffix_counts_exact(two_j, length)
    if max(rows[-1]) >= 2 ** 62:
        return None
    out = np.zeros((length + 1, two_j * length + 1), dtype=np.int64)
    for k, row in enumerate(rows):
        out[k, : len(row)] = row
    out.setflags(write=False)
    return out


def sector_dimension(two_j: int, length: int, two_m: int) -> int:
    """Number of configurations in the sector, by DP (no enumeration)."""
    _validate_sector(two_j, length, two_m)
    rows = _suffix_counts_exact(int(two_j), int(length))
    return rows[length][(two_m + two_j * length) // 2]


if USING_NUMBA:

    @njit(cache=True)
    def _rank_kernel(configs, counts, two_j, two_m, out):  # pragma: no cover
        n, L = configs.shape
        for i in range(n):
            rem = two_m
            acc = 0
            for p in range(L):
                k = L - 1 - p
                v = configs[i, p]
                for vp in range(-two_j, v, 2):
                    idx = (rem - vp + two_j * k) // 2
                    if 0 <= idx <= two_j * k:
                        acc += counts[k, idx]
                rem -= v
            out[i] = acc


def _rank_many_numpy(configs, counts, two_j, two_m):
    n, L = configs.shape
    rem = np.full(n, two_m, dtype=np.int64)
    acc = np.zeros(n, dtype=np.int64)
    for p in range(L):
        k = L - 1 - p
        v = configs[:, p].astype(np.int64)
        for vp in range(-two_j, two_j + 1, 2):
            below = vp < v
            if not below.any():
                continue
            idx = (rem - vp + two_j * k) // 2
            valid = below & (idx >= 0) & (idx <= two_j * k)
            if valid.any():
                acc[valid] += counts[k, idx[valid]]
        rem -= v
    return acc


def _rank_many(configs: np.ndarray, two_j: int, length: int, two_m: int) -> np.ndarray:
    """Ranks of many configurations at once (rows of `configs`)."""
    counts = _suffix_counts_i64(two_j, length)
    if counts is None:
        # exact fallback, never hit at desk scale
        rows = _suffix_counts_exact(two_j, length)
        return np.array(
            [_rank_one_exact(c, rows, two_j, length, two_m) for c in configs],
            dtype=object,
        )
    configs = np.ascontiguousarray(configs, dtype=np.int64)
    if USING_NUMBA:
        out = np.empty(configs.shape[0], dtype=np.int64)
        _rank_kernel(configs, counts, two_j, two_m, out)
        return out
    return _rank_many_numpy(configs, counts, two_j, two_m)


def _rank_one_exact(config, rows, two_j, length, two_m):
    rem = two_m
    acc = 0
    for p in range(length):
        k = length - 1 - p
        v = int(config[p])
        for vp in range(-two_j, v, 2):
            idx = (rem - vp + two_j * k) // 2
            if 0 <= idx <= two_j * k:
                acc += rows[k][idx]
        rem -= v
    return acc


def _unrank_many(indices: np.ndarray, two_j: int, length: int, two_m: int) -> np.ndarray:
    """Vectorized inverse of _rank_many; returns an (n, L) int8 array."""
    counts = _suffix_counts_i64(two_j, length)
    if counts is None:
        raise DomainError("sector too large for int64 ranking tables")
    idxs = np.asarray(indices, dtype=np.int64)
    n = idxs.shape[0]
    out = np.empty((n, length), dtype=np.int8)
    rem = np.full(n, two_m, dtype=np.int64)
    off = idxs.copy()
    vals = local_values(two_j)
    for p in range(length):
        k = length - 1 - p
        # block[i, j] = number of completions if site p takes vals[j]
        idx = (rem[:, None] - vals[None, :] + two_j * k) // 2
        ok = (idx >= 0) & (idx <= two_j * k)
        block = np.where(ok, counts[k, np.clip(idx, 0, two_j * k)], 0)
        cum = np.cumsum(block, axis=1)
        choice = (off[:, None] >= cum).sum(axis=1)
        out[:, p] = vals[choice]
        prev = np.where(choice > 0, np.take_along_axis(cum, np.maximum(choice - 1, 0)[:, None], 1)[:, 0], 0)
        off -= prev
        rem -= vals[choice]
    return out


def enumerate_sector(two_j: int, length: int, two_m: int) -> np.ndarray:
    """All configurations of the sector, lexicographically sorted, as an
    (dim, L) int8 array of doubled values."""
    dim = sector_dimension(two_j, length, two_m)
    chunk = 1_000_000
    if dim <= chunk:
        return _unrank_many(np.arange(dim, dtype=np.int64), two_j, length, two_m)
    parts = [
        _unrank_many(np.arange(lo, min(lo + chunk, dim), dtype=np.int64), two_j, length, two_m)
        for lo in range(0, dim, chunk)
    ]
    return np.concatenate(parts, axis=0)


class SectorBasis:
    """Ranked lexicographic basis of one magnetization sector."""

    def __init__(self, params: SpinParams, two_m: int):
        _validate_sector(params.two_j, params.length, two_m)
        self.params = params
        self.two_m = int(two_m)
        self.dim = sector_dimension(params.two_j, params.length, two_m)
        self._configs = None

    @property
    def configs(self) -> np.ndarray:
        """(dim, L) array of doubled values; built lazily, then cached."""
        if self._configs is None:
            self._configs = enumerate_sector(
                self.params.two_j, self.params.length, self.two_m
            )
            self._configs.setflags(write=False)
        return self._configs

    def rank(self, config) -> int:
        cfg = np.asarray(config, dtype=np.int64)
        if cfg.shape != (self.params.length,):
            raise DomainError(
                f"config has shape {cfg.shape}, expected ({self.params.length},)"
            )
        vals = set(local_values(self.params.two_j).tolist())
        if any(int(v) not in vals for v in cfg):
            raise DomainError(f"config {cfg.tolist()} has out-of-range entries")
        if int(cfg.sum()) != self.two_m:
            raise DomainError(
                f"config sums to {int(cfg.sum())}, not the sector value {self.two_m}"
            )
        return int(
            _rank_many(cfg[None, :], self.params.two_j, self.params.length, self.two_m)[0]
        )

    def unrank(self, index: int) -> tuple:
        if not 0 <= index < self.dim:
            raise DomainError(f"index {index} outside [0, {self.dim})")
        row = _unrank_many(
            np.array([index], dtype=np.int64),
            self.params.two_j,
            self.params.length,
            self.two_m,
        )[0]
        return tuple(int(v) for v in row)

    def __len__(self):
        return self.dim

    def __repr__(self):
        p = self.params
        return (
            f"SectorBasis(two_j={p.two_j}, length={p.length}, "
            f"two_m={self.two_m}, dim={self.dim})"
        )
