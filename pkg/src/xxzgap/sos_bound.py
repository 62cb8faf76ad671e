"""Spin-ladder overlap matrix and the resulting spectral-gap lower bound.

Viewing each spin-J site as 2J symmetrized spin-1/2 legs, the kink ground
space compresses onto vectors labelled by restricted partitions mu (sorted
per-leg down-spin counts, zero parts allowed).  The compression of the
ground-space projector to the orthonormalized symmetric vectors is a dense
matrix P(mu, nu) with largest eigenvalue exactly 1; its second-largest
eigenvalue delta gives the rigorous sector bound

    gap >= 2J * (1 - delta_inv) * (1 - delta).

Entries are weighted sums over per-site down-unit profiles c of exact
contingency-table counts M_{r,c} (0-1 matrices with row sums r, column
sums c), computed by a column-by-column DP over the multiset of remaining
row sums and memoized globally.  q-powers are tracked as integer exponents
shifted by per-partition minima, so the Ising limit q = 0 falls out of the
same code path exactly (only minimal-exponent profiles survive).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .basis import SpinParams
from .errors import ConsistencyError, DomainError, ResourceRefusal

__all__ = [
    "RestrictedPartition",
    "OverlapMatrix",
    "SosGapBound",
    "restricted_partitions",
    "contingency_count",
    "gale_ryser_feasible",
    "build_overlap_matrix",
    "delta_and_bound",
    "crude_tail_bound",
    "partition_norm_sums",
]

_COMPOSITION_LIMIT = 2_000_000
_EXACT_FLOAT_LIMIT = 2 ** 53


@dataclass(frozen=True)
class RestrictedPartition:
    """Non-increasing tuple of 2J parts in [0, L] summing to N."""

    parts: tuple[int, ...]

    def profile(self) -> dict[int, int]:
        """Multiplicity profile n_k = #parts equal to k (zeros included)."""
        out: dict[int, int] = {}
        for p in self.parts:
            out[p] = out.get(p, 0) + 1
        return out

    @property
    def orbit_multiplicity(self) -> int:
        """(2J)! / prod_k n_k!, the number of distinct orderings."""
        mult = math.factorial(len(self.parts))
        for n in self.profile().values():
            mult //= math.factorial(n)
        return mult


@dataclass
class OverlapMatrix:
    length: int
    two_j: int
    n_down: int
    q: float
    partitions: list[RestrictedPartition]  # reverse-lexicographic order
    matrix: np.ndarray                     # dense symmetric, spectrum in [0, 1]


@dataclass
class SosGapBound:
    two_j: int
    length: int
    n_down: int
    delta_inv: float
    q: float
    delta: float   # second-largest eigenvalue of the overlap matrix
    bound: float   # 2J (1 - delta_inv) (1 - delta)
    size: int      # number of restricted partitions


def restricted_partitions(L: int, two_j: int, N: int) -> list[RestrictedPartition]:
    """All non-increasing (mu_1, ..., mu_2J) with 0 <= mu_j <= L and sum N,
    in reverse-lexicographic (descending) order."""
    if L < 1 or two_j < 1:
        raise DomainError(f"need L >= 1 and two_j >= 1, got L={L}, two_j={two_j}")
    if not 0 <= N <= two_j * L:
        raise DomainError(f"N={N} outside [0, {two_j * L}] for L={L}, two_j={two_j}")
    out: list[RestrictedPartition] = []

    def grow(prefix: list[int], remaining: int, slots: int, cap: int) -> None:
        if slots == 0:
            if remaining == 0:
                out.append(RestrictedPartition(tuple(prefix)))
            return
        first_max = min(cap, remaining)
        first_min = max(0, remaining - (slots - 1) * cap)
        for part in range(first_max, first_min - 1, -1):
            prefix.append(part)
            grow(prefix, remaining - part, slots - 1, part)
            prefix.pop()

    grow([], N, two_j, L)
    return out


# ---------------------------------------------------------------------------
# Contingency-table counts
# ---------------------------------------------------------------------------

_MEMO: dict[tuple[tuple[int, ...], tuple[int, ...]], int] = {}


def _count_canonical(rows: tuple[int, ...], cols: tuple[int, ...]) -> int:
    """Exact count for canonical input: both tuples sorted descending, no
    zeros, equal sums.  Recurses over the largest remaining column."""
    if not cols:
        return 1 if not rows else 0
    if rows and rows[0] > len(cols):
        return 0
    key = (rows, cols)
    hit = _MEMO.get(key)
    if hit is not None:
        return hit

    groups = [(value, sum(1 for _ in grp)) for value, grp in itertools.groupby(rows)]
    cc, rest = cols[0], cols[1:]
    total = 0

    def place(gi: int, left: int, ways: int, picked: list[int]) -> None:
        nonlocal total
        if left == 0:
            new: list[int] = []
            for (value, count), k in zip(groups, picked + [0] * (len(groups) - len(picked))):
                new.extend([value] * (count - k))
                if value > 1:
                    new.extend([value - 1] * k)
            new.sort(reverse=True)
            total += ways * _count_canonical(tuple(new), rest)
            return
        if gi == len(groups):
            return
        value, count = groups[gi]
        for k in range(min(count, left) + 1):
            place(gi + 1, left - k, ways * math.comb(count, k), picked + [k])

    place(0, cc, 1, [])
    _MEMO[key] = total
    return total


def contingency_count(r, c) -> int:
    """Number of 0-1 matrices with row sums r and column sums c, exactly.

    Total function: any infeasible pair (mismatched totals, out-of-range
    components) counts zero matrices and returns 0.
    """
    r = tuple(int(v) for v in r)
    c = tuple(int(v) for v in c)
    if any(v < 0 or v > len(c) for v in r) or any(v < 0 or v > len(r) for v in c):
        return 0
    if sum(r) != sum(c):
        return 0
    rows = tuple(sorted((v for v in r if v > 0), reverse=True))
    cols = tuple(sorted((v for v in c if v > 0), reverse=True))
    return _count_canonical(rows, cols)


def gale_ryser_feasible(r, c) -> bool:
    """True iff a 0-1 matrix with row sums r and column sums c exists:
    equal totals and c (sorted descending) dominated by the conjugate of r."""
    r = [int(v) for v in r]
    c = sorted((int(v) for v in c), reverse=True)
    if any(v < 0 for v in r) or any(v < 0 for v in c):
        return False
    if sum(r) != sum(c):
        return False
    prefix = 0
    for k, ck in enumerate(c, start=1):
        prefix += ck
        if prefix > sum(min(rj, k) for rj in r):
            return False
    return True


# ---------------------------------------------------------------------------
# Overlap matrix
# ---------------------------------------------------------------------------


def _composition_count(L: int, two_j: int, N: int) -> int:
    counts = [1] + [0] * N
    for _ in range(L):
        new = [0] * (N + 1)
        for total in range(N + 1):
            if counts[total]:
                for v in range(min(two_j, N - total) + 1):
                    new[total + v] += counts[total]
        counts = new
    return counts[N]


def _compositions(L: int, two_j: int, N: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []

    def grow(prefix: list[int], remaining: int, slots: int) -> None:
        if slots == 0:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        lo = max(0, remaining - (slots - 1) * two_j)
        for v in range(lo, min(two_j, remaining) + 1):
            prefix.append(v)
            grow(prefix, remaining - v, slots - 1)
            prefix.pop()

    grow([], N, L)
    return out


@dataclass
class _SectorTables:
    partitions: list[RestrictedPartition]
    mult: np.ndarray      # orbit multiplicities, float64
    counts: np.ndarray    # M_{mu,c}, float64 (exactness asserted), shape (P, C)
    feasible: np.ndarray  # counts > 0, bool
    exponents: np.ndarray  # <x, c> with sites numbered 1..L, int64, shape (C,)
    binom_prod: np.ndarray  # prod_x binom(2J, c_x), float64, shape (C,)
    min_exp: np.ndarray   # per-partition minimal feasible exponent, int64


@lru_cache(maxsize=64)
def _sector_tables(L: int, two_j: int, N: int) -> _SectorTables:
    n_comp = _composition_count(L, two_j, N)
    if n_comp > _COMPOSITION_LIMIT:
        raise ResourceRefusal(
            f"{n_comp} site profiles for (L={L}, two_j={two_j}, N={N}) "
            f"exceed the limit {_COMPOSITION_LIMIT}"
        )
    parts = restricted_partitions(L, two_j, N)
    profiles = _compositions(L, two_j, N)
    sites = np.arange(1, L + 1, dtype=np.int64)
    carr = np.array(profiles, dtype=np.int64).reshape(len(profiles), L)
    exponents = carr @ sites

    binom_table = np.array([math.comb(two_j, v) for v in range(two_j + 1)], dtype=np.float64)
    binom_prod = binom_table[carr].prod(axis=1)

    cols_canonical = [tuple(sorted((v for v in prof if v > 0), reverse=True)) for prof in profiles]
    counts_int: list[list[int]] = []
    for mu in parts:
        rows = tuple(v for v in mu.parts if v > 0)
        counts_int.append([_count_canonical(rows, cols) for cols in cols_canonical])
    peak = max((max(row) for row in counts_int), default=0)
    if peak >= _EXACT_FLOAT_LIMIT:
        raise ResourceRefusal(
            f"contingency counts reach {peak}, beyond exact float64 range"
        )
    counts = np.array(counts_int, dtype=np.float64)
    feasible = counts > 0.0
    if not feasible.any(axis=1).all():
        raise ConsistencyError("partition with no feasible site profile")
    masked = np.where(feasible, exponents[None, :], np.iinfo(np.int64).max)
    min_exp = masked.min(axis=1)
    mult = np.array([mu.orbit_multiplicity for mu in parts], dtype=np.float64)
    return _SectorTables(parts, mult, counts, feasible, exponents, binom_prod, min_exp)


def build_overlap_matrix(L: int, two_j: int, N: int, q: float) -> OverlapMatrix:
    """Projector compression P(mu, nu) over unit-normalized symmetrized
    partition vectors.

    Entry formula (integer-exponent bookkeeping, s_mu the minimal feasible
    exponent of mu):

        P(mu,nu) = sqrt(mult_mu mult_nu) * S(mu,nu) / sqrt(W_mu W_nu)
        S(mu,nu) = sum_c M_{mu,c} M_{nu,c} q^(2<x,c> - s_mu - s_nu)
                   / prod_x binom(2J, c_x)
        W_mu     = sum_c M_{mu,c} q^(2<x,c> - 2 s_mu)

    The shifts cancel exactly, and at q = 0 only minimal-exponent profiles
    survive (q^0 = 1), which is the exact Ising limit.
    """
    if not 0.0 <= q < 1.0:
        raise DomainError(f"q must lie in [0, 1), got {q!r}")
    if L < 1 or two_j < 1:
        raise DomainError(f"need L >= 1 and two_j >= 1, got L={L}, two_j={two_j}")
    if not 0 <= N <= two_j * L:
        raise DomainError(
            f"no down-unit profiles: N={N} outside [0, {two_j * L}]"
        )
    t = _sector_tables(L, two_j, N)
    size = len(t.partitions)
    norms = np.empty(size)
    for i in range(size):
        feas = t.feasible[i]
        w = q ** (2 * t.exponents[feas] - 2 * t.min_exp[i])
        norms[i] = (t.counts[i, feas] * w).sum()

    matrix = np.empty((size, size))
    for i in range(size):
        for j in range(i, size):
            both = t.feasible[i] & t.feasible[j]
            if not both.any():
                matrix[i, j] = matrix[j, i] = 0.0
                continue
            ex = 2 * t.exponents[both] - t.min_exp[i] - t.min_exp[j]
            terms = (
                t.counts[i, both] * t.counts[j, both] / t.binom_prod[both]
            ) * q ** ex
            val = math.sqrt(t.mult[i] * t.mult[j]) * terms.sum()
            val /= math.sqrt(norms[i] * norms[j])
            matrix[i, j] = matrix[j, i] = val
    return OverlapMatrix(L, two_j, N, q, list(t.partitions), matrix)


def delta_and_bound(L: int, two_j: int, N: int, delta_inv: float) -> SosGapBound:
    """Second eigenvalue delta of the overlap matrix and the sector bound
    2J (1 - delta_inv) (1 - delta).  The top eigenvalue must be 1."""
    params = SpinParams(two_j, max(L, 2), delta_inv)  # reuse anisotropy validation
    if L < 1:
        raise DomainError(f"need L >= 1, got L={L}")
    om = build_overlap_matrix(L, two_j, N, params.q)
    evals = np.linalg.eigvalsh(om.matrix)
    top = float(evals[-1])
    if abs(top - 1.0) > 1e-6:
        raise ConsistencyError(
            f"overlap matrix top eigenvalue {top!r} deviates from 1 "
            f"(L={L}, two_j={two_j}, N={N}, q={params.q!r})"
        )
    delta = float(evals[-2]) if len(evals) >= 2 else 0.0
    delta = min(max(delta, 0.0), 1.0)
    bound = two_j * (1.0 - delta_inv) * (1.0 - delta)
    return SosGapBound(
        two_j=two_j,
        length=L,
        n_down=N,
        delta_inv=float(delta_inv),
        q=params.q,
        delta=delta,
        bound=bound,
        size=len(om.partitions),
    )


def crude_tail_bound(R: int, two_j: int, q: float) -> float:
    """Diagnostic truncation estimate 4J^2 R q^(2R) / (1 - 4J^2 R q^(2R)),
    used to pick a window size R so that tail effects are below tolerance."""
    if R < 1:
        raise DomainError(f"R must be >= 1, got {R}")
    if not 0.0 <= q < 1.0:
        raise DomainError(f"q must lie in [0, 1), got {q!r}")
    x = float(two_j) ** 2 * R * q ** (2 * R)
    if x >= 1.0:
        raise DomainError(
            f"R too small for this q: 4 J^2 R q^(2R) = {x!r} >= 1"
        )
    return x / (1.0 - x)


def partition_norm_sums(L: int, two_j: int, N: int, q: float):
    """Unscaled norm sums W(mu) = sum_c M_{mu,c} q^(2<x,c>) together with
    the partitions and orbit multiplicities.

    sum_mu mult(mu) W(mu) equals the squared norm of the unnormalized kink
    vector (coefficient route in the ground-state module); desk-scale only,
    since the weights are not exponent-shifted here.
    """
    if not 0.0 <= q < 1.0:
        raise DomainError(f"q must lie in [0, 1), got {q!r}")
    t = _sector_tables(L, two_j, N)
    weights = q ** (2 * t.exponents)
    sums = (t.counts * weights[None, :]).sum(axis=1)
    return list(t.partitions), t.mult.copy(), sums
