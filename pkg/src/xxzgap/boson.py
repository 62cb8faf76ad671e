"""Large-spin asymptotics: interface phase, boson coupling matrix, and the
truncated Jacobi operator whose gap is the J -> infinity limit.

With sech(eta) = delta_inv, the magnetization profile of a kink sector
with density offset mu = M/J approaches tanh(eta*(alpha - r)), where the
interface phase r solves

    sum_k tanh(eta*(k - r)) = mu

(over the chain for finite systems, over a growing symmetric window
[-n+1, n] for the infinite one; the sum is strictly decreasing in r).
Harmonic fluctuations around the profile couple through the tridiagonal
matrix J_mat below, which has an exact zero mode v_alpha =
sech(eta*(alpha - r)).  Its interior rows coincide with the Jacobi
operator

    (A v)_n = 2 v_n - sech(eta) (v_{n-1} + v_{n+1})
              - 4 sinh^2(eta) / (cosh(2 eta (n - r)) + cosh(2 eta)) v_n,

whose second-smallest eigenvalue after hard-wall truncation is the
asymptotic gap gamma_inf(mu, delta_inv).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .basis import SpinParams
from .eigensolve import spectral_gap
from .errors import ConsistencyError, DomainError, ResourceRefusal

__all__ = [
    "TridiagonalOperator",
    "InterfacePhase",
    "OptimalScanResult",
    "BosonComparison",
    "solve_interface_phase",
    "boson_matrix",
    "jacobi_operator",
    "gamma_infinity",
    "optimal_anisotropy_scan",
    "boson_vs_exact",
]


@dataclass
class TridiagonalOperator:
    """Symmetric tridiagonal matrix with its construction metadata."""

    diag: np.ndarray
    offdiag: np.ndarray
    kind: str           # "boson_J" | "jacobi_A"
    eta: float
    r: float
    window: tuple[int, int]  # inclusive index range the rows correspond to

    @property
    def size(self) -> int:
        return len(self.diag)

    @property
    def norm1(self) -> float:
        pad = np.concatenate(([0.0], np.abs(self.offdiag), [0.0]))
        return float((np.abs(self.diag) + pad[:-1] + pad[1:]).max())

    def apply(self, vec: np.ndarray) -> np.ndarray:
        out = self.diag * vec
        out[:-1] += self.offdiag * vec[1:]
        out[1:] += self.offdiag * vec[:-1]
        return out

    def eigenvalues(self, k: int | None = None) -> np.ndarray:
        """All eigenvalues, or the k smallest, ascending."""
        if k is None:
            return eigh_tridiagonal(self.diag, self.offdiag, eigvals_only=True)
        if not 1 <= k <= self.size:
            raise DomainError(f"k must lie in [1, {self.size}], got {k}")
        return eigh_tridiagonal(
            self.diag, self.offdiag, eigvals_only=True,
            select="i", select_range=(0, k - 1),
        )


@dataclass
class InterfacePhase:
    mu: float
    r: float
    eta: float
    window: int      # half-width n; the sum runs over k in [-n+1, n]
    residual: float  # windowed sum at r minus mu


@dataclass
class OptimalScanResult:
    delta_inv: float   # refined argmax of gamma_inf(0, .)
    gamma: float
    truncation: int
    refine_tol: float
    local_maxima: list[tuple[float, float]]  # (delta_inv, gamma) per grid maximum
    unimodal: bool


@dataclass
class BosonComparison:
    two_j: int
    length: int
    delta_inv: float
    two_m: int
    eta: float
    r: float
    gap: float         # exact sector gap
    gap_over_j: float  # gap / J = 2 gap / two_j
    lambda1: float     # first nonzero eigenvalue of the coupling matrix
    deviation: float   # |gap_over_j - lambda1| / lambda1


def _cosh_ratio(x: float, y: float) -> float:
    """cosh(x)/cosh(y) without overflow for large arguments."""
    ax, ay = abs(x), abs(y)
    return math.exp(
        ax - ay + math.log1p(math.exp(-2.0 * ax)) - math.log1p(math.exp(-2.0 * ay))
    )


def _windowed_phase_sum(eta: float, window: int, r: float) -> float:
    k = np.arange(-window + 1, window + 1, dtype=np.float64)
    return float(np.tanh(eta * (k - r)).sum())


def _phase_tail_bound(eta: float, window: int, r: float) -> float:
    """Geometric bound on the terms dropped outside [-window+1, window]."""
    decay = math.exp(-2.0 * eta)
    a = math.exp(-2.0 * eta * (window + 1 - r))
    b = math.exp(-2.0 * eta * (window + r))
    return 2.0 * (a + b) / (1.0 - decay)


def solve_interface_phase(
    mu: float, eta: float, window: int, tol: float = 1e-10
) -> InterfacePhase:
    """Root r of the windowed phase equation, by monotone bracketing.

    mu = 0 returns r = 1/2 exactly: the window [-n+1, n] is symmetric
    about 1/2, so the terms cancel in pairs there.  The geometric tail
    estimate for the dropped terms must come out below tol, otherwise the
    window is too small for this (mu, eta).
    """
    if eta <= 0.0:
        raise DomainError(f"eta must be positive, got {eta!r}")
    if window < 1:
        raise DomainError(f"window must be >= 1, got {window}")
    if not abs(mu) < 2 * window:
        raise DomainError(
            f"|mu|={abs(mu)!r} outside the solvable range (-{2*window}, {2*window}); "
            "enlarge window"
        )
    if mu == 0.0:
        r = 0.5
    else:
        lo, hi = float(-window + 1), float(window)
        step = max(1.0, 2.0 / eta)
        for _ in range(200):
            if _windowed_phase_sum(eta, window, lo) >= mu:
                break
            lo -= step
        else:
            raise DomainError(f"mu={mu!r} unsolvable at window={window}; enlarge window")
        for _ in range(200):
            if _windowed_phase_sum(eta, window, hi) <= mu:
                break
            hi += step
        else:
            raise DomainError(f"mu={mu!r} unsolvable at window={window}; enlarge window")
        r = float(
            brentq(lambda x: _windowed_phase_sum(eta, window, x) - mu, lo, hi,
                   xtol=1e-14, rtol=8.9e-16)
        )
    tail = _phase_tail_bound(eta, window, r)
    if not tail < tol:
        raise DomainError(
            f"phase tail estimate {tail!r} >= tol {tol!r}; enlarge window"
        )
    residual = _windowed_phase_sum(eta, window, r) - mu
    return InterfacePhase(mu=float(mu), r=r, eta=float(eta), window=int(window),
                          residual=residual)


def _well_diagonal(eta: float, offsets: np.ndarray) -> np.ndarray:
    """2 - 4 sinh^2(eta) / (cosh(2 eta x) + cosh(2 eta)); overflow in the
    cosh simply drives the correction to its limit 0."""
    with np.errstate(over="ignore"):
        denom = np.cosh(2.0 * eta * offsets) + math.cosh(2.0 * eta)
        return 2.0 - 4.0 * math.sinh(eta) ** 2 / denom


def boson_matrix(L: int, eta: float, r: float) -> TridiagonalOperator:
    """Coupling matrix of the harmonic fluctuations on sites 1..L.

    Off-diagonals are all -sech(eta); interior diagonals match the Jacobi
    operator's; the endpoint diagonals sech(eta)*cosh(eta(1-r))/cosh(eta(2-r))
    (and mirrored at L) make v_alpha = sech(eta*(alpha - r)) an exact zero
    mode of the finite matrix.
    """
    if L < 2:
        raise DomainError(f"L must be >= 2, got {L}")
    if eta <= 0.0:
        raise DomainError(f"eta must be positive, got {eta!r}")
    sech = 1.0 / math.cosh(eta)
    alphas = np.arange(1, L + 1, dtype=np.float64)
    diag = _well_diagonal(eta, alphas - r)
    diag[0] = sech * _cosh_ratio(eta * (1.0 - r), eta * (2.0 - r))
    diag[-1] = sech * _cosh_ratio(eta * (L - r), eta * (L - 1.0 - r))
    offdiag = np.full(L - 1, -sech)
    return TridiagonalOperator(diag, offdiag, "boson_J", float(eta), float(r), (1, L))


def jacobi_operator(truncation: int, eta: float, r: float) -> TridiagonalOperator:
    """Hard-wall truncation of the bi-infinite Jacobi operator on an
    integer window of the given size centered at the potential well."""
    if truncation < 3:
        raise DomainError(f"truncation must be >= 3, got {truncation}")
    if eta <= 0.0:
        raise DomainError(f"eta must be positive, got {eta!r}")
    n_lo = math.floor(r + 0.5) - truncation // 2
    ns = np.arange(n_lo, n_lo + truncation, dtype=np.float64)
    diag = _well_diagonal(eta, ns - r)
    offdiag = np.full(truncation - 1, -1.0 / math.cosh(eta))
    return TridiagonalOperator(diag, offdiag, "jacobi_A", float(eta), float(r),
                               (n_lo, n_lo + truncation - 1))


def gamma_infinity(
    mu: float, delta_inv: float, truncation: int = 200, tol: float = 1e-10
) -> float:
    """Asymptotic gap: second-smallest eigenvalue of the truncated Jacobi
    operator at the phase r(mu), after checking that the smallest is the
    zero mode (<= tol)."""
    if not 0.0 < delta_inv < 1.0:
        raise DomainError(f"delta_inv must lie in (0, 1), got {delta_inv!r}")
    eta = math.acosh(1.0 / delta_inv)
    phase = solve_interface_phase(mu, eta, window=truncation, tol=tol)
    op = jacobi_operator(truncation, eta, phase.r)
    low = op.eigenvalues(k=2)
    if low[0] > tol:
        raise ConsistencyError(
            f"smallest eigenvalue {float(low[0])!r} exceeds tol {tol!r}: zero mode not "
            f"resolved; increase truncation or re-center the window"
        )
    return float(low[1])


def _golden_max(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def optimal_anisotropy_scan(
    truncation: int = 500,
    grid: np.ndarray | None = None,
    refine_tol: float = 1e-6,
    tol: float = 1e-10,
) -> OptimalScanResult:
    """Argmax of gamma_inf(0, delta_inv) over delta_inv in (0, 1).

    Coarse grid scan, then golden-section refinement around every local
    grid maximum; non-unimodal profiles are reported through the
    local_maxima list rather than raised.
    """
    if grid is None:
        grid = np.linspace(0.02, 0.98, 49)
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or len(grid) < 3:
        raise DomainError("grid must be a 1-D array with at least 3 points")
    if not ((grid > 0.0) & (grid < 1.0)).all() or not (np.diff(grid) > 0).all():
        raise DomainError("grid must be strictly increasing inside (0, 1)")

    def f(d: float) -> float:
        return gamma_infinity(0.0, d, truncation, tol)

    values = np.array([f(d) for d in grid])
    maxima: list[tuple[float, float]] = []
    for i in range(len(grid)):
        left = values[i - 1] if i > 0 else -np.inf
        right = values[i + 1] if i < len(grid) - 1 else -np.inf
        if values[i] >= left and values[i] >= right:
            lo = grid[i - 1] if i > 0 else grid[0]
            hi = grid[i + 1] if i < len(grid) - 1 else grid[-1]
            maxima.append(_golden_max(f, float(lo), float(hi), refine_tol))
    if not maxima:
        raise ConsistencyError("no local maximum found on the grid")
    best = max(maxima, key=lambda pair: pair[1])
    return OptimalScanResult(
        delta_inv=best[0],
        gamma=best[1],
        truncation=int(truncation),
        refine_tol=float(refine_tol),
        local_maxima=maxima,
        unimodal=len(maxima) == 1,
    )


def _finite_phase(L: int, eta: float, mu: float) -> float:
    """Solve sum_{alpha=1..L} tanh(eta*(alpha - r)) = mu for r."""
    if not abs(mu) < L:
        raise DomainError(f"|mu|={abs(mu)!r} >= L={L}: no finite interface phase")
    alphas = np.arange(1, L + 1, dtype=np.float64)

    def f(r: float) -> float:
        return float(np.tanh(eta * (alphas - r)).sum()) - mu

    lo, hi = 0.0, float(L + 1)
    step = max(1.0, 2.0 / eta)
    while f(lo) < 0.0:
        lo -= step
    while f(hi) > 0.0:
        hi += step
    return float(brentq(f, lo, hi, xtol=1e-14, rtol=8.9e-16))


def boson_vs_exact(two_j: int, L: int, delta_inv: float, two_m: int) -> BosonComparison:
    """Exact sector gap per unit spin against the first nonzero coupling
    eigenvalue at the matched interface phase."""
    if (two_j + 1) ** L > 100_000:
        raise ResourceRefusal(
            f"sector space (two_j+1)^L = {(two_j + 1) ** L} exceeds the "
            "desk-scale cap 100000"
        )
    params = SpinParams(two_j, L, delta_inv)
    gap = spectral_gap(params, two_m).gap
    mu = two_m / two_j
    r = _finite_phase(L, params.eta, mu)
    op = boson_matrix(L, params.eta, r)
    low = op.eigenvalues(k=2)
    if abs(low[0]) > 1e-10 * max(op.norm1, 1.0):
        raise ConsistencyError(
            f"coupling-matrix zero mode off by {float(low[0])!r} at (L={L}, eta={params.eta!r})"
        )
    lambda1 = float(low[1])
    gap_over_j = 2.0 * gap / two_j
    return BosonComparison(
        two_j=two_j,
        length=L,
        delta_inv=float(delta_inv),
        two_m=int(two_m),
        eta=params.eta,
        r=r,
        gap=gap,
        gap_over_j=gap_over_j,
        lambda1=lambda1,
        deviation=abs(gap_over_j - lambda1) / lambda1,
    )
