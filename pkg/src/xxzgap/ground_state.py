"""Closed-form kink ground states and their q-series norms.

The zero-energy vector of a sector has coefficients

    psi({m_a}) ~ prod_a binom(2J, J + m_a)^(1/2) * q^(sum_a a*c_a),

with c_a = J - m_a the number of down units at site a.  The q-power
spans hundreds of orders of magnitude on long chains, so coefficients
are assembled in log space relative to the maximal term.  The dominant
term is the classical kink: all down units pushed to the left end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import SectorBasis, SpinParams
from .errors import ConsistencyError, DomainError
from .hamiltonian import assemble_sector

__all__ = [
    "KinkGroundState",
    "QSeriesValue",
    "kink_vector",
    "residual",
    "heine_check",
    "spin_half_norm_sq",
    "spin_half_norm_sq_infinite",
]


@dataclass
class KinkGroundState:
    params: SpinParams
    two_m: int
    coefficients: np.ndarray  # unit norm, all entries > 0 (one entry = 1 at q = 0)
    dominant_rank: int        # index of the classical kink configuration


@dataclass
class QSeriesValue:
    q: float
    partial_sum: float
    product_form: float
    terms_used: int


def _down_counts(basis: SectorBasis) -> np.ndarray:
    return (basis.params.two_j - basis.configs.astype(np.int64)) // 2


def kink_vector(params: SpinParams, two_m: int) -> KinkGroundState:
    """Unit-norm positive ground-state vector of the sector."""
    basis = SectorBasis(params, two_m)
    down = _down_counts(basis)
    sites = np.arange(1, params.length + 1, dtype=np.int64)
    exponents = down @ sites  # q-power of each configuration

    order = np.argsort(exponents, kind="stable")
    dominant = int(order[0])
    if params.is_ising:
        if exponents.size > 1 and exponents[order[1]] == exponents[dominant]:
            raise ConsistencyError("classical kink configuration is not unique")
        coeff = np.zeros(basis.dim)
        coeff[dominant] = 1.0
        return KinkGroundState(params, int(two_m), coeff, dominant)

    log_binom = np.array(
        [math.log(math.comb(params.two_j, c)) for c in range(params.two_j + 1)]
    )
    logw = 0.5 * log_binom[down].sum(axis=1) - params.eta * exponents
    logw -= logw.max()
    coeff = np.exp(logw)
    coeff /= np.linalg.norm(coeff)
    return KinkGroundState(params, int(two_m), coeff, dominant)


def residual(params: SpinParams, two_m: int) -> float:
    """|| H Psi_0 ||_2; analytically zero for every sector."""
    matrix = assemble_sector(params, two_m)
    state = kink_vector(params, two_m)
    return float(np.linalg.norm(matrix.matvec(state.coefficients)))


def heine_check(q: float, n_terms: int) -> QSeriesValue:
    """Partial sum of sum_n q^(2n^2) / prod_(j<=n) (1-q^(2j))^2 against
    the product form 1 / prod_(j<=n_terms) (1-q^(2j))."""
    if not 0.0 < q < 1.0:
        raise DomainError(f"q must lie in (0, 1), got {q!r}")
    if n_terms < 1:
        raise DomainError(f"n_terms must be >= 1, got {n_terms}")
    q2 = q * q
    partial = 1.0
    denom = 1.0
    product = 1.0
    for n in range(1, n_terms + 1):
        factor = 1.0 - q2 ** n
        denom *= factor * factor
        partial += q2 ** (n * n) / denom
        product *= factor
    return QSeriesValue(q=q, partial_sum=partial, product_form=1.0 / product, terms_used=n_terms)


def spin_half_norm_sq(L: int, N: int, q: float) -> float:
    """Squared norm of the spin-1/2 kink state with N down spins on L
    sites: sum over 1 <= a_1 < ... < a_N <= L of q^(2(a_1+...+a_N)).

    Computed by the exact two-term recurrence (the last down spin sits
    at site L or it does not), which is stable for any 0 <= q < 1.
    """
    if not 0 <= N <= L:
        raise DomainError(f"need 0 <= N <= L, got N={N}, L={L}")
    if not 0.0 <= q < 1.0:
        raise DomainError(f"q must lie in [0, 1), got {q!r}")
    prev = [1.0] + [0.0] * N  # f(0, n)
    for site in range(1, L + 1):
        w = q ** (2 * site)
        cur = [1.0] + [prev[n] + w * prev[n - 1] for n in range(1, N + 1)]
        prev = cur
    return prev[N]


def spin_half_norm_sq_infinite(N: int, q: float) -> float:
    """L -> infinity closed form q^(N(N+1)) / prod_(j<=N) (1-q^(2j))."""
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    if not 0.0 <= q < 1.0:
        raise DomainError(f"q must lie in [0, 1), got {q!r}")
    out = q ** (N * (N + 1))
    for j in range(1, N + 1):
        out /= 1.0 - q ** (2 * j)
    return out
