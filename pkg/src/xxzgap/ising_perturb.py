"""Second-order perturbation of the gap around the Ising point.

At delta_inv = 0 the Hamiltonian is diagonal and the lowest excitation of
the sector with interface label n (0 <= n <= floor(J)) costs exactly n+1.
Switching the hopping back on leaves the linear response zero (the gap is
even in delta_inv), and the quadratic Taylor coefficient c in

    gap(delta_inv) = (n + 1) + c * delta_inv**2 + O(delta_inv**4)

has a closed rational form.  Nondegenerate interfaces (n < J):

    c = J - n/2 + (J+1)(2J-1)/(n+3) - 2J^2/(2J-n-1)

Doubly degenerate interfaces (J integer >= 2, n = J), lowest branch:

    c = -8 - 3/(J-1) - J/2 + 14/(J+3)

Two cases are infinitely degenerate at the Ising point and have no finite
coefficient: J = 1/2 with n = 0, and J = 1 with n = 1.

All rationals are exact (fractions.Fraction); floats are derived views.
The numeric estimator below uses the same coefficient normalization, so
its output is directly comparable to the table.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .basis import SpinParams
from .errors import DomainError
from .eigensolve import spectral_gap
from .sos_bound import crude_tail_bound

__all__ = [
    "CurvatureResult",
    "curvature_nondegenerate",
    "curvature_degenerate",
    "curvature_result",
    "curvature_table",
    "ising_excitation_energy",
    "centered_two_m",
    "numeric_curvature",
]


@dataclass(frozen=True)
class CurvatureResult:
    two_j: int
    n: int
    curvature_rational: Fraction | None  # None iff infinite
    curvature: float                     # -inf for the infinite cases
    degenerate: bool
    infinite: bool


def _validate_two_j(two_j: int) -> None:
    if two_j < 1:
        raise DomainError(f"two_j must be >= 1, got {two_j}")


def ising_excitation_energy(n: int) -> int:
    """Energy n + 1 of the interface excitation with occupation label n."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    return n + 1


def curvature_nondegenerate(two_j: int, n: int) -> CurvatureResult:
    """Exact quadratic gap coefficient for a nondegenerate interface,
    0 <= n < J."""
    _validate_two_j(two_j)
    if not 0 <= 2 * n < two_j:
        raise DomainError(
            f"nondegenerate case needs 0 <= n < J; got n={n}, two_j={two_j}"
            + (" (n = J is the degenerate case, see curvature_degenerate)"
               if 2 * n == two_j else "")
        )
    if two_j - n - 1 == 0:  # only two_j=1, n=0
        raise DomainError(
            "J=1/2 with n=0 is infinitely degenerate at the Ising point; "
            "no finite coefficient exists (see curvature_result)"
        )
    J = Fraction(two_j, 2)
    c = (
        J
        - Fraction(n, 2)
        + (J + 1) * (2 * J - 1) / (n + 3)
        - 2 * J * J / (2 * J - n - 1)
    )
    return CurvatureResult(two_j, n, c, float(c), degenerate=False, infinite=False)


def curvature_degenerate(two_j: int) -> CurvatureResult:
    """Exact lowest-branch coefficient for the doubly degenerate interface
    n = J, defined for integer J >= 2."""
    _validate_two_j(two_j)
    if two_j % 2 != 0:
        raise DomainError(
            f"degenerate case n = J needs integer J; two_j={two_j} is half-integer"
        )
    J = two_j // 2
    if J == 1:
        raise DomainError(
            "J=1 with n=1 is infinitely degenerate at the Ising point; "
            "no finite coefficient exists (see curvature_result)"
        )
    c = Fraction(-8) - Fraction(3, J - 1) - Fraction(J, 2) + Fraction(14, J + 3)
    return CurvatureResult(two_j, J, c, float(c), degenerate=True, infinite=False)


def curvature_result(two_j: int, n: int) -> CurvatureResult:
    """Dispatch on (two_j, n): nondegenerate, degenerate, or infinite."""
    _validate_two_j(two_j)
    if not 0 <= n <= two_j // 2:
        raise DomainError(
            f"interface label n must lie in [0, floor(J)] = [0, {two_j // 2}], got {n}"
        )
    if two_j == 1 and n == 0:
        return CurvatureResult(1, 0, None, float("-inf"), degenerate=False, infinite=True)
    if 2 * n == two_j:
        if two_j == 2:
            return CurvatureResult(2, 1, None, float("-inf"), degenerate=False, infinite=True)
        return curvature_degenerate(two_j)
    return curvature_nondegenerate(two_j, n)


def curvature_table(max_two_j: int = 6) -> list[CurvatureResult]:
    """All coefficients for two_j = 1..max_two_j, n = 0..floor(J)."""
    _validate_two_j(max_two_j)
    return [
        curvature_result(two_j, n)
        for two_j in range(1, max_two_j + 1)
        for n in range(two_j // 2 + 1)
    ]


def centered_two_m(two_j: int, length: int, n: int) -> int:
    """Sector label two_m placing the classical interface at site
    ceil(L/2) with excitation occupation n, keeping boundary effects
    exponentially small."""
    _validate_two_j(two_j)
    if length < 2:
        raise DomainError(f"length must be >= 2, got {length}")
    if not 0 <= n <= two_j // 2:
        raise DomainError(
            f"interface label n must lie in [0, floor(J)] = [0, {two_j // 2}], got {n}"
        )
    return two_j * (length - 2 * ((length + 1) // 2)) + 2 * n


def numeric_curvature(
    params: SpinParams, two_m: int, h: float | None = None, tol: float = 1e-9
) -> float:
    """Second-difference estimate (gap(h) - gap(0)) / h^2 of the quadratic
    gap coefficient, with h = params.delta_inv.

    Evenness of the gap in delta_inv turns the symmetric second difference
    [gap(h) - 2 gap(0) + gap(-h)] / (2 h^2) into a single solve at +h; the
    result estimates the same coefficient c the analytic table lists
    (gap = n + 1 + c h^2 + O(h^4)), with O(h^2) error.

    The boundary-field terms of the Hamiltonian already carry the exact
    anisotropy dependence, so no endpoint correction is applied here; the
    chain only needs to be long enough that interface-boundary interaction
    is negligible, which is checked with the crude exponential tail bound.
    """
    if h is None:
        h = params.delta_inv
    elif abs(h - params.delta_inv) > 1e-15:
        raise DomainError(
            f"h={h!r} disagrees with params.delta_inv={params.delta_inv!r}"
        )
    if not 0.0 < h <= 0.05:
        raise DomainError(f"step must lie in (0, 0.05], got {h!r}")
    tail = crude_tail_bound(max(1, params.length // 2), params.two_j, params.q)
    if tail > 1e-6:
        raise DomainError(
            f"chain too short: boundary tail estimate {tail!r} exceeds 1e-6"
        )
    gap_h = spectral_gap(params, two_m, tol=tol).gap
    ising = SpinParams(params.two_j, params.length, 0.0)
    gap_0 = spectral_gap(ising, two_m, tol=tol).gap
    return (gap_h - gap_0) / (h * h)
