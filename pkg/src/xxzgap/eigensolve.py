"""Lowest eigenpairs of sector Hamiltonians and the spectral gap.

Small sectors go through dense LAPACK; larger ones through Lanczos with
full reorthogonalization.  The Lanczos basis is kept (sector dimensions
at desk scale fit in memory), capped at 500 vectors with a thick restart
that retains the lowest Ritz block, so the H*Q = Q*T + beta*q*e^T
relation - and with it the cheap residual estimate |beta * s_last| -
survives restarts.

Everything is deterministic: the start vector is the normalized all-ones
vector (perturbed in its first coordinate on breakdown), summation
orders are fixed, and no PRNG is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, eigvalsh

from .basis import SpinParams, sector_dimension
from .errors import ConsistencyError, DomainError, NonConvergenceError, ResourceRefusal
from .hamiltonian import SectorMatrix, assemble_sector

__all__ = ["EigenResult", "GapReport", "lowest_k", "spectral_gap", "full_spectrum"]

DENSE_LIMIT = 400          # auto method switches to dense at or below this
FULL_SPECTRUM_LIMIT = 4000
LANCZOS_CAP = 500          # basis vectors before a thick restart
MAX_RESTARTS = 40
_BLOCK_ROWS = 64


@dataclass
class EigenResult:
    eigenvalues: np.ndarray
    residual_norms: np.ndarray
    iterations: int
    converged: bool
    method: str
    vectors: np.ndarray | None = None


@dataclass
class GapReport:
    two_j: int
    length: int
    two_m: int
    delta_inv: float
    ground_energy: float
    gap: float
    zero_threshold: float
    eigenvalues: list
    excitation_multiplicity: int
    method: str


class _GrowingBasis:
    """Row-major store of Lanczos vectors in fixed-size blocks, so
    reorthogonalization runs through BLAS without ever reallocating a
    multi-GB contiguous array."""

    def __init__(self, dim):
        self.dim = dim
        self.blocks = []
        self.size = 0

    def append(self, v):
        i = self.size % _BLOCK_ROWS
        if i == 0:
            self.blocks.append(np.empty((_BLOCK_ROWS, self.dim)))
        self.blocks[-1][i] = v
        self.size += 1

    def vector(self, j):
        return self.blocks[j // _BLOCK_ROWS][j % _BLOCK_ROWS]

    def orthogonalize(self, w):
        for bi, blk in enumerate(self.blocks):
            used = min(self.size - bi * _BLOCK_ROWS, _BLOCK_ROWS)
            part = blk[:used]
            w -= part.T @ (part @ w)
        return w

    def combine(self, coeffs):
        """Columns of Q @ coeffs, coeffs shaped (size, ncols)."""
        out = np.zeros((self.dim, coeffs.shape[1]))
        for bi, blk in enumerate(self.blocks):
            lo = bi * _BLOCK_ROWS
            used = min(self.size - lo, _BLOCK_ROWS)
            out += blk[:used].T @ coeffs[lo : lo + used]
        return out


def _start_vector(dim, attempt):
    v = np.ones(dim)
    if attempt > 0:
        v[0] += 1e-6
    return v / np.linalg.norm(v)


def _empty_result():
    return EigenResult(
        eigenvalues=np.empty(0),
        residual_norms=np.empty(0),
        iterations=0,
        converged=True,
        method="lanczos",
        vectors=None,
    )


def _lanczos(matrix, k, tol, cap=LANCZOS_CAP, want_vectors=False, start=None, deflate=None):
    """One Lanczos run.  `deflate` is a (dim, r) block of already
    converged eigenvectors kept out of the new Krylov space (used by the
    verification probe), `start` overrides the all-ones start vector."""
    dim = matrix.dim
    norm1 = matrix.norm1
    target = tol * norm1
    breakdown = 1e-14 * max(norm1, 1.0)

    def purify(w):
        if deflate is not None:
            w -= deflate @ (deflate.T @ w)
        return w

    if start is None:
        q = _start_vector(dim, 0)
    else:
        q = purify(start.astype(np.float64).copy())
        nq = float(np.linalg.norm(q))
        if nq < 1e-12:
            return _empty_result()
        q = q / nq

    basis = _GrowingBasis(dim)
    T = np.zeros((cap + 1, cap + 1))
    basis.append(q)
    iterations = 0
    restarts = 0
    fill_coord = 0
    start_attempt = 0
    theta = s_mat = None

    while True:
        m = basis.size - 1  # index of the newest basis vector
        w = matrix.matvec(q)
        alpha = float(q @ w)
        T[m, m] = alpha
        iterations += 1
        w = purify(w)
        w = basis.orthogonalize(w)
        w = basis.orthogonalize(purify(w))
        beta = float(np.linalg.norm(w))

        if beta <= breakdown:
            if basis.size == 1 and start_attempt == 0 and start is None:
                # all-ones start happened to be an eigenvector: restart
                # from the perturbed deterministic vector
                start_attempt = 1
                basis = _GrowingBasis(dim)
                T = np.zeros((cap + 1, cap + 1))
                q = _start_vector(dim, 1)
                basis.append(q)
                continue
            # invariant subspace: inject the next coordinate direction
            # (deterministic), decoupled through a zero beta, until the
            # Ritz set is large enough or the space is exhausted
            if basis.size >= min(dim, cap):
                n = basis.size
                theta, s_mat = eigh(T[:n, :n])
                break
            injected = False
            while fill_coord < dim:
                w = np.zeros(dim)
                w[fill_coord] = 1.0
                fill_coord += 1
                w = basis.orthogonalize(purify(w))
                nw = float(np.linalg.norm(w))
                if nw > 1e-8:
                    q = w / nw
                    injected = True
                    break
            if not injected:
                n = basis.size
                theta, s_mat = eigh(T[:n, :n])
                break
            basis.append(q)
            continue

        q = w / beta
        n = basis.size
        if n < cap:
            T[n - 1, n] = T[n, n - 1] = beta

        check = n >= max(2 * k + 2, 8) and (n % 10 == 0 or n + 1 >= min(dim, cap))
        if check or n >= min(dim, cap):
            theta, s_mat = eigh(T[:n, :n])
            ests = np.abs(beta * s_mat[n - 1, : min(k, n)])
            if n >= k + 1 and np.all(ests <= target):
                break
            if n >= dim:
                break

        if n >= cap:
            restarts += 1
            if restarts > MAX_RESTARTS:
                raise NonConvergenceError(
                    f"Lanczos did not reach residual {target:.3e} after "
                    f"{iterations} iterations",
                    ritz_values=[float(t) for t in theta[:k]],
                    iterations=iterations,
                )
            keep = min(max(2 * k, 20), n - 2)
            y = basis.combine(s_mat[:, :keep])
            couple = beta * s_mat[n - 1, :keep]
            basis = _GrowingBasis(dim)
            for i in range(keep):
                basis.append(y[:, i])
            basis.append(q)
            T = np.zeros((cap + 1, cap + 1))
            T[:keep, :keep] = np.diag(theta[:keep])
            T[:keep, keep] = couple
            T[keep, :keep] = couple
            continue
        basis.append(q)

    kk = min(k, theta.shape[0])
    vecs = basis.combine(s_mat[:, :kk])
    eigenvalues = theta[:kk].copy()
    residuals = np.empty(kk)
    for i in range(kk):
        v = vecs[:, i]
        nv = np.linalg.norm(v)
        if nv > 0:
            v = v / nv
            vecs[:, i] = v
        residuals[i] = np.linalg.norm(matrix.matvec(v) - eigenvalues[i] * v)
    converged = bool(np.all(residuals <= max(target, 1e-13 * max(norm1, 1.0)) * 10))
    return EigenResult(
        eigenvalues=eigenvalues,
        residual_norms=residuals,
        iterations=iterations,
        converged=converged,
        method="lanczos",
        vectors=vecs,
    )


def _dense(matrix, k, want_vectors):
    kk = min(k, matrix.dim)
    vals, vecs = eigh(matrix.to_dense())
    eigenvalues = vals[:kk].copy()
    residuals = np.empty(kk)
    for i in range(kk):
        v = vecs[:, i]
        residuals[i] = np.linalg.norm(matrix.matvec(v) - eigenvalues[i] * v)
    return EigenResult(
        eigenvalues=eigenvalues,
        residual_norms=residuals,
        iterations=0,
        converged=True,
        method="dense",
        vectors=vecs[:, :kk].copy() if want_vectors else None,
    )


def _diagonal_shortcut(matrix, k, want_vectors):
    order = np.argsort(matrix.diag, kind="stable")[:k]
    eigenvalues = matrix.diag[order].astype(np.float64)
    vecs = None
    if want_vectors:
        vecs = np.zeros((matrix.dim, order.shape[0]))
        vecs[order, np.arange(order.shape[0])] = 1.0
    return EigenResult(
        eigenvalues=eigenvalues,
        residual_norms=np.zeros(order.shape[0]),
        iterations=0,
        converged=True,
        method="diagonal",
        vectors=vecs,
    )


def lowest_k(
    matrix: SectorMatrix,
    k: int,
    tol: float = 1e-9,
    method: str = "auto",
    return_vectors: bool = False,
) -> EigenResult:
    """k lowest eigenpairs with residual norms below tol * ||H||_1."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if not 0.0 < tol <= 1e-4:
        raise DomainError(f"tol must lie in (0, 1e-4], got {tol}")
    if method not in ("auto", "lanczos", "dense"):
        raise DomainError(f"unknown method {method!r}")
    if matrix.nnz_offdiag == 0:
        # the sector matrix is diagonal (Ising limit): exact answer
        return _diagonal_shortcut(matrix, min(k, matrix.dim), return_vectors)
    if k >= matrix.dim or method == "dense" or (
        method == "auto" and matrix.dim <= DENSE_LIMIT
    ):
        return _dense(matrix, k, return_vectors)

    result = _lanczos(matrix, k, tol, want_vectors=True)

    # The two_m = 0 sector commutes with the flip-and-reflect permutation
    # and the all-ones start vector is even under it, so a second run from
    # a generic start, deflated against everything already found, guards
    # against odd-parity levels hiding among the k lowest.  Other sectors
    # carry no such symmetry.
    labels = matrix.labels
    if (labels is None or labels[2] == 0) and matrix.dim > k + 1:
        probe_start = np.arange(1.0, matrix.dim + 1.0)
        probe = _lanczos(
            matrix, k, tol, want_vectors=True,
            start=probe_start, deflate=result.vectors,
        )
        if probe.eigenvalues.size:
            vals = np.concatenate([result.eigenvalues, probe.eigenvalues])
            vecs = np.concatenate([result.vectors, probe.vectors], axis=1)
            rnorms = np.concatenate([result.residual_norms, probe.residual_norms])
            order = np.argsort(vals, kind="stable")[:k]
            result = EigenResult(
                eigenvalues=vals[order],
                residual_norms=rnorms[order],
                iterations=result.iterations + probe.iterations,
                converged=result.converged and probe.converged,
                method="lanczos",
                vectors=vecs[:, order],
            )
    if not return_vectors:
        result.vectors = None
    return result


def spectral_gap(params: SpinParams, two_m: int, tol: float = 1e-9, k: int = 4) -> GapReport:
    """Ground energy (must be ~0) and smallest eigenvalue above the zero
    threshold for one sector."""
    dim = sector_dimension(params.two_j, params.length, two_m)
    if dim < 2:
        raise DomainError(f"sector dim {dim} < 2: no gap to compute")
    matrix = assemble_sector(params, two_m)
    zero_threshold = max(1e-8, 1e-12 * matrix.norm1)
    kk = min(max(k, 4), dim)
    while True:
        result = lowest_k(matrix, kk, tol)
        above = result.eigenvalues[result.eigenvalues > zero_threshold]
        if above.size or kk >= dim:
            break
        kk = min(dim, 2 * kk)

    ground = float(result.eigenvalues[0])
    if ground > zero_threshold:
        raise ConsistencyError(
            f"ground state not annihilated: lambda_1 = {ground:.3e} exceeds "
            f"zero threshold {zero_threshold:.3e} (assembly bug?)"
        )
    if not above.size:
        raise ConsistencyError("no eigenvalue above the zero threshold was found")
    gap = float(above[0])
    multiplicity = int(np.count_nonzero(np.abs(result.eigenvalues - gap) <= 1e-8))
    return GapReport(
        two_j=params.two_j,
        length=params.length,
        two_m=int(two_m),
        delta_inv=params.delta_inv,
        ground_energy=ground,
        gap=gap,
        zero_threshold=zero_threshold,
        eigenvalues=[float(e) for e in result.eigenvalues],
        excitation_multiplicity=multiplicity,
        method=result.method,
    )


def full_spectrum(matrix: SectorMatrix) -> np.ndarray:
    """All eigenvalues of a small sector, ascending (dense only)."""
    if matrix.dim > FULL_SPECTRUM_LIMIT:
        raise ResourceRefusal(
            f"dim {matrix.dim} > {FULL_SPECTRUM_LIMIT}: full dense spectrum "
            "refused, use lowest_k instead"
        )
    if matrix.nnz_offdiag == 0:
        return np.sort(matrix.diag.astype(np.float64), kind="stable")
    return eigvalsh(matrix.to_dense())
