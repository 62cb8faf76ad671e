"""Sector-restricted assembly of the kink XXZ chain Hamiltonian.

The chain Hamiltonian is a sum of nearest-neighbour bond terms plus a
boundary field that telescopes bond-wise, so each bond contributes

    diag(m1, m2) = J^2 - m1*m2 + J*A(Delta)*(m1 - m2)
    hop(m1, m2)  = -(1/(2 Delta)) * sqrt(J(J+1) - m1(m1+1)) * sqrt(J(J+1) - m2(m2-1))

where the hop moves one unit of magnetization left across the bond and
A(Delta) = sqrt(1 - Delta^{-2}).  Every bond term is nonnegative and the
kink ground state is annihilated bond by bond, so the ground eigenvalue
of each interior sector is exactly 0.

All formulas below are written in doubled integers a = 2*m1, b = 2*m2.
"""

from __future__ import annotations

import numpy as np

from ._backend import USING_NUMBA, njit
from .basis import SectorBasis, SpinParams, _rank_many
from .errors import DomainError, ResourceRefusal

__all__ = [
    "SectorMatrix",
    "diag_amplitude",
    "hop_amplitude",
    "assemble_sector",
    "matvec",
    "staggered_conjugate_spectrum_check",
    "dump_triplets",
]

# entries smaller than this are treated as structural zeros
STORE_TOL = 1e-15

DENSE_CHECK_LIMIT = 2000


def diag_amplitude(two_j: int, a, b, a_delta: float):
    """Diagonal bond energy for doubled values (a, b) = (2m1, 2m2).

    Equals (J^2 - m1 m2) + J*A*(m1 - m2); at A = 1 this factors as
    (J + m1)(J - m2) >= 0.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return (two_j * two_j - a * b + a_delta * two_j * (a - b)) / 4.0


def hop_amplitude(two_j: int, a, b, delta_inv: float):
    """Off-diagonal amplitude for (a, b) -> (a+2, b-2); zero if the move
    leaves the single-site range."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    cap = two_j * (two_j + 2)
    fa = cap - a * (a + 2)
    fb = cap - b * (b - 2)
    ok = (a + 2 <= two_j) & (b - 2 >= -two_j)
    prod = np.where(ok, fa * fb, 0).astype(np.float64)
    return -(delta_inv / 8.0) * np.sqrt(prod)


class SectorMatrix:
    """Symmetric sparse sector Hamiltonian.

    Stores the upper triangle as sorted triplets (rows <= cols) plus the
    full dense diagonal; a symmetrized CSR form is built lazily for
    matvec.
    """

    def __init__(self, dim, rows, cols, vals, diag, labels):
        self.dim = int(dim)
        self.rows = rows
        self.cols = cols
        self.vals = vals
        self.diag = diag
        self.labels = labels  # (two_j, length, two_m, delta_inv)
        self._csr = None
        self._norm1 = None

    @property
    def nnz(self) -> int:
        """Stored upper-triangle entries (including nonzero diagonal)."""
        return self.rows.shape[0]

    @property
    def nnz_offdiag(self) -> int:
        return int(np.count_nonzero(self.rows != self.cols))

    @property
    def norm1(self) -> float:
        if self._norm1 is None:
            colsum = np.abs(self.diag).copy()
            off = self.rows != self.cols
            np.add.at(colsum, self.rows[off], np.abs(self.vals[off]))
            np.add.at(colsum, self.cols[off], np.abs(self.vals[off]))
            self._norm1 = float(colsum.max()) if self.dim else 0.0
        return self._norm1

    def trace(self) -> float:
        return float(self.diag.sum())

    def csr(self):
        """(indptr, indices, data) of the full symmetric matrix."""
        if self._csr is None:
            off = self.rows != self.cols
            r, c, v = self.rows[off], self.cols[off], self.vals[off]
            dnz = np.abs(self.diag) > STORE_TOL
            di = np.nonzero(dnz)[0].astype(self.rows.dtype)
            rf = np.concatenate([r, c, di])
            cf = np.concatenate([c, r, di])
            vf = np.concatenate([v, v, self.diag[dnz]])
            order = np.lexsort((cf, rf))
            rf, cf, vf = rf[order], cf[order], vf[order]
            indptr = np.zeros(self.dim + 1, dtype=np.int64)
            np.cumsum(np.bincount(rf, minlength=self.dim), out=indptr[1:])
            self._csr = (indptr, cf.astype(np.int32), vf)
        return self._csr

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim))
        out[np.arange(self.dim), np.arange(self.dim)] = self.diag
        off = self.rows != self.cols
        out[self.rows[off], self.cols[off]] = self.vals[off]
        out[self.cols[off], self.rows[off]] = self.vals[off]
        return out

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return matvec(self, x)


if USING_NUMBA:

    @njit(cache=True)
    def _csr_matvec_kernel(indptr, indices, data, x, out):  # pragma: no cover
        n = out.shape[0]
        for i in range(n):
            s = 0.0
            for jj in range(indptr[i], indptr[i + 1]):
                s += data[jj] * x[indices[jj]]
            out[i] = s


def _csr_matvec_numpy(indptr, indices, data, x):
    out = np.zeros(indptr.shape[0] - 1)
    if data.shape[0] == 0:
        return out
    prod = data * x[indices]
    starts = indptr[:-1]
    # reduceat misreads empty segments (it returns prod[start] instead of
    # 0, and rejects start == len(prod)), so patch those rows afterwards;
    # empty rows do occur, e.g. the classical kink row at the Ising limit.
    safe = np.minimum(starts, prod.shape[0] - 1)
    out = np.add.reduceat(prod, safe)
    out[indptr[:-1] == indptr[1:]] = 0.0
    return out


def matvec(matrix: SectorMatrix, x: np.ndarray) -> np.ndarray:
    """y = H x with a fixed per-row summation order."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (matrix.dim,):
        raise DomainError(f"vector has shape {x.shape}, expected ({matrix.dim},)")
    indptr, indices, data = matrix.csr()
    if USING_NUMBA:
        out = np.empty(matrix.dim)
        _csr_matvec_kernel(indptr, indices, data, x, out)
        return out
    return _csr_matvec_numpy(indptr, indices, data, x)


def assemble_sector(params: SpinParams, two_m: int, hop_sign: float = 1.0) -> SectorMatrix:
    """Assemble H restricted to the sector with total doubled value two_m.

    hop_sign = -1 builds the staggered conjugate H(-Delta^{-1}) used by
    the spectrum-equivalence check; everything else is identical.
    """
    basis = SectorBasis(params, two_m)
    return assemble_from_basis(basis, hop_sign)


def assemble_from_basis(basis: SectorBasis, hop_sign: float = 1.0) -> SectorMatrix:
    params = basis.params
    two_j, length = params.two_j, params.length
    configs = basis.configs
    dim = basis.dim

    a = configs[:, :-1].astype(np.int64)
    b = configs[:, 1:].astype(np.int64)
    diag = (
        (two_j * two_j - a * b) + params.a_delta * two_j * (a - b)
    ).sum(axis=1) / 4.0

    rows_parts, cols_parts, vals_parts = [], [], []
    if params.delta_inv > 0.0:
        for p in range(length - 1):
            av = configs[:, p].astype(np.int64)
            bv = configs[:, p + 1].astype(np.int64)
            movable = (av + 2 <= two_j) & (bv - 2 >= -two_j)
            if not movable.any():
                continue
            src = np.nonzero(movable)[0]
            amps = hop_sign * np.asarray(
                hop_amplitude(two_j, av[src], bv[src], params.delta_inv)
            )
            targets = configs[src].astype(np.int64)
            targets[:, p] += 2
            targets[:, p + 1] -= 2
            tgt = _rank_many(targets, two_j, length, basis.two_m)
            # raising the more significant site makes the target rank larger
            rows_parts.append(src.astype(np.int64))
            cols_parts.append(tgt)
            vals_parts.append(amps)

    dnz = np.nonzero(np.abs(diag) > STORE_TOL)[0]
    if rows_parts:
        rows = np.concatenate([np.concatenate(rows_parts), dnz])
        cols = np.concatenate([np.concatenate(cols_parts), dnz])
        vals = np.concatenate([np.concatenate(vals_parts), diag[dnz]])
    else:
        rows, cols, vals = dnz.copy(), dnz.copy(), diag[dnz]
    keep = np.abs(vals) > STORE_TOL
    rows, cols, vals = rows[keep], cols[keep], vals[keep]
    order = np.lexsort((cols, rows))
    labels = (two_j, length, basis.two_m, params.delta_inv)
    return SectorMatrix(dim, rows[order], cols[order], vals[order], diag, labels)


def staggered_conjugate_spectrum_check(params: SpinParams, two_m: int, tol: float = 1e-9) -> bool:
    """True iff flipping the sign of every hop term leaves the sector
    spectrum unchanged (rotating every other site conjugates the two)."""
    from scipy.linalg import eigvalsh

    plus = assemble_sector(params, two_m, hop_sign=1.0)
    if plus.dim > DENSE_CHECK_LIMIT:
        raise ResourceRefusal(
            f"sector dim {plus.dim} exceeds dense-check limit {DENSE_CHECK_LIMIT}"
        )
    minus = assemble_sector(params, two_m, hop_sign=-1.0)
    ev_plus = eigvalsh(plus.to_dense())
    ev_minus = eigvalsh(minus.to_dense())
    return bool(np.max(np.abs(ev_plus - ev_minus)) <= tol)


def dump_triplets(matrix: SectorMatrix, stream) -> None:
    """Write `dim nnz` then one `row col value` line per stored entry,
    values at 17 significant digits."""
    own = isinstance(stream, (str, bytes))
    fh = open(stream, "w") if own else stream
    try:
        fh.write(f"{matrix.dim} {matrix.nnz}\n")
        for r, c, v in zip(matrix.rows, matrix.cols, matrix.vals):
            fh.write("%d %d %.17g\n" % (r, c, v))
    finally:
        if own:
            fh.close()


def load_triplets(stream) -> tuple:
    """Inverse of dump_triplets; returns (dim, rows, cols, vals)."""
    own = isinstance(stream, (str, bytes))
    fh = open(stream) if own else stream
    try:
        dim, nnz = (int(t) for t in fh.readline().split())
        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz)
        for i in range(nnz):
            r, c, v = fh.readline().split()
            rows[i], cols[i], vals[i] = int(r), int(c), float(v)
        return dim, rows, cols, vals
    finally:
        if own:
            fh.close()
