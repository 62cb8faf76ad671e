"""Machine-readable datasets behind the six survey plots.

Each figure becomes one CSV of exactly the plotted quantities plus a
sidecar JSON recording every parameter used, so the plots are
reproducible without rerunning the science code.
"""

from __future__ import annotations

import math
import os

import numpy as np

from ._serialize import render_csv, render_json
from .basis import SpinParams
from .boson import boson_matrix, jacobi_operator
from .eigensolve import full_spectrum, lowest_k
from .errors import DomainError
from .hamiltonian import assemble_sector
from .sos_bound import delta_and_bound

__all__ = ["half_filling_n_down", "emit_figures", "FIGURE1_SETS", "FIGURE2_SETS"]

# (two_j, length, Delta): four sector-resolved spectra
FIGURE1_SETS = [(1, 10, 2.0), (2, 7, 4.0), (3, 6, 4.0), (4, 5, 8.0)]

# (two_j, n, length): ladder-bound curves near half filling
FIGURE2_SETS = [(7, 1, 4), (4, 0, 6), (8, 1, 4), (5, 0, 5),
                (6, 0, 4), (7, 0, 4), (8, 0, 4), (9, 0, 3)]


def half_filling_n_down(two_j: int, length: int, n: int) -> int:
    """Down-unit count N closest to half filling with N = n (mod 2J);
    ties resolve to the smaller N (the two candidates give mirror
    sectors with equal gaps)."""
    if not 0 <= n < two_j:
        raise DomainError(f"interface residue n must lie in [0, {two_j - 1}], got {n}")
    half = (two_j * length) // 2
    base = half - ((half - n) % two_j)  # largest N <= half with N = n (mod 2J)
    candidates = [c for c in (base, base + two_j) if 0 <= c <= two_j * length]
    return min(candidates, key=lambda c: (abs(c - half), c))


def _figure1():
    rows = []
    for idx, (two_j, length, delta) in enumerate(FIGURE1_SETS, start=1):
        params = SpinParams(two_j, length, 1.0 / delta)
        for two_m in range(-two_j * length, two_j * length + 1, 2):
            evs = full_spectrum(assemble_sector(params, two_m))
            for level, energy in enumerate(evs):
                rows.append({
                    "chain_index": idx, "two_j": two_j, "length": length,
                    "delta": delta, "two_m": two_m, "level": level,
                    "energy": float(energy),
                })
    sidecar = {
        "figure": 1,
        "content": "full sector spectra of four finite chains",
        "parameter_sets": [
            {"two_j": tj, "length": L, "delta": d} for tj, L, d in FIGURE1_SETS
        ],
    }
    fields = ["chain_index", "two_j", "length", "delta", "two_m", "level", "energy"]
    return rows, fields, sidecar


def _figure2():
    grid = [round(0.02 + 0.04 * i, 2) for i in range(25)]  # 0.02 .. 0.98
    rows = []
    for idx, (two_j, n, length) in enumerate(FIGURE2_SETS, start=1):
        n_down = half_filling_n_down(two_j, length, n)
        for dinv in grid:
            sb = delta_and_bound(length, two_j, n_down, dinv)
            rows.append({
                "set_index": idx, "two_j": two_j, "n": n, "length": length,
                "n_down": n_down, "delta_inv": dinv,
                "one_minus_delta": 1.0 - sb.delta, "bound": sb.bound,
            })
    sidecar = {
        "figure": 2,
        "content": "ladder-reduction curves 1 - delta and the gap bound vs delta_inv",
        "parameter_sets": [
            {"two_j": tj, "n": n, "length": L,
             "n_down": half_filling_n_down(tj, L, n)}
            for tj, n, L in FIGURE2_SETS
        ],
        "delta_inv_grid": grid,
    }
    fields = ["set_index", "two_j", "n", "length", "n_down", "delta_inv",
              "one_minus_delta", "bound"]
    return rows, fields, sidecar


def _figure3():
    two_j, length, two_m, levels = 8, 4, 0, 6
    grid = [round(0.1 + 0.05 * i, 2) for i in range(17)]  # 0.10 .. 0.90
    rows = []
    for dinv in grid:
        params = SpinParams(two_j, length, dinv)
        matrix = assemble_sector(params, two_m)
        exact = lowest_k(matrix, k=levels + 1).eigenvalues
        for level in range(1, levels + 1):
            rows.append({"delta_inv": dinv, "series": "exact", "level": level,
                         "energy": float(exact[level])})
        r = 0.5 * (length + 1)  # two_m = 0 centers the interface
        lam = boson_matrix(length, params.eta, r).eigenvalues()[1:]  # drop zero mode
        # free-boson predictions: occupation sums over the nonzero modes
        sums = {0.0}
        for mode in lam:
            sums = {s + k * float(mode) for s in sums for k in range(levels + 1)}
        predicted = sorted(s for s in sums if s > 0.0)[:levels]
        for level, energy in enumerate(predicted, start=1):
            rows.append({"delta_inv": dinv, "series": "boson", "level": level,
                         "energy": float(0.5 * two_j * energy)})
    sidecar = {
        "figure": 3,
        "content": "exact low excitation energies (circles) vs J*lambda_k of the "
                   "boson coupling matrix (lines)",
        "two_j": two_j, "length": length, "two_m": two_m,
        "levels": levels, "delta_inv_grid": grid,
    }
    return rows, ["delta_inv", "series", "level", "energy"], sidecar


def _figure4():
    truncation = 50
    r_grid = [round(0.05 * i, 2) for i in range(21)]          # 0.00 .. 1.00
    dinv_grid = [round(0.05 + 0.05 * i, 2) for i in range(19)]  # 0.05 .. 0.95
    rows = []
    for r in r_grid:
        for dinv in dinv_grid:
            eta = math.acosh(1.0 / dinv)
            low = jacobi_operator(truncation, eta, r).eigenvalues(k=2)
            rows.append({"r": r, "delta_inv": dinv, "gamma_inf": float(low[1])})
    sidecar = {
        "figure": 4,
        "content": "asymptotic gap surface over (r, delta_inv); second-smallest "
                   "eigenvalue of the truncated Jacobi operator (the smallest is "
                   "the near-zero mode, not asserted at this coarse truncation)",
        "truncation": truncation, "r_grid": r_grid, "delta_inv_grid": dinv_grid,
    }
    return rows, ["r", "delta_inv", "gamma_inf"], sidecar


def _boson_spectrum_rows(length: int, r: float, grid: list[float]):
    rows = []
    for dinv in grid:
        eta = math.acosh(1.0 / dinv)
        evs = boson_matrix(length, eta, r).eigenvalues()
        rows.append((dinv, evs))
    return rows


def _figure5():
    length, r = 50, 25.5
    grid = [round(0.05 + 0.05 * i, 2) for i in range(19)]
    rows = []
    for dinv, evs in _boson_spectrum_rows(length, r, grid):
        for level, lam in enumerate(evs):
            rows.append({"delta_inv": dinv, "level": level, "lambda": float(lam)})
    sidecar = {
        "figure": 5,
        "content": "spectrum of the boson coupling matrix vs anisotropy",
        "length": length, "r": r, "delta_inv_grid": grid,
    }
    return rows, ["delta_inv", "level", "lambda"], sidecar


def _figure6():
    length, r, multiples = 50, 25.5, 6
    grid = [round(0.05 + 0.05 * i, 2) for i in range(19)]
    rows = []
    for dinv, evs in _boson_spectrum_rows(length, r, grid):
        for level, lam in enumerate(evs):
            rows.append({"delta_inv": dinv, "series": "eigenvalue",
                         "level": level, "value": float(lam)})
        for m in range(1, multiples + 1):
            rows.append({"delta_inv": dinv, "series": "multiple",
                         "level": m, "value": float(m * evs[1])})
    sidecar = {
        "figure": 6,
        "content": "boson coupling spectrum plus integer multiples of the lowest "
                   "boson energy",
        "length": length, "r": r, "multiples": multiples, "delta_inv_grid": grid,
    }
    return rows, ["delta_inv", "series", "level", "value"], sidecar


_BUILDERS = {1: _figure1, 2: _figure2, 3: _figure3, 4: _figure4, 5: _figure5, 6: _figure6}


def emit_figures(which: str, outdir: str) -> list[str]:
    """Write figure CSVs plus parameter sidecars; returns the paths."""
    if which == "all":
        numbers = sorted(_BUILDERS)
    else:
        try:
            numbers = [int(which)]
        except (TypeError, ValueError):
            raise DomainError(f"which must be 1..6 or 'all', got {which!r}") from None
        if numbers[0] not in _BUILDERS:
            raise DomainError(f"which must be 1..6 or 'all', got {which!r}")
    os.makedirs(outdir, exist_ok=True)
    paths = []
    for number in numbers:
        rows, fields, sidecar = _BUILDERS[number]()
        csv_path = os.path.join(outdir, f"figure{number}.csv")
        json_path = os.path.join(outdir, f"figure{number}.json")
        with open(csv_path, "w", newline="") as fh:
            fh.write(render_csv(rows, fields))
        with open(json_path, "w", newline="") as fh:
            fh.write(render_json(sidecar))
        paths.extend([csv_path, json_path])
    return paths
