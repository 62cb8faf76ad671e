"""Command-line front end.

Every command emits a single OutputRecord: JSON by default (metadata +
payload + diagnostics, floats at 17 significant digits) or bare CSV rows
with --format csv.  Reruns with identical flags are byte-identical; wall
time is only recorded under --timing for that reason.

Exit codes: 0 success; 2 usage error (bad flags, domain violations,
desk-scale refusals — add --force to lift the soft caps); 1 numerical
failure, with a diagnostic record on stdout.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from dataclasses import asdict
from fractions import Fraction

from . import __version__
from ._backend import set_threads
from ._serialize import render_csv, render_json
from .basis import SectorBasis, SpinParams, sector_dimension
from .boson import (boson_vs_exact, jacobi_operator, optimal_anisotropy_scan,
                    solve_interface_phase)
from .eigensolve import full_spectrum, lowest_k, spectral_gap
from .errors import ConsistencyError, DomainError, NonConvergenceError, ResourceRefusal
from .figures import emit_figures
from .hamiltonian import assemble_sector
from .ising_perturb import centered_two_m, curvature_result, curvature_table, numeric_curvature
from .sos_bound import delta_and_bound

__all__ = ["main"]

_SECTOR_DIM_CAP = 5_000_000
_DENSE_CAP = 4000


def _parse_spin(text: str) -> int:
    """'3/2' or '2' -> two_j (denominator 1 or 2 only)."""
    try:
        frac = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise DomainError(f"cannot parse spin {text!r}") from None
    if frac.denominator not in (1, 2) or frac <= 0:
        raise DomainError(f"spin must be a positive multiple of 1/2, got {text!r}")
    return int(2 * frac)


def _resolve_two_j(args) -> int:
    if (args.two_j is None) == (args.spin is None):
        raise DomainError("exactly one of --two-j and --spin is required")
    return args.two_j if args.two_j is not None else _parse_spin(args.spin)


def _resolve_delta_inv(args) -> float:
    if (args.delta is None) == (args.delta_inv is None):
        raise DomainError("exactly one of --delta and --delta-inv is required")
    if args.delta is not None:
        if not args.delta > 1.0:
            raise DomainError(f"--delta must be > 1, got {args.delta!r}")
        return 1.0 / args.delta
    return args.delta_inv


def _check_sector_cap(two_j: int, length: int, two_m: int, force: bool) -> None:
    dim = sector_dimension(two_j, length, two_m)
    if dim > _SECTOR_DIM_CAP and not force:
        raise ResourceRefusal(
            f"sector dimension {dim} exceeds {_SECTOR_DIM_CAP}; pass --force to proceed"
        )


def _interior_sectors(two_j: int, length: int) -> list[int]:
    top = two_j * length
    return list(range(-top + 2, top - 1, 2))


def _gap_row(report) -> dict:
    return {
        "two_m": report.two_m,
        "delta_inv": report.delta_inv,
        "ground_energy": report.ground_energy,
        "gap": report.gap,
        "excitation_multiplicity": report.excitation_multiplicity,
        "method": report.method,
    }


# ---------------------------------------------------------------------------
# Command bodies: each returns (payload, rows, fieldnames, diagnostics)
# ---------------------------------------------------------------------------


def _cmd_spectrum(args):
    two_j = _resolve_two_j(args)
    delta_inv = _resolve_delta_inv(args)
    params = SpinParams(two_j, args.length, delta_inv)
    if args.all_sectors:
        sector_list = _interior_sectors(two_j, args.length)
    elif args.two_m is not None:
        sector_list = [args.two_m]
    else:
        raise DomainError("need --two-m or --all-sectors")
    sectors = []
    rows = []
    for two_m in sector_list:
        _check_sector_cap(two_j, args.length, two_m, args.force)
        matrix = assemble_sector(params, two_m)
        if args.full:
            if matrix.dim > _DENSE_CAP and not args.force:
                raise ResourceRefusal(
                    f"dense dimension {matrix.dim} exceeds {_DENSE_CAP}; "
                    "pass --force to proceed"
                )
            if matrix.dim > _DENSE_CAP:
                result = lowest_k(matrix, k=matrix.dim, method="dense", tol=args.tol)
                evs = result.eigenvalues
                method = result.method
            else:
                evs = full_spectrum(matrix)
                method = "dense" if matrix.nnz_offdiag else "diagonal"
        else:
            k = min(args.k, matrix.dim)
            result = lowest_k(matrix, k=k, tol=args.tol)
            evs = result.eigenvalues
            method = result.method
        sectors.append({
            "two_m": two_m,
            "dim": matrix.dim,
            "method": method,
            "eigenvalues": [float(v) for v in evs],
        })
        rows.extend(
            {"two_m": two_m, "level": i, "energy": float(v)}
            for i, v in enumerate(evs)
        )
    payload = {"sectors": sectors}
    diagnostics = {"tol": args.tol, "full": bool(args.full)}
    return payload, rows, ["two_m", "level", "energy"], diagnostics


def _cmd_gap(args):
    two_j = _resolve_two_j(args)
    delta_inv = _resolve_delta_inv(args)
    params = SpinParams(two_j, args.length, delta_inv)
    _check_sector_cap(two_j, args.length, args.two_m, args.force)
    report = spectral_gap(params, args.two_m, tol=args.tol, k=args.k)
    payload = asdict(report)
    diagnostics = {"tol": args.tol, "k": args.k, "zero_threshold": report.zero_threshold}
    return payload, [_gap_row(report)], list(_gap_row(report)), diagnostics


def _cmd_gap_scan(args):
    two_j = _resolve_two_j(args)
    if args.delta_inv_grid is not None:
        grid = [float(tok) for tok in args.delta_inv_grid.split(",") if tok.strip()]
        if not grid:
            raise DomainError("--delta-inv-grid parsed to an empty list")
    else:
        grid = [_resolve_delta_inv(args)]
    if args.all_sectors:
        sector_list = _interior_sectors(two_j, args.length)
    elif args.two_m is not None:
        sector_list = [args.two_m]
    else:
        raise DomainError("need --two-m or --all-sectors")
    rows = []
    for delta_inv in grid:
        params = SpinParams(two_j, args.length, delta_inv)
        for two_m in sector_list:
            _check_sector_cap(two_j, args.length, two_m, args.force)
            report = spectral_gap(params, two_m, tol=args.tol)
            rows.append(_gap_row(report))
    payload = {"gaps": rows}
    diagnostics = {"tol": args.tol, "delta_inv_grid": grid, "sectors": sector_list}
    return payload, rows, list(rows[0]), diagnostics


def _cmd_sos_bound(args):
    two_j = _resolve_two_j(args)
    delta_inv = _resolve_delta_inv(args)
    if (args.n_down is None) == (args.two_m is None):
        raise DomainError("exactly one of --n-down and --two-m is required")
    if args.n_down is not None:
        n_down = args.n_down
    else:
        doubled = two_j * args.length - args.two_m
        if doubled % 2 != 0 or not 0 <= doubled // 2 <= two_j * args.length:
            raise DomainError(
                f"--two-m {args.two_m} is not a valid sector of this chain"
            )
        n_down = doubled // 2
    result = delta_and_bound(args.length, two_j, n_down, delta_inv)
    payload = asdict(result)
    row = {k: payload[k] for k in
           ("two_j", "length", "n_down", "delta_inv", "delta", "bound", "size")}
    diagnostics = {"overlap_matrix_size": result.size, "q": result.q}
    return payload, [row], list(row), diagnostics


def _fraction_str(value: Fraction | None) -> str:
    return str(value) if value is not None else "-inf"


def _cmd_curvature(args):
    if args.table:
        results = curvature_table(args.max_two_j)
        rows = [{
            "two_j": r.two_j,
            "spin": str(Fraction(r.two_j, 2)),
            "n": r.n,
            "curvature": _fraction_str(r.curvature_rational),
            "curvature_float": r.curvature,
            "degenerate": r.degenerate,
            "infinite": r.infinite,
        } for r in results]
        payload = {"table": rows}
        return payload, rows, list(rows[0]), {"max_two_j": args.max_two_j}

    two_j = _resolve_two_j(args)
    if args.n is None:
        raise DomainError("--n is required without --table")
    analytic = curvature_result(two_j, args.n)
    payload = {
        "two_j": analytic.two_j,
        "n": analytic.n,
        "curvature": _fraction_str(analytic.curvature_rational),
        "curvature_float": analytic.curvature,
        "degenerate": analytic.degenerate,
        "infinite": analytic.infinite,
    }
    diagnostics: dict = {}
    if args.numeric:
        params = SpinParams(two_j, args.length, args.h)
        two_m = centered_two_m(two_j, args.length, args.n)
        numeric = numeric_curvature(params, two_m, tol=args.tol)
        payload["numeric"] = numeric
        payload["two_m"] = two_m
        if analytic.infinite:
            payload["abs_error"] = None
            payload["rel_error"] = None
        else:
            payload["abs_error"] = abs(numeric - analytic.curvature)
            payload["rel_error"] = (
                abs(numeric - analytic.curvature) / abs(analytic.curvature)
                if analytic.curvature != 0.0 else None
            )
        diagnostics = {"length": args.length, "h": args.h, "tol": args.tol}
    return payload, [payload], list(payload), diagnostics


def _cmd_boson(args):
    two_j = _resolve_two_j(args)
    delta_inv = _resolve_delta_inv(args)
    comparison = boson_vs_exact(two_j, args.length, delta_inv, args.two_m)
    payload = asdict(comparison)
    return payload, [payload], list(payload), {"zero_mode_tol": 1e-10}


def _cmd_jacobi(args):
    delta_inv = _resolve_delta_inv(args)
    if not 0.0 < delta_inv < 1.0:
        raise DomainError(f"delta_inv must lie in (0, 1), got {delta_inv!r}")
    eta = math.acosh(1.0 / delta_inv)
    phase = solve_interface_phase(args.mu, eta, window=args.truncation, tol=args.tol)
    op = jacobi_operator(args.truncation, eta, phase.r)
    low = op.eigenvalues(k=2)
    if low[0] > args.tol:
        raise ConsistencyError(
            f"smallest eigenvalue {float(low[0])!r} exceeds tol {args.tol!r}: "
            "zero mode not resolved; increase --truncation"
        )
    payload = {
        "gamma_inf": float(low[1]),
        "lambda0": float(low[0]),
        "mu": args.mu,
        "delta_inv": delta_inv,
        "eta": eta,
        "r": phase.r,
        "phase_residual": phase.residual,
        "truncation": args.truncation,
        "window": list(op.window),
    }
    if args.dump_matrix:
        payload["diag"] = [float(v) for v in op.diag]
        payload["offdiag"] = [float(v) for v in op.offdiag]
    row = {k: payload[k] for k in ("mu", "delta_inv", "eta", "r", "gamma_inf", "truncation")}
    return payload, [row], list(row), {"tol": args.tol}


def _cmd_optimal_delta(args):
    grid = None
    if args.grid is not None:
        grid = [float(tok) for tok in args.grid.split(",") if tok.strip()]
    result = optimal_anisotropy_scan(
        truncation=args.truncation, grid=grid,
        refine_tol=args.refine_tol, tol=args.tol,
    )
    payload = {
        "delta_inv": result.delta_inv,
        "gamma": result.gamma,
        "truncation": result.truncation,
        "refine_tol": result.refine_tol,
        "unimodal": result.unimodal,
        "local_maxima": [
            {"delta_inv": d, "gamma": g} for d, g in result.local_maxima
        ],
    }
    rows = [
        {"delta_inv": d, "gamma": g, "is_global": (d == result.delta_inv)}
        for d, g in result.local_maxima
    ]
    return payload, rows, ["delta_inv", "gamma", "is_global"], {"tol": args.tol}


def _cmd_figures(args):
    paths = emit_figures(args.which, args.outdir)
    payload = {"written": paths}
    rows = [{"path": p} for p in paths]
    return payload, rows, ["path"], {"outdir": args.outdir}


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xxz-gap",
        description="Spectral gaps of the kink XXZ chain: exact diagonalization, "
                    "ladder lower bounds, Ising perturbation, and large-spin "
                    "asymptotics.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    # argparse parents share action objects, so every subparser gets freshly
    # built parents (a set_defaults on one would otherwise leak to all).
    def common(tol_default: float = 1e-9) -> argparse.ArgumentParser:
        parent = argparse.ArgumentParser(add_help=False)
        parent.add_argument("--format", choices=("json", "csv"), default="json")
        parent.add_argument("--output", default=None, metavar="PATH")
        parent.add_argument("--timing", action="store_true",
                            help="record wall time (off by default so reruns are "
                                 "byte-identical)")
        parent.add_argument("--threads", type=int, default=None)
        parent.add_argument("--force", action="store_true",
                            help="lift the desk-scale refusal caps")
        parent.add_argument("--tol", type=float, default=tol_default)
        return parent

    def spin() -> argparse.ArgumentParser:
        parent = argparse.ArgumentParser(add_help=False)
        parent.add_argument("--two-j", type=int, dest="two_j", default=None)
        parent.add_argument("--spin", default=None, help="e.g. 3/2 or 2")
        return parent

    def aniso() -> argparse.ArgumentParser:
        parent = argparse.ArgumentParser(add_help=False)
        parent.add_argument("--delta", type=float, default=None)
        parent.add_argument("--delta-inv", type=float, dest="delta_inv", default=None)
        return parent

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common(), spin(), aniso()],
                       help="low (or full) sector spectra")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--two-m", type=int, dest="two_m", default=None)
    p.add_argument("--all-sectors", action="store_true")
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--full", action="store_true")
    p.set_defaults(body=_cmd_spectrum)

    p = sub.add_parser("gap", parents=[common(), spin(), aniso()],
                       help="ground energy and spectral gap of one sector")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--two-m", type=int, dest="two_m", required=True)
    p.add_argument("--k", type=int, default=4)
    p.set_defaults(body=_cmd_gap)

    p = sub.add_parser("gap-scan", parents=[common(), spin(), aniso()],
                       help="gaps over sectors and/or an anisotropy grid")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--two-m", type=int, dest="two_m", default=None)
    p.add_argument("--all-sectors", action="store_true")
    p.add_argument("--delta-inv-grid", default=None,
                   help="comma-separated delta_inv values")
    p.set_defaults(body=_cmd_gap_scan)

    p = sub.add_parser("sos-bound", parents=[common(), spin(), aniso()],
                       help="ladder lower bound 2J(1-delta_inv)(1-delta)")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--n-down", type=int, dest="n_down", default=None)
    p.add_argument("--two-m", type=int, dest="two_m", default=None)
    p.set_defaults(body=_cmd_sos_bound)

    p = sub.add_parser("curvature", parents=[common(), spin()],
                       help="Ising-limit gap coefficients, analytic and numeric")
    p.add_argument("--table", action="store_true")
    p.add_argument("--max-two-j", type=int, dest="max_two_j", default=6)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--numeric", action="store_true")
    p.add_argument("--length", type=int, default=8)
    p.add_argument("--h", type=float, default=0.02)
    p.set_defaults(body=_cmd_curvature)

    p = sub.add_parser("boson", parents=[common(), spin(), aniso()],
                       help="exact sector gap vs the boson coupling prediction")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--two-m", type=int, dest="two_m", required=True)
    p.set_defaults(body=_cmd_boson)

    p = sub.add_parser("jacobi", parents=[common(1e-10), aniso()],
                       help="asymptotic gap from the truncated Jacobi operator")
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--truncation", type=int, default=200)
    p.add_argument("--dump-matrix", action="store_true", dest="dump_matrix")
    p.set_defaults(body=_cmd_jacobi)

    p = sub.add_parser("optimal-delta", parents=[common(1e-10)],
                       help="anisotropy maximizing the asymptotic gap at mu=0")
    p.add_argument("--truncation", type=int, default=500)
    p.add_argument("--refine-tol", type=float, dest="refine_tol", default=1e-6)
    p.add_argument("--grid", default=None, help="comma-separated delta_inv grid")
    p.set_defaults(body=_cmd_optimal_delta)

    p = sub.add_parser("figures", parents=[common()],
                       help="write the per-figure CSV datasets")
    p.add_argument("--which", default="all", choices=[str(i) for i in range(1, 7)] + ["all"])
    p.add_argument("--outdir", default="figures")
    p.set_defaults(body=_cmd_figures)

    return parser


def _parameters_echo(args) -> dict:
    skip = {"body", "format", "output", "timing", "command"}
    return {
        key: value for key, value in sorted(vars(args).items())
        if key not in skip and value is not None
    }


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    threads = args.threads
    if threads is None:
        env = os.environ.get("XXZ_GAP_THREADS")
        if env:
            try:
                threads = int(env)
            except ValueError:
                print(f"error: XXZ_GAP_THREADS={env!r} is not an integer", file=sys.stderr)
                return 2
    if threads is not None:
        if threads < 1:
            print("error: --threads must be >= 1", file=sys.stderr)
            return 2
        set_threads(threads)

    started = time.perf_counter()
    try:
        payload, rows, fieldnames, diagnostics = args.body(args)
    except (DomainError, ResourceRefusal) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NonConvergenceError, ConsistencyError) as exc:
        record = {
            "command": args.command,
            "parameters": _parameters_echo(args),
            "version": __version__,
            "error": {
                "type": type(exc).__name__,
                "message": str(exc),
            },
        }
        if isinstance(exc, NonConvergenceError):
            if exc.ritz_values is not None:
                record["error"]["ritz_values"] = [float(v) for v in exc.ritz_values]
            if exc.iterations is not None:
                record["error"]["iterations"] = exc.iterations
        sys.stdout.write(render_json(record))
        return 1
    elapsed = time.perf_counter() - started

    if args.format == "csv":
        text = render_csv(rows, fieldnames)
    else:
        record = {
            "command": args.command,
            "parameters": _parameters_echo(args),
            "version": __version__,
            "wall_time": elapsed if args.timing else None,
            "payload": payload,
            "diagnostics": diagnostics,
        }
        text = render_json(record)

    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
