"""Command-line front end: spectra, states, overlap tables, the verification
suite, and resumable parameter sweeps.

Exit codes: 0 success / all checks pass, 1 check failure, 2 usage or
validation error.  Floats are printed with 17 significant digits so CSV and
JSON outputs round-trip bit-exactly.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .basis import SectorBasis
from .operators import (
    BoundarySpec,
    DenseCapExceeded,
    HamiltonianHandle,
    assemble_dense,
)
from .qcore import params_from_delta, params_from_q
from .spectral import ConvergenceError, eig_dense, eig_lowest
from .states import (
    DropletSpec,
    KinkSpec,
    RingDropletSpec,
    build_droplet,
    build_kink,
    build_ring_droplet,
    droplet_overlap,
    droplet_positions,
    kink_norm_sq_closed,
    ring_translation_overlap_closed,
    ring_translation_overlap_direct,
)
from .verify import REGISTRY, run_check, suite

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def _fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".17g")


def _params_from_args(args):
    if getattr(args, "q", None) is not None and getattr(args, "delta", None) is not None:
        raise ValueError("give either --q or --delta, not both")
    if getattr(args, "delta", None) is not None:
        return params_from_delta(args.delta)
    q = args.q if getattr(args, "q", None) is not None else 0.25
    return params_from_q(q)


def _write_text(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    tmp = tempfile.NamedTemporaryFile(
        "w", dir=os.path.dirname(os.path.abspath(path)) or ".", delete=False
    )
    try:
        tmp.write(text)
        tmp.close()
        os.replace(tmp.name, path)
    except BaseException:
        os.unlink(tmp.name)
        raise


# ---------------------------------------------------------------------------
# spectrum


def _sector_eigenvalues(L, n, bc, params, solver, k, tol, seed, cap):
    sector = SectorBasis.build((1, L), n)
    h = HamiltonianHandle((1, L), bc, params)
    if solver == "dense":
        return eig_dense(h, sector, cap=cap).eigenvalues
    kk = min(k, sector.dim)
    return eig_lowest(h, sector, kk, tol=tol, seed=seed).eigenvalues


def cmd_spectrum(args) -> int:
    params = _params_from_args(args)
    bc = BoundarySpec.from_code(args.bc)
    if args.all_sectors:
        sectors = range(0, args.L + 1)
    elif args.n is not None:
        if not 0 <= args.n <= args.L:
            raise ValueError(f"sector n={args.n} outside [0,{args.L}]")
        sectors = [args.n]
    else:
        raise ValueError("need --n or --all-sectors")
    lines = ["sector_n,index,eigenvalue"]
    for n in sectors:
        vals = _sector_eigenvalues(
            args.L, n, bc, params, args.solver, args.k, args.tol, args.seed, args.cap
        )
        lines.extend(
            f"{n},{i},{_fmt(v)}" for i, v in enumerate(vals)
        )
    _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    if args.all:
        reports = suite(args.profile)
    elif args.check:
        overrides = {}
        for key in ("L", "n", "q", "l", "source", "l_max"):
            val = getattr(args, key, None)
            if val is not None:
                overrides[key] = val
        if args.lam is not None:
            overrides["lam"] = args.lam
        if args.L_list is not None:
            overrides["L_list"] = tuple(int(s) for s in args.L_list.split(","))
        reports = [run_check(args.check, **overrides)]
    else:
        raise ValueError("need --check NAME or --all")
    payload = json.dumps([r.to_json_dict() for r in reports], indent=2, sort_keys=True)
    if args.out:
        _write_text(args.out, payload + "\n")
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name} margin={_fmt(r.margin)} params={json.dumps(r.parameters, sort_keys=True)}")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# sweep


def _parse_int_list(text: str) -> list[int]:
    out = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if ":" in chunk:
            lo, hi = chunk.split(":")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(chunk))
    return out


def _record_key(L, n, q, bc, solver):
    return f"{L}/{n}/{_fmt(q)}/{bc}/{solver}"


def _sweep_point(task):
    L, n, q, bc_code, solver, k, tol, seed, cap = task
    params = params_from_q(q)
    bc = BoundarySpec.from_code(bc_code)
    vals = _sector_eigenvalues(L, n, bc, params, solver, k, tol, seed, cap)
    vals = np.asarray(vals)
    band_width = None
    gap = None
    if bc_code == "++":
        m = L - n + 1
        if len(vals) >= m:
            band_width = float(np.max(np.abs(vals[:m] - params.a_field)))
        if len(vals) > m:
            gap = float(vals[m] - vals[m - 1])
    elif bc_code == "ring":
        if len(vals) >= L:
            band_width = float(np.max(np.abs(vals[:L] - 2 * params.a_field)))
        if len(vals) > L:
            gap = float(vals[L] - vals[L - 1])
    elif len(vals) > 1:
        gap = float(vals[1] - vals[0])
    return {
        "key": _record_key(L, n, q, bc_code, solver),
        "L": L,
        "n": n,
        "q": q,
        "bc": bc_code,
        "solver": solver,
        "eigenvalues": [float(v) for v in vals[: (k if solver != "dense" else len(vals))]],
        "band_width": band_width,
        "gap": gap,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "version": __version__,
    }


def cmd_sweep(args) -> int:
    Ls = _parse_int_list(args.L)
    qs = [float(s) for s in args.q.split(",")]
    grid = []
    for L in Ls:
        if args.n == "all":
            ns = list(range(0, L + 1))
        else:
            ns = _parse_int_list(args.n)
        for n in ns:
            if not 0 <= n <= L:
                raise ValueError(f"grid point n={n} invalid for L={L}")
            if args.solver == "lanczos" and min(args.k, 1) < 1:
                raise ValueError("lanczos needs k >= 1")
            for q in qs:
                if not 0 < q < 1:
                    raise ValueError(f"grid q={q} outside (0,1)")
                grid.append((L, n, q, args.bc, args.solver, args.k, args.tol, args.seed, args.cap))
    BoundarySpec.from_code(args.bc)

    existing: dict[str, str] = {}
    if os.path.exists(args.out) and not args.force:
        with open(args.out) as fh:
            for line in fh:
                line = line.strip()
                if line:
                    existing[json.loads(line)["key"]] = line
    todo = [t for t in grid if _record_key(t[0], t[1], t[2], t[3], t[4]) not in existing]

    def flush(records: dict[str, str]):
        ordered = list(records.values())
        _write_text(args.out, "\n".join(ordered) + ("\n" if ordered else ""))

    records = dict(existing)
    if args.workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            for rec in pool.map(_sweep_point, todo):
                records[rec["key"]] = json.dumps(rec, sort_keys=True)
                flush(records)
    else:
        for task in todo:
            rec = _sweep_point(task)
            records[rec["key"]] = json.dumps(rec, sort_keys=True)
            flush(records)
    if not todo and not existing:
        flush(records)
    print(f"sweep: {len(todo)} computed, {len(existing)} already present -> {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# state / overlap tables


def cmd_state(args) -> int:
    params = _params_from_args(args)
    if args.kind in ("kink", "antikink"):
        v = build_kink(KinkSpec((1, args.L), args.n, args.kind, params))
        closed = kink_norm_sq_closed(args.L, args.n, params.q)
    elif args.kind == "droplet":
        if args.x is None:
            raise ValueError("droplet needs --x (cut site)")
        v = build_droplet(DropletSpec(args.L, args.n, args.x, params))
        closed = None
    elif args.kind == "ring-droplet":
        if args.x is None:
            raise ValueError("ring-droplet needs --x (shift)")
        v = build_ring_droplet(RingDropletSpec(args.L, args.n, args.x, params))
        closed = None
    else:
        raise ValueError(f"unknown state kind {args.kind!r}")
    lines = ["configuration,amplitude"]
    for i in range(v.basis.dim):
        bits = format(int(v.basis.masks[i]), f"0{args.L}b")[::-1]
        lines.append(f"{bits},{_fmt(v.amplitudes[i])}")
    norm2 = v.dot(v)
    lines.append(f"# norm_sq,{_fmt(norm2)}")
    if closed is not None:
        lines.append(f"# norm_sq_closed,{_fmt(closed)}")
    _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_overlap(args) -> int:
    params = _params_from_args(args)
    L, n = args.L, args.n
    if args.bc == "ring":
        lines = ["shift,overlap_direct,overlap_closed"]
        for x in range(0, L // 2 + 1):
            d = ring_translation_overlap_direct(L, n, x, params)
            c = ring_translation_overlap_closed(L, n, x, params.q)
            lines.append(f"{x},{_fmt(d)},{_fmt(c)}")
    else:
        lines = ["x,y,overlap,decay_bound"]
        from .qcore import fq_infinity

        xs = list(droplet_positions(L, n))
        for i, x in enumerate(xs):
            for y in xs[i:]:
                val = droplet_overlap(
                    DropletSpec(L, n, x, params), DropletSpec(L, n, y, params)
                )
                bnd = params.q ** (n * (y - x)) / fq_infinity(params.q)
                lines.append(f"{x},{y},{_fmt(val)},{_fmt(bnd)}")
    _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xxzdroplet",
        description="Sector-resolved spectra, droplet states, and bound checks "
        "for the gapped ferromagnetic XXZ chain.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, with_n=True):
        sp.add_argument("--L", type=int, required=True, help="chain length")
        if with_n:
            sp.add_argument("--n", type=int, default=None, help="down-spin sector")
        sp.add_argument("--q", type=float, default=None, help="anisotropy parameter q")
        sp.add_argument("--delta", type=float, default=None, help="anisotropy Delta (> 1)")
        sp.add_argument("--cap", type=int, default=None,
                        help="dense dimension cap (default 20000 or $XXZ_DENSE_CAP)")

    sp = sub.add_parser("spectrum", help="write sector eigenvalues as CSV")
    common(sp)
    sp.add_argument("--bc", default="++", help="boundary: +-, -+, ++, --, 00, ring")
    sp.add_argument("--all-sectors", action="store_true")
    sp.add_argument("--solver", choices=("dense", "lanczos"), default="dense")
    sp.add_argument("--k", type=int, default=5, help="eigenvalue count (lanczos)")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None, help="output CSV path (default stdout)")
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("verify", help="run named checks and report pass/fail")
    sp.add_argument("--check", default=None, help=f"one of: {', '.join(sorted(REGISTRY))}")
    sp.add_argument("--all", action="store_true", help="run a whole suite")
    sp.add_argument("--profile", choices=("quick", "full"), default="quick")
    sp.add_argument("--L", type=int, default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--q", type=float, default=None)
    sp.add_argument("--l", type=int, default=None, help="block length (polarized_interval)")
    sp.add_argument("--lambda", dest="lam", type=float, default=None,
                    help="gap parameter (epsilon_lambda)")
    sp.add_argument("--source", default=None, help="state source (polarized_interval)")
    sp.add_argument("--l-max", dest="l_max", type=int, default=None,
                    help="sweep limit (appendix_closed_forms)")
    sp.add_argument("--L-list", dest="L_list", default=None,
                    help="comma list (truncation_convergence)")
    sp.add_argument("--out", default=None, help="write the JSON report here")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sweep", help="resumable eigenvalue sweep to JSON lines")
    sp.add_argument("--L", required=True, help="comma/range list, e.g. 8,10 or 8:12")
    sp.add_argument("--n", default="all", help="comma/range list or 'all'")
    sp.add_argument("--q", default="0.25", help="comma list of q values")
    sp.add_argument("--bc", default="++")
    sp.add_argument("--solver", choices=("dense", "lanczos"), default="dense")
    sp.add_argument("--k", type=int, default=5)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cap", type=int, default=None)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--force", action="store_true", help="recompute existing keys")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("state", help="write a state's amplitude table")
    common(sp)
    sp.add_argument("--kind", choices=("kink", "antikink", "droplet", "ring-droplet"),
                    required=True)
    sp.add_argument("--x", type=int, default=None, help="droplet cut / ring shift")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_state)

    sp = sub.add_parser("overlap", help="droplet overlap tables")
    common(sp)
    sp.add_argument("--bc", default="++", help="'ring' switches to translation overlaps")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_overlap)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (ValueError, KeyError, TypeError, DenseCapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
