"""Command-line front end: sweeps and verification runs written as CSV or JSON.

    qvbs entropy-sweep --spin 2 --q 0.1:1:0.1 --alpha 0.5,2
    qvbs spectrum --spin 2 --q 0.5 --l 5
    qvbs oracle-verify --spin 1 --L-max 6 --q 0.5,1
    qvbs qcg-table --spin 2 --q 0.7
    qvbs transfer-spectrum --spin 3 --q 0.2:1:0.2

Exit status: 0 success, 1 failed verification, 2 usage or size-limit error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import SizeLimitError
from .mps import correlation_length, transfer_spectrum
from .oracle import MAX_STATE_DIM, crosscheck_rdm, hamiltonian_annihilation_check
from .qalgebra import DeformationContext, qcg
from .rdm import group_levels, rdm_finite_block, spectrum_of
from .spectra import perturbative_eigs, renyi_dsl, vn_dsl

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
ORACLE_PASS = 1e-8


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class SweepConfig:
    S: int
    q_grid: tuple
    alpha_grid: tuple = (2.0,)
    l_values: tuple = (math.inf,)
    out: str = "-"
    format: str = "csv"
    jobs: int = 1

    def __post_init__(self):
        if not self.q_grid or not self.alpha_grid or not self.l_values:
            raise UsageError("grids must be non-empty")
        if any(not (0.0 < q <= 1.0) for q in self.q_grid):
            raise UsageError("q values must lie in (0, 1]")
        if any(a <= 0 for a in self.alpha_grid):
            raise UsageError("alpha values must be positive")


def parse_grid(text: str) -> tuple:
    """'0.5', '0.1,0.4,1' or 'start:stop:step' (stop included when hit)."""
    text = text.strip()
    if not text:
        return ()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"bad range {text!r}, expected start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise UsageError(f"bad range {text!r}")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + k * step, 12) for k in range(n))
    return tuple(float(p) for p in text.split(",") if p.strip())


def parse_l(text: str) -> tuple:
    out = []
    for part in text.split(","):
        part = part.strip().lower()
        if part in ("inf", "infinity", "-1"):
            out.append(math.inf)
        else:
            v = int(part)
            if v < 1:
                raise UsageError("block length must be >= 1 or inf")
            out.append(v)
    return tuple(out)


def _fmt(x):
    if isinstance(x, float):
        return format(x, ".15g")
    return x


def _l_code(l):
    return -1 if l == math.inf else int(l)


def write_records(records: list, columns: list, out: str, fmt: str) -> None:
    """Header always emitted for CSV; JSON mirrors the same rows."""
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in records:
            w.writerow(["" if r[c] is None else _fmt(r[c]) for c in columns])
    else:
        rows = []
        for r in records:
            row = {}
            for c in columns:
                v = r[c]
                if isinstance(v, float):
                    v = None if not math.isfinite(v) else float(_fmt(v))
                row[c] = v
            rows.append(row)
        json.dump(rows, buf, indent=1)
        buf.write("\n")
    if out == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(out, "w", newline="") as fh:
            fh.write(buf.getvalue())


def _pmap(fn, items, jobs):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- commands


ENTROPY_COLUMNS = ["S", "q", "alpha", "l", "S_renyi", "S_vN"]


def cmd_entropy_sweep(cfg: SweepConfig) -> list:
    """Rows per (q, l): one per alpha, then a von Neumann row with alpha = -1."""
    points = [(q, l) for q in cfg.q_grid for l in cfg.l_values]

    def work(point):
        q, l = point
        ctx = DeformationContext(q)
        if l == math.inf:
            vn = vn_dsl(cfg.S, ctx)
            renyi = [vn if a == 1 else renyi_dsl(cfg.S, a, ctx) for a in cfg.alpha_grid]
        else:
            spec = spectrum_of(rdm_finite_block(cfg.S, l, ctx), ctx)
            vn = spec.von_neumann()
            renyi = [spec.renyi(a) for a in cfg.alpha_grid]
        code = _l_code(l)
        rows = [dict(S=cfg.S, q=q, alpha=a, l=code, S_renyi=r, S_vN=vn) for a, r in zip(cfg.alpha_grid, renyi)]
        rows.append(dict(S=cfg.S, q=q, alpha=-1, l=code, S_renyi=vn, S_vN=vn))
        return rows

    return [r for rows in _pmap(work, points, cfg.jobs) for r in rows]


SPECTRUM_COLUMNS = ["S", "q", "l", "sector_M", "p", "degeneracy", "epsilon", "epsilon_shifted", "p_perturbative"]


def _sector_values(spectrum) -> dict:
    out = {}
    for lv in spectrum.levels:
        for M, p in zip(lv.sectors, lv.raw()):
            out.setdefault(M, []).append(p)
    return {M: sorted(v, reverse=True) for M, v in out.items()}


def cmd_spectrum(cfg: SweepConfig, keep_zeros: bool = False) -> list:
    """One row per (eigenvalue, sector); ``degeneracy`` counts copies in that sector."""
    points = [(q, l) for q in cfg.q_grid for l in cfg.l_values]

    def work(point):
        q, l = point
        ctx = DeformationContext(q)
        spec = spectrum_of(rdm_finite_block(cfg.S, l, ctx), ctx)
        pert = None
        if q < 1 and l != math.inf:
            pert = _sector_values(perturbative_eigs(cfg.S, l, ctx))
        exact = _sector_values(spec)
        rows = []
        for M in sorted(exact):
            vals = exact[M]
            i = 0
            for lv in group_levels([(v, M) for v in vals], ctx.eps_degeneracy):
                p, count = lv.p, lv.degeneracy
                if p <= ctx.eps_zero and not keep_zeros:
                    i += count
                    continue
                pp = None
                if pert is not None:
                    pp = float(sum(pert[M][i : i + count]) / count)
                rows.append(
                    dict(
                        S=cfg.S,
                        q=q,
                        l=_l_code(l),
                        sector_M=M,
                        p=p,
                        degeneracy=count,
                        epsilon=-math.log(p) if p > 0 else math.inf,
                        p_perturbative=pp,
                    )
                )
                i += count
        # round the key so ties broken only by round-off sort by sector
        rows.sort(key=lambda r: (-round(r["p"], 12), r["sector_M"]))
        eps_min = min((r["epsilon"] for r in rows), default=0.0)
        for r in rows:
            r["epsilon_shifted"] = r["epsilon"] - eps_min
        return rows

    return [r for rows in _pmap(work, points, cfg.jobs) for r in rows]


ORACLE_COLUMNS = ["S", "q", "L", "l", "check_name", "residual"]


def cmd_oracle_verify(S: int, L_max: int, q_grid: tuple, jobs: int = 1) -> list:
    """Annihilation for L = 2..L_max and the spectral cross-check for every cut.

    ``l`` is 0 on annihilation rows, where no block is involved.
    """
    if (2 * S + 1) ** L_max > MAX_STATE_DIM:
        raise SizeLimitError(f"(2S+1)^L_max = {(2 * S + 1) ** L_max} exceeds {MAX_STATE_DIM}")
    points = [(q, L) for q in q_grid for L in range(2, L_max + 1)]

    def work(point):
        q, L = point
        ctx = DeformationContext(q)
        rows = [dict(S=S, q=q, L=L, l=0, check_name="annihilation", residual=hamiltonian_annihilation_check(S, L, ctx))]
        for l in range(1, L):
            rows.append(dict(S=S, q=q, L=L, l=l, check_name="rdm_crosscheck", residual=crosscheck_rdm(S, l, L, ctx)))
        return rows

    return [r for rows in _pmap(work, points, jobs) for r in rows]


QCG_COLUMNS = ["q", "two_j1", "two_m1", "two_j2", "two_m2", "two_J", "two_M", "value"]


def cmd_qcg_table(two_j1: int, two_j2: int, q_grid: tuple) -> list:
    rows = []
    for q in q_grid:
        for (m1, m2, J, M), v in qcg(two_j1, two_j2, DeformationContext(q)).items():
            rows.append(dict(q=q, two_j1=two_j1, two_m1=m1, two_j2=two_j2, two_m2=m2, two_J=J, two_M=M, value=float(v)))
    return rows


TRANSFER_COLUMNS = ["S", "q", "j", "lambda", "degeneracy", "ratio", "xi"]


def cmd_transfer_spectrum(cfg: SweepConfig) -> list:
    def work(q):
        ctx = DeformationContext(q)
        spec = transfer_spectrum(cfg.S, ctx)
        xi = correlation_length(cfg.S, ctx)
        return [
            dict(S=cfg.S, q=q, j=two_j // 2, degeneracy=deg, ratio=spec.ratio(two_j), xi=xi, **{"lambda": lam})
            for two_j, lam, deg in spec.lambdas
        ]

    return [r for rows in _pmap(work, cfg.q_grid, cfg.jobs) for r in rows]


# ---------------------------------------------------------------- argparse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spin", type=int, required=True, metavar="S", help="bond dimension minus one (site spin S)")
    common.add_argument("--q", default="1", help="value, comma list or start:stop:step")
    common.add_argument("--out", default="-", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for sweep points")

    parser = argparse.ArgumentParser(prog="qvbs", description="q-deformed VBS entanglement toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy-sweep", parents=[common], help="Renyi and von Neumann entropies")
    p.add_argument("--alpha", default="2")
    p.add_argument("--l", default="inf", help="block lengths, comma list; 'inf' for the infinite block")

    p = sub.add_parser("spectrum", parents=[common], help="block entanglement spectrum")
    p.add_argument("--l", default="inf")
    p.add_argument("--keep-zeros", action="store_true", help="also list zero eigenvalues")

    p = sub.add_parser("oracle-verify", parents=[common], help="brute-force checks on small rings")
    p.add_argument("--L-max", type=int, default=6, dest="L_max")

    p = sub.add_parser("qcg-table", parents=[common], help="q-Clebsch-Gordan table")
    p.add_argument("--two-j1", type=int, default=None, help="doubled first spin (default S)")
    p.add_argument("--two-j2", type=int, default=None, help="doubled second spin (default S)")

    sub.add_parser("transfer-spectrum", parents=[common], help="transfer-matrix eigenvalues")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.spin < 1:
            raise UsageError("--spin must be a positive integer")
        if args.jobs < 1:
            raise UsageError("--jobs must be positive")
        q_grid = parse_grid(args.q)
        cmd = args.command
        if cmd == "oracle-verify":
            SweepConfig(args.spin, q_grid)
            if args.L_max < 2:
                raise UsageError("--L-max must be at least 2")
            rows = cmd_oracle_verify(args.spin, args.L_max, q_grid, args.jobs)
            write_records(rows, ORACLE_COLUMNS, args.out, args.format)
            failed = [r for r in rows if not r["residual"] < ORACLE_PASS]
            for r in failed:
                print(
                    f"FAIL {r['check_name']} S={r['S']} q={r['q']} L={r['L']} l={r['l']} residual={r['residual']:.3e}",
                    file=sys.stderr,
                )
            return EXIT_FAIL if failed else EXIT_OK
        if cmd == "qcg-table":
            SweepConfig(args.spin, q_grid)
            j1 = args.spin if args.two_j1 is None else args.two_j1
            j2 = args.spin if args.two_j2 is None else args.two_j2
            if j1 < 0 or j2 < 0:
                raise UsageError("doubled spins must be non-negative")
            write_records(cmd_qcg_table(j1, j2, q_grid), QCG_COLUMNS, args.out, args.format)
            return EXIT_OK
        if cmd == "transfer-spectrum":
            cfg = SweepConfig(args.spin, q_grid, out=args.out, format=args.format, jobs=args.jobs)
            write_records(cmd_transfer_spectrum(cfg), TRANSFER_COLUMNS, args.out, args.format)
            return EXIT_OK
        l_values = parse_l(args.l)
        if cmd == "entropy-sweep":
            cfg = SweepConfig(args.spin, q_grid, parse_grid(args.alpha), l_values, args.out, args.format, args.jobs)
            write_records(cmd_entropy_sweep(cfg), ENTROPY_COLUMNS, args.out, args.format)
            return EXIT_OK
        cfg = SweepConfig(args.spin, q_grid, (2.0,), l_values, args.out, args.format, args.jobs)
        write_records(cmd_spectrum(cfg, args.keep_zeros), SPECTRUM_COLUMNS, args.out, args.format)
        return EXIT_OK
    except (UsageError, SizeLimitError, ValueError) as exc:
        print(f"qvbs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
