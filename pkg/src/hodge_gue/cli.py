"""Command line driver.  Every command streams JSON lines (or CSV) with exact
``p/q`` rationals and exits 0 on success, 1 on a verification mismatch and 2
on bad input."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from typing import Callable, Iterable

import gmpy2

from . import correspondence, genus_zero, hodge, jets, ribbon
from .algebra import format_rational

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    D: int = 6
    K: int = 4
    G: int = 5
    threads: int = 1
    extended: bool = False
    format: str = "json"

    def validate(self) -> "RunConfig":
        if self.D < 1:
            raise UsageError("--D must be >= 1")
        if self.K < 1:
            raise UsageError("--K must be >= 1")
        if not 0 <= self.G <= 5:
            raise UsageError("--G must be in 0..5")
        if self.threads < 1:
            raise UsageError("--threads must be >= 1")
        return self


def _plain(value):
    if isinstance(value, type(gmpy2.mpq())):
        return format_rational(value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


class Emitter:
    def __init__(self, fmt: str, out=None):
        self.fmt = fmt
        self.out = out or sys.stdout
        self.rows: list[dict] = []

    def emit(self, row: dict) -> None:
        row = _plain(row)
        if self.fmt == "json":
            self.out.write(json.dumps(row, sort_keys=True) + "\n")
        else:
            self.rows.append(row)

    def close(self) -> None:
        if self.fmt != "csv" or not self.rows:
            return
        fields = sorted({k for r in self.rows for k in r})
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for r in self.rows:
            writer.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v
                             for k, v in r.items()})
        self.out.write(buf.getvalue())


def _check(emit: Emitter, name: str, ok: bool, **extra) -> bool:
    emit.emit({"check": name, "pass": bool(ok), **extra})
    return bool(ok)


# -- commands ------------------------------------------------------------------

def verify_genus0(cfg: RunConfig, emit: Emitter) -> bool:
    residual = genus_zero.genus0_identity_residual(cfg.K, cfg.D)
    ok = _check(emit, "genus0-identity", residual.is_zero(), K=cfg.K, D=cfg.D,
                nonzero_terms=len(residual.raw_terms()))
    w = genus_zero.solve_w(cfg.K, cfg.D)
    ok &= _check(emit, "w-lagrange", w == genus_zero.explicit_w(cfg.K, cfg.D), K=cfg.K, D=cfg.D)
    return ok


def verify_jets(cfg: RunConfig, emit: Emitter) -> bool:
    diff = correspondence.genus_one_difference()
    ok = _check(emit, "genus1-jet", jets.d0(diff).is_zero(), difference=diff.to_text())
    H = {1: jets.builtin_H(1), 2: jets.builtin_H(2)}
    ok &= _check(emit, "genus2-jet", correspondence.conjecture_rhs_jet(2, H) == jets.builtin_F(2))
    derived = correspondence.hodge_free_energies(max(cfg.G, 2))
    for g in range(3, cfg.G + 1):
        Hg = derived[g]
        structure = (not Hg.depends_on_v() and Hg.logcoef == 0
                     and Hg.max_index() <= jets.max_jet_index(g))
        rt = correspondence.conjecture_rhs_jet(g, derived) == jets.builtin_F(g)
        ok &= _check(emit, f"derived-H{g}", structure and rt, structure=structure, round_trip=rt,
                     monomials=len(Hg))
    return ok


def verify_conjecture(cfg: RunConfig, emit: Emitter) -> bool:
    report = correspondence.full_conjecture_check(cfg.G, cfg.K, cfg.D, workers=cfg.threads)
    for row in report.rows:
        if not row["equal"]:
            emit.emit({"check": "conjecture-monomial", **row})
    for g, good in sorted(report.genus_ok.items()):
        emit.emit({"check": "conjecture-genus", "genus": g, "pass": good, "K": cfg.K, "D": cfg.D,
                   "independent": g <= 2,
                   "monomials": sum(1 for r in report.rows if r["genus"] == g)})
    return report.ok


def verify_qmatrix(cfg: RunConfig, emit: Emitter) -> bool:
    P = hodge.Partition.of
    ok = True
    for rho, mu, expected in [(P(1), P(1), 1), (P(2), P(2), 1), (P(2), P(1, 1), -3), (P(), P(), 1)]:
        value = hodge.q_matrix(rho, mu)
        ok &= _check(emit, "qmatrix-pinned", value == expected, rho=list(rho.parts),
                     mu=list(mu.parts), value=value)
    bad = [(r.parts, m.parts) for n in range(7) for r in hodge.partitions(n)
           for m in hodge.partitions(n) if hodge.q_matrix(r, m) != hodge.q_matrix_bruteforce(r, m)]
    ok &= _check(emit, "qmatrix-bruteforce", not bad, max_weight=6, mismatches=[list(b) for b in bad])
    return ok


def verify_bernoulli(cfg: RunConfig, emit: Emitter) -> bool:
    ok = True
    for g in range(2, max(cfg.G, 2) + 1):
        try:
            value = correspondence.bernoulli_constant_check(g)
            ok &= _check(emit, "bernoulli", True, genus=g, constant=value, x_power=2 - 2 * g)
        except correspondence.VerificationError as exc:
            ok &= _check(emit, "bernoulli", False, genus=g, error=str(exc))
    return ok


def run_oracle(cfg: RunConfig, emit: Emitter, valencies: str, max_genus: int) -> bool:
    profile = ribbon.ValencyProfile.parse(valencies)
    budget = 16 if cfg.extended else 12
    if profile.halfedges > budget and profile.k == 1:
        counts = ribbon.one_vertex_counts(profile.i[0])
        method, total = "one-vertex-recurrence", sum(counts.values())
    else:
        census = ribbon.enumerate_matchings(profile, budget=budget, workers=cfg.threads)
        counts, method, total = census.counts, "enumeration", census.total
    emit.emit({"profile": list(profile.i), "method": method, "counts": counts,
               "matchings": total})
    rows = ribbon.compare_profile(profile, max_genus, counts=counts)
    for row in rows:
        good = row.pop("equal")
        emit.emit({"check": "oracle", **row, "pass": good})
        row["equal"] = good
    return all(r["equal"] for r in rows)


def derive_hodge(cfg: RunConfig, emit: Emitter) -> bool:
    H = correspondence.hodge_free_energies(max(cfg.G, 1))
    for g in range(1, cfg.G + 1):
        source = "builtin" if g <= 2 else "derived"
        f = H[g]
        for mono in f.monomials():
            emit.emit({"genus": g, "source": source, "monomial": jets._mono_text(mono) or "1",
                       "coefficient": f.rat[mono]})
        if f.logcoef:
            emit.emit({"genus": g, "source": source, "monomial": "log(v1)", "coefficient": f.logcoef})
    return True


def tables_polygons(cfg: RunConfig, emit: Emitter, valency: int, max_genus: int) -> bool:
    counts = ribbon.one_vertex_counts(valency)
    ok = True
    for g in range(min(max_genus, valency // 2) + 1):
        series = ribbon.extract_a_from_F(g, (valency,)) if g <= 5 else None
        good = series is None or series == counts.get(g, 0)
        ok &= good
        emit.emit({"valency": 2 * valency, "genus": g, "count": counts.get(g, 0),
                   "a": counts.get(g, 0), "series": series, "pass": good})
    return ok


def export_table(cfg: RunConfig, emit: Emitter, genus: int, output: str | None) -> bool:
    if not 2 <= genus <= 5:
        raise UsageError("--genus must be in 2..5")
    H = correspondence.hodge_free_energies(genus)[genus]
    table = hodge.stable_hodge_table(genus, H)
    if output:
        table.save(output)
    for record in table.records():
        emit.emit(record)
    return hodge.q_jet_expansion(genus, table) == H


# -- parser -------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--D", type=int, default=6, help="truncation degree in the couplings")
    p.add_argument("--K", type=int, default=4, help="number of couplings sbar_1..sbar_K")
    p.add_argument("--G", type=int, default=5, help="maximal genus")
    p.add_argument("--threads", type=int, default=None, help="worker processes (env HODGE_GUE_THREADS)")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hodge-gue", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run an identity check")
    verify.add_argument("target", choices=("genus0", "jets", "conjecture", "qmatrix", "bernoulli"))
    _common(verify)

    oracle = sub.add_parser("oracle", help="ribbon graph census against the series")
    oracle.add_argument("--valencies", required=True, help="comma separated indices i_j (valency 2 i_j)")
    oracle.add_argument("--max-genus", type=int, default=5)
    oracle.add_argument("--extended", action="store_true", help="allow up to 16 half-edges")
    _common(oracle)

    derive = sub.add_parser("derive", help="print Hodge free energies")
    derive.add_argument("target", choices=("hodge",))
    _common(derive)

    tables = sub.add_parser("tables", help="one-vertex gluing counts")
    tables.add_argument("target", choices=("polygons",))
    tables.add_argument("--valency", type=int, required=True, help="index m of a 2m-valent vertex")
    tables.add_argument("--max-genus", type=int, default=5)
    _common(tables)

    export = sub.add_parser("export", help="write a combined Hodge integral table")
    export.add_argument("target", choices=("table",))
    export.add_argument("--genus", type=int, required=True)
    export.add_argument("--output", default=None, help="also write the JSON-lines table here")
    _common(export)
    return parser


def _config(args) -> RunConfig:
    threads = args.threads
    if threads is None:
        try:
            threads = int(os.environ.get("HODGE_GUE_THREADS", "1"))
        except ValueError as exc:
            raise UsageError("HODGE_GUE_THREADS must be an integer") from exc
    return RunConfig(D=args.D, K=args.K, G=args.G, threads=threads,
                     extended=getattr(args, "extended", False), format=args.format).validate()


def run(argv: Iterable[str] | None = None, out=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(None if argv is None else list(argv))
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = _config(args)
        emit = Emitter(cfg.format, out)
        handlers: dict[tuple[str, str], Callable[[], bool]] = {
            ("verify", "genus0"): lambda: verify_genus0(cfg, emit),
            ("verify", "jets"): lambda: verify_jets(cfg, emit),
            ("verify", "conjecture"): lambda: verify_conjecture(cfg, emit),
            ("verify", "qmatrix"): lambda: verify_qmatrix(cfg, emit),
            ("verify", "bernoulli"): lambda: verify_bernoulli(cfg, emit),
            ("derive", "hodge"): lambda: derive_hodge(cfg, emit),
            ("tables", "polygons"): lambda: tables_polygons(cfg, emit, args.valency, args.max_genus),
            ("export", "table"): lambda: export_table(cfg, emit, args.genus, args.output),
        }
        if args.command == "oracle":
            ok = run_oracle(cfg, emit, args.valencies, args.max_genus)
        else:
            ok = handlers[(args.command, args.target)]()
        emit.close()
    except (UsageError, ValueError, ribbon.BudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AssertionError, ArithmeticError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK if ok else EXIT_MISMATCH


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
