"""Command-line driver: configuration, the analysis run and exit codes."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from ..analysis import CANDIDATE, INCONCLUSIVE, NO_NONTRIVIAL, IntegralSearch, verdict
from ..exactla import write_triplets
from ..metric import MetricSpec, load_metric_file, zipoy_voorhees
from .cache import MatrixCache, resolve_cache_dir
from .geodesic import DEFAULT_MOMENTA, DEFAULT_POSITION, GeodesicSingularityError, geodesic_sanity
from .report import FORMATS, emit_report

log = logging.getLogger("zvkilling")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CANDIDATE = 2
EXIT_INCONCLUSIVE = 3

BUILTIN_ZV = "builtin:zipoy-voorhees"
REPORT_GEODESIC_STEPS = 10_000

TRIVIAL_SCOPE_NOTE = ("trivial integrals are those generated by H and the two cyclic momenta; "
                      "metrics with further symmetries have a larger trivial family")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    metric: str = BUILTIN_ZV
    delta: int = 2
    degree: int = 6
    parities: Tuple[str, ...] = ("odd", "even")
    point: Tuple[Fraction, Fraction] = (Fraction(1, 2), Fraction(2))
    max_prolong: Optional[int] = None
    rank_method: str = "both"
    primes: Optional[List[int]] = None
    prime_count: int = 2
    out: Optional[Path] = None
    format: str = "text"
    cache_dir: Optional[Path] = None
    emit_matrix: Optional[Path] = None
    seed: int = 0
    geodesic_steps: int = REPORT_GEODESIC_STEPS

    def __post_init__(self):
        if self.degree < 1:
            raise ConfigError("degree must be at least 1")
        if self.max_prolong is None:
            self.max_prolong = self.degree + 1
        if self.max_prolong < 0:
            raise ConfigError("max-prolong must be non-negative")
        if self.rank_method not in ("exact", "modular", "both"):
            raise ConfigError(f"unknown rank method {self.rank_method!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}")
        for p in self.parities:
            if p not in ("odd", "even", "mixed"):
                raise ConfigError(f"unknown parity {p!r}")

    def to_dict(self) -> dict:
        return {"metric": self.metric, "delta": self.delta if self.metric == BUILTIN_ZV else None,
                "degree": self.degree, "parities": list(self.parities), "point": [str(v) for v in self.point],
                "max_prolong": self.max_prolong, "rank_method": self.rank_method,
                "primes": list(self.primes) if self.primes else None, "prime_count": self.prime_count,
                "seed": self.seed}


def parse_point(text: str) -> Tuple[Fraction, Fraction]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"point must be two comma-separated rationals, got {text!r}")
    try:
        return Fraction(parts[0]), Fraction(parts[1])
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"point coordinates must be exact rationals such as 1/2, got {text!r}") from None


def parse_primes(text: str) -> Tuple[Optional[List[int]], int]:
    """``N`` (a count of random primes) or an explicit ``p1,p2,...`` list."""
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--primes takes a count or a comma-separated list of primes, got {text!r}") from None
    if not values:
        raise ConfigError("--primes is empty")
    if len(values) == 1 and "," not in text and values[0] < 1 << 16:
        if values[0] < 1:
            raise ConfigError("prime count must be positive")
        return None, values[0]
    return values, len(values)


def load_metric(config: RunConfig) -> MetricSpec:
    if config.metric == BUILTIN_ZV:
        if config.delta < 0:
            raise ConfigError("delta must be a non-negative integer")
        return zipoy_voorhees(config.delta)
    if config.metric.startswith("builtin:"):
        raise ConfigError(f"unknown builtin metric {config.metric!r}; available: {BUILTIN_ZV}")
    return load_metric_file(config.metric)


def _overall(outcomes: Sequence[str]) -> Tuple[str, int]:
    if all(o == NO_NONTRIVIAL for o in outcomes):
        return NO_NONTRIVIAL, EXIT_OK
    if CANDIDATE in outcomes:
        return CANDIDATE, EXIT_CANDIDATE
    return INCONCLUSIVE, EXIT_INCONCLUSIVE


def _progress(parity: str, row, started: float) -> None:
    state = "certified" if row.certified else "uncertified"
    print(f"[{parity}] n={row.n}: {row.num_equations} x {row.dim_u}, nnz {row.nnz}, "
          f"max entry {row.max_entry_bits} bits, rank {row.rank}, Delta {row.delta} ({state}) "
          f"{time.perf_counter() - started:.1f}s", file=sys.stderr, flush=True)


def run(config: RunConfig, progress: bool = False) -> dict:
    """Full analysis; returns the report as a JSON-compatible dict."""
    t0 = time.perf_counter()
    metric = load_metric(config)
    report = {"config": config.to_dict(), "parity_results": [], "notes": [TRIVIAL_SCOPE_NOTE]}
    timing = {"levels": {}, "finite_type": {}}
    if not config.parities:
        report["overall"] = {"outcome": NO_NONTRIVIAL, "exit_code": EXIT_OK}
        report["timing"] = {"total_seconds": time.perf_counter() - t0}
        return report
    point = dict(zip(metric.base_coords, config.point))
    store = None
    cache_dir = resolve_cache_dir(str(config.cache_dir) if config.cache_dir else None)
    if cache_dir is not None:
        store = MatrixCache(cache_dir)
    search = IntegralSearch(metric, config.degree, point, rank_method=config.rank_method, primes=config.primes,
                            prime_count=config.prime_count, seed=config.seed, store=store)
    parities = list(config.parities)
    if parities == ["odd", "even"] and not search.hamiltonian.is_parity_even():
        report["notes"].append("the Hamiltonian mixes parities; the full system is analysed as one block")
        parities = ["mixed"]
    if config.emit_matrix is not None:
        Path(config.emit_matrix).mkdir(parents=True, exist_ok=True)

    def on_level(parity, row, matrix):
        now = time.perf_counter()
        timing["levels"].setdefault(parity, []).append({"n": row.n, "seconds": now - on_level.last})
        on_level.last = now
        if progress:
            _progress(parity, row, t0)
        if config.emit_matrix is not None:
            write_triplets(matrix, Path(config.emit_matrix) / f"{parity}_degree{config.degree}_n{row.n}.txt")

    search.on_level = on_level
    outcomes = []
    for parity in parities:
        t1 = time.perf_counter()
        ft = search.finite_type(parity, config.max_prolong)
        timing["finite_type"][parity] = time.perf_counter() - t1
        on_level.last = time.perf_counter()
        stop_from = ft.ell if ft.ell is not None else config.max_prolong + 1
        table = search.delta_table(parity, config.max_prolong, min_stop_level=stop_from, confirm_levels=1)
        v = verdict(table, ft, search.system(parity))
        outcomes.append(v.outcome)
        basis = search.basis(parity)
        report["parity_results"].append({
            "parity": parity,
            "delta_table": {"rows": [r.to_dict() for r in table.rows], "trivial_dim": table.trivial_dim,
                            "trivial_generators": [basis.label(k) for k in range(len(basis))],
                            "notes": table.notes},
            "finite_type": {"rows": [r.to_dict() for r in ft.rows], "ell": ft.ell},
            "verdict": v.to_dict(),
            "certification": {"method": config.rank_method, "point": [str(x) for x in config.point],
                              "primes": sorted({p for r in table.rows for p in r.primes}),
                              "levels": [{"n": r.n, "certified": r.certified, "certificate": r.certificate,
                                          "kernel_contains_trivial": r.kernel_contains_trivial}
                                         for r in table.rows]},
        })
    outcome, code = _overall(outcomes)
    report["overall"] = {"outcome": outcome, "exit_code": code}
    if config.metric == BUILTIN_ZV and config.geodesic_steps:
        try:
            geo = geodesic_sanity(metric, DEFAULT_POSITION, DEFAULT_MOMENTA, steps=config.geodesic_steps)
            report["geodesic_sanity"] = geo.to_dict()
        except GeodesicSingularityError as e:
            report["geodesic_sanity"] = {"label": "non-rigorous floating-point sanity check", "error": str(e),
                                         "step": e.step}
    timing["total_seconds"] = time.perf_counter() - t0
    if store is not None:
        timing["cache"] = {"hits": store.hits, "misses": store.misses}
    report["timing"] = timing
    return report


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="zvkilling",
        description="Decide whether a stationary axisymmetric metric admits polynomial first integrals "
                    "of a given degree by prolongation and exact rank computation.")
    ap.add_argument("--metric", default=BUILTIN_ZV, help=f"'{BUILTIN_ZV}' or a metric file path")
    ap.add_argument("--delta", type=int, default=2, help="Zipoy-Voorhees parameter (integer >= 0)")
    ap.add_argument("--degree", type=int, default=6, help="degree of the integral in the momenta")
    ap.add_argument("--parity", choices=("odd", "even", "both"), default="both")
    ap.add_argument("--point", default="1/2,2", help="evaluation point 'x,y' as exact rationals")
    ap.add_argument("--max-prolong", type=int, default=None, help="largest prolongation level (default degree+1)")
    ap.add_argument("--rank-method", choices=("exact", "modular", "both"), default="both")
    ap.add_argument("--primes", default=None, help="number of random primes, or a comma-separated prime list")
    ap.add_argument("--out", default=None, help="write the report here instead of stdout")
    ap.add_argument("--format", choices=FORMATS, default="text")
    ap.add_argument("--cache-dir", default=None, help="matrix cache directory (default $ZVKILLING_CACHE_DIR)")
    ap.add_argument("--emit-matrix", default=None, metavar="DIR",
                    help="write every assembled matrix to DIR in sparse triplet format")
    return ap


def config_from_args(args: argparse.Namespace) -> RunConfig:
    primes, count = (None, 2) if args.primes is None else parse_primes(args.primes)
    parities = ("odd", "even") if args.parity == "both" else (args.parity,)
    return RunConfig(metric=args.metric, delta=args.delta, degree=args.degree, parities=parities,
                     point=parse_point(args.point), max_prolong=args.max_prolong, rank_method=args.rank_method,
                     primes=primes, prime_count=count, out=Path(args.out) if args.out else None,
                     format=args.format, cache_dir=Path(args.cache_dir) if args.cache_dir else None,
                     emit_matrix=Path(args.emit_matrix) if args.emit_matrix else None)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        config = config_from_args(args)
        report = run(config, progress=True)
        data = emit_report(report, config.format)
        if config.out is not None:
            config.out.write_bytes(data)
        else:
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
    except Exception as e:  # every failure maps to exit code 1
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    return report["overall"]["exit_code"]
