"""Command line front end.

Exit codes: 0 when every requested check passes, 1 when one fails, 2 for an
invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .beilinson import (
    MmPair,
    ResolutionBundle,
    build_B,
    build_koszul,
    build_Mm,
    closed_form_differential,
    verify_augmentation,
)
from .complexes import TwistComplex, check_d_squared, is_chain_map
from .errors import ChainMapError, FieldError, RangeError, UnsupportedTwistRange, WPSError, WrongVariant
from .graded_core import FieldConfig, WeightVector
from .ktheory_x import HypersurfaceModel, chi_X_twist, ktheory_json, verify_fano_identity, verify_monodromy_identity
from .report import VerificationReport
from .sheaf_cohomology import (
    verify_Blk_cohomology,
    verify_diagonal_resolution,
    verify_koszul_exactness,
    verify_Mres,
)

CONFIG_ERRORS = (RangeError, FieldError, WrongVariant, UnsupportedTwistRange, ValueError)


@dataclass
class RunConfig:
    weights: WeightVector
    field: FieldConfig
    degree_bound: int | None = None
    degree: int | None = None
    k: int | None = None
    m: int | None = None
    mutate: bool = False

    @property
    def D(self) -> int:
        return 3 * self.weights.total if self.degree_bound is None else self.degree_bound


# --- mutations ------------------------------------------------------------------

def flip_first_entry(C: TwistComplex, j: int = -1) -> TwistComplex:
    """Negate the first (row, col) entry of d^j; a single-sign mutation."""
    mat = C.d(j)
    if not mat:
        raise RangeError(f"d^{j} is zero, nothing to mutate")
    key = min(mat)
    return C.with_entry(j, *key, mat[key] * -1)


def flip_eps_sign(pair: MmPair) -> MmPair:
    keys = sorted((j, rc) for j, mat in pair.eps.maps.items() for rc in mat)
    # prefer a component in negative degree, the ones carrying Koszul signs
    j, (r, c) = next((key for key in keys if key[0] < 0), keys[0])
    eps = pair.eps.with_entry(j, r, c, pair.eps[j][(r, c)] * -1)
    return MmPair(pair.weights, pair.m, pair.pushforward, pair.rho, pair.M, eps)


# --- commands -------------------------------------------------------------------

def run_construction(cfg: RunConfig) -> VerificationReport:
    """d^2 = 0 everywhere, mu_k chain maps, recursion = closed form, augmentation."""
    w = cfg.weights
    report = VerificationReport("construction", w.weights, {"mutated": cfg.mutate})
    bundle = ResolutionBundle(w)
    R = bundle.resolution
    if cfg.mutate:
        R = flip_first_entry(R)
    report.absorb(check_d_squared(build_koszul(w)))
    for l in range(1 - w.total, 1):
        report.absorb(check_d_squared(build_B(w, l)))
    for k in range(1 - w.total, 0):
        report.absorb(is_chain_map(bundle.mu(k)))
    for k in range(1 - w.total, 1):
        Rk = R if k == 1 - w.total else bundle.R(k)
        report.absorb(check_d_squared(Rk))
        closed = closed_form_differential(w, k)
        if not Rk.same_labeled_data(closed):
            report.fail(f"R_{k} differs from the closed form")
    report.absorb(verify_augmentation(w, R))
    report.details["term_counts"] = [R.rank(j) for j in sorted(R.terms, reverse=True)]
    return report


def run_diagonal(cfg: RunConfig) -> VerificationReport:
    w = cfg.weights
    bundle = ResolutionBundle(w)
    R = flip_first_entry(bundle.resolution) if cfg.mutate else bundle.resolution
    ks = [cfg.k] if cfg.k is not None else list(range(1 - w.total, 1))
    report = VerificationReport("diagonal_resolution", w.weights, {"D": cfg.D, "k": ks, "field": str(cfg.field)})
    for k in ks:
        report.absorb(verify_diagonal_resolution(w, k, cfg.D, cfg.field, resolution=R))
    return report


def run_mres(cfg: RunConfig) -> VerificationReport:
    w = cfg.weights
    ms = [cfg.m] if cfg.m is not None else list(range(1, w.total))
    report = VerificationReport("Mres", w.weights, {"D": cfg.D, "m": ms, "field": str(cfg.field)})
    bundle = ResolutionBundle(w)
    for m in ms:
        pair = build_Mm(w, m, bundle)
        if cfg.mutate:
            pair = flip_eps_sign(pair)
        report.absorb(verify_Mres(w, m, cfg.D, cfg.field, pair=pair))
    return report


def _model(cfg: RunConfig) -> HypersurfaceModel:
    model = HypersurfaceModel(cfg.weights, cfg.degree)
    if not cfg.mutate:
        return model
    # chi(O_X) + 1: equals 1 in the Calabi-Yau case, and still a change when chi(O_X) = 1
    return HypersurfaceModel(cfg.weights, cfg.degree, chi0_override=chi_X_twist(model, 0) + 1)


def run_ktheory(cfg: RunConfig) -> VerificationReport:
    return verify_monodromy_identity(_model(cfg))


def run_fano(cfg: RunConfig) -> VerificationReport:
    return verify_fano_identity(_model(cfg))


RUNNERS = {
    "verify-d2": run_construction,
    "verify-diagonal": run_diagonal,
    "verify-blk": lambda cfg: verify_Blk_cohomology(cfg.weights, cfg.field),
    "verify-koszul": lambda cfg: verify_koszul_exactness(cfg.weights, field=cfg.field),
    "verify-mres": run_mres,
    "ktheory": run_ktheory,
    "fano": run_fano,
}

SWEEP_CHECKS = {
    "d2": "verify-d2",
    "blk": "verify-blk",
    "koszul": "verify-koszul",
    "diagonal": "verify-diagonal",
    "mres": "verify-mres",
    "ktheory": "ktheory",
    "fano": "fano",
}


# --- output ----------------------------------------------------------------------

def _text(report: VerificationReport, depth: int = 0) -> str:
    lines = ["  " * depth + report.summary().replace("\n", "\n" + "  " * depth)]
    for child in report.children:
        lines.append(_text(child, depth + 1))
    return "\n".join(lines)


def render(command: str, report: VerificationReport, fmt: str, timings: bool) -> str:
    if fmt == "text":
        return _text(report)
    if command in ("ktheory", "fano"):
        payload = ktheory_json(report)
        if timings:
            payload["seconds"] = round(report.seconds or 0.0, 4)
        return json.dumps(payload, indent=2, sort_keys=True)
    return report.to_json(timings)


def emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# --- sweep -------------------------------------------------------------------------

def _sweep_row(task):
    lineno, weights, check, degree = task
    t0 = time.perf_counter()
    row = {"line": lineno, "weights": ",".join(map(str, weights)), "check": check}
    try:
        w = WeightVector(weights)
        cfg = RunConfig(w, FieldConfig(), degree=degree if check == "fano" else None)
        report = RUNNERS[SWEEP_CHECKS[check]](cfg)
        row["pass"] = report.passed
        row["period"] = report.details.get("minimal_period")
        row["warning"] = ""
    except CONFIG_ERRORS as exc:
        row.update({"pass": None, "period": None, "warning": f"invalid: {exc}"})
    row["seconds"] = round(time.perf_counter() - t0, 3)
    return row


def read_weight_file(path: str):
    """Yield (line number, weights or None, raw text) for non-blank, non-comment lines."""
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            try:
                weights = tuple(int(tok) for tok in text.split(","))
            except ValueError:
                weights = None
            yield lineno, weights, text


def worker_count() -> int:
    env = os.environ.get("WPS_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def sweep(path: str, checks: list[str], degree: int | None = None, workers: int | None = None) -> list[dict]:
    rows: list[dict] = []
    tasks = []
    for lineno, weights, text in read_weight_file(path):
        if weights is None:
            rows.append({"line": lineno, "weights": text, "check": "-", "pass": None,
                         "period": None, "warning": f"unparseable line {text!r}", "seconds": 0.0})
            continue
        for check in checks:
            tasks.append((lineno, weights, check, degree))
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
            rows.extend(pool.map(_sweep_row, tasks))
    else:
        rows.extend(map(_sweep_row, tasks))
    rows.sort(key=lambda r: (r["line"], r["check"]))
    return rows


SWEEP_FIELDS = ["line", "weights", "check", "pass", "period", "seconds", "warning"]


def render_sweep(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2, sort_keys=True)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in SWEEP_FIELDS})
    return buf.getvalue().rstrip("\n")


# --- entry point --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wps-beilinson", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, mutate=True):
        p.add_argument("--weights", required=True, help="comma separated, e.g. 1,1,2")
        p.add_argument("--field", default="q", help="q (rationals) or fp:P")
        p.add_argument("--degree-bound", type=int, default=None, help="strand bound D (default 3w)")
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=["json", "text"], default="json")
        p.add_argument("--timings", action="store_true", help="include wall-clock seconds in JSON")
        if mutate:
            p.add_argument("--mutate-sign", action="store_true", help="flip one sign (mutation harness)")
        return p

    p = common(sub.add_parser("resolve", help="build R_k and print it"), mutate=False)
    p.add_argument("--k", type=int, default=None, help="default 1-w")
    p.add_argument("--closed-form", action="store_true", help="build from the closed-form differential")
    common(sub.add_parser("verify-d2", help="d^2, chain maps, closed form, augmentation"))
    p = common(sub.add_parser("verify-diagonal", help="resolution of the diagonal on strands"))
    p.add_argument("--k", type=int, default=None, help="single k (default all -w<k<=0)")
    common(sub.add_parser("verify-blk", help="cohomology table of B_l(k)"), mutate=False)
    common(sub.add_parser("verify-koszul", help="Koszul strands"), mutate=False)
    p = common(sub.add_parser("verify-mres", help="cone of eps_m is acyclic"))
    p.add_argument("--m", type=int, default=None, help="single m (default all 0<m<w)")
    p = common(sub.add_parser("ktheory", help="G^w = Id on the twist lattice"))
    p.add_argument("--degree", type=int, default=None, help="hypersurface degree (must equal w)")
    p = common(sub.add_parser("fano", help="(G|_D)^d = Id on the orthogonal sublattice"))
    p.add_argument("--degree", type=int, default=None, help="hypersurface degree, 0<d<=w (default w)")

    p = sub.add_parser("sweep", help="run checks over a file of weight vectors")
    p.add_argument("file")
    p.add_argument("--checks", default="ktheory", help=",".join(SWEEP_CHECKS))
    p.add_argument("--degree", type=int, default=None, help="degree for the fano check")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    return parser


def _config(args) -> RunConfig:
    w = WeightVector.parse(args.weights)
    field = FieldConfig.parse(args.field)
    field.check_for(w)
    return RunConfig(
        w,
        field,
        degree_bound=args.degree_bound,
        degree=getattr(args, "degree", None),
        k=getattr(args, "k", None),
        m=getattr(args, "m", None),
        mutate=getattr(args, "mutate_sign", False),
    )


def dispatch(args) -> int:
    if args.command == "sweep":
        checks = [c.strip() for c in args.checks.split(",") if c.strip()]
        unknown = [c for c in checks if c not in SWEEP_CHECKS]
        if unknown:
            raise ValueError(f"unknown checks {unknown}; choose from {sorted(SWEEP_CHECKS)}")
        rows = sweep(args.file, checks, args.degree)
        emit(render_sweep(rows, args.format), args.out)
        return 0 if all(r["pass"] is not False for r in rows) else 1

    cfg = _config(args)
    if args.command == "resolve":
        w = cfg.weights
        k = 1 - w.total if args.k is None else args.k
        C = closed_form_differential(w, k) if args.closed_form else ResolutionBundle(w).R(k)
        emit(C.describe() if args.format == "text" else C.to_json(), args.out)
        return 0

    report = RUNNERS[args.command](cfg)
    text = render(args.command, report, args.format, args.timings)
    emit(text, args.out)
    if args.out:
        print(report.summary())
    return 0 if report.passed else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return dispatch(args)
    except CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ChainMapError as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return 1
    except WPSError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
