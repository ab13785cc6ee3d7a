"""Acceptance suite: eight criteria, each printed as one PASS/FAIL line.

Run with pytest (lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""

import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_WEIGHTS, bundle_for  # noqa: E402

from wps_beilinson.beilinson import (  # noqa: E402
    MmPair,
    ResolutionBundle,
    build_Mm,
    closed_form_differential,
    verify_augmentation,
)
from wps_beilinson.complexes import check_d_squared, is_chain_map, mapping_cone  # noqa: E402
from wps_beilinson.errors import ChainMapError, RangeError  # noqa: E402
from wps_beilinson.graded_core import WeightVector  # noqa: E402
from wps_beilinson.ktheory_x import (  # noqa: E402
    HypersurfaceModel,
    verify_fano_identity,
    verify_monodromy_identity,
)
from wps_beilinson.sheaf_cohomology import (  # noqa: E402
    verify_Blk_cohomology,
    verify_diagonal_resolution,
    verify_koszul_exactness,
    verify_Mres,
)

MRES_WEIGHTS = [(1, 1, 1), (1, 1, 2), (1, 2, 3)]
RESULTS: dict[int, tuple[bool, str]] = {}


# --- criteria ----------------------------------------------------------------------

def criterion_1():
    """R_{1-w} by recursion: d^2 = 0 and equal to the closed form as labeled data."""
    bad = []
    for weights in ACCEPTANCE_WEIGHTS:
        w = WeightVector(weights)
        R = bundle_for(weights).resolution
        if not check_d_squared(R).passed:
            bad.append(f"{weights}: d^2 != 0")
        if not R.same_labeled_data(closed_form_differential(w, 1 - w.total)):
            bad.append(f"{weights}: recursion != closed form")
    return not bad, "; ".join(bad) or f"{len(ACCEPTANCE_WEIGHTS)} weight vectors"


def criterion_2():
    bad, entries = [], 0
    for weights in ACCEPTANCE_WEIGHTS:
        report = verify_Blk_cohomology(WeightVector(weights))
        entries += report.details["entries"]
        if not report.passed:
            bad.append(f"{weights}: {report.failures[:2]}")
    return not bad, "; ".join(bad) or f"{entries} table entries, all delta"


def criterion_3():
    bad, runs = [], 0
    for weights in ACCEPTANCE_WEIGHTS:
        w = WeightVector(weights)
        for k in range(1 - w.total, 1):
            report = verify_diagonal_resolution(w, k, D=3 * w.total, bundle=bundle_for(weights))
            runs += 1
            if not report.passed:
                bad.append(f"{weights} k={k}: {report.failures[:2]}")
    return not bad, "; ".join(bad) or f"{runs} (w, k) pairs with D = 3w and the Euler series identity"


def _flip_eps(pair, j, key):
    eps = pair.eps.with_entry(j, *key, pair.eps[j][key] * -1)
    return MmPair(pair.weights, pair.m, pair.pushforward, pair.rho, pair.M, eps)


def criterion_4():
    bad, flips = [], 0
    for weights in MRES_WEIGHTS:
        w = WeightVector(weights)
        D = 3 * w.total
        for m in range(1, w.total):
            pair = build_Mm(w, m, bundle_for(weights))
            if not verify_Mres(w, m, D=D, pair=pair).passed:
                bad.append(f"{weights} m={m} fails")
            for j, mat in pair.eps.maps.items():
                for key in mat:
                    flips += 1
                    if verify_Mres(w, m, D=D, pair=_flip_eps(pair, j, key)).passed:
                        bad.append(f"{weights} m={m}: flipped eps^{j}{key} still passes")
    return not bad, "; ".join(bad) or f"all m pass; {flips} single-sign mutations of eps all fail"


def criterion_5():
    bad = []
    for weights in ACCEPTANCE_WEIGHTS:
        w = WeightVector(weights)
        if w.n < 2:
            # X would be zero-dimensional; the model rejects it
            try:
                HypersurfaceModel(w)
            except RangeError:
                continue
            bad.append(f"{weights}: n = 1 accepted")
            continue
        report = verify_monodromy_identity(HypersurfaceModel(w))
        if not report.passed:
            bad.append(f"{weights}: {report.failures}")
    return not bad, "; ".join(bad) or "G^w = Id for every weight vector with n >= 2"


def criterion_6():
    bad, notes = [], []
    for d in (3, 4):
        report = verify_fano_identity(HypersurfaceModel(WeightVector((1,) * 5), d))
        serre = report.details["serre_check"]
        notes.append(f"d={d}: rank {report.details['sublattice_rank']}, serre {serre['status']}"
                     f" (quotient {serre.get('quotient')})")
        if not report.passed or serre["status"] not in ("pass", "skipped"):
            bad.append(f"d={d}: {report.failures}")
    return not bad, "; ".join(bad or notes)


def criterion_7():
    bad = []
    for weights in ACCEPTANCE_WEIGHTS:
        report = verify_koszul_exactness(WeightVector(weights))
        if not report.passed:
            bad.append(f"{weights}: {report.failures[:2]}")
    return not bad, "; ".join(bad) or "strands 0..2w"


def _e1_flip_caught(w, C, j, key):
    M = C.with_entry(j, *key, C.d(j)[key] * -1)
    return not (check_d_squared(M).passed and verify_augmentation(w, M).passed)


def _e6_flip_caught(w, bundle, k, j, key):
    mu = bundle.mu(k)
    flipped = mu.with_entry(j, *key, mu[j][key] * -1)
    if not is_chain_map(flipped).passed:
        return True
    seeded = ResolutionBundle(w, _R={0: bundle.R(0), k: mapping_cone(flipped)})
    try:
        R = seeded.resolution
    except ChainMapError:
        # a later mu_k is no longer a chain map
        return True
    return not (check_d_squared(R).passed and verify_augmentation(w, R).passed)


def criterion_8():
    """Every single-sign mutation is caught without comparing to the closed form."""
    bad, counts = [], {"e1": 0, "e6": 0, "d2": 0, "chi": 0}
    for weights in ACCEPTANCE_WEIGHTS:
        w = WeightVector(weights)
        bundle = bundle_for(weights)
        C = closed_form_differential(w, 1 - w.total)
        for j, mat in C.diffs.items():
            for key in mat:
                counts["e1"] += 1
                if not _e1_flip_caught(w, C, j, key):
                    bad.append(f"e1 {weights} d^{j}{key}")
        for k in range(1 - w.total, 0):
            for j, mat in bundle.mu(k).maps.items():
                for key in mat:
                    counts["e6"] += 1
                    if not _e6_flip_caught(w, bundle, k, j, key):
                        bad.append(f"e6 {weights} mu_{k}^{j}{key}")
        if w.n >= 2:
            counts["chi"] += 1
            if verify_monodromy_identity(HypersurfaceModel(w, chi0_override=1)).passed:
                bad.append(f"chi(O_X) -> 1 still passes for {weights}")
    for weights in MRES_WEIGHTS:
        w = WeightVector(weights)
        for m in range(1, w.total):
            pair = build_Mm(w, m, bundle_for(weights))
            for j, mat in pair.eps.maps.items():
                for key in mat:
                    counts["d2"] += 1
                    if verify_Mres(w, m, D=3 * w.total, pair=_flip_eps(pair, j, key)).passed:
                        bad.append(f"d2 {weights} m={m}")
    summary = ", ".join(f"{n} {name}" for name, n in counts.items())
    return not bad, "; ".join(bad[:5]) or f"all caught ({summary} mutations)"


CRITERIA = {
    1: ("construction soundness", criterion_1),
    2: ("B_l cohomology table", criterion_2),
    3: ("resolution of the diagonal", criterion_3),
    4: ("M_m resolution and eps mutations", criterion_4),
    5: ("G^w = Id on the twist lattice", criterion_5),
    6: ("Fano variant on P^4, d = 3, 4", criterion_6),
    7: ("Koszul exactness", criterion_7),
    8: ("mutation suite", criterion_8),
}


def run_criterion(n: int) -> tuple[bool, str]:
    name, fn = CRITERIA[n]
    t0 = time.perf_counter()
    ok, detail = fn()
    line = f"criterion {n} [{'PASS' if ok else 'FAIL'}] {name}: {detail} ({time.perf_counter() - t0:.1f}s)"
    RESULTS[n] = (ok, line)
    return ok, line


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    ok, line = run_criterion(n)
    assert ok, line


if __name__ == "__main__":
    failures = 0
    for n in sorted(CRITERIA):
        ok, line = run_criterion(n)
        print(line, flush=True)
        failures += not ok
    sys.exit(1 if failures else 0)
