"""Acceptance gate: ten numbered criteria, one test each.

Each test prints a single [PASS]/[FAIL] line (visible with pytest -s)
before asserting, so a full run doubles as a checklist. Expected level
and edge values are the tabulated four-decimal references for these well
trains; comparisons use half-width 5e-4 of the last printed digit's
order, as pinned by the acceptance contract.
"""

import math
import time

import numpy as np
import pytest

from wellbands import (
    AmplitudePhaseState,
    Potential,
    empirical_order,
    fd_spectrum,
    find_levels,
)
from wellbands.floquet import assemble_bands, find_band_edges, ground_band
from wellbands.milne import dense_path, integrate_tail
from reference_values import ALL_CONFIGS, LEVELS

EDGE_TOL = 5e-4
LEVEL_TOL = 5e-4
FD_TOL = 2e-3
TAIL_TOL = 1e-8
RESIDUAL_TOL = 1e-4
PARITY_MIN = 0.999

TABLE_EDGES = {-1.25: (-0.7953, -0.7293), -1.35: (-0.8701, -0.8106)}
TABLE_LEVELS = {
    (-1.25, -1.25, 2): [-0.7803, -0.7475],
    (-1.35, -1.25, 2): [-0.8445, -0.7610],
    (-1.25, -1.25, 4): [-0.7898, -0.7748, -0.7546, -0.7366],
    (-1.35, -1.25, 4): [-0.8577, -0.8107, -0.7787, -0.7461],
    (-1.25, -1.25, 6): [-0.7925, -0.7845, -0.7723, -0.7577, -0.7436, -0.7331],
    (-1.35, -1.25, 6): [-0.8628, -0.8438, -0.8215, -0.7859, -0.7632, -0.7396],
}
SHARED_GAP = (-0.8106, -0.7953)


def _criterion(num: int, description: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {description}"
    if detail:
        line += f" -- {detail}"
    print(line)
    assert ok, line


def _table_mismatches(config, computed):
    expected = TABLE_LEVELS[config]
    bad = []
    for j, ref in enumerate(expected):
        got = computed[j].energy
        if abs(got - ref) > LEVEL_TOL:
            bad.append(
                f"{config} j={j}: expected {ref}, computed {got:.6f} "
                f"(independent finite-difference value {LEVELS[config][j]:.6f})"
            )
    return bad


def test_criterion_01_band_edges():
    t0 = time.perf_counter()
    bands = {d: ground_band(d, 2.0) for d in TABLE_EDGES}
    elapsed = time.perf_counter() - t0
    bad = []
    for depth, (lo, hi) in TABLE_EDGES.items():
        band = bands[depth]
        if abs(band.lower.energy - lo) > EDGE_TOL or abs(band.upper.energy - hi) > EDGE_TOL:
            bad.append(f"depth {depth}: ({band.lower.energy:.6f}, {band.upper.energy:.6f})")
    ok = not bad and elapsed < 5.0
    _criterion(
        1,
        "ground-band edges for depths -1.25 and -1.35 within 5e-4 in under 5 s",
        ok,
        f"{elapsed:.2f} s" + ("; " + "; ".join(bad) if bad else ""),
    )


def test_criterion_02_two_well_levels():
    t0 = time.perf_counter()
    computed = {
        config: find_levels(Potential(*config))
        for config in ((-1.25, -1.25, 2), (-1.35, -1.25, 2))
    }
    elapsed = time.perf_counter() - t0
    bad = []
    for config, found in computed.items():
        bad += _table_mismatches(config, found)
    ok = not bad and elapsed < 10.0
    _criterion(
        2,
        "N=2 ground-band levels for both configurations within 5e-4 in under 10 s",
        ok,
        f"{elapsed:.2f} s" + ("; " + "; ".join(bad) if bad else ""),
    )


def test_criterion_03_four_well_levels(levels_of):
    bad = []
    for config in ((-1.25, -1.25, 4), (-1.35, -1.25, 4)):
        bad += _table_mismatches(config, levels_of(*config))
    detail = "; ".join(bad)
    if bad:
        detail += (
            "; the expected value -0.8107 duplicates the adjacent band-edge "
            "entry -0.8106 and disagrees with both solvers here, which agree "
            "with each other to 7 decimals, so it appears to be a misprint "
            "in the reference table"
        )
    _criterion(3, "N=4 ground-band levels for both configurations within 5e-4",
               not bad, detail)


def test_criterion_04_six_well_levels(levels_of):
    bad = []
    for config in ((-1.25, -1.25, 6), (-1.35, -1.25, 6)):
        bad += _table_mismatches(config, levels_of(*config))
    _criterion(4, "N=6 ground-band levels for both configurations within 5e-4",
               not bad, "; ".join(bad))


def test_criterion_05_band_containment(levels_of):
    all_bands = []
    for depth in (-1.35, -1.25):
        edges = find_band_edges(depth, 2.0, depth + 1e-6, 0.45)
        all_bands += assemble_bands(edges, 2.0)
    outside = []
    in_gap = []
    for config in ALL_CONFIGS:
        for lv in levels_of(*config):
            if not any(b.contains(lv.energy) for b in all_bands):
                outside.append(f"{config} j={lv.index_j} E={lv.energy:.6f}")
            if SHARED_GAP[0] < lv.energy < SHARED_GAP[1]:
                in_gap.append(f"{config} j={lv.index_j} E={lv.energy:.6f}")
    ok = not outside and not in_gap
    _criterion(
        5,
        "every bound level lies inside an energy band and none inside the "
        "shared gap (-0.8106, -0.7953)",
        ok,
        "; ".join(outside + in_gap),
    )


def test_criterion_06_ground_band_population(levels_of):
    band = ground_band(-1.25, 2.0)
    bad = []
    for n in (2, 4, 6):
        count = sum(
            1 for lv in levels_of(-1.25, -1.25, n) if band.contains(lv.energy)
        )
        if count != n:
            bad.append(f"N={n}: {count} levels in the ground band")
    _criterion(
        6,
        "symmetric trains put exactly N levels in the ground band (N=2,4,6)",
        not bad,
        "; ".join(bad),
    )


def test_criterion_07_finite_difference_oracle(levels_of):
    bad = []
    worst = 0.0
    for config in ALL_CONFIGS:
        pot = Potential(*config)
        found = levels_of(*config)
        fd = fd_spectrum(pot)
        if len(fd) != len(found):
            bad.append(f"{config}: count {len(fd)} vs {len(found)}")
            continue
        diff = max(abs(a.energy - b) for a, b in zip(found, fd))
        worst = max(worst, diff)
        if diff > FD_TOL:
            bad.append(f"{config}: max |dE| = {diff:.2e}")
    order = empirical_order(Potential(-1.25, -1.25, 2))
    if not 1.8 <= order <= 2.2:
        bad.append(f"refinement order {order:.2f} outside [1.8, 2.2]")
    _criterion(
        7,
        "8000-point finite-difference spectra within 2e-3 on all six "
        "configurations and second-order grid convergence",
        not bad,
        f"worst |dE| = {worst:.2e}, order = {order:.2f}"
        + ("; " + "; ".join(bad) if bad else ""),
    )


def test_criterion_08_free_tail_phase():
    bad = []
    for kappa in (0.5, 1.0, 2.0):
        tail = integrate_tail(
            AmplitudePhaseState(1.0, 0.0, 0.0), 0.0, 1, -0.5 * kappa**2, 1.0
        )
        if abs(tail - math.atan(1.0 / kappa)) > TAIL_TOL:
            bad.append(f"kappa={kappa}: {tail!r}")
    _criterion(
        8,
        "free-tail phase equals arctan(1/kappa) within 1e-8 for kappa=0.5,1,2",
        not bad,
        "; ".join(bad),
    )


def test_criterion_09_residuals(levels_of):
    worst_m = worst_s = 0.0
    for config in ALL_CONFIGS:
        pot = Potential(*config)
        lv = levels_of(*config)[0]
        start = AmplitudePhaseState(1.0, 0.0, 0.0)
        for stop in (0.0, pot.support_end):
            xs, ys = dense_path(start, pot.junction, stop, 20000, lv.energy, pot)
            h = xs[1] - xs[0]
            w = 2.0 * pot.mass * (lv.energy - pot.evaluate_many(xs))
            a, p = ys[0], ys[2]
            d2a = (a[:-2] - 2.0 * a[1:-1] + a[2:]) / (h * h)
            res_m = d2a + (w * a - a**-3)[1:-1]
            f = a * np.sin(p + lv.alpha)
            d2f = (f[:-2] - 2.0 * f[1:-1] + f[2:]) / (h * h)
            res_s = d2f + (w * f)[1:-1]
            worst_m = max(worst_m, float(np.max(np.abs(res_m))))
            worst_s = max(worst_s, float(np.max(np.abs(res_s))))
    ok = worst_m < RESIDUAL_TOL and worst_s < RESIDUAL_TOL
    _criterion(
        9,
        "amplitude and wave equations satisfied to 1e-4 along dense ground-state "
        "paths for all configurations",
        ok,
        f"amplitude residual {worst_m:.2e}, wave residual {worst_s:.2e}",
    )


def test_criterion_10_symmetric_parity(levels_of):
    bad = []
    for n in (2, 4, 6):
        for lv in levels_of(-1.25, -1.25, n):
            if max(abs(math.sin(lv.alpha)), abs(math.cos(lv.alpha))) <= PARITY_MIN:
                bad.append(f"N={n} j={lv.index_j}: alpha={lv.alpha:.6f}")
    _criterion(
        10,
        "symmetric-train levels are parity eigenstates: |sin alpha| or "
        "|cos alpha| above 0.999",
        not bad,
        "; ".join(bad),
    )
