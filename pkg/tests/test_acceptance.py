"""Acceptance run: one test and one printed pass/fail line per criterion.

Lines are printed through capsys.disabled() so they show up in a plain
`pytest -v` run.  Every assertion uses the tolerance stated for its
criterion; timed criteria assert their runtime budget too.
"""

import json
import math
import time

import numpy as np
import pytest

from qtel.cli import main
from qtel.closed_form import three_photon_unit_occupancy, two_photon
from qtel.fisher import LossFamily, fisher_numeric
from qtel.fock import ModeKind
from qtel.protocol import (
    Branch,
    ExperimentConfig,
    branch_tables,
    build_forms,
    distribution,
    mixture_port_trig,
    mixture_probability,
)
from qtel.resolution import optimize_alpha
from qtel.tables import compute_table_rows

DL, DR = ModeKind.DETECTOR_LEFT, ModeKind.DETECTOR_RIGHT


def _report(capsys, num, ok, detail):
    with capsys.disabled():
        print(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


def test_criterion_1_ideal_limit(capsys):
    start = time.perf_counter()
    worst = 0.0
    for photons in (2, 3, 4):
        config = ExperimentConfig(photons=photons)
        value = fisher_numeric(branch_tables(config), 0.0).total
        worst = max(worst, abs(value - (1.0 - 1.0 / photons)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 5.0
    _report(capsys, 1, ok, f"ideal-limit law, worst |F-(1-1/N)| = {worst:.3e}, {elapsed:.2f}s")


def test_criterion_2_two_port_closed_form(capsys):
    start = time.perf_counter()
    levels = (0.0, 0.25, 0.5, 0.75, 1.0)
    losses = (0.0, 0.25, 0.5, 0.75, 0.95)
    phis = np.linspace(0.0, math.pi, 9)
    worst = 0.0
    points = 0
    for overlap in levels:
        family = LossFamily(ExperimentConfig(photons=2, indist=(overlap,)))
        for p in losses:
            for epsilon in levels:
                for phi in phis:
                    got = family.fisher(float(phi), epsilon, p).total
                    want = two_photon(float(phi), p, epsilon, overlap)
                    worst = max(worst, abs(got - want))
                    points += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and points >= 200 and elapsed < 10.0
    _report(
        capsys, 2, ok,
        f"two-photon law on {points} points, worst deviation = {worst:.3e}, {elapsed:.2f}s",
    )


def test_criterion_3_three_port_unit_occupancy(capsys):
    start = time.perf_counter()
    overlap_pairs = ((1.0, 1.0), (0.96, 0.96), (0.5, 1.0), (0.3, 0.7), (0.0, 1.0), (0.25, 0.75))
    losses = (0.0, 0.2, 0.4, 0.6, 0.8, 0.95)
    phis = np.linspace(0.0, math.pi, 9)
    worst = 0.0
    points = 0
    for pair in overlap_pairs:
        family = LossFamily(ExperimentConfig(photons=3, indist=pair))
        for p in losses:
            for phi in phis:
                got = family.fisher(float(phi), 1.0, p).total
                want = three_photon_unit_occupancy(float(phi), p, *pair)
                worst = max(worst, abs(got - want))
                points += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and points >= 300 and elapsed < 60.0
    _report(
        capsys, 3, ok,
        f"three-photon unit-occupancy law on {points} points, worst = {worst:.3e}, {elapsed:.2f}s",
    )


def test_criterion_4_ideal_table_rows(capsys):
    start = time.perf_counter()
    rows = {
        (row.epsilon, row.photons): row
        for row in compute_table_rows("I")
        if row.epsilon == 1.0
    }
    two = rows[(1.0, 2)]
    three = rows[(1.0, 3)]
    checks = (
        abs(two.computed_delta_theta_uas - 1.9797) / 1.9797 <= 0.01,
        abs(two.computed_alpha - 4.000) <= 0.005,
        abs(three.computed_delta_theta_uas - 1.4311) / 1.4311 <= 0.01,
        abs(three.computed_alpha - 4.1797) / 4.1797 <= 0.005,
    )
    elapsed = time.perf_counter() - start
    ok = all(checks) and elapsed < 60.0
    _report(
        capsys, 4, ok,
        "unit-occupancy rows: "
        f"N=2 {two.computed_delta_theta_uas:.4f} uas at a={two.computed_alpha:.4f}, "
        f"N=3 {three.computed_delta_theta_uas:.4f} uas at a={three.computed_alpha:.4f}, "
        f"{elapsed:.2f}s",
    )


def test_criterion_5_all_rows_emitted_with_deltas(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code = main(["tables", "--no-plot", "--out", "tables.csv"])
    lines = [
        line for line in (tmp_path / "tables.csv").read_text().splitlines()
        if not line.startswith("#")
    ]
    fields = lines[0].split(",")
    records = [dict(zip(fields, line.split(","))) for line in lines[1:]]
    deltas_ok = all(
        math.isfinite(float(r["delta_theta_pct"])) and math.isfinite(float(r["alpha_pct"]))
        for r in records
    )
    both = all(
        any(r["table"] == t for r in records) for t in ("I", "II")
    )
    ok = code == 0 and len(records) == 24 and deltas_ok and both
    _report(
        capsys, 5, ok,
        f"tables command emitted {len(records)} rows, every delta column populated",
    )


def test_criterion_6_normalization(capsys):
    rng = np.random.default_rng(2026)
    worst = 0.0
    grid = (
        ExperimentConfig(photons=2, epsilon=0.7, indist=(0.8,), alpha=1.3),
        ExperimentConfig(photons=3, epsilon=0.4, indist=(0.9, 0.5), alpha=0.8),
        ExperimentConfig(photons=3, epsilon=1.0, alpha=2.4),
        ExperimentConfig(photons=4, epsilon=0.9, indist=(0.96, 0.5, 0.25), alpha=1.6),
    )
    for config in grid:
        tables = branch_tables(config)
        for phi in rng.uniform(-math.pi, math.pi, size=20):
            total = sum(mixture_probability(tables, config.epsilon, float(phi)).values())
            worst = max(worst, abs(total - 1.0))
    ok = worst <= 1e-12
    _report(capsys, 6, ok, f"normalization over {len(grid)} configs x 20 phases, worst = {worst:.3e}")


def test_criterion_7_trig_polynomial_exactness(capsys):
    rng = np.random.default_rng(77)
    worst = 0.0
    pairs = 0
    for photons in (2, 2, 2, 3, 3, 3, 4, 4, 4, 4):
        config = ExperimentConfig(
            photons=photons,
            epsilon=float(rng.uniform()),
            indist=tuple(rng.uniform(size=photons - 1)),
            alpha=float(rng.uniform(0.0, 3.0)),
        )
        trig = mixture_port_trig(branch_tables(config), config.epsilon)
        for phi in rng.uniform(-math.pi, math.pi, size=5):
            phi = float(phi)
            direct = {}
            for branch, weight in (
                (Branch.STAR_PRESENT, config.epsilon),
                (Branch.STAR_ABSENT, 1.0 - config.epsilon),
            ):
                for ports, prob in distribution(build_forms(config, branch), phi).items():
                    direct[ports] = direct.get(ports, 0.0) + weight * prob
            for ports in set(direct) | set(trig):
                reconstructed = trig[ports].value(phi) if ports in trig else 0.0
                worst = max(worst, abs(reconstructed - direct.get(ports, 0.0)))
            pairs += 1
    ok = worst <= 1e-12 and pairs >= 50
    _report(capsys, 7, ok, f"trig reconstruction on {pairs} (config, phase) pairs, worst = {worst:.3e}")


def test_criterion_8_two_port_reference_rows(capsys):
    rng = np.random.default_rng(8)
    rows = mixture_port_trig(branch_tables(ExperimentConfig(photons=2)), 1.0)
    both_one = (((DL, 1), 1), ((DR, 1), 1))
    cross = (((DL, 2), 1), ((DR, 1), 1))
    worst = 0.0
    for phi in rng.uniform(-math.pi, math.pi, size=10):
        phi = float(phi)
        worst = max(worst, abs(rows[both_one].value(phi) - (1 + math.cos(phi)) / 8))
        worst = max(worst, abs(rows[cross].value(phi) - (1 - math.cos(phi)) / 8))
    ok = worst <= 1e-12
    _report(capsys, 8, ok, f"reference coincidence rows at 10 phases, worst = {worst:.3e}")


def test_criterion_9_optimizer_sanity(capsys):
    two = optimize_alpha(ExperimentConfig(photons=2))
    best = next(o for o in two if o.is_global)
    lossy = optimize_alpha(ExperimentConfig(photons=3, epsilon=0.01, indist=(0.96, 0.96)))
    ok = abs(best.alpha - 4.0) <= 1e-3 and len(lossy) >= 2
    _report(
        capsys, 9, ok,
        f"analytic optimum at a = {best.alpha:.5f}, lossy curve has {len(lossy)} local minima",
    )


def test_criterion_10_tables_determinism(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["tables", "--no-plot", "--out", "one.csv"]) == 0
    assert main(["tables", "--no-plot", "--out", "two.csv"]) == 0
    first = (tmp_path / "one.csv").read_bytes()
    second = (tmp_path / "two.csv").read_bytes()
    ok = first == second and len(first) > 0
    _report(capsys, 10, ok, f"two tables runs produced identical CSV bytes ({len(first)} bytes)")
