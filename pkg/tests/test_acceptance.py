"""End-to-end acceptance gates.

One test per criterion, each printing a single summary line.  Tolerances
and runtime caps are part of the criteria and asserted as stated; nothing
here is loosened to make a red cell green.
"""

import math
import time

import numpy as np
import pytest
from scipy.stats import spearmanr

from lpconc.anti_concentration import (
    berry_esseen_bounds,
    exact_two_point_concentration,
    exact_two_point_tails,
    find_p_star,
)
from lpconc.closed_forms import cube_upper_bound, phi_closed, uniform_f
from lpconc.diagnostics import Dataset, perturb_report, standardize, wasserstein_1d, zero_impute
from lpconc.distributions import DiffUniform, TwoPoint, UniformUnit
from lpconc.embedding_lab import concentration_table, contrast_table
from lpconc.monte_carlo import (
    concentration_frequency,
    curve_sweep,
    log_lp_norms,
    relative_contrast,
)
from lpconc.rate_engine import phi, rate, small_p_rate, uniform_rate
from lpconc.seeding import derive_seed, generator

EXACT_MODE_100 = 0.07958923738717888  # C(100,50) / 2^100


def _report(number: int, label: str, ok: bool, detail: str, started: float, cap: float):
    elapsed = time.perf_counter() - started
    status = "PASS" if ok else "FAIL"
    print(f"criterion {number:02d} [{label}]: {status} ({elapsed:.1f}s) {detail}")
    assert elapsed < cap, f"criterion {number} exceeded its {cap:.0f}s runtime cap"


def test_criterion_01_closed_form_frozen_ranges():
    started = time.perf_counter()
    base = 1.2 * (1.0 - math.log(1.2))
    assert 0.9810 <= base <= 0.9815
    assert uniform_f(0.2, +1) == pytest.approx(-math.log(base), rel=1e-12)
    c200 = cube_upper_bound(0.2, 200)
    c1000 = cube_upper_bound(0.2, 1000)
    assert 0.0220 <= c200 <= 0.0230
    assert 5.2e-9 <= c1000 <= 6.4e-9
    _report(1, "closed-form ranges", True,
            f"base={base:.6f} bound200={c200:.4f} bound1000={c1000:.2e}", started, 1.0)


def test_criterion_02_curvature_closed_forms():
    started = time.perf_counter()
    for p in (0.1, 1.0, 2.0):
        assert phi_closed("uniform-cube", p) == 0.5 + p
        assert phi_closed("diff-uniform", p) == (2.0 + 4.0 * p) / (5.0 + p)
    limit_gap = abs(phi_closed("standard-normal", 1e-3) - 4.0 / math.pi**2)
    assert limit_gap <= 1e-3
    _report(2, "curvature closed forms", True,
            f"normal small-p gap={limit_gap:.2e}", started, 5.0)


def test_criterion_03_generic_rate_vs_closed_forms():
    started = time.perf_counter()
    worst_small = 0.0
    for dist in (UniformUnit(), DiffUniform()):
        for delta in (0.1, 0.2):
            for sign in (+1, -1):
                generic = rate(dist, 1e-3, delta, sign).value
                closed = small_p_rate(dist, delta, sign)
                gap = abs(generic / closed - 1.0)
                worst_small = max(worst_small, gap)
                assert gap <= 0.01
    worst_phi = 0.0
    for p in (0.1, 0.5, 1.0, 2.0):
        quad = rate(UniformUnit(), p, 1e-2, +1).value / 1e-4
        gap = abs(quad / phi(UniformUnit(), p) - 1.0)
        worst_phi = max(worst_phi, gap)
        assert gap <= 0.02
    _report(3, "rate vs closed forms", True,
            f"small-p worst={worst_small:.2e} curvature worst={worst_phi:.2e}",
            started, 30.0)


def test_criterion_04_monotone_plus_rate_and_uniform_limit():
    started = time.perf_counter()
    grid = np.geomspace(0.1, 10.0, 30)
    values = [rate(UniformUnit(), float(p), 0.2, +1).value for p in grid]
    assert all(b > a for a, b in zip(values, values[1:]))
    gap = abs(uniform_rate(UniformUnit(), 0.2, +1) - uniform_f(0.2, +1))
    assert gap <= 1e-4
    _report(4, "plus-rate monotonicity", True,
            f"30 points strictly increasing, limit gap={gap:.1e}", started, 30.0)


def test_criterion_05_anti_concentration_oracle_and_p_star():
    started = time.perf_counter()
    exact = exact_two_point_concentration(0.5, 1.0, 1e-4, 0.1, 100)
    assert abs(exact - EXACT_MODE_100) <= 1e-10
    M = 100_000
    freq, _ = concentration_frequency(TwoPoint(a=0.5), 100, 1e-4, 0.1, M, seed=11)
    se = math.sqrt(exact * (1.0 - exact) / M)
    assert abs(freq - exact) <= 3.0 * se
    report = find_p_star(TwoPoint(a=0.5), n=100, delta=0.1, Delta=0.2)
    assert report.p_star is not None
    assert report.exact_prob_at_p_star <= 0.2
    _report(5, "anti-concentration oracle", True,
            f"exact={exact:.6f} mc={freq:.6f} p*={report.p_star:.6f}", started, 60.0)


def test_criterion_06_normal_lower_bounds_never_violate():
    started = time.perf_counter()
    violations = 0
    cells = 0
    for a in (0.25, 0.5, 0.75):
        for n in (50, 100, 500):
            for p in (0.001, 0.01):
                cells += 1
                bounds = berry_esseen_bounds(a, p, 0.1, n, C_const=0.56)
                below, _, above = exact_two_point_tails(a, 1.0, p, 0.1, n)
                if bounds.upper_tail_lower_bound > above + 1e-12:
                    violations += 1
                if bounds.lower_tail_lower_bound > below + 1e-12:
                    violations += 1
    assert violations == 0
    _report(6, "normal-bound validity", True,
            f"0 violations across {cells} cells", started, 60.0)


def test_criterion_07_two_sided_band_compliance():
    started = time.perf_counter()
    n, M = 1000, 10_000
    f_min = min(uniform_f(0.1, +1), uniform_f(0.1, -1))
    bound = 1.0 - 2.0 * math.exp(-n * f_min)
    se = math.sqrt(bound * (1.0 - bound) / M)
    floor = max(bound - 3.0 * se, 0.98)
    freqs = {}
    for p in (0.01, 0.1, 1.0, 2.0):
        freq, _ = concentration_frequency(UniformUnit(), n, p, 0.1, M, seed=31)
        freqs[p] = freq
        assert freq >= floor
        assert freq >= 0.98
    detail = " ".join(f"p={p}:{f:.4f}" for p, f in freqs.items())
    _report(7, "two-sided band compliance", True,
            f"floor={floor:.5f} {detail}", started, 120.0)


def test_criterion_08_pairwise_contrast_compliance():
    started = time.perf_counter()
    n, M, delta = 1000, 100_000, 0.1
    summaries = {}
    for p in (0.01, 0.5, 2.0):
        summary = relative_contrast(UniformUnit(), n=n, p=p, M=M, seed=47, delta=delta)
        summaries[p] = summary
        # same-draw event algebra: both ratios inside the half band forces
        # the normalized difference below delta, so this is sample-exact
        valid = summary.pairs - summary.skipped
        assert summary.joint_half_band_freq * summary.pairs <= summary.freq_below_delta * valid + 1e-9
    detail = " ".join(f"p={p}:{s.freq_below_delta:.4f}" for p, s in summaries.items())
    shortfall = {p: s.freq_below_delta for p, s in summaries.items() if s.freq_below_delta < 0.99}
    _report(8, "pairwise contrast compliance", not shortfall, detail, started, 120.0)
    assert not shortfall, (
        f"cells below the 0.99 frequency floor: {shortfall}; the p=0.01 band "
        "probability for this configuration sits near 0.976 and no seed choice "
        "moves it above the stated floor"
    )


def test_criterion_09_embedding_table_cells():
    started = time.perf_counter()
    conc = concentration_table(M=5000, delta=0.1, seed=7)
    assert conc.cell("dense", 0.5).value >= 0.995
    assert conc.cell("sparse", 1.0).value == pytest.approx(0.180, abs=0.03)
    assert conc.cell("relu", 2.0).value == pytest.approx(0.926, abs=0.03)
    assert conc.cell("binary", 10.0).value >= 0.995
    contr = contrast_table(pairs=3000, seed=7)
    assert contr.cell("sparse", 0.01).value >= 0.99
    assert contr.cell("dense", 2.0).value <= 0.005
    _report(9, "embedding tables", True,
            f"sparse/1={conc.cell('sparse', 1.0).value:.3f} "
            f"relu/2={conc.cell('relu', 2.0).value:.3f}", started, 120.0)


def test_criterion_10_perturbation_pipeline_trends():
    started = time.perf_counter()
    raw = Dataset(generator(100).uniform(-1.0, 1.0, (500, 30)),
                  tuple(f"u{i}" for i in range(30)))
    std = standardize(raw)
    gaps = [round(0.01 * g, 2) for g in range(1, 11)]
    seeds = [derive_seed(100, s) for s in range(5)]
    mean_ks = []
    mean_w = []
    for gap in gaps:
        ks_vals = []
        w_vals = []
        for seed in seeds:
            rep = perturb_report(std, gap_prob=gap, seed=seed, p_grid=[0.01, 1.0])
            ks_vals.append(rep.ks_min_pvalue)
            w_vals.append(rep.wasserstein_total)
        mean_ks.append(float(np.mean(ks_vals)))
        mean_w.append(float(np.mean(w_vals)))
    rho_ks = float(spearmanr(gaps, mean_ks).statistic)
    rho_w = float(spearmanr(gaps, mean_w).statistic)
    assert rho_ks < -0.8
    assert rho_w > 0.8
    # population drift bound per attribute, on the raw +-1 cube (b = 1)
    b, M = 1.0, raw.M
    for gap in gaps:
        imputed = zero_impute(raw, gap, seed=seeds[0])
        se = b * math.sqrt(gap * (1.0 - gap) / M)
        for j in range(raw.n):
            w = wasserstein_1d(raw.values[:, j], imputed.values[:, j])
            assert w <= 2.0 * b * gap + 3.0 * se
    # small-p concentration collapse at a 5% gap
    rep = perturb_report(std, gap_prob=0.05, seed=seeds[0], p_grid=[0.01, 1.0])
    small_p = rep.curves[0]
    assert small_p.frac_original > 0.0
    assert small_p.frac_perturbed < 0.5 * small_p.frac_original
    _report(10, "perturbation trends", True,
            f"rho_ks={rho_ks:+.2f} rho_w={rho_w:+.2f} "
            f"curve {small_p.frac_perturbed:.3f} < 0.5*{small_p.frac_original:.3f}",
            started, 120.0)


def test_criterion_11_stability_and_worker_invariance():
    started = time.perf_counter()
    # 300 orders of magnitude at p = 100, against a plain max-factored sum
    x = generator(71).permutation(np.geomspace(1e-280, 1e20, 2000))
    top = float(np.max(x))
    reference = math.log(float(np.sum((x / top) ** 100))) / 100.0 + math.log(top)
    got = float(log_lp_norms(x, 100.0))
    assert math.isfinite(got)
    norm_gap = abs(math.expm1(got - reference))  # relative gap between the norms
    assert norm_gap <= 1e-12

    # every stochastic engine gives identical results whatever the worker split
    for workers in (1, 4, None):
        freq = concentration_frequency(UniformUnit(), 1000, 1.0, 0.1, 5000, seed=31,
                                       workers=workers)
        contrast = relative_contrast(UniformUnit(), n=1000, p=0.5, M=3000, seed=47,
                                     delta=0.1, workers=workers)
        grid = curve_sweep(UniformUnit(), p_grid=[0.5, 2.0], n_grid=[2048], M=3000,
                           seed=5, workers=workers)
        if workers == 1:
            base = (freq, contrast, grid)
        else:
            assert freq == base[0]
            assert contrast == base[1]
            assert grid == base[2]
    _report(11, "stability and reproducibility", True,
            f"p=100 norm rel gap={norm_gap:.1e}", started, 30.0)
