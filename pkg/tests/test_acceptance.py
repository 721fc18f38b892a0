"""Acceptance criteria 1-10.

Each test prints one ``criterion N [...]: PASS|FAIL`` line with the measured
numbers, then asserts at the stated tolerance. Run standalone with
``python tests/test_acceptance.py``.
"""

import math
import sys
import time
from dataclasses import replace

import numpy as np
import pytest
from scipy import special, stats

from zalms.errors import NumericOverflowError
from zalms.filters import DwzaLms, DwzaNlms, DzaLms, Lms, Nlms, WzaLms, ZaLms, init_state, run, step
from zalms.harness import compare_theory, preset, run_experiment
from zalms.rng import derive_seed, make_rng
from zalms.signals import InputSpec, NoiseSpec, desired_output, gen_input, gen_noise
from zalms.systems import Family, GgdParams, SystemSpec, ggd_cdf, ggd_pdf, regularized_lower_gamma, sample_ggd
from zalms.theory import attraction_probability, stability_bound

pytestmark = pytest.mark.acceptance


@pytest.fixture(scope="module")
def exp6_rho():
    cfg = preset("exp6_rho")
    return cfg, run_experiment(cfg, write=False)


def _db(v):
    return 10 * math.log10(v)


# 1 ---------------------------------------------------------------------------

def _trajectory(params, x, d, w0):
    state = init_state(w0.size, w0)
    out = []
    for xn, dn in zip(x, d):
        step(state, params, xn, dn)
        out.append(state.w.tobytes())
    return out


def test_1_reduction_identities(acceptance):
    pairs = [
        ("DWZA-LMS(rho=0)=LMS", lambda: (DwzaLms(0.01, 0.0, 0.01, 0.8), Lms(0.01))),
        ("DWZA-NLMS(rho=0)=NLMS", lambda: (DwzaNlms(0.5, 0.0, 0.01, 0.8), Nlms(0.5))),
        ("WZA-LMS(0,inf)=ZA-LMS", lambda: (WzaLms(0.01, 2e-3, 0.0, math.inf), ZaLms(0.01, 2e-3))),
        ("DWZA-LMS(0,inf)=DZA-LMS", lambda: (DwzaLms(0.01, 2e-3, 0.0, math.inf), DzaLms(0.01, 2e-3))),
    ]
    _trajectory(Lms(0.01), np.ones(2), np.ones(2), np.zeros(4))  # compile outside the clock
    t0 = time.perf_counter()
    failures = []
    for seed in range(20):
        rng = make_rng(seed)
        L = 16
        w0 = 0.5 * rng.standard_normal(L)
        x = rng.standard_normal(1000)
        d = rng.standard_normal(1000)
        for name, make in pairs:
            general, special_case = make()
            if _trajectory(general, x, d, w0) != _trajectory(special_case, x, d, w0):
                failures.append((name, seed))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 1.0
    acceptance(1, "reduction identities", ok,
               f"{len(pairs)} identities x 20 seeds x 1e3 steps, mismatches={failures}, "
               f"runtime={elapsed:.2f}s (<1s)")
    assert ok


# 2 ---------------------------------------------------------------------------

def _stability_runs(mu, make_params, n=10_000, runs=100):
    final = []
    finite = 0
    for seed in range(runs):
        spec = SystemSpec(Family.GGD, L=100, beta=0.1)
        h = spec.build(derive_seed(1, seed, "system"))
        x = gen_input(InputSpec(seed=10_000 + seed), n)
        v = gen_noise(NoiseSpec(1e-4, seed=20_000 + seed), n)
        d = desired_output(h, x, v)
        try:
            tr = run(init_state(100), make_params(mu), x, d, h, record_every=n)
            final.append(tr.msd[-1] / h.energy)
            finite += bool(np.all(np.isfinite(tr.w)))
        except NumericOverflowError:
            final.append(math.inf)
    return finite, float(np.median(final))


def test_2_stability_bound(acceptance):
    mu_max = stability_bound(100, 1.0)
    t0 = time.perf_counter()
    makers = {"LMS": lambda mu: Lms(mu), "DWZA-LMS": lambda mu: DwzaLms(mu, 2e-4, 0.01, 0.8)}
    detail, ok = [], True
    for name, make in makers.items():
        finite, _ = _stability_runs(0.5 * mu_max, make)
        _, growth = _stability_runs(1.5 * mu_max, make)
        ok &= finite == 100 and growth > 1e3
        detail.append(f"{name}: finite@0.5mu_max={finite}/100, median MSD/MSD0 @1.5mu_max={growth:.3g}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 30
    acceptance(2, "stability bound", ok, "; ".join(detail) + f"; runtime={elapsed:.1f}s (<30s)")
    assert ok


# 3 ---------------------------------------------------------------------------

def test_3_steady_state_mse_vs_theory(acceptance, exp6_rho):
    cfg, rep = exp6_rho
    rows = compare_theory(cfg, rep)
    rows.sort(key=lambda r: r.rho)
    ratios = [r.ratio for r in rows]
    sims = [r.simulated_mse for r in rows]
    in_band = [r.ratio is not None and 1 / 1.4 <= r.ratio <= 1.4 for r in rows]
    monotone = all(b >= a for a, b in zip(sims, sims[1:]))
    ok = len(rows) == 4 and all(in_band) and monotone
    pts = ", ".join(f"rho={r.rho:g}: sim={r.simulated_mse:.4g} pred={r.predicted_mse:.4g} "
                    f"ratio={r.ratio:.3f}" for r in rows)
    acceptance(3, "steady-state MSE vs closed form", ok,
               f"{pts}; band=[0.714,1.4]; monotone={monotone}")
    assert len(rows) == 4
    assert monotone
    assert all(in_band), f"ratios {ratios} outside x/1.4"


# 4 ---------------------------------------------------------------------------

def test_4_convergence_ordering_near_sparse(acceptance):
    rep = run_experiment(preset("exp1_white"), write=False)
    c = rep.convergence_iters
    nlms, za, dw = c["NLMS"], c["ZA-NLMS"], c["DWZA-NLMS"]
    ok = None not in (nlms, za, dw)
    ok = ok and dw < nlms and dw < za and abs(za - nlms) <= 0.2 * nlms
    acceptance(4, "convergence ordering, near sparse", bool(ok),
               f"-35 dB crossing: NLMS={nlms} ZA-NLMS={za} DWZA-NLMS={dw}; "
               f"|ZA-NLMS|/NLMS={abs(za - nlms) / nlms:.3f} (<=0.2)")
    assert ok


# 5 ---------------------------------------------------------------------------

def test_5_exact_sparse_robustness(acceptance):
    rep = run_experiment(preset("exp4"), write=False)
    c = rep.convergence_iters
    steady = {k: rep.steady[k]["msd"][0] for k in ("NLMS", "ZA-NLMS", "DWZA-NLMS")}
    spread = max(steady.values()) / min(steady.values())
    order = None not in c.values() and c["DWZA-NLMS"] < c["ZA-NLMS"] < c["NLMS"]
    ok = order and spread <= 1.5
    acceptance(5, "exact-sparse robustness", bool(ok),
               f"crossing DWZA={c['DWZA-NLMS']} ZA={c['ZA-NLMS']} NLMS={c['NLMS']}; steady dB "
               + " ".join(f"{k}={_db(v):.2f}" for k, v in steady.items())
               + f"; max/min={spread:.3f} (<=1.5)")
    assert ok


# 6 ---------------------------------------------------------------------------

def test_6_sparsity_sensitivity(acceptance):
    cfg = preset("exp5")
    rep = run_experiment(cfg, write=False)
    ggd_labels = [s.label for s in cfg.systems if s.family is Family.GGD]
    gauss = next(s.label for s in cfg.systems if s.family is Family.GAUSSIAN)
    steady = [rep.steady[f"DWZA-NLMS@{lab}"]["msd"][0] for lab in ggd_labels]
    conv = [rep.convergence_iters[f"DWZA-NLMS@{lab}"] for lab in ggd_labels]
    spread = max(steady) / min(steady)
    nondecreasing = None not in conv and all(b >= a for a, b in zip(conv, conv[1:]))
    g_dw = rep.convergence_iters[f"DWZA-NLMS@{gauss}"]
    g_nl = rep.convergence_iters[f"NLMS@{gauss}"]
    g_rel = abs(g_dw - g_nl) / g_nl if None not in (g_dw, g_nl) else math.inf
    ok = spread <= 1.5 and nondecreasing and g_rel <= 0.2
    acceptance(6, "sparsity sensitivity", ok,
               f"steady dB {[round(_db(s), 2) for s in steady]} max/min={spread:.3f} (<=1.5); "
               f"crossings {conv} nondecreasing={nondecreasing}; gaussian DWZA={g_dw} "
               f"NLMS={g_nl} rel={g_rel:.3f} (<=0.2)")
    assert ok


# 7 ---------------------------------------------------------------------------

def test_7_window_parameters(acceptance):
    rep_a = run_experiment(preset("exp7_a"), write=False)
    rep_b = run_experiment(preset("exp7_b"), write=False)
    steady_a = {k: rep_a.steady[k]["msd"][0] for k in rep_a.curves}
    conv_b = {k: rep_b.convergence_iters[k] for k in rep_b.curves}
    best_a = min(steady_a, key=steady_a.get)
    best_b = min((k for k in conv_b if conv_b[k] is not None), key=conv_b.get)
    ok_a = best_a == "DWZA-NLMS[a=0.01]"
    ok_b = best_b == "DWZA-NLMS[b=1]"
    acceptance(7, "window parameters", ok_a and ok_b,
               "steady dB " + " ".join(f"{k[10:-1]}:{_db(v):.2f}" for k, v in steady_a.items())
               + f" argmin={best_a[10:-1]} (want a=0.01); crossing "
               + " ".join(f"{k[10:-1]}:{v}" for k, v in conv_b.items())
               + f" argmin={best_b[10:-1]} (want b=1)")
    assert ok_a, f"a with minimum steady-state MSD is {best_a}"
    assert ok_b, f"b with earliest -35 dB crossing is {best_b}"


# 8 ---------------------------------------------------------------------------

def test_8_ggd_machinery(acceptance):
    t0 = time.perf_counter()
    fd_err = 0.0
    for beta in (0.5, 1.0, 2.0):
        p = GgdParams(0.0, 1.0, beta)
        x = np.linspace(-3.1, 3.3, 20)
        h = 1e-5
        fd = (ggd_cdf(x + h, p) - ggd_cdf(x - h, p)) / (2 * h)
        fd_err = max(fd_err, float(np.max(np.abs(fd / ggd_pdf(x, p) - 1))))
    xs = np.linspace(-8, 8, 100)
    normal_err = float(np.max(np.abs(ggd_cdf(xs, GgdParams(0, 1, 2)) - special.ndtr(xs))))
    grid = np.linspace(0, 50, 501)
    theta_err = float(np.max(np.abs(regularized_lower_gamma(1.0, grid) + np.expm1(-grid))))

    n = 100_000
    ks = {}
    for beta in (1.0, 2.0):
        p = GgdParams(0, 1, beta)
        ks[beta] = stats.kstest(sample_ggd(8 + int(beta), n, p), lambda t: ggd_cdf(t, p)).statistic
    ks_crit = stats.kstwo.ppf(0.99, n)
    p05 = GgdParams(0, 1, 0.05)
    bins = 25
    counts, _ = np.histogram(ggd_cdf(sample_ggd(5, n, p05), p05), bins=np.linspace(0, 1, bins + 1))
    chi2 = float(((counts - n / bins) ** 2 / (n / bins)).sum())
    chi2_crit = stats.chi2.ppf(0.99, bins - 1)
    elapsed = time.perf_counter() - t0

    ok = (fd_err <= 1e-6 and normal_err <= 1e-9 and theta_err <= 1e-12
          and all(v < ks_crit for v in ks.values()) and chi2 < chi2_crit and elapsed < 10)
    acceptance(8, "GGD machinery", ok,
               f"fd rel err={fd_err:.2e} (<=1e-6); normal cdf err={normal_err:.2e} (<=1e-9); "
               f"Theta(1,x) err={theta_err:.2e} (<=1e-12); KS D={ks[1.0]:.4f},{ks[2.0]:.4f} "
               f"(<{ks_crit:.4f}); chi2(beta=0.05, {bins} bins)={chi2:.1f} (<{chi2_crit:.1f}); "
               f"runtime={elapsed:.1f}s (<10s)")
    assert ok


# 9 ---------------------------------------------------------------------------

def test_9_attraction_probability(acceptance, exp6_rho):
    a_vals = np.array([0.0, 1e-3, 1e-2, 0.1, 0.5])
    b_vals = np.array([0.6, 0.8, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0, 12.0, np.inf])
    worst = 0.0
    points = 0
    for a in a_vals:
        for b in b_vals:
            got = attraction_probability(a, b, GgdParams(0, 1, 2))
            oracle = 2 * (special.ndtr(b) - special.ndtr(a))
            worst = max(worst, abs(got - oracle))
            points += 1

    cfg, rep = exp6_rho
    key = "DWZA-LMS[rho=0.0002]"
    params = dict(cfg.algorithms)[key]
    p_formula = attraction_probability(params.a, params.b, cfg.systems[0].ggd)
    p_hat = rep.steady[key]["attracted"][0] / cfg.systems[0].L
    ok = points == 50 and worst <= 1e-8 and abs(p_hat - p_formula) <= 0.1
    acceptance(9, "P_A cross-check", ok,
               f"{points}-point grid max err={worst:.2e} (<=1e-8); empirical P_A={p_hat:.4f} "
               f"formula={p_formula:.4f} |diff|={abs(p_hat - p_formula):.4f} (<=0.1)")
    assert ok


# 10 --------------------------------------------------------------------------

def test_10_determinism_and_pairing(acceptance, tmp_path):
    cfg = replace(preset("exp1_white"), trials=8)
    first = run_experiment(cfg, out_dir=tmp_path / "a")
    run_experiment(cfg, out_dir=tmp_path / "b")
    par = run_experiment(cfg, workers=2, out_dir=tmp_path / "p")
    names = [p.name for p in first.files]
    rerun_same = all((tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
                     for f in names)
    parallel_same = all((tmp_path / "a" / f).read_bytes() == (tmp_path / "p" / f).read_bytes()
                        for f in names)
    sums = list(par.checksums.values())
    paired = all(s == sums[0] for s in sums) and len(set(sums[0])) == cfg.trials
    ok = rerun_same and parallel_same and paired
    acceptance(10, "determinism and pairing", ok,
               f"rerun identical={rerun_same}; serial vs 2 workers identical={parallel_same}; "
               f"per-trial checksums shared by {len(sums)} algorithms={paired}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
