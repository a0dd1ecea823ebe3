"""Acceptance gate: one test per criterion, each at its stated tolerance."""

import math

import numpy as np
import pytest

from vdakey.antenna import RingAntenna, diagram_statistics
from vdakey.keygen import SelectionKind
from vdakey.optimizer import OptimizationProblem, optimize
from vdakey.protocol import plan_protocol, run_protocol
from vdakey.reports import _noiseless_correlations
from vdakey.scenario import Scenario, parse_grid
from vdakey.antenna import sample_excitations
from vdakey.security import decoding_error_bound, gallager_E0, pa_leakage_bound, renyi_information
from vdakey.seeding import rng_for
from vdakey.sources import SyntheticSource
from vdakey.stats import pe_closed_form, pe_monte_carlo

SEED = 20_240_917

# reference rows: rho -> (parameter, p_e, {ell: (n0, R_k)})
REFERENCE_METHOD1 = {0.99: (0.1, 0.027, {128: (9300, 0.014), 256: (13100, 0.02), 512: (20600, 0.025)}),
           0.95: (0.1, 0.089, {128: (1200, 0.107), 256: (1950, 0.131), 512: (3420, 0.15)}),
           0.8: (0.15, 0.24, {128: (350, 0.37), 256: (580, 0.44), 512: (1055, 0.49)})}
REFERENCE_METHOD2 = {0.99: (9000, 0.019, {128: (7500, 0.017), 256: (12100, 0.021), 512: (21300, 0.024)}),
           0.95: (9000, 0.084, {128: (1130, 0.113), 256: (1820, 0.141), 512: (3200, 0.16)}),
           0.8: (9000, 0.24, {128: (360, 0.36), 256: (605, 0.42), 512: (1090, 0.47)})}


def test_criterion_1_closed_form(criterion):
    pe = pe_closed_form(0.95)
    ok = abs(pe - 0.1011) <= 0.0005
    criterion(1, ok, f"pe_closed_form(0.95) = {pe:.6f} (target 0.1011 +- 0.0005)")
    assert ok


def test_criterion_2_monte_carlo_oracle(criterion):
    worst = 0.0
    for i, rho in enumerate((0.2, 0.5, 0.8, 0.95, 0.99)):
        est = pe_monte_carlo(rho, 1_000_000, rng_for(SEED, 2, i))
        # binomial standard error at the exact probability
        p = pe_closed_form(rho)
        worst = max(worst, abs(est.probability - p) / math.sqrt(p * (1 - p) / est.n_samples))
    ok = worst < 3.0
    criterion(2, ok, f"max |MC - closed| = {worst:.2f} standard errors (limit 3)")
    assert ok


def test_criterion_3_antenna_statistics(criterion):
    ring = RingAntenna(6, 0.125 / 2, 0.125)
    s = diagram_statistics(ring, 0.0, math.pi / 2, 100_000, rng_for(SEED, 3))
    ok = s.phase_uniform and s.rice_ok
    criterion(3, ok, f"phase KS p = {s.phase_pvalue:.3f}, Rice KS p = {s.rice_pvalue:.3f} (level 0.01)")
    assert ok


def test_criterion_4_correlation_geometry(criterion):
    sc = Scenario()
    phases = sample_excitations(sc.antenna(), 200_000, rng_for(SEED, 4))
    near_env, near_dp = _noiseless_correlations(sc, 1e-3, phases)
    rows = [_noiseless_correlations(sc, d, phases) for d in parse_grid("3:22:1")]
    mean_env = float(np.mean([r[0] for r in rows]))
    mean_dp = float(np.mean([r[1] for r in rows]))
    ok = near_env > 0.99 and near_dp > 0.99 and mean_dp < mean_env
    criterion(4, ok, f"r(1 mm) env {near_env:.4f} dpsi {near_dp:.4f}; sweep means dpsi {mean_dp:.3f} "
                     f"< env {mean_env:.3f}")
    assert ok


def _table_rows(method: int, reference: dict, trials: int):
    fails, lines = [], []
    for i, rho in enumerate(sorted(reference, reverse=True)):
        param, pe_ref, entries = reference[rho]
        source = SyntheticSource(rho, 100.0)
        draw = source.draw(trials, rng_for(SEED, 5, method, i))
        kind = SelectionKind.THRESHOLD_ALPHA if method == 1 else SelectionKind.TOP_M
        grid = Scenario().search_grid() if method == 1 else tuple(int(m) for m in parse_grid(Scenario().m_grid))
        rates = []
        for ell, (_, rk_ref) in sorted(entries.items()):
            res = optimize(OptimizationProblem(source, ell, kind, grid, trials=trials), draw=draw)
            rk, pe = res.key_rate_n0, res.measured.eavesdropper_error
            rates.append(rk)
            dev = rk / rk_ref - 1.0
            lines.append(f"m{method} rho={rho} ell={ell}: R_k={rk:.4f} vs {rk_ref} ({dev:+.0%}), "
                         f"p_e={pe:.4f} vs {pe_ref}")
            if abs(dev) > 0.30:
                fails.append(f"m{method} rho={rho} ell={ell} R_k {dev:+.0%}")
            if abs(pe - pe_ref) > 0.03:
                fails.append(f"m{method} rho={rho} ell={ell} p_e {pe:.3f}")
        if not all(a < b for a, b in zip(rates, rates[1:])):
            fails.append(f"m{method} rho={rho} R_k not increasing in ell")
    return fails, lines


@pytest.mark.slow
def test_criterion_5_key_rate_reference(criterion):
    f1, l1 = _table_rows(1, REFERENCE_METHOD1, 200_000)
    f2, l2 = _table_rows(2, REFERENCE_METHOD2, 21 * 10_588)
    for line in l1 + l2:
        print(line)
    fails = f1 + f2
    ok = not fails
    criterion(5, ok, "all entries within tolerance" if ok else f"{len(fails)} violations: " + "; ".join(fails))
    assert ok, "\n".join(fails)


def test_criterion_6_security_properties(criterion):
    checks = {
        "renyi(n, 0.5) = 0": all(abs(renyi_information(n, 0.5)) < 1e-9 for n in (1, 100, 10_000)),
        "renyi(n, 0) = n": all(renyi_information(n, 0.0) == n for n in (1, 100, 10_000)),
        "margin 30 -> <= 1.35e-9": pa_leakage_bound(1000, 128, 800, 42) <= 1.35e-9,
        "E0(rho0, 0.5) = 0": all(abs(gallager_E0(r, 0.5)) < 1e-12 for r in np.linspace(0.01, 0.99, 99)),
        "P_ed bound non-increasing in r": all(
            all(b <= a for a, b in zip(seq, seq[1:]))
            for seq in ([decoding_error_bound(400, r, p) for r in range(0, 2000, 10)] for p in (0.003, 0.03, 0.1))),
    }
    for i, (rho, ell) in enumerate(((0.8, 128), (0.95, 256), (0.99, 512))):
        res = optimize(OptimizationProblem(SyntheticSource(rho), ell, trials=100_000), rng_for(SEED, 6, i))
        b = res.budget
        checks[f"optimizer result rho={rho} re-verifies"] = (
            res.verify(1e-9, 1e-5) and b.leakage_bound <= 1e-9 and b.decoding_bound <= 1e-5
            and pa_leakage_bound(b.n0, b.ell, b.renyi_t, b.check_bits) <= 1e-9
            and decoding_error_bound(b.n0, b.check_bits, res.legal_error_used) <= 1e-5)
    bad = [k for k, v in checks.items() if not v]
    ok = not bad
    criterion(6, ok, f"{len(checks)} checks" + ("" if ok else f", failed: {bad}"))
    assert ok


def test_criterion_7_diversity(criterion):
    t = renyi_information(100, 0.1, diversity_m=2)
    ok = abs(t - 85.68) <= 0.01
    criterion(7, ok, f"renyi_information(100, 0.1, m=2) = {t:.5f} (target 85.68 +- 0.01)")
    assert ok


@pytest.mark.slow
def test_criterion_8_protocol_demo(criterion):
    sc = Scenario(snr=100.0)
    source = sc.physical_source()
    plan = plan_protocol(source, 128, rng_for(SEED, 8, 0), trials=100_000)
    matches = random_ok = 0
    for i in range(100):
        out = run_protocol(source, plan, rng_for(SEED, 8, 1, i))
        matches += out.keys_match
        random_ok += out.randomness.passed
    ok = matches >= 99 and random_ok >= 95
    criterion(8, ok, f"keys equal in {matches}/100 (need 99), randomness passed in {random_ok}/100 (need 95); "
                     f"alpha={plan.alpha}, n0={plan.n0}, r={plan.check_bits}, offset={sc.eavesdropper_offset} m")
    assert ok
