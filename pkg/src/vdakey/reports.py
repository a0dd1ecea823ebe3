"""Row producers behind the command-line subcommands.

Each ``run_*`` function takes a :class:`Scenario` and returns a
:class:`Report`: column names, a units line and rows of plain values.
All randomness is derived from ``scenario.seed`` through counter-based
streams, one stream tag per report, so outputs do not depend on thread
count or on which other reports ran before.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .antenna import diagram_statistics, sample_excitations
from .channel import simulate_link
from .errors import ContractViolation, InfeasibleError
from .functionals import FunctionalKind, functional_sequence
from .optimizer import OptimizationProblem, optimize
from .scenario import Scenario, parse_grid
from .seeding import rng_for
from .sources import SyntheticSource
from .stats import gaussian_fit, pe_closed_form, pe_monte_carlo

# stream tags
_SWEEP, _PE, _TABLE, _DIST, _DEMO, _OFFSET = range(6)

OFFSET_TOLERANCE = 0.01


@dataclass
class Report:
    columns: list
    units: str
    rows: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# units: {self.units}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([fmt(row[c]) for c in self.columns])
        return buf.getvalue()


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".10g")
    return "" if v is None else str(v)


def _noiseless_correlations(scenario: Scenario, offset: float, phases: np.ndarray) -> tuple[float, float]:
    """B-vs-E correlation of the envelope and of the phase difference."""
    link = simulate_link(scenario.geometry(offset), scenario.antenna(), math.inf, phases, rng_for(0))
    n = phases.shape[0] // 2
    env_b, env_e = np.abs(link.clean[:n]), np.abs(link.obs_E[:n])
    dp_b = functional_sequence(link.clean, FunctionalKind.PHASE_DIFFERENCE)
    dp_e = functional_sequence(link.obs_E, FunctionalKind.PHASE_DIFFERENCE)
    return float(np.corrcoef(env_b, env_e)[0, 1]), float(np.corrcoef(dp_b, dp_e)[0, 1])


def run_correlation_sweep(scenario: Scenario) -> Report:
    offsets = parse_grid(scenario.sweep)
    if any(not 0 <= d < scenario.link_length for d in offsets):
        raise ContractViolation(f"sweep must stay within [0, {scenario.link_length})")
    n = scenario.trials
    phases = sample_excitations(scenario.antenna(), 2 * n, rng_for(scenario.seed, _SWEEP))
    report = Report(["delta_l", "r_envelope", "r_phase_diff", "sample_count"],
                    "delta_l [m]; r_envelope, r_phase_diff [dimensionless Pearson]; sample_count [values]")
    for d in offsets:
        r_env, r_dp = _noiseless_correlations(scenario, d, phases)
        report.rows.append({"delta_l": d, "r_envelope": r_env, "r_phase_diff": r_dp, "sample_count": n})
    return report


def run_pe_curve(scenario: Scenario) -> Report:
    grid = parse_grid(scenario.rho_grid)
    if any(not 0 < r <= 1 for r in grid):
        raise ContractViolation("rho grid must lie in (0, 1]")
    report = Report(["rho", "pe_closed", "pe_mc", "std_err"],
                    "rho [correlation]; pe_closed, pe_mc [probability]; std_err [probability]")
    for i, rho in enumerate(grid):
        mc = pe_monte_carlo(rho, scenario.trials, rng_for(scenario.seed, _PE, i))
        report.rows.append({"rho": rho, "pe_closed": pe_closed_form(rho), "pe_mc": mc.probability,
                            "std_err": mc.standard_error})
    return report


def offset_for_correlation(scenario: Scenario, rho: float, samples: int = 20_000) -> float:
    """Smallest eavesdropper offset whose phase-difference correlation is ``rho`` within 0.01.

    The correlation is not monotone in the offset, so a logarithmic grid is
    scanned from small offsets upward and the first hit (or the first
    bracketing pair, refined by bisection) wins.
    """
    phases = sample_excitations(scenario.antenna(), 2 * samples, rng_for(scenario.seed, _OFFSET))

    def r(d):
        return _noiseless_correlations(scenario, d, phases)[1]

    grid = np.geomspace(1e-3, scenario.link_length * 0.99, 160)
    prev_d, prev_r = 0.0, 1.0
    for d in grid:
        rd = r(d)
        if abs(rd - rho) <= OFFSET_TOLERANCE:
            return float(d)
        if (prev_r - rho) * (rd - rho) < 0:
            lo, hi, r_lo = prev_d, d, prev_r
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                rm = r(mid)
                if abs(rm - rho) <= OFFSET_TOLERANCE:
                    return float(mid)
                if (r_lo - rho) * (rm - rho) < 0:
                    hi = mid
                else:
                    lo, r_lo = mid, rm
        prev_d, prev_r = d, rd
    raise InfeasibleError(f"no eavesdropper offset reaches correlation {rho}")


TABLE_COLUMNS = {
    1: ["rho", "alpha_opt", "p_e", "p_er", "p1", "ell", "n0", "n", "rk_ell_over_n", "rk_ell_over_n0", "status"],
    2: ["rho", "m_opt", "p_e", "p_er", "p2", "ell", "n0", "n", "rk_ell_over_n", "rk_ell_over_n0", "status"],
}


def run_table(scenario: Scenario, synthetic_rho: float | None = None) -> Report:
    """Optimized key rate for every ``(rho, ell)`` pair.

    The candidates for one ``rho`` share a single draw across all ``ell``.
    Rows that cannot meet the targets are kept with ``status = infeasible``.
    """
    method = scenario.method
    param_col, err_col = TABLE_COLUMNS[method][1], TABLE_COLUMNS[method][4]
    report = Report(TABLE_COLUMNS[method],
                    f"rho [correlation]; {param_col} [{'std units' if method == 1 else 'values per block'}]; "
                    f"p_e, p_er, {err_col} [probability]; ell, n0, n [bits]; rk_* [bits per value]")
    rhos = [synthetic_rho] if synthetic_rho is not None else parse_grid(scenario.rho_list)
    ells = [int(e) for e in parse_grid(scenario.ell_list)]
    physical = synthetic_rho is None and scenario.source == "physical"
    for i, rho in enumerate(rhos):
        rng = rng_for(scenario.seed, _TABLE, i)
        status = "ok"
        try:
            if physical:
                source = scenario.physical_source(offset=offset_for_correlation(scenario, rho))
            else:
                source = SyntheticSource(rho, scenario.snr, scenario.workers)
            draw = source.draw(scenario.trials, rng)
        except InfeasibleError:
            status, draw, source = "infeasible", None, None
        for ell in ells:
            row = {c: math.nan for c in report.columns}
            row.update(rho=rho, ell=ell, status=status)
            if draw is not None:
                problem = OptimizationProblem(source, ell, scenario.selection_kind, scenario.search_grid(),
                                              scenario.leakage_target, scenario.ped_target, scenario.trials,
                                              scenario.block_size, scenario.diversity, scenario.n_cap)
                try:
                    res = optimize(problem, draw=draw)
                except InfeasibleError:
                    row["status"] = "infeasible"
                else:
                    best = res.best_parameter if method == 1 else int(res.best_parameter)
                    row.update({param_col: best, "p_e": res.measured.eavesdropper_error,
                                "p_er": res.measured.erasure_rate, err_col: res.measured.legal_error,
                                "n0": res.budget.n0, "n": res.n, "rk_ell_over_n": res.key_rate,
                                "rk_ell_over_n0": res.key_rate_n0, "status": "ok"})
            report.rows.append(row)
    return report


def run_distribution_report(scenario: Scenario, bins: int = 60) -> tuple[Report, Report]:
    """Histograms of the legal user's functionals and the fit statistics.

    The first report holds density histograms of the envelope and the phase
    difference; the second holds Gaussian fits of both, plus the phase
    uniformity and Rice fit of the antenna diagram.
    """
    if scenario.trials < 10_000:
        raise ContractViolation(f"trials must be at least 10000, got {scenario.trials}")
    rng = rng_for(scenario.seed, _DIST, 0)
    source = scenario.physical_source()
    link = source.simulate(2 * scenario.trials, rng)
    values = {
        "envelope": np.abs(link.obs_A[: scenario.trials]),
        "phase_difference": functional_sequence(link.obs_A, FunctionalKind.PHASE_DIFFERENCE),
    }
    hist = Report(["functional", "bin_left", "bin_right", "density"],
                  "functional [name]; bin_left, bin_right [functional units: envelope linear amplitude, "
                  "phase_difference rad]; density [per functional unit]")
    fits = Report(["quantity", "model", "param1", "param2", "ks_statistic", "ks_pvalue", "passed"],
                  "gaussian: param1 mean, param2 std; rice: param1 nu, param2 sigma; "
                  "uniform phase: param1 0, param2 2pi; ks_* [dimensionless]")
    for name, v in values.items():
        dens, edges = np.histogram(v, bins=bins, density=True)
        for k in range(bins):
            hist.rows.append({"functional": name, "bin_left": edges[k], "bin_right": edges[k + 1],
                              "density": dens[k]})
        g = gaussian_fit(v, 0.01)
        fits.rows.append({"quantity": name, "model": "gaussian", "param1": g.fit.mean, "param2": math.sqrt(g.fit.variance),
                          "ks_statistic": g.ks_statistic, "ks_pvalue": g.ks_pvalue, "passed": g.passed})
    stats = diagram_statistics(scenario.antenna(), 0.0, math.pi / 2, scenario.trials,
                               rng_for(scenario.seed, _DIST, 1))
    fits.rows.append({"quantity": "diagram_phase", "model": "uniform", "param1": 0.0, "param2": 2 * math.pi,
                      "ks_statistic": stats.phase_ks, "ks_pvalue": stats.phase_pvalue,
                      "passed": stats.phase_uniform})
    fits.rows.append({"quantity": "diagram_amplitude", "model": "rice", "param1": stats.rice_nu,
                      "param2": stats.rice_sigma, "ks_statistic": stats.rice_ks, "ks_pvalue": stats.rice_pvalue,
                      "passed": stats.rice_ok})
    return hist, fits


def demo_rng(scenario: Scenario, *counters: int) -> np.random.Generator:
    return rng_for(scenario.seed, _DEMO, *counters)
