""" Experiments run by the command line interface

Each ``run_*`` function takes an ExperimentConfig and returns an Outcome made of
the JSON report, CSV tables keyed by name and extra artifacts.
"""

from collections import namedtuple
import logging

import numpy as np

from .cohomology import (
    RingDatabase,
    central_constraint,
    check_stable,
    family_condition_C,
    overall,
    phase_from_classes,
)
from .cohomology.stability import default_t_grid
from .currents import MollifierKernel, comparison_check, eta_constant, load_chart
from .errors import ConfigError, HypothesisViolated
from .hermitian import (
    RelativePair,
    angle_P,
    angle_Q,
    eigen_frame,
    p_from_eigenvalues,
    q_from_eigenvalues,
    variational_Q,
)
from .hermitian.calibration import DEFAULT_THETA_GRID, build_table
from .hermitian.sampling import random_hermitian, random_pair, random_pair_in_gamma, random_positive, random_psd
from .report import Timer, make_report, run_shards, shard_seeds, shard_sizes
from .solver import continuity_path, load_problem, newton_solve

logger = logging.getLogger(__name__)

Outcome = namedtuple("Outcome", ["report", "tables", "extras"])

ANGLE_SUITES = (
    "monotonicity_Q",
    "monotonicity_P",
    "order_Q",
    "order_P",
    "concavity_Q",
    "concavity_P",
    "dominance",
    "variational",
    "attained",
)
FUNCTIONALS = {"Q": (angle_Q, q_from_eigenvalues), "P": (angle_P, p_from_eigenvalues)}


def _suite():
    return {"checked": 0, "violations": 0, "worst": -np.inf}


def _record(suite, excess, tol):
    suite["checked"] += 1
    suite["worst"] = max(suite["worst"], float(excess))
    if excess > tol:
        suite["violations"] += 1


def _cot(angle, pair, n):
    return 1.0 / np.tan(angle(pair, n))


def angles_shard(n, samples, seed_sequence, settings):
    """Property checks of the angle functionals on ``samples`` random pairs

    Monotonicity, order and cot-concavity are checked for both Q and P; P at
    order n is concave only for n >= 2 since P_1 = 0.

    Returns one suite dictionary per property with the number of checks, of
    violations and the worst excess over the bound.
    """
    rng = np.random.default_rng(seed_sequence)
    suites = {name: _suite() for name in ANGLE_SUITES}
    q_max = np.pi - settings["boundary_margin"]
    for _ in range(samples):
        pair = random_pair(rng, n)
        k = int(rng.integers(1, n + 1))
        bigger = RelativePair(pair.metric, pair.form + random_psd(rng, n))
        for name, (angle, from_eigenvalues) in FUNCTIONALS.items():
            _record(suites[f"monotonicity_{name}"], angle(bigger, k) - angle(pair, k), settings["monotonicity_tol"])
            values = [from_eigenvalues(pair.eigenvalues, j) for j in range(1, n + 1)]
            _record(suites[f"order_{name}"], max(a - b for a, b in zip(values, values[1:])) if n > 1 else -np.inf, 0.0)
        # Q_n - P_n is the arccot of the largest eigenvalue
        _record(suites["dominance"], angle_P(pair, n) - angle_Q(pair, n), 0.0)

        metric = random_positive(rng, n)
        first = random_pair_in_gamma(rng, n, q_max, metric)
        second = random_pair_in_gamma(rng, n, q_max, metric)
        t = rng.uniform()
        mixed = RelativePair(metric, t * first.form + (1.0 - t) * second.form)
        for name, (angle, _) in FUNCTIONALS.items():
            if name == "P" and n == 1:
                continue
            rhs = t * _cot(angle, first, n) + (1.0 - t) * _cot(angle, second, n)
            excess = (rhs - _cot(angle, mixed, n)) / max(1.0, abs(rhs))
            _record(suites[f"concavity_{name}"], excess, settings["concavity_tol"])

    if n in settings["variational_dims"]:
        for _ in range(max(1, samples // 20)):
            pair = RelativePair(np.eye(n), random_hermitian(rng, n, 2.0))
            k = int(rng.integers(1, n + 1))
            seed = int(rng.integers(2**31))
            exact = angle_Q(pair, k)
            _record(suites["variational"], variational_Q(pair, k, settings["frames"], seed) - exact, settings["variational_tol"])
            attained = variational_Q(pair, k, 1, seed, extra_frames=[eigen_frame(pair, k)])
            _record(suites["attained"], abs(attained - exact), 1e-10)
    return suites


def _merge_suites(shards):
    merged = {name: _suite() for name in ANGLE_SUITES}
    for shard in shards:
        for name, suite in shard.items():
            merged[name]["checked"] += suite["checked"]
            merged[name]["violations"] += suite["violations"]
            merged[name]["worst"] = max(merged[name]["worst"], suite["worst"])
    for suite in merged.values():
        suite["worst"] = None if suite["worst"] == -np.inf else suite["worst"]
    return merged


def run_angles(config):
    """Randomized property suites of the angle functionals"""
    settings = config.section("angles")
    rows = []
    results = {"dims": {}}
    with Timer() as timer:
        for n in settings["dims"]:
            n = int(n)
            if n < 1:
                raise ConfigError("angles.dims", f"dimension {n} must be >= 1")
            seeds = shard_seeds([config.seed, n], config.jobs)
            arguments = [(n, size, seq, settings) for size, seq in zip(shard_sizes(settings["samples"], config.jobs), seeds)]
            merged = _merge_suites(run_shards(angles_shard, arguments, config.jobs))
            results["dims"][str(n)] = merged
            for name, suite in merged.items():
                rows.append([n, name, suite["checked"], suite["violations"], suite["worst"]])
            logger.info(f"angles n = {n}: " + ", ".join(f"{k} {v['violations']}" for k, v in merged.items()))
    results["violations"] = sum(row[3] for row in rows)
    report = make_report(config, results, {"seconds": timer.seconds})
    return Outcome(report, {"angles": (["n", "suite", "checked", "violations", "worst"], rows)}, {})


def run_stability(config):
    """Phase, verdict table and stability polynomials of a ring family"""
    settings = config.section("stability")
    with Timer() as timer:
        ring = RingDatabase().load_ring(settings["ring"])
        if settings["family"] not in ring.families:
            raise ConfigError("stability.family", f"family <{settings['family']}> not declared in ring <{ring.name}>")
        fam = ring.family(settings["family"])
        phase = phase_from_classes(fam.base, fam.background)
        t_grid = default_t_grid(settings["t_max"], settings["t_points"])
        verdicts = check_stable(fam, phase, settings["cycles"], t_grid, sturm=settings["sturm"])
        try:
            condition_C = family_condition_C(fam, phase, fam.background)
        except HypothesisViolated:
            condition_C = None
    rows = [[v.cycle, v.dim, v.verdict, v.witness, v.signs, " ".join(repr(c) for c in v.coefficients)] for v in verdicts]
    results = {
        "ring": ring.name,
        "family": settings["family"],
        "theta0": phase.theta0,
        "cot_theta0": str(phase.cot),
        "central_constraint": central_constraint(fam.base, fam.background, phase),
        "verdicts": [v._asdict() for v in verdicts],
        "overall": overall(verdicts) if verdicts else None,
        "condition_C": condition_C,
    }
    logger.info(f"ring <{ring.name}>: theta0 = {phase.theta0:.12f}, {len(verdicts)} cycles checked")
    report = make_report(config, results, {"seconds": timer.seconds})
    header = ["cycle", "dim", "verdict", "witness", "signs", "coefficients"]
    return Outcome(report, {"stability": (header, rows)}, {})


def run_solve(config):
    """Newton solve, optionally along a continuity path, of a problem file"""
    settings = config.section("solve")
    options = {k: settings[k] for k in ("tol", "max_iter", "damping", "margin", "max_halvings", "linear_rtol")}
    with Timer() as timer:
        prob = load_problem(settings["problem"])
        if settings["path_steps"] > 0:
            reports = []
            phi = continuity_path(prob, settings["path_steps"], reports=reports, **options)
        else:
            phi, report = newton_solve(prob, **options)
            reports = [report]
    final = reports[-1]
    results = {
        "problem": prob.name,
        "m": prob.m,
        "grid": list(prob.grid),
        "path_steps": settings["path_steps"],
        "converged": final.converged,
        "steps": [r.to_dict() for r in reports],
        "residual": final.residual_norms[-1],
        "sup_error": None if prob.exact is None else phi.sup_distance(prob.exact),
    }
    rows = []
    for step, r in enumerate(reports):
        for it, values in enumerate(zip(r.residual_norms, r.angle_residual_norms, r.cone_margins, r.compatibility_gaps)):
            rows.append([step, it, *values])
    report = make_report(config, results, {"seconds": timer.seconds})
    header = ["step", "iteration", "residual", "angle_residual", "cone_margin", "compatibility_gap"]
    return Outcome(report, {"residuals": (header, rows)}, {"potential": phi})


def run_mollify(config):
    """Comparison formulas of a chart at the configured points and radii"""
    settings = config.section("mollify")
    with Timer() as timer:
        chart = load_chart(settings["chart"])
        kernel = MollifierKernel(chart.m, **config.section("kernel"))
        eta = eta_constant(chart.m, kernel)
        rows = []
        for point in settings["points"]:
            for r in settings["radii"]:
                c = comparison_check(chart, np.asarray(point, dtype=float), float(r), kernel, eta, settings["tol"])
                bound_half = np.log(2.0) * c.nu
                bound_moll = eta * c.nu
                rows.append(
                    [
                        str(list(point)),
                        float(r),
                        c.gap_half,
                        c.gap_moll,
                        c.nu,
                        bound_half,
                        bound_moll,
                        bound_half - c.gap_half,
                        bound_moll - c.gap_moll,
                        c.half_ok,
                        c.moll_ok,
                    ]
                )
    header = ["point", "r", "gap_half", "gap_moll", "nu", "bound_half", "bound_moll", "slack_half", "slack_moll", "half_ok", "moll_ok"]
    results = {
        "chart": chart.name,
        "psh": chart.psh,
        "eta": eta,
        "rows": [dict(zip(header, row)) for row in rows],
        "all_pass": all(row[9] and row[10] for row in rows) if chart.psh else None,
    }
    report = make_report(config, results, {"seconds": timer.seconds})
    return Outcome(report, {"comparison": (header, rows)}, {})


def run_calibrate(config):
    """Recompute the calibration table"""
    settings = config.section("calibrate")
    theta_grid = DEFAULT_THETA_GRID if settings["theta_grid"] is None else tuple(settings["theta_grid"])
    with Timer() as timer:
        table = build_table(
            [int(n) for n in settings["dims"]],
            theta_grid,
            settings["safety"],
            settings["levels"],
            settings["splits"],
            settings["eps_steps"],
            settings["sigma_samples"],
            config.seed,
        )
    rows = [
        [n, theta, c0, table.sigma0_table[n][i], table.C_n_table[n]]
        for n, values in table.c0_table.items()
        for i, (theta, c0) in enumerate(zip(table.theta_grid, values))
    ]
    report = make_report(config, table.minimal_dict(), {"seconds": timer.seconds})
    return Outcome(report, {"calibration": (["n", "theta", "c0", "sigma0", "C_n"], rows)}, {"table": table})


RUNNERS = {
    "angles": run_angles,
    "stability": run_stability,
    "solve": run_solve,
    "mollify": run_mollify,
    "calibrate": run_calibrate,
}
