"""
Experiment runner behind the command-line tool: each ``cmd_*`` function
takes a validated :class:`~pita.config.ExperimentConfig`, runs one
experiment and writes its CSV files and report into ``config.out``.
"""

import csv
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .accel import vector_accelerate
from .constants import CSV_FLOAT_FORMAT
from .exceptions import ConfigError, OutputError
from .omega import build_omega_series, build_psi_family, omega_error_curve
from .optimize import (
    anneal_chains,
    periodic_refresh,
    propagate_calibration,
    reference_limits,
    scan_objective,
)
from .parareal import extrapolated_solution, run_parareal
from .propagators import exact_solution, step_count

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ErrorReportRow:
    j: int
    q_opt: float
    err_vs_omega_lim: float
    err_vs_exact: float
    # per-slice calibration against the exact solution
    q_opt_exact: Optional[float] = None

    def __post_init__(self):
        if self.err_vs_omega_lim < 0 or self.err_vs_exact < 0:
            raise ConfigError("report errors must be non-negative")


###########################
# writers
###########################
def _fmt(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), CSV_FLOAT_FORMAT)


def write_csv(path, header, rows):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(value) for value in row])
    except OSError as exc:
        raise OutputError(path, exc) from exc
    logger.info("wrote %s", path)
    return path


def _state_header(dim):
    return ['t'] + ['x{}'.format(i + 1) for i in range(dim)]


def write_trajectory(path, times, states):
    return write_csv(path, _state_header(states.shape[1]),
                     ([t] + list(state) for t, state in zip(times, states)))


def _format_q(q, q_min):
    if q <= q_min:
        return "<={:g}".format(q_min)
    return "{:.4g}".format(q)


def format_report(rows, scale, q_min, title=""):
    """Errors in units of 10^-scale, one line per slice."""
    factor = 10.0 ** scale
    per_slice = any(row.q_opt_exact is not None for row in rows)
    columns = ['j', 'q_opt']
    if per_slice:
        columns.append('q_opt_exact')
    columns += ['err_vs_omega_lim', 'err_vs_exact']
    lines = []
    if title:
        lines.append("# {}".format(title))
    lines.append("# errors x 10^-{}".format(scale))
    lines.append("  ".join(columns))
    for row in rows:
        cells = [str(row.j), _format_q(row.q_opt, q_min)]
        if per_slice:
            cells.append(_format_q(row.q_opt_exact, q_min))
        cells += ["{:.4f}".format(row.err_vs_omega_lim * factor),
                  "{:.4f}".format(row.err_vs_exact * factor)]
        lines.append("  ".join(cells))
    return "\n".join(lines) + "\n"


def write_report(path, text):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
    except OSError as exc:
        raise OutputError(path, exc) from exc
    logger.info("wrote %s", path)
    return path


###########################
# helpers
###########################
def coarse_instants(config):
    """t0 + k*h0 up to Tf."""
    grid = config.grid
    count = step_count(grid.t0, grid.Tf, config.h0)
    times = grid.t0 + config.h0 * np.arange(count + 1, dtype=np.float64)
    times[-1] = grid.Tf
    return times


def _exact_at(system, times, t0):
    return np.vstack([exact_solution(system, t - t0) for t in times])


def _targets(config, times):
    """Reference limits and exact values at the slice boundaries."""
    limits = reference_limits(config.system, times, config.calibration.h_tiny)
    exact = _exact_at(config.system, times, config.grid.t0)
    return limits, exact


def _calibrate(config, series, target, executor):
    return anneal_chains(series, target, config.accel.rho, config.anneal,
                         chains=config.calibration.chains, base_spec=config.accel,
                         executor=executor)


###########################
# commands
###########################
def cmd_exact(config, executor=None):
    times = coarse_instants(config)
    states = _exact_at(config.system, times, config.grid.t0)
    return [write_trajectory(config.out / 'exact.csv', times, states)]


def cmd_euler_study(config, executor=None):
    sub = config.study.subdivisions
    grid, system = config.grid, config.system
    family = build_psi_family(system, sub, grid.Tf, executor, t0=grid.t0)
    written = [write_trajectory(config.out / 'psi_{}.csv'.format(delta), psi.times, psi.states)
               for delta, psi in family.items()]

    times = coarse_instants(config)
    exact = _exact_at(system, times, grid.t0)
    err_rows, acc_rows = [], []
    spec = config.study.spec
    for k0 in range(1, times.shape[0]):
        series = build_omega_series(system, sub, k0, grid.Tf, family, t0=grid.t0)
        errors = omega_error_curve(series, exact[k0])
        err_rows.extend((k0, delta, err) for delta, err in zip(sub.deltas, errors))
        tail = [i for i, delta in enumerate(sub.deltas) if delta >= config.study.accel_from]
        if len(tail) >= spec.terms_needed:
            accelerated = vector_accelerate(spec, [series.terms[i] for i in tail])
            acc_rows.append((k0, float(np.min(errors[tail])),
                             float(np.linalg.norm(accelerated - exact[k0]))))
    written.append(write_csv(config.out / 'omega_err.csv', ['k0', 'delta', 'err'], err_rows))
    if acc_rows:
        written.append(write_csv(config.out / 'omega_acc.csv',
                                 ['k0', 'best_raw_err', 'accelerated_err'], acc_rows))
    else:
        logger.warning("omega_acc.csv skipped: fewer than %d subdivisions from delta=%d",
                       spec.terms_needed, config.study.accel_from)
    return written


def calibrated_specs(config, result, targets, executor=None):
    """
    One AccelSpec per slice plus the q reported for it. A fixed ``accel.q``
    skips annealing; otherwise q is recalibrated at the refresh slices and
    held in between.
    """
    n_slices = result.n_slices
    if config.fixed_q is not None:
        spec = config.accel.with_q(config.fixed_q)
        return [spec] * n_slices, [None] * n_slices
    interval = config.calibration.refresh_interval or n_slices
    refresh = set(periodic_refresh(interval, n_slices))
    specs, calibrations, current = [], [], None
    for j in range(1, n_slices + 1):
        if j in refresh:
            current = _calibrate(config, result.omega_per_slice[j - 1], targets[j], executor)
            logger.info("slice %d: q_opt=%.4g objective=%.3e", j, current.q_opt, current.objective_at_opt)
        specs.append(propagate_calibration(current, config.accel))
        calibrations.append(current)
    return specs, calibrations


def _slice_errors(solution, limits, exact):
    return ([float(np.linalg.norm(solution[j - 1] - limits[j])) for j in range(1, len(solution) + 1)],
            [float(np.linalg.norm(solution[j - 1] - exact[j])) for j in range(1, len(solution) + 1)])


def _run_pipeline(config, executor):
    if config.mode == 'euler-study':
        raise ConfigError("mode: the parareal command needs parareal-semi or parareal-classic")
    result = run_parareal(config.system, config.parareal, executor)
    limits, exact = _targets(config, result.times)
    return result, limits, exact


def cmd_parareal(config, executor=None):
    result, limits, exact = _run_pipeline(config, executor)
    target_of = exact if config.calibration.reference == 'exact' else limits
    if config.calibration.mode == 'per-slice' and config.fixed_q is None:
        rows, solution = _per_slice_rows(config, result, limits, exact, executor)
    else:
        specs, _ = calibrated_specs(config, result, target_of, executor)
        solution = extrapolated_solution(result, config.accel, specs)
        err_lim, err_exact = _slice_errors(solution, limits, exact)
        rows = [ErrorReportRow(j, spec.aux.q, err_lim[j - 1], err_exact[j - 1])
                for j, spec in enumerate(specs, start=1)]

    written = [
        write_csv(config.out / 'omega_err_para.csv', ['j', 'k', 'err'],
                  ((j, k, float(np.linalg.norm(term - exact[j])))
                   for j, series in enumerate(result.omega_per_slice, start=1)
                   for k, term in enumerate(series.terms, start=2))),
        write_trajectory(config.out / 'solution.csv', result.times,
                         np.vstack([config.system.y0] + list(solution))),
        write_report(config.out / 'report.txt',
                     format_report(rows, config.report_scale, config.anneal.q_min, title=config.mode)),
    ]
    return written


def _per_slice_rows(config, result, limits, exact, executor):
    """Calibrate every slice twice: against its reference limit and against the exact value."""
    rows, solution = [], []
    for j, series in enumerate(result.omega_per_slice, start=1):
        vs_lim = _calibrate(config, series, limits[j], executor)
        vs_exact = _calibrate(config, series, exact[j], executor)
        value_lim = vector_accelerate(propagate_calibration(vs_lim, config.accel), series.terms)
        value_exact = vector_accelerate(propagate_calibration(vs_exact, config.accel), series.terms)
        rows.append(ErrorReportRow(j, vs_lim.q_opt,
                                   float(np.linalg.norm(value_lim - limits[j])),
                                   float(np.linalg.norm(value_exact - exact[j])),
                                   q_opt_exact=vs_exact.q_opt))
        solution.append(value_lim)
    result.final_solution = solution
    return rows, solution


def cmd_optimize_q(config, executor=None):
    result, limits, exact = _run_pipeline(config, executor)
    targets = exact if config.calibration.reference == 'exact' else limits
    n_slices = result.n_slices
    interval = config.calibration.refresh_interval or n_slices
    calibration_rows = []
    for j in periodic_refresh(interval, n_slices):
        calibration = _calibrate(config, result.omega_per_slice[j - 1], targets[j], executor)
        calibration_rows.append((j, calibration.q_opt, calibration.objective_at_opt,
                                 calibration.initial_objective, calibration.evaluations))

    qs = np.logspace(np.log10(config.anneal.q_min), np.log10(config.anneal.q_max), 61)
    scan = scan_objective(result.omega_per_slice[0], targets[1], config.accel.rho, qs,
                          base_spec=config.accel)
    return [
        write_csv(config.out / 'calibration.csv',
                  ['j', 'q_opt', 'objective', 'initial_objective', 'evaluations'],
                  calibration_rows),
        write_csv(config.out / 'objective_scan.csv', ['q', 'objective'], zip(qs, scan)),
    ]


COMMANDS = {
    'exact': cmd_exact,
    'euler-study': cmd_euler_study,
    'parareal': cmd_parareal,
    'optimize-q': cmd_optimize_q,
}


def run(command, config, executor=None):
    try:
        fn = COMMANDS[command]
    except KeyError:
        raise ConfigError("unknown command {!r}".format(command)) from None
    logger.info("running %s (mode %s) into %s", command, config.mode, config.out)
    return fn(config, executor)
