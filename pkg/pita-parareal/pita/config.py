"""
Experiment configuration: the key schema, built-in presets and the parser
that turns a flat YAML file plus command-line overrides into a validated
:class:`ExperimentConfig`.
"""

import logging
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import yaml

from .accel import AccelSpec, AuxSeriesParams
from .constants import (
    DEFAULT_ACCEL_K,
    DEFAULT_ACCEL_N,
    DEFAULT_ANNEAL_STEPS,
    DEFAULT_COOLING,
    DEFAULT_H_TINY,
    DEFAULT_PROPOSAL_SCALE,
    DEFAULT_Q_MAX,
    DEFAULT_Q_MIN,
    DEFAULT_THREADS,
    DENOM_GUARD,
)
from .exceptions import ConfigError
from .model import LTISystem, TimeGrid, validate_system
from .omega import SubdivisionSet
from .optimize import AnnealConfig
from .parareal import ClassicMode, DeltaSchedule, ParerealConfig, SemiExplicitMode
from .propagators import PropagatorKind

logger = logging.getLogger(__name__)

MODES = ('euler-study', 'parareal-classic', 'parareal-semi')
KINDS = tuple(kind.value for kind in PropagatorKind)
CALIBRATION_MODES = ('first', 'per-slice')
REFERENCES = ('bootstrap', 'exact')

REQUIRED = object()


@dataclass(frozen=True)
class Key:
    type: str
    default: Any
    help: str
    choices: Optional[tuple] = None
    nullable: bool = False


###########################
# schema
###########################
SCHEMA = OrderedDict([
    ('system.A', Key('matrix', REQUIRED, "state matrix, one list per row")),
    ('system.B', Key('matrix', REQUIRED, "input matrix (a flat list is one column)")),
    ('system.u', Key('vector', REQUIRED, "constant input")),
    ('system.y0', Key('vector', REQUIRED, "initial state")),
    ('grid.t0', Key('float', 0.0, "start of the horizon")),
    ('grid.Tf', Key('float', REQUIRED, "end of the horizon")),
    ('grid.N', Key('int', 9, "number of time slices")),
    ('mode', Key('str', 'parareal-semi', "experiment kind", choices=MODES)),
    ('h0', Key('float', None, "reference step of the exact/study outputs (default: slice width)",
               nullable=True)),
    ('study.deltas', Key('int_list', [1, 2, 5, 10, 20, 50, 100, 200, 400, 800],
                         "subdivision factors, starting at 1")),
    ('study.accel_from', Key('int', 50, "smallest delta of the accelerated omega tail")),
    ('study.accel_k', Key('int', 4, "extrapolation order of the study")),
    ('study.accel_n', Key('int', 0, "starting index of the study extrapolation")),
    ('parareal.iterations', Key('int', 8, "correction passes K")),
    ('parareal.coarse_steps', Key('int', 1, "coarse steps per slice")),
    ('parareal.coarse_kind', Key('str', 'implicit', "classic coarse propagator", choices=KINDS)),
    ('parareal.fine_kind', Key('str', 'explicit', "classic fine propagator", choices=KINDS)),
    ('parareal.fine_step', Key('float', None, "classic fine step", nullable=True)),
    ('schedule.delta_base', Key('float', 100.0, "delta of the first correction pass")),
    ('schedule.delta_step', Key('float', 1.0, "delta increment per pass")),
    ('schedule.delta1', Key('float', None, "lower bound of consecutive delta distances",
                            nullable=True)),
    ('schedule.delta2', Key('float', None, "upper bound of consecutive delta distances",
                            nullable=True)),
    ('accel.k', Key('int', DEFAULT_ACCEL_K, "extrapolation order (even)")),
    ('accel.n', Key('int', DEFAULT_ACCEL_N, "starting index of the extrapolation")),
    ('accel.rho', Key('float', 1.0, "scaling of the omega series before coupling")),
    ('accel.S_b0', Key('float', 0.0, "offset of the auxiliary series")),
    ('accel.q', Key('float', None, "fixed exponent; skips calibration when set", nullable=True)),
    ('accel.aux_form', Key('str', 'literal', "auxiliary series form",
                           choices=('literal', 'alternate'))),
    ('accel.denom_guard', Key('float', DENOM_GUARD, "epsilon small-denominator guard")),
    ('anneal.q_min', Key('float', DEFAULT_Q_MIN, "lower bound on q")),
    ('anneal.q_max', Key('float', DEFAULT_Q_MAX, "upper bound on q")),
    ('anneal.q_init', Key('float', None, "starting q (default: log midpoint)", nullable=True)),
    ('anneal.initial_temp', Key('float', None, "start temperature (default: initial objective)",
                                nullable=True)),
    ('anneal.cooling', Key('float', DEFAULT_COOLING, "geometric cooling factor")),
    ('anneal.steps', Key('int', DEFAULT_ANNEAL_STEPS, "proposals per chain")),
    ('anneal.proposal_scale', Key('float', DEFAULT_PROPOSAL_SCALE, "proposal spread in decades")),
    ('anneal.chains', Key('int', 1, "independent chains, best one kept")),
    ('calibration.mode', Key('str', 'first', "calibrate on the first slice or on every slice",
                             choices=CALIBRATION_MODES)),
    ('calibration.refresh_interval', Key('int', None, "slices between recalibrations "
                                                      "(default: calibrate once)", nullable=True)),
    ('calibration.reference', Key('str', 'bootstrap', "target of the calibration",
                                  choices=REFERENCES)),
    ('calibration.h_tiny', Key('float', DEFAULT_H_TINY, "step of the reference explicit run")),
    ('report.scale', Key('int', 4, "report errors in units of 10^-scale")),
    ('seed', Key('int', 0, "annealing seed")),
    ('threads', Key('int', DEFAULT_THREADS, "worker threads")),
    ('out', Key('str', '.', "output directory")),
])


###########################
# presets
###########################
SIGMA_SYSTEM = {
    'system.A': [[-1.0, 5.0], [-5.0, -1.0]],
    'system.B': [0.0, 1.0],
    'system.u': [10.0],
    'system.y0': [0.0, 1.0],
    'grid.t0': 0.0,
    'grid.Tf': 0.9,
    'grid.N': 9,
    'h0': 0.1,
}


# Coarse Euler steps per slice of the acceptance setup. One step at h0 = 0.1
# gives a fine step of 1e-3 whose explicit Euler error alone (about 2.3e-3 at
# t = 0.1) exceeds the 1e-4..1e-3 error band, so the slice is split in 14.
ACCEPTANCE_COARSE_STEPS = 14


def _sigma_preset(delta, distance, coarse_steps, scale):
    preset = dict(SIGMA_SYSTEM)
    preset.update({
        'mode': 'parareal-semi',
        'parareal.iterations': 8,
        'parareal.coarse_steps': coarse_steps,
        'schedule.delta_base': float(delta),
        'schedule.delta_step': float(distance),
        'schedule.delta1': distance / 2.0,
        'schedule.delta2': 3.0 * distance / 2.0,
        'accel.k': 4,
        'accel.n': 2,
        'report.scale': scale,
    })
    return preset


# coarse_steps is the smallest count making delta * coarse_steps whole on every
# pass, except for paper-sigma (see ACCEPTANCE_COARSE_STEPS)
PRESETS = {
    'paper-sigma': _sigma_preset(100, 1.0, ACCEPTANCE_COARSE_STEPS, 4),
    'sigma-d500-s0.5': _sigma_preset(500, 0.5, 2, 3),
    'sigma-d100-s0.1': _sigma_preset(100, 0.1, 10, 4),
    'sigma-d50-s0.05': _sigma_preset(50, 0.05, 20, 4),
    'sigma-d500-s5': _sigma_preset(500, 5.0, 1, 4),
    'sigma-d100-s1': _sigma_preset(100, 1.0, 1, 4),
    'sigma-d50-s0.5': _sigma_preset(50, 0.5, 2, 4),
}
PRESETS['sigma'] = PRESETS['paper-sigma']


###########################
# validated configuration
###########################
@dataclass(frozen=True)
class CalibrationSettings:
    mode: str = 'first'
    refresh_interval: Optional[int] = None
    reference: str = 'bootstrap'
    h_tiny: float = DEFAULT_H_TINY
    chains: int = 1


@dataclass(frozen=True)
class StudySettings:
    subdivisions: SubdivisionSet
    accel_from: int
    spec: AccelSpec


@dataclass(frozen=True)
class ExperimentConfig:
    system: LTISystem
    grid: TimeGrid
    mode: str
    h0: float
    study: StudySettings
    parareal: ParerealConfig
    accel: AccelSpec
    anneal: AnnealConfig
    calibration: CalibrationSettings
    report_scale: int
    seed: int
    threads: int
    out: Path
    values: Dict[str, Any]

    @property
    def fixed_q(self):
        return self.values['accel.q']

    def with_mode(self, mode):
        return build_config(dict(self.values, mode=mode))


###########################
# value coercion
###########################
def _coerce(name, key, value):
    if value is None:
        if key.nullable:
            return None
        raise ConfigError("{}: a value is required".format(name))
    try:
        if key.type == 'float':
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise TypeError
            return float(value)
        if key.type == 'int':
            if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
                raise TypeError
            return int(value)
        if key.type == 'str':
            if not isinstance(value, str):
                raise TypeError
            if key.choices and value not in key.choices:
                raise ConfigError("{}: expected one of {}, got {!r}".format(
                    name, ", ".join(key.choices), value))
            return value
        if key.type == 'int_list':
            if not isinstance(value, list) or any(isinstance(v, bool) or int(v) != v for v in value):
                raise TypeError
            return [int(v) for v in value]
        if key.type in ('vector', 'matrix'):
            if not isinstance(value, (list, int, float)) or isinstance(value, bool):
                raise TypeError
            arr = np.array(value, dtype=np.float64)
            if key.type == 'matrix' and arr.ndim not in (1, 2):
                raise TypeError
            if key.type == 'vector' and arr.ndim > 1:
                raise TypeError
            return arr.tolist()
    except (TypeError, ValueError):
        raise ConfigError("{}: expected {}, got {!r}".format(name, key.type, value)) from None
    raise ConfigError("{}: unsupported type {}".format(name, key.type))


def _flatten(mapping, prefix=''):
    flat = {}
    for name, value in mapping.items():
        dotted = "{}{}".format(prefix, name)
        if isinstance(value, dict):
            flat.update(_flatten(value, dotted + '.'))
        else:
            flat[dotted] = value
    return flat


def _merge(values, updates, origin):
    for name, value in updates.items():
        if name not in SCHEMA:
            raise ConfigError("{}: unknown key {!r}".format(origin, name))
        values[name] = value


def load_file(path):
    """Flat dotted-key mapping from a YAML file (nested mappings are flattened)."""
    path = Path(path)
    try:
        with open(path, encoding='utf-8') as f:
            data = yaml.safe_load(f)
    except FileNotFoundError:
        raise ConfigError("config file not found: {}".format(path)) from None
    except OSError as exc:
        raise ConfigError("cannot read config file {}: {}".format(path, exc.strerror or exc)) from None
    except yaml.YAMLError as exc:
        mark = getattr(exc, 'problem_mark', None)
        where = "" if mark is None else ":{}".format(mark.line + 1)
        raise ConfigError("{}{}: invalid YAML ({})".format(path, where, getattr(exc, 'problem', exc))) from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("{}: expected a mapping of keys to values".format(path))
    return _flatten(data)


def parse_assignment(text):
    """``KEY=VALUE`` with the value read as YAML."""
    name, sep, raw = text.partition('=')
    if not sep or not name.strip():
        raise ConfigError("--set expects KEY=VALUE, got {!r}".format(text))
    try:
        value = yaml.safe_load(raw) if raw.strip() else None
    except yaml.YAMLError:
        raise ConfigError("--set {}: cannot read value {!r}".format(name, raw)) from None
    return name.strip(), value


def parse_config(path=None, preset=None, assignments=(), **flags):
    """
    Resolve preset < file < ``--set`` assignments < dedicated flags
    (seed, threads, out, mode) and validate the result.
    """
    values = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError("unknown preset {!r}; available: {}".format(preset, ", ".join(sorted(PRESETS))))
        _merge(values, PRESETS[preset], "preset {}".format(preset))
    if path is not None:
        _merge(values, load_file(path), str(path))
    for text in assignments:
        name, value = parse_assignment(text)
        _merge(values, {name: value}, "--set")
    _merge(values, {k: v for k, v in flags.items() if v is not None}, "flags")
    return build_config(values)


def _resolve(values):
    resolved = {}
    for name, key in SCHEMA.items():
        if name in values:
            resolved[name] = _coerce(name, key, values[name])
        elif key.default is REQUIRED:
            raise ConfigError("{}: missing required key".format(name))
        else:
            resolved[name] = key.default
    return resolved


def build_config(values):
    v = _resolve(values)
    system = validate_system(LTISystem(v['system.A'], v['system.B'], v['system.u'], v['system.y0']))
    grid = TimeGrid(v['grid.t0'], v['grid.Tf'], v['grid.N'])
    h0 = v['h0'] if v['h0'] is not None else grid.h_g

    aux = AuxSeriesParams(S_b0=v['accel.S_b0'], q=v['accel.q'] or 1.0, form=v['accel.aux_form'])
    accel = AccelSpec(k=v['accel.k'], n=v['accel.n'], rho=v['accel.rho'], aux=aux,
                      denom_guard=v['accel.denom_guard'],
                      delta1=v['schedule.delta1'], delta2=v['schedule.delta2'])

    study = StudySettings(
        subdivisions=SubdivisionSet(h0, v['study.deltas']),
        accel_from=v['study.accel_from'],
        spec=AccelSpec(k=v['study.accel_k'], n=v['study.accel_n'], denom_guard=v['accel.denom_guard']))

    schedule = DeltaSchedule(v['schedule.delta_base'], v['schedule.delta_step'],
                             v['schedule.delta1'], v['schedule.delta2'])
    if v['mode'] == 'parareal-classic':
        if v['parareal.fine_step'] is None:
            raise ConfigError("parareal.fine_step: required in the classic mode")
        mode = ClassicMode(v['parareal.fine_step'],
                           coarse_kind=PropagatorKind(v['parareal.coarse_kind']),
                           fine_kind=PropagatorKind(v['parareal.fine_kind']))
    else:
        mode = SemiExplicitMode()
    parareal = ParerealConfig(grid=grid, iterations=v['parareal.iterations'], schedule=schedule,
                              mode=mode, coarse_steps=v['parareal.coarse_steps'])

    anneal = AnnealConfig(q_min=v['anneal.q_min'], q_max=v['anneal.q_max'],
                          initial_temp=v['anneal.initial_temp'], cooling=v['anneal.cooling'],
                          steps=v['anneal.steps'], proposal_scale=v['anneal.proposal_scale'],
                          seed=v['seed'], q_init=v['anneal.q_init'])
    if v['anneal.chains'] < 1:
        raise ConfigError("anneal.chains must be at least 1, got {}".format(v['anneal.chains']))
    if v['calibration.refresh_interval'] is not None and v['calibration.refresh_interval'] < 1:
        raise ConfigError("calibration.refresh_interval must be at least 1")
    if not v['calibration.h_tiny'] > 0:
        raise ConfigError("calibration.h_tiny must be positive")
    calibration = CalibrationSettings(mode=v['calibration.mode'],
                                      refresh_interval=v['calibration.refresh_interval'],
                                      reference=v['calibration.reference'],
                                      h_tiny=v['calibration.h_tiny'],
                                      chains=v['anneal.chains'])
    if v['threads'] < 1:
        raise ConfigError("threads must be at least 1, got {}".format(v['threads']))

    logger.debug("configuration resolved: mode=%s, %d slices", v['mode'], grid.N)
    return ExperimentConfig(system=system, grid=grid, mode=v['mode'], h0=h0, study=study,
                            parareal=parareal, accel=accel, anneal=anneal,
                            calibration=calibration, report_scale=v['report.scale'],
                            seed=v['seed'], threads=v['threads'], out=Path(v['out']),
                            values=v)


def describe_schema():
    """The key table shown by ``--help``."""
    lines = []
    for name, key in SCHEMA.items():
        default = "(required)" if key.default is REQUIRED else repr(key.default)
        choices = "" if not key.choices else " [{}]".format("|".join(key.choices))
        lines.append("  {:<30} {}{} (default: {})".format(name, key.help, choices, default))
    lines.append("")
    lines.append("presets: " + ", ".join(sorted(PRESETS)))
    return "\n".join(lines)
