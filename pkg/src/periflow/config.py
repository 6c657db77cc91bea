"""Run configuration: a flat INI-style key-value file with sections.

Grammar (configparser syntax; all keys optional unless noted):

    [geometry]
    profile  = straight | cosine | tabulated
    amplitude = <float>        # cosine only, walls close at 0.5
    periods   = <int>          # cosine only
    table     = <path.csv>     # tabulated only: columns x,y_bottom,y_top

    [mesh]
    nx = <int >= 1>            # required
    ny = <int >= 1>            # required

    [physics]
    lambda  = <float>          # pressure-loss coefficient, required
    problem = stokes | navier-stokes

    [solver]
    linear_tol / nonlinear_tol / max_picard / newton_threshold / use_newton

    [output]
    directory = <dir>          # required
    reports   = traces,fields,energy   # any of traces|fields|convergence|energy
    figures   = true | false

    [tolerances]               # overrides for the verification checks
    energy / jump / periodicity / divergence / flux / poiseuille

    [convergence]
    meshes = 12,24,48          # nx values for the refinement sweep

Unknown sections or keys are rejected, naming the offender.  The MANIFEST
written next to the outputs echoes the effective configuration in this same
grammar (results appear as comment lines), so a run can be reproduced from
its MANIFEST.
"""

import configparser
import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import ChannelGeometry, GeometryError
from .solvers import SolveOptions

__all__ = ["RunConfig", "ConfigError", "load_config", "config_sections"]

VALID_REPORTS = ("traces", "fields", "convergence", "energy")

_KNOWN_KEYS = {
    "geometry": {"profile", "amplitude", "periods", "table"},
    "mesh": {"nx", "ny"},
    "physics": {"lambda", "problem"},
    "solver": {"linear_tol", "nonlinear_tol", "max_picard", "newton_threshold", "use_newton"},
    "output": {"directory", "reports", "figures"},
    "tolerances": {"energy", "jump", "periodicity", "divergence", "flux", "poiseuille"},
    "convergence": {"meshes"},
}


class ConfigError(ValueError):
    """Invalid configuration; the message names the section and field."""


@dataclass
class RunConfig:
    geometry: ChannelGeometry
    nx: int
    ny: int
    lam: float
    problem: str = "stokes"
    solver: SolveOptions = field(default_factory=SolveOptions)
    out_dir: Path = Path("out")
    reports: tuple = ("traces", "fields", "energy")
    figures: bool = True
    tolerances: dict = field(default_factory=dict)
    convergence_meshes: tuple = (12, 24, 48)
    geometry_table: str = ""


def _get(parser, section, key, conv, default, where):
    if not parser.has_option(section, key):
        if default is _REQUIRED:
            raise ConfigError(f"[{section}] {key}: required field is missing (in {where})")
        return default
    raw = parser.get(section, key)
    try:
        return conv(raw)
    except (ValueError, TypeError) as err:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r} ({err}; in {where})") from err


_REQUIRED = object()


def _to_bool(raw):
    val = raw.strip().lower()
    if val in ("1", "true", "yes", "on"):
        return True
    if val in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _to_int_list(raw):
    return tuple(int(tok) for tok in raw.replace(",", " ").split())


def load_config(path, lam_override=None, out_override=None) -> RunConfig:
    """Parse and validate a configuration file."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        with open(path) as fh:
            parser.read_file(fh, source=str(path))
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    except configparser.Error as err:
        raise ConfigError(f"config parse error in {path}: {err}") from err

    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"[{section}]: unknown section")
        for key in parser.options(section):
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"[{section}] {key}: unknown field")

    profile = _get(parser, "geometry", "profile", str, "straight", path).strip().lower()
    table_path = _get(parser, "geometry", "table", str, "", path)
    try:
        if profile == "straight":
            geometry = ChannelGeometry.straight()
        elif profile == "cosine":
            geometry = ChannelGeometry.cosine(
                _get(parser, "geometry", "amplitude", float, 0.2, path),
                _get(parser, "geometry", "periods", int, 1, path),
            )
        elif profile == "tabulated":
            if not table_path:
                raise ConfigError("[geometry] table: required for tabulated profiles")
            geometry = _load_table(table_path)
        else:
            raise ConfigError(f"[geometry] profile: unknown kind {profile!r}")
        geometry.validate()
    except GeometryError as err:
        raise ConfigError(f"[geometry]: {err}") from err

    nx = _get(parser, "mesh", "nx", int, _REQUIRED, path)
    ny = _get(parser, "mesh", "ny", int, _REQUIRED, path)
    if nx < 1:
        raise ConfigError(f"[mesh] nx: must be >= 1, got {nx}")
    if ny < 1:
        raise ConfigError(f"[mesh] ny: must be >= 1, got {ny}")

    lam = _get(parser, "physics", "lambda", float, _REQUIRED, path)
    if lam_override is not None:
        lam = float(lam_override)
    if not np.isfinite(lam):
        raise ConfigError(f"[physics] lambda: must be finite, got {lam}")
    problem = _get(parser, "physics", "problem", str, "stokes", path).strip().lower()
    if problem not in ("stokes", "navier-stokes"):
        raise ConfigError(f"[physics] problem: must be stokes or navier-stokes, got {problem!r}")

    try:
        solver = SolveOptions(
            linear_tol=_get(parser, "solver", "linear_tol", float, 1e-12, path),
            nonlinear_tol=_get(parser, "solver", "nonlinear_tol", float, 1e-10, path),
            max_picard=_get(parser, "solver", "max_picard", int, 50, path),
            newton_threshold=_get(parser, "solver", "newton_threshold", float, 1e-3, path),
            use_newton=_get(parser, "solver", "use_newton", _to_bool, True, path),
        )
    except ValueError as err:
        raise ConfigError(f"[solver]: {err}") from err

    out_dir = Path(_get(parser, "output", "directory", str, _REQUIRED, path))
    if out_override is not None:
        out_dir = Path(out_override)
    reports_raw = _get(parser, "output", "reports", str, "traces,fields,energy", path)
    reports = tuple(tok.strip() for tok in reports_raw.split(",") if tok.strip())
    for tok in reports:
        if tok not in VALID_REPORTS:
            raise ConfigError(
                f"[output] reports: unknown report {tok!r} (valid: {', '.join(VALID_REPORTS)})"
            )
    figures = _get(parser, "output", "figures", _to_bool, True, path)

    tolerances = {}
    if parser.has_section("tolerances"):
        for key in parser.options("tolerances"):
            tolerances[key] = _get(parser, "tolerances", key, float, _REQUIRED, path)
            if tolerances[key] <= 0:
                raise ConfigError(f"[tolerances] {key}: must be positive")

    meshes = _get(parser, "convergence", "meshes", _to_int_list, (12, 24, 48), path)
    if len(meshes) < 2 or any(m < 1 for m in meshes):
        raise ConfigError("[convergence] meshes: need at least two positive mesh sizes")

    return RunConfig(
        geometry=geometry,
        nx=nx,
        ny=ny,
        lam=lam,
        problem=problem,
        solver=solver,
        out_dir=out_dir,
        reports=reports,
        figures=figures,
        tolerances=tolerances,
        convergence_meshes=meshes,
        geometry_table=table_path,
    )


def _load_table(path):
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    except OSError as err:
        raise ConfigError(f"[geometry] table: cannot read {path}: {err}") from err
    if rows and not _is_number(rows[0][0]):
        rows = rows[1:]
    try:
        data = np.array([[float(c) for c in row[:3]] for row in rows])
    except (ValueError, IndexError) as err:
        raise ConfigError(f"[geometry] table: malformed row in {path}: {err}") from err
    return ChannelGeometry.tabulated(data[:, 0], data[:, 1], data[:, 2])


def _is_number(tok):
    try:
        float(tok)
        return True
    except ValueError:
        return False


def config_sections(cfg: RunConfig) -> dict:
    """The effective configuration as INI sections (for the MANIFEST echo)."""
    geometry = {"profile": cfg.geometry.kind}
    if cfg.geometry.kind == "cosine":
        geometry["amplitude"] = repr(cfg.geometry.amplitude)
        geometry["periods"] = str(cfg.geometry.periods)
    if cfg.geometry.kind == "tabulated":
        geometry["table"] = cfg.geometry_table
    sections = {
        "geometry": geometry,
        "mesh": {"nx": str(cfg.nx), "ny": str(cfg.ny)},
        "physics": {"lambda": repr(cfg.lam), "problem": cfg.problem},
        "solver": {
            "linear_tol": repr(cfg.solver.linear_tol),
            "nonlinear_tol": repr(cfg.solver.nonlinear_tol),
            "max_picard": str(cfg.solver.max_picard),
            "newton_threshold": repr(cfg.solver.newton_threshold),
            "use_newton": "true" if cfg.solver.use_newton else "false",
        },
        "output": {
            "directory": str(cfg.out_dir),
            "reports": ",".join(cfg.reports),
            "figures": "true" if cfg.figures else "false",
        },
        "convergence": {"meshes": ",".join(str(m) for m in cfg.convergence_meshes)},
    }
    if cfg.tolerances:
        sections["tolerances"] = {k: repr(v) for k, v in cfg.tolerances.items()}
    return sections
