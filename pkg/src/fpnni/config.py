"""Declarative system configs: a small, versioned TOML dialect.

A config mirrors one FpnniSystem plus solver settings and certificate
parameters.  Parsing validates every invariant the model enforces and
reports the offending field path; serialization round-trips (parse ->
to_toml -> parse gives an equal value).

Schema (version 1):

    schema = 1
    [system]      alpha, rho, A (row-major matrix), b
    [set]         kind = "box" | "ball" | "halfspace" | "polyhedron" + params
    [impulses]    optional: form = "sigma", sigma, optional anchor,
                  and either times = [...] or count = m (uniformly spaced
                  at k*t_final/(m+1))
    [simulation]  x0, t_final, optional steps_per_unit_time,
                  corrector_iterations, quadrature
    [certificate] optional: Q, rho1, eta1, rho2, mu2, eta2, l1, l2,
                  radius, horizon
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import convex, fode, model
from .errors import ConfigError

SCHEMA_VERSION = 1

_SET_KINDS = ("box", "ball", "halfspace", "polyhedron")
_QUADRATURES = (fode.PRODUCT_TRAPEZOID, fode.PRODUCT_RECTANGLE)
_CERT_KEYS = ("Q", "rho1", "eta1", "rho2", "mu2", "eta2", "l1", "l2",
              "radius", "horizon")


@dataclass(frozen=True)
class SystemConfig:
    """Validated, serializable mirror of one system + run settings."""

    alpha: float
    rho: float
    A: list
    b: list
    set_kind: str
    set_params: dict
    x0: list
    t_final: float
    schema: int = SCHEMA_VERSION
    impulse_form: str = "none"          # "none" | "sigma"
    sigma: list | None = None
    anchor: list | None = None
    impulse_times: list | None = None
    impulse_count: int | None = None
    steps_per_unit_time: int = 100
    corrector_iterations: int = 2
    quadrature: str = fode.PRODUCT_TRAPEZOID
    certificate: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return len(self.b)


def _fail(field_path: str, message: str):
    raise ConfigError(message, field=field_path)


_ALLOWED_KEYS = {
    "": ("schema", "system", "set", "impulses", "simulation", "certificate"),
    "system": ("alpha", "rho", "A", "b"),
    "impulses": ("form", "sigma", "anchor", "times", "count"),
    "simulation": ("x0", "t_final", "steps_per_unit_time",
                   "corrector_iterations", "quadrature"),
    "certificate": _CERT_KEYS,
}

_SET_KEYS = {
    "box": ("kind", "lower", "upper"),
    "ball": ("kind", "center", "radius"),
    "halfspace": ("kind", "normal", "offset"),
    "polyhedron": ("kind", "normals", "offsets", "interior_point"),
}


def _reject_unknown_keys(table: dict, path: str):
    for key in table:
        if key not in _ALLOWED_KEYS[path]:
            _fail(f"{path}.{key}" if path else key, "unknown key")


def _get(table: dict, key: str, path: str, required: bool = True, default=None):
    if key not in table:
        if required:
            _fail(f"{path}.{key}", "missing required key")
        return default
    return table[key]


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {type(value).__name__}")
    return float(value)


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {type(value).__name__}")
    return value


def _vector(value, path: str, length: int | None = None) -> list:
    if not isinstance(value, list) or not value:
        _fail(path, "expected a non-empty array of numbers")
    out = [_number(v, f"{path}[{i}]") for i, v in enumerate(value)]
    if length is not None and len(out) != length:
        _fail(path, f"expected length {length}, got {len(out)}")
    return out


def _matrix(value, path: str, shape: tuple | None = None) -> list:
    if not isinstance(value, list) or not value:
        _fail(path, "expected a non-empty array of rows")
    rows = [_vector(row, f"{path}[{i}]") for i, row in enumerate(value)]
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        _fail(path, "rows have different lengths")
    if shape is not None and (len(rows), width) != shape:
        _fail(path, f"expected shape {shape[0]}x{shape[1]}, got {len(rows)}x{width}")
    return rows


def _unitize(normal: list, offset: float, path: str):
    """Scale a constraint row to a unit normal.

    Already-unit rows (within 1e-12) pass through untouched, which keeps
    normalization idempotent at the ulp level and the config round-trip
    exact.
    """
    norm = math.sqrt(sum(v * v for v in normal))
    if norm <= 0.0:
        _fail(path, "must be a nonzero vector")
    if abs(norm - 1.0) <= 1e-12:
        return list(normal), offset
    return [v / norm for v in normal], offset / norm


def _parse_set(table: dict, dim: int) -> tuple[str, dict]:
    kind = _get(table, "kind", "set")
    if kind not in _SET_KINDS:
        _fail("set.kind", f"must be one of {', '.join(_SET_KINDS)}")
    for key in table:
        if key not in _SET_KEYS[kind]:
            _fail(f"set.{key}", f"unknown key for a {kind} set")
    params: dict = {}
    if kind == "box":
        params["lower"] = _vector(_get(table, "lower", "set"), "set.lower", dim)
        params["upper"] = _vector(_get(table, "upper", "set"), "set.upper", dim)
        if any(lo > hi for lo, hi in zip(params["lower"], params["upper"])):
            _fail("set.lower", "lower bound exceeds upper bound")
    elif kind == "ball":
        params["center"] = _vector(_get(table, "center", "set"), "set.center", dim)
        params["radius"] = _number(_get(table, "radius", "set"), "set.radius")
        if params["radius"] <= 0.0:
            _fail("set.radius", "must be positive")
    elif kind == "halfspace":
        normal = _vector(_get(table, "normal", "set"), "set.normal", dim)
        offset = _number(_get(table, "offset", "set"), "set.offset")
        params["normal"], params["offset"] = _unitize(normal, offset, "set.normal")
    else:
        normals = _matrix(_get(table, "normals", "set"), "set.normals")
        if len(normals[0]) != dim:
            _fail("set.normals", f"rows must have length {dim}")
        offsets = _vector(_get(table, "offsets", "set"), "set.offsets", len(normals))
        unit_rows = []
        for i, row in enumerate(normals):
            unit, offsets[i] = _unitize(row, offsets[i], f"set.normals[{i}]")
            unit_rows.append(unit)
        params["normals"] = unit_rows
        params["offsets"] = offsets
        params["interior_point"] = _vector(
            _get(table, "interior_point", "set"), "set.interior_point", dim
        )
    return kind, params


def parse_config_text(text: str) -> SystemConfig:
    """Parse and validate a config document; raises ``ConfigError``."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"TOML syntax error: {exc}") from exc

    schema = doc.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        _fail("schema", f"unsupported schema version {schema}; this build reads "
                        f"version {SCHEMA_VERSION}")
    _reject_unknown_keys(doc, "")

    system = doc.get("system")
    if not isinstance(system, dict):
        _fail("system", "missing [system] table")
    _reject_unknown_keys(system, "system")
    alpha = _number(_get(system, "alpha", "system"), "system.alpha")
    if not 0.0 < alpha < 1.0:
        _fail("system.alpha", f"must lie strictly in (0, 1), got {alpha:g}")
    rho = _number(_get(system, "rho", "system"), "system.rho")
    if rho <= 0.0:
        _fail("system.rho", "must be positive")
    b = _vector(_get(system, "b", "system"), "system.b")
    dim = len(b)
    a = _matrix(_get(system, "A", "system"), "system.A", (dim, dim))

    set_table = doc.get("set")
    if not isinstance(set_table, dict):
        _fail("set", "missing [set] table")
    set_kind, set_params = _parse_set(set_table, dim)

    sim = doc.get("simulation")
    if not isinstance(sim, dict):
        _fail("simulation", "missing [simulation] table")
    _reject_unknown_keys(sim, "simulation")
    x0 = _vector(_get(sim, "x0", "simulation"), "simulation.x0", dim)
    t_final = _number(_get(sim, "t_final", "simulation"), "simulation.t_final")
    if t_final <= 0.0:
        _fail("simulation.t_final", "must be positive")
    steps = _integer(sim.get("steps_per_unit_time", 100),
                     "simulation.steps_per_unit_time")
    if steps < 10:
        _fail("simulation.steps_per_unit_time", "must be at least 10")
    corrector = _integer(sim.get("corrector_iterations", 2),
                         "simulation.corrector_iterations")
    if corrector < 1:
        _fail("simulation.corrector_iterations", "must be at least 1")
    quadrature = sim.get("quadrature", fode.PRODUCT_TRAPEZOID)
    if quadrature not in _QUADRATURES:
        _fail("simulation.quadrature",
              f"must be one of {', '.join(_QUADRATURES)}")

    impulse_form = "none"
    sigma = anchor = times = count = None
    imp = doc.get("impulses")
    if isinstance(imp, dict) and imp:
        _reject_unknown_keys(imp, "impulses")
        impulse_form = _get(imp, "form", "impulses")
        if impulse_form not in ("sigma", "none"):
            _fail("impulses.form", "must be 'sigma' or 'none'")
        if impulse_form == "sigma":
            sigma = _matrix(_get(imp, "sigma", "impulses"), "impulses.sigma",
                            (dim, dim))
            if "anchor" in imp:
                anchor = _vector(imp["anchor"], "impulses.anchor", dim)
            has_times = "times" in imp
            has_count = "count" in imp
            if has_times == has_count:
                _fail("impulses", "give exactly one of 'times' or 'count'")
            if has_times:
                times = _vector(imp["times"], "impulses.times")
                previous = 0.0
                for i, t in enumerate(times):
                    if t <= previous:
                        _fail(f"impulses.times[{i}]",
                              "times must be strictly increasing and positive")
                    previous = t
                if times[-1] >= t_final:
                    _fail("impulses.times", "times must lie strictly before t_final")
            else:
                count = _integer(imp["count"], "impulses.count")
                if count < 0:
                    _fail("impulses.count", "must be nonnegative")

    certificate: dict = {}
    cert = doc.get("certificate")
    if isinstance(cert, dict):
        _reject_unknown_keys(cert, "certificate")
        if "Q" in cert:
            q = _matrix(cert["Q"], "certificate.Q", (dim, dim))
            for i in range(dim):
                for j in range(i):
                    if abs(q[i][j] - q[j][i]) > 1e-12:
                        _fail("certificate.Q", "must be symmetric")
            certificate["Q"] = q
        for key in ("rho1", "rho2", "mu2", "radius", "horizon"):
            if key in cert:
                value = _number(cert[key], f"certificate.{key}")
                if value <= 0.0:
                    _fail(f"certificate.{key}", "must be positive")
                certificate[key] = value
        for key in ("eta1", "eta2"):
            if key in cert:
                value = _number(cert[key], f"certificate.{key}")
                if not 0.0 < value <= 1.0:
                    _fail(f"certificate.{key}", "must lie in (0, 1]")
                certificate[key] = value
        for key in ("l1", "l2"):
            if key in cert:
                value = _number(cert[key], f"certificate.{key}")
                if value < 0.0:
                    _fail(f"certificate.{key}", "must be nonnegative")
                certificate[key] = value

    return SystemConfig(
        schema=SCHEMA_VERSION, alpha=alpha, rho=rho, A=a, b=b,
        set_kind=set_kind, set_params=set_params,
        impulse_form=impulse_form, sigma=sigma, anchor=anchor,
        impulse_times=times, impulse_count=count,
        x0=x0, t_final=t_final, steps_per_unit_time=steps,
        corrector_iterations=corrector, quadrature=quadrature,
        certificate=certificate,
    )


def parse_config(path) -> SystemConfig:
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def bundled_config_path(name: str) -> Path:
    """Path of a config shipped with the package (e.g. 'example1')."""
    path = Path(__file__).parent / "configs" / f"{name}.toml"
    if not path.exists():
        available = sorted(p.stem for p in path.parent.glob("*.toml"))
        raise ConfigError(
            f"no bundled config {name!r}; available: {', '.join(available)}"
        )
    return path


def build_set(cfg: SystemConfig) -> convex.ConvexSet:
    p = cfg.set_params
    if cfg.set_kind == "box":
        return convex.Box(lower=p["lower"], upper=p["upper"])
    if cfg.set_kind == "ball":
        return convex.Ball(center=p["center"], radius=p["radius"])
    if cfg.set_kind == "halfspace":
        return convex.Halfspace(normal=p["normal"], offset=p["offset"])
    halfspaces = tuple(
        convex.Halfspace(normal=row, offset=off)
        for row, off in zip(p["normals"], p["offsets"])
    )
    return convex.PolyIntersection(
        halfspaces=halfspaces, interior_point=p["interior_point"]
    )


def resolved_impulse_times(cfg: SystemConfig) -> tuple[float, ...]:
    """Explicit times, or m instants uniformly spaced at k*t_final/(m+1)."""
    if cfg.impulse_form == "none":
        return ()
    if cfg.impulse_times is not None:
        return tuple(cfg.impulse_times)
    m = cfg.impulse_count or 0
    return tuple(k * cfg.t_final / (m + 1) for k in range(1, m + 1))


def build_system(cfg: SystemConfig) -> model.FpnniSystem:
    impulses = None
    times: tuple[float, ...] = ()
    if cfg.impulse_form == "sigma":
        impulses = model.SigmaImpulses(sigma=np.array(cfg.sigma, dtype=float),
                                       anchor=cfg.anchor)
        times = resolved_impulse_times(cfg)
    return model.FpnniSystem(
        alpha=cfg.alpha, A=cfg.A, b=cfg.b, rho=cfg.rho, K=build_set(cfg),
        impulse_times=times, impulses=impulses,
    )


def build_solver_config(cfg: SystemConfig,
                        steps_override: int | None = None) -> fode.SolverConfig:
    return fode.SolverConfig(
        steps_per_unit_time=steps_override or cfg.steps_per_unit_time,
        corrector_iterations=cfg.corrector_iterations,
        quadrature=cfg.quadrature,
    )


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        escaped = v.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__} to TOML")


def to_toml(cfg: SystemConfig) -> str:
    """Serialize back to the schema; parse(to_toml(c)) == c."""
    lines = [f"schema = {cfg.schema}", "", "[system]"]
    lines.append(f"alpha = {_toml_value(cfg.alpha)}")
    lines.append(f"rho = {_toml_value(cfg.rho)}")
    lines.append(f"A = {_toml_value(cfg.A)}")
    lines.append(f"b = {_toml_value(cfg.b)}")
    lines += ["", "[set]", f'kind = "{cfg.set_kind}"']
    for key, value in cfg.set_params.items():
        lines.append(f"{key} = {_toml_value(value)}")
    if cfg.impulse_form != "none":
        lines += ["", "[impulses]", f'form = "{cfg.impulse_form}"']
        lines.append(f"sigma = {_toml_value(cfg.sigma)}")
        if cfg.anchor is not None:
            lines.append(f"anchor = {_toml_value(cfg.anchor)}")
        if cfg.impulse_times is not None:
            lines.append(f"times = {_toml_value(cfg.impulse_times)}")
        else:
            lines.append(f"count = {cfg.impulse_count}")
    lines += ["", "[simulation]"]
    lines.append(f"x0 = {_toml_value(cfg.x0)}")
    lines.append(f"t_final = {_toml_value(cfg.t_final)}")
    lines.append(f"steps_per_unit_time = {cfg.steps_per_unit_time}")
    lines.append(f"corrector_iterations = {cfg.corrector_iterations}")
    lines.append(f'quadrature = "{cfg.quadrature}"')
    if cfg.certificate:
        lines += ["", "[certificate]"]
        for key in _CERT_KEYS:
            if key in cfg.certificate:
                lines.append(f"{key} = {_toml_value(cfg.certificate[key])}")
    return "\n".join(lines) + "\n"
