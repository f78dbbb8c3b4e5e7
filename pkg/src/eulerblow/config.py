"""Run configuration: a YAML key tree with validation and line diagnostics.

Example::

    eos:
      law: gamma-law
      params: {K: 1.0, gamma: 2.0}
    entropy:
      profile: constant
      params: {}
    constants: {k: 4.0, A: 0.5, k1: 0.5, k2: 0.5, c_v: 1.0}
    grid:
      domain: [-6.0, 6.0]
      cells: 1024
      boundary: outflow
      cfl: 0.4
    initial:
      family: sech2-pulse
      params: {amplitude: 2.0, width: 2.0}
    horizon_time: 5.0
    eps: 0.1
    output: {directory: runs/reference, stride: 8}
"""

import copy
from dataclasses import dataclass, field, fields

import yaml

from .eos import DeclaredConstants, law_from_config, profile_from_config
from .eos.hypotheses import StateBox
from .solver import FAMILIES, Grid
from .thermo import MU_CONVENTIONS

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config", "dump_config", "set_dotted"]

_CONSTANT_KEYS = {f.name for f in fields(DeclaredConstants)}


class ConfigError(ValueError):
    """Invalid configuration; carries the dotted key and source line when known."""

    def __init__(self, message, key=None, line=None):
        where = ""
        if key is not None:
            where += f"key '{key}'"
        if line is not None:
            where += f" (line {line})" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)
        self.key = key
        self.line = line


def _key_lines(text):
    """Map dotted key paths to 1-based source lines of a YAML document."""
    lines = {}
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError:
        return lines

    def walk(node, prefix):
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                path = f"{prefix}.{k.value}" if prefix else str(k.value)
                lines[path] = k.start_mark.line + 1
                walk(v, path)

    if root is not None:
        walk(root, "")
    return lines


@dataclass
class RunConfig:
    """Validated run configuration.

    Attributes mirror the top-level keys; nested sections stay as plain
    dicts so that emit and parse round-trip exactly.
    """

    eos: dict
    entropy: dict
    constants: dict
    grid: dict
    initial: dict
    horizon_time: float
    eps: float = 0.05
    sentinel: float | None = None
    output: dict = field(default_factory=lambda: {"directory": "run", "stride": 1})
    seeds_x: list = field(default_factory=list)
    check: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)
    thermo: dict = field(default_factory=dict)

    REQUIRED = ("eos", "entropy", "grid", "initial", "horizon_time")

    # construction

    def to_dict(self):
        return {f.name: copy.deepcopy(getattr(self, f.name)) for f in fields(self)}

    @property
    def c_v(self):
        return float(self.constants.get("c_v", 1.0))

    def declared_constants(self):
        return DeclaredConstants(**{k: float(v) for k, v in self.constants.items() if k in _CONSTANT_KEYS})

    def make_law(self):
        params = dict(self.eos.get("params") or {})
        if "c_v" in self.constants:
            params.setdefault("c_v", self.c_v)
        return law_from_config(self.eos["law"], params, self.declared_constants())

    def make_profile(self):
        return profile_from_config(self.entropy.get("profile", "constant"),
                                   self.entropy.get("params"), c_v=self.c_v)

    def make_grid(self):
        lo, hi = self.grid["domain"]
        return Grid(float(lo), float(hi), int(self.grid["cells"]), self.grid.get("boundary", "outflow"))

    @property
    def cfl(self):
        return float(self.grid.get("cfl", 0.4))

    def check_box(self):
        lo, hi = self.grid["domain"]
        t_lo, t_hi = self.check.get("tau_range", [0.5, 2.0])
        return StateBox(float(t_lo), float(t_hi), float(lo), float(hi))

    @property
    def check_samples(self):
        return int(self.check.get("samples", 64))


def _fail(msg, key, lines):
    raise ConfigError(msg, key, lines.get(key))


def _positive(d, key, path, lines, integer=False):
    v = d.get(key)
    ok = isinstance(v, int) if integer else isinstance(v, (int, float)) and not isinstance(v, bool)
    if not ok or not v > 0:
        _fail(f"must be a positive {'integer' if integer else 'number'}, got {v!r}", f"{path}.{key}" if path else key, lines)


def _section(data, key, lines, required=True):
    if key not in data:
        if required:
            raise ConfigError("missing required key", key)
        return {}
    v = data[key]
    if not isinstance(v, dict):
        _fail("must be a mapping", key, lines)
    return v


def parse_config(text):
    """Parse and validate YAML text into a :class:`RunConfig`.

    Raises
    ------
    ConfigError
        Naming the offending dotted key and its source line.
    """
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"YAML syntax error: {getattr(exc, 'problem', exc)}",
                          line=None if mark is None else mark.line + 1) from None
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping")
    lines = _key_lines(text)
    known = {f.name for f in fields(RunConfig)}
    for k in data:
        if k not in known:
            _fail(f"unknown key; expected one of {sorted(known)}", k, lines)
    for k in RunConfig.REQUIRED:
        if k not in data:
            raise ConfigError("missing required key", k)

    eos = _section(data, "eos", lines)
    if "law" not in eos:
        raise ConfigError("missing required key", "eos.law", lines.get("eos"))
    entropy = _section(data, "entropy", lines)
    constants = _section(data, "constants", lines, required=False)
    for k in constants:
        if k not in _CONSTANT_KEYS | {"c_v"}:
            _fail(f"unknown constant; expected one of {sorted(_CONSTANT_KEYS | {'c_v'})}", f"constants.{k}", lines)
        _positive(constants, k, "constants", lines)
    grid = _section(data, "grid", lines)
    for k in ("domain", "cells"):
        if k not in grid:
            raise ConfigError("missing required key", f"grid.{k}", lines.get("grid"))
    dom = grid["domain"]
    if not (isinstance(dom, list) and len(dom) == 2 and all(isinstance(v, (int, float)) for v in dom)
            and dom[1] > dom[0]):
        _fail("must be [x_left, x_right] with x_right > x_left", "grid.domain", lines)
    _positive(grid, "cells", "grid", lines, integer=True)
    if "cfl" in grid:
        _positive(grid, "cfl", "grid", lines)
    if grid.get("boundary", "outflow") not in ("outflow", "periodic"):
        _fail("must be 'outflow' or 'periodic'", "grid.boundary", lines)
    initial = _section(data, "initial", lines)
    if initial.get("family") not in FAMILIES:
        _fail(f"must be one of {sorted(FAMILIES)}", "initial.family", lines)
    _positive(data, "horizon_time", "", lines)
    if "eps" in data:
        _positive(data, "eps", "", lines)
    if data.get("sentinel") is not None:
        _positive(data, "sentinel", "", lines)
    output = _section(data, "output", lines, required=False)
    if "stride" in output:
        _positive(output, "stride", "output", lines, integer=True)
    seeds = data.get("seeds_x", [])
    if not isinstance(seeds, list) or not all(isinstance(v, (int, float)) for v in seeds):
        _fail("must be a list of numbers", "seeds_x", lines)
    check = _section(data, "check", lines, required=False)
    if "tau_range" in check:
        tr = check["tau_range"]
        if not (isinstance(tr, list) and len(tr) == 2 and 0 < tr[0] < tr[1]):
            _fail("must be [tau_lo, tau_hi] with 0 < tau_lo < tau_hi", "check.tau_range", lines)
    solver = _section(data, "solver", lines, required=False)
    thermo = _section(data, "thermo", lines, required=False)
    for k in thermo:
        if k == "mu_convention":
            if thermo[k] not in MU_CONVENTIONS:
                _fail(f"must be one of {list(MU_CONVENTIONS)}", "thermo.mu_convention", lines)
            continue
        if k not in ("tau_points", "S_points"):
            _fail("unknown key; expected tau_points, S_points or mu_convention", f"thermo.{k}", lines)
        _positive(thermo, k, "thermo", lines, integer=True)

    cfg = RunConfig(
        eos=eos, entropy=entropy, constants=constants, grid=grid, initial=initial,
        horizon_time=float(data["horizon_time"]), eps=float(data.get("eps", 0.05)),
        sentinel=None if data.get("sentinel") is None else float(data["sentinel"]),
        output={"directory": "run", "stride": 1, **output}, seeds_x=[float(v) for v in seeds],
        check=check, solver=solver, thermo=thermo,
    )
    # instantiate once so law/profile parameter errors carry a key
    for key, make in (("eos", cfg.make_law), ("entropy", cfg.make_profile), ("grid", cfg.make_grid)):
        try:
            make()
        except (ValueError, TypeError) as exc:
            _fail(str(exc), key, lines)
    return cfg


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def dump_config(cfg):
    """Emit YAML with sorted keys; ``parse_config(dump_config(c))`` round-trips."""
    return yaml.safe_dump(cfg.to_dict(), sort_keys=True, default_flow_style=False)


def set_dotted(cfg, key, value):
    """Copy of ``cfg`` with the dotted ``key`` (e.g. ``initial.params.amplitude``) replaced."""
    d = cfg.to_dict()
    parts = key.split(".")
    node = d
    for p in parts[:-1]:
        if not isinstance(node.get(p), dict):
            node[p] = {}
        node = node[p]
    node[parts[-1]] = value
    return parse_config(yaml.safe_dump(d, sort_keys=True))
