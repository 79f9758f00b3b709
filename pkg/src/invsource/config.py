"""INI run configuration for the command-line front end.

Every section and key is validated before any computation; unknown names are
rejected.  Numbers may be written as simple arithmetic in ``pi`` with
``sin``, ``cos`` and ``sqrt``, e.g. ``k_max = 8*pi/3``.  Vectors are space
separated, lists of vectors are separated by ``;``.

Example::

    [source]
    t_min = 0
    t_max = 1
    unknown = t_max
    amplitude = quadratic

    [shape]
    kind = Peanut

    [band]
    k_min = 0
    k_max = 8*pi/3
    n = 16

    [observations]
    mode = far
    angles = 8

    [imaging]
    box = -4 4 -4 4
    resolution = 161
"""
from __future__ import annotations

import ast
import configparser
import operator
from dataclasses import dataclass, field, fields

import numpy as np

from .frequency import FrequencyGrid
from .geometry import Union, make_shape
from .imaging import SearchBox
from .probes import Regime
from .quadrature import QuadratureSpec, default_spec
from .source import AMPLITUDES, SeparableAmplitude, SourceModel
from .synthesis import FarField, NearField


class ConfigError(ValueError):
    pass


_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow, ast.USub: operator.neg, ast.UAdd: operator.pos}


_FUNCS = {"sin": np.sin, "cos": np.cos, "sqrt": np.sqrt}


def parse_number(text: str) -> float:
    """Evaluate a numeric literal or arithmetic in ``pi``, ``sin``, ``cos`` and ``sqrt``."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError:
        raise ConfigError(f"cannot parse number {text!r}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return float(np.pi)
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS
                and len(node.args) == 1 and not node.keywords):
            return float(_FUNCS[node.func.id](ev(node.args[0])))
        raise ConfigError(f"unsupported expression {text!r}")

    return ev(tree)


def parse_vector(text: str) -> tuple[float, ...]:
    return tuple(parse_number(v) for v in text.split())


def parse_vectors(text: str) -> list[tuple[float, ...]]:
    return [parse_vector(part) for part in text.split(";") if part.strip()]


def parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"cannot parse boolean {text!r}")


# -- sections -------------------------------------------------------------------

@dataclass
class SourceConfig:
    t_min: float = 0.0
    t_max: float = 1.0
    unknown: str = "t_max"
    amplitude: str = "quadratic"
    scale: float | None = None
    alpha: float | None = None
    beta: float | None = None

    @property
    def regime(self) -> Regime:
        return Regime.TMAX_UNKNOWN if self.unknown == "t_max" else Regime.TMIN_UNKNOWN

    @property
    def known(self) -> float:
        return self.t_min if self.unknown == "t_max" else self.t_max


@dataclass
class BandConfig:
    k_min: float = 0.0
    k_max: float = 8 * np.pi / 3
    n: int = 16
    doubled: bool = True

    def grid(self) -> FrequencyGrid:
        if self.doubled:
            if self.k_min != 0:
                raise ConfigError("a doubled band must start at k_min = 0")
            return FrequencyGrid.doubled(self.k_max, self.n)
        return FrequencyGrid(self.k_min, self.k_max, self.n)


@dataclass
class ObservationConfig:
    mode: str = "far"
    directions: list = field(default_factory=list)
    angles: int = 0
    receivers: list = field(default_factory=list)
    radius: float | None = None

    def primary(self, dim: int) -> list:
        """Observations as configured, before completing opposite pairs."""
        if self.mode == "far":
            dirs = [tuple(d) for d in self.directions]
            if self.angles:
                if dim != 2:
                    raise ConfigError("'angles' is only defined for 2D directions")
                th = np.arange(self.angles) * np.pi / self.angles
                dirs += [(float(np.cos(t)), float(np.sin(t))) for t in th]
            if not dirs:
                raise ConfigError("no observation directions configured")
            out = []
            for d in dirs:
                v = np.asarray(d, dtype=float)
                if len(v) != dim:
                    raise ConfigError(f"direction {d} does not match the {dim}D source")
                out.append(FarField(tuple(v / np.linalg.norm(v))))
            return out
        recs = [tuple(r) for r in self.receivers]
        if not recs:
            raise ConfigError("no receivers configured")
        out = []
        for r in recs:
            v = np.asarray(r, dtype=float)
            if self.radius is not None:
                v = self.radius * v / np.linalg.norm(v)
            out.append(NearField(tuple(v)))
        return out

    def all(self, dim: int) -> list:
        """Observations completed with their opposites, duplicates removed."""
        out = []
        for m in self.primary(dim):
            for cand in (m, m.opposite()):
                if not any(np.allclose(cand.vector, o.vector, atol=1e-12, rtol=0) for o in out):
                    out.append(cand)
        return out


@dataclass
class ImagingConfig:
    box: tuple = ()
    resolution: tuple = (81,)
    eta: float = 0.1
    delta: float = 3e-3
    eps: float = 0.0
    method: str = "abs-sum"

    def search_box(self, dim: int) -> SearchBox:
        box = self.box or (-4.0, 4.0) * dim
        if len(box) != 2 * dim:
            raise ConfigError(f"box needs {2 * dim} numbers for a {dim}D search domain")
        res = tuple(int(r) for r in self.resolution)
        if len(res) == 1:
            res = res * dim
        if len(res) != dim:
            raise ConfigError(f"resolution needs 1 or {dim} counts")
        return SearchBox(tuple(box[0::2]), tuple(box[1::2]), res)


@dataclass
class ScanConfig:
    z: tuple | None = None
    eps0: float = 0.01
    direction: tuple | None = None
    eta_min: float | None = None
    eta_max: float | None = None
    eta_step: float = 0.1
    eps: float = 0.0
    use_pair: bool = False
    threshold: float = 2.0


@dataclass
class NoiseConfig:
    level: float = 0.0
    seed: int = 0


_PARSERS = {
    "float": parse_number,
    "int": lambda s: int(parse_number(s)),
    "bool": parse_bool,
    "str": lambda s: s.strip(),
    "vector": parse_vector,
    "vectors": parse_vectors,
}

_SCHEMA = {
    "source": (SourceConfig, {"t_min": "float", "t_max": "float", "unknown": "str", "amplitude": "str",
                              "scale": "float", "alpha": "float", "beta": "float"}),
    "band": (BandConfig, {"k_min": "float", "k_max": "float", "n": "int", "doubled": "bool"}),
    "observations": (ObservationConfig, {"mode": "str", "directions": "vectors", "angles": "int",
                                         "receivers": "vectors", "radius": "float"}),
    "imaging": (ImagingConfig, {"box": "vector", "resolution": "vector", "eta": "float",
                                "delta": "float", "eps": "float", "method": "str"}),
    "scan": (ScanConfig, {"z": "vector", "eps0": "float", "direction": "vector", "eta_min": "float",
                          "eta_max": "float", "eta_step": "float", "eps": "float", "use_pair": "bool",
                          "threshold": "float"}),
    "noise": (NoiseConfig, {"level": "float", "seed": "int"}),
}

_SHAPE_KEYS = {"kind": "str", "center": "vector", "a": "float", "b": "float", "r": "float"}
_QUAD_KEYS = {"scheme": "str", "n": "int", "n_time": "int"}


@dataclass
class RunConfig:
    source: SourceConfig
    shape: dict
    band: BandConfig
    observations: ObservationConfig
    imaging: ImagingConfig
    scan: ScanConfig
    noise: NoiseConfig
    quadrature: QuadratureSpec | None = None

    def model(self) -> SourceModel:
        try:
            shape = make_shape(self.shape)
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"invalid shape: {exc}") from None
        return SourceModel(shape, self.amplitude(), self.source.t_min, self.source.t_max)

    def amplitude(self) -> SeparableAmplitude:
        src = self.source
        if src.amplitude not in AMPLITUDES:
            raise ConfigError(f"unknown amplitude {src.amplitude!r}; choose from {sorted(AMPLITUDES)}")
        kwargs = {}
        if src.amplitude == "constant":
            if src.scale is not None:
                kwargs["c"] = src.scale
        elif src.amplitude != "quadratic":
            for key in ("scale", "alpha", "beta"):
                if getattr(src, key) is not None:
                    kwargs[key] = getattr(src, key)
        elif any(getattr(src, k) is not None for k in ("scale", "alpha", "beta")):
            raise ConfigError("the 'quadratic' amplitude takes no parameters")
        return AMPLITUDES[src.amplitude](**kwargs)

    @property
    def dim(self) -> int:
        return self.model().dim

    def quad(self) -> QuadratureSpec:
        return self.quadrature or default_spec(self.dim)


def _section(parser, name, cls, keys):
    values = {}
    if parser.has_section(name):
        for key, raw in parser.items(name):
            if key not in keys:
                raise ConfigError(f"[{name}]: unknown key {key!r}")
            try:
                values[key] = _PARSERS[keys[key]](raw)
            except ConfigError as exc:
                raise ConfigError(f"[{name}] {key}: {exc}") from None
    known = {f.name for f in fields(cls)}
    return cls(**{k: v for k, v in values.items() if k in known})


def _shape_section(parser, name):
    out = {}
    for key, raw in parser.items(name):
        if key not in _SHAPE_KEYS:
            raise ConfigError(f"[{name}]: unknown key {key!r}")
        try:
            val = _PARSERS[_SHAPE_KEYS[key]](raw)
        except ConfigError as exc:
            raise ConfigError(f"[{name}] {key}: {exc}") from None
        out[key] = list(val) if key == "center" else val
    if "kind" not in out:
        raise ConfigError(f"[{name}] needs 'kind'")
    return out


def parse_config(text: str) -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}") from None
    allowed = set(_SCHEMA) | {"shape", "shape.second", "quadrature"}
    for sec in parser.sections():
        if sec not in allowed:
            raise ConfigError(f"unknown section [{sec}]")
    parts = {name: _section(parser, name, cls, keys) for name, (cls, keys) in _SCHEMA.items()}
    if not parser.has_section("shape"):
        raise ConfigError("missing [shape] section")
    shape = _shape_section(parser, "shape")
    if parser.has_section("shape.second"):
        shape = {"kind": Union.kind, "first": shape, "second": _shape_section(parser, "shape.second")}
    quad = None
    if parser.has_section("quadrature"):
        q = {}
        for key, raw in parser.items("quadrature"):
            if key not in _QUAD_KEYS:
                raise ConfigError(f"[quadrature]: unknown key {key!r}")
            try:
                q[key] = _PARSERS[_QUAD_KEYS[key]](raw)
            except ConfigError as exc:
                raise ConfigError(f"[quadrature] {key}: {exc}") from None
        try:
            quad = QuadratureSpec(**q)
        except ValueError as exc:
            raise ConfigError(f"[quadrature]: {exc}") from None
    cfg = RunConfig(parts["source"], shape, parts["band"], parts["observations"], parts["imaging"],
                    parts["scan"], parts["noise"], quad)
    validate(cfg)
    return cfg


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration: {exc}") from None
    return parse_config(text)


def validate(cfg: RunConfig):
    src = cfg.source
    if src.unknown not in ("t_max", "t_min"):
        raise ConfigError("[source] unknown must be 't_max' or 't_min'")
    if cfg.observations.mode not in ("far", "near"):
        raise ConfigError("[observations] mode must be 'far' or 'near'")
    if cfg.imaging.method not in ("abs-sum", "exact"):
        raise ConfigError("[imaging] method must be 'abs-sum' or 'exact'")
    if not 0 < cfg.imaging.delta <= 1:
        raise ConfigError("[imaging] delta must lie in (0, 1]")
    if cfg.noise.level < 0:
        raise ConfigError("[noise] level must be non-negative")
    if cfg.scan.eta_step <= 0:
        raise ConfigError("[scan] eta_step must be positive")
    try:
        model = cfg.model()
        cfg.band.grid()
        cfg.observations.all(model.dim)
        cfg.imaging.search_box(model.dim)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    eta = cfg.imaging.eta
    if src.regime is Regime.TMAX_UNKNOWN and not eta > src.t_min:
        raise ConfigError("[imaging] eta must exceed t_min when t_max is unknown")
    if src.regime is Regime.TMIN_UNKNOWN and not eta < src.t_max:
        raise ConfigError("[imaging] eta must lie below t_max when t_min is unknown")
    if cfg.observations.mode == "near" and model.dim != 3:
        raise ConfigError("near-field observations need a 3D source")
