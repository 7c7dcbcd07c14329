"""Run configuration: a flat TOML document, strict keys, and the preset catalog.

Schema (all keys flat, camelCase)::

    alphaPlus  = [0.3]      # required, list of numbers in [0, 1)
    betaPlus   = [0.2]      # required
    alphaMinus = [0.25]     # required
    betaMinus  = [0.15]     # required
    gammaPlus  = 0.0        # required, >= 0
    gammaMinus = 0.0        # required, >= 0

    name           = "mixed"    # optional label echoed in reports
    seriesOrder    = 64         # h/e coefficient order for Schur weights
    matrixOrder    = 40         # truncation N of A, B, L, K, T
    enumerationCap = 40         # largest |lambda| in brute-force sums
    tailStarts     = [0, 1, 2, 3, 4, 5]
    pointWindow    = 4          # points -w..w for correlation checks
    tolerance      = 1e-8       # optional override of the suite tolerance
    scalar         = "rational" # "float" | "rational"; default: rational unless a gamma is nonzero
    outDir         = "reports"
    seed           = 0
"""
from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError, DomainError, ResourceLimitError
from .linalg import FLOAT, RATIONAL
from .schur import MAX_ENUMERATION_SIZE
from .series import SymbolParams

PARAM_KEYS = ("alphaPlus", "betaPlus", "alphaMinus", "betaMinus", "gammaPlus", "gammaMinus")
OPTIONAL_KEYS = ("name", "seriesOrder", "matrixOrder", "enumerationCap", "tailStarts", "pointWindow",
                 "tolerance", "scalar", "outDir", "seed")

# documented resource limits
MAX_MATRIX_ORDER = 256
MAX_SERIES_ORDER = 4096
MAX_POINT_WINDOW = 12
MAX_SEED = 2 ** 64 - 1


@dataclass(frozen=True)
class RunConfig:
    params: SymbolParams
    name: str = "custom"
    series_order: int = 64
    matrix_order: int = 40
    enumeration_cap: int = 40
    tail_starts: tuple = (0, 1, 2, 3, 4, 5)
    point_window: int = 4
    tolerance: float | None = None
    scalar: str | None = None
    out_dir: str = "reports"
    seed: int = 0
    float_only: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "tail_starts", tuple(int(n) for n in self.tail_starts))
        validate(self)

    @property
    def resolved_scalar(self) -> str:
        if self.scalar is not None:
            return self.scalar
        # decimal parameters convert exactly (0.4 -> 2/5); only exponential parts force float
        return FLOAT if self.params.has_gamma or self.float_only else RATIONAL

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        out = dict(self.params.to_dict())
        out.update({"name": self.name, "seriesOrder": self.series_order, "matrixOrder": self.matrix_order,
                    "enumerationCap": self.enumeration_cap, "tailStarts": list(self.tail_starts),
                    "pointWindow": self.point_window, "tolerance": self.tolerance,
                    "scalar": self.resolved_scalar, "seed": self.seed})
        return out


def validate(cfg: RunConfig) -> None:
    """Raise ConfigError for malformed values, ResourceLimitError past the caps."""
    if cfg.scalar not in (None, FLOAT, RATIONAL):
        raise ConfigError(f"scalar: expected 'float' or 'rational', got {cfg.scalar!r}")
    if cfg.scalar == RATIONAL and cfg.params.has_gamma:
        raise ConfigError("scalar: rational mode needs gammaPlus = gammaMinus = 0")
    if cfg.scalar == RATIONAL and cfg.float_only:
        raise ConfigError(f"scalar: preset {cfg.name!r} is float-only")
    for key, v in (("seriesOrder", cfg.series_order), ("matrixOrder", cfg.matrix_order),
                   ("enumerationCap", cfg.enumeration_cap), ("pointWindow", cfg.point_window)):
        if not isinstance(v, int) or isinstance(v, bool) or v < (0 if key == "pointWindow" else 1):
            raise ConfigError(f"{key}: expected a positive integer, got {v!r}")
    if any(n < 0 or n >= cfg.matrix_order for n in cfg.tail_starts):
        raise ConfigError(f"tailStarts: every entry must lie in [0, matrixOrder), got {list(cfg.tail_starts)}")
    if cfg.tolerance is not None and not cfg.tolerance > 0:
        raise ConfigError(f"tolerance: must be positive, got {cfg.tolerance!r}")
    if not 0 <= cfg.seed <= MAX_SEED:
        raise ConfigError(f"seed: must be an unsigned 64-bit integer, got {cfg.seed}")
    for key, v, cap in (("matrixOrder", cfg.matrix_order, MAX_MATRIX_ORDER),
                        ("seriesOrder", cfg.series_order, MAX_SERIES_ORDER),
                        ("enumerationCap", cfg.enumeration_cap, MAX_ENUMERATION_SIZE),
                        ("pointWindow", cfg.point_window, MAX_POINT_WINDOW)):
        if v > cap:
            raise ResourceLimitError(f"{key}={v} exceeds the limit {cap}")


def _number_list(key: str, v) -> tuple:
    if not isinstance(v, list):
        raise ConfigError(f"{key}: expected an array of numbers, got {type(v).__name__}")
    for x in v:
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise ConfigError(f"{key}: array entries must be numbers, got {x!r}")
    return tuple(float(x) for x in v)


def _number(key: str, v) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {v!r}")
    return float(v)


def from_mapping(doc: dict, source: str = "<config>") -> RunConfig:
    unknown = sorted(set(doc) - set(PARAM_KEYS) - set(OPTIONAL_KEYS))
    if unknown:
        raise ConfigError(f"{source}: unknown key(s) {', '.join(unknown)}")
    missing = [k for k in PARAM_KEYS if k not in doc]
    if missing:
        raise ConfigError(f"{source}: missing required key(s) {', '.join(missing)}")
    try:
        params = SymbolParams(*(_number_list(k, doc[k]) for k in PARAM_KEYS[:4]),
                              _number("gammaPlus", doc["gammaPlus"]), _number("gammaMinus", doc["gammaMinus"]))
    except DomainError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    kw = {}
    for key, attr in (("seriesOrder", "series_order"), ("matrixOrder", "matrix_order"),
                      ("enumerationCap", "enumeration_cap"), ("pointWindow", "point_window"), ("seed", "seed")):
        if key in doc:
            if isinstance(doc[key], bool) or not isinstance(doc[key], int):
                raise ConfigError(f"{source}: {key}: expected an integer, got {doc[key]!r}")
            kw[attr] = doc[key]
    if "tailStarts" in doc:
        ts = doc["tailStarts"]
        if not isinstance(ts, list) or not all(isinstance(n, int) and not isinstance(n, bool) for n in ts):
            raise ConfigError(f"{source}: tailStarts: expected an array of integers")
        kw["tail_starts"] = tuple(ts)
    if "tolerance" in doc:
        kw["tolerance"] = _number("tolerance", doc["tolerance"])
    for key, attr in (("name", "name"), ("scalar", "scalar"), ("outDir", "out_dir")):
        if key in doc:
            if not isinstance(doc[key], str):
                raise ConfigError(f"{source}: {key}: expected a string, got {doc[key]!r}")
            kw[attr] = doc[key]
    try:
        return RunConfig(params, **kw)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return from_mapping(doc, str(path))


def dump_config(cfg: RunConfig) -> str:
    """TOML text that loads back to ``cfg``."""
    def fmt(v):
        if isinstance(v, str):
            return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
        if isinstance(v, (list, tuple)):
            return "[" + ", ".join(fmt(x) for x in v) + "]"
        return repr(v)

    d = cfg.to_dict()
    d["outDir"] = cfg.out_dir
    if cfg.scalar is None:
        d.pop("scalar")
    if d["tolerance"] is None:
        d.pop("tolerance")
    return "".join(f"{k} = {fmt(v)}\n" for k, v in d.items())


def preset_catalog() -> dict[str, RunConfig]:
    w = SymbolParams.widom
    return {
        "trivial": RunConfig(SymbolParams(), name="trivial"),
        "widom-1": RunConfig(w([0.4], [0.4]), name="widom-1"),
        "widom-2": RunConfig(w([0.4, 0.3], [0.35]), name="widom-2"),
        "geometric": RunConfig(SymbolParams(alpha_plus=(0.5,), alpha_minus=(0.5,)), name="geometric"),
        "mixed": RunConfig(SymbolParams((0.3,), (0.2,), (0.25,), (0.15,)), name="mixed"),
        "exp": RunConfig(SymbolParams(gamma_plus=0.5, gamma_minus=0.5), name="exp", scalar=FLOAT,
                         float_only=True),
    }


def preset(name: str) -> RunConfig:
    cat = preset_catalog()
    if name not in cat:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(cat)}")
    return cat[name]
