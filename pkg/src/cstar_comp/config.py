"""Run configuration: a flat ``key = value`` file, validated and hashed."""

from __future__ import annotations

import configparser
import hashlib
import os
from dataclasses import dataclass, field, replace

from .mobius import MobiusTransform
from .rkhs import SpaceSpec

SCHEMA_VERSION = 1

DEFAULT_TOLERANCES = {
    "exact": 1e-9,
    "kernel": 1e-10,
    "final_window": 1e-3,
    "shift": 5e-2,
    "crossed": 1e-10,
    "homomorphism": 1e-9,
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    group: tuple = ()  # empty means the default Schottky pair
    spaces: tuple = ("h2", "a2:2", "a2:3")
    trunc_sweep: tuple = (64, 128, 256)
    window: int = 32
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = 0
    output_dir: str = "out"
    fourier_trunc: int = 512
    ball_radius: int = 4
    radius_floor: float = 0.99
    intertwiner_n: int = 1

    def __post_init__(self):
        sweep = tuple(int(n) for n in self.trunc_sweep)
        if not sweep or any(b <= a for a, b in zip(sweep, sweep[1:])):
            raise ConfigError("trunc_sweep must be strictly increasing")
        if self.window > min(sweep) // 2:
            raise ConfigError(f"window {self.window} exceeds min(trunc_sweep)/2 = {min(sweep) // 2}")
        for s in self.spaces:
            SpaceSpec.parse(s)
        if not 1 <= self.intertwiner_n <= 2:
            raise ConfigError("intertwiner_n must be 1 or 2")
        if not 0 < self.radius_floor < 1:
            raise ConfigError("radius_floor must lie in (0, 1)")

    def space_specs(self) -> list:
        return [SpaceSpec.parse(s) for s in self.spaces]

    def fuchsian_group(self):
        from .fuchsian import FuchsianGroup, default_group
        if not self.group:
            return default_group()
        return FuchsianGroup([MobiusTransform.from_text(t) for t in self.group])

    def tol(self, name: str) -> float:
        return float(self.tolerances[name])

    def to_text(self, include_output: bool = True) -> str:
        lines = [f"group = {'default' if not self.group else '; '.join(self.group)}",
                 f"spaces = {', '.join(self.spaces)}",
                 f"trunc_sweep = {', '.join(str(n) for n in self.trunc_sweep)}",
                 f"window = {self.window}",
                 f"seed = {self.seed}",
                 f"fourier_trunc = {self.fourier_trunc}",
                 f"ball_radius = {self.ball_radius}",
                 f"radius_floor = {self.radius_floor!r}",
                 f"intertwiner_n = {self.intertwiner_n}"]
        lines += [f"tol.{k} = {float(v)!r}" for k, v in sorted(self.tolerances.items())]
        if include_output:
            lines.append(f"output_dir = {self.output_dir}")
        return "\n".join(lines) + "\n"

    def hash(self) -> str:
        return hashlib.sha256(self.to_text(include_output=False).encode()).hexdigest()[:16]

    def with_overrides(self, **kw) -> RunConfig:
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _ints(s: str) -> tuple:
    return tuple(int(x) for x in s.replace(",", " ").split())


def parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string("[run]\n" + text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    sec = cp["run"]
    lines = text.splitlines()

    def where(key):
        for i, line in enumerate(lines, 1):
            if line.split("=", 1)[0].strip() == key:
                return f"{source}:{i}"
        return source

    kw = {}
    tols = dict(DEFAULT_TOLERANCES)
    known = {"group", "spaces", "trunc_sweep", "window", "seed", "output_dir", "fourier_trunc",
             "ball_radius", "radius_floor", "intertwiner_n"}
    for key, val in sec.items():
        try:
            if key == "group":
                if val.strip() != "default":
                    gens = tuple(" ".join(t.split()) for t in val.split(";") if t.strip())
                    for t in gens:
                        MobiusTransform.from_text(t)
                    kw["group"] = gens
            elif key == "spaces":
                kw["spaces"] = tuple(s.strip() for s in val.split(",") if s.strip())
            elif key == "trunc_sweep":
                kw["trunc_sweep"] = _ints(val)
            elif key in ("window", "seed", "fourier_trunc", "ball_radius", "intertwiner_n"):
                kw[key] = int(val)
            elif key == "radius_floor":
                kw[key] = float(val)
            elif key == "output_dir":
                kw[key] = val.strip()
            elif key.startswith("tol."):
                tols[key[4:]] = float(val)
            elif key not in known:
                raise ConfigError(f"unknown field {key!r}")
        except ConfigError as exc:
            raise ConfigError(f"{where(key)}: {exc}") from None
        except ValueError as exc:
            raise ConfigError(f"{where(key)}: field {key!r}: {exc}") from None
    kw["tolerances"] = tols
    try:
        return RunConfig(**kw)
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def parse_config(path) -> RunConfig:
    if not os.path.exists(path):
        raise ConfigError(f"config file {path} does not exist")
    with open(path) as fh:
        return parse_config_text(fh.read(), str(path))


def output_dir(cfg: RunConfig) -> str:
    return os.environ.get("CSTAR_COMP_OUT") or cfg.output_dir
