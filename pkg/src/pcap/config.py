"""Experiment configs: loading, strict validation, and object construction.

Every error raised here is a :class:`ConfigError` whose message starts with
the JSON path of the offending field (``$.space.p``).
"""

import json
import math

from . import aoperator, radial
from .capacity import MeshOptions
from .errors import ValidationError
from .functions import constant, log_grid
from .geometry import ModelSpace, make_profile
from .sequences import AnnulusSequence
from .serialize import schema_errors

CONFIG_VERSION = 1


class ConfigError(ValidationError):
    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError("$", f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON at line {exc.lineno} column {exc.colno}") from exc
    return validate_config(data)


def validate_config(data):
    errors = schema_errors(data, "config.schema.json")
    if errors:
        path, message = errors[0]
        extra = f" (and {len(errors) - 1} more)" if len(errors) > 1 else ""
        raise ConfigError(path, message + extra)
    if "operator" in data and data["operator"]["p"] != data["space"]["p"]:
        raise ConfigError("$.operator.p", "operator exponent must equal the space exponent $.space.p")
    return data


def config_call(path, func, *args):
    """Call a constructor, re-raising bad-input errors under the config path."""
    try:
        return func(*args)
    except ConfigError:
        raise
    except KeyError as exc:
        raise ConfigError(path, f"missing field {exc.args[0]!r}") from exc
    except ValueError as exc:   # includes ValidationError; numerical errors pass through
        raise ConfigError(path, str(exc)) from exc


def build_space(spec, path="$.space"):
    prof = spec["profile"]
    profile = config_call(f"{path}.profile", make_profile, prof["kind"], prof.get("params"), prof.get("table"))
    return config_call(path, ModelSpace, profile, spec["n"], float(spec["p"]))


def build_operator(spec, space, path="$.operator"):
    """The configured operator, or the p-Laplacian of ``space`` when absent."""
    if spec is None:
        return aoperator.p_power(space.p)
    op = config_call(path, aoperator.from_spec, spec)
    if op.p != space.p:
        raise ConfigError(f"{path}.p", "operator exponent must equal the space exponent")
    return op


def build_mesh(spec):
    return MeshOptions() if spec is None else MeshOptions(**spec)


def build_sequence(spec, path):
    return config_call(path, AnnulusSequence, spec["inner"], spec["outer"], spec.get("name", "custom"))


def build_function(spec, space, A, a, path):
    kind = spec["type"]
    if kind == "constant":
        if not spec["r_max"] > a:
            raise ConfigError(f"{path}.r_max", "must exceed a")
        w = constant(log_grid(a, float(spec["r_max"]), int(spec["N"])), spec["value"])
    elif kind == "flux":
        w = config_call(path, radial.radial_a_harmonic, space, A, a, float(spec["C"]), float(spec["r_max"]), int(spec["N"]))
    elif kind == "eta_exterior":
        w = config_call(path, radial.eta_exterior, space, a, float(spec["r_max"]), int(spec["N"]))
    elif kind == "eta_annulus":
        w = config_call(path, radial.eta_annulus, space, a, float(spec["R2"]), int(spec["N"]))
    else:   # unreachable after schema validation
        raise ConfigError(f"{path}.type", f"unknown function type {kind!r}")
    t = spec.get("transform")
    if t is not None:
        if not (math.isfinite(t["scale"]) and math.isfinite(t["offset"])):
            raise ConfigError(f"{path}.transform", "scale and offset must be finite")
        w = w.affine(t["scale"], t["offset"])
    return w


def sweep_spaces(sweep):
    """Space specs of a sweep: the explicit list, then the grid product."""
    specs = list(sweep.get("spaces", []))
    grid = sweep.get("grid")
    if grid:
        for prof in grid["profiles"]:
            for n in grid["n"]:
                for p in grid["p"]:
                    specs.append({"profile": prof, "n": n, "p": p})
    if not specs:
        raise ConfigError("$.sweep", "sweep needs 'spaces' or 'grid'")
    return specs
