"""Engine configuration read from a TOML file.

Grammar (every key optional, unknown keys rejected)::

    seed = 7                              # seed for `any`
    label_similarity_threshold = 0.5
    schema = "schema.nt"                  # paths relative to this file
    annotations = "annotations.tsv"
    out = "out"

    [strategy]
    default = "IV"                        # I | II | III | IV
    predicates = { "http://dbpedia.org/property/office" = "IV" }

    [policy]
    default = "auto"                      # or any resolution function name
    [policy.predicates."http://dbpedia.org/property/birthYear"]
    function = "any"                      # a bare string also works
    seed = 3
    params = { }                          # n, threshold, preferred, attribute, value

    [properties."http://dbpedia.org/property/birthYear"]
    kind = "DatatypeProperty"             # DatatypeProperty | ObjectProperty | Unknown
    functional = true
    role = "None"                         # None | TypeAssertion | LabelLike | SameAsLike
    threshold = 0.3                       # label similarity threshold for LabelLike

    [[scenarios]]                         # used by `coevo scenario`
    name = "5"
    default = "I"
    predicates = { "http://dbpedia.org/property/office" = "IV" }
    policies = { "http://dbpedia.org/property/office" = "any" }
"""
from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .engine import Strategy, StrategyAssignment
from .rdf import IRI
from .resolution import ResolutionPolicy
from .semantics import PropertyKind, PropertyProfile, Profiles, SchemaGraph, SimilarityConfig, SpecialRole


class ConfigError(Exception):
    pass


_TOP = {"seed", "label_similarity_threshold", "schema", "annotations", "out",
        "strategy", "policy", "properties", "scenarios"}
_STRATEGY = {"default", "predicates"}
_POLICY = {"default", "predicates"}
_POLICY_ENTRY = {"function", "seed", "params"}
_PROPERTY = {"kind", "functional", "role", "threshold"}
_SCENARIO = {"name", "default", "predicates", "policies", "policy"}


@dataclass
class EngineConfig:
    default_strategy: Strategy = Strategy.IV
    per_predicate: dict = field(default_factory=dict)
    per_predicate_policy: dict = field(default_factory=dict)
    default_policy: ResolutionPolicy | None = None
    properties: dict = field(default_factory=dict)   # IRI -> dict of profile fields
    label_similarity_threshold: float = 0.5
    rng_seed: int = 0
    schema_path: Path | None = None
    annotations_path: Path | None = None
    output_dir: Path | None = None
    scenarios: list | None = None

    def assignment(self) -> StrategyAssignment:
        return StrategyAssignment(self.default_strategy, self.per_predicate,
                                  self.per_predicate_policy, default_policy=self.default_policy)

    def similarity(self) -> SimilarityConfig:
        return SimilarityConfig(self.label_similarity_threshold)

    def profiles(self, schema: SchemaGraph) -> Profiles:
        """Schema-derived profiles with this config's overrides applied."""
        base = Profiles(schema=schema)
        overrides = {}
        for iri, fields in self.properties.items():
            try:
                overrides[iri] = dataclasses.replace(base.get(iri), **fields)
            except ValueError as exc:
                raise ConfigError(f"properties.{iri.value}: {exc}") from None
        return Profiles(overrides, schema)


def _check_keys(table: Any, allowed: set, where: str):
    if not isinstance(table, dict):
        raise ConfigError(f"{where}: expected a table")
    unknown = sorted(set(table) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(unknown)}")


def _strategy(value, where) -> Strategy:
    try:
        return Strategy.parse(value)
    except ValueError:
        raise ConfigError(f"{where}: invalid strategy {value!r}") from None


def _iri(key: str, where: str) -> IRI:
    try:
        return IRI(key)
    except ValueError:
        raise ConfigError(f"{where}: invalid IRI {key!r}") from None


def _policy(value, where) -> ResolutionPolicy | None:
    try:
        if isinstance(value, str):
            return None if value == "auto" else ResolutionPolicy(value)
        _check_keys(value, _POLICY_ENTRY, where)
        if "function" not in value:
            raise ConfigError(f"{where}: missing 'function'")
        params = value.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError(f"{where}.params: expected a table")
        seed = value.get("seed")
        if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
            raise ConfigError(f"{where}.seed: expected an integer")
        if value["function"] == "auto":
            return None
        return ResolutionPolicy(value["function"], params, seed)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _policies(table, where) -> dict:
    if not isinstance(table, dict):
        raise ConfigError(f"{where}: expected a table")
    out = {}
    for k, v in table.items():
        pol = _policy(v, f"{where}.{k}")
        if pol is not None:
            out[_iri(k, where)] = pol
    return out


def _strategies(table, where) -> dict:
    if not isinstance(table, dict):
        raise ConfigError(f"{where}: expected a table")
    return {_iri(k, where): _strategy(v, f"{where}.{k}") for k, v in table.items()}


def _property(value, where) -> dict:
    _check_keys(value, _PROPERTY, where)
    out = {}
    try:
        if "kind" in value:
            out["kind"] = PropertyKind(value["kind"])
        if "role" in value:
            out["role"] = SpecialRole(value["role"])
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    if "functional" in value:
        if not isinstance(value["functional"], bool):
            raise ConfigError(f"{where}.functional: expected true/false")
        out["functional"] = value["functional"]
    if "threshold" in value:
        t = value["threshold"]
        if not isinstance(t, (int, float)) or not 0 <= t <= 1:
            raise ConfigError(f"{where}.threshold: expected a number in [0, 1]")
        out["threshold"] = float(t)
    return out


def parse_config(data: Mapping, base_dir: str | os.PathLike = ".") -> EngineConfig:
    base_dir = Path(base_dir)
    _check_keys(data, _TOP, "config")
    cfg = EngineConfig()
    if "seed" in data:
        if not isinstance(data["seed"], int) or isinstance(data["seed"], bool):
            raise ConfigError("seed: expected an integer")
        cfg.rng_seed = data["seed"]
    if "label_similarity_threshold" in data:
        t = data["label_similarity_threshold"]
        if not isinstance(t, (int, float)) or not 0 <= t <= 1:
            raise ConfigError("label_similarity_threshold: expected a number in [0, 1]")
        cfg.label_similarity_threshold = float(t)
    for key, attr in (("schema", "schema_path"), ("annotations", "annotations_path"),
                      ("out", "output_dir")):
        if key in data:
            if not isinstance(data[key], str):
                raise ConfigError(f"{key}: expected a path string")
            setattr(cfg, attr, base_dir / data[key])
    if "strategy" in data:
        st = data["strategy"]
        _check_keys(st, _STRATEGY, "strategy")
        if "default" in st:
            cfg.default_strategy = _strategy(st["default"], "strategy.default")
        cfg.per_predicate = _strategies(st.get("predicates", {}), "strategy.predicates")
    if "policy" in data:
        pol = data["policy"]
        _check_keys(pol, _POLICY, "policy")
        if "default" in pol:
            cfg.default_policy = _policy(pol["default"], "policy.default")
        cfg.per_predicate_policy = _policies(pol.get("predicates", {}), "policy.predicates")
    if "properties" in data:
        props = data["properties"]
        if not isinstance(props, dict):
            raise ConfigError("properties: expected a table")
        cfg.properties = {_iri(k, "properties"): _property(v, f"properties.{k}")
                          for k, v in props.items()}
    if "scenarios" in data:
        cfg.scenarios = parse_scenarios(data["scenarios"])
    return cfg


def parse_scenarios(items) -> list:
    if not isinstance(items, list):
        raise ConfigError("scenarios: expected an array of tables")
    out = []
    for i, sc in enumerate(items, 1):
        where = f"scenarios[{i}]"
        _check_keys(sc, _SCENARIO, where)
        default_policy = _policy(sc["policy"], f"{where}.policy") if "policy" in sc else None
        out.append(StrategyAssignment(
            _strategy(sc.get("default", "IV"), f"{where}.default"),
            _strategies(sc.get("predicates", {}), f"{where}.predicates"),
            _policies(sc.get("policies", {}), f"{where}.policies"),
            name=str(sc.get("name", i)),
            default_policy=default_policy,
        ))
    return out


def load_config(path: str | os.PathLike) -> EngineConfig:
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_config(data, path.parent)


def load_scenarios(path: str | os.PathLike) -> list:
    """A scenarios file holds only ``[[scenarios]]`` tables."""
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    _check_keys(data, {"scenarios"}, str(path))
    return parse_scenarios(data.get("scenarios", []))
