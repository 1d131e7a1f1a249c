"""Scenario files: JSON documents validated against the bundled schema."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import jsonschema

from ..aco import AcoParams
from ..geometry import Scene
from ..planner import POSITION_MODES, config_errors

BUNDLED = {"paper-v": "paper_v.json"}


class ScenarioError(ValueError):
    """A scenario failed to parse, match the schema, or satisfy planner constraints."""

    def __init__(self, source: str, problems: list[str]):
        self.source = source
        self.problems = list(problems)
        super().__init__(f"{source}: " + "; ".join(self.problems))


@dataclass(frozen=True)
class Scenario:
    id: str
    region_origin: tuple[float, float, float]
    region_edge: float
    networks: tuple[tuple[tuple[float, float, float], float], ...]
    grids: tuple[int, ...]
    seeds: tuple[int, ...]
    intervals: tuple[int, ...] = (1, 2, 4)
    position_modes: tuple[str, ...] = ("center",)
    subsamples: int = 9
    surface_samples: int = 10**6
    theorem2_draws: int = 10**6
    aco: AcoParams = field(default_factory=AcoParams)

    def scene(self) -> Scene:
        return Scene.from_spheres(self.region_origin, self.region_edge, self.networks)

    def with_seeds(self, seeds) -> Scenario:
        return replace(self, seeds=tuple(int(s) for s in seeds))


def _data_text(name: str) -> str:
    return resources.files("som3d").joinpath("data").joinpath(name).read_text()


def schema() -> dict:
    return json.loads(_data_text("scenario.schema.json"))


def _field_path(err: jsonschema.ValidationError) -> str:
    out = ""
    for part in err.absolute_path:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out or "<root>"


def constraint_errors(sc: Scenario) -> list[str]:
    """Planner constraints the scenario's grid/interval combinations would violate."""
    errs = []
    for n in sc.grids:
        for d0 in sc.intervals:
            errs += [f"grid n={n}, interval d0={d0}: {e}" for e in config_errors(n, d0)]
    for m in sc.position_modes:
        if m not in POSITION_MODES:
            errs.append(f"unknown position mode {m!r}")
    return errs


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    """Parse and validate scenario JSON text; raises ScenarioError listing every problem."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(source, [f"line {e.lineno}, column {e.colno}: {e.msg}"]) from None
    validator = jsonschema.Draft202012Validator(schema())
    problems = [
        f"{_field_path(e)}: {e.message}"
        for e in sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    ]
    if problems:
        raise ScenarioError(source, problems)
    sc = Scenario(
        id=doc["id"],
        region_origin=tuple(map(float, doc["region_origin"])),
        region_edge=float(doc["region_edge"]),
        networks=tuple(
            (tuple(map(float, net["center"])), float(net["radius"])) for net in doc["networks"]
        ),
        grids=tuple(doc["grids"]),
        seeds=tuple(doc["seeds"]),
        intervals=tuple(doc.get("intervals", (1, 2, 4))),
        position_modes=tuple(doc.get("position_modes", ("center",))),
        subsamples=doc.get("subsamples", 9),
        surface_samples=doc.get("surface_samples", 10**6),
        theorem2_draws=doc.get("theorem2_draws", 10**6),
        aco=AcoParams(**doc.get("aco", {})),
    )
    problems = constraint_errors(sc)
    if problems:
        raise ScenarioError(source, problems)
    return sc


def load_scenario(path) -> Scenario:
    """Load a scenario file, or a bundled scenario by name (e.g. ``paper-v``)."""
    if str(path) in BUNDLED:
        return bundled_scenario(str(path))
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ScenarioError(str(p), [f"cannot read file: {e.strerror}"]) from None
    return parse_scenario(text, str(p))


def bundled_scenario(name: str = "paper-v") -> Scenario:
    if name not in BUNDLED:
        raise KeyError(f"no bundled scenario {name!r}; choose from {sorted(BUNDLED)}")
    return parse_scenario(_data_text(BUNDLED[name]), name)
