"""Project configuration file for the end-to-end workflow."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import yaml

from ..sim import parse_anomaly


class ProjectError(ValueError):
    pass


@dataclass(frozen=True)
class RunSpec:
    seed: int
    cycles: int | None = None
    duration: float | None = None
    anomalies: tuple = ()


@dataclass(frozen=True)
class ProjectConfig:
    name: str
    root: Path
    odps: tuple[str, ...]
    alignments: Path
    mapping: Path
    shapes: Path | None
    user_stories: Path
    requirements: Path
    exploration_query: Path | None
    plant: Path | None
    train: RunSpec
    detect: RunSpec | None
    closure: bool = False
    tolerance: float = 0.1
    data_dir: Path | None = None  # use existing CSVs instead of simulating


def bundled_project_path() -> Path:
    return Path(str(resources.files("ontodm.data.project").joinpath("project.yaml")))


def _run_spec(raw, where: str) -> RunSpec:
    if not isinstance(raw, dict):
        raise ProjectError(f"{where} must be a mapping")
    try:
        return RunSpec(int(raw.get("seed", 0)),
                       int(raw["cycles"]) if raw.get("cycles") is not None else None,
                       float(raw["duration"]) if raw.get("duration") is not None else None,
                       tuple(parse_anomaly(a) for a in raw.get("anomalies") or ()))
    except (TypeError, ValueError) as e:
        raise ProjectError(f"{where}: {e}") from None


def load_project(path=None) -> ProjectConfig:
    """Read a project YAML file. Paths are resolved but not checked for existence here."""
    path = Path(path) if path is not None else bundled_project_path()
    if not path.exists():
        raise ProjectError(f"project file {path} does not exist")
    try:
        data = yaml.safe_load(path.read_text("utf-8"))
    except yaml.YAMLError as e:
        raise ProjectError(f"{path}: {e}") from None
    if not isinstance(data, dict):
        raise ProjectError(f"{path}: expected a mapping")
    root = path.parent

    def p(key, required=True):
        value = data.get(key)
        if value in (None, ""):
            if required:
                raise ProjectError(f"{path}: missing field {key!r}")
            return None
        return (root / str(value)).resolve()

    train = _run_spec(data.get("train") or {"seed": 0, "cycles": 10}, "train")
    if train.cycles is None and train.duration is None:
        raise ProjectError("train needs cycles or duration")
    detect = _run_spec(data["detect"], "detect") if data.get("detect") else None
    odps = data.get("odps") or []
    if not odps:
        raise ProjectError(f"{path}: at least one ODP is required")
    return ProjectConfig(
        name=str(data.get("project", path.stem)), root=root, odps=tuple(odps),
        alignments=p("alignments"), mapping=p("mapping"), shapes=p("shapes", False),
        user_stories=p("user_stories"), requirements=p("requirements"),
        exploration_query=p("exploration_query", False), plant=p("plant", False),
        train=train, detect=detect, closure=bool(data.get("closure", False)),
        tolerance=float(data.get("tolerance", 0.1)), data_dir=p("data_dir", False),
    )
