"""Registry of ontological and data-mining artifacts with reuse assessment per scenario."""

from __future__ import annotations

import enum
import json
import os
from dataclasses import asdict, dataclass
from pathlib import Path


class RegistryError(ValueError):
    pass


class Kind(enum.Enum):
    USER_STORY = "UserStory"
    ONTOLOGY_REQ_SPEC = "OntologyReqSpec"
    LIGHTWEIGHT_ODP = "LightweightODP"
    LWO = "LWO"
    ALIGNMENT_ONTOLOGY = "AlignmentOntology"
    HWO = "HWO"
    MAPPING_RULES = "MappingRules"
    EXPLORATION_QUERY = "ExplorationQuery"
    PREPARATION_QUERY = "PreparationQuery"
    AUTOMATON = "Automaton"


class Role(enum.Enum):
    END_USER = "EndUser"
    DOMAIN_EXPERT = "DomainExpert"
    ONTOLOGY_EXPERT = "OntologyExpert"
    DATA_SCIENTIST = "DataScientist"


class Reuse(enum.Enum):
    NO = "No"
    YES = "Yes"
    YES_WITH_EXTENSION = "YesWithExtension"


# who may author which artifact
PERMITTED_ROLES = {
    Kind.USER_STORY: {Role.END_USER},
    Kind.ONTOLOGY_REQ_SPEC: {Role.END_USER, Role.DOMAIN_EXPERT, Role.DATA_SCIENTIST},
    Kind.LIGHTWEIGHT_ODP: {Role.DOMAIN_EXPERT, Role.DATA_SCIENTIST},
    Kind.LWO: {Role.DOMAIN_EXPERT, Role.DATA_SCIENTIST},
    Kind.ALIGNMENT_ONTOLOGY: {Role.DOMAIN_EXPERT, Role.DATA_SCIENTIST, Role.ONTOLOGY_EXPERT},
    Kind.HWO: {Role.ONTOLOGY_EXPERT},
    Kind.MAPPING_RULES: {Role.ONTOLOGY_EXPERT},
    Kind.EXPLORATION_QUERY: {Role.DATA_SCIENTIST, Role.ONTOLOGY_EXPERT},
    Kind.PREPARATION_QUERY: {Role.DATA_SCIENTIST, Role.ONTOLOGY_EXPERT},
    Kind.AUTOMATON: {Role.DATA_SCIENTIST},
}

# rows of the reuse matrix, in report order
REUSE_KINDS = (
    Kind.USER_STORY, Kind.ONTOLOGY_REQ_SPEC, Kind.LWO, Kind.ALIGNMENT_ONTOLOGY, Kind.HWO,
    Kind.MAPPING_RULES, Kind.EXPLORATION_QUERY, Kind.PREPARATION_QUERY,
)

# A: new use case on the same plant. B: same use case on a different plant.
_MATRIX = {
    "A": {k: Reuse.YES_WITH_EXTENSION for k in REUSE_KINDS} | {Kind.USER_STORY: Reuse.NO},
    "B": {k: Reuse.YES for k in REUSE_KINDS} | {Kind.MAPPING_RULES: Reuse.NO},
}

SCENARIOS = {"A": "new use case, same plant", "B": "same use case, different plant"}


@dataclass(frozen=True)
class ArtifactDescriptor:
    id: str
    kind: Kind
    path: str
    project: str
    created_by_role: Role
    standard_ref: str | None = None
    reusable: bool = True

    def key(self) -> tuple[str, str]:
        return (self.project, self.id)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        d["created_by_role"] = self.created_by_role.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ArtifactDescriptor":
        try:
            return cls(str(d["id"]), Kind(d["kind"]), str(d["path"]), str(d["project"]),
                       Role(d["created_by_role"]), d.get("standard_ref"), bool(d.get("reusable", True)))
        except (KeyError, ValueError) as e:
            raise RegistryError(f"malformed registry entry: {e}") from None


@dataclass
class RegistryIndex:
    entries: list
    root: Path | None = None  # relative artifact paths resolve here

    def __len__(self):
        return len(self.entries)

    def get(self, project: str, artifact_id: str) -> ArtifactDescriptor:
        for e in self.entries:
            if e.key() == (project, artifact_id):
                return e
        raise KeyError((project, artifact_id))

    def kinds(self, project: str | None = None) -> set:
        return {e.kind for e in self.entries if project is None or e.project == project}

    def resolve(self, descriptor: ArtifactDescriptor) -> Path:
        p = Path(descriptor.path)
        return p if p.is_absolute() or self.root is None else self.root / p


def register(index: RegistryIndex, descriptor: ArtifactDescriptor, check_path: bool = True) -> RegistryIndex:
    if descriptor.created_by_role not in PERMITTED_ROLES[descriptor.kind]:
        allowed = ", ".join(sorted(r.value for r in PERMITTED_ROLES[descriptor.kind]))
        raise RegistryError(f"{descriptor.kind.value} cannot be created by "
                            f"{descriptor.created_by_role.value} (allowed: {allowed})")
    if check_path and not index.resolve(descriptor).exists():
        raise RegistryError(f"artifact path {descriptor.path} does not exist")
    if any(e.key() == descriptor.key() for e in index.entries):
        raise RegistryError(f"artifact {descriptor.id!r} already registered for {descriptor.project!r}")
    return RegistryIndex(index.entries + [descriptor], index.root)


def relative_path(path, root) -> str:
    """Path as stored in the registry: relative to the registry directory, POSIX separators."""
    return Path(os.path.relpath(Path(path).resolve(), Path(root).resolve())).as_posix()


def save_registry(index: RegistryIndex, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = {"format_version": 1, "entries": [e.to_dict() for e in index.entries]}
    path.write_text(json.dumps(data, indent=1, ensure_ascii=False) + "\n", "utf-8")
    return path


def load_registry(path) -> RegistryIndex:
    path = Path(path)
    if not path.exists():
        return RegistryIndex([], path.parent)
    try:
        data = json.loads(path.read_text("utf-8"))
        entries = [ArtifactDescriptor.from_dict(d) for d in data["entries"]]
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise RegistryError(f"{path}: {e}") from None
    keys = [e.key() for e in entries]
    if len(set(keys)) != len(keys):
        raise RegistryError(f"{path}: duplicate (project, id) keys")
    return RegistryIndex(entries, path.parent)


@dataclass(frozen=True)
class ScenarioReport:
    scenario: str
    rows: dict  # Kind -> Reuse
    available: frozenset = frozenset()  # kinds present in the index

    def to_csv(self) -> str:
        lines = ["artifact_kind,reuse,registered"]
        for kind in REUSE_KINDS:
            lines.append(f"{kind.value},{self.rows[kind].value},{'yes' if kind in self.available else 'no'}")
        return "\n".join(lines) + "\n"


def reuse_report(index: RegistryIndex, scenario: str, project: str | None = None) -> ScenarioReport:
    """Reuse verdict per artifact kind when moving on to scenario A or B."""
    if scenario not in _MATRIX:
        raise RegistryError(f"unknown scenario {scenario!r}; expected A or B")
    if not index.entries:
        raise RegistryError("registry is empty")
    return ScenarioReport(scenario, dict(_MATRIX[scenario]), frozenset(index.kinds(project)))
