"""User stories and ontology requirement specifications as checkable YAML documents.

User story file::

    project: ModVA-mixing
    user_stories:
      - id: US1
        role: maintenance technician
        goal: ...
        benefit: ...
        data_sources: [...]
        acceptance: [...]

Requirement specification file::

    project: ModVA-mixing
    cqs:
      - id: CQ1
        question: Which sensors are part of Tank B201?
        expected_kind: direct          # or model-derived
        odps: [isa88, sosa]
        answer_query: cq1.rq           # file next to this one, or inline query text
        expected_answer: [...]         # optional local names
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .library import ODP_IDS, OdpError


class RequirementError(ValueError):
    pass


@dataclass(frozen=True)
class UserStory:
    id: str
    role: str
    goal: str
    benefit: str
    data_sources: tuple[str, ...] = ()
    acceptance: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("role", "goal", "benefit"):
            if not str(getattr(self, name) or "").strip():
                raise RequirementError(f"user story {self.id}: {name} must not be empty")

    def sentence(self) -> str:
        return f"As a {self.role}, I would like to {self.goal}, so that {self.benefit}"


@dataclass(frozen=True)
class CompetencyQuestion:
    id: str
    question: str
    expected_kind: str
    odp_ids: tuple[str, ...]
    answer_query: str | None = None
    expected_answer: tuple[str, ...] = ()

    def __post_init__(self):
        if self.expected_kind not in ("direct", "model-derived"):
            raise RequirementError(f"{self.id}: expected_kind must be direct or model-derived")
        if not self.odp_ids:
            raise RequirementError(f"{self.id}: a competency question names at least one ODP")
        for odp_id in self.odp_ids:
            if odp_id not in ODP_IDS:
                raise RequirementError(f"{self.id}: unknown ODP {odp_id!r}")
        if self.expected_kind == "direct" and not self.answer_query:
            raise RequirementError(f"{self.id}: direct competency questions need an answer_query")


@dataclass(frozen=True)
class OntologyRequirementSpec:
    project: str
    cqs: tuple[CompetencyQuestion, ...]
    user_stories: tuple[UserStory, ...] = field(default=())

    def cq(self, cq_id: str) -> CompetencyQuestion:
        for cq in self.cqs:
            if cq.id == cq_id:
                return cq
        raise KeyError(cq_id)

    def odp_ids(self) -> list[str]:
        return sorted({o for cq in self.cqs for o in cq.odp_ids})


def _read_yaml(path: Path) -> dict:
    try:
        data = yaml.safe_load(path.read_text("utf-8"))
    except yaml.YAMLError as e:
        raise RequirementError(f"{path}: {e}") from None
    if not isinstance(data, dict):
        raise RequirementError(f"{path}: expected a mapping at top level")
    return data


def load_user_stories(path) -> list[UserStory]:
    path = Path(path)
    data = _read_yaml(path)
    out = []
    for i, raw in enumerate(data.get("user_stories") or []):
        try:
            out.append(UserStory(
                id=str(raw.get("id", f"US{i + 1}")),
                role=raw.get("role", ""),
                goal=raw.get("goal", ""),
                benefit=raw.get("benefit", ""),
                data_sources=tuple(raw.get("data_sources") or ()),
                acceptance=tuple(raw.get("acceptance") or ()),
            ))
        except AttributeError:
            raise RequirementError(f"{path}: user story #{i + 1} is not a mapping") from None
    if not out:
        raise RequirementError(f"{path}: no user stories")
    return out


def load_requirements(path, user_stories=()) -> OntologyRequirementSpec:
    path = Path(path)
    data = _read_yaml(path)
    cqs = []
    for raw in data.get("cqs") or []:
        query = raw.get("answer_query")
        if query and str(query).endswith(".rq"):
            qpath = path.parent / query
            if not qpath.exists():
                raise RequirementError(f"{raw.get('id')}: query file {qpath} not found")
            query = qpath.read_text("utf-8")
        try:
            cqs.append(CompetencyQuestion(
                id=str(raw["id"]),
                question=str(raw["question"]),
                expected_kind=raw.get("expected_kind", "direct"),
                odp_ids=tuple(raw.get("odps") or ()),
                answer_query=query,
                expected_answer=tuple(raw.get("expected_answer") or ()),
            ))
        except KeyError as e:
            raise RequirementError(f"{path}: competency question missing field {e}") from None
        except OdpError as e:
            raise RequirementError(str(e)) from None
    return OntologyRequirementSpec(str(data.get("project", "")), tuple(cqs), tuple(user_stories))
