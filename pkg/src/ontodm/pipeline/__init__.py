"""Workflow orchestration, artifact registry and report figures."""

from .kb import KnowledgeBase, build_knowledge_base
from .project import ProjectConfig, ProjectError, RunSpec, bundled_project_path, load_project
from .registry import (PERMITTED_ROLES, REUSE_KINDS, ArtifactDescriptor, Kind, RegistryError,
                       RegistryIndex, Reuse, Role, ScenarioReport, load_registry, register,
                       relative_path, reuse_report, save_registry)
from .run import STAGES, PipelineResult, StageError, answer_cqs, discrete_tags, run_pipeline

__all__ = ["KnowledgeBase", "build_knowledge_base", "ProjectConfig", "ProjectError", "RunSpec",
           "bundled_project_path", "load_project", "PERMITTED_ROLES", "REUSE_KINDS",
           "ArtifactDescriptor", "Kind", "RegistryError", "RegistryIndex", "Reuse", "Role",
           "ScenarioReport", "load_registry", "register", "relative_path", "reuse_report",
           "save_registry", "STAGES", "PipelineResult", "StageError", "answer_cqs",
           "discrete_tags", "run_pipeline"]
