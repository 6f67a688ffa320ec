"""End-to-end workflow: simulate -> build -> validate -> closure -> learn -> detect."""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import shutil
import time
from importlib import resources
from dataclasses import dataclass, field
from pathlib import Path

from ..kg.io import save
from ..odp import load_odp, load_requirements, load_user_stories
from ..otala import detect, events_from_log, extract_events, learn, save as save_automaton
from ..query import evaluate
from ..reasoner import load_shapes, rdfs_closure, validate
from ..sim import emit_engineering, emit_log, load_config, read_log, simulate
from .kb import KnowledgeBase, build_knowledge_base
from .plotting import plot_levels, plot_timing
from .project import ProjectConfig, load_project
from .registry import (ArtifactDescriptor, Kind, RegistryIndex, Role, register, relative_path,
                       save_registry)

log = logging.getLogger(__name__)

STAGES = ("simulate", "build", "cq", "validate", "closure", "learn", "detect", "register")


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"stage {stage!r} failed: {message}")


@dataclass
class PipelineResult:
    out_dir: Path
    artifacts: dict = field(default_factory=dict)  # name -> path
    summary: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)  # stage -> seconds
    registry: RegistryIndex | None = None
    kb: KnowledgeBase | None = None


def discrete_tags(tags_csv) -> list[str]:
    with Path(tags_csv).open(newline="", encoding="utf-8") as fh:
        return sorted(r["tag"] for r in csv.DictReader(fh) if r["kind"] == "discrete")


def answer_cqs(spec, source) -> dict:
    """Local names returned by each direct competency question."""
    out = {}
    for cq in spec.cqs:
        if cq.expected_kind != "direct":
            continue
        table = evaluate(cq.answer_query, source)
        names = set()
        for row in table.rows:
            for cell in row:
                if cell is not None:
                    names.add(cell.local_name() if hasattr(cell, "local_name") else str(cell))
        out[cq.id] = sorted(names)
    return out


def _simulate_into(config, spec, directory: Path):
    res = simulate(config, seed=spec.seed, duration=spec.duration, anomalies=spec.anomalies,
                   cycles=spec.cycles)
    emit_log(res.records, directory / "sensor_log.csv")
    emit_engineering(res.engineering, directory)
    return res


def run_pipeline(project: ProjectConfig | str | Path | None, out_dir, seed: int | None = None,
                 figures: bool = True) -> PipelineResult:
    """Run every stage, writing artifacts under ``out_dir``; raises StageError on failure."""
    if not isinstance(project, ProjectConfig):
        project = load_project(project)
    if seed is not None:
        project = dataclasses.replace(project, train=dataclasses.replace(project.train, seed=seed))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = PipelineResult(out)
    A = result.artifacts

    def timed(stage, fn):
        t = time.perf_counter()
        try:
            value = fn()
        except StageError:
            raise
        except Exception as e:  # any failure inside a stage is reported under its name
            raise StageError(stage, f"{type(e).__name__}: {e}") from e
        result.timings[stage] = time.perf_counter() - t
        return value

    # -- simulate (or take existing data) --
    def stage_simulate():
        data = out / "data"
        if project.data_dir is not None:
            if data.resolve() != project.data_dir:
                shutil.copytree(project.data_dir, data, dirs_exist_ok=True)
            return None, None
        config = load_config(project.plant)
        train = _simulate_into(config, project.train, data)
        test = None
        if project.detect is not None:
            test = _simulate_into(config, project.detect, out / "detect")
        return train, test

    train_run, test_run = timed("simulate", stage_simulate)
    data_dir = out / "data"
    A["sensor_log"] = data_dir / "sensor_log.csv"

    # -- build --
    def stage_build():
        for p in (project.alignments, project.mapping):
            if not p.exists():
                raise FileNotFoundError(f"{p} does not exist")
        kb = build_knowledge_base(project.odps, project.alignments, project.mapping, data_dir)
        odp_dir = out / "odp"
        odp_dir.mkdir(exist_ok=True)
        for odp_id in kb.lwo.odps:
            A[f"odp:{odp_id}"] = save(load_odp(odp_id).tbox, odp_dir / f"{odp_id}.ttl")
        A["lwo"] = save(kb.lwo.tbox, out / "lwo.ttl")
        A["hwo"] = save(kb.static, out / "hwo.ttl")
        return kb

    kb = timed("build", stage_build)
    result.kb = kb

    # -- competency questions and exploration --
    def stage_cq():
        stories = load_user_stories(project.user_stories)
        spec = load_requirements(project.requirements, stories)
        answers = answer_cqs(spec, kb.source)
        lines = ["cq,answer"] + [f"{cq},{name}" for cq, names in answers.items() for name in names]
        A["cq_answers"] = out / "cq_answers.csv"
        A["cq_answers"].write_text("\n".join(lines) + "\n", "utf-8")
        for cq in spec.cqs:
            if cq.id in answers and cq.expected_answer and set(cq.expected_answer) != set(answers[cq.id]):
                raise ValueError(f"{cq.id} answered {answers[cq.id]}, expected {sorted(cq.expected_answer)}")
        if project.exploration_query is not None:
            table = evaluate(project.exploration_query.read_text("utf-8"), kb.source)
            A["exploration"] = out / "exploration.csv"
            A["exploration"].write_text(table.to_csv(), "utf-8")
            result.summary["exploration_rows"] = len(table)
        result.summary["cq_answers"] = answers
        return spec

    timed("cq", stage_cq)

    # -- validate --
    def stage_validate():
        shapes = load_shapes(project.shapes)
        report = validate(kb.source, shapes)
        A["validation"] = out / "validation.csv"
        A["validation"].write_text(report.to_csv(), "utf-8")
        result.summary["violations"] = len(report)
        if not report.conforms:
            first = report.violations[0]
            raise ValueError(f"{len(report)} violation(s); first: {first.shape_id} on {first.focus_node}: "
                             f"{first.message}")
        return report

    timed("validate", stage_validate)

    # -- closure --
    if project.closure:
        def stage_closure():
            closed = rdfs_closure(kb.static)
            A["closure"] = save(closed, out / "closure.nt")
            result.summary["closure_added"] = len(closed) - len(kb.static)
        timed("closure", stage_closure)

    # -- learn --
    def stage_learn():
        tags = discrete_tags(data_dir / "tags.csv")
        trace = extract_events(kb.source, tags)
        automaton = learn(trace)
        automaton.check()
        A["automaton"] = save_automaton(automaton, out / "automaton.json")
        A["events_query"] = out / "events.rq"
        A["events_query"].write_text(
            resources.files("ontodm.data").joinpath("events.rq").read_text("utf-8"), "utf-8")
        result.summary.update(states=len(automaton.states), transitions=len(automaton.transitions),
                              training_events=len(trace))
        return automaton, tags

    automaton, tags = timed("learn", stage_learn)

    # -- detect --
    if project.detect is not None or (out / "detect" / "sensor_log.csv").exists():
        def stage_detect():
            records = read_log(out / "detect" / "sensor_log.csv")
            test_trace = events_from_log(records, tags)
            report = detect(automaton, test_trace, project.tolerance)
            A["anomaly_report"] = out / "anomaly_report.csv"
            A["anomaly_report"].write_text(report.to_csv(), "utf-8")
            counts: dict = {}
            for item in report.items:
                counts[item.kind] = counts.get(item.kind, 0) + 1
            result.summary["anomalies"] = dict(sorted(counts.items()))
            if figures:
                A["timing_figure"] = plot_timing(automaton, test_trace, report, project.tolerance,
                                                 out / "timing.png")
            return report
        timed("detect", stage_detect)

    if figures and train_run is not None:
        A["levels_figure"] = plot_levels(train_run.records, out / "levels.png",
                                         title=f"Training run (seed {project.train.seed})")

    # -- register --
    def stage_register():
        reg_path = out / "registry.json"
        index = RegistryIndex([], out)
        entries = [
            ("user-stories", Kind.USER_STORY, project.user_stories, Role.END_USER, None),
            ("requirements", Kind.ONTOLOGY_REQ_SPEC, project.requirements, Role.DOMAIN_EXPERT, None),
        ]
        for odp_id in kb.lwo.odps:
            entries.append((f"odp-{odp_id}", Kind.LIGHTWEIGHT_ODP, A[f"odp:{odp_id}"],
                            Role.DOMAIN_EXPERT, load_odp(odp_id).standard_ref))
        entries += [
            ("lwo", Kind.LWO, A["lwo"], Role.DOMAIN_EXPERT, None),
            ("alignments", Kind.ALIGNMENT_ONTOLOGY, project.alignments, Role.ONTOLOGY_EXPERT, None),
            ("hwo", Kind.HWO, A["hwo"], Role.ONTOLOGY_EXPERT, None),
            ("mapping", Kind.MAPPING_RULES, project.mapping, Role.ONTOLOGY_EXPERT, None),
            ("events-query", Kind.PREPARATION_QUERY, A["events_query"], Role.DATA_SCIENTIST, None),
            ("automaton", Kind.AUTOMATON, A["automaton"], Role.DATA_SCIENTIST, None),
        ]
        if project.exploration_query is not None:
            entries.append(("exploration-query", Kind.EXPLORATION_QUERY, project.exploration_query,
                            Role.DATA_SCIENTIST, None))
        inputs = out / "inputs"
        inputs.mkdir(exist_ok=True)
        for art_id, kind, path, role, ref in entries:
            path = Path(path)
            if out.resolve() not in path.resolve().parents:
                path = Path(shutil.copyfile(path, inputs / path.name))
            index = register(index, ArtifactDescriptor(art_id, kind, relative_path(path, out),
                                                       project.name, role, ref))
        A["registry"] = save_registry(index, reg_path)
        result.registry = index
        result.summary["artifact_kinds"] = len(index.kinds())

    timed("register", stage_register)
    A["summary"] = out / "summary.json"
    A["summary"].write_text(json.dumps(result.summary, indent=1, sort_keys=True) + "\n", "utf-8")
    return result
