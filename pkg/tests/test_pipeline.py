import dataclasses
import shutil

import pytest

from ontodm.cli import main
from ontodm.pipeline import (ArtifactDescriptor, Kind, RegistryError, RegistryIndex, Reuse, Role,
                             RunSpec, StageError, load_project, load_registry, register,
                             reuse_report, run_pipeline, save_registry)

PROJECT = load_project()
SMALL = dataclasses.replace(PROJECT, train=RunSpec(1, cycles=2),
                            detect=dataclasses.replace(PROJECT.detect, cycles=2))


def _desc(art_id, kind, role, path="x.txt", project="p"):
    return ArtifactDescriptor(art_id, kind, path, project, role)


@pytest.fixture
def index(tmp_path):
    (tmp_path / "x.txt").write_text("x")
    return RegistryIndex([], tmp_path)


def test_register_permissions(index):
    index = register(index, _desc("us", Kind.USER_STORY, Role.END_USER))
    assert len(index) == 1
    with pytest.raises(RegistryError, match="cannot be created by EndUser"):
        register(index, _desc("hwo", Kind.HWO, Role.END_USER))
    with pytest.raises(RegistryError, match="already registered"):
        register(index, _desc("us", Kind.USER_STORY, Role.END_USER))
    with pytest.raises(RegistryError, match="does not exist"):
        register(index, _desc("m", Kind.MAPPING_RULES, Role.ONTOLOGY_EXPERT, path="gone.map"))
    # same id under another project is a different key
    assert len(register(index, _desc("us", Kind.USER_STORY, Role.END_USER, project="q"))) == 2


def test_registry_round_trip(index, tmp_path):
    index = register(index, _desc("us", Kind.USER_STORY, Role.END_USER))
    index = register(index, _desc("a", Kind.AUTOMATON, Role.DATA_SCIENTIST))
    back = load_registry(save_registry(index, tmp_path / "registry.json"))
    assert back.entries == index.entries
    assert back.resolve(back.get("p", "a")) == tmp_path / "x.txt"
    assert len(load_registry(tmp_path / "missing.json")) == 0


def test_reuse_report_errors(index):
    with pytest.raises(RegistryError, match="empty"):
        reuse_report(index, "A")
    index = register(index, _desc("us", Kind.USER_STORY, Role.END_USER))
    with pytest.raises(RegistryError):
        reuse_report(index, "C")


def test_matrix_spot_cells(fixture_run):
    a = reuse_report(fixture_run.registry, "A")
    b = reuse_report(fixture_run.registry, "B")
    assert a.rows[Kind.USER_STORY] is Reuse.NO
    assert b.rows[Kind.MAPPING_RULES] is Reuse.NO
    assert a.rows[Kind.HWO] is Reuse.YES_WITH_EXTENSION
    assert b.rows[Kind.PREPARATION_QUERY] is Reuse.YES
    assert b.to_csv().splitlines()[0] == "artifact_kind,reuse,registered"


def test_fixture_registry(fixture_run):
    assert len(fixture_run.registry.kinds()) >= 8
    on_disk = load_registry(fixture_run.artifacts["registry"])
    for e in on_disk.entries:
        assert on_disk.resolve(e).exists(), e


def test_missing_mapping_fails_build(tmp_path):
    project = dataclasses.replace(SMALL, mapping=tmp_path / "nope.map")
    with pytest.raises(StageError) as e:
        run_pipeline(project, tmp_path / "out", figures=False)
    assert e.value.stage == "build"


def test_blank_timestamp_fails_validate(fixture_run, tmp_path):
    data = tmp_path / "data_in"
    shutil.copytree(fixture_run.out_dir / "data", data)
    log = data / "sensor_log.csv"
    lines = log.read_text().splitlines()
    lines[5] = "," + lines[5].split(",", 1)[1]
    log.write_text("\n".join(lines) + "\n")
    project = dataclasses.replace(SMALL, data_dir=data, detect=None)
    with pytest.raises(StageError) as e:
        run_pipeline(project, tmp_path / "out", figures=False)
    assert e.value.stage == "validate"
    report = (tmp_path / "out" / "validation.csv").read_text().splitlines()
    assert len(report) == 2 and report[1].startswith("obs-result-time,")


def test_idempotent(tmp_path):
    a = run_pipeline(SMALL, tmp_path / "a", figures=False)
    b = run_pipeline(SMALL, tmp_path / "b", figures=False)
    files = sorted(p.relative_to(a.out_dir) for p in a.out_dir.rglob("*") if p.is_file())
    assert files == sorted(p.relative_to(b.out_dir) for p in b.out_dir.rglob("*") if p.is_file())
    for f in files:
        assert (a.out_dir / f).read_bytes() == (b.out_dir / f).read_bytes(), f
    assert a.summary["anomalies"]


def test_cli_exit_codes(tmp_path, capsys):
    out = str(tmp_path)
    assert main(["--out-dir", out, "sim", "run", "--cycles", "1", "--seed", "3"]) == 0
    assert (tmp_path / "data" / "sensor_log.csv").exists()
    assert main(["--out-dir", out, "kg", "build"]) == 0
    assert main(["--out-dir", out, "kg", "validate"]) == 0
    assert main(["--out-dir", out, "learn", "--graph", str(tmp_path / "hwo.ttl"),
                 "--virtual", str(PROJECT.mapping), "--data", str(tmp_path / "data"),
                 "--tags", str(tmp_path / "data" / "tags.csv")]) == 0
    assert main(["--out-dir", out, "detect", "--automaton", str(tmp_path / "automaton.json"),
                 "--log", str(tmp_path / "data" / "sensor_log.csv"), "--tolerance", "0"]) == 0
    assert "0 anomalies" in capsys.readouterr().out
    assert main(["--out-dir", out, "registry", "reuse-report", "--scenario", "A"]) == 2
    assert main(["--out-dir", out, "kg", "closure", "--graph", str(tmp_path / "nope.nt")]) == 2
    with pytest.raises(SystemExit) as e:
        main(["--out-dir", out, "sim", "run", "--cycles", "many"])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 1


def test_cli_pipeline_stage_failure(tmp_path):
    bad = tmp_path / "project.yaml"
    text = PROJECT.root.joinpath("project.yaml").read_text()
    bad.write_text(text.replace("mapping: mapping.map", "mapping: missing.map"))
    for name in ("alignments.txt", "shapes.csv", "user_stories.yaml", "requirements.yaml",
                 "exploration.rq", "plant.yaml", "cq1.rq", "cq2.rq"):
        shutil.copy(PROJECT.root / name, tmp_path / name)
    assert main(["--out-dir", str(tmp_path / "out"), "pipeline", "run", "--project", str(bad),
                 "--no-figures"]) == 2
