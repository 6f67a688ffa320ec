"""Command line: ``ontodm <command> ...``. Exit codes: 0 ok, 1 usage error, 2 stage failure."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

EXIT_USAGE = 1
EXIT_STAGE = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class Failure(Exception):
    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(message)


def _out_path(args, value, default_name: str) -> Path:
    if value:
        return Path(value)
    return Path(args.out_dir) / default_name


def _kb(args):
    from .pipeline import build_knowledge_base, load_project
    project = load_project(args.project)
    data = Path(args.data) if args.data else Path(args.out_dir) / "data"
    return project, build_knowledge_base(project.odps, project.alignments, project.mapping, data)


# -- handlers --

def cmd_sim_run(args):
    from .sim import emit_engineering, emit_log, load_config, parse_anomaly, simulate
    config = load_config(args.config)
    anomalies = [parse_anomaly(a) for a in args.anomaly]
    seed = args.sim_seed if args.sim_seed is not None else (args.seed or 0)
    if args.duration is None and args.cycles is None:
        raise Failure("sim", "give --duration or --cycles")
    res = simulate(config, seed=seed, duration=args.duration, anomalies=anomalies, cycles=args.cycles)
    out = _out_path(args, args.out, "data")
    emit_log(res.records, out / "sensor_log.csv")
    emit_engineering(res.engineering, out)
    print(f"{len(res.records)} log records, {res.cycles_completed} cycles -> {out}")


def cmd_kg_build(args):
    from .kg.io import save
    _, kb = _kb(args)
    out = _out_path(args, args.out, "hwo.ttl")
    save(kb.static, out)
    msg = f"static graph: {len(kb.static)} triples -> {out}"
    if args.materialize:
        full = kb.materialized()
        save(full, args.materialize)
        msg += f"; full materialization: {len(full)} triples -> {args.materialize}"
    print(msg)


def cmd_kg_query(args):
    from .query import evaluate
    _, kb = _kb(args)
    source = kb.static if args.static_only else kb.source
    table = evaluate(Path(args.query).read_text("utf-8"), source)
    text = table.to_csv()
    if args.out:
        Path(args.out).write_text(text, "utf-8")
        print(f"{len(table)} rows -> {args.out}")
    else:
        sys.stdout.write(text)


def cmd_kg_validate(args):
    from .reasoner import load_shapes, validate
    project, kb = _kb(args)
    shapes = load_shapes(args.shapes or project.shapes)
    report = validate(kb.source, shapes)
    out = _out_path(args, args.report, "validation.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report.to_csv(), "utf-8")
    if not report.conforms:
        raise Failure("validate", f"{len(report)} violation(s), see {out}")
    print(f"graph conforms to {len(shapes)} shapes")


def cmd_kg_closure(args):
    from .kg.io import load, save
    from .reasoner import ALL_RULES, rdfs_closure
    graph = load(args.graph)
    rules = args.rules.split(",") if args.rules else ALL_RULES
    closed = rdfs_closure(graph, rules)
    out = _out_path(args, args.out, "closure.nt")
    save(closed, out)
    print(f"{len(graph)} -> {len(closed)} triples -> {out}")


def cmd_learn(args):
    from .kg.graph import UnionSource
    from .kg.io import load
    from .mapping import VirtualView, bind_sources, parse_rules
    from .otala import extract_events, learn, load_tags, save
    source = load(args.graph)
    if args.virtual:
        rs = parse_rules(args.virtual)
        data = Path(args.data) if args.data else Path(args.virtual).parent
        source = UnionSource(source, VirtualView(rs, bind_sources(rs, data)))
    tags = load_tags(args.tags)
    trace = extract_events(source, tags)
    automaton = learn(trace)
    out = _out_path(args, args.out, "automaton.json")
    save(automaton, out)
    print(f"{len(trace)} events -> {len(automaton.states)} states, "
          f"{len(automaton.transitions)} transitions -> {out}")


def cmd_detect(args):
    from .otala import detect, events_from_log, load
    from .sim import read_log
    automaton = load(args.automaton)
    trace = events_from_log(read_log(args.log), automaton.tags)
    report = detect(automaton, trace, args.tolerance)
    out = _out_path(args, args.report, "anomaly_report.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report.to_csv(), "utf-8")
    if args.figure:
        from .pipeline.plotting import plot_timing
        plot_timing(automaton, trace, report, args.tolerance, args.figure)
    print(f"{len(report)} anomalies in {len(trace)} events -> {out}")


def _registry_path(args) -> Path:
    return Path(args.registry) if args.registry else Path(args.out_dir) / "registry.json"


def cmd_registry_register(args):
    from .pipeline.registry import (ArtifactDescriptor, Kind, Role, load_registry, register,
                                    relative_path, save_registry)
    path = _registry_path(args)
    index = load_registry(path)
    desc = ArtifactDescriptor(args.id, Kind(args.kind), relative_path(args.path, path.parent),
                              args.project, Role(args.role), args.standard_ref, not args.not_reusable)
    save_registry(register(index, desc), path)
    print(f"registered {args.project}/{args.id} ({args.kind})")


def cmd_registry_list(args):
    from .pipeline.registry import load_registry
    index = load_registry(_registry_path(args))
    print("project,id,kind,role,path")
    for e in index.entries:
        print(f"{e.project},{e.id},{e.kind.value},{e.created_by_role.value},{e.path}")


def cmd_registry_reuse(args):
    from .pipeline.registry import load_registry, reuse_report
    report = reuse_report(load_registry(_registry_path(args)), args.scenario)
    text = report.to_csv()
    if args.out:
        Path(args.out).write_text(text, "utf-8")
    sys.stdout.write(text)


def cmd_pipeline_run(args):
    from .pipeline import run_pipeline
    res = run_pipeline(args.project, args.out_dir, seed=args.seed, figures=not args.no_figures)
    for stage, secs in res.timings.items():
        print(f"{stage:<9} {secs:6.2f} s")
    print(f"artifacts in {res.out_dir}: {', '.join(sorted(p.name for p in set(map(Path, res.artifacts.values()))))}")


# -- parser --

def build_parser() -> argparse.ArgumentParser:
    from .pipeline.registry import Kind, Role
    p = _Parser(prog="ontodm", description="Ontology-backed data mining workflow for a mixing plant.")
    p.add_argument("--out-dir", default="out", help="directory for outputs (default: out)")
    p.add_argument("--seed", type=int, default=None, help="random seed override")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("sim", help="plant simulator").add_subparsers(dest="action", required=True,
                                                                        parser_class=_Parser)
    s = sim.add_parser("run", help="simulate and write sensor log plus engineering tables")
    s.add_argument("--config", help="plant YAML (default: bundled mixing module)")
    s.add_argument("--seed", dest="sim_seed", type=int)
    s.add_argument("--duration", type=float)
    s.add_argument("--cycles", type=int)
    s.add_argument("--anomaly", action="append", default=[], help="clog:V101:0.5:120 or stuck:V101:open:0")
    s.add_argument("--out", help="output directory (default: <out-dir>/data)")
    s.set_defaults(func=cmd_sim_run)

    kg = sub.add_parser("kg", help="knowledge graph").add_subparsers(dest="action", required=True,
                                                                      parser_class=_Parser)

    def kb_args(q):
        q.add_argument("--project", help="project YAML (default: bundled project)")
        q.add_argument("--data", help="directory with the CSV sources (default: <out-dir>/data)")

    b = kg.add_parser("build", help="materialize static knowledge")
    kb_args(b)
    b.add_argument("--out")
    b.add_argument("--materialize", help="also write the full materialization here")
    b.set_defaults(func=cmd_kg_build)
    q = kg.add_parser("query", help="run a SELECT query over static graph and virtual view")
    kb_args(q)
    q.add_argument("--query", required=True)
    q.add_argument("--static-only", action="store_true")
    q.add_argument("--out")
    q.set_defaults(func=cmd_kg_query)
    v = kg.add_parser("validate", help="check shapes")
    kb_args(v)
    v.add_argument("--shapes")
    v.add_argument("--report")
    v.set_defaults(func=cmd_kg_validate)
    c = kg.add_parser("closure", help="RDFS closure of a graph file")
    c.add_argument("--graph", required=True)
    c.add_argument("--rules", help="comma separated rule names (default: all six)")
    c.add_argument("--out")
    c.set_defaults(func=cmd_kg_closure)

    le = sub.add_parser("learn", help="learn a timed automaton from the graph")
    le.add_argument("--graph", required=True)
    le.add_argument("--virtual", help="mapping file whose virtual rules supply observations")
    le.add_argument("--data", help="CSV directory for --virtual (default: mapping file dir)")
    le.add_argument("--tags", required=True, help="tag list or tags.csv (discrete rows)")
    le.add_argument("--out")
    le.set_defaults(func=cmd_learn)

    de = sub.add_parser("detect", help="check a sensor log against an automaton")
    de.add_argument("--automaton", required=True)
    de.add_argument("--log", required=True)
    de.add_argument("--tolerance", type=float, default=0.1)
    de.add_argument("--report")
    de.add_argument("--figure", help="write a timing figure (PNG)")
    de.set_defaults(func=cmd_detect)

    reg = sub.add_parser("registry", help="artifact registry").add_subparsers(dest="action", required=True,
                                                                              parser_class=_Parser)
    r = reg.add_parser("register")
    r.add_argument("--registry")
    r.add_argument("--id", required=True)
    r.add_argument("--kind", required=True, choices=[k.value for k in Kind])
    r.add_argument("--path", required=True)
    r.add_argument("--project", required=True)
    r.add_argument("--role", required=True, choices=[x.value for x in Role])
    r.add_argument("--standard-ref")
    r.add_argument("--not-reusable", action="store_true")
    r.set_defaults(func=cmd_registry_register)
    ls = reg.add_parser("list")
    ls.add_argument("--registry")
    ls.set_defaults(func=cmd_registry_list)
    rr = reg.add_parser("reuse-report")
    rr.add_argument("--registry")
    rr.add_argument("--scenario", required=True, choices=["A", "B"])
    rr.add_argument("--out")
    rr.set_defaults(func=cmd_registry_reuse)

    pl = sub.add_parser("pipeline", help="end-to-end workflow").add_subparsers(dest="action", required=True,
                                                                               parser_class=_Parser)
    pr = pl.add_parser("run")
    pr.add_argument("--project", help="project YAML (default: bundled project)")
    pr.add_argument("--no-figures", action="store_true")
    pr.set_defaults(func=cmd_pipeline_run)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    from .pipeline.run import StageError
    try:
        args.func(args)
    except StageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_STAGE
    except Failure as e:
        print(f"error [{e.stage}]: {e}", file=sys.stderr)
        return EXIT_STAGE
    except (OSError, ValueError, KeyError, RuntimeError) as e:
        stage = args.command if not getattr(args, "action", None) else f"{args.command} {args.action}"
        print(f"error [{stage}]: {e}", file=sys.stderr)
        return EXIT_STAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
