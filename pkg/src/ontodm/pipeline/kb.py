"""Assembling the knowledge graph: LWO T-box, static A-box and the virtual observation view."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..kg.graph import Graph, UnionSource
from ..mapping import MappingRuleSet, VirtualView, bind_sources, materialize, parse_rules
from ..odp import Lwo, compose_lwo, load_alignments


@dataclass
class KnowledgeBase:
    lwo: Lwo
    ruleset: MappingRuleSet
    tables: dict
    static: Graph  # T-box plus materialized engineering knowledge
    view: VirtualView

    @property
    def source(self) -> UnionSource:
        return UnionSource(self.static, self.view)

    def materialized(self) -> Graph:
        """Everything, observations included, as one in-memory graph."""
        return self.static | materialize(self.ruleset, self.tables, modes=("virtual",))


def build_knowledge_base(odps, alignments_path, mapping_path, data_dir) -> KnowledgeBase:
    lwo = compose_lwo(odps, load_alignments(alignments_path))
    ruleset = parse_rules(mapping_path)
    tables = bind_sources(ruleset, Path(data_dir))
    static = lwo.tbox | materialize(ruleset, tables, modes=("static",))
    static.namespaces.update(ruleset.prefixes)
    return KnowledgeBase(lwo, ruleset, tables, static, VirtualView(ruleset, tables, ("virtual",)))
