"""CSV-to-RDF mapping rules with materialized and virtual execution."""

from .dsl import (ROW_ID, ColumnObject, ColumnSpec, ConstantObject, DatatypeMismatchError,
                  LookupObject, MalformedTemplateError, MappingError, MappingRule, MappingRuleSet,
                  MappingSyntaxError, PoMap, TableSource, Template, TemplateObject,
                  TemplateResolutionError, UnknownColumnError, UnknownSourceError, parse_rules,
                  parse_rules_text)
from .engine import (RowMapper, ScanStats, Table, VirtualView, auto_literal, bind_sources,
                     map_row, materialize, virtual_view)

__all__ = [
    "ROW_ID", "ColumnObject", "ColumnSpec", "ConstantObject", "DatatypeMismatchError",
    "LookupObject", "MalformedTemplateError", "MappingError", "MappingRule", "MappingRuleSet",
    "MappingSyntaxError", "PoMap", "TableSource", "Template", "TemplateObject",
    "TemplateResolutionError", "UnknownColumnError", "UnknownSourceError", "parse_rules",
    "parse_rules_text", "RowMapper", "ScanStats", "Table", "VirtualView", "auto_literal",
    "bind_sources", "map_row", "materialize", "virtual_view",
]
