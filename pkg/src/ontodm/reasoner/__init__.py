"""RDFS inference and shape validation."""

from .rules import ALL_RULES, ClosureError, Rule, consequences, parse_rules, rdfs_closure, size_bound
from .shapes import (UNBOUNDED, ConsistencyReport, ConstraintShape, ShapeError, Violation,
                     load_shapes, parse_shapes, validate)

__all__ = ["ALL_RULES", "ClosureError", "Rule", "consequences", "parse_rules", "rdfs_closure",
           "size_bound", "UNBOUNDED", "ConsistencyReport", "ConstraintShape", "ShapeError",
           "Violation", "load_shapes", "parse_shapes", "validate"]
