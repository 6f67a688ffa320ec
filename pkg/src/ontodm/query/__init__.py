from .engine import ResultTable, compare, evaluate, order_key
from .parser import (Comparison, Query, QuerySyntaxError, UnknownPrefixError, ValuesClause,
                     parse_query)

__all__ = [
    "Comparison", "Query", "QuerySyntaxError", "ResultTable", "UnknownPrefixError",
    "ValuesClause", "compare", "evaluate", "order_key", "parse_query",
]
