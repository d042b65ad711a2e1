from .catalog import CATALOG, catalog, catalog_names, catalog_schema
from .model import Direction, MultiIndex, Operator, OperatorError, symbol_matrix
from .parse import OperatorParseError, parse_dsl, parse_json, parse_operator
from .symbolic import adjoint, compound_matrix, operator_from_symbol, plane_slice, resultant_P, tangent_frame, wedge_power

__all__ = [
    "CATALOG",
    "Direction",
    "MultiIndex",
    "Operator",
    "OperatorError",
    "OperatorParseError",
    "adjoint",
    "catalog",
    "catalog_names",
    "catalog_schema",
    "compound_matrix",
    "operator_from_symbol",
    "parse_dsl",
    "parse_json",
    "parse_operator",
    "plane_slice",
    "resultant_P",
    "symbol_matrix",
    "tangent_frame",
    "wedge_power",
]
