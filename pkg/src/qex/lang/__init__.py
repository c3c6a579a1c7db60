"""The WHILE language front end: parsing, printing, validation, unrolling."""
from .ast import (RETURN, AddrOf, And, Assign, BinOp, Block, BoolConst, DerefRead, DerefWrite,
                  If, Not, Num, Or, Param, Program, Rel, Var, While)
from .check import Violation, live_in, unroll, unroll_stmts, validate
from .parser import ParseError, parse, parse_expr, parse_pred
from .printer import print_expr, print_pred, print_program, print_stmt

__all__ = [
    "RETURN", "AddrOf", "And", "Assign", "BinOp", "Block", "BoolConst", "DerefRead",
    "DerefWrite", "If", "Not", "Num", "Or", "Param", "Program", "Rel", "Var", "While",
    "Violation", "live_in", "unroll", "unroll_stmts", "validate", "ParseError", "parse",
    "parse_expr", "parse_pred", "print_expr", "print_pred", "print_program", "print_stmt",
]
