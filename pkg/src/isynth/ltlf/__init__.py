"""LTLf syntax, semantics and progression."""
from isynth.ltlf.formula import (
    Context, Formula, atoms_of, is_propositional, simplify, size, to_str)
from isynth.ltlf.parser import Raw, parse, parse_formula, to_nnf
from isynth.ltlf.semantics import (
    as_assignment, as_trace, eval_empty, eval_trace, prog_step, prog_trace)

__all__ = [
    'Context', 'Formula', 'Raw', 'as_assignment', 'as_trace', 'atoms_of',
    'eval_empty', 'eval_trace', 'is_propositional', 'parse', 'parse_formula',
    'prog_step', 'prog_trace', 'simplify', 'size', 'to_nnf', 'to_str',
]
