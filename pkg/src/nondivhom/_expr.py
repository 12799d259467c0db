"""Safe-ish parsing of scalar expressions into numpy callables."""

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import parse_expr, standard_transformations

_ALLOWED = {
    "sin": sp.sin, "cos": sp.cos, "tan": sp.tan, "exp": sp.exp, "log": sp.log,
    "sqrt": sp.sqrt, "pi": sp.pi, "Abs": sp.Abs, "abs": sp.Abs,
}


def parse(expr, varnames):
    """Parse ``expr`` with the given free symbol names; reject anything else."""
    symbols = {name: sp.Symbol(name, real=True) for name in varnames}
    local = dict(_ALLOWED)
    local.update(symbols)
    try:
        parsed = parse_expr(str(expr), local_dict=local, global_dict={"__builtins__": {},
                            "Integer": sp.Integer, "Float": sp.Float,
                            "Rational": sp.Rational, "Symbol": sp.Symbol},
                            transformations=standard_transformations, evaluate=True)
    except Exception as exc:  # sympy raises a zoo of exception types
        raise ValueError(f"cannot parse expression {expr!r}: {exc}") from exc
    extra = {s.name for s in parsed.free_symbols} - set(varnames)
    if extra:
        raise ValueError(f"unknown symbols {sorted(extra)} in {expr!r}")
    return parsed, [symbols[v] for v in varnames]


def compile_expression(expr, varnames):
    parsed, syms = parse(expr, varnames)
    f = sp.lambdify(syms, parsed, modules="numpy")

    def func(*coords):
        return np.broadcast_to(np.asarray(f(*coords), dtype=float), np.shape(coords[0]))

    return func
