"""Exact polynomials, rational functions and the expression language."""

from fractions import Fraction

from .parser import (BinOp, ExpressionError, ExpressionSyntaxError, Neg, NonIntegerExponentError, Num, Pow,
                     UnknownVariableError, Var, ZeroDenominatorError, evaluate_expression, parse_expression,
                     parse_rational_function, print_expression, to_rational_function)
from .polynomial import Polynomial, format_polynomial
from .ratfunc import (RationalFunction, SingularPointError, polynomial_divide_exact, polynomial_gcd,
                      polynomial_lcm)


def differentiate(f: RationalFunction, v: str) -> RationalFunction:
    if v not in f.variables:
        raise ValueError(f"{v!r} is not a variable of {f}")
    return f.diff(v)


def evaluate(f: RationalFunction, point) -> "Fraction":
    missing = [v for v in f.num.used_variables() + f.den.used_variables() if v not in point]
    if missing:
        raise KeyError(f"point does not assign {missing}")
    return f.evaluate(point)


__all__ = [
    "BinOp", "ExpressionError", "ExpressionSyntaxError", "Neg", "NonIntegerExponentError", "Num", "Pow",
    "Polynomial", "RationalFunction", "SingularPointError", "UnknownVariableError", "Var",
    "ZeroDenominatorError", "differentiate", "evaluate", "evaluate_expression", "format_polynomial",
    "parse_expression", "parse_rational_function", "polynomial_divide_exact", "polynomial_gcd",
    "polynomial_lcm", "print_expression", "to_rational_function",
]
