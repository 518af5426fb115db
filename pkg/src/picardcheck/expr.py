"""Safe arithmetic expressions for maps and modulus functions.

Map expressions use coordinates x1..xk; vector maps separate components with
';'. Only arithmetic, a few math functions and the constants pi and e are
accepted.
"""

from __future__ import annotations

import ast
import math

from .maps import MapUnderTest
from .metric import MetricSpaceHandle
from .modulus import BUILTIN_NAMES, ModulusFunction, builtin

FUNCTIONS = {
    "abs": abs, "sqrt": math.sqrt, "exp": math.exp, "log": math.log, "sin": math.sin, "cos": math.cos,
    "tan": math.tan, "atan": math.atan, "tanh": math.tanh, "min": min, "max": max, "floor": math.floor,
}
CONSTANTS = {"pi": math.pi, "e": math.e}
_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


class ExpressionError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        super().__init__(message if position is None else f"{message} at position {position}")


def _parse(text: str, offset: int = 0) -> ast.Expression:
    text = text.strip()
    try:
        return ast.parse(text, mode="eval")
    except SyntaxError as exc:
        pos = exc.offset if exc.offset and exc.offset <= len(text) else len(text) + 1
        raise ExpressionError("syntax error", offset + pos) from None


def _validate(tree: ast.AST, variables: set[str]) -> None:
    for node in ast.walk(tree):
        if isinstance(node, (ast.Expression, ast.Load)) or isinstance(node, _BINOPS):
            continue
        if isinstance(node, (ast.USub, ast.UAdd)):
            continue
        if isinstance(node, ast.BinOp):
            if not isinstance(node.op, _BINOPS):
                raise ExpressionError(f"operator {type(node.op).__name__} not allowed", node.col_offset + 1)
            continue
        if isinstance(node, ast.UnaryOp):
            if not isinstance(node.op, (ast.USub, ast.UAdd)):
                raise ExpressionError("only unary + and - are allowed", node.col_offset + 1)
            continue
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
                raise ExpressionError("only numeric constants are allowed", node.col_offset + 1)
            continue
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS or node.keywords:
                raise ExpressionError("unknown function", node.col_offset + 1)
            continue
        if isinstance(node, ast.Name):
            if node.id not in variables and node.id not in CONSTANTS and node.id not in FUNCTIONS:
                raise ExpressionError(f"unknown identifier {node.id!r}", node.col_offset + 1)
            continue
        raise ExpressionError(f"{type(node).__name__} not allowed", getattr(node, "col_offset", 0) + 1)


def compile_components(text: str, variables: list[str]):
    """Compile ';'-separated components into one code object returning a tuple."""
    parts, offsets, start = [], [], 0
    for piece in text.split(";"):
        parts.append(piece)
        offsets.append(start)
        start += len(piece) + 1
    trees = []
    for piece, off in zip(parts, offsets):
        if not piece.strip():
            raise ExpressionError("empty component", off + 1)
        lead = len(piece) - len(piece.lstrip())
        tree = _parse(piece, off + lead)
        _validate(tree, set(variables))
        trees.append(tree.body)
    tup = ast.Expression(body=ast.Tuple(elts=trees, ctx=ast.Load()))
    ast.fix_missing_locations(tup)
    return compile(tup, "<expression>", "eval"), len(trees)


def parse_map_expression(text: str, space: MetricSpaceHandle, name: str | None = None) -> MapUnderTest:
    """Build a pure map from an expression such as ``"x1/2 + 1/x1"``."""
    variables = [f"x{i + 1}" for i in range(space.dimension)]
    code, n = compile_components(text, variables)
    if n != space.dimension:
        raise ExpressionError(f"expression has {n} components but the space has dimension {space.dimension}")
    env_base = {"__builtins__": {}, **FUNCTIONS, **CONSTANTS}

    def apply(x):
        env = dict(env_base)
        env.update(zip(variables, x))
        return tuple(float(v) for v in eval(code, env))

    return MapUnderTest(space, apply, name or text, expression=text)


def parse_modulus(text: str) -> ModulusFunction:
    """Parse a modulus description: a builtin name, a call such as ``scaled(0.4, app4_F)``,
    or an arithmetic expression in ``t`` such as ``"0.75*t"``."""
    tree = _parse(text).body
    if isinstance(tree, ast.Name) and tree.id in BUILTIN_NAMES:
        return builtin(tree.id)
    if isinstance(tree, ast.Call) and isinstance(tree.func, ast.Name) and tree.func.id in BUILTIN_NAMES:
        args = []
        for a in tree.args:
            if isinstance(a, (ast.Name, ast.Call)) and _names_builtin(a):
                args.append(parse_modulus(ast.unparse(a)))
            else:
                code, _ = compile_components(ast.unparse(a), [])
                args.append(float(eval(code, {"__builtins__": {}, **FUNCTIONS, **CONSTANTS})[0]))
        return builtin(tree.func.id, *args)
    code, n = compile_components(text, ["t"])
    if n != 1:
        raise ExpressionError("a modulus expression has exactly one component")
    env_base = {"__builtins__": {}, **FUNCTIONS, **CONSTANTS}

    def ev(t):
        env = dict(env_base)
        env["t"] = t
        return float(eval(code, env)[0])

    return ModulusFunction(text.strip(), ev, "none", False)


def _names_builtin(node: ast.AST) -> bool:
    if isinstance(node, ast.Name):
        return node.id in BUILTIN_NAMES
    return isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in BUILTIN_NAMES
