"""Parameter files for rank-one systems.

A parameter file is a YAML mapping::

    name: chacon
    cutting: {kind: constant, value: 3}
    spacers: {kind: rule, values: ["0", "1", "0"]}

``cutting.kind`` is ``constant`` (``value``), ``list`` (``values``, one p_n
per stage) or ``rule`` (``expr``).  ``spacers.kind`` is ``table`` (``rows``,
one list per stage) or ``rule`` (``values``: one expression per column, or
``fill`` for every column with an optional ``last`` override).  Rule
expressions may use integer constants, ``n``, ``p_n`` (spacers only) and
``h_n`` combined with ``+`` and ``*``.
"""

from __future__ import annotations

import ast
from pathlib import Path
from typing import Any, Callable, Mapping

import yaml

from .errors import InvalidArgument, InvalidParameters
from .symbolic import RankOneParams, chacon, odometer, tripling_family

BUILTIN_SYSTEMS = {"chacon": chacon, "tripling": tripling_family, "odometer": odometer}


def compile_rule(expr: str | int, names: tuple[str, ...]) -> Callable[..., int]:
    """Compile a +/* integer expression over ``names`` into a function."""
    if isinstance(expr, int):
        return lambda **env: expr
    try:
        tree = ast.parse(str(expr), mode="eval")
    except SyntaxError as exc:
        raise InvalidArgument(f"bad rule expression {expr!r}") from exc

    def check(node):
        if isinstance(node, ast.Expression):
            check(node.body)
        elif isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Mult)):
            check(node.left)
            check(node.right)
        elif isinstance(node, ast.Constant) and isinstance(node.value, int) and node.value >= 0:
            pass
        elif isinstance(node, ast.Name) and node.id in names:
            pass
        else:
            raise InvalidArgument(f"rule {expr!r}: {ast.dump(node)} not allowed (use {names}, +, *)")

    check(tree)

    def ev(node, env):
        if isinstance(node, ast.BinOp):
            a, b = ev(node.left, env), ev(node.right, env)
            return a + b if isinstance(node.op, ast.Add) else a * b
        if isinstance(node, ast.Constant):
            return node.value
        return env[node.id]

    body = tree.body
    return lambda **env: ev(body, env)


def params_from_mapping(doc: Mapping[str, Any]) -> RankOneParams:
    if not isinstance(doc, Mapping):
        raise InvalidArgument("parameter document must be a mapping")
    name = str(doc.get("name", "rank-one"))
    cut = doc.get("cutting")
    spc = doc.get("spacers")
    if not isinstance(cut, Mapping) or not isinstance(spc, Mapping):
        raise InvalidArgument("parameter document needs 'cutting' and 'spacers' mappings")

    kind = cut.get("kind")
    if kind == "constant":
        value = int(cut["value"])
        cutting = lambda n, h: value  # noqa: E731
    elif kind == "list":
        values = [int(v) for v in cut["values"]]

        def cutting(n, h):
            if n >= len(values):
                raise InvalidParameters("cutting list exhausted", n)
            return values[n]

    elif kind == "rule":
        f = compile_rule(cut["expr"], ("n", "h_n"))
        cutting = lambda n, h: f(n=n, h_n=h)  # noqa: E731
    else:
        raise InvalidArgument(f"unknown cutting kind {kind!r}")

    kind = spc.get("kind")
    if kind == "table":
        rows = [[int(s) for s in row] for row in spc["rows"]]

        def spacers(n, p, h):
            if n >= len(rows):
                raise InvalidParameters("spacer table exhausted", n)
            return rows[n]

    elif kind == "rule":
        names = ("n", "p_n", "h_n")
        if "values" in spc:
            cols = [compile_rule(e, names) for e in spc["values"]]

            def spacers(n, p, h):
                return [c(n=n, p_n=p, h_n=h) for c in cols]

        elif "fill" in spc:
            fill = compile_rule(spc["fill"], names)
            last = compile_rule(spc["last"], names) if "last" in spc else fill

            def spacers(n, p, h):
                env = dict(n=n, p_n=p, h_n=h)
                return [fill(**env)] * (p - 1) + [last(**env)]

        else:
            raise InvalidArgument("spacer rule needs 'values' or 'fill'")
    else:
        raise InvalidArgument(f"unknown spacers kind {kind!r}")

    return RankOneParams(cutting, spacers, name)


def load_params(path: str | Path) -> RankOneParams:
    """Read a parameter file, or resolve a built-in system name."""
    if str(path) in BUILTIN_SYSTEMS:
        return BUILTIN_SYSTEMS[str(path)]()
    with open(path, encoding="utf-8") as fh:
        doc = yaml.safe_load(fh)
    return params_from_mapping(doc)


CHACON_DOC = """\
name: chacon
cutting: {kind: constant, value: 3}
spacers: {kind: rule, values: ["0", "1", "0"]}
"""

TRIPLING_DOC = """\
name: tripling
cutting: {kind: constant, value: 2}
spacers: {kind: rule, values: ["0", "h_n"]}
"""
