"""定義的正規文字形式；parse(print_definition(d)) == d"""
from typing import List

from dsl.definition import CarrierKind, Definition, Expr, ExprKind, GroupDecl, GroupKind, SubbaseKind


def print_expr(expr: Expr) -> str:
    if expr.kind == ExprKind.CALL:
        return f"{expr.head}({', '.join(print_expr(a) for a in expr.args)})"
    if expr.kind == ExprKind.ENTRY:
        return f"{expr.head}: {expr.value}"
    return expr.value


def _points(points: List[str]) -> str:
    return "{" + ", ".join(points) + "}"


def _group(group: GroupDecl) -> List[str]:
    if group.kind != GroupKind.TABLE:
        return [f"group {group.kind.value};"]
    lines = [f"group table identity {group.identity} {{"]
    lines += [f"    {row.row}: {' '.join(row.entries)};" for row in group.rows]
    lines.append("};")
    return lines


def print_definition(definition: Definition) -> str:
    carrier = definition.carrier
    if carrier.kind == CarrierKind.CYCLIC:
        lines = [f"carrier Z mod {carrier.modulus};"]
    elif carrier.kind == CarrierKind.REALS:
        lines = ["carrier R;"]
    else:
        lines = [f"carrier {carrier.name} = {_points(carrier.points)};"]
    if definition.group is not None:
        lines += _group(definition.group)
    subbase = definition.subbase
    if subbase.kind == SubbaseKind.GENERATED:
        lines.append(f"subbase generated {{{', '.join(print_expr(e) for e in subbase.exprs)}}};")
    else:
        lines.append(f"subbase {subbase.kind.value};")
    lines += [f"fn {fn.name} = {print_expr(fn.expr)};" for fn in definition.fns]
    for item in definition.sets:
        body = _points(item.points) if item.points is not None else print_expr(item.expr)
        lines.append(f"set {item.name} = {body};")
    return "\n".join(lines) + "\n"
