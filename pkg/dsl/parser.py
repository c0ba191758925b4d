"""
定義語言的剖析器

    carrier Z mod 4;              # 或 carrier R; 或 carrier S3 = {e, a, b};
    group cyclic;                 # additive，或 table identity e { e: e a b; ... };
    subbase full;                 # trivial、bic，或 generated { indicator(0), ... };
    fn f = max(indicator(1), const(1/2^1));
    set C = {0, 2};               # 或 set O = positive(f); set Z0 = zeros(f);
"""
from typing import List, Optional

import pyparsing as pp

from bishop.errors import DslSyntaxError, SemanticError
from dsl.definition import (
    CarrierDecl, CarrierKind, Definition, Expr, FnDecl, GroupDecl, GroupKind, SetDecl, SubbaseDecl,
    SubbaseKind, TableRow,
)


def _setup():
    LPAREN, RPAREN = pp.Suppress("("), pp.Suppress(")")
    LBRACE, RBRACE = pp.Suppress("{"), pp.Suppress("}")
    COLON, SEMI, EQ = pp.Suppress(":"), pp.Suppress(";"), pp.Suppress("=")

    identifier = pp.Word(pp.alphas + "_", pp.alphanums + "_")
    integer = pp.Regex(r"\d+").set_parse_action(lambda t: int(t[0]))
    # 只接受 p 或 p/2^k
    dyadic = pp.Regex(r"-?\d+(/2\^\d+)?")
    point = dyadic | identifier
    points = pp.Group(LBRACE + pp.Optional(pp.DelimitedList(point)) + RBRACE)

    expression = pp.Forward()
    entry = (point + COLON + dyadic).set_parse_action(lambda t: Expr.entry(t[0], t[1]))
    call = (identifier + LPAREN + pp.Optional(pp.DelimitedList(entry | expression)) + RPAREN) \
        .set_parse_action(lambda t: Expr.call(t[0], *t[1:]))
    number = dyadic.copy().set_parse_action(lambda t: Expr.number(t[0]))
    name = identifier.copy().set_parse_action(lambda t: Expr.name(t[0]))
    expression <<= call | number | name

    carrier_body = (
        (pp.Keyword("Z") + pp.Keyword("mod") + integer)
        .set_parse_action(lambda t: CarrierDecl(kind=CarrierKind.CYCLIC, name=f"Z{t[2]}", modulus=t[2]))
        | pp.Keyword("R").set_parse_action(lambda t: CarrierDecl(kind=CarrierKind.REALS, name="R"))
        | (identifier + EQ + points)
        .set_parse_action(lambda t: CarrierDecl(kind=CarrierKind.FINITE, name=t[0], points=list(t[1])))
    )
    carrier_stmt = pp.Keyword("carrier").suppress() - carrier_body - SEMI

    row = (point + COLON + pp.OneOrMore(point) + SEMI) \
        .set_parse_action(lambda t: TableRow(row=t[0], entries=list(t[1:])))
    group_body = (
        pp.Keyword("cyclic").set_parse_action(lambda t: GroupDecl(kind=GroupKind.CYCLIC))
        | pp.Keyword("additive").set_parse_action(lambda t: GroupDecl(kind=GroupKind.ADDITIVE))
        | (pp.Keyword("table").suppress() + pp.Keyword("identity").suppress() + point
           + LBRACE + pp.OneOrMore(row) + RBRACE)
        .set_parse_action(lambda t: GroupDecl(kind=GroupKind.TABLE, identity=t[0], rows=list(t[1:])))
    )
    group_stmt = pp.Keyword("group").suppress() - group_body - SEMI

    subbase_body = (
        (pp.Keyword("generated").suppress() + LBRACE + pp.DelimitedList(expression) + RBRACE)
        .set_parse_action(lambda t: SubbaseDecl(kind=SubbaseKind.GENERATED, exprs=list(t)))
        | pp.one_of("full trivial bic", as_keyword=True)
        .set_parse_action(lambda t: SubbaseDecl(kind=SubbaseKind(t[0])))
    )
    subbase_stmt = pp.Keyword("subbase").suppress() - subbase_body - SEMI

    fn_stmt = (pp.Keyword("fn").suppress() - identifier - EQ - expression - SEMI) \
        .set_parse_action(lambda t: FnDecl(name=t[0], expr=t[1]))
    set_stmt = (pp.Keyword("set").suppress() - identifier - EQ - (points | expression) - SEMI) \
        .set_parse_action(lambda t: SetDecl(name=t[0], points=list(t[1]), expr=None)
                          if isinstance(t[1], pp.ParseResults) else SetDecl(name=t[0], expr=t[1]))

    statement = carrier_stmt | group_stmt | subbase_stmt | fn_stmt | set_stmt
    program = pp.ZeroOrMore(statement)
    program.ignore(pp.python_style_comment)
    return program


PARSER = _setup()


def _single(items: List, what: str, required: bool = True):
    if len(items) > 1:
        raise SemanticError(what, "重複宣告")
    if not items:
        if required:
            raise SemanticError(what, "缺少宣告")
        return None
    return items[0]


def _check_names(decls: List, what: str):
    seen = set()
    for decl in decls:
        if decl.name in seen:
            raise SemanticError(decl.name, f"{what} 名稱重複")
        seen.add(decl.name)


def parse(text: str) -> Definition:
    """
    剖析定義文字

    Raises:
        DslSyntaxError: 語法錯誤（附行、列位置）
        SemanticError: 宣告缺漏或重複
    """
    try:
        statements = PARSER.parse_string(text, parse_all=True)
    except pp.ParseBaseException as e:
        raise DslSyntaxError(e.lineno, e.col, e.msg) from e
    carriers = [s for s in statements if isinstance(s, CarrierDecl)]
    groups = [s for s in statements if isinstance(s, GroupDecl)]
    subbases = [s for s in statements if isinstance(s, SubbaseDecl)]
    fns = [s for s in statements if isinstance(s, FnDecl)]
    sets = [s for s in statements if isinstance(s, SetDecl)]
    _check_names(fns, "fn")
    _check_names(sets, "set")
    group: Optional[GroupDecl] = _single(groups, "group", required=False)
    return Definition(carrier=_single(carriers, "carrier"), group=group,
                      subbase=_single(subbases, "subbase"), fns=fns, sets=sets)


def parse_file(path: str) -> Definition:
    with open(path, "r", encoding="utf-8") as f:
        return parse(f.read())
