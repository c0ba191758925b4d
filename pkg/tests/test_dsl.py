"""定義語言：剖析、正規列印與工作區建構"""
from pathlib import Path

import pytest

from bishop.errors import DslSyntaxError, InvalidTable, MissingCert, SemanticError
from bishop.exactreal import Dyadic, ExactReal
from bishop.space import TopologyKind
from dsl.builder import build
from dsl.definition import CarrierKind, ExprKind, GroupKind, SubbaseKind
from dsl.parser import parse, parse_file
from dsl.printer import print_definition

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def test_parse_cyclic_definition():
    definition = parse("""
        # 註解會被忽略
        carrier Z mod 4;
        group cyclic;
        subbase full;
        fn bump = max(indicator(1), const(1/2^1));
        set C = {0, 2};
        set O = positive(bump);
    """)
    assert definition.carrier.kind == CarrierKind.CYCLIC
    assert definition.carrier.modulus == 4
    assert definition.group.kind == GroupKind.CYCLIC
    assert definition.subbase.kind == SubbaseKind.FULL
    bump = definition.fns[0].expr
    assert bump.head == "max"
    assert bump.args[1].args[0].value == "1/2^1"
    assert definition.sets[0].points == ["0", "2"]
    assert definition.sets[1].expr.kind == ExprKind.CALL


def test_parse_table_group():
    definition = parse("carrier V = {e, a}; group table identity e { e: e a; a: a e; }; subbase full;")
    assert definition.group.identity == "e"
    assert [row.entries for row in definition.group.rows] == [["e", "a"], ["a", "e"]]


def test_syntax_error_reports_position():
    with pytest.raises(DslSyntaxError) as info:
        parse("carrier Z mod 4;\nsubbase full;\nfn f = ;\n")
    assert info.value.line == 3


def test_non_dyadic_literal_is_rejected():
    with pytest.raises(DslSyntaxError):
        parse("carrier R; subbase bic; fn f = const(1/3);")


@pytest.mark.parametrize("text", [
    "subbase full;",
    "carrier Z mod 2; carrier Z mod 3; subbase full;",
    "carrier Z mod 2; subbase full; set C = {0}; set C = {1};",
])
def test_declaration_errors(text):
    with pytest.raises(SemanticError):
        parse(text)


@pytest.mark.parametrize("path", sorted(FIXTURES.glob("*.bish")), ids=lambda p: p.stem)
def test_printer_is_canonical(path):
    definition = parse_file(str(path))
    text = print_definition(definition)
    assert parse(text) == definition
    assert print_definition(parse(text)) == text


@pytest.mark.parametrize("text, error", [
    ("carrier R; group cyclic; subbase bic;", SemanticError),
    ("carrier Z mod 2; subbase bic;", SemanticError),
    ("carrier R; subbase full;", SemanticError),
    ("carrier Z mod 2; subbase full; set C = {5};", SemanticError),
    ("carrier Z mod 2; subbase full; fn f = g;", SemanticError),
    ("carrier Z mod 2; subbase full; fn f = wave(id);", SemanticError),
    ("carrier Z mod 2; subbase trivial; fn f = indicator(0);", MissingCert),
    ("carrier V = {e, a}; group table identity e { e: e a; a: a a; }; subbase full;", InvalidTable),
    ("carrier V = {e, a}; group table identity e { e: e a; }; subbase full;", SemanticError),
    ("carrier X = {a, b}; group cyclic; subbase full;", SemanticError),
])
def test_build_errors(text, error):
    with pytest.raises(error):
        build(parse(text))


def test_build_reals_workspace(reals):
    assert reals.group is not None
    half = ExactReal.of(Dyadic(1, -1))
    assert reals.fn("tent")(half).exact == Dyadic(1, -1)
    assert reals.fn("shifted")(ExactReal.of(1)).exact == Dyadic(7, -1)
    assert reals.subset("Pos").contains(ExactReal.of(1))
    assert not reals.subset("Pos").contains(ExactReal.of(-1))
    assert reals.subset("Zeros").contains(ExactReal.of(0))
    assert reals.point("1/2^1").exact == Dyadic(1, -1)
    with pytest.raises(SemanticError):
        reals.fn("missing")
    with pytest.raises(SemanticError):
        reals.subset("Missing")


def test_workspace_summary(z4_full):
    summary = z4_full.summary()
    assert summary["carrier"] == "Z4"
    assert summary["subbase"] == ["indicator(0)", "indicator(1)", "indicator(2)", "indicator(3)"]
    assert summary["sets"]["C"] == "{0, 2}"
    assert "bump" in summary["fns"]


def test_inline_subset(z4_full):
    inline = z4_full.subset("{1, 3}")
    assert inline.points == (1, 3)
    assert inline.name == "{1,3}"


def test_s3_table(s3_full):
    group = s3_full.require_group()
    assert group.zero == "e"
    assert group.plus("r", "s") == "t"
    assert group.neg("r") == "q"


def test_generated_subbase(load_fixture):
    ws = load_fixture("generated")
    assert ws.topology.kind == TopologyKind.GENERATED
    assert [g.name for g in ws.topology.subbase] == ["indicator(a)", "table(a: 1, b: 1, c: 0)"]
    assert ws.group is None
    with pytest.raises(SemanticError):
        ws.require_group()
