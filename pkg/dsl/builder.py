"""由定義建立載體、拓撲、群、具名函數與具名集合"""
from typing import Any, Callable, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from bishop.errors import SemanticError
from bishop.exactreal import (
    Dyadic, ExactReal, RealFn, fn_abs, fn_clamp, fn_compose, fn_const, fn_id, fn_max, fn_min, fn_neg,
    fn_scale, fn_shift, fn_sum,
)
from bishop.group import (
    BishopGroup, GroupStructure, cyclic_structure, make_full_group, make_reals_group, make_trivial_group,
    table_structure,
)
from bishop.nbhd import Subset, finite_subset, u_set, zero_set
from bishop.space import (
    Carrier, CertFn, PointFn, Topology, bic_topology, finite_carrier, full_topology, generated_topology,
    reals_carrier, trivial_topology,
)
from dsl.definition import (
    CarrierKind, Definition, Expr, ExprKind, GroupDecl, GroupKind, SetDecl, SubbaseKind,
)
from dsl.parser import parse_file
from dsl.printer import print_expr
from oracle.certs import indicator_fn, table_fn
from oracle.family import ProbeFamily, build_family


class Workspace(BaseModel):
    """定義的執行期形式"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    definition: Definition
    carrier: Carrier
    topology: Topology
    group: Optional[BishopGroup] = None
    fns: Dict[str, CertFn] = Field(default_factory=dict)
    sets: Dict[str, Subset] = Field(default_factory=dict)

    def point(self, token: Any) -> Any:
        return parse_point(self.carrier, self.definition, str(token))

    def fn(self, name: str) -> CertFn:
        if name not in self.fns:
            raise SemanticError(name, "未定義的函數")
        return self.fns[name]

    def subset(self, spec: str) -> Subset:
        """具名集合，或 {p, q} 形式的列舉集合"""
        spec = spec.strip()
        if spec.startswith("{") and spec.endswith("}"):
            tokens = [t.strip() for t in spec[1:-1].split(",") if t.strip()]
            return finite_subset(self.carrier, [self.point(t) for t in tokens], spec.replace(" ", ""))
        if spec not in self.sets:
            raise SemanticError(spec, "未定義的集合")
        return self.sets[spec]

    def require_group(self) -> BishopGroup:
        if self.group is None:
            raise SemanticError("group", "此定義沒有群結構")
        return self.group

    def family(self, depth: int = 3, cap: int = 64, probes: int = 32, seed: int = 0,
               radius: int = 4) -> ProbeFamily:
        return build_family(self.topology, depth, cap, probes, seed, radius)

    def summary(self) -> Dict[str, Any]:
        return {
            "carrier": self.carrier.name,
            "topology": self.topology.name,
            "group": self.group.name if self.group else None,
            "subbase": [g.name for g in self.topology.subbase],
            "fns": sorted(self.fns),
            "sets": {name: s.label() for name, s in sorted(self.sets.items())},
        }


# ---------------------------------------------------------------------------
# 點與載體
# ---------------------------------------------------------------------------


def parse_point(carrier: Carrier, definition: Definition, token: str) -> Any:
    decl = definition.carrier
    try:
        if decl.kind == CarrierKind.CYCLIC:
            value = int(token)
            if not 0 <= value < decl.modulus:
                raise ValueError
            return value
        if decl.kind == CarrierKind.REALS:
            return ExactReal.of(Dyadic.parse(token))
    except ValueError:
        raise SemanticError(token, f"不是 {carrier.name} 的點")
    if token not in decl.points:
        raise SemanticError(token, f"不是 {carrier.name} 的點")
    return token


def _carrier(definition: Definition) -> Carrier:
    decl = definition.carrier
    if decl.kind == CarrierKind.CYCLIC:
        if decl.modulus < 1:
            raise SemanticError(decl.name, "模數必須 ≥ 1")
        return finite_carrier(decl.name, range(decl.modulus))
    if decl.kind == CarrierKind.REALS:
        return reals_carrier()
    try:
        return finite_carrier(decl.name, decl.points)
    except ValueError as e:
        raise SemanticError(decl.name, str(e))


def _structure(group: GroupDecl, carrier: Carrier, definition: Definition) -> GroupStructure:
    kind = definition.carrier.kind
    if group.kind == GroupKind.CYCLIC:
        if kind != CarrierKind.CYCLIC:
            raise SemanticError("cyclic", "cyclic 群需要 Z mod n 載體")
        return cyclic_structure(definition.carrier.modulus)
    if group.kind == GroupKind.ADDITIVE:
        if kind != CarrierKind.REALS:
            raise SemanticError("additive", "additive 群需要 R 載體")
        return make_reals_group().structure
    elements = carrier.elements() if carrier.is_finite else []
    if not elements:
        raise SemanticError("table", "乘法表需要有限載體")
    point = lambda t: parse_point(carrier, definition, t)
    rows = {point(r.row): [point(e) for e in r.entries] for r in group.rows}
    if set(rows) != set(elements):
        raise SemanticError("table", "乘法表的列必須恰好涵蓋載體")
    table = {}
    for a, entries in rows.items():
        if len(entries) != len(elements):
            raise SemanticError(str(a), "乘法表的列長度與載體不符")
        for b, value in zip(elements, entries):
            table[(a, b)] = value
    return table_structure(definition.carrier.name, elements, table, point(group.identity))


# ---------------------------------------------------------------------------
# 運算式
# ---------------------------------------------------------------------------


def _arity(expr: Expr, n: int) -> List[Expr]:
    if len(expr.args) != n:
        raise SemanticError(expr.head, f"需要 {n} 個參數，得到 {len(expr.args)} 個")
    return expr.args


def _literal(expr: Expr) -> Dyadic:
    if expr.kind != ExprKind.NUMBER:
        raise SemanticError(print_expr(expr), "需要二進分數字面值")
    return Dyadic.parse(expr.value)


def realfn_of(expr: Expr) -> RealFn:
    """ℝ → ℝ 的組合子運算式"""
    if expr.kind == ExprKind.NUMBER:
        return fn_const(_literal(expr))
    if expr.kind == ExprKind.NAME:
        if expr.value != "id":
            raise SemanticError(expr.value, "實函數中只能使用 id")
        return fn_id()
    if expr.kind != ExprKind.CALL:
        raise SemanticError(print_expr(expr), "不是實函數")
    head = expr.head
    if head == "const":
        return fn_const(_literal(_arity(expr, 1)[0]))
    if head in ("abs", "neg"):
        inner = realfn_of(_arity(expr, 1)[0])
        return fn_abs(inner) if head == "abs" else fn_neg(inner)
    if head in ("sum", "max", "min", "compose"):
        left, right = (realfn_of(a) for a in _arity(expr, 2))
        return {"sum": fn_sum, "max": fn_max, "min": fn_min, "compose": fn_compose}[head](left, right)
    if head in ("scale", "shift"):
        a, inner = _arity(expr, 2)
        return (fn_scale if head == "scale" else fn_shift)(_literal(a), realfn_of(inner))
    if head == "clamp":
        lo, hi, inner = _arity(expr, 3)
        return fn_clamp(_literal(lo), _literal(hi), realfn_of(inner))
    raise SemanticError(head, "未知的實函數")


class _Interpreter:
    """運算式 → 帶證書函數（或產生子基底用的原始點函數）"""

    def __init__(self, workspace: Workspace):
        self.ws = workspace

    def point(self, token: str) -> Any:
        return self.ws.point(token)

    def table_values(self, expr: Expr) -> Dict[Any, Dyadic]:
        values = {}
        for entry in expr.args:
            if entry.kind != ExprKind.ENTRY:
                raise SemanticError("table", "項目格式為 點: 值")
            values[self.point(entry.head)] = Dyadic.parse(entry.value)
        missing = [x for x in self.ws.carrier.elements() if x not in values]
        if missing:
            raise SemanticError("table", f"缺少點 {missing}")
        return values

    def cert(self, expr: Expr) -> CertFn:
        topology = self.ws.topology
        if expr.kind == ExprKind.NUMBER:
            return topology.constant(_literal(expr))
        if expr.kind == ExprKind.NAME:
            if expr.value in self.ws.fns:
                return self.ws.fns[expr.value]
            for index, g in enumerate(topology.subbase):
                if g.name == expr.value:
                    return topology.leaf(index)
            raise SemanticError(expr.value, "未定義的名稱")
        if expr.kind != ExprKind.CALL:
            raise SemanticError(print_expr(expr), "不是函數運算式")
        head = expr.head
        if head == "const":
            return topology.constant(_literal(_arity(expr, 1)[0]))
        if head == "base":
            index = _literal(_arity(expr, 1)[0])
            return topology.leaf(int(index.to_fraction()))
        if head == "indicator":
            return indicator_fn(topology, self.point(print_expr(_arity(expr, 1)[0])))
        if head == "table":
            return table_fn(topology, print_expr(expr), self.table_values(expr))
        if head == "abs":
            return abs(self.cert(_arity(expr, 1)[0]))
        if head == "neg":
            return -self.cert(_arity(expr, 1)[0])
        if head in ("sum", "max", "min"):
            left, right = (self.cert(a) for a in _arity(expr, 2))
            return {"sum": left.__add__, "max": left.maximum, "min": left.minimum}[head](right)
        if head in ("scale", "shift"):
            a, inner = _arity(expr, 2)
            item = self.cert(inner)
            return item.scale(_literal(a)) if head == "scale" else item.shift(_literal(a))
        if head == "clamp":
            lo, hi, inner = _arity(expr, 3)
            return self.cert(inner).then(fn_clamp(_literal(lo), _literal(hi)))
        if head == "compose":
            phi, inner = _arity(expr, 2)
            return self.cert(inner).then(realfn_of(phi))
        raise SemanticError(head, "未知的函數")

    def raw(self, expr: Expr) -> PointFn:
        """產生子基底的成員：沒有證書，只有點值"""
        name = print_expr(expr)
        if expr.kind == ExprKind.NUMBER:
            return PointFn.constant(_literal(expr))
        if expr.kind == ExprKind.NAME:
            if expr.value != "id" or self.ws.carrier.is_finite:
                raise SemanticError(expr.value, "子基底中只能使用 id（ℝ 上）")
            return PointFn("id", lambda x: ExactReal.of(x))
        head = expr.head
        if head == "const":
            return PointFn.constant(_literal(_arity(expr, 1)[0]))
        if head == "indicator":
            return PointFn.indicator(self.point(print_expr(_arity(expr, 1)[0])), name)
        if head == "table":
            return PointFn.from_table(name, self.table_values(expr))
        if head in ("abs", "neg"):
            f = self.raw(_arity(expr, 1)[0])
            op: Callable = abs if head == "abs" else (lambda v: -v)
            return PointFn(name, lambda x: op(f(x)))
        if head in ("sum", "max", "min"):
            f, g = (self.raw(a) for a in _arity(expr, 2))
            ops = {"sum": lambda a, b: a + b, "max": lambda a, b: a.maximum(b), "min": lambda a, b: a.minimum(b)}
            op2 = ops[head]
            return PointFn(name, lambda x: op2(f(x), g(x)))
        if head in ("scale", "shift", "clamp", "compose"):
            if head == "compose":
                phi, inner = realfn_of(_arity(expr, 2)[0]), expr.args[1]
            elif head == "clamp":
                lo, hi, inner = _arity(expr, 3)
                phi = fn_clamp(_literal(lo), _literal(hi))
            else:
                a, inner = _arity(expr, 2)
                phi = fn_scale(_literal(a)) if head == "scale" else fn_shift(_literal(a))
            return self.raw(inner).then(phi)
        raise SemanticError(head, "未知的函數")


# ---------------------------------------------------------------------------
# 建構
# ---------------------------------------------------------------------------


def _topology_and_group(definition: Definition, carrier: Carrier, workspace_stub: Workspace):
    kind = definition.subbase.kind
    structure = _structure(definition.group, carrier, definition) if definition.group else None
    if kind in (SubbaseKind.FULL, SubbaseKind.TRIVIAL) and not carrier.is_finite:
        raise SemanticError(kind.value, "完全與平凡拓撲只用於有限載體")
    if kind == SubbaseKind.FULL:
        if structure is None:
            return full_topology(carrier), None
        group = make_full_group(structure, carrier)
        return group.topology, group
    if kind == SubbaseKind.TRIVIAL:
        if structure is None:
            return trivial_topology(carrier), None
        group = make_trivial_group(structure, carrier)
        return group.topology, group
    if kind == SubbaseKind.BIC:
        if carrier.is_finite:
            raise SemanticError("bic", "Bic(R) 需要 R 載體")
        if structure is None:
            return bic_topology(carrier), None
        group = make_reals_group()
        return group.topology, group
    if structure is not None:
        raise SemanticError("generated", "產生的子基底不附群結構")
    interpreter = _Interpreter(workspace_stub)
    subbase = [interpreter.raw(e) for e in definition.subbase.exprs]
    return generated_topology(carrier, subbase), None


def _set(item: SetDecl, workspace: Workspace, interpreter: _Interpreter) -> Subset:
    if item.points is not None:
        return finite_subset(workspace.carrier, [workspace.point(p) for p in item.points], item.name)
    expr = item.expr
    if expr.kind != ExprKind.CALL or expr.head not in ("positive", "zeros"):
        raise SemanticError(item.name, "集合必須是 {…}、positive(f) 或 zeros(f)")
    f = interpreter.cert(_arity(expr, 1)[0])
    built = u_set(f) if expr.head == "positive" else zero_set(f)
    return built.model_copy(update={"name": item.name})


def build(definition: Definition) -> Workspace:
    """
    Raises:
        SemanticError: 名稱無法解析或宣告不一致
        InvalidTable: 乘法表不是群
        MissingCert: 函數不在拓撲中（例如平凡拓撲上的指示函數）
    """
    carrier = _carrier(definition)
    stub = Workspace(definition=definition, carrier=carrier, topology=trivial_topology(carrier))
    topology, group = _topology_and_group(definition, carrier, stub)
    workspace = Workspace(definition=definition, carrier=carrier, topology=topology, group=group)
    interpreter = _Interpreter(workspace)
    for decl in definition.fns:
        workspace.fns[decl.name] = interpreter.cert(decl.expr).renamed(decl.name)
    for item in definition.sets:
        workspace.sets[item.name] = _set(item, workspace, interpreter)
    return workspace


def load(path: str) -> Workspace:
    return build(parse_file(path))
