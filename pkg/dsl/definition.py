"""定義語言的資料模型"""
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field


class ExprKind(str, Enum):
    CALL = "call"
    NUMBER = "number"
    NAME = "name"
    ENTRY = "entry"


class Expr(BaseModel):
    """函數運算式：呼叫、二進字面值、名稱，或 table(...) 內的 p: d 項"""
    kind: ExprKind
    head: Optional[str] = None
    value: Optional[str] = None
    args: List["Expr"] = Field(default_factory=list)

    @classmethod
    def call(cls, head: str, *args: "Expr") -> "Expr":
        return cls(kind=ExprKind.CALL, head=head, args=list(args))

    @classmethod
    def number(cls, value: str) -> "Expr":
        return cls(kind=ExprKind.NUMBER, value=value)

    @classmethod
    def name(cls, value: str) -> "Expr":
        return cls(kind=ExprKind.NAME, value=value)

    @classmethod
    def entry(cls, key: str, value: str) -> "Expr":
        return cls(kind=ExprKind.ENTRY, head=key, value=value)


Expr.model_rebuild()


class CarrierKind(str, Enum):
    CYCLIC = "cyclic"
    REALS = "reals"
    FINITE = "finite"


class CarrierDecl(BaseModel):
    kind: CarrierKind
    name: str
    modulus: Optional[int] = None
    points: List[str] = Field(default_factory=list)


class GroupKind(str, Enum):
    CYCLIC = "cyclic"
    ADDITIVE = "additive"
    TABLE = "table"


class TableRow(BaseModel):
    """乘法表的一列：row ⋅ 欄位依載體順序"""
    row: str
    entries: List[str]


class GroupDecl(BaseModel):
    kind: GroupKind
    identity: Optional[str] = None
    rows: List[TableRow] = Field(default_factory=list)


class SubbaseKind(str, Enum):
    FULL = "full"
    TRIVIAL = "trivial"
    BIC = "bic"
    GENERATED = "generated"


class SubbaseDecl(BaseModel):
    kind: SubbaseKind
    exprs: List[Expr] = Field(default_factory=list)


class FnDecl(BaseModel):
    name: str
    expr: Expr


class SetDecl(BaseModel):
    """列舉的集合，或 positive(f) = U(f)、zeros(f) = ζ(f)"""
    name: str
    points: Optional[List[str]] = None
    expr: Optional[Expr] = None


class Definition(BaseModel):
    """一份定義：載體、群、子基底、具名函數與具名集合"""
    carrier: CarrierDecl
    group: Optional[GroupDecl] = None
    subbase: SubbaseDecl
    fns: List[FnDecl] = Field(default_factory=list)
    sets: List[SetDecl] = Field(default_factory=list)
