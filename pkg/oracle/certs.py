"""有限載體上的證書建構 - 指示函數、任意函數與態射的提升證書"""
from typing import Any, Callable, Dict, List, Optional

from bishop.errors import MissingCert
from bishop.exactreal import ZERO, Dyadic
from bishop.space import (
    CertFn, Const, FromSubbase, PointFn, Sum, TopCert, Topology, TopologyKind,
    cert_min, cert_scale, substitute,
)


def shift_indices(cert: TopCert, offset: int, size: int) -> TopCert:
    """因子拓撲的證書搬到乘積拓撲：索引加上 offset"""
    return substitute(cert, [FromSubbase(index=offset + i) for i in range(size)])


def _is_indicator_of(fn: PointFn, point: Any, elements: List[Any]) -> bool:
    for x in elements:
        value = fn(x).exact
        expected = Dyadic(1) if x == point else ZERO
        if value is None or value != expected:
            return False
    return True


def indicator_cert(topology: Topology, point: Any) -> Optional[TopCert]:
    """
    單點指示函數 1_{point} 的證書

    完全拓撲中直接找子基底成員；乘積拓撲中為兩個因子指示函數的 ∧。
    找不到時回傳 None（例如平凡拓撲）。
    """
    carrier = topology.carrier
    elements = carrier.elements()
    if topology.kind == TopologyKind.PRODUCT:
        left, right = topology.factors
        a = indicator_cert(left, point[0])
        b = indicator_cert(right, point[1])
        if a is None or b is None:
            return None
        return cert_min(shift_indices(a, 0, len(left.subbase)),
                        shift_indices(b, len(left.subbase), len(right.subbase)))
    if len(elements) == 1:
        return Const(value=Dyadic(1))
    for index, fn in enumerate(topology.subbase):
        if _is_indicator_of(fn, point, elements):
            return FromSubbase(index=index)
    return None


def finite_fn_cert(values: Dict[Any, Dyadic], topology: Topology) -> TopCert:
    """
    有限載體上任意函數的證書：常數直接用 Const，否則 Σ v(x)·1_x

    Raises:
        MissingCert: 拓撲沒有所需的指示函數
    """
    distinct = set(values.values())
    if len(distinct) == 1:
        return Const(value=next(iter(distinct)))
    cert: Optional[TopCert] = None
    for point, value in values.items():
        if value == ZERO:
            continue
        indicator = indicator_cert(topology, point)
        if indicator is None:
            raise MissingCert(f"indicator({topology.carrier.label(point)})", topology.name)
        term = indicator if value == Dyadic(1) else cert_scale(value, indicator)
        cert = term if cert is None else Sum(left=cert, right=term)
    return cert if cert is not None else Const(value=ZERO)


def _exact_values(fn: Callable[[Any], Any], elements: List[Any], name: str) -> Dict[Any, Dyadic]:
    values = {}
    for x in elements:
        value = fn(x).exact
        if value is None:
            raise MissingCert(name)
        values[x] = value
    return values


def finite_cert_fn(fn: PointFn, topology: Topology) -> CertFn:
    """任意有限點函數連同其證書"""
    values = _exact_values(fn, topology.carrier.elements(), fn.name)
    return CertFn(fn, finite_fn_cert(values, topology), topology)


def table_fn(topology: Topology, name: str, table: Dict[Any, Any]) -> CertFn:
    """依值表建立的帶證書函數"""
    return finite_cert_fn(PointFn.from_table(name, table), topology)


def indicator_fn(topology: Topology, point: Any) -> CertFn:
    label = topology.carrier.label(point)
    fn = PointFn.indicator(point, f"indicator({label})")
    cert = indicator_cert(topology, point)
    if cert is None:
        raise MissingCert(fn.name, topology.name)
    return CertFn(fn, cert, topology)


def finite_lift_certs(fn: Callable[[Any], Any], dom: Topology, cod: Topology) -> List[TopCert]:
    """有限定義域上映射的每個 g₀ ∘ h 證書"""
    elements = dom.carrier.elements()
    certs = []
    for g0 in cod.subbase:
        lifted = PointFn(f"{g0.name}∘h", lambda x, g0=g0: g0(fn(x)))
        certs.append(finite_fn_cert(_exact_values(lifted, elements, g0.name), dom))
    return certs

