"""Variable catalog for the Tennessee Eastman benchmark.

52 process variables: 41 sensor measurements (XMEAS) followed by 11
controller outputs (XMV).  The constant agitator-speed output of the
original flowsheet is excluded because it never varies in the recorded
data and would break standardization.
"""

from dataclasses import dataclass
from enum import Enum


class VariableKind(str, Enum):
    MEASURED = "measured"
    MANIPULATED = "manipulated"


@dataclass(frozen=True)
class VariableDescriptor:
    id: int
    tag: str
    name: str
    unit: str
    kind: VariableKind


_MEASURED = [
    ("A Feed Rate", "kscmh"),
    ("D Feed Rate", "kg/h"),
    ("E Feed Rate", "kg/h"),
    ("A and C Feed", "kscmh"),
    ("Recycle Flow", "kscmh"),
    ("Reactor Feed Rate", "kscmh"),
    ("Reactor Pressure", "kPa"),
    ("Reactor Level", "%"),
    ("Reactor Temperature", "degC"),
    ("Purge Rate", "kscmh"),
    ("Product Separator Temperature", "degC"),
    ("Product Separator Level", "%"),
    ("Product Separator Pressure", "kPa"),
    ("Product Separator Underflow", "m3/h"),
    ("Stripper Level", "%"),
    ("Stripper Pressure", "kPa"),
    ("Stripper Underflow", "m3/h"),
    ("Stripper Temperature", "degC"),
    ("Stripper Steam Flow", "kg/h"),
    ("Compressor Work", "kW"),
    ("Reactor Cooling Water Outlet Temperature", "degC"),
    ("Separator Cooling Water Outlet Temperature", "degC"),
    ("Component A to Reactor", "mol%"),
    ("Component B to Reactor", "mol%"),
    ("Component C to Reactor", "mol%"),
    ("Component D to Reactor", "mol%"),
    ("Component E to Reactor", "mol%"),
    ("Component F to Reactor", "mol%"),
    ("Component A in Purge", "mol%"),
    ("Component B in Purge", "mol%"),
    ("Component C in Purge", "mol%"),
    ("Component D in Purge", "mol%"),
    ("Component E in Purge", "mol%"),
    ("Component F in Purge", "mol%"),
    ("Component G in Purge", "mol%"),
    ("Component H in Purge", "mol%"),
    ("Component D in Product", "mol%"),
    ("Component E in Product", "mol%"),
    ("Component F in Product", "mol%"),
    ("Component G in Product", "mol%"),
    ("Component H in Product", "mol%"),
]

_MANIPULATED = [
    ("D Feed Load", "%"),
    ("E Feed Load", "%"),
    ("A Feed Load", "%"),
    ("A and C Feed Load", "%"),
    ("Compressor Recycle Valve", "%"),
    ("Purge Valve", "%"),
    ("Separator Liquid Load", "%"),
    ("Stripper Liquid Load", "%"),
    ("Stripper Steam Valve", "%"),
    ("Reactor Cooling Water Load", "%"),
    ("Condenser Cooling Water Load", "%"),
]

N_MEASURED = len(_MEASURED)
N_MANIPULATED = len(_MANIPULATED)
N_VARIABLES = N_MEASURED + N_MANIPULATED

_CATALOG: list[VariableDescriptor] = []
for _i, (_name, _unit) in enumerate(_MEASURED):
    _CATALOG.append(
        VariableDescriptor(_i, f"XMEAS({_i + 1})", _name, _unit, VariableKind.MEASURED)
    )
for _i, (_name, _unit) in enumerate(_MANIPULATED):
    _CATALOG.append(
        VariableDescriptor(
            N_MEASURED + _i, f"XMV({_i + 1})", _name, _unit, VariableKind.MANIPULATED
        )
    )

# canonical CSV column headers: xmeas_1..xmeas_41, xmv_1..xmv_11
CSV_COLUMNS = [f"xmeas_{i + 1}" for i in range(N_MEASURED)] + [
    f"xmv_{i + 1}" for i in range(N_MANIPULATED)
]


def variable_catalog() -> list[VariableDescriptor]:
    """The fixed 52-entry catalog, ids contiguous from 0."""
    return list(_CATALOG)


def descriptor(var_id: int) -> VariableDescriptor:
    return _CATALOG[var_id]


def by_name(name: str) -> VariableDescriptor:
    for d in _CATALOG:
        if d.name == name:
            return d
    raise KeyError(name)


def catalog_json() -> list[dict]:
    return [
        {"id": d.id, "tag": d.tag, "name": d.name, "unit": d.unit, "kind": d.kind.value}
        for d in _CATALOG
    ]
