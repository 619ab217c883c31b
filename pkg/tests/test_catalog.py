from tepmon import catalog
from tepmon.catalog import VariableKind


def test_catalog_has_52_entries():
    entries = catalog.variable_catalog()
    assert len(entries) == 52


def test_measured_manipulated_partition():
    entries = catalog.variable_catalog()
    measured = [d for d in entries if d.kind is VariableKind.MEASURED]
    manipulated = [d for d in entries if d.kind is VariableKind.MANIPULATED]
    assert len(measured) == 41
    assert len(manipulated) == 11
    # measured entries come first
    assert all(d.id < 41 for d in measured)


def test_ids_contiguous_from_zero():
    entries = catalog.variable_catalog()
    assert [d.id for d in entries] == list(range(52))


def test_tags_unique():
    tags = [d.tag for d in catalog.variable_catalog()]
    assert len(set(tags)) == 52


def test_reactor_pressure_descriptor():
    d = catalog.descriptor(6)
    assert d.name == "Reactor Pressure"
    assert d.kind is VariableKind.MEASURED
    assert d.tag == "XMEAS(7)"


def test_lookup_by_name():
    d = catalog.by_name("A and C Feed Load")
    assert d.kind is VariableKind.MANIPULATED
    assert d.tag == "XMV(4)"


def test_catalog_json_shape():
    doc = catalog.catalog_json()
    assert len(doc) == 52
    assert doc[0] == {
        "id": 0,
        "tag": "XMEAS(1)",
        "name": "A Feed Rate",
        "unit": "kscmh",
        "kind": "measured",
    }
