import numpy as np
import pytest

from fieldbench.geometry import (
    DISEASES,
    ConfigurationError,
    CropKind,
    Measurement,
    Owner,
    build_geometry,
    geometry_from_layout,
    relevance_mask,
    susceptibility_mask,
)


def test_miniberry_30_layout():
    g = build_geometry("miniberry-30")
    assert g.width == g.height == 30
    assert (g.owner == Owner.CLIENT).all()
    assert not np.isin(g.kind, [CropKind.POND, CropKind.WETLAND]).any()
    # vertical split: strawberries left, tomatoes right
    assert (g.kind[:, :15] == CropKind.STRAWBERRY).all()
    assert (g.kind[:, 15:] == CropKind.TOMATO).all()


def test_miniberry_10_partition_covers_square():
    g = build_geometry("miniberry-10")
    n_tomato = int((g.kind == CropKind.TOMATO).sum())
    n_straw = int((g.kind == CropKind.STRAWBERRY).sum())
    assert n_tomato + n_straw == 100


def test_waterberry_dimensions_and_neighbors():
    g = build_geometry("waterberry")
    assert (g.width, g.height) == (6000, 5000)
    for owner in (Owner.NEIGHBOR1, Owner.NEIGHBOR2, Owner.NEIGHBOR3, Owner.NEIGHBOR4):
        assert (g.owner == owner).any()
    # client farm confined to [1000, 5000) x [1000, 4000)
    client = g.owner == Owner.CLIENT
    ys, xs = np.nonzero(client)
    assert xs.min() >= 1000 and xs.max() < 5000
    assert ys.min() >= 1000 and ys.max() < 4000
    # pond and wetland never neighbor-owned
    for kind in (CropKind.POND, CropKind.WETLAND):
        owners = g.owner[g.kind == kind]
        assert not np.isin(
            owners, [Owner.NEIGHBOR1, Owner.NEIGHBOR2, Owner.NEIGHBOR3, Owner.NEIGHBOR4]
        ).any()


def test_unknown_name_rejected():
    with pytest.raises(ConfigurationError):
        build_geometry("miniberry-17")
    with pytest.raises(ConfigurationError):
        build_geometry("atlantis")


def test_build_geometry_deterministic():
    a = build_geometry("waterberry")
    b = build_geometry("waterberry")
    assert (a.kind == b.kind).all() and (a.owner == b.owner).all()


def test_relevance_mask_miniberry_tylcv_is_tomato_half():
    g = build_geometry("miniberry-30")
    m = relevance_mask(g, Measurement.TYLCV)
    assert m[:, 15:].all() and not m[:, :15].any()


def test_relevance_masks_waterberry():
    g = build_geometry("waterberry")
    hum = relevance_mask(g, Measurement.HUMIDITY)
    # humidity irrelevant on pond/wetland cells
    assert not hum[np.isin(g.kind, [CropKind.POND, CropKind.WETLAND])].any()
    # CCR relevance excludes neighbor strawberries
    ccr = relevance_mask(g, Measurement.CCR)
    neighbor_straw = (g.kind == CropKind.STRAWBERRY) & (g.owner != Owner.CLIENT)
    assert neighbor_straw.any()
    assert not ccr[neighbor_straw].any()


def test_susceptibility_superset_and_neighbor_spread():
    for name in ("waterberry", "miniberry-100"):
        g = build_geometry(name)
        for m in DISEASES:
            rel = relevance_mask(g, m)
            sus = susceptibility_mask(g, m)
            assert (rel <= sus).all()
    wb = build_geometry("waterberry")
    sus = susceptibility_mask(wb, Measurement.TYLCV)
    assert sus[(wb.kind == CropKind.TOMATO) & (wb.owner == Owner.NEIGHBOR1)].all()
    assert not sus[wb.kind == CropKind.POND].any()
    # Miniberry has no neighbors: susceptibility equals relevance
    mb = build_geometry("miniberry-100")
    assert (
        susceptibility_mask(mb, Measurement.CCR)
        == relevance_mask(mb, Measurement.CCR)
    ).all()


def test_disease_masks_disjoint():
    for name in ("waterberry", "miniberry-30"):
        g = build_geometry(name)
        tylcv = relevance_mask(g, Measurement.TYLCV)
        ccr = relevance_mask(g, Measurement.CCR)
        assert not (tylcv & ccr).any()


def test_humidity_has_no_susceptibility_mask():
    g = build_geometry("miniberry-10")
    with pytest.raises(ValueError):
        susceptibility_mask(g, Measurement.HUMIDITY)


def test_layout_parser_errors():
    with pytest.raises(ConfigurationError):
        geometry_from_layout("x", "0 0 5 5 tomato client extra")
    with pytest.raises(ConfigurationError):
        geometry_from_layout("x", "0 0 5 5 kudzu client")
    with pytest.raises(ConfigurationError):
        geometry_from_layout("x", "")
    with pytest.raises(ConfigurationError):
        geometry_from_layout("x", "0 0 5 5 tomato client\n0 0 9 9 pond client")


def test_layout_parser_overrides_in_order():
    g = geometry_from_layout(
        "x", "0 0 4 4 tomato client\n1 1 3 3 pond public"
    )
    assert g.kind[0, 0] == CropKind.TOMATO
    assert g.kind[2, 2] == CropKind.POND
    assert g.owner[2, 2] == Owner.PUBLIC
