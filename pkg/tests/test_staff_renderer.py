from __future__ import annotations

import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings

from adavu.laban_map import ArmLaban, LabanFrame, LabanLimb, LabanScore, LegLaban, build_score
from adavu.staff_renderer import StaffLayout, glyph_count, render_svg

from strategies import frames, scores

NS = {"s": "http://www.w3.org/2000/svg"}
NATTA = ["Natta1P1", "Natta1P2", "Natta1P1", "Natta1P3", "Natta1P1"]


def parse(svg: str):
    return ET.fromstring(svg)


def glyphs(root, kind=None):
    found = root.findall(".//s:g[@data-kind]", NS)
    return [g for g in found if kind is None or g.get("data-kind") == kind]


def test_natta_support_columns(mapping_db):
    score = build_score(NATTA, mapping_db, "natta_1")
    root = parse(render_svg(score))
    cells = root.findall(".//s:g[@class='cell']", NS)
    assert len(cells) == 5
    for cell, frame in zip(sorted(cells, key=lambda c: int(c.get("data-measure"))), score.frames):
        cols = {g.get("data-column"): g for g in cell.findall(".//s:g[@data-kind='direction']", NS)}
        for side, limb in (("left_support", frame.left_support), ("right_support", frame.right_support)):
            if limb.level:
                assert (cols[side].get("data-code"), cols[side].get("data-level")) == (str(limb.direction), str(limb.level))
            else:
                assert side not in cols
        if frame.posture_id == "Natta1P1":
            assert {"left_support", "right_support"} <= set(cols)


def test_empty_score_has_no_glyphs():
    root = parse(render_svg(LabanScore("empty")))
    assert glyphs(root) == []
    assert root.findall(".//s:line[@class='centre-line']", NS)


def test_arm_glyphs_symmetric():
    s = LabanLimb(1, 3)
    frame = LabanFrame.assemble(0, s, s, LegLaban(), LegLaban(), ArmLaban(LabanLimb(2, 2)),
                                ArmLaban(LabanLimb(3, 2)), LabanLimb(1, 2))
    layout = StaffLayout()
    root = parse(render_svg(LabanScore("x", (frame,)), layout))
    x = {g.get("data-column"): float(g.get("data-x")) for g in glyphs(root, "direction")}
    c = layout.centre_x
    assert x["left_arm"] < c < x["right_arm"]
    assert x["left_arm"] - c == pytest.approx(-(x["right_arm"] - c))


@settings(max_examples=50, deadline=None)
@given(scores())
def test_glyph_count_and_order(score):
    root = parse(render_svg(score))
    assert len(glyphs(root, "direction")) == glyph_count(score.frames)
    tops = {int(c.get("data-measure")): float(c.get("data-y-top"))
            for c in root.findall(".//s:g[@class='cell']", NS)}
    assert all(tops[m + 1] < tops[m] for m in range(len(score.frames) - 1))


@settings(max_examples=50, deadline=None)
@given(frames(mirrored=True))
def test_mirror_symmetric_frames(frame):
    layout = StaffLayout()
    root = parse(render_svg(LabanScore("m", (frame,)), layout))
    placed = {}
    for g in glyphs(root):
        col = g.get("data-column")
        if col == "head":
            continue
        side, part = col.split("_", 1)
        placed[(g.get("data-kind"), side, part)] = (float(g.get("data-x")) - layout.centre_x, g.get("data-code"))
    for (kind, side, part), (dx, _) in placed.items():
        if side == "left":
            other_dx, _ = placed[(kind, "right", part)]
            assert dx == pytest.approx(-other_dx)


def test_fold_and_touch_marks(mapping_db):
    root = parse(render_svg(build_score(["Natta1P1"], mapping_db)))
    folds = {(g.get("data-column"), g.get("data-code")) for g in glyphs(root, "fold")}
    assert folds == {("left_leg", "3"), ("right_leg", "3"), ("left_arm", "1"), ("right_arm", "1")}
    touches = {(g.get("data-column"), g.get("data-code")) for g in glyphs(root, "touch")}
    assert touches == {("left_support", "3"), ("right_support", "3")}


def test_level_fill():
    s = LabanLimb(1, 3)
    frame = LabanFrame.assemble(0, s, s, LegLaban(), LegLaban(), ArmLaban(LabanLimb(2, 1)),
                                ArmLaban(LabanLimb(3, 2)), LabanLimb(1, 2))
    root = parse(render_svg(LabanScore("x", (frame,))))
    by_col = {g.get("data-column"): g for g in glyphs(root, "direction")}
    assert by_col["left_arm"].find("s:polygon", NS).get("fill") == "url(#hatch)"
    assert by_col["left_support"].find("s:polygon", NS).get("fill") == "black"
    assert by_col["right_arm"].find("s:circle", NS) is not None


def test_unknown_code_fallback():
    layout = StaffLayout(glyph_shapes={1: ((-1, -1), (1, -1), (1, 1), (-1, 1))})
    s = LabanLimb(1, 3)
    frame = LabanFrame.assemble(0, s, s, LegLaban(), LegLaban(), ArmLaban(LabanLimb(2, 2)),
                                ArmLaban(LabanLimb(2, 2)), LabanLimb(1, 2))
    diags = []
    root = parse(render_svg(LabanScore("x", (frame,)), layout, diagnostics=diags))
    assert {d.code for d in diags} == {"unknown-glyph"}
    assert len(glyphs(root, "direction")) == glyph_count([frame])


def test_layout_validation():
    with pytest.raises(ValueError):
        StaffLayout(glyph_size=40, column_width=20)
    with pytest.raises(ValueError):
        StaffLayout(head_side="middle")
    layout = StaffLayout()
    offsets = [layout.offset(c) for c in layout.columns]
    assert offsets == sorted(offsets) and len(set(offsets)) == len(offsets)


def test_render_deterministic(mapping_db):
    score = build_score(NATTA, mapping_db, "natta_1")
    assert render_svg(score) == render_svg(score)
