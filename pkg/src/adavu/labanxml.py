"""LabanXML writer and reader.

The writer produces one canonical text per score: 3-space indentation, no
XML declaration, a fixed element order and ``duration="1"`` on every timed
element. Per measure::

    left  { arm{direction,level}, elbow{Degree}, foot{touch}, knee{Degree} }
    right { same }
    support side="left"  {direction,level}
    support side="right" {direction,level}
    head  {direction,level}

Codes the base tag set cannot carry are written only when they differ from
their default: ``<crossing>``/``<inclusion>`` inside ``<arm>``, a ``<leg>``
gesture block after ``<knee>``, and ``<hip>1</hip>`` for hip support. Mirror
flags are not stored; the reader derives them from the two sides.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Callable
from xml.sax.saxutils import escape

from .diagnostics import Diagnostic, emit
from .errors import LabanValidationError, LabanXMLParseError
from .laban_map import ArmLaban, LabanFrame, LabanLimb, LabanScore, LegLaban

__all__ = ["LabanScore", "generate_xml", "parse_xml"]

INDENT = "   "


class _Writer:
    def __init__(self):
        self.lines: list[str] = []

    def line(self, depth: int, text: str) -> None:
        self.lines.append(INDENT * depth + text)

    def value(self, depth: int, tag: str, value) -> None:
        self.line(depth, f"<{tag}>{value}</{tag}>")

    def block(self, depth: int, open_tag: str, close_tag: str, body: Callable[[int], None]) -> None:
        self.line(depth, open_tag)
        body(depth + 1)
        self.line(depth, close_tag)


def _limb_values(w: _Writer, d: int, limb: LabanLimb) -> None:
    w.value(d, "direction", limb.direction)
    w.value(d, "level", limb.level)


def _side(w: _Writer, d: int, leg: LegLaban, arm: ArmLaban) -> None:
    def arm_body(dd):
        _limb_values(w, dd, arm.limb)
        if arm.crossing:
            w.value(dd, "crossing", arm.crossing)
        if arm.body_inclusion:
            w.value(dd, "inclusion", 1)

    w.block(d, '<arm duration="1">', "</arm>", arm_body)
    w.block(d, '<elbow duration="1">', "</elbow>", lambda dd: w.value(dd, "Degree", arm.elbow_folding))
    w.block(d, "<foot>", "</foot>", lambda dd: w.value(dd, "touch", leg.touch))
    w.block(d, '<knee duration="1">', "</knee>", lambda dd: w.value(dd, "Degree", leg.knee_folding))
    if leg.limb.direction or leg.limb.level or leg.crossing:
        def leg_body(dd):
            _limb_values(w, dd, leg.limb)
            if leg.crossing:
                w.value(dd, "crossing", leg.crossing)

        w.block(d, '<leg duration="1">', "</leg>", leg_body)
    if leg.hip_support:
        w.value(d, "hip", 1)


def _measure(w: _Writer, d: int, f: LabanFrame) -> None:
    w.block(d, "<left>", "</left>", lambda dd: _side(w, dd, f.left_leg, f.left_arm))
    w.block(d, "<right>", "</right>", lambda dd: _side(w, dd, f.right_leg, f.right_arm))
    w.block(d, '<support side="left">', "</support>", lambda dd: _limb_values(w, dd, f.left_support))
    w.block(d, '<support side="right">', "</support>", lambda dd: _limb_values(w, dd, f.right_support))
    w.block(d, "<head>", "</head>", lambda dd: _limb_values(w, dd, f.head))


def generate_xml(score: LabanScore) -> str:
    w = _Writer()
    w.line(0, "<laban>")
    w.block(1, "<attribute>", "</attribute>", lambda d: w.value(d, "title", escape(score.title)))
    if score.frames:
        def notation(d):
            for f in score.frames:
                w.block(d, f'<measure num="{f.measure}">', "</measure>", lambda dd, f=f: _measure(w, dd, f))

        w.block(1, "<notation>", "</notation>", notation)
    else:
        w.line(1, "<notation></notation>")
    w.line(0, "</laban>")
    return "\n".join(w.lines) + "\n"


# -- reader -------------------------------------------------------------------

_SIDE_TAGS = {"arm", "elbow", "foot", "knee", "leg", "hip"}
_MEASURE_TAGS = {"left", "right", "support", "head"}


class _Reader:
    def __init__(self, diagnostics: list[Diagnostic] | None):
        self.diagnostics = diagnostics
        self.measure: str | None = None

    def fail(self, message: str):
        where = f"measure {self.measure}: " if self.measure is not None else ""
        raise LabanValidationError(where + message)

    def unknown(self, parent: str, el: ET.Element) -> None:
        where = f"measure {self.measure}" if self.measure is not None else "document"
        emit(self.diagnostics, "unknown-tag", f"{where}: ignoring <{el.tag}> inside <{parent}>", ref=self.measure)

    def int_of(self, el: ET.Element | None, path: str, default: int | None = 0) -> int:
        if el is None:
            if default is None:
                self.fail(f"missing <{path}>")
            return default
        text = (el.text or "").strip()
        try:
            return int(text)
        except ValueError:
            self.fail(f"<{path}> holds {text!r}, expected an integer")

    def child(self, el: ET.Element, *tags: str) -> ET.Element | None:
        for t in tags:
            found = el.find(t)
            if found is not None:
                return found
        return None

    def limb(self, el: ET.Element, path: str, known: set[str]) -> LabanLimb:
        for c in el:
            if c.tag not in known:
                self.unknown(path, c)
        d = self.int_of(el.find("direction"), f"{path}/direction")
        lvl = self.int_of(el.find("level"), f"{path}/level")
        try:
            return LabanLimb(d, lvl)
        except LabanValidationError as exc:
            self.fail(f"<{path}>: {exc}")

    def degree(self, el: ET.Element | None, path: str) -> int:
        if el is None:
            return 0
        for c in el:
            if c.tag not in ("Degree", "degree"):
                self.unknown(path, c)
        return self.int_of(self.child(el, "Degree", "degree"), f"{path}/Degree")

    def side(self, el: ET.Element | None, name: str) -> tuple[LegLaban, ArmLaban]:
        if el is None:
            return LegLaban(), ArmLaban()
        for c in el:
            if c.tag not in _SIDE_TAGS:
                self.unknown(name, c)
        arm_el = el.find("arm")
        arm_limb = LabanLimb()
        arm_cross = incl = 0
        if arm_el is not None:
            arm_limb = self.limb(arm_el, f"{name}/arm", {"direction", "level", "crossing", "inclusion"})
            arm_cross = self.int_of(arm_el.find("crossing"), f"{name}/arm/crossing")
            incl = self.int_of(arm_el.find("inclusion"), f"{name}/arm/inclusion")
        leg_el = el.find("leg")
        leg_limb = LabanLimb()
        leg_cross = 0
        touch_el = None
        if leg_el is not None:
            leg_limb = self.limb(leg_el, f"{name}/leg", {"direction", "level", "crossing", "touch"})
            leg_cross = self.int_of(leg_el.find("crossing"), f"{name}/leg/crossing")
            touch_el = leg_el.find("touch")
        foot = el.find("foot")
        if foot is not None:
            for c in foot:
                if c.tag != "touch":
                    self.unknown(f"{name}/foot", c)
            touch_el = foot.find("touch") if foot.find("touch") is not None else touch_el
        if incl not in (0, 1):
            self.fail(f"<{name}/arm/inclusion> must be 0 or 1, got {incl}")
        hip = self.int_of(el.find("hip"), f"{name}/hip")
        if hip not in (0, 1):
            self.fail(f"<{name}/hip> must be 0 or 1, got {hip}")
        try:
            leg = LegLaban(
                limb=leg_limb,
                crossing=leg_cross,
                hip_support=bool(hip),
                knee_folding=self.degree(el.find("knee"), f"{name}/knee"),
                touch=self.int_of(touch_el, f"{name}/foot/touch"),
            )
            arm = ArmLaban(
                limb=arm_limb,
                crossing=arm_cross,
                elbow_folding=self.degree(el.find("elbow"), f"{name}/elbow"),
                body_inclusion=bool(incl),
            )
        except LabanValidationError as exc:
            self.fail(f"<{name}>: {exc}")
        return leg, arm

    def frame(self, m: ET.Element, index: int) -> LabanFrame:
        self.measure = m.get("num")
        if self.measure is None:
            self.measure = str(index)
            self.fail("<measure> has no num attribute")
        try:
            num = int(self.measure)
        except ValueError:
            self.fail(f"num={self.measure!r} is not an integer")
        for c in m:
            if c.tag not in _MEASURE_TAGS:
                self.unknown("measure", c)
        supports = {}
        for s in m.findall("support"):
            side = s.get("side")
            if side not in ("left", "right"):
                self.fail(f"<support> side={side!r}, expected left or right")
            if side in supports:
                self.fail(f"duplicate <support side=\"{side}\">")
            supports[side] = self.limb(s, f"support[{side}]", {"direction", "level"})
        for side in ("left", "right"):
            if side not in supports:
                self.fail(f"missing <support side=\"{side}\">")
        head_el = m.find("head")
        if head_el is None:
            self.fail("missing <head>")
        head = self.limb(head_el, "head", {"direction", "level"})
        left_leg, left_arm = self.side(m.find("left"), "left")
        right_leg, right_arm = self.side(m.find("right"), "right")
        try:
            return LabanFrame.assemble(num, supports["left"], supports["right"], left_leg, right_leg,
                                       left_arm, right_arm, head)
        except LabanValidationError as exc:
            self.fail(str(exc))


def parse_xml(text: str, *, diagnostics: list[Diagnostic] | None = None) -> LabanScore:
    """Read a LabanXML document.

    Malformed XML raises :class:`LabanXMLParseError` carrying the line number;
    missing support/head elements or out-of-range codes raise
    :class:`LabanValidationError` naming the measure. Unknown elements are
    reported to ``diagnostics`` and skipped.
    """
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        line = exc.position[0] if getattr(exc, "position", None) else None
        raise LabanXMLParseError(f"malformed LabanXML: {exc}", line) from exc
    r = _Reader(diagnostics)
    if root.tag != "laban":
        r.fail(f"root element is <{root.tag}>, expected <laban>")
    for c in root:
        if c.tag not in ("attribute", "notation"):
            r.unknown("laban", c)
    title_el = root.find("attribute/title")
    title = (title_el.text or "").strip() if title_el is not None else ""
    attr = root.find("attribute")
    if attr is not None:
        for c in attr:
            if c.tag != "title":
                r.unknown("attribute", c)
    frames = []
    notation = root.find("notation")
    if notation is not None:
        for i, m in enumerate(notation):
            if m.tag != "measure":
                r.unknown("notation", m)
                continue
            frames.append(r.frame(m, i))
    return LabanScore(title, tuple(frames))
