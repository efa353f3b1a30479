"""SVG rendering of a Laban staff.

Time runs bottom to top: measure 0 sits in the lowest cell. Columns are laid
out symmetrically about the centre line, innermost first: support, leg, body,
arm, head. The head has a single column, drawn on the right-hand side as is
customary.

Every glyph is a ``<g>`` carrying ``data-kind`` (direction, fold or touch),
``data-measure``, ``data-column``, ``data-code`` and, for direction glyphs,
``data-level``, plus its centre in ``data-x``/``data-y``. These attributes are
the testing contract; the drawn geometry is not.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence
from xml.sax.saxutils import escape, quoteattr

from .diagnostics import Diagnostic, emit
from .laban_map import LATERAL, LabanFrame, LabanScore

COLUMNS = ("support", "leg", "body", "arm", "head")

# Unit polygons (half-size 1, y down) for the left-hand direction codes and Place.
# Right-hand codes are their mirror images in x.
_BASE_SHAPES: dict[int, tuple[tuple[float, float], ...]] = {
    1: ((-1, -1), (1, -1), (1, 1), (-1, 1)),
    2: ((-1, 0), (0, -1), (1, -1), (1, 1), (0, 1)),
    4: ((-1, -1), (-0.2, -1), (-0.2, -0.5), (1, -0.5), (1, 1), (-1, 1)),
    6: ((-1, -1), (1, -1), (1, 0.5), (-0.2, 0.5), (-0.2, 1), (-1, 1)),
    8: ((-1, -1), (1, 0), (1, 1), (0, 1)),
    10: ((0, -1), (1, -1), (1, 0), (-1, 1)),
}


def _default_shapes() -> dict[int, tuple[tuple[float, float], ...]]:
    shapes = dict(_BASE_SHAPES)
    for code, pts in _BASE_SHAPES.items():
        if code != 1:
            shapes[LATERAL[code]] = tuple((-x, y) for x, y in pts)
    return shapes


@dataclass(frozen=True)
class StaffLayout:
    column_width: float = 26.0
    cell_height: float = 56.0
    glyph_size: float = 18.0
    margin: float = 24.0
    columns: tuple[str, ...] = COLUMNS
    head_side: str = "right"
    glyph_shapes: Mapping[int, tuple[tuple[float, float], ...]] = field(default_factory=_default_shapes)

    def __post_init__(self):
        if min(self.column_width, self.cell_height, self.glyph_size) <= 0 or self.margin < 0:
            raise ValueError("layout sizes must be positive")
        if self.glyph_size > self.column_width:
            raise ValueError("glyph_size must fit in a column")
        if len(set(self.columns)) != len(self.columns):
            raise ValueError("column names must be unique")
        if self.head_side not in ("left", "right"):
            raise ValueError("head_side must be left or right")

    @property
    def centre_x(self) -> float:
        return self.margin + len(self.columns) * self.column_width

    @property
    def width(self) -> float:
        return 2 * self.centre_x

    def offset(self, column: str) -> float:
        """Distance from the centre line to the middle of ``column``."""
        return (self.columns.index(column) + 0.5) * self.column_width

    def x(self, side: str, column: str) -> float:
        sign = -1 if side == "left" else 1
        return self.centre_x + sign * self.offset(column)

    def height(self, measures: int) -> float:
        return 2 * self.margin + max(measures, 1) * self.cell_height

    def cell_top(self, measure: int, measures: int) -> float:
        return self.margin + (measures - 1 - measure) * self.cell_height


def _num(v: float) -> str:
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def _attrs(**kw) -> str:
    return " ".join(f"{k.rstrip('_').replace('_', '-')}={quoteattr(str(v))}" for k, v in kw.items())


class _Svg:
    def __init__(self):
        self.out: list[str] = []

    def add(self, depth: int, text: str) -> None:
        self.out.append("  " * depth + text)


def _glyph(svg: _Svg, d: int, layout: StaffLayout, measure: int, column: str, side: str | None,
           code: int, level: int, x: float, y: float, diagnostics) -> None:
    name = f"{side}_{column}" if side else column
    head = _attrs(class_="glyph", data_kind="direction", data_measure=measure, data_column=name,
                  data_code=code, data_level=level, data_x=_num(x), data_y=_num(y))
    svg.add(d, f"<g {head}>")
    h = layout.glyph_size / 2
    shape = layout.glyph_shapes.get(code)
    if shape is None:
        emit(diagnostics, "unknown-glyph", f"measure {measure} {name}: no glyph for direction code {code}",
             ref=measure)
        svg.add(d + 1, f'<circle cx="{_num(x)}" cy="{_num(y)}" r="{_num(h)}" fill="white" stroke="black"/>')
        svg.add(d + 1, f'<text x="{_num(x)}" y="{_num(y + h / 2)}" font-size="{_num(h * 1.4)}" '
                       f'text-anchor="middle">?</text>')
    else:
        fill = {1: "url(#hatch)", 2: "white", 3: "black"}.get(level, "white")
        pts = " ".join(f"{_num(x + px * h)},{_num(y + py * h)}" for px, py in shape)
        svg.add(d + 1, f'<polygon points="{pts}" fill="{fill}" stroke="black" stroke-width="1"/>')
        if level == 2:
            svg.add(d + 1, f'<circle cx="{_num(x)}" cy="{_num(y)}" r="{_num(h / 5)}" fill="black"/>')
    svg.add(d, "</g>")


def _fold(svg: _Svg, d: int, layout: StaffLayout, measure: int, side: str, column: str,
          degree: int, x: float, y: float) -> None:
    head = _attrs(class_="fold", data_kind="fold", data_measure=measure, data_column=f"{side}_{column}",
                  data_code=degree, data_x=_num(x), data_y=_num(y))
    r = layout.glyph_size / 3
    sweep = 0 if side == "left" else 1
    svg.add(d, f"<g {head}>")
    svg.add(d + 1, f'<path d="M {_num(x - r)} {_num(y)} A {_num(r)} {_num(r)} 0 0 {sweep} {_num(x + r)} '
                   f'{_num(y)}" fill="none" stroke="black"/>')
    svg.add(d + 1, f'<text x="{_num(x)}" y="{_num(y + r)}" font-size="{_num(r * 1.5)}" '
                   f'text-anchor="middle">{degree}</text>')
    svg.add(d, "</g>")


def _touch(svg: _Svg, d: int, layout: StaffLayout, measure: int, side: str, code: int,
           x: float, y: float) -> None:
    head = _attrs(class_="touch", data_kind="touch", data_measure=measure, data_column=f"{side}_support",
                  data_code=code, data_x=_num(x), data_y=_num(y))
    r = layout.glyph_size / 3
    # The hook opens away from the centre line so mirrored touches draw mirrored.
    dx = -r if side == "left" else r
    svg.add(d, f"<g {head}>")
    svg.add(d + 1, f'<path d="M {_num(x)} {_num(y - r)} L {_num(x)} {_num(y)} Q {_num(x)} {_num(y + r)} '
                   f'{_num(x + dx)} {_num(y + r)}" fill="none" stroke="black"/>')
    svg.add(d + 1, f'<text x="{_num(x - dx)}" y="{_num(y + r)}" font-size="{_num(r * 1.2)}" '
                   f'text-anchor="middle">{code}</text>')
    svg.add(d, "</g>")


def _cell(svg: _Svg, layout: StaffLayout, f: LabanFrame, n: int, diagnostics) -> None:
    m = f.measure
    top = layout.cell_top(m, n)
    gy = top + layout.cell_height * 0.38
    my = top + layout.cell_height * 0.82
    svg.add(1, f"<g {_attrs(class_='cell', data_measure=m, data_y_top=_num(top))}>")
    svg.add(2, f'<text x="{_num(layout.margin / 2)}" y="{_num(top + layout.cell_height / 2)}" '
               f'font-size="10" text-anchor="middle">{m}</text>')
    for side in ("left", "right"):
        support = f.left_support if side == "left" else f.right_support
        leg = f.left_leg if side == "left" else f.right_leg
        arm = f.left_arm if side == "left" else f.right_arm
        for column, limb in (("support", support), ("leg", leg.limb), ("arm", arm.limb)):
            if column in layout.columns and limb.direction > 0:
                _glyph(svg, 2, layout, m, column, side, limb.direction, limb.level,
                       layout.x(side, column), gy, diagnostics)
        if leg.knee_folding and "leg" in layout.columns:
            _fold(svg, 2, layout, m, side, "leg", leg.knee_folding, layout.x(side, "leg"), my)
        if arm.elbow_folding and "arm" in layout.columns:
            _fold(svg, 2, layout, m, side, "arm", arm.elbow_folding, layout.x(side, "arm"), my)
        if leg.touch and "support" in layout.columns:
            _touch(svg, 2, layout, m, side, leg.touch, layout.x(side, "support"), my)
    if "head" in layout.columns and f.head.direction > 0:
        _glyph(svg, 2, layout, m, "head", None, f.head.direction, f.head.level,
               layout.x(layout.head_side, "head"), gy, diagnostics)
    svg.add(1, "</g>")


def render_svg(score: LabanScore, layout: StaffLayout | None = None, *,
               diagnostics: list[Diagnostic] | None = None) -> str:
    layout = layout or StaffLayout()
    n = len(score.frames)
    width, height = layout.width, layout.height(n)
    cx = layout.centre_x
    svg = _Svg()
    svg.add(0, f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_num(width)}" '
               f'height="{_num(height)}" viewBox="0 0 {_num(width)} {_num(height)}">')
    svg.add(1, f"<title>{escape(score.title)}</title>")
    svg.add(1, "<defs>")
    svg.add(2, '<pattern id="hatch" patternUnits="userSpaceOnUse" width="4" height="4">')
    svg.add(3, '<rect width="4" height="4" fill="white"/>')
    svg.add(3, '<path d="M 0 4 L 4 0" stroke="black" stroke-width="1"/>')
    svg.add(2, "</pattern>")
    svg.add(1, "</defs>")

    top, bottom = layout.margin, height - layout.margin
    svg.add(1, '<g class="staff">')
    outer = layout.offset("leg") + layout.column_width / 2 if "leg" in layout.columns else layout.offset(
        layout.columns[0])
    for x, cls in ((cx - outer, "staff-line"), (cx, "centre-line"), (cx + outer, "staff-line")):
        svg.add(2, f'<line class="{cls}" x1="{_num(x)}" y1="{_num(top)}" x2="{_num(x)}" y2="{_num(bottom)}" '
                   f'stroke="black" stroke-width="1"/>')
    for k in range(max(n, 1) + 1):
        y = top + k * layout.cell_height
        svg.add(2, f'<line class="bar-line" x1="{_num(cx - outer)}" y1="{_num(y)}" x2="{_num(cx + outer)}" '
                   f'y2="{_num(y)}" stroke="black" stroke-width="{2 if k == max(n, 1) else 0.5}"/>')
    svg.add(1, "</g>")

    for f in score.frames:
        _cell(svg, layout, f, n, diagnostics)
    svg.add(0, "</svg>")
    return "\n".join(svg.out) + "\n"


def glyph_count(frames: Sequence[LabanFrame]) -> int:
    """Direction glyphs a score produces: one per limb with a nonzero direction."""
    return sum(1 for f in frames for limb in f.limbs().values() if limb.direction > 0)
