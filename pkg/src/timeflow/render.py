"""SVG emission for TimeFlow diagrams.

Events are white rounded rectangles labelled "<ordinal>. <title>", objects
light grey sharp rectangles. Each relation type keeps its stroke color,
stroke pattern, glyph, and arrowhead from the style table; evidence words
inside node labels are highlighted in the relation's color. Output is
byte-identical across runs for equal input.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional
from xml.sax.saxutils import escape

from .interchange import chronology_to_dict
from .layout import Layout, LayoutEdge, layout_to_dict
from .model import Chronology, Event, Relation, RelationType

FONT = "11px sans-serif"


class RenderError(Exception):
    pass


@dataclass(frozen=True)
class RelationStyle:
    color: str
    glyph: Optional[str]  # glyph id, group A only
    pattern: str  # "solid" | "short-dotted" | "wide-dotted"
    arrowhead: str  # "filled" | "open" | "none"


@dataclass
class StyleTable:
    relations: dict[RelationType, RelationStyle] = field(default_factory=dict)
    event_fill: str = "#FFFFFF"
    object_fill: str = "#EEEEEE"
    stroke: str = "#333333"

    def __post_init__(self) -> None:
        defaults = default_style().relations if self.relations else {}
        for rel_type in RelationType:
            if rel_type not in self.relations:
                if not defaults:
                    raise RenderError(f"style table missing {rel_type.value}")
                self.relations[rel_type] = defaults[rel_type]

    def for_type(self, rel_type: RelationType) -> RelationStyle:
        try:
            return self.relations[rel_type]
        except KeyError:
            raise RenderError(f"style table missing {rel_type.value}")


def default_style() -> StyleTable:
    table = StyleTable.__new__(StyleTable)
    table.event_fill = "#FFFFFF"
    table.object_fill = "#EEEEEE"
    table.stroke = "#333333"
    table.relations = {
        RelationType.TEMPORAL_SEMANTIC: RelationStyle("#FDBE85", "clock", "solid", "none"),
        RelationType.SUBJECT: RelationStyle("#756BB1", "book", "solid", "none"),
        RelationType.ENTITY: RelationStyle("#E6550D", "stick-figure", "solid", "none"),
        RelationType.CAUSAL: RelationStyle("#40E0D0", "cradle", "solid", "filled"),
        RelationType.CORRESPONDENCE: RelationStyle("#08306B", "letter", "solid", "none"),
        RelationType.SUCCESSION: RelationStyle("#000000", None, "solid", "filled"),
        RelationType.REFERENCES_TO: RelationStyle("#000000", None, "short-dotted", "filled"),
        RelationType.CONSISTS_OF: RelationStyle("#000000", None, "wide-dotted", "filled"),
    }
    return table


def load_style(path: Path) -> StyleTable:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    table = default_style()
    for key, raw in data.get("relations", {}).items():
        rel_type = RelationType(key)
        base = table.relations[rel_type]
        table.relations[rel_type] = RelationStyle(
            color=raw.get("color", base.color),
            glyph=raw.get("glyph", base.glyph),
            pattern=raw.get("pattern", base.pattern),
            arrowhead=raw.get("arrowhead", base.arrowhead),
        )
    table.event_fill = data.get("event_fill", table.event_fill)
    table.object_fill = data.get("object_fill", table.object_fill)
    return table


def style_to_dict(table: StyleTable) -> dict:
    return {
        "event_fill": table.event_fill,
        "object_fill": table.object_fill,
        "relations": {
            rel_type.value: {
                "color": style.color,
                "glyph": style.glyph,
                "pattern": style.pattern,
                "arrowhead": style.arrowhead,
            }
            for rel_type, style in sorted(table.relations.items(), key=lambda p: p[0].value)
        },
    }


DASH = {"solid": None, "short-dotted": "2,3", "wide-dotted": "10,7"}

# Minimal embedded vector glyphs keyed by id; byte-deterministic, no fonts.
GLYPHS = {
    "clock": (
        '<circle cx="0" cy="0" r="7" fill="#FFFFFF" stroke="{c}" stroke-width="1.5"/>'
        '<path d="M 0 -4 L 0 0 L 3 2" fill="none" stroke="{c}" stroke-width="1.5"/>'
    ),
    "book": (
        '<path d="M -7 -5 L 0 -3 L 7 -5 L 7 5 L 0 7 L -7 5 Z" fill="#FFFFFF" '
        'stroke="{c}" stroke-width="1.5"/><path d="M 0 -3 L 0 7" stroke="{c}" stroke-width="1"/>'
    ),
    "stick-figure": (
        '<circle cx="0" cy="-5" r="2.5" fill="#FFFFFF" stroke="{c}" stroke-width="1.5"/>'
        '<path d="M 0 -2 L 0 3 M -4 0 L 4 0 M 0 3 L -3 8 M 0 3 L 3 8" fill="none" '
        'stroke="{c}" stroke-width="1.5"/>'
    ),
    "cradle": (
        '<path d="M -7 -6 L 7 -6" stroke="{c}" stroke-width="1.5"/>'
        '<path d="M -5 -6 L -5 2 M 0 -6 L 0 2 M 5 -6 L 5 2" stroke="{c}" stroke-width="1"/>'
        '<circle cx="-5" cy="3.5" r="1.8" fill="{c}"/><circle cx="0" cy="3.5" r="1.8" fill="{c}"/>'
        '<circle cx="5" cy="3.5" r="1.8" fill="{c}"/>'
    ),
    "letter": (
        '<rect x="-7" y="-5" width="14" height="10" fill="#FFFFFF" stroke="{c}" '
        'stroke-width="1.5"/><path d="M -7 -5 L 0 1 L 7 -5" fill="none" stroke="{c}" '
        'stroke-width="1.5"/>'
    ),
}


def _num(value: float) -> str:
    text = f"{value:.2f}".rstrip("0").rstrip(".")
    return text if text else "0"


def _marker_id(rel_type: RelationType) -> str:
    return f"arrow-{rel_type.value}"


def render_svg(
    layout: Layout, view: Chronology, style: Optional[StyleTable] = None
) -> str:
    style = style or default_style()
    relations = {r.id: r for r in view.relations}
    for rel in relations.values():
        style.for_type(rel.rel_type)  # fail early on incomplete tables

    parts: list[str] = []
    width, height = max(layout.width, 640), max(layout.height, 320)
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_num(width)}" height="{_num(height)}" '
        f'viewBox="0 0 {_num(width)} {_num(height)}">'
    )
    parts.append("<defs>")
    for rel_type in RelationType:
        rel_style = style.for_type(rel_type)
        if rel_style.arrowhead == "none":
            continue
        fill = rel_style.color if rel_style.arrowhead == "filled" else "none"
        stroke = "" if rel_style.arrowhead == "filled" else f' stroke="{rel_style.color}"'
        parts.append(
            f'<marker id="{_marker_id(rel_type)}" markerWidth="10" markerHeight="8" '
            f'refX="9" refY="4" orient="auto" markerUnits="userSpaceOnUse">'
            f'<path d="M 0 0 L 10 4 L 0 8 Z" fill="{fill}"{stroke}/></marker>'
        )
    for glyph_id in sorted(GLYPHS):
        color = next(
            (s.color for s in style.relations.values() if s.glyph == glyph_id), "#000000"
        )
        parts.append(
            f'<g id="glyph-{glyph_id}">{GLYPHS[glyph_id].format(c=color)}</g>'
        )
    parts.append("</defs>")

    evidence_colors = _evidence_colors(view, style)

    parts.append('<g id="edges">')
    for edge in layout.edges:
        rel = relations.get(edge.relation_id)
        if rel is None:
            continue
        parts.append(_edge_svg(edge, rel, style))
    parts.append("</g>")

    events = {e.id: e for e in view.events()}
    objects = {o.id: o for o in view.objects}
    parts.append('<g id="nodes">')
    for node in layout.nodes:
        if node.node_class == "event":
            event = events.get(node.id)
            label = f"{event.ordinal}. {event.title}" if event else node.id
            parts.append(
                f'<rect id="node-{escape(node.id)}" x="{_num(node.x)}" y="{_num(node.y)}" '
                f'width="{_num(node.width)}" height="{_num(node.height)}" rx="10" ry="10" '
                f'fill="{style.event_fill}" stroke="{style.stroke}"/>'
            )
        elif node.node_class == "object":
            obj = objects.get(node.id)
            label = obj.title or obj.id if obj else node.id
            parts.append(
                f'<rect id="node-{escape(node.id)}" x="{_num(node.x)}" y="{_num(node.y)}" '
                f'width="{_num(node.width)}" height="{_num(node.height)}" '
                f'fill="{style.object_fill}" stroke="{style.stroke}"/>'
            )
        else:
            concept = next((c for c in view.concepts if c.id == node.id), None)
            label = getattr(concept, "name", node.id)
            parts.append(
                f'<rect id="node-{escape(node.id)}" x="{_num(node.x)}" y="{_num(node.y)}" '
                f'width="{_num(node.width)}" height="{_num(node.height)}" rx="16" ry="16" '
                f'fill="{style.event_fill}" stroke="{style.stroke}" stroke-dasharray="3,3"/>'
            )
        parts.append(
            _label_svg(
                node.x + 6,
                node.y + node.height / 2 + 4,
                label,
                node.width - 12,
                evidence_colors.get(node.id, {}),
            )
        )
    parts.append("</g>")

    parts.append('<g id="badges">')
    for badge in layout.badges:
        parts.append(
            f'<text id="badge-{escape(badge.event_id)}" x="{_num(badge.x)}" '
            f'y="{_num(badge.y)}" text-anchor="middle" style="font: bold {FONT}">'
            f"+{badge.overflow}</text>"
        )
    parts.append("</g>")

    parts.append(_legend_svg(style, height))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _edge_svg(edge: LayoutEdge, rel: Relation, style: StyleTable) -> str:
    rel_style = style.for_type(rel.rel_type)
    points = edge.points
    if edge.arc and len(points) == 3:
        d = (
            f"M {_num(points[0][0])} {_num(points[0][1])} "
            f"Q {_num(points[1][0])} {_num(points[1][1])} "
            f"{_num(points[2][0])} {_num(points[2][1])}"
        )
    else:
        d = "M " + " L ".join(f"{_num(x)} {_num(y)}" for x, y in points)
    dash = DASH[rel_style.pattern]
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    marker = (
        f' marker-end="url(#{_marker_id(rel.rel_type)})"'
        if rel.directed and rel_style.arrowhead != "none"
        else ""
    )
    path = (
        f'<path id="edge-{escape(rel.id)}" class="rel-{rel.rel_type.value}" d="{d}" '
        f'fill="none" stroke="{rel_style.color}" stroke-width="1.6"{dash_attr}{marker}/>'
    )
    if rel_style.glyph:
        x, y = edge.label_anchor
        path += (
            f'<use href="#glyph-{rel_style.glyph}" '
            f'x="{_num(x)}" y="{_num(y - 12)}"/>'
        )
    return path


def _evidence_colors(view: Chronology, style: StyleTable) -> dict[str, dict[str, str]]:
    """holder id -> lowercased evidence word -> relation color."""
    colors: dict[str, dict[str, str]] = {}
    for rel in sorted(view.relations, key=lambda r: r.id):
        color = style.for_type(rel.rel_type).color
        for item in rel.evidence:
            words = re.findall(r"[\w'-]+", item.surface) or (
                [item.surface] if item.surface else []
            )
            holder = colors.setdefault(item.holder, {})
            for word in words:
                holder.setdefault(word.lower(), color)
    return colors


def _label_svg(
    x: float, y: float, label: str, max_width: float, highlights: dict[str, str]
) -> str:
    # crude width cap: ~6.2 px per character at 11px sans
    limit = max(int(max_width / 6.2), 4)
    if len(label) > limit:
        label = label[: limit - 1] + "…"
    spans: list[str] = []
    for token in re.split(r"(\s+)", label):
        color = highlights.get(token.lower().strip(".,;:!?"))
        if color and token.strip():
            spans.append(f'<tspan fill="{color}" style="font-weight:bold">{escape(token)}</tspan>')
        else:
            spans.append(escape(token))
    return (
        f'<text x="{_num(x)}" y="{_num(y)}" style="font: {FONT}">' + "".join(spans) + "</text>"
    )


def _legend_svg(style: StyleTable, height: float) -> str:
    parts = [f'<g id="legend" transform="translate(20 {_num(height - 120)})">']
    parts.append('<text x="0" y="0" style="font: bold 12px sans-serif">Relations</text>')
    labels = {
        RelationType.TEMPORAL_SEMANTIC: "Temporal-Semantic",
        RelationType.SUBJECT: "Subject",
        RelationType.ENTITY: "Entity",
        RelationType.CAUSAL: "Causal",
        RelationType.CORRESPONDENCE: "Correspondence",
        RelationType.SUCCESSION: "Succession",
        RelationType.REFERENCES_TO: "References To",
        RelationType.CONSISTS_OF: "Consists Of",
    }
    for index, rel_type in enumerate(RelationType):
        rel_style = style.for_type(rel_type)
        col, row = divmod(index, 4)
        x, y = col * 220, 16 + row * 22
        dash = DASH[rel_style.pattern]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        parts.append(
            f'<path id="legend-{rel_type.value}" d="M {_num(x)} {_num(y)} L {_num(x + 36)} {_num(y)}" '
            f'stroke="{rel_style.color}" stroke-width="2"{dash_attr}/>'
        )
        if rel_style.glyph:
            parts.append(f'<use href="#glyph-{rel_style.glyph}" x="{_num(x + 18)}" y="{_num(y - 10)}"/>')
        parts.append(
            f'<text x="{_num(x + 44)}" y="{_num(y + 4)}" style="font: {FONT}">'
            f"{escape(labels[rel_type])}</text>"
        )
    parts.append("</g>")
    return "\n".join(parts)


def render_view_json(
    layout: Layout, view: Chronology, style: Optional[StyleTable] = None
) -> dict:
    """Lossless serialization of view + layout + style for the UI."""
    document = chronology_to_dict(view)
    document["layout"] = layout_to_dict(layout)
    document["style"] = style_to_dict(style or default_style())
    return document
