"""Deterministic TimeFlow geometry.

Three horizontal bands: pinned entity concepts on top, the numbered event
lane in the middle, information objects underneath their anchoring event.
Group A concept-to-concept edges arc above the event lane, object-to-object
edges route inside the object band, and mixed-level edges run between bands.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .model import Chronology, Entity, Event, GROUP_A, Level, Relation, RelationType

EVENT_W, EVENT_H = 170, 52
OBJECT_W, OBJECT_H = 160, 44
ENTITY_W, ENTITY_H = 160, 40
EVENT_GAP = 70
MARGIN = 40
ENTITY_BAND_Y = 30
EVENT_BAND_Y = 170
OBJECT_BAND_Y = 300
OBJECT_ROW_GAP = 16

DEFAULT_VISIBLE_OBJECTS = 3


class LayoutError(Exception):
    pass


@dataclass(frozen=True)
class LayoutNode:
    id: str
    node_class: str  # "event" | "object" | "entity-concept"
    x: float
    y: float
    width: float
    height: float

    def center(self) -> tuple[float, float]:
        return (self.x + self.width / 2, self.y + self.height / 2)


@dataclass(frozen=True)
class LayoutEdge:
    relation_id: str
    points: tuple[tuple[float, float], ...]
    label_anchor: tuple[float, float]
    arc: bool = False  # render points[1] as a quadratic control point


@dataclass(frozen=True)
class Badge:
    event_id: str
    overflow: int
    x: float
    y: float


@dataclass(frozen=True)
class LayoutOptions:
    spacing: str = "uniform"  # or "proportional"
    visible_objects: int = DEFAULT_VISIBLE_OBJECTS


@dataclass
class Layout:
    width: float
    height: float
    nodes: list[LayoutNode] = field(default_factory=list)
    edges: list[LayoutEdge] = field(default_factory=list)
    badges: list[Badge] = field(default_factory=list)

    def node(self, node_id: str) -> Optional[LayoutNode]:
        for node in self.nodes:
            if node.id == node_id:
                return node
        return None


def compute_layout(view: Chronology, options: LayoutOptions = LayoutOptions()) -> Layout:
    events = sorted(view.events(), key=_ordinal_key)
    for event in events:
        if event.ordinal is None:
            raise LayoutError(f"event {event.id!r} has no ordinal; renumber before layout")

    event_x: dict[str, float] = {}
    if options.spacing == "proportional" and events:
        anchored = [e for e in events if e.anchor is not None]
        if anchored:
            start = min(e.anchor.start for e in anchored)  # type: ignore[union-attr]
            end = max(e.anchor.start for e in anchored)  # type: ignore[union-attr]
            span = max((end - start).days, 1)
            width = max(len(events) * (EVENT_W + EVENT_GAP), 600)
            prev = None
            for event in events:
                days = (event.anchor.start - start).days if event.anchor else 0
                x = MARGIN + days / span * width
                if prev is not None and x < prev + EVENT_W + 10:
                    x = prev + EVENT_W + 10
                event_x[event.id] = x
                prev = x
    if not event_x:
        for index, event in enumerate(events):
            event_x[event.id] = MARGIN + index * (EVENT_W + EVENT_GAP)

    nodes: list[LayoutNode] = []
    for event in events:
        nodes.append(
            LayoutNode(event.id, "event", event_x[event.id], EVENT_BAND_Y, EVENT_W, EVENT_H)
        )

    # each object is anchored once, under its earliest consists-of partner
    consists = [r for r in view.relations if r.rel_type is RelationType.CONSISTS_OF]
    ordinal_of = {e.id: e.ordinal for e in events}
    anchor_event: dict[str, str] = {}
    for rel in sorted(consists, key=lambda r: (ordinal_of.get(r.source, 1 << 30), r.target)):
        anchor_event.setdefault(rel.target, rel.source)

    columns: dict[str, list[str]] = {}
    for obj_id, event_id in sorted(anchor_event.items()):
        columns.setdefault(event_id, []).append(obj_id)

    badges: list[Badge] = []
    hidden: set[str] = set()
    for event in events:
        column = columns.get(event.id, [])
        visible = column[: options.visible_objects]
        overflow = column[options.visible_objects :]
        x = event_x[event.id]
        for slot, obj_id in enumerate(visible):
            nodes.append(
                LayoutNode(
                    obj_id,
                    "object",
                    x,
                    OBJECT_BAND_Y + slot * (OBJECT_H + OBJECT_ROW_GAP),
                    OBJECT_W,
                    OBJECT_H,
                )
            )
        if overflow:
            hidden |= set(overflow)
            badges.append(
                Badge(
                    event.id,
                    len(overflow),
                    x + OBJECT_W / 2,
                    OBJECT_BAND_Y + len(visible) * (OBJECT_H + OBJECT_ROW_GAP) + 14,
                )
            )

    # objects never claimed by an event go at the right end of the band
    placed = {n.id for n in nodes} | hidden
    loose = [o for o in sorted(view.objects, key=lambda o: o.id) if o.id not in placed]
    loose_x = (max(event_x.values()) + EVENT_W + EVENT_GAP) if event_x else MARGIN
    for slot, obj in enumerate(loose):
        nodes.append(
            LayoutNode(
                obj.id,
                "object",
                loose_x,
                OBJECT_BAND_Y + slot * (OBJECT_H + OBJECT_ROW_GAP),
                OBJECT_W,
                OBJECT_H,
            )
        )

    entities = sorted(
        (c for c in view.concepts if isinstance(c, Entity)), key=lambda e: e.id
    )
    by_id = {n.id: n for n in nodes}
    prev_x: Optional[float] = None
    for entity in entities:
        linked = [
            by_id[other]
            for r in view.relations
            if entity.id in r.endpoints()
            for other in r.endpoints()
            if other != entity.id and other in by_id
        ]
        if linked:
            x = sum(n.center()[0] for n in linked) / len(linked) - ENTITY_W / 2
        else:
            x = MARGIN
        if prev_x is not None and x < prev_x + ENTITY_W + 20:
            x = prev_x + ENTITY_W + 20
        prev_x = x
        node = LayoutNode(entity.id, "entity-concept", x, ENTITY_BAND_Y, ENTITY_W, ENTITY_H)
        nodes.append(node)
        by_id[entity.id] = node

    edges = [
        _route(rel, by_id[rel.source], by_id[rel.target], view.level_of(rel))
        for rel in sorted(view.relations, key=lambda r: (r.rel_type.value, r.source, r.target))
        if rel.source in by_id and rel.target in by_id
    ]

    width = max([n.x + n.width for n in nodes], default=0) + MARGIN
    height = max([n.y + n.height for n in nodes], default=0) + MARGIN + 140  # legend room
    return Layout(width=width, height=height, nodes=nodes, edges=edges, badges=badges)


def _ordinal_key(event: Event) -> tuple:
    return (event.ordinal if event.ordinal is not None else 1 << 30, event.id)


def _route(
    rel: Relation, a: LayoutNode, b: LayoutNode, level: Optional[Level]
) -> LayoutEdge:
    ax, ay = a.center()
    bx, by = b.center()
    if rel.rel_type is RelationType.CONSISTS_OF or (
        level is Level.TE and a.node_class != "entity-concept" and b.node_class != "entity-concept"
    ):
        # between the event lane and the object band
        top, bottom = (a, b) if a.y <= b.y else (b, a)
        points = (
            (top.center()[0], top.y + top.height),
            (bottom.center()[0], bottom.y),
        )
        if a.y > b.y:  # keep direction source -> target
            points = points[::-1]
        return LayoutEdge(rel.id, points, _midpoint(points), arc=False)
    if level is Level.EE and rel.rel_type in GROUP_A and "event" in (a.node_class, b.node_class):
        if a.node_class == b.node_class == "event":
            apex_y = min(a.y, b.y) - 40 - abs(bx - ax) * 0.08
            control = ((ax + bx) / 2, apex_y)
            points = ((ax, a.y), control, (bx, b.y))
        else:
            points = ((ax, ay), ((ax + bx) / 2, (ay + by) / 2), (bx, by))
        return LayoutEdge(rel.id, points, points[1], arc=True)
    if level is Level.TT:
        drop = max(a.y + a.height, b.y + b.height) + 26
        points = ((ax, a.y + a.height), (ax, drop), (bx, drop), (bx, b.y + b.height))
        return LayoutEdge(rel.id, points, ((ax + bx) / 2, drop), arc=False)
    points = ((ax, ay), (bx, by))
    return LayoutEdge(rel.id, points, _midpoint(points), arc=False)


def _midpoint(points: tuple[tuple[float, float], ...]) -> tuple[float, float]:
    (x1, y1), (x2, y2) = points[0], points[-1]
    return ((x1 + x2) / 2, (y1 + y2) / 2)


def layout_to_dict(layout: Layout) -> dict:
    return {
        "width": layout.width,
        "height": layout.height,
        "nodes": [
            {
                "id": n.id,
                "node_class": n.node_class,
                "x": n.x,
                "y": n.y,
                "width": n.width,
                "height": n.height,
            }
            for n in layout.nodes
        ],
        "edges": [
            {
                "relation_id": e.relation_id,
                "points": [list(p) for p in e.points],
                "label_anchor": list(e.label_anchor),
                "arc": e.arc,
            }
            for e in layout.edges
        ],
        "badges": [
            {"event_id": b.event_id, "overflow": b.overflow, "x": b.x, "y": b.y}
            for b in layout.badges
        ],
    }
