"""Report building and export: collapse a triaged session into a document
with per-asset threat lists, headline counts, a legend, and a color coding of
threat density, then render it as JSON, Markdown, or an SVG diagram overlay."""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime
from importlib import metadata
from pathlib import Path
from typing import NamedTuple
from xml.sax.saxutils import escape, quoteattr

from . import clock
from .bpmn import Bounds, ElementKind, ProcessModel, extract_assets
from .catalog import ALL_PRINCIPLES, KnowledgeBase, SecurityPrinciple, parse_principle
from .engine import (
    AcceptedThreat,
    Objectives,
    Session,
    StaleCatalog,
    ThreatModel,
    identify,
)

REPORT_FORMAT_VERSION = "1"

#: Shown on every report next to the headline counts.
COUNT_CAVEAT = (
    "Threat counts show where accepted threats concentrate; "
    "a higher count does not by itself mean higher risk."
)


class SerializationFailure(Exception):
    """An export could not be produced or written."""


class ColorBucket(NamedTuple):
    label: str
    color: str
    lower: int
    upper: int | None  # None = unbounded


@dataclass(frozen=True)
class ColorScale:
    """Partition of accepted-threat counts into labeled color buckets. Buckets
    must start at zero, be contiguous, and end unbounded."""

    buckets: tuple[ColorBucket, ...]

    def __post_init__(self) -> None:
        if not self.buckets:
            raise ValueError("color scale needs at least one bucket")
        expected_lower = 0
        labels: set[str] = set()
        for position, bucket in enumerate(self.buckets):
            if bucket.label in labels:
                raise ValueError(f"duplicate color bucket label {bucket.label!r}")
            labels.add(bucket.label)
            if not bucket.color.startswith("#") or len(bucket.color) != 7:
                raise ValueError(f"bucket {bucket.label!r}: color must be #rrggbb")
            if bucket.lower != expected_lower:
                raise ValueError(
                    f"bucket {bucket.label!r}: starts at {bucket.lower}, "
                    f"expected {expected_lower} (buckets must be contiguous from 0)"
                )
            last = position == len(self.buckets) - 1
            if last:
                if bucket.upper is not None:
                    raise ValueError("final color bucket must be unbounded")
            else:
                if bucket.upper is None or bucket.upper < bucket.lower:
                    raise ValueError(
                        f"bucket {bucket.label!r}: upper bound must be >= lower bound"
                    )
                expected_lower = bucket.upper + 1

    def classify(self, count: int) -> ColorBucket:
        if count < 0:
            raise ValueError("threat count cannot be negative")
        for bucket in self.buckets:
            if bucket.upper is None or count <= bucket.upper:
                return bucket
        raise AssertionError("unreachable: final bucket is unbounded")


DEFAULT_COLOR_SCALE = ColorScale(
    (
        ColorBucket("neutral", "#d9d9d9", 0, 0),
        ColorBucket("low", "#fff3bf", 1, 2),
        ColorBucket("medium", "#ffa94d", 3, 4),
        ColorBucket("high", "#ff6b6b", 5, None),
    )
)


@dataclass(frozen=True)
class AssetSection:
    element_id: str
    element_name: str
    element_kind: ElementKind
    lane_name: str | None
    threats: tuple[AcceptedThreat, ...]


def installed_version() -> str:
    try:
        return metadata.version("insideout")
    except metadata.PackageNotFoundError:
        return "0.0.0"


@dataclass(frozen=True)
class LegendEntry:
    abbreviation: str
    threat_id: str
    name: str
    description: str


@dataclass(frozen=True)
class ColorAssignment:
    element_id: str
    count: int
    label: str
    color: str


@dataclass(frozen=True)
class ReportSummary:
    unique_threat_count: int
    asset_count: int
    accepted_count: int
    unfiltered_candidate_count: int
    caveat: str


@dataclass(frozen=True)
class ReportDocument:
    process_name: str
    generated_at: str
    tool_version: str
    principles: tuple[SecurityPrinciple, ...]
    notes: str
    summary: ReportSummary
    assets: tuple[AssetSection, ...]
    legend: tuple[LegendEntry, ...]
    color_scale: ColorScale
    color_assignments: tuple[ColorAssignment, ...]
    model_digest: str
    catalog_digest: str


def build_report(
    threat_model: ThreatModel,
    session: Session,
    kb: KnowledgeBase,
    *,
    color_scale: ColorScale = DEFAULT_COLOR_SCALE,
    now: datetime | None = None,
    tool_version: str | None = None,
) -> ReportDocument:
    """Assemble the report document for a finalized session.

    The knowledge base supplies legend text and the unfiltered candidate
    count, so it must be the catalog the session was built with; anything
    else raises StaleCatalog.
    """
    if kb.source_digest != session.catalog_digest:
        raise StaleCatalog(
            "catalog does not match the session "
            f"(session has {session.catalog_digest[:12]}, caller has {kb.source_digest[:12]})"
        )
    if threat_model.model_digest != session.model_digest:
        raise ValueError("threat model was finalized from a different session")

    by_element: dict[str, list[AcceptedThreat]] = {}
    for item in threat_model.accepted:
        by_element.setdefault(item.element_id, []).append(item)

    assets = []
    assignments = []
    for asset in extract_assets(session.model):
        threats = tuple(
            sorted(
                by_element.get(asset.element_id, ()),
                key=lambda item: (item.abbreviation, item.threat_id),
            )
        )
        assets.append(
            AssetSection(
                element_id=asset.element_id,
                element_name=asset.name,
                element_kind=asset.kind,
                lane_name=asset.lane_name,
                threats=threats,
            )
        )
        count = threat_model.per_element_counts.get(asset.element_id, 0)
        bucket = color_scale.classify(count)
        assignments.append(
            ColorAssignment(asset.element_id, count, bucket.label, bucket.color)
        )

    legend_ids: dict[str, AcceptedThreat] = {}
    for item in threat_model.accepted:
        legend_ids.setdefault(item.threat_id, item)
    legend = []
    for item in sorted(legend_ids.values(), key=lambda i: (i.abbreviation, i.threat_id)):
        spec = kb.threat_by_id(item.threat_id)
        legend.append(
            LegendEntry(
                abbreviation=item.abbreviation,
                threat_id=item.threat_id,
                name=item.threat_name,
                description=spec.description if spec else "",
            )
        )

    unfiltered = identify(
        session.model,
        kb,
        Objectives(principles=ALL_PRINCIPLES, process_name=session.process_name),
    )

    return ReportDocument(
        process_name=session.process_name,
        generated_at=clock.format_timestamp(now or clock.now_utc()),
        tool_version=tool_version or installed_version(),
        principles=tuple(
            sorted(session.objectives.principles, key=lambda p: p.value)
        ),
        notes=session.objectives.notes,
        summary=ReportSummary(
            unique_threat_count=threat_model.unique_threat_count,
            asset_count=threat_model.asset_count,
            accepted_count=len(threat_model.accepted),
            unfiltered_candidate_count=len(unfiltered),
            caveat=COUNT_CAVEAT,
        ),
        assets=tuple(assets),
        legend=tuple(legend),
        color_scale=color_scale,
        color_assignments=tuple(assignments),
        model_digest=threat_model.model_digest,
        catalog_digest=threat_model.catalog_digest,
    )


def export_json(report: ReportDocument) -> bytes:
    """Deterministic JSON rendering (camelCase keys, sorted, newline-ended)."""
    payload = {
        "formatVersion": REPORT_FORMAT_VERSION,
        "processName": report.process_name,
        "generatedAt": report.generated_at,
        "toolVersion": report.tool_version,
        "objectives": {
            "principles": [p.value for p in report.principles],
            "notes": report.notes,
        },
        "summary": {
            "uniqueThreatCount": report.summary.unique_threat_count,
            "assetCount": report.summary.asset_count,
            "acceptedCount": report.summary.accepted_count,
            "unfilteredCandidateCount": report.summary.unfiltered_candidate_count,
            "caveat": report.summary.caveat,
        },
        "assets": [
            {
                "elementId": section.element_id,
                "elementName": section.element_name,
                "elementKind": section.element_kind.value,
                "laneName": section.lane_name,
                "acceptedCount": len(section.threats),
                "threats": [
                    {
                        "candidateId": item.candidate_id,
                        "threatId": item.threat_id,
                        "abbreviation": item.abbreviation,
                        "name": item.threat_name,
                        "rationale": item.rationale,
                    }
                    for item in section.threats
                ],
            }
            for section in report.assets
        ],
        "legend": [
            {
                "abbreviation": entry.abbreviation,
                "threatId": entry.threat_id,
                "name": entry.name,
                "description": entry.description,
            }
            for entry in report.legend
        ],
        "colorScale": [
            {
                "label": bucket.label,
                "color": bucket.color,
                "min": bucket.lower,
                "max": bucket.upper,
            }
            for bucket in report.color_scale.buckets
        ],
        "colorAssignments": [
            {
                "elementId": assignment.element_id,
                "count": assignment.count,
                "label": assignment.label,
                "color": assignment.color,
            }
            for assignment in report.color_assignments
        ],
        "modelDigest": report.model_digest,
        "catalogDigest": report.catalog_digest,
    }
    try:
        return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("utf-8")
    except (TypeError, ValueError) as exc:
        raise SerializationFailure(f"report JSON export failed: {exc}") from exc


def report_from_json(data: bytes) -> ReportDocument:
    """Rebuild a ReportDocument from export_json() output (lossless)."""
    try:
        payload = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SerializationFailure(f"report file is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise SerializationFailure("report file root must be an object")
    version = payload.get("formatVersion")
    if version != REPORT_FORMAT_VERSION:
        raise SerializationFailure(f"unsupported report formatVersion {version!r}")
    try:
        summary = payload["summary"]
        return ReportDocument(
            process_name=payload["processName"],
            generated_at=payload["generatedAt"],
            tool_version=payload["toolVersion"],
            principles=tuple(
                parse_principle(name)
                for name in payload["objectives"]["principles"]
            ),
            notes=payload["objectives"]["notes"],
            summary=ReportSummary(
                unique_threat_count=summary["uniqueThreatCount"],
                asset_count=summary["assetCount"],
                accepted_count=summary["acceptedCount"],
                unfiltered_candidate_count=summary["unfilteredCandidateCount"],
                caveat=summary["caveat"],
            ),
            assets=tuple(
                AssetSection(
                    element_id=section["elementId"],
                    element_name=section["elementName"],
                    element_kind=ElementKind(section["elementKind"]),
                    lane_name=section["laneName"],
                    threats=tuple(
                        AcceptedThreat(
                            candidate_id=item["candidateId"],
                            threat_id=item["threatId"],
                            abbreviation=item["abbreviation"],
                            threat_name=item["name"],
                            element_id=section["elementId"],
                            element_name=section["elementName"],
                            element_kind=ElementKind(section["elementKind"]),
                            rationale=item["rationale"],
                        )
                        for item in section["threats"]
                    ),
                )
                for section in payload["assets"]
            ),
            legend=tuple(
                LegendEntry(
                    abbreviation=entry["abbreviation"],
                    threat_id=entry["threatId"],
                    name=entry["name"],
                    description=entry["description"],
                )
                for entry in payload["legend"]
            ),
            color_scale=ColorScale(
                tuple(
                    ColorBucket(
                        bucket["label"], bucket["color"], bucket["min"], bucket["max"]
                    )
                    for bucket in payload["colorScale"]
                )
            ),
            color_assignments=tuple(
                ColorAssignment(
                    element_id=assignment["elementId"],
                    count=assignment["count"],
                    label=assignment["label"],
                    color=assignment["color"],
                )
                for assignment in payload["colorAssignments"]
            ),
            model_digest=payload["modelDigest"],
            catalog_digest=payload["catalogDigest"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SerializationFailure(
            f"report file is missing or mistypes a field: {exc}"
        ) from exc


def export_markdown(report: ReportDocument) -> str:
    """Human-readable Markdown rendering."""
    lines = [
        f"# Threat model: {report.process_name}",
        "",
        f"- Generated: {report.generated_at}",
        f"- Tool version: {report.tool_version}",
        f"- Security objectives: {', '.join(p.value for p in report.principles)}",
        f"- Model digest: `{report.model_digest}`",
        f"- Catalog digest: `{report.catalog_digest}`",
    ]
    if report.notes:
        lines.append(f"- Notes: {report.notes}")
    lines += [
        "",
        "## Summary",
        "",
        f"- Unique threats: {report.summary.unique_threat_count}",
        f"- Assets analyzed: {report.summary.asset_count}",
        f"- Accepted threat instances: {report.summary.accepted_count}",
        f"- Candidates before filtering: {report.summary.unfiltered_candidate_count}",
        "",
        f"> {report.summary.caveat}",
        "",
        "## Assets",
    ]
    for section, assignment in zip(report.assets, report.color_assignments):
        lane = f", lane: {section.lane_name}" if section.lane_name else ""
        lines += [
            "",
            f"### {section.element_name} ({section.element_kind.value}{lane})",
            "",
            f"Accepted threats: {assignment.count} ({assignment.label})",
        ]
        if not section.threats:
            lines += ["", "_No accepted threats._"]
            continue
        lines += [
            "",
            "| Abbrev | Threat | Rationale |",
            "| --- | --- | --- |",
        ]
        for item in section.threats:
            rationale = item.rationale.replace("|", "\\|")
            lines.append(f"| {item.abbreviation} | {item.threat_name} | {rationale} |")
    lines += [
        "",
        "## Legend",
        "",
    ]
    if report.legend:
        lines += [
            "| Abbrev | Threat | Description |",
            "| --- | --- | --- |",
        ]
        for entry in report.legend:
            description = entry.description.replace("|", "\\|")
            lines.append(f"| {entry.abbreviation} | {entry.name} | {description} |")
    else:
        lines.append("_No accepted threats._")
    lines += [
        "",
        "## Color key",
        "",
        "| Label | Range | Color |",
        "| --- | --- | --- |",
    ]
    for bucket in report.color_scale.buckets:
        if bucket.upper is None:
            span = f"{bucket.lower}+"
        elif bucket.upper == bucket.lower:
            span = str(bucket.lower)
        else:
            span = f"{bucket.lower}-{bucket.upper}"
        lines.append(f"| {bucket.label} | {span} | `{bucket.color}` |")
    return "\n".join(lines) + "\n"


# --- SVG overlay -----------------------------------------------------------

_NODE_W = 150.0
_NODE_H = 64.0
_GAP_X = 60.0
_GAP_Y = 40.0
_MARGIN = 40.0


def _layered_layout(report: ReportDocument, model: ProcessModel) -> dict[str, Bounds]:
    """Fallback geometry when the model ships no diagram interchange data.

    Flow nodes get longest-path layers over the sequence-flow graph (left to
    right); data objects and stores sit in a band underneath. Ordering within
    a layer follows model order, so the result is deterministic.
    """
    flows = [
        element
        for element in model.elements
        if element.kind is ElementKind.SEQUENCE_FLOW
        and element.source_ref
        and element.target_ref
    ]
    node_ids = [
        element.id
        for element in model.elements
        if element.kind
        not in (
            ElementKind.SEQUENCE_FLOW,
            ElementKind.MESSAGE_FLOW,
            ElementKind.LANE,
            ElementKind.POOL,
            ElementKind.DATA_OBJECT,
            ElementKind.DATA_STORE,
        )
    ]
    successors: dict[str, list[str]] = {node: [] for node in node_ids}
    indegree: dict[str, int] = {node: 0 for node in node_ids}
    for flow in flows:
        if flow.source_ref in successors and flow.target_ref in indegree:
            successors[flow.source_ref].append(flow.target_ref)
            indegree[flow.target_ref] += 1

    # Longest-path layering via Kahn's algorithm; cycle leftovers are pushed
    # one past the deepest settled layer so the walk always terminates.
    layer: dict[str, int] = {node: 0 for node in node_ids}
    ready = [node for node in node_ids if indegree[node] == 0]
    remaining = dict(indegree)
    settled: list[str] = []
    while ready:
        node = ready.pop(0)
        settled.append(node)
        for successor in successors[node]:
            layer[successor] = max(layer[successor], layer[node] + 1)
            remaining[successor] -= 1
            if remaining[successor] == 0:
                ready.append(successor)
    unsettled = [node for node in node_ids if node not in set(settled)]
    if unsettled:
        deepest = max((layer[node] for node in settled), default=-1)
        for node in unsettled:
            layer[node] = deepest + 1

    rows: dict[int, int] = {}
    placed: dict[str, Bounds] = {}
    for node in node_ids:
        column = layer[node]
        row = rows.get(column, 0)
        rows[column] = row + 1
        placed[node] = Bounds(
            _MARGIN + column * (_NODE_W + _GAP_X),
            _MARGIN + row * (_NODE_H + _GAP_Y),
            _NODE_W,
            _NODE_H,
        )

    band_top = _MARGIN + max(rows.values(), default=0) * (_NODE_H + _GAP_Y) + _GAP_Y
    artifact_column = 0
    for element in model.elements:
        if element.kind in (ElementKind.DATA_OBJECT, ElementKind.DATA_STORE):
            placed[element.id] = Bounds(
                _MARGIN + artifact_column * (_NODE_W + _GAP_X),
                band_top,
                _NODE_W,
                _NODE_H,
            )
            artifact_column += 1
    return placed


def _format_number(value: float) -> str:
    return f"{value:g}"


def export_svg_overlay(report: ReportDocument, model: ProcessModel) -> str:
    """Render the analyzed assets as an SVG, tinted by the report's color
    assignments with an accepted-count badge per asset.

    Diagram-interchange coordinates are used when the model carries bounds
    for every asset; otherwise a computed left-to-right layout stands in.
    """
    asset_ids = [section.element_id for section in report.assets]
    colors = {a.element_id: a.color for a in report.color_assignments}
    counts = {a.element_id: a.count for a in report.color_assignments}

    if asset_ids and all(aid in model.diagram_bounds for aid in asset_ids):
        geometry = dict(model.diagram_bounds)
    else:
        geometry = _layered_layout(report, model)

    used = [geometry[aid] for aid in asset_ids if aid in geometry]
    if used:
        offset_x = min(box.x for box in used) - _MARGIN
        offset_y = min(box.y for box in used) - _MARGIN
        width = max(box.x + box.width for box in used) - offset_x + _MARGIN
        height = max(box.y + box.height for box in used) - offset_y + _MARGIN
    else:
        offset_x = offset_y = 0.0
        width = height = 2 * _MARGIN

    def shift(box: Bounds) -> Bounds:
        return Bounds(box.x - offset_x, box.y - offset_y, box.width, box.height)

    lines = [
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="0 0 {_format_number(width)} {_format_number(height)}" '
        f'width="{_format_number(width)}" height="{_format_number(height)}">',
        f"  <title>{escape(report.process_name)}</title>",
        '  <style>text { font-family: sans-serif; }</style>',
    ]

    rendered = {aid for aid in asset_ids if aid in geometry}
    for element in model.elements:
        if element.kind not in (ElementKind.SEQUENCE_FLOW, ElementKind.MESSAGE_FLOW):
            continue
        if element.source_ref not in rendered or element.target_ref not in rendered:
            continue
        source = shift(geometry[element.source_ref])
        target = shift(geometry[element.target_ref])
        dash = ' stroke-dasharray="6 4"' if element.kind is ElementKind.MESSAGE_FLOW else ""
        lines.append(
            f'  <line x1="{_format_number(source.x + source.width / 2)}" '
            f'y1="{_format_number(source.y + source.height / 2)}" '
            f'x2="{_format_number(target.x + target.width / 2)}" '
            f'y2="{_format_number(target.y + target.height / 2)}" '
            f'stroke="#999999" stroke-width="1.5"{dash}/>'
        )

    label_by_id = {section.element_id: section.element_name for section in report.assets}
    kind_by_id = {section.element_id: section.element_kind for section in report.assets}
    for aid in asset_ids:
        if aid not in geometry:
            continue
        box = shift(geometry[aid])
        color = colors.get(aid, "#ffffff")
        count = counts.get(aid, 0)
        label = label_by_id.get(aid, aid)
        shown = label if len(label) <= 22 else label[:21] + "…"
        rounding = (
            ' rx="16" ry="16"'
            if kind_by_id.get(aid)
            in (ElementKind.MESSAGE_CATCH_EVENT, ElementKind.MESSAGE_THROW_EVENT)
            else ' rx="6" ry="6"'
        )
        lines += [
            f"  <g data-element-id={quoteattr(aid)}>",
            f'    <rect x="{_format_number(box.x)}" y="{_format_number(box.y)}" '
            f'width="{_format_number(box.width)}" height="{_format_number(box.height)}" '
            f'fill="{color}" stroke="#333333" stroke-width="1.5"{rounding}>'
            f"<title>{escape(label)}</title></rect>",
            f'    <text x="{_format_number(box.x + box.width / 2)}" '
            f'y="{_format_number(box.y + box.height / 2 + 4)}" '
            f'text-anchor="middle" font-size="11">{escape(shown)}</text>',
            f'    <circle cx="{_format_number(box.x + box.width - 4)}" '
            f'cy="{_format_number(box.y + 4)}" r="10" fill="#1c1c1c"/>',
            f'    <text x="{_format_number(box.x + box.width - 4)}" '
            f'y="{_format_number(box.y + 8)}" text-anchor="middle" '
            f'font-size="10" fill="#ffffff">{count}</text>',
            "  </g>",
        ]
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_output(path: str | Path, data: bytes | str) -> None:
    """Write export bytes/text to disk, wrapping I/O errors."""
    try:
        if isinstance(data, str):
            Path(path).write_text(data, encoding="utf-8")
        else:
            Path(path).write_bytes(data)
    except OSError as exc:
        raise SerializationFailure(f"could not write {path}: {exc}") from exc
