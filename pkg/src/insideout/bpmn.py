"""BPMN 2.0 parsing: turn process diagrams into an element model and pull out
the assets that involve human interaction (tasks, data objects/stores, message
send/receive points)."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, NamedTuple
from xml.etree import ElementTree as ET

MODEL_NS = "http://www.omg.org/spec/BPMN/20100524/MODEL"
_DI_NS = "http://www.omg.org/spec/BPMN/20100524/DI"
_DC_NS = "http://www.omg.org/spec/DD/20100524/DC"


class BpmnError(Exception):
    """Base class for BPMN model failures."""


class MalformedXml(BpmnError):
    """Input is not well-formed XML, or flows reference elements that do not exist."""


class NotBpmn(BpmnError):
    """Input is well-formed XML but not a BPMN 2.0 definitions document."""


class DuplicateId(BpmnError):
    """Two elements in the same document share an id."""


class ElementKind(str, Enum):
    """Classification of a BPMN element. Tags outside the supported subset map
    to UNKNOWN; the original tag is kept on the element either way."""

    USER_TASK = "UserTask"
    MANUAL_TASK = "ManualTask"
    SERVICE_TASK = "ServiceTask"
    SCRIPT_TASK = "ScriptTask"
    SEND_TASK = "SendTask"
    RECEIVE_TASK = "ReceiveTask"
    GENERIC_TASK = "GenericTask"
    MESSAGE_CATCH_EVENT = "MessageCatchEvent"
    MESSAGE_THROW_EVENT = "MessageThrowEvent"
    START_EVENT = "StartEvent"
    END_EVENT = "EndEvent"
    GATEWAY = "Gateway"
    DATA_OBJECT = "DataObject"
    DATA_STORE = "DataStore"
    SEQUENCE_FLOW = "SequenceFlow"
    MESSAGE_FLOW = "MessageFlow"
    LANE = "Lane"
    POOL = "Pool"
    UNKNOWN = "Unknown"


#: Element kinds that represent a human-interaction surface and therefore
#: qualify as analyzable assets.
ANALYZABLE_KINDS: frozenset[ElementKind] = frozenset(
    {
        ElementKind.USER_TASK,
        ElementKind.MANUAL_TASK,
        ElementKind.GENERIC_TASK,
        ElementKind.SEND_TASK,
        ElementKind.RECEIVE_TASK,
        ElementKind.MESSAGE_CATCH_EVENT,
        ElementKind.MESSAGE_THROW_EVENT,
        ElementKind.DATA_OBJECT,
        ElementKind.DATA_STORE,
    }
)

#: Task-family kinds (used for reporting/diagnostics, not for asset selection).
TASK_KINDS: frozenset[ElementKind] = frozenset(
    {
        ElementKind.USER_TASK,
        ElementKind.MANUAL_TASK,
        ElementKind.SERVICE_TASK,
        ElementKind.SCRIPT_TASK,
        ElementKind.SEND_TASK,
        ElementKind.RECEIVE_TASK,
        ElementKind.GENERIC_TASK,
    }
)

_SIMPLE_TAG_KINDS: dict[str, ElementKind] = {
    "userTask": ElementKind.USER_TASK,
    "manualTask": ElementKind.MANUAL_TASK,
    "serviceTask": ElementKind.SERVICE_TASK,
    "scriptTask": ElementKind.SCRIPT_TASK,
    "sendTask": ElementKind.SEND_TASK,
    "receiveTask": ElementKind.RECEIVE_TASK,
    "task": ElementKind.GENERIC_TASK,
    "startEvent": ElementKind.START_EVENT,
    "endEvent": ElementKind.END_EVENT,
    "exclusiveGateway": ElementKind.GATEWAY,
    "parallelGateway": ElementKind.GATEWAY,
    "inclusiveGateway": ElementKind.GATEWAY,
    "eventBasedGateway": ElementKind.GATEWAY,
    "complexGateway": ElementKind.GATEWAY,
    "dataObject": ElementKind.DATA_OBJECT,
    "dataObjectReference": ElementKind.DATA_OBJECT,
    "dataStore": ElementKind.DATA_STORE,
    "dataStoreReference": ElementKind.DATA_STORE,
    "sequenceFlow": ElementKind.SEQUENCE_FLOW,
    "messageFlow": ElementKind.MESSAGE_FLOW,
    "lane": ElementKind.LANE,
    "participant": ElementKind.POOL,
}


class Bounds(NamedTuple):
    """Diagram-interchange bounds of one shape."""

    x: float
    y: float
    width: float
    height: float


@dataclass(frozen=True)
class ProcessElement:
    """One parsed BPMN element. Flow endpoints are only set for flows."""

    id: str
    name: str
    kind: ElementKind
    tag: str
    lane_id: str | None = None
    incoming: tuple[str, ...] = ()
    outgoing: tuple[str, ...] = ()
    source_ref: str | None = None
    target_ref: str | None = None


@dataclass(frozen=True)
class LaneRecord:
    """A swim lane or pool, as listed in ProcessModel.lanes."""

    id: str
    name: str
    kind: str  # "lane" or "pool"


@dataclass(frozen=True)
class ProcessModel:
    """Immutable parse result. ``raw_xml`` keeps the input bytes verbatim so
    the model can be re-exported without loss."""

    model_id: str
    source_digest: str
    elements: tuple[ProcessElement, ...]
    lanes: tuple[LaneRecord, ...]
    raw_xml: bytes
    diagram_bounds: dict[str, Bounds]
    process_names: tuple[str, ...] = ()

    def element_by_id(self, element_id: str) -> ProcessElement | None:
        return self._index().get(element_id)

    def _index(self) -> dict[str, ProcessElement]:
        # Cached lazily; the dataclass is frozen so the index never goes stale.
        index = getattr(self, "_element_index", None)
        if index is None:
            index = {element.id: element for element in self.elements}
            object.__setattr__(self, "_element_index", index)
        return index


@dataclass(frozen=True)
class AnalyzableAsset:
    """A process element worth querying the threat catalog for."""

    element_id: str
    name: str
    kind: ElementKind
    lane_name: str | None = None


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _namespace(tag: str) -> str:
    if tag.startswith("{"):
        return tag[1 : tag.index("}")]
    return ""


class _Collector:
    """Accumulates element records in document order during the parse walk."""

    def __init__(self) -> None:
        self.records: list[dict] = []
        self.lanes: list[LaneRecord] = []
        self.lane_of: dict[str, str] = {}
        self.seen_ids: set[str] = set()
        self._anon = 0

    def add(self, node: ET.Element, kind: ElementKind) -> str:
        element_id = node.get("id")
        if element_id is None:
            self._anon += 1
            element_id = f"_anonymous{self._anon}"
        if element_id in self.seen_ids:
            raise DuplicateId(f"duplicate element id {element_id!r}")
        self.seen_ids.add(element_id)
        self.records.append(
            {
                "id": element_id,
                "name": node.get("name", ""),
                "kind": kind,
                "tag": _local(node.tag),
                "source_ref": node.get("sourceRef"),
                "target_ref": node.get("targetRef"),
            }
        )
        return element_id


def _iter_child_elements(node: ET.Element) -> Iterator[ET.Element]:
    for child in node:
        if isinstance(child.tag, str):
            yield child


def _event_kind(node: ET.Element, *, catching: bool) -> ElementKind:
    for sub in _iter_child_elements(node):
        if _local(sub.tag) == "messageEventDefinition":
            return (
                ElementKind.MESSAGE_CATCH_EVENT
                if catching
                else ElementKind.MESSAGE_THROW_EVENT
            )
    return ElementKind.UNKNOWN


def _classify(node: ET.Element) -> ElementKind:
    if _namespace(node.tag) != MODEL_NS:
        return ElementKind.UNKNOWN
    local = _local(node.tag)
    if local == "intermediateCatchEvent":
        return _event_kind(node, catching=True)
    if local == "intermediateThrowEvent":
        return _event_kind(node, catching=False)
    return _SIMPLE_TAG_KINDS.get(local, ElementKind.UNKNOWN)


def _walk_lane_set(lane_set: ET.Element, collector: _Collector) -> None:
    collector.add(lane_set, ElementKind.UNKNOWN)
    for lane in _iter_child_elements(lane_set):
        if _local(lane.tag) != "lane":
            collector.add(lane, _classify(lane))
            continue
        lane_id = collector.add(lane, ElementKind.LANE)
        collector.lanes.append(LaneRecord(lane_id, lane.get("name", ""), "lane"))
        for ref in _iter_child_elements(lane):
            local = _local(ref.tag)
            if local == "flowNodeRef" and ref.text and ref.text.strip():
                collector.lane_of[ref.text.strip()] = lane_id
            elif local == "childLaneSet":
                _walk_lane_set(ref, collector)


def _walk_container(container: ET.Element, collector: _Collector) -> None:
    for child in _iter_child_elements(container):
        local = _local(child.tag)
        if local in ("laneSet", "childLaneSet") and _namespace(child.tag) == MODEL_NS:
            _walk_lane_set(child, collector)
            continue
        kind = _classify(child)
        element_id = collector.add(child, kind)
        if local == "participant" and _namespace(child.tag) == MODEL_NS:
            collector.lanes.append(
                LaneRecord(element_id, child.get("name", ""), "pool")
            )
        if local == "subProcess" and _namespace(child.tag) == MODEL_NS:
            _walk_container(child, collector)


def _collect_diagram_bounds(root: ET.Element) -> dict[str, Bounds]:
    bounds: dict[str, Bounds] = {}
    for shape in root.iter(f"{{{_DI_NS}}}BPMNShape"):
        ref = shape.get("bpmnElement")
        if not ref or ref in bounds:
            continue
        box = shape.find(f"{{{_DC_NS}}}Bounds")
        if box is None:
            continue
        try:
            bounds[ref] = Bounds(
                float(box.get("x", "")),
                float(box.get("y", "")),
                float(box.get("width", "")),
                float(box.get("height", "")),
            )
        except ValueError:
            continue
    return bounds


def parse_bpmn(xml_bytes: bytes) -> ProcessModel:
    """Parse BPMN 2.0 XML bytes into a ProcessModel.

    Every child element of a process, collaboration, laneSet, or subProcess
    node becomes exactly one ProcessElement; unsupported tags are kept with
    kind UNKNOWN rather than dropped. The input bytes are retained verbatim
    for round-trip export.

    Raises MalformedXml, NotBpmn, or DuplicateId.
    """
    try:
        root = ET.fromstring(xml_bytes)
    except ET.ParseError as exc:
        raise MalformedXml(f"not well-formed XML: {exc}") from exc

    if _local(root.tag) != "definitions" or _namespace(root.tag) != MODEL_NS:
        raise NotBpmn(
            "root element is not a BPMN 2.0 definitions node "
            f"(got {root.tag!r}, expected definitions in {MODEL_NS})"
        )

    collector = _Collector()
    process_names: list[str] = []
    for child in _iter_child_elements(root):
        if _namespace(child.tag) != MODEL_NS:
            continue
        if _local(child.tag) in ("process", "collaboration"):
            name = child.get("name", "").strip()
            if name:
                process_names.append(name)
            _walk_container(child, collector)

    incoming: dict[str, list[str]] = {}
    outgoing: dict[str, list[str]] = {}
    for record in collector.records:
        if record["kind"] not in (ElementKind.SEQUENCE_FLOW, ElementKind.MESSAGE_FLOW):
            continue
        for attr, bucket in (("source_ref", outgoing), ("target_ref", incoming)):
            ref = record[attr]
            if ref is None or ref not in collector.seen_ids:
                raise MalformedXml(
                    f"flow {record['id']!r} references unknown element {ref!r}"
                )
            bucket.setdefault(ref, []).append(record["id"])

    elements = tuple(
        ProcessElement(
            id=record["id"],
            name=record["name"],
            kind=record["kind"],
            tag=record["tag"],
            lane_id=collector.lane_of.get(record["id"]),
            incoming=tuple(incoming.get(record["id"], ())),
            outgoing=tuple(outgoing.get(record["id"], ())),
            source_ref=record["source_ref"],
            target_ref=record["target_ref"],
        )
        for record in collector.records
    )

    digest = hashlib.sha256(xml_bytes).hexdigest()
    return ProcessModel(
        model_id=root.get("id") or f"model-{digest[:12]}",
        source_digest=digest,
        elements=elements,
        lanes=tuple(collector.lanes),
        raw_xml=bytes(xml_bytes),
        diagram_bounds=_collect_diagram_bounds(root),
        process_names=tuple(process_names),
    )


def extract_assets(model: ProcessModel) -> list[AnalyzableAsset]:
    """Return the human-interaction elements of the model, in model order.

    Gateways, plain start/end events, flows, and structural elements are
    excluded. Nameless elements fall back to their id for display.
    """
    lane_names = {lane.id: lane.name for lane in model.lanes}
    assets = []
    for element in model.elements:
        if element.kind not in ANALYZABLE_KINDS:
            continue
        lane_name = lane_names.get(element.lane_id) if element.lane_id else None
        assets.append(
            AnalyzableAsset(
                element_id=element.id,
                name=element.name or element.id,
                kind=element.kind,
                lane_name=lane_name or None,
            )
        )
    return assets


def serialize_model(model: ProcessModel) -> bytes:
    """Return the retained input bytes unmodified (byte-identical round trip)."""
    return model.raw_xml
