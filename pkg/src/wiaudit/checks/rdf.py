"""RDF/XML validation: a document counts when it yields at least one triple.

The extractor walks the RDF/XML striped syntax (node elements alternating
with property elements) and materializes triples.  It covers the constructs
that occur in published RDF/XML: rdf:about/ID/nodeID subjects, typed nodes,
property attributes, rdf:resource references, nested node elements,
parseType Resource/Literal/Collection, rdf:li containers, and plain
literals.  RDFa and JSON-LD are out of scope by design.
"""

from __future__ import annotations

from dataclasses import dataclass
from urllib.parse import urlsplit

from ..criteria import CriterionId
from ..html_scan import parse_media_type
from ..snapshot import DiscoveredVia, SiteSnapshot
from ..xmlpos import XmlElement, XmlSyntaxError, parse_xml
from .results import CheckResult, Evidence, EvidenceKind, byte_locus

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
XML_NS = "http://www.w3.org/XML/1998/namespace"


def _rdf(local: str) -> str:
    return "{%s}%s" % (RDF_NS, local)


_RDF_RDF = _rdf("RDF")
_RDF_DESCRIPTION = _rdf("Description")
_RDF_ABOUT = _rdf("about")
_RDF_ID = _rdf("ID")
_RDF_NODEID = _rdf("nodeID")
_RDF_RESOURCE = _rdf("resource")
_RDF_PARSETYPE = _rdf("parseType")
_RDF_DATATYPE = _rdf("datatype")
_RDF_TYPE = _rdf("type")
_RDF_LI = _rdf("li")

# rdf:* attributes with syntactic meaning; everything else namespaced is a
# property attribute.
_SYNTAX_ATTRS = {
    _RDF_ABOUT,
    _RDF_ID,
    _RDF_NODEID,
    _RDF_RESOURCE,
    _RDF_PARSETYPE,
    _RDF_DATATYPE,
}

# Unqualified attribute names from pre-namespace RDF drafts; their presence
# means the document is not modern RDF/XML.
_LEGACY_BARE_ATTRS = {"about", "id", "nodeid", "resource", "parsetype", "datatype"}


class RdfStructureError(Exception):
    """Well-formed XML that is not interpretable as RDF/XML."""

    def __init__(self, message: str, byte_offset: int) -> None:
        super().__init__(f"{message} (byte {byte_offset})")
        self.message = message
        self.byte_offset = byte_offset


@dataclass(frozen=True)
class Triple:
    subject: str
    predicate: str
    object: str
    object_is_literal: bool = False


def _iri(clark_tag: str) -> str:
    ns, local = clark_tag[1:].split("}", 1)
    return ns + local


def _require_qualified(elem: XmlElement, role: str) -> None:
    if not elem.tag.startswith("{"):
        raise RdfStructureError(
            f"{role} <{elem.tag}> is not namespace-qualified", elem.offset
        )


class _TripleWalker:
    def __init__(self) -> None:
        self.triples: list[Triple] = []
        self._blank_count = 0

    def _blank(self) -> str:
        self._blank_count += 1
        return f"_:b{self._blank_count}"

    def _emit(self, s: str, p: str, o: str, literal: bool = False) -> None:
        self.triples.append(Triple(subject=s, predicate=p, object=o, object_is_literal=literal))

    def document(self, root: XmlElement) -> None:
        if root.tag == _RDF_RDF:
            for child in root.children:
                self.node_element(child)
        else:
            self.node_element(root)

    def _property_attrs(self, elem: XmlElement) -> dict[str, str]:
        attrs: dict[str, str] = {}
        for name, value in elem.attrs.items():
            if name in _SYNTAX_ATTRS or name == _RDF_TYPE:
                continue
            if name.startswith("{" + XML_NS):
                continue
            if not name.startswith("{"):
                if name.lower() in _LEGACY_BARE_ATTRS:
                    raise RdfStructureError(
                        f"attribute {name!r} must be namespace-qualified", elem.offset
                    )
                continue  # foreign unqualified attribute: yields no triple
            attrs[name] = value
        return attrs

    def node_element(self, elem: XmlElement) -> str:
        _require_qualified(elem, "node element")
        attrs = elem.attrs
        if _RDF_ABOUT in attrs:
            subject = attrs[_RDF_ABOUT]
        elif _RDF_ID in attrs:
            subject = f"#{attrs[_RDF_ID]}"
        elif _RDF_NODEID in attrs:
            subject = f"_:{attrs[_RDF_NODEID]}"
        else:
            subject = self._blank()

        if elem.tag != _RDF_DESCRIPTION:
            self._emit(subject, _iri(_RDF_TYPE), _iri(elem.tag))
        if _RDF_TYPE in attrs:
            self._emit(subject, _iri(_RDF_TYPE), attrs[_RDF_TYPE])
        for name, value in self._property_attrs(elem).items():
            self._emit(subject, _iri(name), value, literal=True)

        li_index = 0
        for prop in elem.children:
            li_index = self.property_element(subject, prop, li_index)
        return subject

    def property_element(self, subject: str, prop: XmlElement, li_index: int) -> int:
        _require_qualified(prop, "property element")
        if prop.tag == _RDF_LI:
            li_index += 1
            predicate = f"{RDF_NS}_{li_index}"
        else:
            predicate = _iri(prop.tag)
        attrs = prop.attrs
        parse_type = attrs.get(_RDF_PARSETYPE)
        prop_attrs = self._property_attrs(prop)

        if parse_type == "Resource":
            inner = self._blank()
            self._emit(subject, predicate, inner)
            nested_li = 0
            for child in prop.children:
                nested_li = self.property_element(inner, child, nested_li)
        elif parse_type == "Literal":
            self._emit(subject, predicate, prop.text, literal=True)
        elif parse_type == "Collection":
            members = [self.node_element(child) for child in prop.children]
            if not members:
                self._emit(subject, predicate, f"{RDF_NS}nil")
            else:
                cells = [self._blank() for _ in members]
                self._emit(subject, predicate, cells[0])
                for i, member in enumerate(members):
                    self._emit(cells[i], f"{RDF_NS}first", member)
                    rest = cells[i + 1] if i + 1 < len(cells) else f"{RDF_NS}nil"
                    self._emit(cells[i], f"{RDF_NS}rest", rest)
        elif _RDF_RESOURCE in attrs:
            target = attrs[_RDF_RESOURCE]
            self._emit(subject, predicate, target)
            for name, value in prop_attrs.items():
                self._emit(target, _iri(name), value, literal=True)
        elif _RDF_NODEID in attrs:
            self._emit(subject, predicate, f"_:{attrs[_RDF_NODEID]}")
        elif prop.children:
            for child in prop.children:
                self._emit(subject, predicate, self.node_element(child))
        elif prop_attrs:
            inner = self._blank()
            self._emit(subject, predicate, inner)
            for name, value in prop_attrs.items():
                self._emit(inner, _iri(name), value, literal=True)
        else:
            self._emit(subject, predicate, prop.text, literal=True)
        return li_index


def extract_triples(root: XmlElement) -> list[Triple]:
    """Triples of a parsed RDF/XML tree; RdfStructureError when it is not RDF."""
    walker = _TripleWalker()
    walker.document(root)
    return walker.triples


def parse_triples(data: bytes) -> list[Triple]:
    return extract_triples(parse_xml(data))


# ---------------------------------------------------------------------------
# Checker
# ---------------------------------------------------------------------------


def _is_rdf_candidate(record) -> bool:
    base, _ = parse_media_type(record.media_type)
    if base == "application/rdf+xml":
        return True
    if urlsplit(record.url).path.lower().endswith(".rdf"):
        return True
    return record.discovered_via is DiscoveredVia.ALTERNATE_LINK


def validate_rdf(snapshot: SiteSnapshot) -> CheckResult:
    """Criterion C6_3: at least one candidate document is valid RDF/XML."""
    evidence: list[Evidence] = []
    candidates: list[str] = []
    valid: list[str] = []
    for record in snapshot.resources:
        if not record.fetched_ok or not _is_rdf_candidate(record):
            continue
        candidates.append(record.url)
        body = snapshot.body(record)
        try:
            root = parse_xml(body)
            triples = extract_triples(root)
        except XmlSyntaxError as exc:
            evidence.append(
                Evidence(
                    kind=EvidenceKind.DOCUMENT,
                    resource_url=record.url,
                    detail=f"not well-formed XML: {exc.message}",
                    exact_locus=byte_locus(exc.byte_offset),
                )
            )
            continue
        except RdfStructureError as exc:
            evidence.append(
                Evidence(
                    kind=EvidenceKind.DOCUMENT,
                    resource_url=record.url,
                    detail=f"not RDF/XML: {exc.message}",
                    exact_locus=byte_locus(exc.byte_offset),
                )
            )
            continue
        if triples:
            valid.append(record.url)
            evidence.append(
                Evidence(
                    kind=EvidenceKind.DOCUMENT,
                    resource_url=record.url,
                    detail=f"RDF/XML document yielding {len(triples)} triples",
                    exact_locus=byte_locus(root.offset),
                )
            )
        else:
            evidence.append(
                Evidence(
                    kind=EvidenceKind.DOCUMENT,
                    resource_url=record.url,
                    detail="well-formed XML but yields 0 RDF triples",
                    exact_locus=byte_locus(root.offset),
                )
            )
    return CheckResult(
        criterion=CriterionId.C6_3,
        value=1 if valid else 0,
        evidence=tuple(evidence),
        details={"candidates": candidates, "valid": valid},
    )
