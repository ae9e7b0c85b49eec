"""XML parsing that keeps byte offsets, so evidence can cite exact loci.

The stdlib tree parsers drop positions; this thin expat wrapper builds a
minimal element tree where every element remembers the byte offset of its
opening '<' in the original document.
"""

from __future__ import annotations

import xml.parsers.expat as expat
from dataclasses import dataclass, field


class XmlSyntaxError(Exception):
    """Document is not well-formed; byte_offset locates the first fatal error."""

    def __init__(self, message: str, byte_offset: int) -> None:
        super().__init__(f"{message} (byte {byte_offset})")
        self.message = message
        self.byte_offset = byte_offset


def _clark(name: str) -> str:
    # expat reports namespaced names as "uri local"; fold to "{uri}local"
    if " " in name:
        uri, local = name.rsplit(" ", 1)
        return "{%s}%s" % (uri, local)
    return name


@dataclass
class XmlElement:
    tag: str
    attrs: dict[str, str]
    offset: int
    children: list["XmlElement"] = field(default_factory=list)
    text_parts: list[str] = field(default_factory=list)

    @property
    def text(self) -> str:
        return "".join(self.text_parts)

    def find_all(self, tag: str) -> list["XmlElement"]:
        return [child for child in self.children if child.tag == tag]

    def first(self, tag: str) -> "XmlElement | None":
        for child in self.children:
            if child.tag == tag:
                return child
        return None

    @property
    def namespace(self) -> str:
        if self.tag.startswith("{"):
            return self.tag[1 : self.tag.index("}")]
        return ""

    @property
    def local_name(self) -> str:
        return self.tag.rsplit("}", 1)[-1]


def parse_xml(data: bytes) -> XmlElement:
    """Parse bytes into an offset-aware tree; XmlSyntaxError when malformed."""
    parser = expat.ParserCreate(namespace_separator=" ")
    stack: list[XmlElement] = []
    root: list[XmlElement] = []

    def start(name: str, attrs: dict[str, str]) -> None:
        elem = XmlElement(
            tag=_clark(name),
            attrs={_clark(k): v for k, v in attrs.items()},
            offset=parser.CurrentByteIndex,
        )
        if stack:
            stack[-1].children.append(elem)
        else:
            root.append(elem)
        stack.append(elem)

    def end(_name: str) -> None:
        stack.pop()

    def chars(data_: str) -> None:
        if stack:
            stack[-1].text_parts.append(data_)

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    try:
        parser.Parse(data, True)
    except expat.ExpatError as exc:
        offset = parser.ErrorByteIndex if parser.ErrorByteIndex >= 0 else 0
        raise XmlSyntaxError(expat.errors.messages[exc.code], offset) from None
    if not root:
        raise XmlSyntaxError("document has no root element", 0)
    return root[0]
