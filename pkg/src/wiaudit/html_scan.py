"""Tolerant HTML feature scanner built on the stdlib parser.

Checkers never re-parse markup themselves; they read the features collected
here.  Offsets are character offsets into the decoded text, convertible to
byte offsets for evidence loci.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from html.parser import HTMLParser

_CHARSET_PARAM = re.compile(r"charset\s*=\s*\"?([A-Za-z0-9_.:-]+)\"?", re.IGNORECASE)

# Attributes that pull in an external resource when the page is rendered.
_EMBED_ATTRS: dict[str, str] = {
    "img": "src",
    "script": "src",
    "iframe": "src",
    "embed": "src",
    "source": "src",
    "audio": "src",
    "video": "src",
    "object": "data",
}


def parse_media_type(value: str) -> tuple[str, dict[str, str]]:
    """Split 'text/html; charset=utf-8' into ('text/html', {'charset': 'utf-8'})."""
    parts = value.split(";")
    base = parts[0].strip().lower()
    params: dict[str, str] = {}
    for part in parts[1:]:
        name, _, val = part.partition("=")
        if _:
            params[name.strip().lower()] = val.strip().strip('"')
    return base, params


def is_html_media(media_type: str) -> bool:
    base, _ = parse_media_type(media_type)
    return base in ("text/html", "application/xhtml+xml")


def declared_charsets(media_type: str, body: bytes) -> list[str]:
    """Every charset the document declares: header param, meta charset, XML decl."""
    found: list[str] = []
    _, params = parse_media_type(media_type)
    if "charset" in params:
        found.append(params["charset"].lower())
    head = body[:2048]
    for match in re.finditer(rb"<meta[^>]+>", head, re.IGNORECASE):
        m = _CHARSET_PARAM.search(match.group(0).decode("ascii", "replace"))
        if m:
            found.append(m.group(1).lower())
    xmldecl = re.match(rb"^\xef\xbb\xbf?\s*<\?xml[^>]*encoding=[\"']([A-Za-z0-9_.:-]+)[\"']", head)
    if xmldecl:
        found.append(xmldecl.group(1).decode("ascii", "replace").lower())
    return found


def decode_text(body: bytes, media_type: str) -> tuple[str, str]:
    """Decode a text resource using its declared charset (UTF-8 otherwise).

    Raises UnicodeDecodeError when the bytes do not conform; callers that
    need tolerance decode with errors='replace' themselves.
    """
    charsets = declared_charsets(media_type, body)
    encoding = charsets[0] if charsets else "utf-8"
    try:
        return body.decode(encoding), encoding
    except LookupError:
        return body.decode("utf-8"), "utf-8"


def to_byte_offset(text: str, char_offset: int, encoding: str) -> int:
    """Byte offset of a character position under the document's encoding."""
    try:
        return len(text[:char_offset].encode(encoding))
    except (LookupError, UnicodeEncodeError):
        return char_offset


@dataclass(frozen=True)
class Tag:
    """One observed markup feature: element name, attributes, char offset."""

    name: str
    attrs: dict[str, str]
    offset: int
    text: str = ""

    def attr(self, name: str) -> str | None:
        return self.attrs.get(name)

    def rel_tokens(self) -> frozenset[str]:
        return frozenset((self.attrs.get("rel") or "").lower().split())


@dataclass
class HtmlScan:
    """Everything the checkers need to know about one HTML document."""

    doctype: str | None = None
    doctype_offset: int = -1
    title: str | None = None
    title_offset: int = -1
    lang: str | None = None
    headings: list[Tag] = field(default_factory=list)
    metas: list[Tag] = field(default_factory=list)
    links: list[Tag] = field(default_factory=list)
    anchors: list[Tag] = field(default_factory=list)
    images: list[Tag] = field(default_factory=list)
    forms: list[Tag] = field(default_factory=list)
    frames: list[Tag] = field(default_factory=list)
    embeds: list[Tag] = field(default_factory=list)
    targets: list[Tag] = field(default_factory=list)
    rdfa_properties: list[Tag] = field(default_factory=list)
    microdata_items: list[Tag] = field(default_factory=list)

    def meta_named(self, name: str) -> list[Tag]:
        wanted = name.lower()
        return [m for m in self.metas if (m.attr("name") or "").lower() == wanted]

    def meta_http_equiv(self, name: str) -> list[Tag]:
        wanted = name.lower()
        return [m for m in self.metas if (m.attr("http-equiv") or "").lower() == wanted]


class _Collector(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.scan = HtmlScan()
        self._line_starts: list[int] = [0]
        self._capture: Tag | None = None
        self._capture_parts: list[str] = []

    # -- offsets ------------------------------------------------------------

    def feed_text(self, text: str) -> HtmlScan:
        starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                starts.append(i + 1)
        self._line_starts = starts
        self.feed(text)
        self.close()
        self._flush_capture()
        return self.scan

    def _offset(self) -> int:
        line, col = self.getpos()
        return self._line_starts[line - 1] + col

    # -- capture of element text (title, headings) ---------------------------

    def _begin_capture(self, tag: Tag) -> None:
        self._flush_capture()
        self._capture = tag
        self._capture_parts = []

    def _flush_capture(self) -> None:
        if self._capture is None:
            return
        tag = self._capture
        text = "".join(self._capture_parts).strip()
        done = Tag(name=tag.name, attrs=tag.attrs, offset=tag.offset, text=text)
        if tag.name == "title" and self.scan.title is None:
            self.scan.title = text
            self.scan.title_offset = tag.offset
        elif tag.name.startswith("h"):
            self.scan.headings.append(done)
        self._capture = None
        self._capture_parts = []

    def handle_data(self, data: str) -> None:
        if self._capture is not None:
            self._capture_parts.append(data)

    # -- declarations and tags ------------------------------------------------

    def handle_decl(self, decl: str) -> None:
        if decl.lower().startswith("doctype") and self.scan.doctype is None:
            self.scan.doctype = decl
            self.scan.doctype_offset = self._offset()

    def handle_starttag(self, name: str, attrlist: list[tuple[str, str | None]]) -> None:
        attrs = {k: (v if v is not None else "") for k, v in attrlist}
        tag = Tag(name=name, attrs=attrs, offset=self._offset())
        scan = self.scan

        if name == "html" and scan.lang is None:
            scan.lang = attrs.get("lang") or attrs.get("xml:lang")
        elif name == "title" or name in ("h1", "h2", "h3", "h4", "h5", "h6"):
            self._begin_capture(tag)
        elif name == "meta":
            scan.metas.append(tag)
        elif name == "link":
            scan.links.append(tag)
            if "stylesheet" in tag.rel_tokens() and attrs.get("href"):
                scan.embeds.append(tag)
        elif name == "a":
            scan.anchors.append(tag)
        elif name == "img":
            scan.images.append(tag)
            if attrs.get("src"):
                scan.embeds.append(tag)
        elif name == "form":
            scan.forms.append(tag)
        elif name in ("frame", "frameset", "iframe"):
            scan.frames.append(tag)
        elif name == "input" and attrs.get("type", "").lower() == "image" and attrs.get("src"):
            scan.embeds.append(tag)

        if name in _EMBED_ATTRS and name not in ("img",) and attrs.get(_EMBED_ATTRS[name]):
            scan.embeds.append(tag)
        if "target" in attrs:
            scan.targets.append(tag)
        if "property" in attrs and attrs["property"]:
            scan.rdfa_properties.append(tag)
        if "itemprop" in attrs and attrs["itemprop"]:
            scan.microdata_items.append(tag)

    def handle_startendtag(self, name: str, attrlist: list[tuple[str, str | None]]) -> None:
        self.handle_starttag(name, attrlist)

    def handle_endtag(self, name: str) -> None:
        if self._capture is not None and name == self._capture.name:
            self._flush_capture()


def scan_html(text: str) -> HtmlScan:
    """Parse markup tolerantly and collect the features checkers care about."""
    return _Collector().feed_text(text)


def embed_url(tag: Tag) -> str | None:
    """The external URL an embed-type tag pulls in, if any."""
    if tag.name == "link":
        return tag.attr("href")
    return tag.attr(_EMBED_ATTRS.get(tag.name, "src"))
