"""Minimal angle-bracket markup scanner shared by the format codecs.

The archive's interchange documents use a small XML-like surface syntax:
elements with quoted attributes, self-closing tags, character entities.
Documents are fragments (no prolog, possibly several roots), so a real
XML parser is deliberately not used; this scanner only needs tag
boundaries, attributes, and character offsets in the markup-stripped
text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError

TAG_RE = re.compile(r"<(/?)([A-Za-z_][\w.-]*)((?:[^>\"']|\"[^\"]*\"|'[^']*')*?)(/?)>")
ATTR_RE = re.compile(r"([\w:.-]+)\s*=\s*(\"[^\"]*\"|'[^']*')")

_ENTITIES = {"&amp;": "&", "&lt;": "<", "&gt;": ">", "&quot;": '"', "&apos;": "'"}


def unescape(text: str) -> str:
    for entity, char in _ENTITIES.items():
        text = text.replace(entity, char)
    return text


def escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def parse_attrs(raw: str) -> dict[str, str]:
    return {m.group(1): unescape(m.group(2)[1:-1]) for m in ATTR_RE.finditer(raw)}


@dataclass
class Tag:
    """One tag occurrence: ``kind`` is 'open', 'close' or 'selfclose'."""

    kind: str
    name: str
    attrs: dict[str, str]
    line: int


def iter_tags(doc: str):
    """Yield (text_before, Tag) pairs, then a final (tail_text, None)."""
    pos = 0
    for m in TAG_RE.finditer(doc):
        slash, name, raw_attrs, selfslash = m.groups()
        if slash and selfslash:
            raise ParseError(f"malformed tag {m.group(0)!r}",
                             line=doc.count("\n", 0, m.start()) + 1)
        kind = "close" if slash else ("selfclose" if selfslash else "open")
        yield doc[pos:m.start()], Tag(
            kind=kind,
            name=name,
            attrs=parse_attrs(raw_attrs) if not slash else {},
            line=doc.count("\n", 0, m.start()) + 1,
        )
        pos = m.end()
    yield doc[pos:], None


@dataclass
class Element:
    """Element extent over the markup-stripped character stream."""

    name: str
    attrs: dict[str, str]
    start: int
    end: int
    depth: int
    line: int


def strip_markup(doc: str) -> tuple[str, list[Element]]:
    """Remove markup, keeping each element's extent in the stripped text.

    Returns the concatenated character data (entities resolved) and the
    elements in document order of their start tags.  Unbalanced close
    tags raise :class:`ParseError`.
    """
    out: list[str] = []
    length = 0
    stack: list[Element] = []
    done: list[tuple[int, Element]] = []
    order = 0
    for text, tag in iter_tags(doc):
        if text:
            plain = unescape(text)
            out.append(plain)
            length += len(plain)
        if tag is None:
            break
        if tag.kind == "open":
            el = Element(tag.name, tag.attrs, length, length, len(stack), tag.line)
            stack.append(el)
            done.append((order, el))
            order += 1
        elif tag.kind == "selfclose":
            el = Element(tag.name, tag.attrs, length, length, len(stack), tag.line)
            done.append((order, el))
            order += 1
        else:
            if not stack or stack[-1].name != tag.name:
                raise ParseError(
                    f"unexpected closing tag </{tag.name}>", line=tag.line)
            el = stack.pop()
            el.end = length
    if stack:
        raise ParseError(f"unclosed element <{stack[-1].name}>",
                         line=stack[-1].line)
    done.sort(key=lambda pair: pair[0])
    return "".join(out), [el for _, el in done]
