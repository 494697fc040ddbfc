"""Line-oriented manifest persistence.

Each corpus directory holds one ``manifest`` file: blocks of
``key: value`` lines separated by blank lines, opened by the
``archive-format: 1`` preamble.  A block's first key names its type
(corpus, level, resource, version).  Values escape backslash and
newline so the format stays strictly line-oriented.
"""

from __future__ import annotations

from .errors import StoreError
from .model import Corpus, Level, Resource
from .versioning import Classification, VersionRecord

ARCHIVE_FORMAT = "1"

_BLOCK_KEYS = {
    "corpus": {"corpus", "title", "language", "fingerprint", "created"},
    "level": {"level", "corpus", "kind", "coverage", "created", "depends-on"},
    "resource": {"resource", "corpus", "format", "file", "levels", "depositor",
                 "deposited", "validated", "validator", "sha256", "size",
                 "available"},
    "version": {"version", "corpus", "kind", "level", "resource", "number",
                "classification", "granularity", "validated", "validator",
                "coverage", "variant-group", "supersedes", "created"},
}


def escape_value(value: str) -> str:
    return value.replace("\\", "\\\\").replace("\n", "\\n")


def unescape_value(value: str) -> str:
    out = []
    i = 0
    while i < len(value):
        ch = value[i]
        if ch == "\\" and i + 1 < len(value):
            nxt = value[i + 1]
            if nxt == "n":
                out.append("\n")
                i += 2
                continue
            if nxt == "\\":
                out.append("\\")
                i += 2
                continue
        out.append(ch)
        i += 1
    return "".join(out)


def _line(key: str, value: str) -> str:
    return f"{key}: {escape_value(value)}"


def _opt(value: str | None) -> str:
    return "-" if value in (None, "") else value


def _corpus_lines(corpus: Corpus) -> list[str]:
    lines = [
        _line("corpus", corpus.id),
        _line("title", corpus.title),
        _line("language", _opt(corpus.language)),
        _line("fingerprint", _opt(corpus.coverage_fingerprint)),
        _line("created", _opt(corpus.created_at)),
    ]
    for key in sorted(corpus.declared_meta):
        lines.append(_line(f"meta-{key}", corpus.declared_meta[key]))
    return lines


def _level_lines(level: Level) -> list[str]:
    lines = [
        _line("level", level.id),
        _line("corpus", level.corpus_id),
        _line("kind", level.kind),
        _line("coverage", level.coverage),
        _line("created", _opt(level.created_at)),
    ]
    for dep_id, purpose in level.depends_on:
        lines.append(_line("depends-on", f"{dep_id}|{purpose}"))
    for key in sorted(level.declared_meta):
        lines.append(_line(f"meta-{key}", level.declared_meta[key]))
    return lines


def _resource_lines(resource: Resource) -> list[str]:
    lines = [
        _line("resource", resource.id),
        _line("corpus", resource.corpus_id),
        _line("format", resource.format),
        _line("file", resource.filename),
        _line("levels", ",".join(resource.levels)),
        _line("depositor", _opt(resource.depositor)),
        _line("deposited", _opt(resource.deposited_at)),
        _line("validated", "true" if resource.validated else "false"),
        _line("validator", _opt(resource.validator)),
        _line("sha256", _opt(resource.sha256)),
        _line("size", str(resource.size)),
        _line("available", "true" if resource.available else "false"),
    ]
    for key in sorted(resource.declared_meta):
        lines.append(_line(f"meta-{key}", resource.declared_meta[key]))
    return lines


def _version_lines(record: VersionRecord) -> list[str]:
    lines = [
        _line("version", record.id),
        _line("corpus", record.corpus_id),
        _line("kind", record.level_kind),
        _line("level", record.level_id),
        _line("resource", record.resource_id),
        _line("number", str(record.number)),
        _line("classification", record.classification.value),
        _line("granularity", ",".join(sorted(record.granularity)) or "-"),
        _line("validated", "true" if record.validated else "false"),
        _line("validator", _opt(record.validator)),
        _line("coverage", _opt(record.coverage)),
        _line("supersedes", _opt(record.supersedes)),
        _line("created", _opt(record.created_at)),
    ]
    for group_id, size in record.variant_groups:
        lines.append(_line("variant-group", f"{group_id}|{size}"))
    return lines


def dumps_corpus(
    corpus: Corpus,
    levels: list[Level],
    resources: list[Resource],
    versions: list[VersionRecord],
) -> str:
    blocks = [["archive-format: " + ARCHIVE_FORMAT]]
    blocks.append(_corpus_lines(corpus))
    for level in levels:
        blocks.append(_level_lines(level))
    for resource in resources:
        blocks.append(_resource_lines(resource))
    for record in versions:
        blocks.append(_version_lines(record))
    return "\n\n".join("\n".join(b) for b in blocks) + "\n"


def _split_blocks(text: str) -> list[list[tuple[str, str]]]:
    blocks: list[list[tuple[str, str]]] = []
    current: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            if current:
                blocks.append(current)
                current = []
            continue
        key, sep, value = raw.partition(":")
        if not sep:
            raise StoreError(f"manifest line {lineno}: not a key: value pair")
        current.append((key.strip(), unescape_value(value.strip())))
    if current:
        blocks.append(current)
    return blocks


def _block_dict(block: list[tuple[str, str]], btype: str,
                multi: tuple[str, ...] = ()) -> dict:
    allowed = _BLOCK_KEYS[btype]
    out: dict = {key: [] for key in multi}
    for key, value in block:
        if key not in allowed:
            raise StoreError(f"unknown key {key!r} in {btype} block")
        if key in multi:
            out[key].append(value)
        elif key in out:
            raise StoreError(f"repeated key {key!r} in {btype} block")
        else:
            out[key] = value
    return out


def _none_if_dash(value: str | None) -> str | None:
    return None if value in (None, "-") else value


def _required(data: dict, key: str, btype: str) -> str:
    if key not in data:
        raise StoreError(f"{btype} block lacks required key {key!r}")
    return data[key]


def _extract_meta(block: list[tuple[str, str]]) -> tuple[
        dict[str, str], list[tuple[str, str]]]:
    meta = {key[len("meta-"):]: value for key, value in block
            if key.startswith("meta-")}
    rest = [kv for kv in block if not kv[0].startswith("meta-")]
    return meta, rest


def loads_corpus(text: str) -> tuple[
        Corpus, list[Level], list[Resource], list[VersionRecord]]:
    blocks = _split_blocks(text)
    if not blocks or blocks[0] != [("archive-format", ARCHIVE_FORMAT)]:
        raise StoreError(
            f"manifest must open with 'archive-format: {ARCHIVE_FORMAT}'")
    corpus = None
    levels: list[Level] = []
    resources: list[Resource] = []
    versions: list[VersionRecord] = []
    for block in blocks[1:]:
        btype = block[0][0]
        if btype == "corpus":
            if corpus is not None:
                raise StoreError("manifest holds more than one corpus block")
            meta, rest = _extract_meta(block)
            data = _block_dict(rest, "corpus")
            corpus = Corpus(
                id=_required(data, "corpus", btype),
                title=_required(data, "title", btype),
                language=_none_if_dash(data.get("language")) or "",
                coverage_fingerprint=_none_if_dash(data.get("fingerprint")),
                declared_meta=meta,
                created_at=_none_if_dash(data.get("created")) or "")
        elif btype == "level":
            meta, rest = _extract_meta(block)
            data = _block_dict(rest, "level", multi=("depends-on",))
            deps = []
            for entry in data["depends-on"]:
                dep_id, sep, purpose = entry.partition("|")
                deps.append((dep_id, purpose if sep else ""))
            levels.append(Level(
                id=_required(data, "level", btype),
                corpus_id=_required(data, "corpus", btype),
                kind=_required(data, "kind", btype),
                coverage=_required(data, "coverage", btype),
                depends_on=tuple(deps),
                declared_meta=meta,
                created_at=_none_if_dash(data.get("created")) or ""))
        elif btype == "resource":
            meta, rest = _extract_meta(block)
            data = _block_dict(rest, "resource")
            level_ids = _required(data, "levels", btype)
            resources.append(Resource(
                id=_required(data, "resource", btype),
                corpus_id=_required(data, "corpus", btype),
                format=_required(data, "format", btype),
                filename=_required(data, "file", btype),
                levels=tuple(l for l in level_ids.split(",") if l),
                depositor=_none_if_dash(data.get("depositor")) or "",
                deposited_at=_none_if_dash(data.get("deposited")) or "",
                validated=data.get("validated") == "true",
                validator=_none_if_dash(data.get("validator")),
                sha256=_none_if_dash(data.get("sha256")) or "",
                size=int(data.get("size", "0")),
                available=data.get("available", "true") == "true",
                declared_meta=meta))
        elif btype == "version":
            data = _block_dict(block, "version", multi=("variant-group",))
            groups = []
            for entry in data["variant-group"]:
                group_id, sep, size = entry.partition("|")
                if not sep or not size.isdigit():
                    raise StoreError(
                        f"malformed variant-group entry {entry!r}")
                groups.append((group_id, int(size)))
            granularity = data.get("granularity", "-")
            versions.append(VersionRecord(
                id=_required(data, "version", btype),
                corpus_id=_required(data, "corpus", btype),
                level_kind=_required(data, "kind", btype),
                level_id=_required(data, "level", btype),
                resource_id=_required(data, "resource", btype),
                number=int(_required(data, "number", btype)),
                classification=Classification(
                    _required(data, "classification", btype)),
                granularity=frozenset(
                    g for g in granularity.split(",") if g and g != "-"),
                validated=data.get("validated") == "true",
                validator=_none_if_dash(data.get("validator")),
                coverage=_none_if_dash(data.get("coverage")) or "",
                variant_groups=tuple(groups),
                supersedes=_none_if_dash(data.get("supersedes")),
                created_at=_none_if_dash(data.get("created")) or ""))
        else:
            raise StoreError(f"unknown manifest block type {btype!r}")
    if corpus is None:
        raise StoreError("manifest holds no corpus block")
    return corpus, levels, resources, versions
