"""Cover documents: a small JSON format with one simplex record per line."""

from __future__ import annotations

import hashlib
import json
from decimal import Decimal

from .complexes import InconsistentBirths, close_and_validate
from .cover import CoverFiltration

FORMAT_VERSION = 1


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, where: str | None = None):
        self.line, self.where = line, where
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if where:
            prefix += f"{where}: "
        super().__init__(prefix + message)


def format_decimal(x: float) -> str:
    """Shortest round-tripping decimal, no exponent, no trailing zeros."""
    if x != x or x in (float("inf"), float("-inf")):
        raise ValueError(f"cannot write {x}")
    s = format(Decimal(repr(float(x))), "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _line_of(text: str, needle: str, start: int = 0) -> int | None:
    pos = text.find(needle, start)
    return None if pos < 0 else text.count("\n", 0, pos) + 1


def parse_cover(data: bytes | str) -> CoverFiltration:
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("document must be an object", 1)
    version = doc.get("formatVersion")
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported formatVersion {version!r}", _line_of(text, '"formatVersion"'), "formatVersion")
    n = doc.get("vertexCount")
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise ParseError("vertexCount must be a nonnegative integer", _line_of(text, '"vertexCount"'), "vertexCount")
    cover = doc.get("cover")
    if not isinstance(cover, list):
        raise ParseError("cover must be a list", _line_of(text, '"cover"'), "cover")
    if not cover:
        raise ParseError("at least one cover element", _line_of(text, '"cover"'), "cover")
    elements, names = [], []
    for i, el in enumerate(cover):
        where = f"cover[{i}]"
        if not isinstance(el, dict) or not isinstance(el.get("simplices"), list):
            raise ParseError("element needs a simplices list", None, where)
        name = el.get("name", f"U{i}")
        if not isinstance(name, str):
            raise ParseError("name must be a string", None, where + ".name")
        records = []
        for j, rec in enumerate(el["simplices"]):
            w = f"{where}.simplices[{j}]"
            if not isinstance(rec, dict):
                raise ParseError("simplex record must be an object", None, w)
            verts, birth = rec.get("verts"), rec.get("birth")
            if (not isinstance(verts, list) or not verts
                    or not all(isinstance(x, int) and not isinstance(x, bool) for x in verts)):
                raise ParseError("verts must be a nonempty list of integers", None, w + ".verts")
            if sorted(set(verts)) != verts:
                raise ParseError("verts must be strictly increasing", None, w + ".verts")
            if verts[0] < 0 or verts[-1] >= n:
                raise ParseError(f"vertex id outside 0..{n - 1}", None, w + ".verts")
            if not isinstance(birth, (int, float)) or isinstance(birth, bool):
                raise ParseError("birth must be a number", None, w + ".birth")
            if not 0 <= birth < float("inf"):
                raise ParseError("birth must be finite and nonnegative", None, w + ".birth")
            records.append((verts, float(birth)))
        try:
            elements.append(close_and_validate(records))
        except InconsistentBirths as exc:
            raise InconsistentBirths(f"{where} ({name}): {exc}") from None
        names.append(name)
    return CoverFiltration(tuple(elements), tuple(names))


def emit_cover(c: CoverFiltration, vertex_count: int | None = None) -> bytes:
    """Canonical document: simplices sorted by (birth, dim, vertices)."""
    verts = {s[0] for el in c.elements for s in el if len(s) == 1}
    n = vertex_count if vertex_count is not None else (max(verts) + 1 if verts else 0)
    lines = ["{", f'  "formatVersion": {FORMAT_VERSION},', f'  "vertexCount": {n},', '  "cover": [']
    for i, (el, name) in enumerate(zip(c.elements, c.names)):
        lines += ["    {", f"      \"name\": {json.dumps(name)},", '      "simplices": [']
        recs = sorted(el.items(), key=lambda sb: (sb[1], len(sb[0]), sb[0]))
        for j, (s, b) in enumerate(recs):
            sep = "," if j < len(recs) - 1 else ""
            lines.append(f'        {{"verts": [{", ".join(map(str, s))}], "birth": {format_decimal(b)}}}{sep}')
        lines += ["      ]", "    }" + ("," if i < len(c.elements) - 1 else "")]
    lines += ["  ]", "}", ""]
    return "\n".join(lines).encode("utf-8")


def canonicalize(data: bytes | str) -> bytes:
    return emit_cover(parse_cover(data), json.loads(data)["vertexCount"])


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()
