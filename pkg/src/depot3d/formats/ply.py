"""PLY polygon-format codec: full header grammar, all three encodings.

Values are stored as plain Python ints/floats; a list property value is a
tuple. Type aliases (char, uchar, short, ushort, int, uint, float, double)
are accepted on input and normalized to sized names (int8 ... float64) in
the model and on output, so rewritten files diff cleanly.

The parser is total: any byte input either yields a model or raises a
structured PlyError. Declared counts are checked against the remaining
input before anything is allocated, so a hostile header cannot force an
unbounded allocation.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

from ..errors import RepositoryError

_WS = b" \t\r\n\f\v"
_MAX_HEADER_BYTES = 1 << 20

# name -> (struct code, byte size, is_float)
SCALAR_TYPES = {
    "int8": ("b", 1, False),
    "uint8": ("B", 1, False),
    "int16": ("h", 2, False),
    "uint16": ("H", 2, False),
    "int32": ("i", 4, False),
    "uint32": ("I", 4, False),
    "float32": ("f", 4, True),
    "float64": ("d", 8, True),
}

TYPE_ALIASES = {
    "char": "int8",
    "uchar": "uint8",
    "short": "int16",
    "ushort": "uint16",
    "int": "int32",
    "uint": "uint32",
    "float": "float32",
    "double": "float64",
}

_INT_BOUNDS = {
    "int8": (-(1 << 7), (1 << 7) - 1),
    "uint8": (0, (1 << 8) - 1),
    "int16": (-(1 << 15), (1 << 15) - 1),
    "uint16": (0, (1 << 16) - 1),
    "int32": (-(1 << 31), (1 << 31) - 1),
    "uint32": (0, (1 << 32) - 1),
}

ENCODINGS = ("ascii", "binary_little_endian", "binary_big_endian")
_ENDIAN = {"binary_little_endian": "<", "binary_big_endian": ">"}


class PlyError(RepositoryError):
    def __init__(self, code: str, message: str, line: int | None = None,
                 element: str | None = None, row: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if element is not None:
            where.append(f"element {element!r}")
        if row is not None:
            where.append(f"row {row}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(code, message + suffix)
        self.line = line
        self.element = element
        self.row = row


def _normalize_type(name: str, line: int) -> str:
    t = TYPE_ALIASES.get(name, name)
    if t not in SCALAR_TYPES:
        raise PlyError("PLY_TYPE_UNKNOWN", f"unknown scalar type {name!r}", line=line)
    return t


@dataclass(frozen=True)
class PlyProperty:
    name: str
    type: str
    count_type: str | None = None  # set only for list properties

    @property
    def is_list(self) -> bool:
        return self.count_type is not None


@dataclass(frozen=True)
class PlyElement:
    name: str
    count: int
    properties: tuple[PlyProperty, ...]


@dataclass
class PlyModel:
    encoding: str
    version: str = "1.0"
    comments: list[str] = field(default_factory=list)
    elements: list[PlyElement] = field(default_factory=list)
    data: dict[str, list[tuple]] = field(default_factory=dict)
    trailing_bytes: int = 0  # unparsed bytes after the declared payload

    def element(self, name: str) -> PlyElement | None:
        for e in self.elements:
            if e.name == name:
                return e
        return None

    def content_equals(self, other: "PlyModel") -> bool:
        """Equality up to encoding metadata (encoding + trailing bytes)."""
        return (self.version == other.version
                and self.comments == other.comments
                and self.elements == other.elements
                and self.data == other.data)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def _header_lines(data: bytes):
    """Yield (line_number, text) decoded header lines up to end_header."""
    pos = 0
    lineno = 0
    limit = min(len(data), _MAX_HEADER_BYTES)
    while pos < limit:
        nl = data.find(b"\n", pos, limit)
        if nl < 0:
            break
        raw = data[pos:nl]
        pos = nl + 1
        lineno += 1
        if raw.endswith(b"\r"):
            raw = raw[:-1]
        try:
            text = raw.decode("ascii")
        except UnicodeDecodeError:
            raise PlyError("PLY_BAD_HEADER", "non-ASCII bytes in header", line=lineno)
        yield lineno, text, pos
        if text.strip() == "end_header":
            return


def parse_ply(data: bytes) -> PlyModel:
    if not isinstance(data, (bytes, bytearray, memoryview)):
        raise PlyError("PLY_BAD_MAGIC", "input is not a byte string")
    data = bytes(data)

    encoding: str | None = None
    version = "1.0"
    comments: list[str] = []
    elements: list[PlyElement] = []
    names_seen: set[str] = set()
    current: tuple[str, int, list[PlyProperty]] | None = None
    payload_start = len(data)

    first = True
    header_done = False
    for lineno, text, pos in _header_lines(data):
        if first:
            if text.strip() != "ply":
                raise PlyError("PLY_BAD_MAGIC", "file does not start with 'ply'")
            first = False
            continue
        tokens = text.split()
        if not tokens:
            continue  # blank header lines are tolerated
        keyword = tokens[0]
        if keyword == "comment":
            comments.append(text.split(None, 1)[1] if len(tokens) > 1 else "")
        elif keyword == "obj_info":
            comments.append(text.split(None, 1)[1] if len(tokens) > 1 else "")
        elif keyword == "format":
            if encoding is not None:
                raise PlyError("PLY_BAD_HEADER", "duplicate format line", line=lineno)
            if len(tokens) != 3:
                raise PlyError("PLY_BAD_HEADER", "format line needs encoding and version", line=lineno)
            if tokens[1] not in ENCODINGS:
                raise PlyError("PLY_BAD_HEADER", f"unknown encoding {tokens[1]!r}", line=lineno)
            encoding = tokens[1]
            version = tokens[2]
        elif keyword == "element":
            if encoding is None:
                raise PlyError("PLY_BAD_HEADER", "element before format line", line=lineno)
            if len(tokens) != 3:
                raise PlyError("PLY_BAD_HEADER", "element line needs name and count", line=lineno)
            if current is not None:
                elements.append(_finish_element(current, lineno))
            name = tokens[1]
            if name in names_seen:
                raise PlyError("PLY_BAD_HEADER", f"duplicate element {name!r}", line=lineno)
            names_seen.add(name)
            try:
                count = int(tokens[2])
            except ValueError:
                raise PlyError("PLY_BAD_HEADER", f"element count {tokens[2]!r} is not a number", line=lineno)
            if count < 0:
                raise PlyError("PLY_BAD_HEADER", "element count cannot be negative", line=lineno)
            current = (name, count, [])
        elif keyword == "property":
            if current is None:
                raise PlyError("PLY_BAD_HEADER", "property before any element", line=lineno)
            props = current[2]
            if len(tokens) >= 2 and tokens[1] == "list":
                if len(tokens) != 5:
                    raise PlyError("PLY_BAD_HEADER", "list property needs count type, item type and name",
                                   line=lineno)
                count_type = _normalize_type(tokens[2], lineno)
                item_type = _normalize_type(tokens[3], lineno)
                if SCALAR_TYPES[count_type][2]:
                    raise PlyError("PLY_BAD_HEADER", "list count type must be an integer type", line=lineno)
                prop = PlyProperty(name=tokens[4], type=item_type, count_type=count_type)
            else:
                if len(tokens) != 3:
                    raise PlyError("PLY_BAD_HEADER", "property line needs type and name", line=lineno)
                prop = PlyProperty(name=tokens[2], type=_normalize_type(tokens[1], lineno))
            if any(p.name == prop.name for p in props):
                raise PlyError("PLY_BAD_HEADER", f"duplicate property {prop.name!r}", line=lineno)
            props.append(prop)
        elif keyword == "end_header":
            if encoding is None:
                raise PlyError("PLY_BAD_HEADER", "end_header before format line", line=lineno)
            if current is not None:
                elements.append(_finish_element(current, lineno))
            payload_start = pos
            header_done = True
            break
        else:
            raise PlyError("PLY_BAD_HEADER", f"unknown header keyword {keyword!r}", line=lineno)

    if first:
        raise PlyError("PLY_BAD_MAGIC", "empty input")
    if not header_done:
        raise PlyError("PLY_BAD_HEADER", "end_header not found")
    assert encoding is not None

    model = PlyModel(encoding=encoding, version=version, comments=comments,
                     elements=elements)
    payload = data[payload_start:]
    if encoding == "ascii":
        trailing = _parse_ascii(payload, elements, model.data)
    else:
        trailing = _parse_binary(payload, elements, model.data, _ENDIAN[encoding])
    model.trailing_bytes = trailing
    return model


def _finish_element(current: tuple[str, int, list[PlyProperty]], lineno: int) -> PlyElement:
    name, count, props = current
    if not props:
        raise PlyError("PLY_BAD_HEADER", f"element {name!r} declares no properties", line=lineno)
    return PlyElement(name=name, count=count, properties=tuple(props))


class _AsciiCursor:
    __slots__ = ("data", "pos")

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def next_token(self) -> bytes | None:
        d, n, p = self.data, len(self.data), self.pos
        while p < n and d[p] in _WS:
            p += 1
        if p >= n:
            self.pos = p
            return None
        q = p
        while q < n and d[q] not in _WS:
            q += 1
        self.pos = q
        return d[p:q]

    def remaining_payload(self) -> int:
        d, n, p = self.data, len(self.data), self.pos
        while p < n and d[p] in _WS:
            p += 1
        return n - p


def _ascii_scalar(tok: bytes, type_name: str, element: str, row: int):
    try:
        if SCALAR_TYPES[type_name][2]:
            return float(tok)
        value = int(tok)
    except ValueError:
        raise PlyError("PLY_BAD_VALUE", f"cannot read {tok!r} as {type_name}",
                       element=element, row=row)
    lo, hi = _INT_BOUNDS[type_name]
    if not lo <= value <= hi:
        raise PlyError("PLY_BAD_VALUE", f"{value} out of range for {type_name}",
                       element=element, row=row)
    return value


def _parse_ascii(payload: bytes, elements: list[PlyElement], out: dict[str, list[tuple]]) -> int:
    cur = _AsciiCursor(payload)
    for el in elements:
        rows: list[tuple] = []
        out[el.name] = rows
        for row_idx in range(el.count):
            row: list = []
            for prop in el.properties:
                if prop.is_list:
                    tok = cur.next_token()
                    if tok is None:
                        raise PlyError("PLY_TRUNCATED", "payload ended early",
                                       element=el.name, row=row_idx)
                    count = _ascii_scalar(tok, prop.count_type, el.name, row_idx)
                    if count < 0:
                        raise PlyError("PLY_BAD_VALUE", "negative list count",
                                       element=el.name, row=row_idx)
                    items = []
                    for _ in range(count):
                        t = cur.next_token()
                        if t is None:
                            raise PlyError("PLY_TRUNCATED", "payload ended early",
                                           element=el.name, row=row_idx)
                        items.append(_ascii_scalar(t, prop.type, el.name, row_idx))
                    row.append(tuple(items))
                else:
                    tok = cur.next_token()
                    if tok is None:
                        raise PlyError("PLY_TRUNCATED", "payload ended early",
                                       element=el.name, row=row_idx)
                    row.append(_ascii_scalar(tok, prop.type, el.name, row_idx))
            rows.append(tuple(row))
    return cur.remaining_payload()


def _parse_binary(payload: bytes, elements: list[PlyElement], out: dict[str, list[tuple]],
                  endian: str) -> int:
    offset = 0
    n = len(payload)
    for el in elements:
        rows: list[tuple] = []
        out[el.name] = rows
        if not any(p.is_list for p in el.properties):
            fmt = endian + "".join(SCALAR_TYPES[p.type][0] for p in el.properties)
            row_size = struct.calcsize(fmt)
            avail_rows = (n - offset) // row_size
            if avail_rows < el.count:
                raise PlyError("PLY_TRUNCATED",
                               f"payload holds {avail_rows} of {el.count} declared rows",
                               element=el.name, row=avail_rows)
            end = offset + el.count * row_size
            rows.extend(struct.iter_unpack(fmt, payload[offset:end]))
            offset = end
            continue
        for row_idx in range(el.count):
            row: list = []
            for prop in el.properties:
                if prop.is_list:
                    code, size, _ = SCALAR_TYPES[prop.count_type]
                    if n - offset < size:
                        raise PlyError("PLY_TRUNCATED", "payload ended early",
                                       element=el.name, row=row_idx)
                    (count,) = struct.unpack_from(endian + code, payload, offset)
                    offset += size
                    if count < 0:
                        raise PlyError("PLY_BAD_VALUE", "negative list count",
                                       element=el.name, row=row_idx)
                    icode, isize, _ = SCALAR_TYPES[prop.type]
                    need = count * isize
                    if n - offset < need:
                        raise PlyError("PLY_TRUNCATED", "payload ended early",
                                       element=el.name, row=row_idx)
                    row.append(struct.unpack_from(f"{endian}{count}{icode}", payload, offset))
                    offset += need
                else:
                    code, size, _ = SCALAR_TYPES[prop.type]
                    if n - offset < size:
                        raise PlyError("PLY_TRUNCATED", "payload ended early",
                                       element=el.name, row=row_idx)
                    (value,) = struct.unpack_from(endian + code, payload, offset)
                    offset += size
                    row.append(value)
            rows.append(tuple(row))
    return n - offset


# ---------------------------------------------------------------------------
# Writing
# ---------------------------------------------------------------------------

def _check_int(value, type_name: str, element: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise PlyError("PLY_BAD_VALUE", f"expected an integer for {type_name}, got {value!r}",
                       element=element)
    lo, hi = _INT_BOUNDS[type_name]
    if not lo <= value <= hi:
        raise PlyError("PLY_BAD_VALUE", f"{value} out of range for {type_name}", element=element)
    return value


def _ascii_value(value, type_name: str, element: str) -> str:
    if SCALAR_TYPES[type_name][2]:
        return repr(float(value))
    return str(_check_int(value, type_name, element))


def write_ply(model: PlyModel, encoding: str | None = None) -> bytes:
    """Serialize a model; parse_ply(write_ply(m, e)) equals m up to encoding.

    Integer values are range-checked against their declared type; float
    values are written with shortest round-trip decimal form in ascii and
    packed bit-exactly in the binary encodings.
    """
    enc = encoding or model.encoding
    if enc not in ENCODINGS:
        raise PlyError("PLY_BAD_HEADER", f"unknown encoding {enc!r}")

    out = bytearray()
    out += b"ply\n"
    out += f"format {enc} {model.version}\n".encode("ascii")
    for c in model.comments:
        out += f"comment {c}\n".encode("ascii")
    for el in model.elements:
        out += f"element {el.name} {el.count}\n".encode("ascii")
        for p in el.properties:
            if p.is_list:
                out += f"property list {p.count_type} {p.type} {p.name}\n".encode("ascii")
            else:
                out += f"property {p.type} {p.name}\n".encode("ascii")
    out += b"end_header\n"

    for el in model.elements:
        rows = model.data.get(el.name, [])
        if len(rows) != el.count:
            raise PlyError("PLY_BAD_VALUE",
                           f"element stores {len(rows)} rows, header declares {el.count}",
                           element=el.name)
        if enc == "ascii":
            for row in rows:
                parts: list[str] = []
                for prop, value in zip(el.properties, row):
                    if prop.is_list:
                        parts.append(_ascii_value(len(value), prop.count_type, el.name))
                        parts.extend(_ascii_value(v, prop.type, el.name) for v in value)
                    else:
                        parts.append(_ascii_value(value, prop.type, el.name))
                out += (" ".join(parts) + "\n").encode("ascii")
        else:
            endian = _ENDIAN[enc]
            for row in rows:
                for prop, value in zip(el.properties, row):
                    if prop.is_list:
                        _check_int(len(value), prop.count_type, el.name)
                        code = SCALAR_TYPES[prop.count_type][0]
                        out += struct.pack(endian + code, len(value))
                        icode = SCALAR_TYPES[prop.type][0]
                        if not SCALAR_TYPES[prop.type][2]:
                            for v in value:
                                _check_int(v, prop.type, el.name)
                        out += struct.pack(f"{endian}{len(value)}{icode}", *value)
                    else:
                        code = SCALAR_TYPES[prop.type][0]
                        if not SCALAR_TYPES[prop.type][2]:
                            _check_int(value, prop.type, el.name)
                        out += struct.pack(endian + code, value)
    return bytes(out)
