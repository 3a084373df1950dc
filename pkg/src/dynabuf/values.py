"""Structured host values: typed vectors, lists, and named attributes.

This is the value model the universal interchange schema carries: null,
three-state logical vectors, 32-bit integer vectors (minimum value acts
as the missing sentinel), bit-exact real vectors, complex vectors, string
vectors with missing markers, raw byte blobs, and heterogeneous lists.
Every node except :class:`Unsupported` can carry an ordered list of
uniquely named attributes.  Scalars are modelled as length-1 vectors.
"""

from __future__ import annotations

import json
import struct
from typing import Iterable, Optional

from .coerce import INT32_MAX, INT32_MIN, INT_NA, NA, _NAType

__all__ = ["Value", "Null", "Logicals", "Ints", "Reals", "Complexes",
           "Strings", "Raw", "ListValue", "Unsupported", "NA", "named_list",
           "value_equal", "to_jsonable", "from_jsonable",
           "dumps_value", "loads_value"]

Attributes = list[tuple[str, "Value"]]


class Value:
    """Base class; holds the ordered attribute list."""

    __slots__ = ("attributes",)

    def __init__(self, attributes: Optional[Iterable[tuple[str, "Value"]]] = None):
        attrs = [(str(n), v) for n, v in (attributes or [])]
        names = [n for n, _ in attrs]
        if any(not n for n in names):
            raise ValueError("attribute names must be nonempty")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate attribute names: {names}")
        for _, v in attrs:
            if not isinstance(v, Value):
                raise TypeError("attribute values must be Value instances")
        self.attributes: Attributes = attrs

    def get_attribute(self, name: str) -> Optional["Value"]:
        for n, v in self.attributes:
            if n == name:
                return v
        return None

    def with_attributes(self, attributes) -> "Value":
        clone = self._clone_bare()
        clone.attributes = Value(attributes).attributes
        return clone

    def _clone_bare(self) -> "Value":
        raise NotImplementedError

    def __eq__(self, other):
        if not isinstance(other, Value):
            return NotImplemented
        return value_equal(self, other)

    __hash__ = None

    def _attr_repr(self) -> str:
        if not self.attributes:
            return ""
        return f", attributes={self.attributes!r}"


class Null(Value):
    """The null value; carries no payload."""

    __slots__ = ()

    def _clone_bare(self):
        return Null()

    def __repr__(self):
        return f"Null({self._attr_repr().lstrip(', ')})"


class Logicals(Value):
    """Vector of three-state booleans: True, False, or NA."""

    __slots__ = ("items",)

    def __init__(self, items=(), attributes=None):
        super().__init__(attributes)
        checked = []
        for item in items:
            if item is NA or isinstance(item, _NAType):
                checked.append(NA)
            elif isinstance(item, bool):
                checked.append(item)
            else:
                raise TypeError(f"logical elements must be True/False/NA, "
                                f"got {item!r}")
        self.items: list = checked

    def _clone_bare(self):
        return Logicals(self.items)

    def __repr__(self):
        return f"Logicals({self.items!r}{self._attr_repr()})"


class Ints(Value):
    """Vector of 32-bit integers; INT_NA (the minimum) marks missing."""

    __slots__ = ("items",)

    def __init__(self, items=(), attributes=None):
        super().__init__(attributes)
        checked = []
        for item in items:
            if item is NA:
                checked.append(INT_NA)
                continue
            if isinstance(item, bool) or not isinstance(item, int):
                raise TypeError(f"integer elements must be ints, got {item!r}")
            if not INT32_MIN <= item <= INT32_MAX:
                raise ValueError(f"integer element {item} out of 32-bit range")
            checked.append(item)
        self.items: list[int] = checked

    def _clone_bare(self):
        return Ints(self.items)

    def __repr__(self):
        return f"Ints({self.items!r}{self._attr_repr()})"


class Reals(Value):
    """Vector of 64-bit floats, compared and transported bit-exactly."""

    __slots__ = ("items",)

    def __init__(self, items=(), attributes=None):
        super().__init__(attributes)
        checked = []
        for item in items:
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise TypeError(f"real elements must be numbers, got {item!r}")
            checked.append(float(item))
        self.items: list[float] = checked

    def _clone_bare(self):
        return Reals(self.items)

    def __repr__(self):
        return f"Reals({self.items!r}{self._attr_repr()})"


class Complexes(Value):
    """Vector of complex numbers (pairs of 64-bit reals)."""

    __slots__ = ("items",)

    def __init__(self, items=(), attributes=None):
        super().__init__(attributes)
        checked = []
        for item in items:
            if isinstance(item, complex):
                checked.append(item)
            elif (isinstance(item, (tuple, list)) and len(item) == 2):
                checked.append(complex(float(item[0]), float(item[1])))
            else:
                raise TypeError(f"complex elements must be complex or "
                                f"(re, im), got {item!r}")
        self.items: list[complex] = checked

    def _clone_bare(self):
        return Complexes(self.items)

    def __repr__(self):
        return f"Complexes({self.items!r}{self._attr_repr()})"


class Strings(Value):
    """Vector of text elements, each either a str or NA."""

    __slots__ = ("items",)

    def __init__(self, items=(), attributes=None):
        super().__init__(attributes)
        checked = []
        for item in items:
            if item is NA or isinstance(item, _NAType):
                checked.append(NA)
            elif isinstance(item, str):
                checked.append(item)
            else:
                raise TypeError(f"string elements must be str or NA, "
                                f"got {item!r}")
        self.items: list = checked

    def _clone_bare(self):
        return Strings(self.items)

    def __repr__(self):
        return f"Strings({self.items!r}{self._attr_repr()})"


class Raw(Value):
    """An opaque byte blob."""

    __slots__ = ("data",)

    def __init__(self, data: bytes = b"", attributes=None):
        super().__init__(attributes)
        if not isinstance(data, (bytes, bytearray)):
            raise TypeError(f"raw payload must be bytes, got {type(data).__name__}")
        self.data = bytes(data)

    def _clone_bare(self):
        return Raw(self.data)

    def __repr__(self):
        return f"Raw({self.data!r}{self._attr_repr()})"


class ListValue(Value):
    """Ordered heterogeneous list of values."""

    __slots__ = ("items",)

    def __init__(self, items=(), attributes=None):
        super().__init__(attributes)
        items = list(items)
        for item in items:
            if not isinstance(item, Value):
                raise TypeError(f"list elements must be Value instances, "
                                f"got {item!r}")
        self.items: list[Value] = items

    def _clone_bare(self):
        return ListValue(self.items)

    def __repr__(self):
        return f"ListValue({self.items!r}{self._attr_repr()})"


class Unsupported(Value):
    """Placeholder for a host value with no universal representation
    (functions, environments, ...).  Cannot carry attributes and is
    skipped with a warning when serialized."""

    __slots__ = ("kind",)

    def __init__(self, kind: str):
        super().__init__(None)
        self.kind = str(kind)

    def with_attributes(self, attributes):
        raise TypeError("unsupported values cannot carry attributes")

    def _clone_bare(self):
        return Unsupported(self.kind)

    def __repr__(self):
        return f"Unsupported({self.kind!r})"


def named_list(pairs: Iterable[tuple[str, Value]], attributes=None) -> ListValue:
    """A list whose element names travel in the conventional ``names``
    attribute (empty name = positional element)."""
    pairs = list(pairs)
    attrs = list(attributes or [])
    if pairs and any(name for name, _ in pairs):
        attrs = [("names", Strings([name for name, _ in pairs]))] + attrs
    return ListValue([v for _, v in pairs], attrs)


# -- equality -----------------------------------------------------------------


def _real_bits(value: float) -> bytes:
    return struct.pack("<d", value)


def value_equal(a: Value, b: Value) -> bool:
    """Deep structural equality.

    Reals (and complex parts) compare bitwise, so NaNs with equal payloads
    are equal and -0.0 differs from 0.0.  Attribute order is significant.
    """
    if type(a) is not type(b):
        return False
    if isinstance(a, Unsupported):
        return a.kind == b.kind
    if len(a.attributes) != len(b.attributes):
        return False
    for (name_a, val_a), (name_b, val_b) in zip(a.attributes, b.attributes):
        if name_a != name_b or not value_equal(val_a, val_b):
            return False
    if isinstance(a, Null):
        return True
    if isinstance(a, Raw):
        return a.data == b.data
    if isinstance(a, ListValue):
        return (len(a.items) == len(b.items)
                and all(value_equal(x, y) for x, y in zip(a.items, b.items)))
    if isinstance(a, Reals):
        return (len(a.items) == len(b.items)
                and all(_real_bits(x) == _real_bits(y)
                        for x, y in zip(a.items, b.items)))
    if isinstance(a, Complexes):
        return (len(a.items) == len(b.items)
                and all(_real_bits(x.real) == _real_bits(y.real)
                        and _real_bits(x.imag) == _real_bits(y.imag)
                        for x, y in zip(a.items, b.items)))
    if isinstance(a, (Logicals, Strings)):
        if len(a.items) != len(b.items):
            return False
        for x, y in zip(a.items, b.items):
            if (x is NA) != (y is NA):
                return False
            if x is not NA and x != y:
                return False
        return True
    return a.items == b.items  # Ints


# -- JSON text form -----------------------------------------------------------

_TYPE_TAGS = {Null: "null", Logicals: "logical", Ints: "integer",
              Reals: "real", Complexes: "complex", Strings: "string",
              Raw: "raw", ListValue: "list", Unsupported: "unsupported"}


def to_jsonable(value: Value):
    """JSON-ready form of a value tree.

    Missing elements are JSON null; non-finite reals rely on the NaN and
    Infinity literals, which normalizes NaN payload bits (the binary
    codec, not this form, is the bit-exact path).
    """
    obj: dict = {"type": _TYPE_TAGS[type(value)]}
    if isinstance(value, Unsupported):
        obj["kind"] = value.kind
        return obj
    if isinstance(value, Logicals):
        obj["values"] = [None if v is NA else v for v in value.items]
    elif isinstance(value, Ints):
        obj["values"] = [None if v == INT_NA else v for v in value.items]
    elif isinstance(value, Reals):
        obj["values"] = list(value.items)
    elif isinstance(value, Complexes):
        obj["values"] = [[v.real, v.imag] for v in value.items]
    elif isinstance(value, Strings):
        obj["values"] = [None if v is NA else v for v in value.items]
    elif isinstance(value, Raw):
        obj["hex"] = value.data.hex()
    elif isinstance(value, ListValue):
        obj["values"] = [to_jsonable(v) for v in value.items]
    if value.attributes:
        obj["attributes"] = {name: to_jsonable(v)
                             for name, v in value.attributes}
    return obj


def from_jsonable(obj) -> Value:
    """Inverse of :func:`to_jsonable`."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValueError(f"not a value object: {obj!r}")
    tag = obj["type"]
    attrs = [(name, from_jsonable(v))
             for name, v in obj.get("attributes", {}).items()]
    values = obj.get("values", [])
    if tag == "null":
        return Null(attrs)
    if tag == "logical":
        return Logicals([NA if v is None else bool(v) for v in values], attrs)
    if tag == "integer":
        return Ints([INT_NA if v is None else int(v) for v in values], attrs)
    if tag == "real":
        return Reals([float(v) for v in values], attrs)
    if tag == "complex":
        return Complexes([complex(float(re), float(im)) for re, im in values],
                         attrs)
    if tag == "string":
        return Strings([NA if v is None else str(v) for v in values], attrs)
    if tag == "raw":
        return Raw(bytes.fromhex(obj.get("hex", "")), attrs)
    if tag == "list":
        return ListValue([from_jsonable(v) for v in values], attrs)
    if tag == "unsupported":
        return Unsupported(obj.get("kind", "unknown"))
    raise ValueError(f"unknown value type tag {tag!r}")


def dumps_value(value: Value, pretty: bool = False) -> str:
    """Canonical text rendering (deterministic for equal inputs)."""
    if pretty:
        return json.dumps(to_jsonable(value), indent=2, ensure_ascii=False)
    return json.dumps(to_jsonable(value), separators=(",", ":"),
                      ensure_ascii=False)


def loads_value(text: str) -> Value:
    return from_jsonable(json.loads(text))
