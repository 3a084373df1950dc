"""Conversion between host values and wire field values.

The host value model mirrors a statistics-oriented runtime: logicals are
three-state (true/false/NA), integers are 32-bit with the minimum value
reserved as the missing-data sentinel, and there is no native unsigned or
64-bit integer type, so those families travel as doubles or as decimal
strings when full precision matters.
"""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass

from .descriptors import FieldDescriptor, FieldType, INTEGER_TYPES
from .errors import CoercionError

INT32_MIN = -(1 << 31)
INT32_MAX = (1 << 31) - 1
UINT32_MAX = (1 << 32) - 1
INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1
UINT64_MAX = (1 << 64) - 1

#: Host sentinel for a missing 32-bit integer.
INT_NA = INT32_MIN

NA_BOOL_MESSAGE = ("NA boolean values can not be stored in bool Protocol "
                   "Buffer fields")

INT64_AS_STRING_ENV = "DYNABUF_INT64_AS_STRING"

_INT64_FAMILY = frozenset({FieldType.INT64, FieldType.SINT64,
                           FieldType.SFIXED64, FieldType.UINT64,
                           FieldType.FIXED64})
_UNSIGNED32 = frozenset({FieldType.UINT32, FieldType.FIXED32})
_SIGNED32 = frozenset({FieldType.INT32, FieldType.SINT32, FieldType.SFIXED32})


class _NAType:
    """Singleton marker for a missing value (three-state logicals, missing
    strings).  It deliberately has no truth value."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NA"

    def __bool__(self) -> bool:
        raise TypeError("NA has no truth value")

    def __reduce__(self):
        return (_NAType, ())


NA = _NAType()


@dataclass(frozen=True)
class CoercionOptions:
    """Knobs for wire-to-host conversion.

    int64_as_string: return 64-bit integer families as decimal strings
    instead of doubles, preserving full precision.
    """

    int64_as_string: bool = False

    @classmethod
    def from_env(cls, environ=None) -> "CoercionOptions":
        environ = os.environ if environ is None else environ
        raw = environ.get(INT64_AS_STRING_ENV, "")
        return cls(int64_as_string=raw.strip().lower() in ("1", "true", "yes", "on"))


DEFAULT_OPTIONS = CoercionOptions()


def host_to_wire(field: FieldDescriptor, value):
    """Coerce a host value (or sequence) to the field's wire value form.

    Repeated fields accept a list/tuple of elements or a single element,
    which is treated as a length-1 sequence.
    """
    if field.is_repeated():
        items = value if isinstance(value, (list, tuple)) else [value]
        return [_single_to_wire(field, item) for item in items]
    if isinstance(value, (list, tuple)):
        if len(value) != 1:
            raise CoercionError(
                f"field '{field.full_name}' is not repeated; got a sequence "
                f"of length {len(value)}")
        value = value[0]
    return _single_to_wire(field, value)


def wire_to_host(field: FieldDescriptor, wire_value,
                 options: CoercionOptions = DEFAULT_OPTIONS):
    """Convert a stored wire value (or list of them) to the host model."""
    if field.is_repeated():
        return [_single_to_host(field.type, item, options) for item in wire_value]
    return _single_to_host(field.type, wire_value, options)


def _single_to_wire(field: FieldDescriptor, value):
    ftype = field.type
    if value is NA:
        if ftype is FieldType.BOOL:
            raise CoercionError(NA_BOOL_MESSAGE)
        raise CoercionError(
            f"NA values can not be stored in {ftype.value} Protocol Buffer "
            f"fields")
    if ftype is FieldType.BOOL:
        if isinstance(value, bool):
            return value
        raise CoercionError(
            f"field '{field.full_name}' expects a boolean, got "
            f"{type(value).__name__}")
    if ftype in INTEGER_TYPES:
        return _integer_to_wire(field, value)
    if ftype in (FieldType.DOUBLE, FieldType.FLOAT):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise CoercionError(
                f"field '{field.full_name}' expects a real number, got "
                f"{type(value).__name__}")
        result = float(value)
        if ftype is FieldType.FLOAT:
            result = struct.unpack("<f", struct.pack("<f", result))[0]
        return result
    if ftype is FieldType.STRING:
        if isinstance(value, str):
            return value
        raise CoercionError(
            f"field '{field.full_name}' expects a string, got "
            f"{type(value).__name__}")
    if ftype is FieldType.BYTES:
        if isinstance(value, (bytes, bytearray)):
            return bytes(value)
        if isinstance(value, str):
            return value.encode("utf-8", "surrogateescape")
        raise CoercionError(
            f"field '{field.full_name}' expects bytes or a string, got "
            f"{type(value).__name__}")
    if ftype is FieldType.ENUM:
        return _enum_to_wire(field, value)
    if ftype is FieldType.MESSAGE:
        from .message import DynamicMessage
        if (isinstance(value, DynamicMessage)
                and value.descriptor.full_name == field.message_type.full_name):
            return value
        raise CoercionError(
            f"field '{field.full_name}' expects a message of type "
            f"'{field.message_type.full_name}'")
    raise CoercionError(f"unsupported field type {ftype}")


def _integer_to_wire(field: FieldDescriptor, value):
    ftype = field.type
    if isinstance(value, bool):
        raise CoercionError(
            f"field '{field.full_name}' expects an integer, got a boolean")
    if isinstance(value, int):
        if value == INT_NA:
            raise CoercionError(
                f"NA integer values can not be stored in {ftype.value} "
                f"Protocol Buffer fields")
        result = value
    elif isinstance(value, float):
        if not value.is_integer():
            raise CoercionError(
                f"field '{field.full_name}' expects an integral value, got "
                f"{value!r}")
        result = int(value)
    elif isinstance(value, str) and ftype in _INT64_FAMILY:
        # Decimal strings carry 64-bit integers at full precision.
        text = value.strip()
        sign = text[1:] if text.startswith("-") else text
        if not sign.isdigit():
            raise CoercionError(
                f"field '{field.full_name}': {value!r} is not a decimal "
                f"integer string")
        result = int(text)
    else:
        raise CoercionError(
            f"field '{field.full_name}' expects an integer, got "
            f"{type(value).__name__}")
    lo, hi = _integer_bounds(ftype)
    if not lo <= result <= hi:
        raise CoercionError(
            f"field '{field.full_name}': value {result} out of range "
            f"[{lo}, {hi}] for {ftype.value}")
    return result


def _integer_bounds(ftype: FieldType) -> tuple[int, int]:
    if ftype in _SIGNED32:
        return INT32_MIN, INT32_MAX
    if ftype in _UNSIGNED32:
        return 0, UINT32_MAX
    if ftype in (FieldType.UINT64, FieldType.FIXED64):
        return 0, UINT64_MAX
    return INT64_MIN, INT64_MAX


def _enum_to_wire(field: FieldDescriptor, value):
    enum_type = field.enum_type
    if isinstance(value, str):
        if not enum_type.has(value):
            raise CoercionError(
                f"'{value}' is not a value of enum '{enum_type.full_name}'")
        return enum_type.value(name=value).number
    if isinstance(value, bool):
        raise CoercionError(
            f"field '{field.full_name}' expects an enum name or number")
    if isinstance(value, float):
        if not value.is_integer():
            raise CoercionError(
                f"field '{field.full_name}': {value!r} is not an enum number")
        value = int(value)
    if isinstance(value, int):
        if value not in (v.number for v in enum_type.values):
            raise CoercionError(
                f"{value} is not a declared number of enum "
                f"'{enum_type.full_name}'")
        return value
    raise CoercionError(
        f"field '{field.full_name}' expects an enum name or number, got "
        f"{type(value).__name__}")


def _single_to_host(ftype: FieldType, value, options: CoercionOptions):
    if ftype in (FieldType.DOUBLE, FieldType.FLOAT):
        return float(value)
    if ftype in _UNSIGNED32:
        # No native unsigned type on the host; widen to double.
        return float(value)
    if ftype in _SIGNED32 or ftype is FieldType.ENUM:
        return int(value)
    if ftype in _INT64_FAMILY:
        return str(value) if options.int64_as_string else float(value)
    if ftype is FieldType.BOOL:
        return bool(value)
    if ftype is FieldType.STRING:
        return value
    if ftype is FieldType.BYTES:
        return value.decode("utf-8", "surrogateescape")
    return value  # nested message


def field_default_wire(field: FieldDescriptor):
    """Wire-form default for an unset field: the explicit declaration when
    present, otherwise the type's zero/empty/first-enum-value default.
    Message fields have no wire default; callers build a fresh message."""
    ftype = field.type
    if ftype is FieldType.MESSAGE:
        return None
    default = field.default_value
    if default is not None:
        if ftype is FieldType.ENUM:
            return field.enum_type.value(name=default).number
        return default
    if ftype in (FieldType.DOUBLE, FieldType.FLOAT):
        return 0.0
    if ftype is FieldType.BOOL:
        return False
    if ftype is FieldType.STRING:
        return ""
    if ftype is FieldType.BYTES:
        return b""
    if ftype is FieldType.ENUM:
        return field.enum_type.values[0].number
    return 0


def distinct_count(values) -> int:
    """Number of pairwise-distinct elements under host equality.

    Booleans and numbers of equal magnitude count separately (True is not
    1); all NaN reals collapse into one group, as do NA markers.
    """
    seen = set()
    for v in values:
        if v is NA:
            key = ("na",)
        elif isinstance(v, float) and math.isnan(v):
            key = ("nan",)
        else:
            key = (type(v).__name__, v)
        seen.add(key)
    return len(seen)
