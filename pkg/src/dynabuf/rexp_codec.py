"""Round trips between structured host values and the universal schema.

``serialize_value`` maps any :class:`~dynabuf.values.Value` tree onto the
bundled ``rexp.REXP`` message type and encodes it; ``unserialize_value``
is its inverse.  Values of unsupported kinds degrade instead of failing:
they serialize as null (or, in attribute position, are dropped) and each
occurrence contributes one warning string.
"""

from __future__ import annotations

import functools

from . import wire
from .bundled import bundled_message_type, bundled_pool
from .errors import WireDecodeError
from .message import DynamicMessage
from .values import (ListValue, Logicals, Complexes, Ints, Null, Raw, Reals,
                     Strings, Unsupported, Value, NA)

_VALUE_FIELDS = ("realValue", "intValue", "booleanValue", "stringValue",
                 "rawValue", "complexValue", "rexpValue")


@functools.lru_cache(maxsize=1)
def _schema():
    rexp = bundled_message_type("rexp.REXP")
    string = bundled_message_type("rexp.STRING")
    cmplx = bundled_message_type("rexp.CMPLX")
    rclass = bundled_pool().lookup("rexp.REXP.RClass").to_dict()
    rboolean = bundled_pool().lookup("rexp.REXP.RBOOLEAN").to_dict()
    return rexp, string, cmplx, rclass, rboolean


def can_serialize(value: Value) -> bool:
    """True iff no node of the tree (attribute values included) is of an
    unsupported kind, i.e. serialization will emit zero warnings."""
    if isinstance(value, Unsupported):
        return False
    if isinstance(value, ListValue):
        if not all(can_serialize(item) for item in value.items):
            return False
    return all(can_serialize(attr) for _, attr in value.attributes)


def value_to_message(value: Value) -> tuple[DynamicMessage, list[str]]:
    """Build the universal message for a value; collects one warning per
    unsupported node encountered."""
    warnings: list[str] = []
    return _encode(value, warnings), warnings


def serialize_value(value: Value) -> tuple[bytes, list[str]]:
    """Encode a value tree as a bare ``rexp.REXP`` payload."""
    message, warnings = value_to_message(value)
    return wire.encode_message(message), warnings


def unserialize_value(payload: bytes) -> Value:
    """Decode a bare ``rexp.REXP`` payload back into a value tree."""
    rexp, _, _, _, _ = _schema()
    return message_to_value(wire.decode_message(rexp, payload))


def _encode(value: Value, warnings: list[str]) -> DynamicMessage:
    rexp, string_type, cmplx_type, rclass, rboolean = _schema()
    message = DynamicMessage(rexp)
    if isinstance(value, Unsupported):
        warnings.append(f"skipped value of unsupported kind '{value.kind}'")
        message.wire_set("rclass", rclass["NULLTYPE"])
        return message
    if isinstance(value, Null):
        message.wire_set("rclass", rclass["NULLTYPE"])
    elif isinstance(value, Logicals):
        message.wire_set("rclass", rclass["LOGICAL"])
        message.wire_set("booleanValue",
                         [rboolean["NA"] if item is NA
                          else (rboolean["T"] if item else rboolean["F"])
                          for item in value.items])
    elif isinstance(value, Ints):
        message.wire_set("rclass", rclass["INTEGER"])
        # The NA sentinel (int32 minimum) passes through sint32 losslessly.
        message.wire_set("intValue", list(value.items))
    elif isinstance(value, Reals):
        message.wire_set("rclass", rclass["REAL"])
        message.wire_set("realValue", list(value.items))
    elif isinstance(value, Complexes):
        message.wire_set("rclass", rclass["COMPLEX"])
        elements = []
        for item in value.items:
            element = DynamicMessage(cmplx_type)
            element.wire_set("real", item.real)
            element.wire_set("imag", item.imag)
            elements.append(element)
        message.wire_set("complexValue", elements)
    elif isinstance(value, Strings):
        message.wire_set("rclass", rclass["STRING"])
        elements = []
        for item in value.items:
            element = DynamicMessage(string_type)
            if item is NA:
                element.wire_set("isNA", True)
            else:
                element.wire_set("strval", item)
            elements.append(element)
        message.wire_set("stringValue", elements)
    elif isinstance(value, Raw):
        message.wire_set("rclass", rclass["RAW"])
        message.wire_set("rawValue", value.data)
    elif isinstance(value, ListValue):
        message.wire_set("rclass", rclass["LIST"])
        message.wire_set("rexpValue",
                         [_encode(item, warnings) for item in value.items])
    else:
        raise TypeError(f"not a serializable value: {value!r}")

    names: list[str] = []
    encoded_attrs: list[DynamicMessage] = []
    for name, attr in value.attributes:
        if isinstance(attr, Unsupported):
            warnings.append(f"dropped attribute '{name}' of unsupported "
                            f"kind '{attr.kind}'")
            continue
        names.append(name)
        encoded_attrs.append(_encode(attr, warnings))
    if names:
        message.wire_set("attrName", names)
        message.wire_set("attrValue", encoded_attrs)
    return message


def message_to_value(message: DynamicMessage) -> Value:
    """Inverse of :func:`value_to_message` for well-formed messages."""
    _, _, _, rclass, rboolean = _schema()
    number = message.wire_get("rclass")
    if number is None:
        raise WireDecodeError("universal value message is missing rclass")
    by_number = {v: k for k, v in rclass.items()}
    kind = by_number.get(number)
    if kind is None:
        raise WireDecodeError(f"rclass value {number} is outside the RClass enum")

    expected_field = {"REAL": "realValue", "INTEGER": "intValue",
                      "LOGICAL": "booleanValue", "STRING": "stringValue",
                      "RAW": "rawValue", "COMPLEX": "complexValue",
                      "LIST": "rexpValue", "NULLTYPE": None}[kind]
    for field_name in _VALUE_FIELDS:
        stored = message.wire_get(field_name)
        populated = stored is not None and stored != []
        if populated and field_name != expected_field:
            raise WireDecodeError(
                f"value field '{field_name}' is populated but rclass is {kind}")

    attributes = _decode_attributes(message)

    if kind == "NULLTYPE":
        return Null(attributes)
    if kind == "LOGICAL":
        flags = {rboolean["F"]: False, rboolean["T"]: True, rboolean["NA"]: NA}
        items = []
        for raw in message.wire_get("booleanValue"):
            if raw not in flags:
                raise WireDecodeError(
                    f"boolean element {raw} is outside the RBOOLEAN enum")
            items.append(flags[raw])
        return Logicals(items, attributes)
    if kind == "INTEGER":
        return Ints(message.wire_get("intValue"), attributes)
    if kind == "REAL":
        return Reals(message.wire_get("realValue"), attributes)
    if kind == "COMPLEX":
        items = []
        for element in message.wire_get("complexValue"):
            if not element.has("imag"):
                raise WireDecodeError("complex element is missing its "
                                      "required imag component")
            real = element.wire_get("real")
            items.append(complex(0.0 if real is None else real,
                                 element.wire_get("imag")))
        return Complexes(items, attributes)
    if kind == "STRING":
        items = []
        for element in message.wire_get("stringValue"):
            if element.wire_get("isNA"):
                items.append(NA)
            else:
                strval = element.wire_get("strval")
                items.append("" if strval is None else strval)
        return Strings(items, attributes)
    if kind == "RAW":
        data = message.wire_get("rawValue")
        return Raw(b"" if data is None else data, attributes)
    # LIST
    return ListValue([message_to_value(child)
                      for child in message.wire_get("rexpValue")], attributes)


def _decode_attributes(message: DynamicMessage) -> list[tuple[str, Value]]:
    names = message.wire_get("attrName")
    attr_values = message.wire_get("attrValue")
    if len(names) != len(attr_values):
        raise WireDecodeError(
            f"attribute name/value length mismatch: {len(names)} names, "
            f"{len(attr_values)} values")
    return [(name, message_to_value(child))
            for name, child in zip(names, attr_values)]
