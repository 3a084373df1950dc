"""Descriptors as messages, under the bundled reduced description schema."""

from __future__ import annotations

import functools

from .bundled import bundled_message_type
from .descriptors import (EnumDescriptor, EnumValueDescriptor, FieldDescriptor,
                          FieldLabel, FieldType, FileDescriptor,
                          MessageDescriptor)
from .message import DynamicMessage

_LABEL_NUMBERS = {FieldLabel.OPTIONAL: 1, FieldLabel.REQUIRED: 2,
                  FieldLabel.REPEATED: 3}

_TYPE_NUMBERS = {
    FieldType.DOUBLE: 1, FieldType.FLOAT: 2, FieldType.INT64: 3,
    FieldType.UINT64: 4, FieldType.INT32: 5, FieldType.FIXED64: 6,
    FieldType.FIXED32: 7, FieldType.BOOL: 8, FieldType.STRING: 9,
    FieldType.MESSAGE: 11, FieldType.BYTES: 12, FieldType.UINT32: 13,
    FieldType.ENUM: 14, FieldType.SFIXED32: 15, FieldType.SFIXED64: 16,
    FieldType.SINT32: 17, FieldType.SINT64: 18,
}


@functools.lru_cache(maxsize=1)
def _types():
    return {
        "file": bundled_message_type("dynabuf.FileDescriptorProto"),
        "message": bundled_message_type("dynabuf.DescriptorProto"),
        "field": bundled_message_type("dynabuf.FieldDescriptorProto"),
        "enum": bundled_message_type("dynabuf.EnumDescriptorProto"),
        "enum_value": bundled_message_type("dynabuf.EnumValueDescriptorProto"),
    }


def descriptor_to_message(descriptor) -> DynamicMessage:
    """Describe any descriptor kind as a message that round-trips through
    the wire codec."""
    if isinstance(descriptor, FileDescriptor):
        return _file(descriptor)
    if isinstance(descriptor, MessageDescriptor):
        return _message(descriptor)
    if isinstance(descriptor, EnumDescriptor):
        return _enum(descriptor)
    if isinstance(descriptor, EnumValueDescriptor):
        return _enum_value(descriptor)
    if isinstance(descriptor, FieldDescriptor):
        return _field(descriptor)
    raise TypeError(f"not a descriptor: {descriptor!r}")


def _file(descriptor: FileDescriptor) -> DynamicMessage:
    out = DynamicMessage(_types()["file"])
    out.wire_set("name", descriptor.filename)
    if descriptor.package:
        out.wire_set("package", descriptor.package)
    out.wire_set("message_type", [_message(m) for m in descriptor.messages])
    out.wire_set("enum_type", [_enum(e) for e in descriptor.enums])
    return out


def _message(descriptor: MessageDescriptor) -> DynamicMessage:
    out = DynamicMessage(_types()["message"])
    out.wire_set("name", descriptor.name)
    out.wire_set("field", [_field(f) for f in descriptor.fields])
    out.wire_set("nested_type", [_message(m) for m in descriptor.nested_types])
    out.wire_set("enum_type", [_enum(e) for e in descriptor.enum_types])
    return out


def _field(descriptor: FieldDescriptor) -> DynamicMessage:
    out = DynamicMessage(_types()["field"])
    out.wire_set("name", descriptor.name)
    out.wire_set("number", descriptor.number)
    out.wire_set("label", _LABEL_NUMBERS[descriptor.label])
    out.wire_set("type", _TYPE_NUMBERS[descriptor.type])
    if descriptor.type in (FieldType.MESSAGE, FieldType.ENUM):
        out.wire_set("type_name", "." + descriptor.type_name)
    if descriptor.default_value is not None:
        out.wire_set("default_value", _default_text(descriptor))
    if descriptor.packed:
        out.wire_set("packed", True)
    return out


def _default_text(descriptor: FieldDescriptor) -> str:
    value = descriptor.default_value
    if descriptor.type is FieldType.BOOL:
        return "true" if value else "false"
    if descriptor.type is FieldType.BYTES:
        return value.decode("utf-8", "surrogateescape")
    return str(value)


def _enum(descriptor: EnumDescriptor) -> DynamicMessage:
    out = DynamicMessage(_types()["enum"])
    out.wire_set("name", descriptor.name)
    out.wire_set("value", [_enum_value(v) for v in descriptor.values])
    return out


def _enum_value(descriptor: EnumValueDescriptor) -> DynamicMessage:
    out = DynamicMessage(_types()["enum_value"])
    out.wire_set("name", descriptor.name)
    out.wire_set("number", descriptor.number)
    return out
