"""Binary wire format: varints, zigzag, field keys, and whole messages.

All functions are pure; descriptors are immutable and messages passed to
the encoder must not be mutated concurrently.
"""

from __future__ import annotations

import enum
import struct

from .descriptors import FieldDescriptor, FieldType, MessageDescriptor
from .errors import WireDecodeError
from .message import DynamicMessage, UnknownField

MASK32 = (1 << 32) - 1
MASK64 = (1 << 64) - 1
MAX_VARINT_BYTES = 10
MAX_NESTING_DEPTH = 100


class WireType(enum.IntEnum):
    VARINT = 0
    FIXED64 = 1
    LENGTH_DELIMITED = 2
    FIXED32 = 5


_WIRE_TYPE_BY_FIELD_TYPE = {
    FieldType.DOUBLE: WireType.FIXED64,
    FieldType.FLOAT: WireType.FIXED32,
    FieldType.INT32: WireType.VARINT,
    FieldType.INT64: WireType.VARINT,
    FieldType.UINT32: WireType.VARINT,
    FieldType.UINT64: WireType.VARINT,
    FieldType.SINT32: WireType.VARINT,
    FieldType.SINT64: WireType.VARINT,
    FieldType.FIXED32: WireType.FIXED32,
    FieldType.FIXED64: WireType.FIXED64,
    FieldType.SFIXED32: WireType.FIXED32,
    FieldType.SFIXED64: WireType.FIXED64,
    FieldType.BOOL: WireType.VARINT,
    FieldType.STRING: WireType.LENGTH_DELIMITED,
    FieldType.BYTES: WireType.LENGTH_DELIMITED,
    FieldType.ENUM: WireType.VARINT,
    FieldType.MESSAGE: WireType.LENGTH_DELIMITED,
}


def wire_type_for_field(field: FieldDescriptor) -> WireType:
    return _WIRE_TYPE_BY_FIELD_TYPE[field.type]


def encode_varint(value: int) -> bytes:
    """Base-128 little-endian groups, continuation bit on all but the last."""
    if not 0 <= value <= MASK64:
        raise ValueError(f"varint out of unsigned 64-bit range: {value}")
    out = bytearray()
    while value > 0x7F:
        out.append((value & 0x7F) | 0x80)
        value >>= 7
    out.append(value)
    return bytes(out)


def varint_size(value: int) -> int:
    size = 1
    while value > 0x7F:
        size += 1
        value >>= 7
    return size


def decode_varint(data: bytes, offset: int = 0) -> tuple[int, int]:
    """Decode one varint; returns (value, bytes consumed)."""
    result = 0
    shift = 0
    pos = offset
    end = len(data)
    while True:
        if pos >= end:
            raise WireDecodeError(f"truncated varint at offset {offset}")
        if pos - offset >= MAX_VARINT_BYTES:
            raise WireDecodeError(f"varint longer than {MAX_VARINT_BYTES} bytes "
                                  f"at offset {offset}")
        b = data[pos]
        result |= (b & 0x7F) << shift
        pos += 1
        shift += 7
        if not b & 0x80:
            return result & MASK64, pos - offset


def zigzag_encode(value: int) -> int:
    """Map a signed 64-bit integer onto unsigned so small magnitudes stay
    short under varint encoding: 0,-1,1,-2,... -> 0,1,2,3,..."""
    return ((value << 1) ^ (value >> 63)) & MASK64


def zigzag_decode(value: int) -> int:
    return (value >> 1) ^ -(value & 1)


def field_key(tag: int, wire_type: WireType) -> bytes:
    if tag < 1:
        raise ValueError(f"field tag must be >= 1, got {tag}")
    return encode_varint((tag << 3) | int(wire_type))


def decode_field_key(data: bytes, offset: int = 0) -> tuple[int, int, int]:
    """Returns (tag, wire type code, bytes consumed)."""
    key, consumed = decode_varint(data, offset)
    tag = key >> 3
    wt = key & 0x7
    if tag < 1:
        raise WireDecodeError(f"invalid field tag 0 at offset {offset}")
    if wt not in (0, 1, 2, 5):
        raise WireDecodeError(f"unsupported wire type {wt} at offset {offset}")
    return tag, wt, consumed


def _to_unsigned64(value: int) -> int:
    return value & MASK64


def _to_signed64(value: int) -> int:
    value &= MASK64
    return value - (1 << 64) if value >= (1 << 63) else value


def _to_signed32(value: int) -> int:
    value &= MASK32
    return value - (1 << 32) if value >= (1 << 31) else value


def encode_scalar(ftype: FieldType, value) -> bytes:
    """Encode one scalar payload (no field key)."""
    if ftype in (FieldType.INT32, FieldType.INT64):
        return encode_varint(_to_unsigned64(value))
    if ftype in (FieldType.UINT32, FieldType.UINT64):
        return encode_varint(value)
    if ftype in (FieldType.SINT32, FieldType.SINT64):
        return encode_varint(zigzag_encode(value))
    if ftype is FieldType.BOOL:
        return b"\x01" if value else b"\x00"
    if ftype is FieldType.ENUM:
        return encode_varint(_to_unsigned64(value))
    if ftype is FieldType.DOUBLE:
        return struct.pack("<d", value)
    if ftype is FieldType.FLOAT:
        return struct.pack("<f", value)
    if ftype in (FieldType.FIXED64,):
        return struct.pack("<Q", value)
    if ftype in (FieldType.SFIXED64,):
        return struct.pack("<q", value)
    if ftype in (FieldType.FIXED32,):
        return struct.pack("<I", value)
    if ftype in (FieldType.SFIXED32,):
        return struct.pack("<i", value)
    raise ValueError(f"not a packable scalar type: {ftype}")


def scalar_size(ftype: FieldType, value) -> int:
    if ftype in (FieldType.INT32, FieldType.INT64, FieldType.ENUM):
        return varint_size(_to_unsigned64(value))
    if ftype in (FieldType.UINT32, FieldType.UINT64):
        return varint_size(value)
    if ftype in (FieldType.SINT32, FieldType.SINT64):
        return varint_size(zigzag_encode(value))
    if ftype is FieldType.BOOL:
        return 1
    if ftype in (FieldType.DOUBLE, FieldType.FIXED64, FieldType.SFIXED64):
        return 8
    if ftype in (FieldType.FLOAT, FieldType.FIXED32, FieldType.SFIXED32):
        return 4
    raise ValueError(f"not a packable scalar type: {ftype}")


def decode_scalar(ftype: FieldType, data: bytes, offset: int) -> tuple[object, int]:
    """Decode one scalar payload at offset; returns (value, consumed)."""
    wt = _WIRE_TYPE_BY_FIELD_TYPE[ftype]
    if wt is WireType.VARINT:
        raw, consumed = decode_varint(data, offset)
        if ftype is FieldType.BOOL:
            return raw != 0, consumed
        if ftype in (FieldType.SINT32, FieldType.SINT64):
            value = zigzag_decode(raw)
            if ftype is FieldType.SINT32:
                value = _to_signed32(value)
            return value, consumed
        if ftype in (FieldType.UINT32,):
            return raw & MASK32, consumed
        if ftype in (FieldType.UINT64,):
            return raw, consumed
        value = _to_signed64(raw)
        if ftype in (FieldType.INT32, FieldType.ENUM):
            value = _to_signed32(value)
        return value, consumed
    if wt is WireType.FIXED64:
        if offset + 8 > len(data):
            raise WireDecodeError(f"truncated fixed64 value at offset {offset}")
        chunk = data[offset:offset + 8]
        if ftype is FieldType.DOUBLE:
            return struct.unpack("<d", chunk)[0], 8
        if ftype is FieldType.SFIXED64:
            return struct.unpack("<q", chunk)[0], 8
        return struct.unpack("<Q", chunk)[0], 8
    if wt is WireType.FIXED32:
        if offset + 4 > len(data):
            raise WireDecodeError(f"truncated fixed32 value at offset {offset}")
        chunk = data[offset:offset + 4]
        if ftype is FieldType.FLOAT:
            return struct.unpack("<f", chunk)[0], 4
        if ftype is FieldType.SFIXED32:
            return struct.unpack("<i", chunk)[0], 4
        return struct.unpack("<I", chunk)[0], 4
    raise ValueError(f"not a packable scalar type: {ftype}")


# -- message level --------------------------------------------------------


def encode_message(message: DynamicMessage) -> bytes:
    """Serialize set fields in ascending tag order, then unknown fields in
    their original order.  Equal messages produce identical bytes."""
    out = bytearray()
    for field, value in message.present_fields():
        _encode_field(out, field, value)
    for unknown in message.unknown_fields:
        out += field_key(unknown.tag, WireType(unknown.wire_type))
        out += unknown.value_bytes
    return bytes(out)


def _encode_field(out: bytearray, field: FieldDescriptor, value) -> None:
    tag = field.number
    if field.is_repeated() and field.packed:
        payload = bytearray()
        for item in value:
            payload += encode_scalar(field.type, item)
        out += field_key(tag, WireType.LENGTH_DELIMITED)
        out += encode_varint(len(payload))
        out += payload
        return
    items = value if field.is_repeated() else [value]
    ftype = field.type
    for item in items:
        if ftype is FieldType.MESSAGE:
            body = encode_message(item)
            out += field_key(tag, WireType.LENGTH_DELIMITED)
            out += encode_varint(len(body))
            out += body
        elif ftype is FieldType.STRING:
            body = item.encode("utf-8", "surrogateescape")
            out += field_key(tag, WireType.LENGTH_DELIMITED)
            out += encode_varint(len(body))
            out += body
        elif ftype is FieldType.BYTES:
            out += field_key(tag, WireType.LENGTH_DELIMITED)
            out += encode_varint(len(item))
            out += item
        else:
            out += field_key(tag, wire_type_for_field(field))
            out += encode_scalar(ftype, item)


def byte_size(message: DynamicMessage) -> int:
    """Exact length of ``encode_message(message)`` without building it."""
    total = 0
    for field, value in message.present_fields():
        total += _field_size(field, value)
    for unknown in message.unknown_fields:
        total += varint_size((unknown.tag << 3) | unknown.wire_type)
        total += len(unknown.value_bytes)
    return total


def _field_size(field: FieldDescriptor, value) -> int:
    key_size = varint_size((field.number << 3) | int(wire_type_for_field(field)))
    if field.is_repeated() and field.packed:
        payload = sum(scalar_size(field.type, item) for item in value)
        ld_key = varint_size((field.number << 3) | int(WireType.LENGTH_DELIMITED))
        return ld_key + varint_size(payload) + payload
    items = value if field.is_repeated() else [value]
    ftype = field.type
    total = 0
    for item in items:
        if ftype is FieldType.MESSAGE:
            body = byte_size(item)
            total += key_size + varint_size(body) + body
        elif ftype is FieldType.STRING:
            body = len(item.encode("utf-8", "surrogateescape"))
            total += key_size + varint_size(body) + body
        elif ftype is FieldType.BYTES:
            total += key_size + varint_size(len(item)) + len(item)
        else:
            total += key_size + scalar_size(ftype, item)
    return total


def decode_message(descriptor: MessageDescriptor, data: bytes,
                   *, _depth: int = 0) -> DynamicMessage:
    """Decode a complete payload against a descriptor.

    Known tags populate fields (duplicated non-repeated fields keep the
    last value; repeated fields accumulate; packed and element-wise
    encodings are both accepted).  Unknown tags are preserved verbatim in
    the unknown field set, in order of appearance.
    """
    if _depth > MAX_NESTING_DEPTH:
        raise WireDecodeError(
            f"message nesting exceeds {MAX_NESTING_DEPTH} levels")
    message = DynamicMessage(descriptor)
    offset = 0
    end = len(data)
    while offset < end:
        tag, wt, consumed = decode_field_key(data, offset)
        offset += consumed
        field = descriptor.fields_by_number.get(tag)
        if field is None:
            value_bytes, consumed = _read_unknown_value(data, offset, wt)
            message.unknown_fields.append(UnknownField(tag, wt, value_bytes))
            offset += consumed
            continue
        offset = _decode_known_field(message, field, data, offset, wt, _depth)
    return message


def _read_unknown_value(data: bytes, offset: int, wt: int) -> tuple[bytes, int]:
    """Raw value bytes of an unknown field, length prefix included for
    length-delimited payloads so re-emission is byte-exact."""
    if wt == WireType.VARINT:
        _, consumed = decode_varint(data, offset)
        return data[offset:offset + consumed], consumed
    if wt == WireType.FIXED64:
        if offset + 8 > len(data):
            raise WireDecodeError(f"truncated fixed64 value at offset {offset}")
        return data[offset:offset + 8], 8
    if wt == WireType.FIXED32:
        if offset + 4 > len(data):
            raise WireDecodeError(f"truncated fixed32 value at offset {offset}")
        return data[offset:offset + 4], 4
    length, consumed = decode_varint(data, offset)
    if offset + consumed + length > len(data):
        raise WireDecodeError(
            f"length prefix {length} at offset {offset} exceeds remaining input")
    return data[offset:offset + consumed + length], consumed + length


def _decode_known_field(message: DynamicMessage, field: FieldDescriptor,
                        data: bytes, offset: int, wt: int, depth: int) -> int:
    expected = wire_type_for_field(field)
    ftype = field.type

    if ftype is FieldType.MESSAGE:
        if wt != WireType.LENGTH_DELIMITED:
            raise _mismatch(field, wt, expected)
        chunk, consumed = _read_delimited(data, offset)
        nested = decode_message(field.message_type, chunk, _depth=depth + 1)
        if field.is_repeated():
            message.append_decoded(field, nested)
        else:
            message.store_decoded(field, nested)
        return offset + consumed

    if ftype in (FieldType.STRING, FieldType.BYTES):
        if wt != WireType.LENGTH_DELIMITED:
            raise _mismatch(field, wt, expected)
        chunk, consumed = _read_delimited(data, offset)
        value = (chunk.decode("utf-8", "surrogateescape")
                 if ftype is FieldType.STRING else chunk)
        if field.is_repeated():
            message.append_decoded(field, value)
        else:
            message.store_decoded(field, value)
        return offset + consumed

    # Numeric/bool/enum scalars: accept the declared wire type element-wise,
    # or a packed block for repeated fields regardless of the packed option.
    if wt == expected:
        value, consumed = decode_scalar(ftype, data, offset)
        if field.is_repeated():
            message.append_decoded(field, value)
        else:
            message.store_decoded(field, value)
        return offset + consumed
    if field.is_repeated() and wt == WireType.LENGTH_DELIMITED:
        chunk, consumed = _read_delimited(data, offset)
        pos = 0
        while pos < len(chunk):
            value, used = decode_scalar(ftype, chunk, pos)
            message.append_decoded(field, value)
            pos += used
        return offset + consumed
    raise _mismatch(field, wt, expected)


def _read_delimited(data: bytes, offset: int) -> tuple[bytes, int]:
    length, consumed = decode_varint(data, offset)
    start = offset + consumed
    if start + length > len(data):
        raise WireDecodeError(
            f"length prefix {length} at offset {offset} exceeds remaining input")
    return data[start:start + length], consumed + length


def _mismatch(field: FieldDescriptor, got: int, expected: WireType) -> WireDecodeError:
    return WireDecodeError(
        f"field '{field.full_name}' (tag {field.number}) expects wire type "
        f"{int(expected)}, got {got}")
