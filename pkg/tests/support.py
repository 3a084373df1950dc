"""Shared schema fixtures and seeded random generators for the tests."""

from __future__ import annotations

import random
import string
import struct

from dynabuf import (DescriptorPool, DynamicMessage, FieldType, NA,
                     parse_proto_source)
from dynabuf.values import (Complexes, Ints, ListValue, Logicals, Null, Raw,
                            Reals, Strings, Unsupported, Value)

EVERYTHING_PROTO = """
package testing;

message Everything {
  enum Color {
    RED = 0;
    GREEN = 1;
    BLUE = 2;
  }

  message Inner {
    required int32 must = 1;
    optional string note = 2;
  }

  optional double   opt_double   = 1;
  optional float    opt_float    = 2;
  optional int32    opt_int32    = 3;
  optional int64    opt_int64    = 4;
  optional uint32   opt_uint32   = 5;
  optional uint64   opt_uint64   = 6;
  optional sint32   opt_sint32   = 7;
  optional sint64   opt_sint64   = 8;
  optional fixed32  opt_fixed32  = 9;
  optional fixed64  opt_fixed64  = 10;
  optional sfixed32 opt_sfixed32 = 11;
  optional sfixed64 opt_sfixed64 = 12;
  optional bool     opt_bool     = 13;
  optional string   opt_string   = 14;
  optional bytes    opt_bytes    = 15;
  optional Color    opt_enum     = 16;
  optional Inner    opt_message  = 17;

  repeated double   rep_double   = 21 [packed=true];
  repeated float    rep_float    = 22;
  repeated int32    rep_int32    = 23;
  repeated int64    rep_int64    = 24;
  repeated uint32   rep_uint32   = 25 [packed=true];
  repeated uint64   rep_uint64   = 26;
  repeated sint32   rep_sint32   = 27 [packed=true];
  repeated sint64   rep_sint64   = 28;
  repeated bool     rep_bool     = 29;
  repeated string   rep_string   = 30;
  repeated bytes    rep_bytes    = 31;
  repeated Color    rep_enum     = 32;
  repeated Inner    rep_message  = 33;
  repeated fixed32  rep_fixed32  = 34;
  repeated fixed64  rep_fixed64  = 35 [packed=true];
  repeated sfixed32 rep_sfixed32 = 36;
  repeated sfixed64 rep_sfixed64 = 37;

  optional int32  with_default = 40 [default = 41];
  optional string greeting     = 41 [default = "hello"];
  optional Color  favourite    = 42 [default = GREEN];
}
"""


def everything_pool() -> DescriptorPool:
    pool = DescriptorPool()
    pool.load([parse_proto_source(EVERYTHING_PROTO, "everything.proto")])
    return pool


_BOUNDS = {
    FieldType.INT32: (-(1 << 31), (1 << 31) - 1),
    FieldType.SINT32: (-(1 << 31), (1 << 31) - 1),
    FieldType.SFIXED32: (-(1 << 31), (1 << 31) - 1),
    FieldType.UINT32: (0, (1 << 32) - 1),
    FieldType.FIXED32: (0, (1 << 32) - 1),
    FieldType.INT64: (-(1 << 63), (1 << 63) - 1),
    FieldType.SINT64: (-(1 << 63), (1 << 63) - 1),
    FieldType.SFIXED64: (-(1 << 63), (1 << 63) - 1),
    FieldType.UINT64: (0, (1 << 64) - 1),
    FieldType.FIXED64: (0, (1 << 64) - 1),
}


def _random_scalar(field, rng: random.Random):
    ftype = field.type
    if ftype is FieldType.DOUBLE:
        roll = rng.random()
        if roll < 0.05:
            return rng.choice([float("inf"), float("-inf"), float("nan"),
                               0.0, -0.0])
        return rng.uniform(-1e9, 1e9)
    if ftype is FieldType.FLOAT:
        # Values already on the float32 grid; signaling NaNs are quieted by
        # the platform's widening conversion, so they stay out of the pool.
        if rng.random() < 0.05:
            return rng.choice([float("inf"), float("-inf"), 0.0])
        return struct.unpack("<f", struct.pack("<f", rng.uniform(-1e6, 1e6)))[0]
    if ftype in _BOUNDS:
        lo, hi = _BOUNDS[ftype]
        if rng.random() < 0.2:
            return rng.choice([lo, hi, 0, 1, -1 if lo < 0 else 1])
        return rng.randint(lo, hi)
    if ftype is FieldType.BOOL:
        return rng.random() < 0.5
    if ftype is FieldType.STRING:
        alphabet = string.ascii_letters + string.digits + " _-@.éλ—"
        return "".join(rng.choice(alphabet) for _ in range(rng.randrange(12)))
    if ftype is FieldType.BYTES:
        return bytes(rng.randrange(256) for _ in range(rng.randrange(12)))
    if ftype is FieldType.ENUM:
        return rng.choice(field.enum_type.values).number
    raise AssertionError(ftype)


def random_message(descriptor, rng: random.Random, depth: int = 0) -> DynamicMessage:
    """A random message valid under the descriptor; required fields are
    always populated so the result is initialized."""
    message = DynamicMessage(descriptor)
    for field in descriptor.fields:
        recursing = field.type is FieldType.MESSAGE
        if recursing and depth >= 3:
            if field.is_required():
                message.wire_set(field.name,
                                 _leaf_message(field.message_type))
            continue
        if field.is_repeated():
            count = rng.choice([0, 0, 1, 1, 2, 3, 5])
            items = [random_message(field.message_type, rng, depth + 1)
                     if recursing else _random_scalar(field, rng)
                     for _ in range(count)]
            if items:
                message.wire_set(field.name, items)
        else:
            if field.is_required() or rng.random() < 0.6:
                value = (random_message(field.message_type, rng, depth + 1)
                         if recursing else _random_scalar(field, rng))
                message.wire_set(field.name, value)
    return message


def _leaf_message(descriptor) -> DynamicMessage:
    message = DynamicMessage(descriptor)
    for field in descriptor.fields:
        if field.is_required() and field.type is not FieldType.MESSAGE:
            message.wire_set(field.name, _zero_for(field))
    return message


def _zero_for(field):
    if field.type in (FieldType.DOUBLE, FieldType.FLOAT):
        return 0.0
    if field.type is FieldType.BOOL:
        return False
    if field.type is FieldType.STRING:
        return ""
    if field.type is FieldType.BYTES:
        return b""
    if field.type is FieldType.ENUM:
        return field.enum_type.values[0].number
    return 0


# -- random structured values ---------------------------------------------------


def random_value(rng: random.Random, depth: int = 0,
                 allow_unsupported: bool = False,
                 max_len: int = 20) -> tuple[Value, int]:
    """A random value tree; returns (value, number of Unsupported nodes)."""
    kinds = ["null", "logical", "integer", "real", "complex", "string", "raw"]
    if depth < 7:
        kinds += ["list", "list"]
    if allow_unsupported:
        kinds.append("unsupported")
    kind = rng.choice(kinds)
    unsupported = 0

    def length() -> int:
        if rng.random() < 0.02:
            return rng.randint(max_len, max(max_len * 4, 50))
        return rng.randrange(0, max_len)

    if kind == "unsupported":
        return Unsupported(rng.choice(["closure", "environment", "formula",
                                       "promise"])), 1
    if kind == "null":
        value = Null()
    elif kind == "logical":
        value = Logicals([rng.choice([True, False, NA])
                          for _ in range(length())])
    elif kind == "integer":
        value = Ints([rng.choice([NA, 0, 1, -1, (1 << 31) - 1,
                                  rng.randint(-(1 << 31) + 1, (1 << 31) - 1)])
                      for _ in range(length())])
    elif kind == "real":
        pool = [0.0, -0.0, 1.5, float("inf"), float("-inf"), float("nan"),
                struct.unpack("<d", struct.pack("<Q", 0x7FF8000000000123))[0]]
        value = Reals([rng.choice(pool) if rng.random() < 0.3
                       else rng.uniform(-1e12, 1e12) for _ in range(length())])
    elif kind == "complex":
        value = Complexes([complex(rng.uniform(-10, 10), rng.uniform(-10, 10))
                           for _ in range(length())])
    elif kind == "string":
        alphabet = string.printable + "éλ—"
        value = Strings([NA if rng.random() < 0.1 else
                         "".join(rng.choice(alphabet)
                                 for _ in range(rng.randrange(10)))
                         for _ in range(length())])
    elif kind == "raw":
        value = Raw(bytes(rng.randrange(256)
                          for _ in range(rng.randrange(2 * max_len))))
    else:
        items = []
        for _ in range(rng.randrange(0, 5)):
            child, n = random_value(rng, depth + 1, allow_unsupported, max_len)
            unsupported += n
            items.append(child)
        value = ListValue(items)

    if depth < 7 and rng.random() < 0.25:
        attrs = []
        used = set()
        for _ in range(rng.randrange(1, 3)):
            name = rng.choice(["names", "class", "dim", "units", "label"])
            if name in used:
                continue
            used.add(name)
            child, n = random_value(rng, depth + 1, allow_unsupported,
                                    max_len=5)
            unsupported += n
            attrs.append((name, child))
        value = value.with_attributes(attrs)
    return value, unsupported
