"""Mutable message values bound to a message descriptor.

A message stores its set fields keyed by tag number in wire-value form
(ints, floats, bools, strings, bytes, enum numbers, nested messages, or
lists of those for repeated fields).  Host-facing accessors convert
through :mod:`dynabuf.coerce`.  A message is single-owner mutable: it may
move between threads but must not be mutated concurrently.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from . import coerce
from .coerce import CoercionOptions, DEFAULT_OPTIONS
from .descriptors import (FieldDescriptor, FieldType, INTEGER_TYPES,
                          MessageDescriptor)
from .errors import CoercionError, FieldLookupError

Selector = Union[str, int]


@dataclass(frozen=True)
class UnknownField:
    """One wire field whose tag is absent from the decoding descriptor.

    ``value_bytes`` holds the exact payload bytes as read, including the
    length prefix for length-delimited values, so re-emission reproduces
    the original input."""

    tag: int
    wire_type: int
    value_bytes: bytes


UnknownFieldSet = list  # ordered list of UnknownField, re-emitted verbatim


class DynamicMessage:
    """A message value described entirely by its descriptor."""

    __slots__ = ("descriptor", "_values", "unknown_fields")

    def __init__(self, descriptor: MessageDescriptor, /, **fields):
        self.descriptor = descriptor
        self._values: dict[int, object] = {}
        self.unknown_fields: list[UnknownField] = []
        for name, value in fields.items():
            self.set(name, value)

    # -- selectors -------------------------------------------------------

    def _field(self, selector: Selector) -> FieldDescriptor:
        found = self.descriptor.find_field(selector)
        if found is None:
            raise FieldLookupError(
                f"message type '{self.descriptor.full_name}' has no field "
                f"{selector!r}")
        return found

    # -- single-field access ----------------------------------------------

    def get(self, selector: Selector,
            options: CoercionOptions = DEFAULT_OPTIONS):
        """Host value of a field.

        Unset optional fields yield the field default; unset repeated
        fields yield an empty list.
        """
        field = self._field(selector)
        if field.number in self._values:
            return coerce.wire_to_host(field, self._values[field.number], options)
        if field.is_repeated():
            return []
        if field.type is FieldType.MESSAGE:
            return DynamicMessage(field.message_type)
        return coerce.wire_to_host(field, coerce.field_default_wire(field), options)

    def set(self, selector: Selector, value) -> None:
        """Coerce and store a host value, marking the field present."""
        field = self._field(selector)
        wire = coerce.host_to_wire(field, value)
        if field.is_repeated() and not wire:
            self._values.pop(field.number, None)  # empty sequence == unset
        else:
            self._values[field.number] = wire

    def __getitem__(self, selector: Selector):
        return self.get(selector)

    def __setitem__(self, selector: Selector, value) -> None:
        self.set(selector, value)

    def has(self, selector: Selector) -> bool:
        """True iff the field is explicitly set (non-repeated) or nonempty
        (repeated)."""
        return self._field(selector).number in self._values

    def clear(self, *selectors: Selector) -> None:
        """Clear the named fields, or the entire message when none are
        given (unknown fields included)."""
        if not selectors:
            self._values.clear()
            self.unknown_fields.clear()
            return
        for selector in selectors:
            self._values.pop(self._field(selector).number, None)

    # -- repeated-field access --------------------------------------------

    def _repeated(self, selector: Selector) -> tuple[FieldDescriptor, list]:
        field = self._field(selector)
        if not field.is_repeated():
            raise CoercionError(
                f"field '{field.full_name}' is not repeated")
        return field, self._values.get(field.number, [])

    def add(self, selector: Selector, values) -> None:
        """Append one element or a sequence of elements, preserving order."""
        field, existing = self._repeated(selector)
        appended = coerce.host_to_wire(field, values)
        combined = list(existing) + appended
        if combined:
            self._values[field.number] = combined

    def fetch(self, selector: Selector, indices=None,
              options: CoercionOptions = DEFAULT_OPTIONS):
        """Elements of a repeated field at the given 1-based indices (all
        elements when indices is None)."""
        field, stored = self._repeated(selector)
        if indices is None:
            picked = stored
        else:
            picked = [stored[self._index(i, len(stored), field)]
                      for i in self._index_list(indices)]
        return [coerce.wire_to_host(field, [item], options)[0] for item in picked]

    def set_at(self, selector: Selector, indices, values) -> None:
        """Replace elements at the given 1-based indices."""
        field, stored = self._repeated(selector)
        index_list = self._index_list(indices)
        wire = coerce.host_to_wire(field, values)
        if len(wire) != len(index_list):
            raise CoercionError(
                f"field '{field.full_name}': {len(index_list)} indices but "
                f"{len(wire)} values")
        stored = list(stored)
        for i, item in zip(index_list, wire):
            stored[self._index(i, len(stored), field)] = item
        self._values[field.number] = stored

    def swap(self, selector: Selector, i: int, j: int) -> None:
        """Exchange the elements at 1-based positions i and j."""
        field, stored = self._repeated(selector)
        a = self._index(i, len(stored), field)
        b = self._index(j, len(stored), field)
        stored = list(stored)
        stored[a], stored[b] = stored[b], stored[a]
        self._values[field.number] = stored

    def field_size(self, selector: Selector) -> int:
        """Element count of a repeated field; 1/0 for set/unset otherwise."""
        field = self._field(selector)
        stored = self._values.get(field.number)
        if field.is_repeated():
            return len(stored) if stored is not None else 0
        return 1 if stored is not None else 0

    @staticmethod
    def _index_list(indices) -> list[int]:
        if isinstance(indices, int) and not isinstance(indices, bool):
            return [indices]
        return list(indices)

    @staticmethod
    def _index(i: int, size: int, field: FieldDescriptor) -> int:
        if not 1 <= i <= size:
            raise IndexError(
                f"index {i} out of range 1..{size} for field "
                f"'{field.full_name}'")
        return i - 1

    # -- whole-message operations ------------------------------------------

    def is_initialized(self) -> bool:
        """True iff every required field is set, recursively through set
        nested messages."""
        for field in self.descriptor.fields:
            stored = self._values.get(field.number)
            if field.is_required() and stored is None:
                return False
            if field.type is FieldType.MESSAGE and stored is not None:
                nested = stored if field.is_repeated() else [stored]
                if not all(item.is_initialized() for item in nested):
                    return False
        return True

    def clone(self) -> "DynamicMessage":
        """Deep copy; mutating the clone never affects the original."""
        other = DynamicMessage(self.descriptor)
        for tag, value in self._values.items():
            if isinstance(value, list):
                other._values[tag] = [
                    item.clone() if isinstance(item, DynamicMessage) else item
                    for item in value]
            elif isinstance(value, DynamicMessage):
                other._values[tag] = value.clone()
            else:
                other._values[tag] = value
        other.unknown_fields = list(self.unknown_fields)
        return other

    def update(self, pairs=None, **fields) -> None:
        """Set several fields at once, atomically: every pair is validated
        before any is applied, so a bad pair leaves the message unchanged."""
        items: list[tuple[Selector, object]] = []
        if pairs is not None:
            items.extend(dict(pairs).items() if isinstance(pairs, dict)
                         else list(pairs))
        items.extend(fields.items())
        staged = []
        for selector, value in items:
            field = self._field(selector)
            staged.append((field, coerce.host_to_wire(field, value)))
        for field, wire in staged:
            if field.is_repeated() and not wire:
                self._values.pop(field.number, None)
            else:
                self._values[field.number] = wire

    def to_named_list(self, options: CoercionOptions = DEFAULT_OPTIONS
                      ) -> list[tuple[str, object]]:
        """One (name, host value) pair per descriptor field, in declaration
        order, using get-field semantics for unset fields."""
        return [(f.name, self.get(f.name, options))
                for f in self.descriptor.fields]

    def set_field_count(self) -> int:
        return len(self._values)

    def summary(self) -> str:
        return (f"message of type '{self.descriptor.full_name}' with "
                f"{self.set_field_count()} fields set")

    # -- wire-form access (codecs, text format, decoder) -------------------

    def wire_get(self, selector: Selector):
        """Stored wire-form value; None when unset ([] for unset repeated)."""
        field = self._field(selector)
        stored = self._values.get(field.number)
        if stored is None and field.is_repeated():
            return []
        return stored

    def wire_set(self, selector: Selector, value) -> None:
        """Store a value already in wire form, validating kind and range
        but applying no host-model rules (e.g. no NA sentinel checks)."""
        field = self._field(selector)
        if field.is_repeated():
            items = [validate_wire_value(field, v) for v in value]
            if items:
                self._values[field.number] = items
            else:
                self._values.pop(field.number, None)
        else:
            self._values[field.number] = validate_wire_value(field, value)

    def wire_append(self, selector: Selector, value) -> None:
        field = self._field(selector)
        if not field.is_repeated():
            raise CoercionError(f"field '{field.full_name}' is not repeated")
        self._values.setdefault(field.number, []).append(
            validate_wire_value(field, value))

    def store_decoded(self, field: FieldDescriptor, value) -> None:
        # Decoder fast path: values are already range-correct by construction.
        self._values[field.number] = value

    def append_decoded(self, field: FieldDescriptor, value) -> None:
        self._values.setdefault(field.number, []).append(value)

    def present_fields(self) -> list[tuple[FieldDescriptor, object]]:
        """Set fields paired with their stored values, in ascending tag
        order (the serialization order)."""
        by_number = self.descriptor.fields_by_number
        return [(by_number[tag], self._values[tag])
                for tag in sorted(self._values)]

    # -- serialization conveniences ----------------------------------------

    def serialize(self) -> bytes:
        from . import wire
        return wire.encode_message(self)

    def byte_size(self) -> int:
        from . import wire
        return wire.byte_size(self)

    # -- comparisons ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, DynamicMessage):
            return NotImplemented
        if self.descriptor.full_name != other.descriptor.full_name:
            return False
        # Canonical serialization is deterministic, so byte equality is
        # exactly "equal set-field content and equal unknown fields", with
        # bit-exact comparison of floating-point values.
        return self.serialize() == other.serialize()

    __hash__ = None  # mutable

    def __repr__(self) -> str:
        return f"<DynamicMessage {self.summary()!r}>"

    def __str__(self) -> str:
        return self.summary()


def new_message(descriptor: MessageDescriptor,
                initial: Optional[Iterable[tuple[str, object]]] = None,
                **fields) -> DynamicMessage:
    """Build a message from (name, host value) pairs and/or keywords."""
    message = DynamicMessage(descriptor)
    if initial is not None:
        for name, value in (initial.items() if isinstance(initial, dict)
                            else initial):
            message.set(name, value)
    for name, value in fields.items():
        message.set(name, value)
    return message


def validate_wire_value(field: FieldDescriptor, value):
    """Validate and normalize one wire-form element for storage."""
    ftype = field.type
    if ftype is FieldType.BOOL:
        if isinstance(value, bool):
            return value
        raise CoercionError(f"field '{field.full_name}': expected bool")
    if ftype in INTEGER_TYPES or ftype is FieldType.ENUM:
        if isinstance(value, bool) or not isinstance(value, int):
            raise CoercionError(f"field '{field.full_name}': expected integer")
        lo, hi = (coerce._integer_bounds(ftype) if ftype in INTEGER_TYPES
                  else (coerce.INT32_MIN, coerce.INT32_MAX))
        if not lo <= value <= hi:
            raise CoercionError(
                f"field '{field.full_name}': {value} out of range [{lo}, {hi}]")
        return value
    if ftype in (FieldType.DOUBLE, FieldType.FLOAT):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise CoercionError(f"field '{field.full_name}': expected float")
        result = float(value)
        if ftype is FieldType.FLOAT:
            result = struct.unpack("<f", struct.pack("<f", result))[0]
        return result
    if ftype is FieldType.STRING:
        if isinstance(value, str):
            return value
        raise CoercionError(f"field '{field.full_name}': expected str")
    if ftype is FieldType.BYTES:
        if isinstance(value, (bytes, bytearray)):
            return bytes(value)
        raise CoercionError(f"field '{field.full_name}': expected bytes")
    if ftype is FieldType.MESSAGE:
        if (isinstance(value, DynamicMessage)
                and value.descriptor.full_name == field.message_type.full_name):
            return value
        raise CoercionError(
            f"field '{field.full_name}': expected message of type "
            f"'{field.message_type.full_name}'")
    raise CoercionError(f"unsupported field type {ftype}")
