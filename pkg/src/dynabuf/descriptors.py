"""Schema reflection objects: files, messages, fields, enums, and the pool.

Descriptor trees are produced by :mod:`dynabuf.proto_parser` and registered
in a :class:`DescriptorPool`.  After a load phase completes the descriptors
are treated as immutable and may be shared freely across threads.
"""

from __future__ import annotations

import enum
from typing import Iterable, Iterator, Optional, Union

from .errors import PoolError


class FieldLabel(enum.Enum):
    REQUIRED = "required"
    OPTIONAL = "optional"
    REPEATED = "repeated"


class FieldType(enum.Enum):
    DOUBLE = "double"
    FLOAT = "float"
    INT32 = "int32"
    INT64 = "int64"
    UINT32 = "uint32"
    UINT64 = "uint64"
    SINT32 = "sint32"
    SINT64 = "sint64"
    FIXED32 = "fixed32"
    FIXED64 = "fixed64"
    SFIXED32 = "sfixed32"
    SFIXED64 = "sfixed64"
    BOOL = "bool"
    STRING = "string"
    BYTES = "bytes"
    ENUM = "enum"
    MESSAGE = "message"


SCALAR_TYPES = frozenset(FieldType) - {FieldType.MESSAGE}

# Types allowed in a packed repeated field: everything with a fixed-width or
# varint payload, i.e. all but the length-delimited ones.
PACKABLE_TYPES = frozenset(SCALAR_TYPES) - {FieldType.STRING, FieldType.BYTES}

INTEGER_TYPES = frozenset({
    FieldType.INT32, FieldType.INT64, FieldType.UINT32, FieldType.UINT64,
    FieldType.SINT32, FieldType.SINT64, FieldType.FIXED32, FieldType.FIXED64,
    FieldType.SFIXED32, FieldType.SFIXED64,
})

# Wire-format reserved tag range (never assignable to user fields).
RESERVED_TAG_LO = 19000
RESERVED_TAG_HI = 19999
MAX_TAG = (1 << 29) - 1


class FieldDescriptor:
    """One field declaration of a message type."""

    __slots__ = ("name", "full_name", "number", "label", "type", "type_name",
                 "packed", "default_value", "containing_type", "message_type",
                 "enum_type", "_pending_type_name")

    def __init__(self, name: str, number: int, label: FieldLabel,
                 type: Optional[FieldType], *, type_name: str = "",
                 packed: bool = False, default_value=None,
                 pending_type_name: str = ""):
        self.name = name
        self.full_name = name  # qualified when attached to a message
        self.number = number
        self.label = label
        self.type = type
        # Resolved full name of the referenced message/enum type, if any.
        self.type_name = type_name
        self.packed = packed
        self.default_value = default_value
        self.containing_type: Optional[MessageDescriptor] = None
        self.message_type: Optional[MessageDescriptor] = None
        self.enum_type: Optional[EnumDescriptor] = None
        # Type reference as written in the source, left for scope resolution.
        self._pending_type_name = pending_type_name

    def is_required(self) -> bool:
        return self.label is FieldLabel.REQUIRED

    def is_optional(self) -> bool:
        return self.label is FieldLabel.OPTIONAL

    def is_repeated(self) -> bool:
        return self.label is FieldLabel.REPEATED

    @property
    def has_default_value(self) -> bool:
        return self.default_value is not None

    def __repr__(self) -> str:
        return (f"<FieldDescriptor {self.full_name!r} number={self.number} "
                f"{self.label.value} {self.type.value if self.type else '?'}>")


class EnumValueDescriptor:
    """A single named constant of an enum type."""

    __slots__ = ("name", "full_name", "number", "enum_type")

    def __init__(self, name: str, number: int):
        self.name = name
        self.full_name = name
        self.number = number
        self.enum_type: Optional[EnumDescriptor] = None

    def __repr__(self) -> str:
        return f"<EnumValueDescriptor {self.full_name} = {self.number}>"


class EnumDescriptor:
    """An enum type with its ordered list of value constants."""

    __slots__ = ("name", "full_name", "values", "containing_type",
                 "_by_name", "_by_number")

    def __init__(self, name: str, values: list[EnumValueDescriptor]):
        self.name = name
        self.full_name = name
        self.values = list(values)
        self.containing_type: Optional[MessageDescriptor] = None
        self._by_name = {v.name: v for v in self.values}
        # Aliased numbers keep the first declaration.
        self._by_number: dict[int, EnumValueDescriptor] = {}
        for v in self.values:
            v.enum_type = self
            self._by_number.setdefault(v.number, v)

    def value_count(self) -> int:
        return len(self.values)

    def has(self, name: str) -> bool:
        return name in self._by_name

    def value(self, index: Optional[int] = None, *, name: Optional[str] = None,
              number: Optional[int] = None) -> EnumValueDescriptor:
        """Look up one constant by 1-based index, exact name, or number.

        Exactly one selector must be given.  Number lookup returns the
        first declared constant carrying that number.
        """
        selectors = [s is not None for s in (index, name, number)]
        if sum(selectors) != 1:
            raise TypeError("provide exactly one of index, name or number")
        if index is not None:
            if not 1 <= index <= len(self.values):
                raise IndexError(f"enum value index {index} out of range "
                                 f"1..{len(self.values)} for '{self.full_name}'")
            return self.values[index - 1]
        if name is not None:
            try:
                return self._by_name[name]
            except KeyError:
                raise KeyError(f"enum '{self.full_name}' has no value named "
                               f"{name!r}") from None
        try:
            return self._by_number[number]
        except KeyError:
            raise KeyError(f"enum '{self.full_name}' has no value with number "
                           f"{number}") from None

    def to_dict(self) -> dict[str, int]:
        """Name-to-number mapping, in declaration order."""
        return {v.name: v.number for v in self.values}

    def __repr__(self) -> str:
        return (f"<EnumDescriptor {self.full_name!r} "
                f"with {len(self.values)} values>")


class MessageDescriptor:
    """A message type: fields plus nested message and enum declarations."""

    __slots__ = ("name", "full_name", "fields", "nested_types", "enum_types",
                 "containing_type", "file", "fields_by_name", "fields_by_number",
                 "_nested_by_name", "_enums_by_name")

    def __init__(self, name: str, fields: list[FieldDescriptor],
                 nested_types: list[MessageDescriptor],
                 enum_types: list[EnumDescriptor]):
        self.name = name
        self.full_name = name
        self.fields = list(fields)
        self.nested_types = list(nested_types)
        self.enum_types = list(enum_types)
        self.containing_type: Optional[MessageDescriptor] = None
        self.file: Optional[FileDescriptor] = None
        self.fields_by_name = {f.name: f for f in self.fields}
        self.fields_by_number = {f.number: f for f in self.fields}
        self._nested_by_name = {m.name: m for m in self.nested_types}
        self._enums_by_name = {e.name: e for e in self.enum_types}
        for f in self.fields:
            f.containing_type = self
        for m in self.nested_types:
            m.containing_type = self
        for e in self.enum_types:
            e.containing_type = self

    # Counted accessors use 1-based indices, matching the reflection style
    # of the rest of the descriptor API ("field(1)" is the first field).
    def field_count(self) -> int:
        return len(self.fields)

    def field(self, index: int) -> FieldDescriptor:
        return self._indexed(self.fields, index, "field")

    def nested_type_count(self) -> int:
        return len(self.nested_types)

    def nested_type(self, index: int) -> MessageDescriptor:
        return self._indexed(self.nested_types, index, "nested type")

    def enum_type_count(self) -> int:
        return len(self.enum_types)

    def enum_type(self, index: int) -> EnumDescriptor:
        return self._indexed(self.enum_types, index, "enum type")

    def _indexed(self, items, index: int, what: str):
        if not 1 <= index <= len(items):
            raise IndexError(f"{what} index {index} out of range 1..{len(items)} "
                             f"for '{self.full_name}'")
        return items[index - 1]

    def find_field(self, selector: Union[str, int]) -> Optional[FieldDescriptor]:
        """Field by exact name or tag number; None when absent."""
        if isinstance(selector, str):
            return self.fields_by_name.get(selector)
        if isinstance(selector, int) and not isinstance(selector, bool):
            return self.fields_by_number.get(selector)
        raise TypeError(f"field selector must be a name or tag number, "
                        f"got {type(selector).__name__}")

    def navigate(self, member: str):
        """Resolve a member name against fields, then nested enums, then
        nested messages.  Returns None when nothing matches."""
        found = self.fields_by_name.get(member)
        if found is None:
            found = self._enums_by_name.get(member)
        if found is None:
            found = self._nested_by_name.get(member)
        return found

    def __repr__(self) -> str:
        return f"<MessageDescriptor {self.full_name!r}>"


class FileDescriptor:
    """One parsed ``.proto`` file: package plus top-level declarations."""

    __slots__ = ("filename", "package", "messages", "enums", "imports", "source")

    def __init__(self, filename: str, package: str,
                 messages: list[MessageDescriptor],
                 enums: list[EnumDescriptor], imports: list[str],
                 source: str = ""):
        self.filename = filename
        self.package = package
        self.messages = list(messages)
        self.enums = list(enums)
        self.imports = list(imports)
        self.source = source
        for m in self.messages:
            self._attach(m)

    def _attach(self, message: MessageDescriptor) -> None:
        message.file = self
        for nested in message.nested_types:
            self._attach(nested)

    def __repr__(self) -> str:
        return (f"<FileDescriptor {self.filename!r} "
                f"package={self.package!r}>")


Descriptor = Union[MessageDescriptor, EnumDescriptor]


def iter_messages(file: FileDescriptor) -> Iterator[MessageDescriptor]:
    """All message descriptors in a file, outer before nested."""
    stack = list(reversed(file.messages))
    while stack:
        m = stack.pop()
        yield m
        stack.extend(reversed(m.nested_types))


def iter_enums(file: FileDescriptor) -> Iterator[EnumDescriptor]:
    """All enum descriptors in a file, top-level first."""
    yield from file.enums
    for m in iter_messages(file):
        yield from m.enum_types


class DescriptorPool:
    """Registry of message and enum descriptors keyed by full dotted name.

    ``load`` runs a single-threaded load phase: it registers every
    descriptor of the given files and resolves all dangling type
    references.  Between load phases the pool never mutates, so lookups
    are safe from any number of threads.
    """

    def __init__(self):
        self._by_name: dict[str, Descriptor] = {}
        self.files: list[FileDescriptor] = []
        self._sources: dict[str, str] = {}  # filename -> source text

    def load(self, files: Iterable[FileDescriptor]) -> "DescriptorPool":
        """Register files and resolve every pending type reference.

        Loading a byte-identical file again is a no-op; any other
        redefinition of an existing full name raises :class:`PoolError`.
        A failed load leaves the pool unchanged.  Returns the pool for
        chaining.
        """
        staged = dict(self._by_name)
        accepted = []
        for file in files:
            previous = self._sources.get(file.filename)
            if previous is not None:
                if previous == file.source:
                    continue  # idempotent reload
                raise PoolError(f"conflicting redefinition of file "
                                f"{file.filename!r}")
            for name in self._declared_names(file):
                if name in staged:
                    raise PoolError(f"conflicting redefinition of '{name}' "
                                    f"by {file.filename!r}")
                staged[name] = None  # placeholder, filled below
            accepted.append(file)
        for file in accepted:
            for m in iter_messages(file):
                staged[m.full_name] = m
            for e in iter_enums(file):
                staged[e.full_name] = e
        for file in accepted:
            self._resolve(file, staged)
        self._check_imports(accepted)
        self._by_name = staged
        self.files.extend(accepted)
        for file in accepted:
            self._sources[file.filename] = file.source
        return self

    def lookup(self, full_name: str) -> Optional[Descriptor]:
        """Exact-match lookup of a message or enum descriptor.

        Falls back to field-by-path resolution ("pkg.Msg.field"); returns
        None when the name is not registered.  Never raises and never
        mutates the pool.
        """
        found = self._by_name.get(full_name)
        if found is not None:
            return found
        parent, _, leaf = full_name.rpartition(".")
        container = self._by_name.get(parent) if parent else None
        if isinstance(container, MessageDescriptor):
            return container.find_field(leaf)
        return None

    def __contains__(self, full_name: str) -> bool:
        return self.lookup(full_name) is not None

    def names(self) -> list[str]:
        """Sorted full names of all registered messages and enums."""
        return sorted(self._by_name)

    # -- load phase internals -------------------------------------------

    @staticmethod
    def _declared_names(file: FileDescriptor) -> Iterator[str]:
        for m in iter_messages(file):
            yield m.full_name
        for e in iter_enums(file):
            yield e.full_name

    def _resolve(self, file: FileDescriptor,
                 symbols: dict[str, Descriptor]) -> None:
        for m in iter_messages(file):
            for f in m.fields:
                if f._pending_type_name:
                    self._bind_field(f, symbols)

    def _bind_field(self, field: FieldDescriptor,
                    symbols: dict[str, Descriptor]) -> None:
        written = field._pending_type_name
        scope = field.containing_type.full_name if field.containing_type else ""
        target = resolve_type_name(written, scope, symbols)
        if target is None:
            raise PoolError(
                f"unknown type name '{written}' referenced by field "
                f"'{field.full_name}'")
        bind_field_type(field, target)

    def _check_imports(self, files: list[FileDescriptor]) -> None:
        known = set(self._sources)
        known.update(f.filename for f in files)
        for file in files:
            for imported in file.imports:
                if imported not in known:
                    raise PoolError(
                        f"{file.filename!r} imports {imported!r} which is not "
                        f"loaded in this pool")


def resolve_type_name(written: str, scope: str,
                      symbols: dict[str, Descriptor]) -> Optional[Descriptor]:
    """Resolve a possibly-relative type reference against a symbol table.

    A leading dot means fully qualified.  Otherwise candidate scopes are
    tried innermost-first: the declaring message, each enclosing message,
    the package, then the root.
    """
    if written.startswith("."):
        return symbols.get(written[1:])
    parts = scope.split(".") if scope else []
    for i in range(len(parts), -1, -1):
        candidate = ".".join(parts[:i] + [written])
        found = symbols.get(candidate)
        if found is not None:
            return found
    return None


def bind_field_type(field: FieldDescriptor, target: Descriptor) -> None:
    """Attach a resolved message/enum target to a field and validate the
    options that depend on the referenced kind."""
    from .errors import ProtoParseError

    field.type_name = target.full_name
    field._pending_type_name = ""
    if isinstance(target, MessageDescriptor):
        field.type = FieldType.MESSAGE
        field.message_type = target
        if field.packed:
            raise ProtoParseError(
                f"field '{field.full_name}': packed is not valid for "
                f"message-typed fields")
        if field.default_value is not None:
            raise ProtoParseError(
                f"field '{field.full_name}': message fields cannot carry a "
                f"default")
    else:
        field.type = FieldType.ENUM
        field.enum_type = target
        default = field.default_value
        if default is not None:
            if not isinstance(default, str) or not target.has(default):
                raise ProtoParseError(
                    f"field '{field.full_name}': default {default!r} is not a "
                    f"value of enum '{target.full_name}'")
