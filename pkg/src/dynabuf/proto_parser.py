"""Parser for the proto2 schema subset.

Supported: package declarations, imports, messages (arbitrarily nested),
enums, the required/optional/repeated field rules, ``[packed=true]`` and
``[default=...]`` options, line and block comments, and an optional
``syntax = "proto2"`` statement.  Everything else (services, extensions,
groups, oneof, general options) is rejected with a diagnostic carrying
line and column.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

from .descriptors import (DescriptorPool, EnumDescriptor, EnumValueDescriptor,
                          FieldDescriptor, FieldLabel, FieldType,
                          FileDescriptor, MessageDescriptor, PACKABLE_TYPES,
                          RESERVED_TAG_HI, RESERVED_TAG_LO, MAX_TAG,
                          bind_field_type, resolve_type_name)
from .errors import PoolError, ProtoParseError

_SCALAR_TYPE_NAMES = {t.value: t for t in FieldType
                      if t not in (FieldType.MESSAGE, FieldType.ENUM)}

_LABELS = {"required": FieldLabel.REQUIRED,
           "optional": FieldLabel.OPTIONAL,
           "repeated": FieldLabel.REPEATED}

_UNSUPPORTED_KEYWORDS = {"service", "extend", "extensions", "oneof", "group",
                         "option", "reserved", "map"}


@dataclass
class _Token:
    kind: str  # ident | number | string | symbol | eof
    value: str
    line: int
    column: int


class _Tokenizer:
    _SYMBOLS = set("{}[]=;,.<>()-+")

    def __init__(self, source: str, filename: str):
        self.source = source
        self.filename = filename
        self.pos = 0
        self.line = 1
        self.column = 1

    def error(self, message: str, line: Optional[int] = None,
              column: Optional[int] = None) -> ProtoParseError:
        return ProtoParseError(message, self.filename,
                               self.line if line is None else line,
                               self.column if column is None else column)

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos < len(self.source) and self.source[self.pos] == "\n":
                self.line += 1
                self.column = 1
            else:
                self.column += 1
            self.pos += 1

    def _skip_trivia(self) -> None:
        src = self.source
        while self.pos < len(src):
            c = src[self.pos]
            if c in " \t\r\n":
                self._advance()
            elif src.startswith("//", self.pos):
                while self.pos < len(src) and src[self.pos] != "\n":
                    self._advance()
            elif src.startswith("/*", self.pos):
                start_line, start_col = self.line, self.column
                self._advance(2)
                while not src.startswith("*/", self.pos):
                    if self.pos >= len(src):
                        raise self.error("unterminated block comment",
                                         start_line, start_col)
                    self._advance()
                self._advance(2)
            else:
                break

    def next(self) -> _Token:
        self._skip_trivia()
        src = self.source
        if self.pos >= len(src):
            return _Token("eof", "", self.line, self.column)
        line, column = self.line, self.column
        c = src[self.pos]
        if c.isascii() and (c.isalpha() or c == "_"):
            start = self.pos
            while (self.pos < len(src) and src[self.pos].isascii()
                   and (src[self.pos].isalnum() or src[self.pos] == "_")):
                self._advance()
            return _Token("ident", src[start:self.pos], line, column)
        if c.isdigit() or (c == "." and self.pos + 1 < len(src)
                           and src[self.pos + 1].isdigit()):
            start = self.pos
            while (self.pos < len(src)
                   and (src[self.pos].isdigit() or src[self.pos] in ".eE"
                        or (src[self.pos] in "+-" and src[self.pos - 1] in "eE"))):
                self._advance()
            return _Token("number", src[start:self.pos], line, column)
        if c in "\"'":
            return self._string(line, column)
        if c in self._SYMBOLS:
            self._advance()
            return _Token("symbol", c, line, column)
        raise self.error(f"unexpected character {c!r}")

    def _string(self, line: int, column: int) -> _Token:
        src = self.source
        quote = src[self.pos]
        self._advance()
        out = []
        while True:
            if self.pos >= len(src) or src[self.pos] == "\n":
                raise self.error("unterminated string literal", line, column)
            c = src[self.pos]
            if c == quote:
                self._advance()
                return _Token("string", "".join(out), line, column)
            if c == "\\":
                self._advance()
                if self.pos >= len(src):
                    raise self.error("unterminated string literal", line, column)
                esc = src[self.pos]
                self._advance()
                mapping = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\",
                           '"': '"', "'": "'", "0": "\0"}
                if esc in mapping:
                    out.append(mapping[esc])
                elif esc == "x":
                    digits = ""
                    while (len(digits) < 2 and self.pos < len(src)
                           and src[self.pos] in "0123456789abcdefABCDEF"):
                        digits += src[self.pos]
                        self._advance()
                    if not digits:
                        raise self.error("\\x escape needs hex digits")
                    out.append(chr(int(digits, 16)))
                else:
                    raise self.error(f"unknown escape \\{esc}")
            else:
                out.append(c)
                self._advance()


class _Parser:
    def __init__(self, source: str, filename: str):
        self.tokens = _Tokenizer(source, filename)
        self.filename = filename
        self.source = source
        self.current = self.tokens.next()

    def _error(self, message: str, token: Optional[_Token] = None) -> ProtoParseError:
        token = token or self.current
        return ProtoParseError(message, self.filename, token.line, token.column)

    def _advance(self) -> _Token:
        token = self.current
        self.current = self.tokens.next()
        return token

    def _expect_symbol(self, symbol: str) -> _Token:
        if self.current.kind != "symbol" or self.current.value != symbol:
            raise self._error(f"expected {symbol!r}, got {self.current.value!r}")
        return self._advance()

    def _expect_ident(self, what: str = "identifier") -> _Token:
        if self.current.kind != "ident":
            raise self._error(f"expected {what}, got {self.current.value!r}")
        return self._advance()

    def _at_symbol(self, symbol: str) -> bool:
        return self.current.kind == "symbol" and self.current.value == symbol

    def _at_ident(self, word: str) -> bool:
        return self.current.kind == "ident" and self.current.value == word

    # -- grammar -----------------------------------------------------------

    def parse_file(self) -> FileDescriptor:
        package = ""
        package_seen = False
        imports: list[str] = []
        messages: list[MessageDescriptor] = []
        enums: list[EnumDescriptor] = []
        while self.current.kind != "eof":
            if self._at_symbol(";"):
                self._advance()
            elif self._at_ident("syntax"):
                self._parse_syntax()
            elif self._at_ident("package"):
                if package_seen:
                    raise self._error("duplicate package statement")
                package = self._parse_package()
                package_seen = True
            elif self._at_ident("import"):
                imports.append(self._parse_import())
            elif self._at_ident("message"):
                messages.append(self._parse_message())
            elif self._at_ident("enum"):
                enums.append(self._parse_enum())
            elif (self.current.kind == "ident"
                  and self.current.value in _UNSUPPORTED_KEYWORDS):
                raise self._error(f"'{self.current.value}' is not supported in "
                                  f"this proto2 subset")
            else:
                raise self._error(
                    f"unexpected token {self.current.value!r} at file scope")
        file = FileDescriptor(self.filename, package, messages, enums,
                              imports, source=self.source)
        _qualify(file)
        _check_scope_names(file)
        _resolve_local(file)
        return file

    def _parse_syntax(self) -> None:
        self._advance()
        self._expect_symbol("=")
        token = self._advance()
        if token.kind != "string" or token.value != "proto2":
            raise self._error("only proto2 syntax is supported", token)
        self._expect_symbol(";")

    def _parse_package(self) -> str:
        self._advance()
        name = self._parse_dotted_name()
        self._expect_symbol(";")
        return name

    def _parse_import(self) -> str:
        self._advance()
        if self._at_ident("public") or self._at_ident("weak"):
            raise self._error(f"'{self.current.value}' imports are not "
                              f"supported in this proto2 subset")
        token = self._advance()
        if token.kind != "string":
            raise self._error("import expects a quoted file name", token)
        self._expect_symbol(";")
        return token.value

    def _parse_dotted_name(self) -> str:
        parts = [self._expect_ident().value]
        while self._at_symbol("."):
            self._advance()
            parts.append(self._expect_ident().value)
        return ".".join(parts)

    def _parse_message(self) -> MessageDescriptor:
        self._advance()
        name = self._expect_ident("message name").value
        self._expect_symbol("{")
        fields: list[FieldDescriptor] = []
        nested: list[MessageDescriptor] = []
        enums: list[EnumDescriptor] = []
        seen_numbers: dict[int, str] = {}
        seen_names: set[str] = set()
        while not self._at_symbol("}"):
            if self.current.kind == "eof":
                raise self._error(f"unterminated message '{name}'")
            if self._at_symbol(";"):
                self._advance()
            elif self._at_ident("message"):
                nested.append(self._parse_message())
            elif self._at_ident("enum"):
                enums.append(self._parse_enum())
            elif (self.current.kind == "ident"
                  and self.current.value in _UNSUPPORTED_KEYWORDS):
                raise self._error(f"'{self.current.value}' is not supported in "
                                  f"this proto2 subset")
            elif self.current.kind == "ident" and self.current.value in _LABELS:
                field = self._parse_field()
                if field.number in seen_numbers:
                    raise self._error(
                        f"duplicate tag number {field.number} in message "
                        f"'{name}' (also used by field "
                        f"'{seen_numbers[field.number]}')")
                if field.name in seen_names:
                    raise self._error(f"duplicate field name '{field.name}' "
                                      f"in message '{name}'")
                seen_numbers[field.number] = field.name
                seen_names.add(field.name)
                fields.append(field)
            else:
                raise self._error(
                    f"expected a field rule (required/optional/repeated), "
                    f"nested message, or enum; got {self.current.value!r}")
        self._expect_symbol("}")
        return MessageDescriptor(name, fields, nested, enums)

    def _parse_field(self) -> FieldDescriptor:
        label = _LABELS[self._advance().value]
        type_token = self.current
        ftype: Optional[FieldType] = None
        pending = ""
        if self._at_symbol("."):
            self._advance()
            pending = "." + self._parse_dotted_name()
        else:
            name = self._parse_dotted_name()
            if "." not in name and name in _SCALAR_TYPE_NAMES:
                ftype = _SCALAR_TYPE_NAMES[name]
            else:
                pending = name
        field_name = self._expect_ident("field name").value
        self._expect_symbol("=")
        number = self._parse_integer("field tag number")
        if number < 1:
            raise self._error(f"field tag number must be >= 1, got {number}",
                              type_token)
        if RESERVED_TAG_LO <= number <= RESERVED_TAG_HI:
            raise self._error(
                f"tag number {number} is in the reserved range "
                f"{RESERVED_TAG_LO}-{RESERVED_TAG_HI}")
        if number > MAX_TAG:
            raise self._error(f"tag number {number} exceeds maximum {MAX_TAG}")
        packed = False
        default = None
        has_default = False
        if self._at_symbol("["):
            packed, default, has_default = self._parse_field_options(
                ftype, label, field_name)
        self._expect_symbol(";")
        field = FieldDescriptor(field_name, number, label, ftype,
                                packed=packed, pending_type_name=pending)
        if has_default:
            field.default_value = default
        return field

    def _parse_field_options(self, ftype, label, field_name):
        self._advance()  # [
        packed = False
        default = None
        has_default = False
        while True:
            option = self._expect_ident("option name").value
            self._expect_symbol("=")
            if option == "packed":
                value = self._expect_ident("true or false").value
                if value not in ("true", "false"):
                    raise self._error("packed expects true or false")
                packed = value == "true"
                if packed and label is not FieldLabel.REPEATED:
                    raise self._error(
                        f"field '{field_name}': packed is only valid on "
                        f"repeated fields")
                if packed and ftype is not None and ftype not in PACKABLE_TYPES:
                    raise self._error(
                        f"field '{field_name}': type {ftype.value} cannot be "
                        f"packed")
            elif option == "default":
                if label is FieldLabel.REPEATED:
                    raise self._error(
                        f"field '{field_name}': repeated fields cannot have "
                        f"a default")
                default = self._parse_default_literal(ftype, field_name)
                has_default = True
            else:
                raise self._error(f"unsupported field option '{option}' "
                                  f"(only packed and default)")
            if self._at_symbol(","):
                self._advance()
                continue
            break
        self._expect_symbol("]")
        return packed, default, has_default

    def _parse_default_literal(self, ftype: Optional[FieldType],
                               field_name: str):
        token = self.current
        if ftype is None:
            # Enum reference (message defaults are rejected at resolution).
            return self._expect_ident("enum value name").value
        if ftype is FieldType.BOOL:
            value = self._expect_ident("true or false").value
            if value not in ("true", "false"):
                raise self._error("bool default expects true or false", token)
            return value == "true"
        if ftype is FieldType.STRING:
            if token.kind != "string":
                raise self._error("string default expects a quoted literal",
                                  token)
            self._advance()
            return token.value
        if ftype is FieldType.BYTES:
            if token.kind != "string":
                raise self._error("bytes default expects a quoted literal",
                                  token)
            self._advance()
            return token.value.encode("utf-8", "surrogateescape")
        if ftype in (FieldType.DOUBLE, FieldType.FLOAT):
            return float(self._parse_signed_number(field_name))
        value = self._parse_signed_number(field_name)
        if isinstance(value, float):
            raise self._error(
                f"field '{field_name}': integer default cannot be fractional",
                token)
        return value

    def _parse_signed_number(self, what: str):
        negative = False
        if self._at_symbol("-"):
            negative = True
            self._advance()
        token = self.current
        if token.kind == "ident" and token.value in ("inf", "nan"):
            self._advance()
            value = float(token.value)
        elif token.kind != "number":
            raise self._error(f"expected a number for {what}", token)
        else:
            self._advance()
            text = token.value
            if any(c in text for c in ".eE"):
                value = float(text)
            else:
                value = int(text)
        return -value if negative else value

    def _parse_integer(self, what: str) -> int:
        token = self.current
        value = self._parse_signed_number(what)
        if isinstance(value, float):
            raise self._error(f"{what} must be an integer", token)
        return value

    def _parse_enum(self) -> EnumDescriptor:
        self._advance()
        name = self._expect_ident("enum name").value
        self._expect_symbol("{")
        values: list[EnumValueDescriptor] = []
        seen: set[str] = set()
        while not self._at_symbol("}"):
            if self.current.kind == "eof":
                raise self._error(f"unterminated enum '{name}'")
            if self._at_symbol(";"):
                self._advance()
                continue
            value_name = self._expect_ident("enum value name").value
            if value_name in seen:
                raise self._error(f"duplicate enum value name '{value_name}' "
                                  f"in enum '{name}'")
            seen.add(value_name)
            self._expect_symbol("=")
            number = self._parse_integer("enum value number")
            self._expect_symbol(";")
            values.append(EnumValueDescriptor(value_name, number))
        self._expect_symbol("}")
        if not values:
            raise self._error(f"enum '{name}' must declare at least one value")
        return EnumDescriptor(name, values)


def parse_proto_source(source: str, filename: str = "<string>") -> FileDescriptor:
    """Parse schema text into a file descriptor.

    Type references that can be resolved within the file are bound here;
    references into imported files stay pending until the file is loaded
    into a pool together with its imports.
    """
    return _Parser(source, filename).parse_file()


# -- name qualification and local resolution --------------------------------


def _qualify(file: FileDescriptor) -> None:
    prefix = file.package + "." if file.package else ""
    for m in file.messages:
        _qualify_message(m, prefix)
    for e in file.enums:
        _qualify_enum(e, prefix)


def _qualify_message(message: MessageDescriptor, prefix: str) -> None:
    message.full_name = prefix + message.name
    inner = message.full_name + "."
    for f in message.fields:
        f.full_name = inner + f.name
    for e in message.enum_types:
        _qualify_enum(e, inner)
    for nested in message.nested_types:
        _qualify_message(nested, inner)


def _qualify_enum(enum: EnumDescriptor, prefix: str) -> None:
    enum.full_name = prefix + enum.name
    # Enum values scope to the enum's *container*, so sibling enums of one
    # scope cannot reuse constant names.
    for v in enum.values:
        v.full_name = prefix + v.name


def _check_scope_names(file: FileDescriptor) -> None:
    def check(scope_name: str, names) -> None:
        seen: set[str] = set()
        for kind, name in names:
            if name in seen:
                raise ProtoParseError(
                    f"name '{name}' declared more than once in {scope_name}",
                    file.filename)
            seen.add(name)

    top = [("message", m.name) for m in file.messages]
    top += [("enum", e.name) for e in file.enums]
    for e in file.enums:
        top += [("enum value", v.name) for v in e.values]
    check(f"file '{file.filename}'", top)

    def walk(message: MessageDescriptor) -> None:
        names = [("field", f.name) for f in message.fields]
        names += [("nested message", m.name) for m in message.nested_types]
        names += [("enum", e.name) for e in message.enum_types]
        for e in message.enum_types:
            names += [("enum value", v.name) for v in e.values]
        check(f"message '{message.full_name}'", names)
        for nested in message.nested_types:
            walk(nested)

    for m in file.messages:
        walk(m)


def _resolve_local(file: FileDescriptor) -> None:
    from .descriptors import iter_messages

    symbols = {m.full_name: m for m in iter_messages(file)}
    for m in iter_messages(file):
        for e in m.enum_types:
            symbols[e.full_name] = e
    for e in file.enums:
        symbols[e.full_name] = e
    for m in iter_messages(file):
        for f in m.fields:
            if not f._pending_type_name:
                continue
            target = resolve_type_name(f._pending_type_name,
                                       m.full_name, symbols)
            if target is not None:
                bind_field_type(f, target)


# -- canonical rendering ------------------------------------------------------


def render_proto_source(file: FileDescriptor) -> str:
    """Canonical schema text; re-parsing it reproduces an equal tree."""
    lines: list[str] = []
    if file.package:
        lines.append(f"package {file.package};")
        lines.append("")
    for path in file.imports:
        lines.append(f'import "{path}";')
    if file.imports:
        lines.append("")
    for e in file.enums:
        lines.extend(_render_enum(e, 0))
        lines.append("")
    for m in file.messages:
        lines.extend(_render_message(m, 0))
        lines.append("")
    while lines and not lines[-1]:
        lines.pop()
    return "\n".join(lines) + "\n"


def _render_enum(enum: EnumDescriptor, depth: int) -> list[str]:
    pad = "  " * depth
    lines = [f"{pad}enum {enum.name} {{"]
    for v in enum.values:
        lines.append(f"{pad}  {v.name} = {v.number};")
    lines.append(f"{pad}}}")
    return lines


def _render_message(message: MessageDescriptor, depth: int) -> list[str]:
    pad = "  " * depth
    lines = [f"{pad}message {message.name} {{"]
    for e in message.enum_types:
        lines.extend(_render_enum(e, depth + 1))
    for nested in message.nested_types:
        lines.extend(_render_message(nested, depth + 1))
    for f in message.fields:
        lines.append(f"{pad}  {_render_field(f)}")
    lines.append(f"{pad}}}")
    return lines


def _render_field(field: FieldDescriptor) -> str:
    if field.type in (FieldType.MESSAGE, FieldType.ENUM):
        type_name = "." + field.type_name  # fully qualified, unambiguous
    elif field.type is None:
        type_name = field._pending_type_name
    else:
        type_name = field.type.value
    text = f"{field.label.value} {type_name} {field.name} = {field.number}"
    options = []
    if field.packed:
        options.append("packed=true")
    if field.default_value is not None:
        options.append(f"default={_render_default(field)}")
    if options:
        text += f" [{', '.join(options)}]"
    return text + ";"


def _render_default(field: FieldDescriptor) -> str:
    value = field.default_value
    if field.type is FieldType.BOOL:
        return "true" if value else "false"
    if field.type is FieldType.STRING:
        return '"' + _escape_literal(value.encode("utf-8")) + '"'
    if field.type is FieldType.BYTES:
        return '"' + _escape_literal(value) + '"'
    if field.type is FieldType.ENUM or field.type is None:
        return str(value)
    return repr(value) if isinstance(value, float) else str(value)


def _escape_literal(data: bytes) -> str:
    out = []
    for b in data:
        c = chr(b)
        if c == "\\":
            out.append("\\\\")
        elif c == '"':
            out.append('\\"')
        elif 0x20 <= b < 0x7F:
            out.append(c)
        else:
            out.append(f"\\x{b:02x}")
    return "".join(out)


# -- file loading -------------------------------------------------------------


def load_proto_files(pool: DescriptorPool, paths, search_paths=()) -> DescriptorPool:
    """Read one or more ``.proto`` files (or directories of them) into a
    pool, following imports through the search-path list.

    File descriptors are keyed by their path relative to the search path
    that contains them, so ``import "rexp.proto"`` matches a file loaded
    from any search root.  Circular imports are an error.
    """
    roots = [os.path.abspath(p) for p in search_paths]
    parsed: dict[str, FileDescriptor] = {}
    loading: list[str] = []

    def canonical_name(path: str) -> str:
        absolute = os.path.abspath(path)
        for root in roots:
            if absolute.startswith(root + os.sep):
                return os.path.relpath(absolute, root).replace(os.sep, "/")
        return os.path.basename(absolute)

    def locate(import_name: str, importer: str) -> str:
        for root in roots:
            candidate = os.path.join(root, import_name)
            if os.path.isfile(candidate):
                return candidate
        raise PoolError(f"{importer!r} imports {import_name!r}, not found on "
                        f"the search path {roots or '[]'}")

    def load_one(path: str) -> None:
        name = canonical_name(path)
        if name in loading:
            cycle = " -> ".join(loading + [name])
            raise PoolError(f"circular import: {cycle}")
        if name in parsed or name in pool._sources:
            return
        loading.append(name)
        try:
            with open(path, encoding="utf-8") as handle:
                source = handle.read()
            file = parse_proto_source(source, name)
            for imported in file.imports:
                load_one(locate(imported, name))
            parsed[name] = file
        finally:
            loading.pop()

    expanded: list[str] = []
    for path in paths:
        if os.path.isdir(path):
            roots.append(os.path.abspath(path))
            for entry in sorted(os.listdir(path)):
                if entry.endswith(".proto"):
                    expanded.append(os.path.join(path, entry))
        else:
            if not os.path.isfile(path):
                raise FileNotFoundError(f"no such proto file: {path}")
            roots.append(os.path.dirname(os.path.abspath(path)) or ".")
            expanded.append(path)

    for path in expanded:
        load_one(path)
    pool.load(parsed.values())
    return pool
