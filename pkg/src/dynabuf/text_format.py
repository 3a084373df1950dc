"""Human-readable text rendering and parsing of dynamic messages.

Output is one ``name: value`` line per set field in tag order; nested
messages become indented ``name { ... }`` blocks and repeated fields emit
one line or block per element.  The parser accepts everything the printer
emits plus tolerant whitespace, ``#`` comments, and an optional colon
before an opening brace.
"""

from __future__ import annotations

from .descriptors import FieldDescriptor, FieldType, MessageDescriptor
from .errors import TextParseError
from .message import DynamicMessage
from .coerce import INT32_MIN, INT32_MAX

_INDENT = "  "


def summary_line(message: DynamicMessage) -> str:
    """The one-line display form: message type plus set-field count."""
    return message.summary()


def print_message(message: DynamicMessage) -> str:
    """Render set fields as text; unknown fields are omitted (no names)."""
    lines: list[str] = []
    _print_into(message, lines, 0)
    return "".join(lines)


def _print_into(message: DynamicMessage, lines: list[str], depth: int) -> None:
    pad = _INDENT * depth
    for field, value in message.present_fields():
        items = value if field.is_repeated() else [value]
        for item in items:
            if field.type is FieldType.MESSAGE:
                lines.append(f"{pad}{field.name} {{\n")
                _print_into(item, lines, depth + 1)
                lines.append(f"{pad}}}\n")
            else:
                lines.append(f"{pad}{field.name}: {_format_scalar(field, item)}\n")


def _format_scalar(field: FieldDescriptor, value) -> str:
    ftype = field.type
    if ftype is FieldType.STRING:
        return _quote(value.encode("utf-8", "surrogateescape"))
    if ftype is FieldType.BYTES:
        return _quote(value)
    if ftype is FieldType.BOOL:
        return "true" if value else "false"
    if ftype is FieldType.ENUM:
        named = field.enum_type._by_number.get(value)
        return named.name if named is not None else str(value)
    if ftype in (FieldType.DOUBLE, FieldType.FLOAT):
        return repr(value)  # shortest text that round-trips the 64-bit value
    return str(value)


def _quote(data: bytes) -> str:
    out = ['"']
    i = 0
    while i < len(data):
        b = data[i]
        if b == 0x5C:
            out.append("\\\\")
        elif b == 0x22:
            out.append('\\"')
        elif b == 0x0A:
            out.append("\\n")
        elif b == 0x0D:
            out.append("\\r")
        elif b == 0x09:
            out.append("\\t")
        elif 0x20 <= b < 0x7F:
            out.append(chr(b))
        elif b >= 0x80:
            # Try to keep printable UTF-8 text readable; fall back to hex.
            decoded = None
            for width in (2, 3, 4):
                try:
                    decoded = data[i:i + width].decode("utf-8")
                    break
                except UnicodeDecodeError:
                    continue
            if decoded and decoded.isprintable():
                out.append(decoded)
                i += width
                continue
            out.append(f"\\x{b:02x}")
        else:
            out.append(f"\\x{b:02x}")
        i += 1
    out.append('"')
    return "".join(out)


class _TextScanner:
    """Token stream over text-format input: identifiers, numbers, quoted
    strings (returned as raw bytes), and the punctuation set."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.column = 1

    def error(self, message: str) -> TextParseError:
        return TextParseError(message, self.line, self.column)

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.column = 1
            else:
                self.column += 1
            self.pos += 1

    def skip_trivia(self) -> None:
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c in " \t\r\n":
                self._advance()
            elif c == "#":
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self._advance()
            else:
                break

    def at_end(self) -> bool:
        self.skip_trivia()
        return self.pos >= len(self.text)

    def peek(self) -> str:
        self.skip_trivia()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take_symbol(self, symbol: str) -> bool:
        if self.peek() == symbol:
            self._advance()
            return True
        return False

    def take_ident(self) -> str:
        self.skip_trivia()
        start = self.pos
        while (self.pos < len(self.text)
               and (self.text[self.pos].isalnum() or self.text[self.pos] in "_")):
            self._advance()
        if start == self.pos:
            raise self.error(f"expected an identifier, got "
                             f"{self.text[self.pos:self.pos + 1]!r}")
        return self.text[start:self.pos]

    def take_scalar_token(self) -> str:
        """The raw token for a scalar value: everything up to whitespace,
        a brace, or a comment."""
        self.skip_trivia()
        start = self.pos
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c in " \t\r\n#{}":
                break
            self._advance()
        if start == self.pos:
            raise self.error("expected a value")
        return self.text[start:self.pos]

    def take_string(self) -> bytes:
        self.skip_trivia()
        if self.pos >= len(self.text) or self.text[self.pos] not in "\"'":
            raise self.error("expected a quoted string")
        quote = self.text[self.pos]
        self._advance()
        out = bytearray()
        while True:
            if self.pos >= len(self.text):
                raise self.error("unterminated string")
            c = self.text[self.pos]
            if c == quote:
                self._advance()
                return bytes(out)
            if c == "\n":
                raise self.error("unterminated string")
            if c == "\\":
                self._advance()
                out.extend(self._escape())
            else:
                out.extend(c.encode("utf-8", "surrogateescape"))
                self._advance()

    def _escape(self) -> bytes:
        if self.pos >= len(self.text):
            raise self.error("unterminated string escape")
        c = self.text[self.pos]
        simple = {"n": b"\n", "r": b"\r", "t": b"\t", "\\": b"\\",
                  '"': b'"', "'": b"'", "a": b"\a", "b": b"\b",
                  "f": b"\f", "v": b"\v"}
        if c in simple:
            self._advance()
            return simple[c]
        if c == "x":
            self._advance()
            digits = ""
            while (len(digits) < 2 and self.pos < len(self.text)
                   and self.text[self.pos] in "0123456789abcdefABCDEF"):
                digits += self.text[self.pos]
                self._advance()
            if not digits:
                raise self.error("\\x escape needs hex digits")
            return bytes([int(digits, 16)])
        if c.isdigit():
            digits = ""
            while (len(digits) < 3 and self.pos < len(self.text)
                   and self.text[self.pos] in "01234567"):
                digits += self.text[self.pos]
                self._advance()
            return bytes([int(digits, 8) & 0xFF])
        raise self.error(f"unknown string escape \\{c}")


def parse_message(descriptor: MessageDescriptor, text: str) -> DynamicMessage:
    """Parse text-format input into a message of the given type."""
    scanner = _TextScanner(text)
    message = DynamicMessage(descriptor)
    _parse_fields(scanner, message, end_brace=False)
    return message


def _parse_fields(scanner: _TextScanner, message: DynamicMessage,
                  end_brace: bool) -> None:
    while True:
        if scanner.at_end():
            if end_brace:
                raise scanner.error("missing closing '}'")
            return
        if end_brace and scanner.take_symbol("}"):
            return
        if scanner.peek() == "}":
            raise scanner.error("unmatched '}'")
        name = scanner.take_ident()
        field = message.descriptor.find_field(name)
        if field is None:
            raise scanner.error(
                f"message type '{message.descriptor.full_name}' has no field "
                f"named '{name}'")
        had_colon = scanner.take_symbol(":")
        if field.type is FieldType.MESSAGE:
            if not scanner.take_symbol("{"):
                raise scanner.error(
                    f"field '{name}' expects a {{ ... }} message block")
            nested = DynamicMessage(field.message_type)
            _parse_fields(scanner, nested, end_brace=True)
            if field.is_repeated():
                message.wire_append(name, nested)
            else:
                message.wire_set(name, nested)
        else:
            if not had_colon:
                raise scanner.error(f"expected ':' after field '{name}'")
            value = _parse_scalar(scanner, field)
            if field.is_repeated():
                message.wire_append(name, value)
            else:
                message.wire_set(name, value)


def _parse_scalar(scanner: _TextScanner, field: FieldDescriptor):
    ftype = field.type
    if ftype in (FieldType.STRING, FieldType.BYTES):
        raw = scanner.take_string()
        return raw if ftype is FieldType.BYTES else raw.decode(
            "utf-8", "surrogateescape")
    token = scanner.take_scalar_token()
    if ftype is FieldType.BOOL:
        if token in ("true", "True", "1", "t"):
            return True
        if token in ("false", "False", "0", "f"):
            return False
        raise scanner.error(f"field '{field.name}': {token!r} is not a boolean")
    if ftype is FieldType.ENUM:
        if token.lstrip("-").isdigit():
            number = int(token)
            if not INT32_MIN <= number <= INT32_MAX:
                raise scanner.error(
                    f"field '{field.name}': enum number {number} out of range")
            return number
        if field.enum_type.has(token):
            return field.enum_type.value(name=token).number
        raise scanner.error(
            f"field '{field.name}': '{token}' is not a value of enum "
            f"'{field.enum_type.full_name}'")
    if ftype in (FieldType.DOUBLE, FieldType.FLOAT):
        try:
            return float(token)
        except ValueError:
            raise scanner.error(
                f"field '{field.name}': {token!r} is not a number") from None
    try:
        return int(token)
    except ValueError:
        raise scanner.error(
            f"field '{field.name}': {token!r} is not an integer") from None
