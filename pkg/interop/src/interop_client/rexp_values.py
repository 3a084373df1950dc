"""Building and summarizing universal-schema messages with the reference
runtime's generated classes."""

from __future__ import annotations

from . import bindings


def build_value(value) -> "bindings.REXP":
    """Map a plain host value onto an ``rexp.REXP`` message.

    Scalars become length-1 vectors; homogeneous lists become vectors;
    dicts become named lists.
    """
    msg = bindings.REXP()
    if value is None:
        msg.rclass = bindings.rclass("NULLTYPE")
        return msg
    if isinstance(value, dict):
        msg.rclass = bindings.rclass("LIST")
        for child in value.values():
            msg.rexpValue.append(build_value(child))
        names = bindings.REXP()
        names.rclass = bindings.rclass("STRING")
        for name in value.keys():
            names.stringValue.add().strval = str(name)
        msg.attrName.append("names")
        msg.attrValue.append(names)
        return msg
    items = value if isinstance(value, (list, tuple)) else [value]
    if all(isinstance(v, bool) for v in items):
        msg.rclass = bindings.rclass("LOGICAL")
        msg.booleanValue.extend(1 if v else 0 for v in items)
    elif all(isinstance(v, int) and not isinstance(v, bool) for v in items) \
            and all(-(2**31) < v < 2**31 for v in items):
        msg.rclass = bindings.rclass("INTEGER")
        msg.intValue.extend(items)
    elif all(isinstance(v, (int, float)) and not isinstance(v, bool)
             for v in items):
        msg.rclass = bindings.rclass("REAL")
        msg.realValue.extend(float(v) for v in items)
    elif all(isinstance(v, str) for v in items):
        msg.rclass = bindings.rclass("STRING")
        for v in items:
            msg.stringValue.add().strval = v
    else:
        raise ValueError(f"cannot map {value!r} onto the universal schema")
    return msg


def build_named_arguments(pairs) -> "bindings.REXP":
    """A LIST message whose ``names`` attribute carries the argument names,
    the call convention of the RPC service."""
    return build_value(dict(pairs))


def value_length(msg) -> int:
    name = bindings.rclass_name(msg.rclass)
    return len({
        "STRING": msg.stringValue, "RAW": msg.rawValue,
        "REAL": msg.realValue, "COMPLEX": msg.complexValue,
        "INTEGER": msg.intValue, "LIST": msg.rexpValue,
        "LOGICAL": msg.booleanValue, "NULLTYPE": (),
    }[name])


def summarize(msg, indent: str = "") -> str:
    """Human-readable field summary of a parsed REXP message."""
    name = bindings.rclass_name(msg.rclass)
    lines = [f"{indent}rclass: {name}", f"{indent}length: {value_length(msg)}"]
    if msg.attrName:
        lines.append(f"{indent}attributes: {', '.join(msg.attrName)}")
    if name == "LIST":
        for i, child in enumerate(msg.rexpValue, start=1):
            lines.append(f"{indent}[{i}]")
            lines.append(summarize(child, indent + "  "))
    return "\n".join(lines)
