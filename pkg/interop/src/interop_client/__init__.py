"""Cross-runtime validation harness for dynabuf payloads.

Wraps the reference Protocol Buffers runtime with message classes compiled
from the primary package's shared ``proto/`` directory; implements no codec
logic of its own.
"""

from .bindings import (HistogramState, Person, REXP, message_class,
                       proto_dir, rclass, rclass_name)
from .rexp_values import build_named_arguments, build_value, summarize

__all__ = ["HistogramState", "Person", "REXP", "build_named_arguments",
           "build_value", "message_class", "proto_dir", "rclass",
           "rclass_name", "summarize"]
