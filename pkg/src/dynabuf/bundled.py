"""Access to the schema files shipped inside the package."""

from __future__ import annotations

import functools
from importlib import resources

from .descriptors import DescriptorPool, MessageDescriptor
from .proto_parser import parse_proto_source

BUNDLED_FILES = ("addressbook.proto", "rexp.proto", "histogram.proto",
                 "descriptor.proto")


def proto_dir() -> str:
    """Filesystem path of the bundled ``proto/`` directory."""
    return str(resources.files("dynabuf") / "proto")


def read_bundled_source(filename: str) -> str:
    return (resources.files("dynabuf") / "proto" / filename).read_text("utf-8")


@functools.lru_cache(maxsize=1)
def bundled_pool() -> DescriptorPool:
    """A pool preloaded with every bundled schema.

    Built once per process; immutable after that, so it is safe to share.
    Callers that want to add their own files should start a fresh pool.
    """
    pool = DescriptorPool()
    pool.load(parse_proto_source(read_bundled_source(name), name)
              for name in BUNDLED_FILES)
    return pool


def bundled_message_type(full_name: str) -> MessageDescriptor:
    found = bundled_pool().lookup(full_name)
    if not isinstance(found, MessageDescriptor):
        raise KeyError(f"no bundled message type {full_name!r}")
    return found
