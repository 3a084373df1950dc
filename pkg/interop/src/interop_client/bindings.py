"""Reference-runtime message classes compiled from the primary's schemas.

The schema compiler (``protoc``) turns the shared ``proto/`` directory into
a serialized descriptor set at build time; the official runtime's
descriptor pool and message factory then provide concrete message classes.
This module contains no codec logic of its own.
"""

from __future__ import annotations

import functools
import os
import subprocess
import tempfile
from pathlib import Path

from google.protobuf import descriptor_pb2, descriptor_pool, message_factory

PROTO_DIR_ENV = "INTEROP_PROTO_DIR"

SCHEMA_FILES = ("addressbook.proto", "rexp.proto", "histogram.proto",
                "descriptor.proto")


def proto_dir() -> Path:
    """The shared schema directory: explicit override, the installed
    primary package's data directory, or the in-repo layout."""
    override = os.environ.get(PROTO_DIR_ENV)
    if override:
        return Path(override)
    try:
        from importlib import resources
        candidate = Path(str(resources.files("dynabuf") / "proto"))
        if candidate.is_dir():
            return candidate
    except (ImportError, ModuleNotFoundError):
        pass
    repo = Path(__file__).resolve().parents[3]
    candidate = repo / "src" / "dynabuf" / "proto"
    if candidate.is_dir():
        return candidate
    raise FileNotFoundError(
        f"cannot locate the shared proto directory; set {PROTO_DIR_ENV}")


def compile_descriptor_set(directory: Path) -> bytes:
    """Run the schema compiler over the shared schemas."""
    with tempfile.TemporaryDirectory() as scratch:
        out_path = Path(scratch) / "schemas.desc"
        command = ["protoc", f"--proto_path={directory}",
                   f"--descriptor_set_out={out_path}"]
        command += [str(directory / name) for name in SCHEMA_FILES]
        result = subprocess.run(command, capture_output=True, text=True)
        if result.returncode != 0:
            raise RuntimeError(f"protoc failed:\n{result.stderr}")
        return out_path.read_bytes()


@functools.lru_cache(maxsize=1)
def _pool() -> descriptor_pool.DescriptorPool:
    file_set = descriptor_pb2.FileDescriptorSet()
    file_set.MergeFromString(compile_descriptor_set(proto_dir()))
    pool = descriptor_pool.DescriptorPool()
    for file_proto in file_set.file:
        pool.Add(file_proto)
    return pool


def message_class(full_name: str):
    return message_factory.GetMessageClass(_pool().FindMessageTypeByName(full_name))


@functools.lru_cache(maxsize=None)
def _classes():
    return {
        "REXP": message_class("rexp.REXP"),
        "STRING": message_class("rexp.STRING"),
        "CMPLX": message_class("rexp.CMPLX"),
        "HistogramState": message_class("HistogramTools.HistogramState"),
        "Person": message_class("tutorial.Person"),
        "AddressBook": message_class("tutorial.AddressBook"),
    }


def REXP():
    return _classes()["REXP"]()


def HistogramState():
    return _classes()["HistogramState"]()


def Person():
    return _classes()["Person"]()


def rclass(name: str) -> int:
    """Number of an RClass enum constant (STRING, REAL, LIST, ...)."""
    enum_type = _pool().FindEnumTypeByName("rexp.REXP.RClass")
    return enum_type.values_by_name[name].number


def rclass_name(number: int) -> str:
    enum_type = _pool().FindEnumTypeByName("rexp.REXP.RClass")
    return enum_type.values_by_number[number].name
