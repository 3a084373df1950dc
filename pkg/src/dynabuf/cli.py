"""Command-line front end.

Subcommands: ``compile`` (schema listing), ``encode``/``decode`` (text <->
wire for a named message type), ``rexp encode|decode`` (structured values
<-> universal payloads), ``bench`` (serialized-size report), and ``serve``
(the HTTP service).  Exit codes: 0 success, 2 usage error, 1 data error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import zlib

from . import bundled, text_format, wire
from .coerce import CoercionOptions
from .descriptors import DescriptorPool, MessageDescriptor
from .errors import DynabufError
from .message import DynamicMessage
from .proto_parser import load_proto_files, parse_proto_source
from .rexp_codec import serialize_value, unserialize_value
from .service import serve
from .values import dumps_value, loads_value

PROTO_PATH_ENV = "DYNABUF_PROTO_PATH"
BENCH_COMPRESSION_LEVEL = 6


def _proto_paths(args) -> list[str]:
    paths = list(args.proto_path or [])
    env = os.environ.get(PROTO_PATH_ENV, "")
    paths.extend(p for p in env.split(os.pathsep) if p)
    return paths


def _options(args) -> CoercionOptions:
    if args.int64_as_string:
        return CoercionOptions(int64_as_string=True)
    return CoercionOptions.from_env()


def _schema_pool(args) -> DescriptorPool:
    """Bundled schemas plus every .proto found on the proto path."""
    pool = DescriptorPool()
    pool.load(parse_proto_source(bundled.read_bundled_source(name), name)
              for name in bundled.BUNDLED_FILES)
    paths = _proto_paths(args)
    dirs = [p for p in paths if os.path.isdir(p)]
    if dirs:
        load_proto_files(pool, dirs, search_paths=paths)
    return pool


def _message_type(pool: DescriptorPool, full_name: str) -> MessageDescriptor:
    found = pool.lookup(full_name)
    if not isinstance(found, MessageDescriptor):
        raise DynabufError(f"unknown message type '{full_name}' "
                           f"(is it on the proto path?)")
    return found


def cmd_compile(args) -> int:
    pool = DescriptorPool()
    load_proto_files(pool, args.paths, search_paths=_proto_paths(args))
    for name in pool.names():
        print(name)
    return 0


def cmd_encode(args) -> int:
    pool = _schema_pool(args)
    descriptor = _message_type(pool, args.type)
    with open(args.input, encoding="utf-8") as handle:
        text = handle.read()
    payload = wire.encode_message(text_format.parse_message(descriptor, text))
    if args.out:
        with open(args.out, "wb") as handle:
            handle.write(payload)
    else:
        sys.stdout.buffer.write(payload)
    return 0


def _named_list_jsonable(message: DynamicMessage, options: CoercionOptions):
    out = {}
    for name, value in message.to_named_list(options):
        if isinstance(value, DynamicMessage):
            value = _named_list_jsonable(value, options)
        elif isinstance(value, list):
            value = [_named_list_jsonable(v, options)
                     if isinstance(v, DynamicMessage) else _plain(v)
                     for v in value]
        else:
            value = _plain(value)
        out[name] = value
    return out


def _plain(value):
    if isinstance(value, bytes):
        return value.decode("utf-8", "replace")
    return value


def cmd_decode(args) -> int:
    pool = _schema_pool(args)
    descriptor = _message_type(pool, args.type)
    with open(args.input, "rb") as handle:
        payload = handle.read()
    message = wire.decode_message(descriptor, payload)
    if args.named_list:
        print(json.dumps(_named_list_jsonable(message, _options(args)),
                         indent=2, ensure_ascii=False))
    else:
        sys.stdout.write(text_format.print_message(message))
    return 0


def cmd_rexp_encode(args) -> int:
    with open(args.input, encoding="utf-8") as handle:
        value = loads_value(handle.read())
    payload, warnings = serialize_value(value)
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if args.out:
        with open(args.out, "wb") as handle:
            handle.write(payload)
    else:
        sys.stdout.buffer.write(payload)
    return 0


def cmd_rexp_decode(args) -> int:
    with open(args.input, "rb") as handle:
        payload = handle.read()
    print(dumps_value(unserialize_value(payload), pretty=args.pretty))
    return 0


def cmd_bench(args) -> int:
    """Size report: canonical text rendering vs. universal payload vs. the
    payload after fixed-level deflate compression."""
    rows = []
    for path in args.inputs:
        with open(path, encoding="utf-8") as handle:
            value = loads_value(handle.read())
        raw = dumps_value(value).encode("utf-8")
        payload, _ = serialize_value(value)
        compressed = zlib.compress(payload, BENCH_COMPRESSION_LEVEL)
        rows.append((os.path.basename(path), len(raw), len(payload),
                     len(compressed)))

    width = max([len(r[0]) for r in rows] + [len("item")])
    header = f"{'item':<{width}}  {'raw':>10}  {'pb':>10}  {'pb.gz':>10}"
    print(header)
    print("-" * len(header))
    for name, raw_size, pb_size, gz_size in rows:
        print(f"{name:<{width}}  {raw_size:>10}  {pb_size:>10}  {gz_size:>10}")
    total_raw = sum(r[1] for r in rows)
    total_pb = sum(r[2] for r in rows)
    total_gz = sum(r[3] for r in rows)
    print("-" * len(header))
    print(f"{'total':<{width}}  {total_raw:>10}  {total_pb:>10}  {total_gz:>10}")
    if total_raw:
        rel_pb = 100.0 * total_pb / total_raw
        rel_gz = 100.0 * total_gz / total_raw
        print(f"{'relative':<{width}}  {'100.0%':>10}  {rel_pb:>9.1f}%  "
              f"{rel_gz:>9.1f}%")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as handle:
            handle.write("item,raw_size,pb_size,pb_gzip_size\n")
            for name, raw_size, pb_size, gz_size in rows:
                handle.write(f"{name},{raw_size},{pb_size},{gz_size}\n")
    return 0


def cmd_serve(args) -> int:
    handle = serve(host=args.host, port=args.port)
    # flush so wrappers watching a pipe see the bound port immediately
    print(f"serving on http://{handle.host}:{handle.port} "
          f"(GET /ocpu/object/{{name}}/pb, POST /ocpu/fn/{{name}}/pb)",
          flush=True)
    try:
        handle.thread.join()
    except KeyboardInterrupt:
        print("shutting down")
        handle.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dynabuf",
        description="Reflection-based Protocol Buffers toolkit")
    parser.add_argument("--proto-path", action="append", metavar="DIR",
                        help="schema search directory (repeatable; also "
                             f"{PROTO_PATH_ENV})")
    parser.add_argument("--int64-as-string", action="store_true",
                        help="surface 64-bit integers as decimal strings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="load schemas and list descriptors")
    p.add_argument("paths", nargs="+", metavar="PROTO_OR_DIR")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("encode", help="text format -> wire bytes")
    p.add_argument("--type", required=True, metavar="FULL_NAME")
    p.add_argument("--out", metavar="FILE")
    p.add_argument("input", metavar="TEXT_FILE")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="wire bytes -> text format")
    p.add_argument("--type", required=True, metavar="FULL_NAME")
    p.add_argument("--named-list", action="store_true",
                   help="print a named list (JSON) of host values instead")
    p.add_argument("input", metavar="WIRE_FILE")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("rexp", help="universal structured-value payloads")
    rexp_sub = p.add_subparsers(dest="rexp_command", required=True)
    q = rexp_sub.add_parser("encode", help="value JSON -> .pb payload")
    q.add_argument("--out", metavar="FILE")
    q.add_argument("input", metavar="JSON_FILE")
    q.set_defaults(func=cmd_rexp_encode)
    q = rexp_sub.add_parser("decode", help=".pb payload -> value JSON")
    q.add_argument("--pretty", action="store_true")
    q.add_argument("input", metavar="PB_FILE")
    q.set_defaults(func=cmd_rexp_decode)

    p = sub.add_parser("bench", help="serialized-size report")
    p.add_argument("--csv", metavar="FILE",
                   help="also write machine-readable rows")
    p.add_argument("inputs", nargs="+", metavar="JSON_FILE")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8004)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DynabufError, OSError, ValueError) as exc:
        print(f"dynabuf: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
