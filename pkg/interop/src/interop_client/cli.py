"""Cross-runtime validation commands.

``make-fixture`` writes the reference histogram payload; ``fetch`` GETs an
object from a running dynabuf service and parses it with the reference
runtime; ``call`` POSTs a protobuf-encoded argument list and parses the
result.  All commands exit nonzero on assertion failure so CI can gate on
them.
"""

from __future__ import annotations

import argparse
import json
import sys
import urllib.error
import urllib.request

from . import bindings
from .rexp_values import build_named_arguments, summarize, value_length

PROTOBUF_CONTENT_TYPE = "application/x-protobuf"


def cmd_make_fixture(args) -> int:
    hist = bindings.HistogramState()
    hist.counts.extend([2, 6, 2, 4, 6])
    hist.breaks.extend(range(6))
    hist.name = "Example Histogram Created in Python"
    with open(args.out, "wb") as outfile:
        outfile.write(hist.SerializeToString())
    print(f"wrote {args.out}")
    return 0


def _check_expectations(msg, args) -> int:
    if args.expect_rclass is not None:
        actual = bindings.rclass_name(msg.rclass)
        if actual != args.expect_rclass:
            print(f"assertion failed: rclass {actual}, "
                  f"expected {args.expect_rclass}", file=sys.stderr)
            return 1
    if args.expect_length is not None:
        actual_len = value_length(msg)
        if actual_len != args.expect_length:
            print(f"assertion failed: length {actual_len}, "
                  f"expected {args.expect_length}", file=sys.stderr)
            return 1
    return 0


def cmd_fetch(args) -> int:
    url = f"{args.base_url.rstrip('/')}/ocpu/object/{args.name}/pb"
    try:
        with urllib.request.urlopen(url) as response:
            body = response.read()
            content_type = response.headers.get("Content-Type", "")
    except urllib.error.HTTPError as error:
        print(f"HTTP {error.code} for {url}", file=sys.stderr)
        return 1
    if content_type != PROTOBUF_CONTENT_TYPE:
        print(f"unexpected content type {content_type!r}", file=sys.stderr)
        return 1
    msg = bindings.REXP()
    msg.ParseFromString(body)
    if msg.SerializeToString() != body:
        print("assertion failed: re-serialized bytes differ from the "
              "response body", file=sys.stderr)
        return 1
    print(summarize(msg))
    return _check_expectations(msg, args)


def _parse_argument(text: str):
    name, sep, literal = text.partition("=")
    if not sep or not name:
        raise ValueError(f"arguments look like name=value, got {text!r}")
    try:
        return name, json.loads(literal)
    except json.JSONDecodeError:
        return name, literal  # bare strings are convenient on a shell


def cmd_call(args) -> int:
    pairs = [_parse_argument(a) for a in args.args]
    payload = build_named_arguments(pairs).SerializeToString()
    url = f"{args.base_url.rstrip('/')}/ocpu/fn/{args.name}/pb"
    request = urllib.request.Request(
        url, data=payload, method="POST",
        headers={"Content-Type": PROTOBUF_CONTENT_TYPE})
    try:
        with urllib.request.urlopen(request) as response:
            body = response.read()
    except urllib.error.HTTPError as error:
        detail = error.read().decode("utf-8", "replace").strip()
        print(f"HTTP {error.code} for {url}: {detail}", file=sys.stderr)
        return 1
    msg = bindings.REXP()
    msg.ParseFromString(body)
    print(summarize(msg))
    return _check_expectations(msg, args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dynabuf-interop",
        description="Validate dynabuf payloads with the reference runtime")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make-fixture",
                       help="write the reference histogram payload")
    p.add_argument("out", metavar="FILE")
    p.set_defaults(func=cmd_make_fixture)

    def common(p):
        p.add_argument("--base-url", default="http://127.0.0.1:8004")
        p.add_argument("--expect-rclass", metavar="NAME")
        p.add_argument("--expect-length", type=int, metavar="N")

    p = sub.add_parser("fetch", help="GET an object and parse it")
    common(p)
    p.add_argument("name", metavar="OBJECT")
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("call", help="POST a function call and parse the result")
    common(p)
    p.add_argument("name", metavar="FUNCTION")
    p.add_argument("args", nargs="*", metavar="NAME=JSON")
    p.set_defaults(func=cmd_call)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"dynabuf-interop: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
