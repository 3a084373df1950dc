"""HTTP service exchanging universal-schema protobuf payloads.

Two routes, mirroring a remote-procedure gateway:

* ``GET /ocpu/object/{name}/pb`` returns a stored object as a bare
  ``rexp.REXP`` payload.
* ``POST /ocpu/fn/{name}/pb`` decodes the request body as a (named) list
  of arguments, invokes the registered function with call-by-name
  semantics, and returns the serialized result.

Both directions use ``Content-Type: application/x-protobuf``.  The
registry and object store are immutable while the server runs, function
invocations are pure, and requests are handled on independent threads, so
one failing request never affects another.
"""

from __future__ import annotations

import http.server
import logging
import math
import random
import threading
from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable, Mapping, Optional

from .errors import DynabufError
from .histogram import bin_data
from .rexp_codec import serialize_value, unserialize_value
from .values import (Ints, ListValue, Logicals, Null, Reals, Strings, Value,
                     NA, named_list)

PROTOBUF_CONTENT_TYPE = "application/x-protobuf"

log = logging.getLogger("dynabuf.service")


class CallArgumentError(DynabufError):
    """Request arguments do not satisfy the function's signature."""


@dataclass(frozen=True)
class RegisteredFunction:
    """A callable with its named-argument specification.

    Functions must be deterministic given their arguments; anything random
    takes an explicit ``seed`` argument.
    """

    name: str
    fn: Callable[..., Value]
    required: tuple[str, ...] = ()
    optional: tuple[str, ...] = ()

    @property
    def parameters(self) -> tuple[str, ...]:
        return self.required + self.optional

    def bind(self, positional: list[Value],
             named: dict[str, Value]) -> dict[str, Value]:
        """Call-by-name binding: named arguments match parameters first,
        then positional arguments fill the remaining parameters in order."""
        bound: dict[str, Value] = {}
        for name, value in named.items():
            if name not in self.parameters:
                raise CallArgumentError(
                    f"function '{self.name}' has no argument named '{name}'")
            if name in bound:
                raise CallArgumentError(f"duplicate argument '{name}'")
            bound[name] = value
        open_slots = [p for p in self.parameters if p not in bound]
        if len(positional) > len(open_slots):
            raise CallArgumentError(
                f"function '{self.name}' takes at most "
                f"{len(self.parameters)} arguments")
        for name, value in zip(open_slots, positional):
            bound[name] = value
        missing = [p for p in self.required if p not in bound]
        if missing:
            raise CallArgumentError(
                f"function '{self.name}' is missing required arguments: "
                f"{', '.join(missing)}")
        return bound


class FunctionRegistry:
    def __init__(self, functions: Optional[list[RegisteredFunction]] = None):
        self._functions = {f.name: f for f in (functions or [])}

    def register(self, function: RegisteredFunction) -> None:
        self._functions[function.name] = function

    def get(self, name: str) -> Optional[RegisteredFunction]:
        return self._functions.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._functions


class ObjectStore:
    """Named sample values, frozen at startup."""

    def __init__(self, objects: Optional[Mapping[str, Value]] = None):
        self._objects = MappingProxyType(dict(objects or {}))

    def get(self, name: str) -> Optional[Value]:
        return self._objects.get(name)

    def names(self) -> list[str]:
        return sorted(self._objects)


# -- built-in functions --------------------------------------------------------


def _scalar(value: Value, what: str) -> float:
    if isinstance(value, (Reals, Ints, Logicals)) and len(value.items) == 1:
        item = value.items[0]
        if item is NA:
            raise CallArgumentError(f"{what} must not be NA")
        return float(item)
    raise CallArgumentError(f"{what} must be a length-1 numeric value")


def _numeric_items(value: Value, what: str) -> list[float]:
    if isinstance(value, (Reals, Ints)):
        return [float(v) for v in value.items]
    raise CallArgumentError(f"{what} must be a numeric vector")


def _fn_identity(x: Value) -> Value:
    return x


def _fn_sum(x: Value) -> Value:
    total = 0.0
    integral = True
    for item in _numeric_items(x, "x"):
        total += item
        integral = integral and float(item).is_integer()
    if integral and abs(total) < 2 ** 31:
        return Ints([int(total)])
    return Reals([total])


def _fn_seq(**args) -> Value:
    # Signature uses a keyword dict because "from" is the natural external
    # argument name but a reserved word in this language.
    start = _scalar(args["from"], "from")
    to = args.get("to")
    by = args.get("by")
    if to is None:
        start, stop = 1.0, start
    else:
        stop = _scalar(to, "to")
    if by is None:
        step = 1.0 if stop >= start else -1.0
    else:
        step = _scalar(by, "by")
        if step == 0:
            raise CallArgumentError("by must be nonzero")
        if (stop - start) * step < 0:
            raise CallArgumentError("wrong sign in by argument")
    count = int(math.floor((stop - start) / step + 1e-10)) + 1
    items = [start + i * step for i in range(max(count, 0))]
    if all(v.is_integer() and abs(v) < 2 ** 31 for v in items):
        return Ints([int(v) for v in items])
    return Reals(items)


def _fn_gaussian(n: Value, seed: Value, mean: Value = None,
                 sd: Value = None) -> Value:
    count = int(_scalar(n, "n"))
    if count < 0:
        raise CallArgumentError("n must be nonnegative")
    center = 0.0 if mean is None else _scalar(mean, "mean")
    spread = 1.0 if sd is None else _scalar(sd, "sd")
    rng = random.Random(int(_scalar(seed, "seed")))
    return Reals([rng.gauss(center, spread) for _ in range(count)])


def _fn_bin_histogram(points: Value, breaks: Value) -> Value:
    result = bin_data(_numeric_items(points, "points"),
                      _numeric_items(breaks, "breaks"))
    return named_list([
        ("breaks", Reals(result.histogram.breaks)),
        ("counts", Ints(result.histogram.counts)),
        ("underflow", Ints([result.underflow])),
        ("overflow", Ints([result.overflow])),
    ])


def default_registry() -> FunctionRegistry:
    return FunctionRegistry([
        RegisteredFunction("identity", _fn_identity, required=("x",)),
        RegisteredFunction("sum", _fn_sum, required=("x",)),
        RegisteredFunction("seq", _fn_seq, required=("from",),
                           optional=("to", "by")),
        RegisteredFunction("gaussian", _fn_gaussian, required=("n", "seed"),
                           optional=("mean", "sd")),
        RegisteredFunction("bin_histogram", _fn_bin_histogram,
                           required=("points", "breaks")),
    ])


def default_store() -> ObjectStore:
    # A small data-frame-like fixture (two numeric columns keyed by row
    # names) plus simple vectors, enough to exercise lists, attributes,
    # strings, and numerics end to end.
    animal_names = ["Cow", "Grey wolf", "Goat", "Guinea pig", "Donkey",
                    "Horse", "Cat", "Giraffe", "Gorilla", "Human",
                    "African elephant", "Rhesus monkey", "Kangaroo",
                    "Golden hamster", "Mouse", "Rabbit", "Sheep", "Jaguar",
                    "Chimpanzee", "Rat", "Mole", "Pig"]
    body = [465.0, 36.33, 27.66, 1.04, 187.1, 521.0, 3.3, 529.0, 207.0, 62.0,
            6654.0, 6.8, 35.0, 0.12, 0.023, 2.5, 55.5, 100.0, 52.16, 0.28,
            0.122, 192.0]
    brain = [423.0, 119.5, 115.0, 5.5, 419.0, 655.0, 25.6, 680.0, 406.0,
             1320.0, 5712.0, 179.0, 56.0, 1.0, 0.4, 12.1, 175.0, 157.0,
             440.0, 1.9, 3.0, 180.0]
    animals = ListValue(
        [Reals(body), Reals(brain)],
        [("names", Strings(["body", "brain"])),
         ("row.names", Strings(animal_names)),
         ("class", Strings(["data.frame"]))])
    return ObjectStore({
        "animals": animals,
        "primes": Ints([2, 3, 5, 7, 11, 13, 17, 19, 23, 29]),
        "letters": Strings([chr(c) for c in range(ord("a"), ord("z") + 1)]),
        "nothing": Null(),
    })


# -- HTTP plumbing ---------------------------------------------------------------


class _Server(http.server.ThreadingHTTPServer):
    # Wait for in-flight handlers on close so responses are never cut short.
    daemon_threads = False
    block_on_close = True

    def __init__(self, address, registry: FunctionRegistry, store: ObjectStore):
        super().__init__(address, _Handler)
        self.registry = registry
        self.store = store


class _Handler(http.server.BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    timeout = 30  # never park a handler thread on an idle connection
    server: _Server

    def log_message(self, format, *args):  # noqa: A002 - stdlib signature
        log.debug("%s - %s", self.address_string(), format % args)

    def _reply(self, status: int, body: bytes,
               content_type: str = "text/plain; charset=utf-8") -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        # One request per connection: responses are fully framed by
        # Content-Length, and handler threads must not outlive the request
        # (shutdown waits for in-flight handlers).
        self.send_header("Connection", "close")
        self.close_connection = True
        self.end_headers()
        self.wfile.write(body)

    def _reply_text(self, status: int, message: str) -> None:
        self._reply(status, (message + "\n").encode("utf-8"))

    def do_GET(self) -> None:
        try:
            self._handle_get()
        except Exception:
            log.exception("GET %s failed", self.path)
            self._reply_text(500, "internal error")

    def do_POST(self) -> None:
        try:
            self._handle_post()
        except Exception:
            log.exception("POST %s failed", self.path)
            self._reply_text(500, "internal error")

    def _handle_get(self) -> None:
        parts = self.path.strip("/").split("/")
        if len(parts) != 4 or parts[0] != "ocpu" or parts[1] != "object":
            self._reply_text(404, f"no such resource: {self.path}")
            return
        name, postfix = parts[2], parts[3]
        if postfix != "pb":
            self._reply_text(406, f"format '{postfix}' is not implemented; "
                                  f"use the /pb postfix")
            return
        value = self.server.store.get(name)
        if value is None:
            self._reply_text(404, f"no object named '{name}'")
            return
        payload, _ = serialize_value(value)
        self._reply(200, payload, PROTOBUF_CONTENT_TYPE)

    def _handle_post(self) -> None:
        parts = self.path.strip("/").split("/")
        if (len(parts) != 4 or parts[0] != "ocpu" or parts[1] != "fn"
                or parts[3] != "pb"):
            self._reply_text(404, f"no such resource: {self.path}")
            return
        function = self.server.registry.get(parts[2])
        if function is None:
            self._reply_text(404, f"no function named '{parts[2]}'")
            return
        content_type = (self.headers.get("Content-Type") or "").split(";")[0]
        if content_type.strip().lower() != PROTOBUF_CONTENT_TYPE:
            self._reply_text(415, f"expected Content-Type "
                                  f"{PROTOBUF_CONTENT_TYPE}")
            return
        length = int(self.headers.get("Content-Length") or 0)
        body = self.rfile.read(length)
        try:
            positional, named = _argument_list(unserialize_value(body))
            bound = function.bind(positional, named)
        except (DynabufError, ValueError) as exc:
            self._reply_text(400, str(exc))
            return
        try:
            result = function.fn(**bound)
        except Exception as exc:  # isolate the caller from function bugs
            log.debug("function %s raised", function.name, exc_info=True)
            self._reply_text(500, f"{type(exc).__name__}: {exc}")
            return
        payload, _ = serialize_value(result)
        self._reply(200, payload, PROTOBUF_CONTENT_TYPE)


def _argument_list(value: Value) -> tuple[list[Value], dict[str, Value]]:
    """Split a decoded argument list into positional and named parts using
    the conventional ``names`` attribute."""
    if not isinstance(value, ListValue):
        raise CallArgumentError(
            "request body must be a list of function arguments")
    names_attr = value.get_attribute("names")
    names: list[str] = [""] * len(value.items)
    if names_attr is not None:
        if (not isinstance(names_attr, Strings)
                or len(names_attr.items) != len(value.items)):
            raise CallArgumentError(
                "names attribute must be a string vector matching the "
                "argument list length")
        names = ["" if n is NA else n for n in names_attr.items]
    positional = [v for n, v in zip(names, value.items) if not n]
    named = {}
    for n, v in zip(names, value.items):
        if n:
            if n in named:
                raise CallArgumentError(f"duplicate argument '{n}'")
            named[n] = v
    return positional, named


@dataclass
class ServiceHandle:
    """A running service; shut down with :meth:`close` (or ``with``)."""

    server: _Server
    thread: threading.Thread

    @property
    def port(self) -> int:
        return self.server.server_address[1]

    @property
    def host(self) -> str:
        return self.server.server_address[0]

    def close(self) -> None:
        self.server.shutdown()
        self.thread.join()
        self.server.server_close()

    def __enter__(self) -> "ServiceHandle":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def serve(host: str = "127.0.0.1", port: int = 0,
          registry: Optional[FunctionRegistry] = None,
          store: Optional[ObjectStore] = None) -> ServiceHandle:
    """Start the service on a background thread and return its handle.

    ``port=0`` binds an ephemeral port (see ``handle.port``).  Bind
    failures raise at startup, before the thread exists.
    """
    server = _Server((host, port),
                     default_registry() if registry is None else registry,
                     default_store() if store is None else store)
    thread = threading.Thread(target=server.serve_forever,
                              name="dynabuf-service", daemon=True)
    thread.start()
    return ServiceHandle(server, thread)
