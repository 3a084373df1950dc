"""Histogram aggregation for single-pass distributed binning.

A histogram is a strictly increasing break vector, one count per bucket,
and an optional name.  Buckets are right-closed ``(lo, hi]`` with the
first bucket additionally closed on the left, so a point equal to the
lowest break lands in bucket one.  Mappers agree on identical breaks in
advance; reducers then combine shard histograms with
:func:`merge_histograms`, which is associative and commutative with the
all-zero histogram as identity.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from . import wire
from .bundled import bundled_message_type
from .coerce import INT32_MAX
from .errors import HistogramError
from .message import DynamicMessage

MESSAGE_TYPE = "HistogramTools.HistogramState"


def _validate(breaks: Sequence[float], counts: Sequence[int]) -> None:
    if counts and len(breaks) != len(counts) + 1:
        raise HistogramError(
            f"expected {len(counts) + 1} breaks for {len(counts)} counts, "
            f"got {len(breaks)}")
    for lo, hi in zip(breaks, breaks[1:]):
        if not lo < hi:
            raise HistogramError(
                f"breaks must be strictly increasing, got {lo} before {hi}")
    for count in counts:
        if count < 0:
            raise HistogramError(f"negative bucket count {count}")
        if count > INT32_MAX:
            raise HistogramError(
                f"bucket count {count} exceeds the 32-bit schema limit")


@dataclass
class Histogram:
    """Bucket boundaries, per-bucket counts, and an optional name."""

    breaks: list[float]
    counts: list[int]
    name: Optional[str] = None

    def __post_init__(self):
        self.breaks = [float(b) for b in self.breaks]
        self.counts = [int(c) for c in self.counts]
        _validate(self.breaks, self.counts)

    def total(self) -> int:
        return sum(self.counts)


class BinResult(NamedTuple):
    """Output of :func:`bin_data`: the in-range histogram plus how many
    points fell below the first break or above the last."""

    histogram: Histogram
    underflow: int
    overflow: int


def bin_data(points: Sequence[float], breaks: Sequence[float],
             name: Optional[str] = None) -> BinResult:
    """Count points into right-closed buckets over the given breaks.

    Out-of-range points are tallied separately rather than dropped, so
    ``underflow + overflow + histogram.total() == len(points)``.
    """
    breaks = [float(b) for b in breaks]
    if len(breaks) < 2:
        raise HistogramError("binning needs at least two breaks")
    _validate(breaks, [])
    counts = [0] * (len(breaks) - 1)
    underflow = 0
    overflow = 0
    lo, hi = breaks[0], breaks[-1]
    for x in points:
        if x < lo:
            underflow += 1
        elif x > hi:
            overflow += 1
        else:
            # (breaks[i], breaks[i+1]] buckets; x == lo joins the first one.
            counts[max(bisect_left(breaks, x) - 1, 0)] += 1
    return BinResult(Histogram(breaks, counts, name), underflow, overflow)


def merge_histograms(histograms: Sequence[Histogram]) -> Histogram:
    """Element-wise sum of counts over identical breaks; the name comes
    from the first input."""
    if not histograms:
        raise HistogramError("merge needs at least one histogram")
    first = histograms[0]
    counts = list(first.counts)
    for other in histograms[1:]:
        if other.breaks != first.breaks:
            raise HistogramError(
                f"cannot merge histograms with different breaks: "
                f"{first.breaks} vs {other.breaks}")
        if len(other.counts) != len(counts):
            raise HistogramError(
                f"cannot merge histograms with {len(counts)} and "
                f"{len(other.counts)} buckets")
        for i, count in enumerate(other.counts):
            counts[i] += count
            if counts[i] > INT32_MAX:
                raise HistogramError(
                    f"merged count {counts[i]} in bucket {i + 1} exceeds the "
                    f"32-bit schema limit")
    return Histogram(list(first.breaks), counts, first.name)


def histogram_to_message(histogram: Histogram) -> DynamicMessage:
    message = DynamicMessage(bundled_message_type(MESSAGE_TYPE))
    message.wire_set("breaks", list(histogram.breaks))
    message.wire_set("counts", list(histogram.counts))
    if histogram.name is not None:
        message.wire_set("name", histogram.name)
    return message


def message_to_histogram(message: DynamicMessage) -> Histogram:
    if message.descriptor.full_name != MESSAGE_TYPE:
        raise HistogramError(
            f"expected a {MESSAGE_TYPE} message, got "
            f"'{message.descriptor.full_name}'")
    name = message.wire_get("name") if message.has("name") else None
    return Histogram(message.wire_get("breaks"), message.wire_get("counts"),
                     name)


def save_histogram(histogram: Histogram, path) -> None:
    """Write the bare wire payload (conventionally a ``.pb`` file)."""
    with open(path, "wb") as handle:
        handle.write(wire.encode_message(histogram_to_message(histogram)))


def load_histogram(path) -> Histogram:
    with open(path, "rb") as handle:
        payload = handle.read()
    message = wire.decode_message(bundled_message_type(MESSAGE_TYPE), payload)
    return message_to_histogram(message)
