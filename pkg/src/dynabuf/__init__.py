"""dynabuf: a self-contained, reflection-based Protocol Buffers toolkit.

Parse proto2-subset schemas into descriptor pools, build and inspect
dynamic messages, read and write the binary wire format and the text
format, exchange arbitrary structured values through the bundled
universal schema, aggregate histograms across shards, and talk to the
bundled HTTP RPC service.
"""

from .bundled import bundled_message_type, bundled_pool, proto_dir
from .coerce import NA, CoercionOptions, distinct_count
from .descriptors import (DescriptorPool, EnumDescriptor, EnumValueDescriptor,
                          FieldDescriptor, FieldLabel, FieldType,
                          FileDescriptor, MessageDescriptor)
from .errors import (CoercionError, DynabufError, FieldLookupError,
                     HistogramError, PoolError, ProtoParseError,
                     TextParseError, WireDecodeError)
from .histogram import (BinResult, Histogram, bin_data, histogram_to_message,
                        load_histogram, merge_histograms,
                        message_to_histogram, save_histogram)
from .message import DynamicMessage, UnknownField, new_message
from .proto_parser import (load_proto_files, parse_proto_source,
                           render_proto_source)
from .rexp_codec import (can_serialize, message_to_value, serialize_value,
                         unserialize_value, value_to_message)
from .selfdesc import descriptor_to_message
from .service import (FunctionRegistry, ObjectStore, RegisteredFunction,
                      default_registry, default_store, serve)
from .text_format import parse_message, print_message, summary_line
from .values import (Complexes, Ints, ListValue, Logicals, Null, Raw, Reals,
                     Strings, Unsupported, Value, named_list, value_equal)
from .wire import (WireType, byte_size, decode_message, decode_varint,
                   encode_message, encode_varint, field_key, zigzag_decode,
                   zigzag_encode)

__version__ = "0.1.0"

__all__ = [
    "BinResult", "CoercionError", "CoercionOptions", "Complexes",
    "DescriptorPool", "DynabufError", "DynamicMessage", "EnumDescriptor",
    "EnumValueDescriptor", "FieldDescriptor", "FieldLabel", "FieldLookupError",
    "FieldType", "FileDescriptor", "FunctionRegistry", "Histogram",
    "HistogramError", "Ints", "ListValue", "Logicals", "MessageDescriptor",
    "NA", "Null", "ObjectStore", "PoolError", "ProtoParseError", "Raw",
    "Reals", "RegisteredFunction", "Strings", "TextParseError", "UnknownField",
    "Unsupported", "Value", "WireDecodeError", "WireType", "bin_data",
    "bundled_message_type", "bundled_pool", "byte_size", "can_serialize",
    "decode_message", "decode_varint", "default_registry", "default_store",
    "descriptor_to_message", "distinct_count", "encode_message",
    "encode_varint", "field_key", "histogram_to_message", "load_histogram",
    "load_proto_files", "merge_histograms", "message_to_histogram",
    "message_to_value", "named_list", "new_message", "parse_message",
    "parse_proto_source", "print_message", "proto_dir", "render_proto_source",
    "save_histogram", "serialize_value", "serve", "summary_line",
    "unserialize_value", "value_equal", "value_to_message", "zigzag_decode",
    "zigzag_encode",
]
