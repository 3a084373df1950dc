"""Cross-runtime conformance: the primary's bytes against the reference
Protocol Buffers runtime, in both directions, plus the HTTP scripts."""

import json
import subprocess

import pytest
from google.protobuf import unknown_fields
from google.protobuf.message import Message

import interop_client as ic

from conftest import DYNABUF, INTEROP, require_clis, run_cli

EXPECTED_BREAKS = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]
EXPECTED_COUNTS = [2, 6, 2, 4, 6]
EXPECTED_NAME = "Example Histogram Created in Python"


def collect_unknown_fields(message) -> list:
    found = list(unknown_fields.UnknownFieldSet(message))
    for _, value in message.ListFields():
        children = ([value] if isinstance(value, Message)
                    else [v for v in value] if hasattr(value, "add") else [])
        for child in children:
            found.extend(collect_unknown_fields(child))
    return found


class TestHistogramFixture:
    def test_fixture_decodes_in_primary(self, tmp_path):
        require_clis()
        fixture = tmp_path / "hist.pb"
        run_cli(INTEROP, "make-fixture", str(fixture))
        decoded = run_cli(DYNABUF, "decode", "--type",
                          "HistogramTools.HistogramState", str(fixture))
        expected = "".join(
            [f"breaks: {b}\n" for b in EXPECTED_BREAKS]
            + [f"counts: {c}\n" for c in EXPECTED_COUNTS]
            + [f'name: "{EXPECTED_NAME}"\n'])
        assert decoded.stdout == expected

    def test_primary_text_matches_reference_parse_field_for_field(self, tmp_path):
        require_clis()
        fixture = tmp_path / "hist.pb"
        run_cli(INTEROP, "make-fixture", str(fixture))
        hist = ic.HistogramState()
        hist.ParseFromString(fixture.read_bytes())
        assert list(hist.breaks) == EXPECTED_BREAKS
        assert list(hist.counts) == EXPECTED_COUNTS
        assert hist.name == EXPECTED_NAME
        named = run_cli(DYNABUF, "decode", "--type",
                        "HistogramTools.HistogramState", "--named-list",
                        str(fixture))
        primary_view = json.loads(named.stdout)
        assert primary_view["breaks"] == list(hist.breaks)
        assert primary_view["counts"] == list(hist.counts)
        assert primary_view["name"] == hist.name

    def test_primary_reencodes_fixture_byte_identically(self, tmp_path):
        require_clis()
        fixture = tmp_path / "hist.pb"
        run_cli(INTEROP, "make-fixture", str(fixture))
        text = run_cli(DYNABUF, "decode", "--type",
                       "HistogramTools.HistogramState", str(fixture))
        text_file = tmp_path / "hist.txt"
        text_file.write_text(text.stdout)
        reencoded = tmp_path / "hist2.pb"
        run_cli(DYNABUF, "encode", "--type", "HistogramTools.HistogramState",
                "--out", str(reencoded), str(text_file))
        assert reencoded.read_bytes() == fixture.read_bytes()

    def test_empty_histogram_variant_rejected_by_primary(self, tmp_path):
        require_clis()
        bad = ic.HistogramState()
        bad.breaks.extend([0.0, 1.0])
        bad.counts.extend([1, 2])  # length mismatch against breaks
        bad_file = tmp_path / "bad.pb"
        bad_file.write_bytes(bad.SerializeToString())
        # the wire decodes fine; the histogram invariant check must reject it
        import_check = subprocess.run(
            ["python3", "-c",
             "import sys; from dynabuf import load_histogram; "
             "load_histogram(sys.argv[1])", str(bad_file)],
            capture_output=True, text=True)
        assert import_check.returncode != 0
        assert "breaks" in import_check.stderr


class TestPersonBytes:
    def test_reference_runtime_matches_primary_golden(self):
        person = ic.Person()
        person.name = "Murray"
        person.id = 1
        assert person.SerializeToString() == bytes.fromhex(
            "0a064d75727261791001")

    def test_reference_bytes_decode_in_primary(self, tmp_path):
        require_clis()
        person = ic.Person()
        person.name = "Murray Stokely"
        person.id = 3
        person.email = "murray@stokely.org"
        person.phone.add().number = "555"
        wire_file = tmp_path / "person.pb"
        wire_file.write_bytes(person.SerializeToString())
        decoded = run_cli(DYNABUF, "decode", "--type", "tutorial.Person",
                          str(wire_file))
        assert decoded.stdout == ('name: "Murray Stokely"\n'
                                  'id: 3\n'
                                  'email: "murray@stokely.org"\n'
                                  'phone {\n'
                                  '  number: "555"\n'
                                  '}\n')


REXP_SAMPLES = [
    {"type": "null"},
    {"type": "logical", "values": [True, False, None]},
    {"type": "integer", "values": [1, -1, None, 2147483647]},
    {"type": "real", "values": [1.5, -2.25, 0.0]},
    {"type": "complex", "values": [[1.0, -2.0], [0.0, 0.5]]},
    {"type": "string", "values": ["a", "", None, "λ"]},
    {"type": "raw", "hex": "00ff10"},
    {"type": "list", "values": [{"type": "integer", "values": [1]},
                                {"type": "null"}]},
    {"type": "list",
     "values": [{"type": "real", "values": [465.0, 36.33]},
                {"type": "real", "values": [423.0, 119.5]}],
     "attributes": {"names": {"type": "string", "values": ["body", "brain"]},
                    "class": {"type": "string", "values": ["data.frame"]}}},
    {"type": "real", "values": [1.25] * 500},
]


class TestUniversalPayloads:
    @pytest.mark.parametrize("sample", REXP_SAMPLES,
                             ids=[s["type"] + str(i)
                                  for i, s in enumerate(REXP_SAMPLES)])
    def test_primary_payloads_parse_cleanly_and_reserialize(self, tmp_path,
                                                            sample):
        require_clis()
        source = tmp_path / "value.json"
        source.write_text(json.dumps(sample))
        payload_file = tmp_path / "value.pb"
        run_cli(DYNABUF, "rexp", "encode", "--out", str(payload_file),
                str(source))
        payload = payload_file.read_bytes()
        msg = ic.REXP()
        msg.ParseFromString(payload)
        assert collect_unknown_fields(msg) == []
        assert msg.SerializeToString() == payload

    def test_reference_payload_decodes_in_primary(self, tmp_path):
        require_clis()
        msg = ic.build_value({"xs": [1, 2, 3], "label": "shard-7"})
        payload_file = tmp_path / "ref.pb"
        payload_file.write_bytes(msg.SerializeToString())
        decoded = run_cli(DYNABUF, "rexp", "decode", str(payload_file))
        value = json.loads(decoded.stdout)
        assert value["type"] == "list"
        assert value["values"][0] == {"type": "integer", "values": [1, 2, 3]}
        assert value["attributes"]["names"]["values"] == ["xs", "label"]
        # and the primary re-encodes it byte-identically
        json_file = tmp_path / "ref.json"
        json_file.write_text(decoded.stdout)
        reencoded = tmp_path / "ref2.pb"
        run_cli(DYNABUF, "rexp", "encode", "--out", str(reencoded),
                str(json_file))
        assert reencoded.read_bytes() == payload_file.read_bytes()


class TestHttpScripts:
    def test_fetch_animals_exits_zero(self, service_url):
        result = run_cli(INTEROP, "fetch", "--base-url", service_url,
                         "animals", "--expect-rclass", "LIST")
        assert "rclass: LIST" in result.stdout
        assert "attributes: names, row.names, class" in result.stdout

    def test_fetch_unknown_observes_404(self, service_url):
        result = run_cli(INTEROP, "fetch", "--base-url", service_url,
                         "does-not-exist", check=False)
        assert result.returncode != 0
        assert "HTTP 404" in result.stderr

    def test_call_identity_round_trip(self, service_url):
        result = run_cli(INTEROP, "call", "--base-url", service_url,
                         "identity", "x=[1.0, 2.0]",
                         "--expect-rclass", "REAL", "--expect-length", "2")
        assert "rclass: REAL" in result.stdout

    def test_call_gaussian_returns_42_reals(self, service_url):
        result = run_cli(INTEROP, "call", "--base-url", service_url,
                         "gaussian", "n=42", "mean=100", "seed=7",
                         "--expect-rclass", "REAL", "--expect-length", "42")
        assert "length: 42" in result.stdout

    def test_call_wrong_expectation_exits_nonzero(self, service_url):
        result = run_cli(INTEROP, "call", "--base-url", service_url,
                         "identity", "x=1", "--expect-rclass", "STRING",
                         check=False)
        assert result.returncode != 0

    def test_call_missing_argument_surfaces_400(self, service_url):
        result = run_cli(INTEROP, "call", "--base-url", service_url,
                         "gaussian", check=False)
        assert result.returncode != 0
        assert "HTTP 400" in result.stderr
