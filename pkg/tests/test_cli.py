import json
import os
import zlib
from pathlib import Path

import pytest

from dynabuf import proto_dir
from dynabuf.cli import main

DATA = Path(__file__).parent / "data"

STOKELY_BYTES = bytes.fromhex(
    "0a0e4d75727261792053746f6b656c791003"
    "1a126d75727261794073746f6b656c792e6f7267")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCompile:
    def test_single_file_lists_person(self, capsys):
        path = os.path.join(proto_dir(), "addressbook.proto")
        code, out, _ = run(capsys, "compile", path)
        assert code == 0
        names = out.splitlines()
        assert "tutorial.Person" in names
        assert "tutorial.AddressBook" in names
        assert names == sorted(names)

    def test_directory_lists_all_bundled_types(self, capsys):
        code, out, _ = run(capsys, "compile", proto_dir())
        assert code == 0
        names = out.splitlines()
        for expected in ("tutorial.Person", "rexp.REXP",
                         "HistogramTools.HistogramState",
                         "dynabuf.DescriptorProto"):
            assert expected in names

    def test_missing_file_exits_nonzero(self, capsys):
        code, _, err = run(capsys, "compile", "missing.proto")
        assert code == 1
        assert "missing.proto" in err

    def test_parse_diagnostics_on_stderr(self, capsys, tmp_path):
        bad = tmp_path / "bad.proto"
        bad.write_text("message M { optional int32 a = 0; }")
        code, _, err = run(capsys, "compile", str(bad))
        assert code == 1
        assert ">= 1" in err


class TestEncodeDecode:
    def test_encode_matches_paper_dump(self, capsys, tmp_path):
        out_file = tmp_path / "person.pb"
        code, _, _ = run(capsys, "encode", "--type", "tutorial.Person",
                         "--out", str(out_file),
                         str(DATA / "person_stokely.txt"))
        assert code == 0
        assert out_file.read_bytes() == STOKELY_BYTES

    def test_decode_prints_three_lines(self, capsys, tmp_path):
        wire_file = tmp_path / "person.pb"
        wire_file.write_bytes(STOKELY_BYTES)
        code, out, _ = run(capsys, "decode", "--type", "tutorial.Person",
                           str(wire_file))
        assert code == 0
        assert out == ('name: "Murray Stokely"\n'
                       'id: 3\n'
                       'email: "murray@stokely.org"\n')

    def test_round_trip_byte_stable(self, capsys, tmp_path):
        first = tmp_path / "a.pb"
        run(capsys, "encode", "--type", "tutorial.Person",
            "--out", str(first), str(DATA / "person_stokely.txt"))
        code, out, _ = run(capsys, "decode", "--type", "tutorial.Person",
                           str(first))
        text_file = tmp_path / "again.txt"
        text_file.write_text(out)
        second = tmp_path / "b.pb"
        run(capsys, "encode", "--type", "tutorial.Person",
            "--out", str(second), str(text_file))
        assert second.read_bytes() == first.read_bytes()

    def test_unknown_type_fails(self, capsys, tmp_path):
        wire_file = tmp_path / "x.pb"
        wire_file.write_bytes(b"")
        code, _, err = run(capsys, "decode", "--type", "tutorial.Nope",
                           str(wire_file))
        assert code == 1
        assert "unknown message type" in err

    def test_decode_bad_payload_fails(self, capsys, tmp_path):
        wire_file = tmp_path / "x.pb"
        wire_file.write_bytes(b"\x0a\xff")
        code, _, err = run(capsys, "decode", "--type", "tutorial.Person",
                           str(wire_file))
        assert code == 1

    def test_named_list_respects_int64_flag(self, capsys, tmp_path):
        proto = tmp_path / "wide.proto"
        proto.write_text("package t; message Wide { optional int64 n = 1; }")
        text = tmp_path / "wide.txt"
        text.write_text("n: 9007199254740993\n")
        wire_file = tmp_path / "wide.pb"
        code, _, _ = run(capsys, "--proto-path", str(tmp_path), "encode",
                         "--type", "t.Wide", "--out", str(wire_file),
                         str(text))
        assert code == 0
        code, out, _ = run(capsys, "--proto-path", str(tmp_path),
                           "--int64-as-string", "decode", "--type", "t.Wide",
                           "--named-list", str(wire_file))
        assert json.loads(out)["n"] == "9007199254740993"
        code, out, _ = run(capsys, "--proto-path", str(tmp_path), "decode",
                           "--type", "t.Wide", "--named-list", str(wire_file))
        assert json.loads(out)["n"] == 9007199254740992.0

    def test_int64_env_variable(self, capsys, tmp_path, monkeypatch):
        proto = tmp_path / "wide.proto"
        proto.write_text("package t; message Wide { optional int64 n = 1; }")
        text = tmp_path / "wide.txt"
        text.write_text("n: 9007199254740993\n")
        wire_file = tmp_path / "wide.pb"
        run(capsys, "--proto-path", str(tmp_path), "encode", "--type",
            "t.Wide", "--out", str(wire_file), str(text))
        monkeypatch.setenv("DYNABUF_INT64_AS_STRING", "1")
        code, out, _ = run(capsys, "--proto-path", str(tmp_path), "decode",
                           "--type", "t.Wide", "--named-list", str(wire_file))
        assert json.loads(out)["n"] == "9007199254740993"

    def test_proto_path_env_variable(self, capsys, tmp_path, monkeypatch):
        proto = tmp_path / "env.proto"
        proto.write_text("package envy; message Thing { optional int32 a = 1; }")
        text = tmp_path / "thing.txt"
        text.write_text("a: 5\n")
        monkeypatch.setenv("DYNABUF_PROTO_PATH", str(tmp_path))
        out_file = tmp_path / "thing.pb"
        code, _, _ = run(capsys, "encode", "--type", "envy.Thing",
                         "--out", str(out_file), str(text))
        assert code == 0
        assert out_file.read_bytes() == bytes.fromhex("0805")


class TestRexpCommands:
    def test_encode_decode_round_trip(self, capsys, tmp_path):
        payload_file = tmp_path / "value.pb"
        code, _, _ = run(capsys, "rexp", "encode", "--out", str(payload_file),
                         str(DATA / "mixed_list.json"))
        assert code == 0
        code, out, _ = run(capsys, "rexp", "decode", str(payload_file))
        assert code == 0
        original = json.loads((DATA / "mixed_list.json").read_text())
        assert json.loads(out) == original

    def test_warnings_go_to_stderr(self, capsys, tmp_path):
        source = tmp_path / "unsupported.json"
        source.write_text(json.dumps(
            {"type": "list",
             "values": [{"type": "unsupported", "kind": "closure"}]}))
        out_file = tmp_path / "u.pb"
        code, _, err = run(capsys, "rexp", "encode", "--out", str(out_file),
                           str(source))
        assert code == 0
        assert "warning" in err and "closure" in err


class TestBench:
    def test_report_shape_and_determinism(self, capsys, tmp_path):
        inputs = [str(DATA / "vector_1000_doubles.json"),
                  str(DATA / "mixed_list.json"),
                  str(DATA / "empty_list.json")]
        csv_a = tmp_path / "a.csv"
        code, out_a, _ = run(capsys, "bench", "--csv", str(csv_a), *inputs)
        assert code == 0
        csv_b = tmp_path / "b.csv"
        code, out_b, _ = run(capsys, "bench", "--csv", str(csv_b), *inputs)
        assert out_a == out_b
        assert csv_a.read_text() == csv_b.read_text()
        assert "relative" in out_a
        header = csv_a.read_text().splitlines()[0]
        assert header == "item,raw_size,pb_size,pb_gzip_size"

    def test_packed_size_formula_for_double_vector(self, capsys, tmp_path):
        csv_file = tmp_path / "sizes.csv"
        run(capsys, "bench", "--csv", str(csv_file),
            str(DATA / "vector_1000_doubles.json"))
        row = csv_file.read_text().splitlines()[1].split(",")
        pb_size = int(row[2])
        assert 8 * 1000 <= pb_size <= 8 * 1000 + 64

    def test_gzip_column_is_deflate_of_pb_bytes(self, capsys, tmp_path):
        payload_file = tmp_path / "payload.pb"
        run(capsys, "rexp", "encode", "--out", str(payload_file),
            str(DATA / "vector_1000_doubles.json"))
        payload = payload_file.read_bytes()
        csv_file = tmp_path / "sizes.csv"
        run(capsys, "bench", "--csv", str(csv_file),
            str(DATA / "vector_1000_doubles.json"))
        row = csv_file.read_text().splitlines()[1].split(",")
        assert int(row[2]) == len(payload)
        assert int(row[3]) == len(zlib.compress(payload, 6))
        assert int(row[3]) < int(row[2])  # repetitive input compresses

    def test_empty_list_minimal_payload(self, capsys, tmp_path):
        csv_file = tmp_path / "sizes.csv"
        run(capsys, "bench", "--csv", str(csv_file),
            str(DATA / "empty_list.json"))
        row = csv_file.read_text().splitlines()[1].split(",")
        assert int(row[2]) == 2  # just the rclass field

    def test_unreadable_input(self, capsys):
        code, _, err = run(capsys, "bench", "/nonexistent.json")
        assert code == 1


class TestUsageErrors:
    def test_unknown_command_exits_2(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["frobnicate"])
        assert excinfo.value.code == 2

    def test_missing_required_flag_exits_2(self, capsys, tmp_path):
        with pytest.raises(SystemExit) as excinfo:
            main(["decode", str(tmp_path / "x.pb")])
        assert excinfo.value.code == 2
