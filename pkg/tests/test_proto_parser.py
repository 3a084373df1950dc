import pytest

from dynabuf import (DescriptorPool, FieldLabel, FieldType,
                     MessageDescriptor, PoolError, ProtoParseError,
                     load_proto_files, parse_proto_source,
                     render_proto_source)
from dynabuf.bundled import read_bundled_source


def tree_shape(message):
    """Structural summary used to compare descriptor trees."""
    return (message.full_name,
            tuple((f.name, f.number, f.label.value,
                   f.type.value if f.type else None, f.type_name, f.packed,
                   repr(f.default_value)) for f in message.fields),
            tuple(tree_shape(m) for m in message.nested_types),
            tuple((e.full_name, tuple((v.name, v.number) for v in e.values))
                  for e in message.enum_types))


def file_shape(file):
    return (file.package, tuple(tree_shape(m) for m in file.messages),
            tuple((e.full_name, tuple((v.name, v.number) for v in e.values))
                  for e in file.enums))


class TestBundledSchemas:
    def test_addressbook(self):
        file = parse_proto_source(read_bundled_source("addressbook.proto"),
                                  "addressbook.proto")
        assert file.package == "tutorial"
        person = file.messages[0]
        assert person.full_name == "tutorial.Person"
        assert [(f.name, f.number) for f in person.fields] == [
            ("name", 1), ("id", 2), ("email", 3), ("phone", 4)]
        assert person.fields[0].label is FieldLabel.REQUIRED
        assert person.fields[0].type is FieldType.STRING
        assert person.fields[1].type is FieldType.INT32
        assert person.fields[2].label is FieldLabel.OPTIONAL
        phone = person.fields[3]
        assert phone.label is FieldLabel.REPEATED
        assert phone.type is FieldType.MESSAGE
        assert phone.type_name == "tutorial.Person.PhoneNumber"
        enum = person.enum_types[0]
        assert enum.full_name == "tutorial.Person.PhoneType"
        assert enum.to_dict() == {"MOBILE": 0, "HOME": 1, "WORK": 2}
        nested = person.nested_types[0]
        assert nested.full_name == "tutorial.Person.PhoneNumber"
        # PhoneNumber.type resolves outward to the sibling enum
        assert nested.fields[1].type is FieldType.ENUM
        assert nested.fields[1].type_name == "tutorial.Person.PhoneType"

    def test_rexp(self):
        file = parse_proto_source(read_bundled_source("rexp.proto"),
                                  "rexp.proto")
        assert file.package == "rexp"
        assert [m.name for m in file.messages] == ["REXP", "STRING", "CMPLX"]
        rexp = file.messages[0]
        rclass = rexp.enum_types[0]
        assert rclass.to_dict() == {
            "STRING": 0, "RAW": 1, "REAL": 2, "COMPLEX": 3, "INTEGER": 4,
            "LIST": 5, "LOGICAL": 6, "NULLTYPE": 7}
        rboolean = rexp.enum_types[1]
        assert rboolean.to_dict() == {"F": 0, "T": 1, "NA": 2}
        real_value = rexp.fields_by_name["realValue"]
        assert real_value.label is FieldLabel.REPEATED
        assert real_value.type is FieldType.DOUBLE
        assert real_value.packed
        assert rexp.fields_by_name["intValue"].type is FieldType.SINT32
        assert rexp.fields_by_name["attrName"].number == 11
        assert rexp.fields_by_name["attrValue"].number == 12
        string = file.messages[1]
        assert string.fields_by_name["isNA"].default_value is False

    def test_histogram(self):
        file = parse_proto_source(read_bundled_source("histogram.proto"),
                                  "histogram.proto")
        assert file.package == "HistogramTools"
        state = file.messages[0]
        assert state.full_name == "HistogramTools.HistogramState"
        assert [f.type for f in state.fields] == [
            FieldType.DOUBLE, FieldType.INT32, FieldType.STRING]

    def test_package_only(self):
        file = parse_proto_source("package x;", "x.proto")
        assert file.package == "x"
        assert file.messages == []
        assert file.enums == []

    @pytest.mark.parametrize("name", ["addressbook.proto", "rexp.proto",
                                      "histogram.proto"])
    def test_render_reparse_fixed_point(self, name):
        source = read_bundled_source(name)
        first = parse_proto_source(source, name)
        rendered = render_proto_source(first)
        second = parse_proto_source(rendered, name)
        assert file_shape(second) == file_shape(first)
        assert render_proto_source(second) == rendered


class TestSyntaxErrors:
    def test_error_carries_line_and_column(self):
        source = "package tutorial;\nmessage Broken {\n  required int32 name : 1;\n}\n"
        with pytest.raises(ProtoParseError) as excinfo:
            parse_proto_source(source, "broken.proto")
        assert excinfo.value.line == 3
        assert excinfo.value.column > 1
        assert excinfo.value.filename == "broken.proto"
        assert "broken.proto:3:" in str(excinfo.value)

    def test_typo_in_type_name_surfaces_at_pool_load(self):
        source = "message Broken {\n  required strng name = 1;\n}\n"
        file = parse_proto_source(source, "broken.proto")
        with pytest.raises(PoolError, match="unknown type name 'strng'"):
            DescriptorPool().load([file])

    def test_duplicate_tag_number(self):
        source = "message M { optional int32 a = 1; optional int32 b = 1; }"
        with pytest.raises(ProtoParseError, match="duplicate tag number 1"):
            parse_proto_source(source)

    def test_duplicate_field_name(self):
        source = "message M { optional int32 a = 1; optional int64 a = 2; }"
        with pytest.raises(ProtoParseError, match="duplicate field name 'a'"):
            parse_proto_source(source)

    def test_tag_below_one(self):
        with pytest.raises(ProtoParseError, match=">= 1"):
            parse_proto_source("message M { optional int32 a = 0; }")

    def test_reserved_range_rejected(self):
        with pytest.raises(ProtoParseError, match="reserved range"):
            parse_proto_source("message M { optional int32 a = 19000; }")
        with pytest.raises(ProtoParseError, match="reserved range"):
            parse_proto_source("message M { optional int32 a = 19999; }")
        parse_proto_source("message M { optional int32 a = 20000; }")

    def test_unknown_type_reported_at_pool_load(self):
        file = parse_proto_source("message M { optional Missing a = 1; }")
        with pytest.raises(PoolError, match="unknown type name 'Missing'"):
            DescriptorPool().load([file])

    def test_unsupported_constructs(self):
        for source in ("service S {}",
                       "message M { extensions 100 to 199; }",
                       "extend M { optional int32 x = 100; }",
                       'option java_package = "x";',
                       "message M { oneof o { int32 a = 1; } }"):
            with pytest.raises(ProtoParseError, match="not supported"):
                parse_proto_source(source)

    def test_unterminated_message(self):
        with pytest.raises(ProtoParseError, match="unterminated message"):
            parse_proto_source("message M { optional int32 a = 1;")

    def test_unterminated_comment(self):
        with pytest.raises(ProtoParseError, match="unterminated block comment"):
            parse_proto_source("/* nope")

    def test_empty_enum_rejected(self):
        with pytest.raises(ProtoParseError, match="at least one value"):
            parse_proto_source("enum E {}")

    def test_duplicate_enum_value_name(self):
        with pytest.raises(ProtoParseError, match="duplicate enum value"):
            parse_proto_source("enum E { A = 0; A = 1; }")

    def test_packed_on_non_repeated(self):
        with pytest.raises(ProtoParseError, match="only valid on repeated"):
            parse_proto_source(
                "message M { optional int32 a = 1 [packed=true]; }")

    def test_packed_on_string(self):
        with pytest.raises(ProtoParseError, match="cannot be packed"):
            parse_proto_source(
                "message M { repeated string a = 1 [packed=true]; }")

    def test_default_on_repeated(self):
        with pytest.raises(ProtoParseError, match="cannot have a default"):
            parse_proto_source(
                "message M { repeated int32 a = 1 [default=3]; }")

    def test_name_collision_within_message(self):
        source = """
        message M {
          optional int32 clash = 1;
          message clash {}
        }
        """
        with pytest.raises(ProtoParseError, match="declared more than once"):
            parse_proto_source(source)

    def test_top_level_collision(self):
        with pytest.raises(ProtoParseError, match="declared more than once"):
            parse_proto_source("message A {} enum A { X = 0; }")


class TestDefaultsAndAliases:
    def test_scalar_defaults(self):
        source = """
        message M {
          optional int32 a = 1 [default = -7];
          optional double b = 2 [default = 1.5];
          optional bool c = 3 [default = true];
          optional string d = 4 [default = "hi\\n"];
        }
        """
        m = parse_proto_source(source).messages[0]
        assert m.fields_by_name["a"].default_value == -7
        assert m.fields_by_name["b"].default_value == 1.5
        assert m.fields_by_name["c"].default_value is True
        assert m.fields_by_name["d"].default_value == "hi\n"

    def test_enum_default_validated_on_resolution(self):
        good = """
        enum E { A = 0; B = 1; }
        message M { optional E e = 1 [default = B]; }
        """
        file = parse_proto_source(good)
        assert file.messages[0].fields_by_name["e"].default_value == "B"
        bad = """
        enum E { A = 0; }
        message M { optional E e = 1 [default = NOPE]; }
        """
        with pytest.raises(ProtoParseError, match="not a value of enum"):
            parse_proto_source(bad)

    def test_enum_alias_numbers_first_wins(self):
        source = "enum E { FIRST = 5; ALIAS = 5; OTHER = 6; }"
        enum = parse_proto_source(source).enums[0]
        assert enum.value(number=5).name == "FIRST"
        assert enum.value(name="ALIAS").number == 5

    def test_negative_enum_numbers(self):
        enum = parse_proto_source("enum E { NEG = -3; ZERO = 0; }").enums[0]
        assert enum.value(name="NEG").number == -3

    def test_syntax_statement_tolerated(self):
        file = parse_proto_source('syntax = "proto2"; package p;')
        assert file.package == "p"
        with pytest.raises(ProtoParseError, match="only proto2"):
            parse_proto_source('syntax = "proto3";')

    def test_comments_everywhere(self):
        source = """
        // leading comment
        package c; /* block */ message M {
          optional int32 a = 1; // trailing
          /* multi
             line */ optional int32 b = 2;
        }
        """
        m = parse_proto_source(source).messages[0]
        assert [f.name for f in m.fields] == ["a", "b"]


class TestResolutionScoping:
    def test_innermost_scope_wins(self):
        source = """
        package p;
        message Color { optional int32 ignored = 1; }
        message Outer {
          message Color { optional int32 inner = 1; }
          optional Color c = 1;
        }
        """
        outer = parse_proto_source(source).messages[1]
        assert outer.fields_by_name["c"].type_name == "p.Outer.Color"

    def test_leading_dot_forces_fully_qualified(self):
        source = """
        package p;
        message Color { optional int32 x = 1; }
        message Outer {
          message Color { optional int32 inner = 1; }
          optional .p.Color c = 1;
        }
        """
        outer = parse_proto_source(source).messages[1]
        assert outer.fields_by_name["c"].type_name == "p.Color"

    def test_packed_rejected_on_resolved_message_type(self):
        source = """
        message Item {}
        message M { repeated Item items = 1 [packed=true]; }
        """
        with pytest.raises(ProtoParseError, match="packed"):
            parse_proto_source(source)


class TestFileLoading:
    def test_single_file_directory_and_imports(self, tmp_path):
        (tmp_path / "base.proto").write_text(
            "package base;\nmessage Thing { optional int32 n = 1; }\n")
        (tmp_path / "user.proto").write_text(
            'import "base.proto";\n'
            "package user;\n"
            "message Wrapper { optional base.Thing thing = 1; }\n")
        pool = DescriptorPool()
        load_proto_files(pool, [str(tmp_path / "user.proto")],
                         search_paths=[str(tmp_path)])
        wrapper = pool.lookup("user.Wrapper")
        assert isinstance(wrapper, MessageDescriptor)
        assert wrapper.fields_by_name["thing"].type_name == "base.Thing"
        # directory mode loads everything in it
        pool2 = DescriptorPool()
        load_proto_files(pool2, [str(tmp_path)])
        assert "base.Thing" in pool2
        assert "user.Wrapper" in pool2

    def test_missing_import(self, tmp_path):
        (tmp_path / "a.proto").write_text('import "nope.proto"; package a;')
        with pytest.raises(PoolError, match="not found on the search path"):
            load_proto_files(DescriptorPool(), [str(tmp_path / "a.proto")])

    def test_circular_import(self, tmp_path):
        (tmp_path / "a.proto").write_text('import "b.proto"; package a;')
        (tmp_path / "b.proto").write_text('import "a.proto"; package b;')
        with pytest.raises(PoolError, match="circular import"):
            load_proto_files(DescriptorPool(), [str(tmp_path / "a.proto")],
                             search_paths=[str(tmp_path)])

    def test_missing_file(self):
        with pytest.raises(FileNotFoundError):
            load_proto_files(DescriptorPool(), ["/nonexistent/x.proto"])
