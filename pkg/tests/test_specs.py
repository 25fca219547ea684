import json
from fractions import Fraction

import pytest

from seqspace.errors import ExprSyntaxError, SpecFormatError, UnboundedExponent
from seqspace.sequences import (
    IDENTITY,
    ZERO_MATRIX,
    BandedMatrix,
    ClosedForm,
    Derived,
    Explicit,
    FullMatrix,
    Tail,
    TriangleMatrix,
    diagonal,
)
from seqspace.specs import (
    csv_column,
    exponent_from_json,
    matrix_from_json,
    parse_exponent,
    parse_list,
    parse_matrix,
    parse_number,
    parse_seq,
    seq_from_json,
)


def test_parse_number():
    assert parse_number("1/3") == Fraction(1, 3)
    assert parse_number(0.1) == Fraction(1, 10)
    assert parse_number({"num": 2, "den": 6}) == Fraction(1, 3)
    with pytest.raises(SpecFormatError):
        parse_number({"num": 1, "den": 0})
    with pytest.raises(SpecFormatError):
        parse_number("abc")


def test_inline_list():
    spec = parse_list("list:1,0,1/2;tail=const:3")
    assert spec == Explicit((Fraction(1), Fraction(0), Fraction(1, 2)), Tail("const", 3))
    assert parse_seq("list:1;tail=repeat").tail.rule == "repeat"
    assert parse_seq("list:1,2").tail.rule == "zero"
    with pytest.raises(SpecFormatError):
        parse_seq("list:1;tail=forever")
    with pytest.raises(SpecFormatError):
        parse_seq("list:1;head=zero")


def test_bare_expression():
    assert parse_seq("1/(n+1)") == ClosedForm("1/(n+1)")
    with pytest.raises(ExprSyntaxError):
        parse_seq("1/(n+1")
    with pytest.raises(SpecFormatError):
        parse_seq("   ")


def test_json_specs():
    data = {
        "kind": "derived",
        "transform": "inverse",
        "parent": {"kind": "list", "values": [1, "1/2", {"num": 1, "den": 3}]},
        "lambda": "n+1",
    }
    spec = seq_from_json(data)
    assert isinstance(spec, Derived)
    assert spec.parent == Explicit((Fraction(1), Fraction(1, 2), Fraction(1, 3)))
    assert spec.lam.spec == ClosedForm("n+1")
    assert parse_seq(json.dumps(data)) == spec


def test_json_errors():
    with pytest.raises(SpecFormatError):
        seq_from_json({"kind": "list", "values": [1], "extra": True})
    with pytest.raises(SpecFormatError):
        seq_from_json({"kind": "poly"})
    with pytest.raises(SpecFormatError):
        parse_seq("{not json")
    with pytest.raises(SpecFormatError):
        seq_from_json({"kind": "list", "values": [1], "tail": {"rule": "const"}})


def test_file_specs(tmp_path):
    csv_file = tmp_path / "y.csv"
    csv_file.write_text("n,y\n0,1\n1,1/2\n2,1/3\n", encoding="utf-8")
    assert parse_seq(f"@{csv_file}") == Explicit((1, Fraction(1, 2), Fraction(1, 3)))
    json_file = tmp_path / "x.json"
    json_file.write_text('{"kind": "expr", "expr": "n"}', encoding="utf-8")
    assert parse_seq(f"@{json_file}") == ClosedForm("n")
    with pytest.raises(SpecFormatError):
        parse_seq(f"@{tmp_path / 'missing.json'}")


def test_csv_column_needs_data():
    assert csv_column("n,x\n0,5\n") == ["5"]
    with pytest.raises(SpecFormatError):
        csv_column("n,x\n")


def test_exponent_bounds():
    assert parse_exponent("2").H == 2
    assert parse_exponent("1+1/(n+1);bound=2").H == 2
    assert parse_exponent("1+1/(n+1)", bound=3).H == 3
    with pytest.raises(UnboundedExponent):
        parse_exponent("1+1/(n+1)")
    p = exponent_from_json({"kind": "expr", "expr": "1+1/(n+1)", "bound": "2"})
    assert p.H == 2
    assert parse_exponent('{"kind": "list", "values": [1, 3], "tail": {"rule": "repeat"}}').H == 3


def test_matrices():
    assert parse_matrix("zero") == ZERO_MATRIX
    assert parse_matrix("identity") == IDENTITY
    assert parse_matrix("diag:2^(-n)") == diagonal("2^(-n)")
    assert parse_matrix("triangle:1/(n+1)") == TriangleMatrix("1/(n+1)")
    assert parse_matrix("full:1/(n+k+1)") == FullMatrix("1/(n+k+1)")
    assert parse_matrix("1/(n+k+1)") == FullMatrix("1/(n+k+1)")
    banded = matrix_from_json(
        {"kind": "matrix", "form": "banded", "bands": [{"offset": -1, "expr": "n"}]}
    )
    assert isinstance(banded, BandedMatrix) and banded.bands[0].offset == -1


def test_matrix_errors(tmp_path):
    with pytest.raises(SpecFormatError):
        parse_matrix(f"@{tmp_path / 'a.csv'}")
    with pytest.raises(SpecFormatError):
        matrix_from_json({"form": "banded", "bands": []})
    with pytest.raises(SpecFormatError):
        matrix_from_json({"form": "sparse"})
    with pytest.raises(SpecFormatError):
        parse_matrix("")
