import json
from fractions import Fraction

import numpy as np

from seqspace.models import Verdict, VerdictTag
from seqspace.package import Report, render, render_csv, render_json, to_jsonable, write_report


def test_to_jsonable():
    assert to_jsonable(Fraction(-3, 4)) == {"num": -3, "den": 4}
    assert to_jsonable([float("inf"), float("-inf")]) == ["inf", "-inf"]
    assert to_jsonable(float("nan")) == "nan"
    assert to_jsonable(np.array([1.5, 2.0])) == [1.5, 2.0]
    assert to_jsonable(np.int64(7)) == 7
    verdict = Verdict(VerdictTag.CONVERGENT, "flat", {"tail_tol": 1e-9})
    assert to_jsonable(verdict) == {
        "tag": "ConvergentNumeric",
        "rationale": "flat",
        "thresholds": {"tail_tol": 1e-9},
    }


def test_render_json_is_sorted_and_terminated():
    text = render_json({"b": 1, "a": Fraction(1, 2)})
    assert text.endswith("}\n")
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": {"num": 1, "den": 2}, "b": 1}


def test_render_csv():
    text = render_csv(["n", "y"], [[0, Fraction(1, 3)], [1, 0.1], [2, None]])
    assert text == "n,y\n0,1/3\n1,0.1\n2,\n"


def test_render_table_and_write(tmp_path):
    report = Report("demo", {"x": 1}, ["n", "value"], [[0, Fraction(1, 2)]])
    table = render(report, "table")
    assert "demo" in table and "1/2" in table
    out = tmp_path / "nested" / "r.csv"
    write_report(render(report, "csv"), out)
    assert out.read_bytes() == b"n,value\n0,1/2\n"
