import os

import pytest

from rateplots.frame import MalformedReport, ReportFrame

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
RATES = os.path.join(FIXTURES, "synthetic_rates.csv")


def test_read_fixture():
    frame = ReportFrame.read(RATES)
    assert frame.metrics() == ["dK", "dW"]        # diagnostics filtered
    pts = frame.series("dW")
    assert pts[0][0] == 64
    assert pts[-1] == (4096, 0.004, 0.001, "odd-flag")   # unknown flag preserved


def test_header_mismatch_raises(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(MalformedReport, match="header"):
        ReportFrame.read(p)


def test_bad_value_raises(tmp_path):
    p = tmp_path / "bad2.csv"
    p.write_text("experiment,n,metric,value,stderr,R,seed,flag\n"
                 "x,64,dW,notanumber,0,10,1,\n")
    with pytest.raises(MalformedReport, match="bad2"):
        ReportFrame.read(p)


def test_wrong_column_count_raises(tmp_path):
    p = tmp_path / "bad3.csv"
    p.write_text("experiment,n,metric,value,stderr,R,seed,flag\nx,64,dW,0.1\n")
    with pytest.raises(MalformedReport, match="column count"):
        ReportFrame.read(p)


def test_empty_file_raises(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("")
    with pytest.raises(MalformedReport, match="empty"):
        ReportFrame.read(p)
