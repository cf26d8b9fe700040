from __future__ import annotations

import io
import math

import numpy as np
import pytest

from sdsforge import report
from sdsforge.numerics import Rng
from sdsforge.sds import REPORT_COLUMNS, AdaptationReport, EvaluationRow, LayerRanking


def row(iteration: int, fd_target: float) -> EvaluationRow:
    return EvaluationRow(iteration, 1.5, fd_target, 0.25, math.nan, 0.1, 0.0, 0.0)


def test_empty_report_is_a_header():
    stream = io.StringIO()
    report.write_report(stream, AdaptationReport())
    assert stream.getvalue() == ",".join(REPORT_COLUMNS) + "\n"


def test_report_rows(tmp_path):
    path = tmp_path / "nested" / "report.csv"
    report.write_report(path, AdaptationReport(rows=[row(0, 20.0), row(50, 1.0 / 3.0)]))
    assert path.read_text().splitlines() == [
        "iteration,fd_source,fd_target,diversity,cond_score,g_sds,g_dir,g_rec",
        "0,1.5,20,0.25,nan,0.1,0,0",
        "50,1.5,0.333333333,0.25,nan,0.1,0,0",
    ]


@pytest.mark.parametrize(
    "value, text",
    [
        (3, "3"),
        (np.int64(7), "7"),
        (0.1, "0.1"),
        (2.0 / 3.0, "0.666666667"),
        (1e-12, "1e-12"),
        (math.nan, "nan"),
    ],
)
def test_format_value(value, text):
    assert report.format_value(value) == text


def test_sweep_writes_one_stanza_per_value():
    stream = io.StringIO()
    runs = [
        ("300", AdaptationReport(rows=[row(0, 2.0), row(10, 1.0)])),
        ("500", AdaptationReport(rows=[row(0, 3.0)])),
    ]
    report.write_sweep(stream, "sds.t_max", runs)
    stanzas = stream.getvalue().split("\n\n")
    assert len(stanzas) == 2
    first, second = (stanza.splitlines() for stanza in stanzas)
    header = ",".join(REPORT_COLUMNS)
    assert first[:2] == ["# sds.t_max = 300", header]
    assert [line.split(",")[0] for line in first[2:]] == ["0", "10"]
    assert second[:2] == ["# sds.t_max = 500", header]
    assert len(second) == 3



def test_ranking_lists_every_layer():
    stream = io.StringIO()
    report.write_ranking(stream, LayerRanking((2,), (0.0, 0.5, 0.25), (2, 3, 1)))
    assert stream.getvalue().splitlines() == [
        "rank,layer,magnitude",
        "1,2,0.5",
        "2,3,0.25",
        "3,1,0",
    ]


def test_svg_draws_one_circle_per_sample():
    points = Rng(0).normal((512, 2))
    svg = report.render_svg([("generated", points)], title="iteration 0")
    assert svg.count("<circle") == 512
    assert svg.startswith("<?xml")
    assert svg.rstrip().endswith("</svg>")
    assert "iteration 0" in svg


def test_svg_is_deterministic(tmp_path):
    sets = [("source", Rng(1).normal((20, 2))), ("a <b> & c", Rng(2).normal((30, 2)))]
    first, second = tmp_path / "1.svg", tmp_path / "2.svg"
    report.write_svg(first, sets, "t")
    report.write_svg(second, sets, "t")
    assert first.read_text() == second.read_text()
    assert first.read_text().count("<circle") == 50
    assert "a &lt;b&gt; &amp; c" in first.read_text()


def test_svg_maps_the_viewport():
    svg = report.render_svg([("corner", np.array([[-5.0, 5.0], [5.0, -5.0]]))])
    assert '<circle cx="0.00" cy="0.00"' in svg
    assert '<circle cx="500.00" cy="500.00"' in svg
