import xml.etree.ElementTree as ET

import pytest

from vanya.errors import InvalidInputError
from vanya.evaluation import EvalRecord, EvalReport, run_experiment
from vanya.lv import DEFAULT_INITIAL, DEFAULT_PARAMS, integrate_rk4
from vanya.plotting import bar_chart_svg, emit_plot, line_chart_svg

NS = {"s": "http://www.w3.org/2000/svg"}


@pytest.fixture(scope="module")
def report(synth):
    return run_experiment(synth, models=["esn", "persistence"], splits=[0.9, 0.8, 0.7], n_runs=2)


class TestBars:
    def test_structure(self, report):
        root = ET.fromstring(bar_chart_svg(report, "RMSE"))
        assert root.get("version") == "1.1"
        groups = root.findall("s:g[@class='split']", NS)
        assert [g.get("data-split") for g in groups] == ["90-10", "80-20", "70-30"]
        for g in groups:
            assert len(g.findall("s:rect[@class='bar']", NS)) == 2
        labels = [t.text for t in root.iter("{http://www.w3.org/2000/svg}text")]
        assert "esn" in labels and "persistence" in labels

    def test_deterministic_bytes(self, report, tmp_path):
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        emit_plot(report, "bars", a, metric="MAE")
        emit_plot(report, "bars", b, metric="MAE")
        assert a.read_bytes() == b.read_bytes()

    def test_empty_report_writes_nothing(self, tmp_path):
        path = tmp_path / "empty.svg"
        with pytest.raises(InvalidInputError):
            emit_plot(EvalReport({}, {}, []), "bars", path)
        assert not path.exists()

    def test_failed_cell_draws_zero_bar(self):
        rep = EvalReport({}, {}, [EvalRecord("a", "90-10", "RMSE", [None]), EvalRecord("b", "90-10", "RMSE", [2.0])])
        root = ET.fromstring(bar_chart_svg(rep))
        heights = [float(r.get("height")) for r in root.iter("{http://www.w3.org/2000/svg}rect") if r.get("class") == "bar"]
        assert heights[0] == 0 and heights[1] > 0


class TestLines:
    def test_trajectory(self, tmp_path):
        traj = integrate_rk4(DEFAULT_PARAMS, DEFAULT_INITIAL, 0.1, 100)
        svg = emit_plot(traj, "lines", tmp_path / "t.svg", title="orbit")
        root = ET.fromstring(svg)
        lines = root.findall("s:polyline[@class='line']", NS)
        assert len(lines) == 2
        assert len(lines[0].get("points").split()) == 101

    def test_series(self, synth):
        root = ET.fromstring(line_chart_svg(synth))
        assert len(root.findall("s:polyline", NS)) == 1

    def test_empty_lines(self, tmp_path):
        path = tmp_path / "none.svg"
        with pytest.raises(InvalidInputError):
            emit_plot({"a": ([], [])}, "lines", path)
        assert not path.exists()

    def test_wrong_kind(self, report, tmp_path):
        with pytest.raises(InvalidInputError):
            emit_plot(report, "pie", tmp_path / "x.svg")
        with pytest.raises(InvalidInputError):
            emit_plot([1, 2], "bars", tmp_path / "x.svg")
