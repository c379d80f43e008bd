import csv
import io
import json

import pytest

from pkm_synth.errors import ConfigError
from pkm_synth.report import (
    CSV_COLUMNS,
    ComparisonReport,
    RunConfig,
    format_table1,
    format_table2,
    parse_config_text,
    report_to_csv,
    run_compare,
    run_synth,
    sig9,
    worker_count,
    write_outputs,
)


@pytest.fixture(scope="module")
def small_report():
    cfg = RunConfig(resolution=96, square_mode=True).validate()
    return run_compare(cfg, threads=1)


def test_sig9():
    assert sig9(1.23456789012) == 1.23456789
    assert sig9(None) is None


def test_json_round_trip(small_report):
    text = small_report.to_json()
    back = ComparisonReport.from_json(text)
    assert back == small_report
    assert back.to_json() == text


def test_report_fields(small_report):
    assert [r.name for r in small_report.records] == ["biglide1", "biglide2", "orthoglide"]
    for r in small_report.records:
        assert r.ok
        assert len(r.rect_corners) == 4
        for key in ("L0_over_L", "delta_rho_over_L", "S_over_L2", "L0", "L", "delta_rho", "envelope_area"):
            assert isinstance(getattr(r, key), float)
    assert small_report.metadata["resolution"] == 96


def test_csv_and_json_carry_identical_numbers(small_report):
    data = json.loads(small_report.to_json())["records"]
    rows = list(csv.DictReader(io.StringIO(report_to_csv(small_report))))
    assert list(rows[0].keys()) == CSV_COLUMNS
    for rec, row in zip(data, rows):
        for key in ("L0_over_L", "delta_rho_over_L", "S_over_L2", "L0", "L", "delta_rho", "envelope_area"):
            assert float(row[key]) == rec[key]
            assert row[key] == repr(rec[key])
        assert float(row["square_L"]) == rec["square"]["L"]


def test_tables(small_report):
    t1 = format_table1(small_report).splitlines()
    assert t1[0].split() == ["Mechanism", "L0/L", "drho/L", "S/L^2"]
    assert t1[1].split()[:3] == ["biglide1", "1.947", "0.547"]
    t2 = format_table2(small_report)
    assert "biglide2 (sq)" in t2
    assert t2.startswith("Target rectangular workspace: 1 m^2")


def test_synth_only_report():
    rep = run_synth(RunConfig(architectures=["biglide2"]).validate())
    (rec,) = rep.records
    assert rec.L0_over_L == pytest.approx(0.458, abs=1e-3)
    assert rec.S_over_L2 is None
    assert format_table1(rep).splitlines()[1].split() == ["biglide2", "0.459", "0.529", "-"]


def test_write_outputs(tmp_path, small_report):
    paths = write_outputs(small_report, tmp_path)
    assert sorted(p.rsplit("/", 1)[1] for p in paths) == ["report.csv", "report.json", "table1.txt", "table2.txt"]


def test_parse_config():
    text = "# comment\narch = biglide2\nlambda-max = 2.5  # trailing\nsquare = yes\n\nresolution=128\n"
    assert parse_config_text(text) == {"arch": "biglide2", "lambda_max": 2.5, "square": True, "resolution": 128}


@pytest.mark.parametrize("text, where", [
    ("arch = biglide1\nnonsense\n", "cfg:2"),
    ("arch = biglide1\n\ncolour = red\n", "cfg:3"),
    ("resolution = lots\n", "cfg:1"),
    ("square = maybe\n", "cfg:1"),
])
def test_parse_config_errors_carry_line(text, where):
    with pytest.raises(ConfigError, match=where):
        parse_config_text(text, "cfg")


@pytest.mark.parametrize("kwargs, field", [
    (dict(architectures=["triglide"]), "arch"),
    (dict(architectures=["custom"]), "arch"),
    (dict(lambda_min=2.0, lambda_max=1.0), "lambda_min"),
    (dict(target_area=-1.0), "target_area"),
    (dict(resolution=4), "resolution"),
    (dict(fmt="xml"), "format"),
])
def test_config_validation_names_field(kwargs, field):
    with pytest.raises(ConfigError, match=field):
        RunConfig(**kwargs).validate()


def test_worker_count(monkeypatch):
    monkeypatch.setenv("PKM_SYNTH_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("PKM_SYNTH_THREADS", "0")
    assert worker_count() >= 1
    monkeypatch.setenv("PKM_SYNTH_THREADS", "many")
    with pytest.raises(ConfigError):
        worker_count()


def test_thread_count_does_not_change_report():
    cfg = RunConfig(resolution=96).validate()
    assert run_compare(cfg, threads=1).to_json() == run_compare(cfg, threads=3).to_json()


def test_failed_architecture_is_isolated():
    cfg = RunConfig(architectures=["biglide1", "custom"], alpha1=0.0, alpha2=0.0, resolution=64).validate()
    rep = run_compare(cfg, threads=1)
    assert rep.failed == 1
    assert rep.records[0].ok
    assert rep.records[1].error.startswith("synthesis: NoFeasibleRange")
