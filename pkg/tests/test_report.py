import csv
import json
from dataclasses import replace

import pytest
from builders import dataset

from heurikappa.report import (
    REPORT_FILES,
    AgreementReport,
    build_report,
    config_hash,
    emit_figure_data,
    format_kappa,
    render_markdown,
    render_report,
)
from heurikappa.store import load_dataset

HALF = [True, False] * 5


@pytest.fixture(scope="module")
def report(mock_root):
    return build_report(load_dataset(mock_root), {"weights": "quadratic"})


def read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# heurikappa ")
    return list(csv.reader(lines[1:]))


def test_format_kappa():
    assert format_kappa(0.4712) == "0.471"
    assert format_kappa(0.6253614, 6) == "0.625361"
    assert format_kappa(-0.0001) == "0.000"
    assert format_kappa(None, reason="p_e = 1") == "n/a (p_e = 1)"


def test_table_two_row_format(report):
    row = {**report.pairwise_issue[0], "kappa": 0.47104, "agreed": 247, "total": 300,
           "exact_percent": 100 * 247 / 300, "undefined_reason": None}
    text = render_markdown(replace(report, pairwise_issue=[row]))
    assert "| eval1-eval2 | 0.471 | 247/300 | 82.3 |" in text


def test_undefined_cell_rendered_with_reason():
    ds = dataset({"a": {k: ([True] * 10, [2] * 10) for k in (1, 2)}})
    text = render_markdown(build_report(ds))
    assert "n/a (p_e = 1)" in text
    assert "n/a (sum(w*e) = 0)" in text


def test_all_formats_byte_identical(report, tmp_path):
    for fmt, names in REPORT_FILES.items():
        first = render_report(report, fmt, tmp_path / "one")
        second = render_report(report, fmt, tmp_path / "two")
        assert [p.name for p in first] == list(names)
        for a, b in zip(first, second):
            assert a.read_bytes() == b.read_bytes()


def test_json_lossless(report, tmp_path):
    (path,) = render_report(report, "json", tmp_path)
    assert AgreementReport.from_json(json.loads(path.read_text())) == report


def test_provenance_everywhere(report, tmp_path):
    h = report.provenance["config_hash"]
    for fmt in REPORT_FILES:
        for path in render_report(report, fmt, tmp_path):
            assert h in path.read_text()


def test_config_hash_tracks_config():
    base = {"weights": "quadratic", "alpha_metric": "nominal", "exclusion_policy": "split", "n_sessions": 3}
    assert config_hash(base) == config_hash(dict(reversed(base.items())))
    assert config_hash(base) != config_hash({**base, "weights": "linear"})


def test_markdown_numbers_come_from_report(report):
    text = render_markdown(report)
    for r in report.pairwise_issue:
        assert f"{r['agreed']}/{r['total']}" in text
    assert str(report.severity_histogram["total"]) in text


def test_issue_distribution_figure(clean_root, tmp_path):
    rep = build_report(load_dataset(clean_root))
    rows = read_csv(emit_figure_data(rep, "issue_distribution", tmp_path))
    assert rows[0] == ["category", "count"]
    assert sum(int(c) for _, c in rows[1:]) == 900


def test_per_site_figure(report, tmp_path):
    rows = read_csv(emit_figure_data(report, "per_site_kappa", tmp_path))
    assert rows[0] == ["site_id", "kappa", "defined_flag"]
    assert len(rows) == 31


def test_per_site_figure_undefined_site(tmp_path):
    ds = dataset({"flat": {k: ([True] * 10, [2] * 10) for k in (1, 2)},
                  "ok": {k: (HALF, [1, 0] * 5) for k in (1, 2)}})
    rows = read_csv(emit_figure_data(build_report(ds), "per_site_kappa", tmp_path))
    assert rows[1] == ["flat", "", "false"]
    assert rows[2] == ["ok", "1.0", "true"]


def test_empty_dataset_report():
    rep = build_report([])
    assert rep.multi_rater is None
    assert "n/a" in render_markdown(rep)


def test_unknown_format(report, tmp_path):
    with pytest.raises(ValueError):
        render_report(report, "pdf", tmp_path)
    with pytest.raises(ValueError):
        emit_figure_data(report, "pie", tmp_path)
