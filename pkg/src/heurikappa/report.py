"""Render analysis results as Markdown, CSV and JSON artifacts.

The renderer only formats numbers already present in an
:class:`AgreementReport`; nothing is recomputed here.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import asdict, dataclass
from pathlib import Path

from . import __version__
from .catalog import SEVERITY_LABELS
from .irr import WEIGHT_SCHEMES, AgreementAnalysis, pairwise_severity_agreement
from .schema import as_dataset, validate_dataset

__all__ = [
    "REPORT_FILES",
    "AgreementReport",
    "build_report",
    "config_hash",
    "emit_figure_data",
    "format_kappa",
    "render_report",
]

REPORT_FILES = {
    "markdown": ("report.md",),
    "json": ("report.json",),
    "csv_bundle": (
        "table1_severity.csv",
        "table2_issue_kappa.csv",
        "table3_multi_rater.csv",
        "table4_severity_kappa.csv",
        "table4_weight_schemes.csv",
        "table5_per_heuristic_kappa.csv",
        "fig1_issue_distribution.csv",
        "fig2_per_site_kappa.csv",
    ),
}
FIGURE_FILES = {
    "issue_distribution": "fig1_issue_distribution.csv",
    "per_site_kappa": "fig2_per_site_kappa.csv",
}


def config_hash(config: dict) -> str:
    keys = ("weights", "alpha_metric", "exclusion_policy", "n_sessions")
    canonical = json.dumps({k: config.get(k) for k in keys}, sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _pair_label(a, b) -> str:
    return f"eval{a}-eval{b}"


def _stats_row(pair, st, n_items=None) -> dict:
    row = {
        "comparison": _pair_label(*pair),
        "pair": list(pair),
        "kappa": st.kappa,
        "p_o": st.p_o,
        "p_e": st.p_e,
        "agreed": st.agreed,
        "total": st.total,
        "exact_percent": st.exact_percent,
        "undefined_reason": st.undefined_reason,
    }
    if hasattr(st, "scheme"):
        row["scheme"] = st.scheme
        row["weighted_observed"] = st.weighted_observed
        row["weighted_expected"] = st.weighted_expected
    if n_items is not None:
        # all-items denominator: invalid cells count as disagreements
        row["n_items"] = n_items
        row["percent_all_items"] = 100.0 * st.agreed / n_items if n_items else None
    return row


@dataclass(frozen=True)
class AgreementReport:
    """Every table and figure the tool emits, as JSON-native values."""

    severity_histogram: dict
    issue_frequency: dict
    pairwise_issue: list
    multi_rater: dict | None
    pairwise_severity: list
    weight_schemes: list
    per_heuristic: list
    per_site_weighted: dict
    validation: dict
    provenance: dict

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: dict) -> AgreementReport:
        return cls(**obj)


def build_report(dataset, config: dict | None = None) -> AgreementReport:
    config = dict(config or {})
    config.setdefault("weights", "quadratic")
    config.setdefault("alpha_metric", "nominal")
    config.setdefault("exclusion_policy", "split")
    config.setdefault("n_sessions", 3)
    ds = as_dataset(dataset)
    an = AgreementAnalysis(config["weights"], config["alpha_metric"]).fit(ds)

    hist = an.severity_histogram_
    freq = an.issue_frequency_
    multi = None
    if an.multi_rater_ is not None:
        f, a, t = an.multi_rater_.fleiss, an.multi_rater_.alpha, an.transposed_alpha_
        multi = {
            "fleiss_kappa": f.kappa, "p_bar": f.p_bar, "p_bar_e": f.p_bar_e,
            "fleiss_items": f.n_items, "fleiss_undefined_reason": f.undefined_reason,
            "krippendorff_alpha": a.alpha, "alpha_metric": a.metric, "d_o": a.d_o, "d_e": a.d_e,
            "alpha_items": a.n_items, "alpha_undefined_reason": a.undefined_reason,
            "alpha_transposed": t.alpha, "alpha_transposed_undefined_reason": t.undefined_reason,
        }
    n_items = len(ds.eligible_sites) * len(an.heuristics_)
    schemes = []
    for scheme in WEIGHT_SCHEMES:
        for pair, st in pairwise_severity_agreement(ds, scheme, an.pairs_).items():
            schemes.append(_stats_row(pair, st, n_items))
    per_heuristic = [
        {"heuristic": name, "pairs": [_stats_row(p, st) for p, st in cells.items()]}
        for name, cells in sorted(an.per_heuristic_.items())
    ]
    per_site = {
        "pair": list(an.per_site_pair),
        "scheme": an.weights,
        "sites": [{"site_id": site, **_stats_row(an.per_site_pair, st)} for site, st in an.per_site_weighted_.items()],
    }
    provenance = {
        "tool": "heurikappa",
        "version": __version__,
        "config": {k: config[k] for k in sorted(config)},
        "config_hash": config_hash(config),
        "dataset_root": ds.root,
        "excluded_sites": list(an.excluded_sites_),
    }
    return AgreementReport(
        severity_histogram={"levels": list(SEVERITY_LABELS), "counts": list(hist.counts),
                            "total": hist.total, "excluded": hist.excluded},
        issue_frequency={"flagged": freq.flagged, "not_flagged": freq.not_flagged,
                         "missing": freq.missing, "fraction": freq.fraction},
        pairwise_issue=[_stats_row(p, st) for p, st in an.pairwise_issue_.items()],
        multi_rater=multi,
        pairwise_severity=[_stats_row(p, st, n_items) for p, st in an.pairwise_severity_.items()],
        weight_schemes=schemes,
        per_heuristic=per_heuristic,
        per_site_weighted=per_site,
        validation=validate_dataset(ds).to_json(),
        provenance=provenance,
    )


def format_kappa(value, digits=3, reason=None) -> str:
    if value is None:
        return f"n/a ({reason})" if reason else "n/a"
    text = f"{value:.{digits}f}"
    if float(text) == 0.0:
        text = text.lstrip("-")
    return text


def _pct(value) -> str:
    return f"{value:.1f}"


def _md_table(header, rows) -> list[str]:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(str(c) for c in r) + " |" for r in rows]
    return lines


def _provenance_line(report: AgreementReport) -> str:
    p = report.provenance
    return f"{p['tool']} {p['version']} config_hash={p['config_hash']} dataset_root={p['dataset_root']}"


def render_markdown(report: AgreementReport) -> str:
    p = report.provenance
    out = ["# Heuristic evaluation agreement report", ""]
    out += ["## Provenance", ""]
    out += [f"- tool: {p['tool']} {p['version']}", f"- config hash: `{p['config_hash']}`",
            f"- dataset root: {p['dataset_root']}"]
    out += [f"- {k}: {v}" for k, v in p["config"].items()]
    if p["excluded_sites"]:
        out.append(f"- sites left out of agreement analyses (fewer than 2 sessions): {', '.join(p['excluded_sites'])}")
    v = report.validation
    out += ["", "## Validation", ""]
    out += [f"- sites: {v['n_sites']}, sessions: {v['n_sessions']}",
            f"- expected entries: {v['expected_entries']}, valid severities: {v['valid_severity']}, "
            f"valid issue flags: {v['valid_issue']}",
            "- exclusions: " + ", ".join(f"{k}={n}" for k, n in v["exclusions_by_reason"].items())]

    h = report.severity_histogram
    out += ["", "## Distribution of severity ratings", ""]
    out += _md_table(["Severity Level", "Count"],
                     [[f"{lvl} ({SEVERITY_LABELS[lvl]})", c] for lvl, c in zip(h["levels"], h["counts"])])
    out += ["", f"Total: {h['total']} (excluded: {h['excluded']})"]

    f = report.issue_frequency
    out += ["", "## Issue frequency", ""]
    out += _md_table(["Category", "Count"], [["issue_found", f["flagged"]], ["no_issue", f["not_flagged"]],
                                              ["missing", f["missing"]]])
    frac = "n/a" if f["fraction"] is None else f"{f['fraction']:.3f}"
    out += ["", f"Fraction flagged: {frac}"]

    out += ["", "## Unweighted Cohen's kappa across all issue pairs", ""]
    out += _md_table(["Comparison", "Cohen's κ", "Agreement", "Exact Percent"], [
        [r["comparison"], format_kappa(r["kappa"], 3, r["undefined_reason"]), f"{r['agreed']}/{r['total']}",
         _pct(r["exact_percent"])] for r in report.pairwise_issue])

    out += ["", "## Multi-rater agreement metrics", ""]
    m = report.multi_rater
    if m is None:
        out.append("n/a (no site has two or more sessions)")
    else:
        out += _md_table(["Metric", "Value"], [
            [f"Krippendorff's α ({m['alpha_metric']})", format_kappa(m["krippendorff_alpha"], 6, m["alpha_undefined_reason"])],
            ["Fleiss's κ", format_kappa(m["fleiss_kappa"], 3, m["fleiss_undefined_reason"])],
            ["Krippendorff's α, sessions as units (diagnostic)",
             format_kappa(m["alpha_transposed"], 6, m["alpha_transposed_undefined_reason"])],
        ])

    out += ["", f"## Weighted Cohen's kappa across all severity pairs ({p['config']['weights']} weights)", ""]
    out += _md_table(["Comparison", "κ_w", "Agreement", "Exact Percent", "Agreement (all items)", "Percent (all items)"], [
        [r["comparison"], format_kappa(r["kappa"], 6, r["undefined_reason"]), f"{r['agreed']}/{r['total']}",
         _pct(r["exact_percent"]), f"{r['agreed']}/{r['n_items']}", _pct(r["percent_all_items"])]
        for r in report.pairwise_severity])

    out += ["", "## Weighted kappa under each weight scheme", ""]
    out += _md_table(["Scheme", "Comparison", "κ_w", "Agreement", "Exact Percent"], [
        [r["scheme"], r["comparison"], format_kappa(r["kappa"], 6, r["undefined_reason"]),
         f"{r['agreed']}/{r['total']}", _pct(r["exact_percent"])] for r in report.weight_schemes])

    out += ["", "## Cohen's kappa by heuristic (issue presence)", ""]
    pairs = [c["comparison"] for c in report.per_heuristic[0]["pairs"]] if report.per_heuristic else []
    out += _md_table(["Heuristic"] + [f"κ ({c.replace('eval', '')})" for c in pairs], [
        [row["heuristic"]] + [format_kappa(c["kappa"], 3, c["undefined_reason"]) for c in row["pairs"]]
        for row in report.per_heuristic])

    ps = report.per_site_weighted
    out += ["", f"## Weighted kappa per site ({_pair_label(*ps['pair'])}, {ps['scheme']} weights)", ""]
    out += _md_table(["Site", "κ_w", "Agreement"], [
        [s["site_id"], format_kappa(s["kappa"], 3, s["undefined_reason"]), f"{s['agreed']}/{s['total']}"]
        for s in ps["sites"]])
    return "\n".join(out) + "\n"


def _csv_text(report: AgreementReport, header, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# {_provenance_line(report)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows([["" if c is None else c for c in r] for r in rows])
    return buf.getvalue()


def _pair_rows(rows):
    return [[r["comparison"], r["kappa"], r["agreed"], r["total"], r["exact_percent"], r["undefined_reason"]]
            for r in rows]


_PAIR_HEADER = ["comparison", "kappa", "agreed", "total", "exact_percent", "undefined_reason"]
_ALL_ITEMS_HEADER = ["n_items", "percent_all_items"]


def _severity_rows(rows):
    return [pr + [r["n_items"], r["percent_all_items"]] for r, pr in zip(rows, _pair_rows(rows))]


def _figure_csv(report: AgreementReport, figure: str) -> str:
    if figure == "issue_distribution":
        f = report.issue_frequency
        return _csv_text(report, ["category", "count"],
                         [["issue_found", f["flagged"]], ["no_issue", f["not_flagged"]], ["missing", f["missing"]]])
    if figure == "per_site_kappa":
        rows = [[s["site_id"], s["kappa"], "true" if s["kappa"] is not None else "false"]
                for s in report.per_site_weighted["sites"]]
        return _csv_text(report, ["site_id", "kappa", "defined_flag"], rows)
    raise ValueError(f"unknown figure {figure!r}; expected one of {tuple(FIGURE_FILES)}")


def _csv_bundle(report: AgreementReport) -> dict[str, str]:
    h = report.severity_histogram
    m = report.multi_rater or {}
    files = {
        "table1_severity.csv": _csv_text(report, ["severity", "label", "count"],
                                         [[lvl, SEVERITY_LABELS[lvl], c] for lvl, c in zip(h["levels"], h["counts"])]
                                         + [["excluded", "", h["excluded"]]]),
        "table2_issue_kappa.csv": _csv_text(report, _PAIR_HEADER, _pair_rows(report.pairwise_issue)),
        "table3_multi_rater.csv": _csv_text(report, ["metric", "value", "undefined_reason"], [
            ["krippendorff_alpha", m.get("krippendorff_alpha"), m.get("alpha_undefined_reason")],
            ["fleiss_kappa", m.get("fleiss_kappa"), m.get("fleiss_undefined_reason")],
            ["krippendorff_alpha_sessions_as_units", m.get("alpha_transposed"), m.get("alpha_transposed_undefined_reason")],
        ]),
        "table4_severity_kappa.csv": _csv_text(report, _PAIR_HEADER + _ALL_ITEMS_HEADER,
                                               _severity_rows(report.pairwise_severity)),
        "table4_weight_schemes.csv": _csv_text(report, ["scheme"] + _PAIR_HEADER + _ALL_ITEMS_HEADER,
                                               [[r["scheme"]] + row for r, row in
                                                zip(report.weight_schemes, _severity_rows(report.weight_schemes))]),
        "table5_per_heuristic_kappa.csv": _csv_text(report, ["heuristic"] + _PAIR_HEADER, [
            [row["heuristic"]] + pr for row in report.per_heuristic for pr in _pair_rows(row["pairs"])]),
    }
    for fig, name in FIGURE_FILES.items():
        files[name] = _figure_csv(report, fig)
    return files


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def render_report(report: AgreementReport, fmt: str, out_dir) -> list[Path]:
    """Write one output format into ``out_dir`` and return the written paths."""
    out_dir = Path(out_dir)
    if fmt == "markdown":
        return [_write(out_dir / "report.md", render_markdown(report))]
    if fmt == "json":
        text = json.dumps(report.to_json(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
        return [_write(out_dir / "report.json", text)]
    if fmt == "csv_bundle":
        return [_write(out_dir / name, text) for name, text in _csv_bundle(report).items()]
    raise ValueError(f"unknown format {fmt!r}; expected one of {tuple(REPORT_FILES)}")


def emit_figure_data(report: AgreementReport, figure: str, out_dir) -> Path:
    text = _figure_csv(report, figure)
    return _write(Path(out_dir) / FIGURE_FILES[figure], text)
