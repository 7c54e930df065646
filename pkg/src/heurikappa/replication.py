"""Compare an analysis report against the published reference values.

Reference numbers are printed to a fixed precision, so each check passes
when the computed value rounds to the printed one (half a unit in the last
printed digit). Agreement counts are compared exactly. Printed percentages
are compared within 0.1 because the published tables mix rounding and
truncation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .irr import WEIGHT_SCHEMES

__all__ = ["REFERENCE", "Check", "ReplicationResult", "compare_to_reference", "render_replication"]

REFERENCE = {
    "severity_histogram": [164, 251, 306, 155, 9],
    "severity_total": 885,
    "severity_excluded": 15,
    "pairwise_issue": {
        (1, 2): (0.471, 247, 300, 82.3),
        (1, 3): (0.530, 255, 300, 85.0),
        (2, 3): (0.502, 254, 300, 84.7),
    },
    "fleiss_kappa": 0.500,
    "krippendorff_alpha": -0.000234,
    "pairwise_severity": {
        (1, 2): (0.625361, 169, 300, 56.3),
        (1, 3): (0.668431, 171, 300, 57.0),
        (2, 3): (0.596722, 167, 300, 55.6),
    },
    "per_heuristic": {
        "Aesthetic And Minimalist Design": (0.328, 0.143, 0.154),
        "Consistency And Standards": (-0.024, 0.302, -0.029),
        "Error Prevention": (0.416, 0.551, 0.438),
        "Flexibility And Efficiency Of Use": (0.103, 0.280, 0.032),
        "Help And Documentation": (-0.068, 0.123, 0.188),
        "Help Users Recognize Errors": (0.406, 0.292, 0.231),
        "Match System And Real World": (0.569, 0.364, 0.267),
        "Recognition Rather Than Recall": (0.238, 0.211, 0.132),
        "User Control And Freedom": (0.327, 0.534, -0.010),
        "Visibility Of System Status": (0.427, 0.298, 0.252),
    },
}

PAIRS = ((1, 2), (1, 3), (2, 3))
TOL_3DP = 5e-4
TOL_6DP = 5e-7
TOL_ALPHA = 1e-5
TOL_PCT = 0.1


@dataclass(frozen=True)
class Check:
    name: str
    expected: object
    observed: object
    tolerance: float | None
    passed: bool


@dataclass(frozen=True)
class ReplicationResult:
    checks: tuple[Check, ...]
    matching_schemes: tuple[str, ...]
    alpha_orientation: str | None

    def group(self, prefix: str) -> list[Check]:
        return [c for c in self.checks if c.name.startswith(prefix)]

    def passed(self, prefix: str = "") -> bool:
        group = self.group(prefix)
        return bool(group) and all(c.passed for c in group)


def _close(observed, expected, tol) -> bool:
    return observed is not None and abs(observed - expected) <= tol + 1e-12


def _num(name, observed, expected, tol) -> Check:
    return Check(name, expected, observed, tol, _close(observed, expected, tol))


def _rows_by_pair(rows):
    return {tuple(r["pair"]): r for r in rows}


def _pair_checks(prefix, rows, reference, kappa_tol) -> list[Check]:
    """Severity rows also carry an all-items denominator; either one may match."""
    by_pair = _rows_by_pair(rows)
    checks = []
    for pair, (kappa, agreed, total, pct) in reference.items():
        label = f"{prefix} eval{pair[0]}-eval{pair[1]}"
        r = by_pair.get(pair)
        if r is None:
            checks.append(Check(f"{label} kappa", kappa, None, kappa_tol, False))
            continue
        checks.append(_num(f"{label} kappa", r["kappa"], kappa, kappa_tol))
        denom, percent = r["total"], r["exact_percent"]
        if r.get("n_items") and r["total"] != total and r["n_items"] == total:
            denom, percent = r["n_items"], r["percent_all_items"]
        checks.append(Check(f"{label} agreement", f"{agreed}/{total}", f"{r['agreed']}/{denom}", None,
                            (r["agreed"], denom) == (agreed, total)))
        checks.append(_num(f"{label} exact percent", percent, pct, TOL_PCT))
    return checks


def compare_to_reference(report) -> ReplicationResult:
    checks: list[Check] = []
    h = report.severity_histogram
    checks.append(Check("table1 histogram", REFERENCE["severity_histogram"], h["counts"], None,
                        list(h["counts"]) == REFERENCE["severity_histogram"]))
    checks.append(Check("table1 total", REFERENCE["severity_total"], h["total"], None,
                        h["total"] == REFERENCE["severity_total"]))

    checks += _pair_checks("table2", report.pairwise_issue, REFERENCE["pairwise_issue"], TOL_3DP)

    m = report.multi_rater or {}
    checks.append(_num("table3 fleiss kappa", m.get("fleiss_kappa"), REFERENCE["fleiss_kappa"], TOL_3DP))
    ref_alpha = REFERENCE["krippendorff_alpha"]
    orientation = None
    if _close(m.get("krippendorff_alpha"), ref_alpha, TOL_ALPHA):
        orientation = "items as units"
    elif _close(m.get("alpha_transposed"), ref_alpha, TOL_ALPHA):
        orientation = "sessions as units"
    checks.append(Check("table3 krippendorff alpha", ref_alpha,
                        m.get("krippendorff_alpha") if orientation != "sessions as units" else m.get("alpha_transposed"),
                        TOL_ALPHA, orientation is not None))

    matching = []
    for scheme in WEIGHT_SCHEMES:
        rows = [r for r in report.weight_schemes if r["scheme"] == scheme]
        if all(c.passed for c in _pair_checks("table4", rows, REFERENCE["pairwise_severity"], TOL_6DP)):
            matching.append(scheme)
    best = matching[0] if matching else report.provenance["config"]["weights"]
    rows = [r for r in report.weight_schemes if r["scheme"] == best]
    checks += _pair_checks(f"table4 [{best}]", rows, REFERENCE["pairwise_severity"], TOL_6DP)

    by_name = {row["heuristic"]: _rows_by_pair(row["pairs"]) for row in report.per_heuristic}
    for name, values in REFERENCE["per_heuristic"].items():
        for pair, ref in zip(PAIRS, values):
            r = by_name.get(name, {}).get(pair)
            checks.append(_num(f"table5 {name} eval{pair[0]}-eval{pair[1]}",
                               None if r is None else r["kappa"], ref, TOL_3DP))
    return ReplicationResult(tuple(checks), tuple(matching), orientation)


def render_replication(result: ReplicationResult) -> str:
    lines = ["# Replication against published values", ""]
    if result.matching_schemes:
        lines.append(f"Weight scheme reproducing the published weighted kappas: {', '.join(result.matching_schemes)}")
    else:
        lines.append("No weight scheme reproduces the published weighted kappas.")
    if result.alpha_orientation:
        lines.append(f"Published Krippendorff's alpha reproduced with {result.alpha_orientation}.")
    lines += ["", "| Check | Expected | Observed | Result |", "|---|---|---|---|"]
    for c in result.checks:
        lines.append(f"| {c.name} | {c.expected} | {c.observed} | {'pass' if c.passed else 'FAIL'} |")
    return "\n".join(lines) + "\n"
