"""Dataset-level agreement analyses over (site, heuristic) items."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ..catalog import SEVERITY_LEVELS, heuristic_catalog
from ..schema import as_dataset
from .coefficients import (
    BINARY_DOMAIN,
    SEVERITY_DOMAIN,
    AgreementStats,
    MultiRaterStats,
    RatingsTable,
    WeightedAgreementStats,
    cohen_kappa,
    fleiss_kappa,
    krippendorff_alpha,
    weighted_kappa,
)

__all__ = [
    "IssueFrequency",
    "SeverityHistogram",
    "issue_frequency",
    "multi_rater_issue_agreement",
    "pairwise_issue_agreement",
    "pairwise_severity_agreement",
    "per_heuristic_kappa",
    "per_site_weighted_kappa",
    "ratings_table",
    "session_pairs",
    "severity_histogram",
    "transposed_alpha",
]

FIELDS = ("issue", "severity")


def _value(entry, field):
    if entry is None:
        return None
    if field == "issue":
        return None if entry.issue_found is None else int(entry.issue_found)
    return entry.severity


def session_pairs(dataset) -> list[tuple[int, int]]:
    ds = as_dataset(dataset)
    indices = sorted({s.session_index for s in ds if s.site_id in set(ds.eligible_sites)})
    return list(combinations(indices, 2))


def ratings_table(dataset, field: str = "issue", sites=None, heuristics=None) -> RatingsTable:
    """Items are (site_id, heuristic slug) over eligible sites; raters are session indices."""
    if field not in FIELDS:
        raise ValueError(f"field must be one of {FIELDS}")
    ds = as_dataset(dataset)
    grouped = ds.by_site()
    sites = ds.eligible_sites if sites is None else list(sites)
    heuristics = heuristic_catalog() if heuristics is None else list(heuristics)
    raters = sorted({k for site in sites for k in grouped.get(site, {})})
    items, cells = [], []
    for site in sites:
        sess = grouped.get(site, {})
        for h in heuristics:
            items.append((site, h.slug))
            cells.append([
                _value(sess[k].entry(h) if k in sess else None, field)
                for k in raters
            ])
    domain = BINARY_DOMAIN if field == "issue" else SEVERITY_DOMAIN
    arr = np.array(cells, dtype=float).reshape(len(items), len(raters)) if items else np.empty((0, len(raters)))
    return RatingsTable(tuple(items), tuple(raters), arr, domain)


def _no_pairs(reason="no paired ratings") -> AgreementStats:
    return AgreementStats(None, 0.0, 0.0, 0, 0, reason)


def _pair_stats(table: RatingsTable, a: int, b: int, weighted: str | None = None):
    if a not in table.raters or b not in table.raters:
        return _no_pairs()
    x, y = table.column(a), table.column(b)
    if not (~np.isnan(x) & ~np.isnan(y)).any():
        return _no_pairs()
    if weighted:
        return weighted_kappa(x, y, weighted, table.domain)
    return cohen_kappa(x, y)


def pairwise_issue_agreement(dataset, pairs=None) -> dict[tuple[int, int], AgreementStats]:
    """Unweighted Cohen's kappa on issue presence for each session pair."""
    pairs = session_pairs(dataset) if pairs is None else pairs
    if not pairs:
        return {}
    table = ratings_table(dataset, "issue")
    return {(a, b): _pair_stats(table, a, b) for a, b in pairs}


def multi_rater_issue_agreement(dataset, metric: str = "nominal") -> MultiRaterStats:
    """Fleiss' kappa (complete items only) and Krippendorff's alpha on issue presence."""
    table = ratings_table(dataset, "issue")
    return MultiRaterStats(fleiss_kappa(table), krippendorff_alpha(table, metric))


def transposed_alpha(dataset, metric: str = "nominal"):
    """Alpha with sessions treated as the coded units and items as coders.

    Diagnostic only: this is the result of feeding an items x sessions matrix
    to a routine that expects coders x units.
    """
    table = ratings_table(dataset, "issue")
    return krippendorff_alpha(table.cells.T, metric)


def pairwise_severity_agreement(dataset, scheme: str = "quadratic", pairs=None) -> dict[tuple[int, int], WeightedAgreementStats]:
    pairs = session_pairs(dataset) if pairs is None else pairs
    if not pairs:
        return {}
    table = ratings_table(dataset, "severity")
    return {(a, b): _pair_stats(table, a, b, scheme) for a, b in pairs}


def per_site_weighted_kappa(dataset, pair=(1, 2), scheme: str = "quadratic") -> dict[str, AgreementStats]:
    """Weighted kappa over one site's heuristics for a single session pair."""
    ds = as_dataset(dataset)
    out = {}
    for site in ds.eligible_sites:
        table = ratings_table(ds, "severity", sites=[site])
        out[site] = _pair_stats(table, pair[0], pair[1], scheme)
    return out


def per_heuristic_kappa(dataset, pairs=None) -> dict[str, dict[tuple[int, int], AgreementStats]]:
    """Issue-presence kappa per heuristic, across sites, for each session pair."""
    ds = as_dataset(dataset)
    pairs = session_pairs(ds) if pairs is None else pairs
    out = {}
    for h in heuristic_catalog():
        if not pairs:
            out[h.canonical_name] = {}
            continue
        table = ratings_table(ds, "issue", heuristics=[h])
        out[h.canonical_name] = {(a, b): _pair_stats(table, a, b) for a, b in pairs}
    return out


@dataclass(frozen=True)
class SeverityHistogram:
    counts: tuple[int, ...]
    excluded: int

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def expected(self) -> int:
        return self.total + self.excluded


def severity_histogram(dataset) -> SeverityHistogram:
    ds = as_dataset(dataset)
    counts = dict.fromkeys(SEVERITY_LEVELS, 0)
    for s in ds:
        for e in s.severity_valid:
            counts[e.severity] += 1
    expected = len(ds) * len(heuristic_catalog())
    total = sum(counts.values())
    return SeverityHistogram(tuple(counts[k] for k in SEVERITY_LEVELS), expected - total)


@dataclass(frozen=True)
class IssueFrequency:
    flagged: int
    not_flagged: int
    missing: int

    @property
    def fraction(self) -> float | None:
        rated = self.flagged + self.not_flagged
        return self.flagged / rated if rated else None

    @property
    def total(self) -> int:
        return self.flagged + self.not_flagged + self.missing


def issue_frequency(dataset) -> IssueFrequency:
    ds = as_dataset(dataset)
    flagged = not_flagged = 0
    for s in ds:
        for e in s.entries:
            if e.issue_found is True:
                flagged += 1
            elif e.issue_found is False:
                not_flagged += 1
    expected = len(ds) * len(heuristic_catalog())
    return IssueFrequency(flagged, not_flagged, expected - flagged - not_flagged)
