"""Chance-corrected agreement coefficients.

All functions accept ratings as integer category codes with ``None`` or NaN
for missing cells. A coefficient that is mathematically undefined (no chance
disagreement to correct against) is reported as ``None`` together with a
short ``undefined_reason``; it is never raised.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import RatingsError
from ._validation import check_domain, check_pair, check_ratings

__all__ = [
    "ALPHA_METRICS",
    "BINARY_DOMAIN",
    "SEVERITY_DOMAIN",
    "WEIGHT_SCHEMES",
    "AgreementStats",
    "AlphaStats",
    "ContingencyTable",
    "FleissStats",
    "MultiRaterStats",
    "RatingsTable",
    "WeightMatrix",
    "WeightedAgreementStats",
    "cohen_kappa",
    "contingency_table",
    "fleiss_kappa",
    "krippendorff_alpha",
    "multi_rater_stats",
    "weight_matrix",
    "weighted_kappa",
]

BINARY_DOMAIN = (0, 1)
SEVERITY_DOMAIN = (0, 1, 2, 3, 4)
WEIGHT_SCHEMES = ("identity", "linear", "quadratic")
ALPHA_METRICS = ("nominal", "interval", "ordinal")


@dataclass(frozen=True)
class RatingsTable:
    """Items x raters grid of optional category codes."""

    items: tuple
    raters: tuple
    cells: np.ndarray = field(repr=False)
    domain: tuple = SEVERITY_DOMAIN

    def __post_init__(self):
        cells = check_ratings(self.cells)
        if cells.shape != (len(self.items), len(self.raters)):
            raise RatingsError(
                f"cells shape {cells.shape} does not match {len(self.items)} items x {len(self.raters)} raters"
            )
        check_domain(cells, self.domain)
        cells.setflags(write=False)
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "raters", tuple(self.raters))
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_matrix(cls, X, domain=SEVERITY_DOMAIN):
        arr = check_ratings(X)
        return cls(tuple(range(arr.shape[0])), tuple(range(1, arr.shape[1] + 1)), arr, domain)

    def column(self, rater) -> np.ndarray:
        return self.cells[:, self.raters.index(rater)]

    def complete_rows(self) -> np.ndarray:
        return self.cells[~np.isnan(self.cells).any(axis=1)]


@dataclass(frozen=True)
class ContingencyTable:
    categories: tuple
    observed: np.ndarray
    expected: np.ndarray
    row: np.ndarray
    col: np.ndarray

    @property
    def k(self) -> int:
        return len(self.categories)

    @property
    def n(self) -> int:
        return int(self.observed.sum())


@dataclass(frozen=True)
class WeightMatrix:
    """Disagreement weights: zero on the diagonal, symmetric."""

    scheme: str
    categories: tuple
    w: np.ndarray

    @property
    def k(self) -> int:
        return len(self.categories)


@dataclass(frozen=True)
class AgreementStats:
    kappa: float | None
    p_o: float
    p_e: float
    agreed: int
    total: int
    undefined_reason: str | None = None

    @property
    def defined(self) -> bool:
        return self.kappa is not None

    @property
    def exact_percent(self) -> float:
        return 100.0 * self.agreed / self.total if self.total else 0.0

    @property
    def agreement(self) -> str:
        return f"{self.agreed}/{self.total}"


@dataclass(frozen=True)
class WeightedAgreementStats(AgreementStats):
    scheme: str = "quadratic"
    weighted_observed: float = 0.0
    weighted_expected: float = 0.0


@dataclass(frozen=True)
class FleissStats:
    kappa: float | None
    p_bar: float
    p_bar_e: float
    n_items: int
    n_raters: int
    undefined_reason: str | None = None

    @property
    def defined(self) -> bool:
        return self.kappa is not None


@dataclass(frozen=True)
class AlphaStats:
    alpha: float | None
    d_o: float
    d_e: float
    metric: str
    n_items: int
    n_pairable: int
    undefined_reason: str | None = None

    @property
    def defined(self) -> bool:
        return self.alpha is not None


@dataclass(frozen=True)
class MultiRaterStats:
    fleiss: FleissStats
    alpha: AlphaStats

    @property
    def fleiss_kappa(self):
        return self.fleiss.kappa

    @property
    def krippendorff_alpha(self):
        return self.alpha.alpha

    @property
    def p_bar(self):
        return self.fleiss.p_bar

    @property
    def p_bar_e(self):
        return self.fleiss.p_bar_e

    @property
    def d_o(self):
        return self.alpha.d_o

    @property
    def d_e(self):
        return self.alpha.d_e


def weight_matrix(categories=SEVERITY_DOMAIN, scheme: str = "quadratic") -> WeightMatrix:
    cats = np.asarray(categories, dtype=float)
    diff = cats[:, None] - cats[None, :]
    if scheme == "identity":
        w = (diff != 0).astype(float)
    elif scheme == "linear":
        w = np.abs(diff)
    elif scheme == "quadratic":
        w = diff**2
    else:
        raise ValueError(f"unknown weight scheme {scheme!r}; expected one of {WEIGHT_SCHEMES}")
    w.setflags(write=False)
    return WeightMatrix(scheme, tuple(categories), w)


def contingency_table(r1, r2, categories=SEVERITY_DOMAIN) -> ContingencyTable:
    """Observed and chance-expected cross-tabulation over a fixed category domain."""
    a, b = check_pair(r1, r2)
    check_domain(a, categories)
    check_domain(b, categories)
    index = {c: i for i, c in enumerate(categories)}
    k = len(categories)
    obs = np.zeros((k, k), dtype=np.int64)
    np.add.at(obs, ([index[v] for v in a.tolist()], [index[v] for v in b.tolist()]), 1)
    row, col = obs.sum(axis=1), obs.sum(axis=0)
    expected = np.outer(row, col) / obs.sum()
    return ContingencyTable(tuple(categories), obs, expected, row, col)


def cohen_kappa(r1, r2) -> AgreementStats:
    """Unweighted Cohen's kappa on pairwise-complete cases.

    Chance agreement uses each rater's own marginals over the categories
    either rater actually used.
    """
    a, b = check_pair(r1, r2)
    cats = np.union1d(a, b)
    n = a.size
    agreed = int((a == b).sum())
    n1 = (a[:, None] == cats).sum(axis=0)
    n2 = (b[:, None] == cats).sum(axis=0)
    chance = int((n1 * n2).sum())  # p_e * n**2
    p_o = agreed / n
    p_e = chance / (n * n)
    if chance == n * n:
        return AgreementStats(None, p_o, p_e, agreed, n, "p_e = 1")
    # integer numerator and denominator, one rounding at the end
    kappa = (agreed * n - chance) / (n * n - chance)
    return AgreementStats(kappa, p_o, p_e, agreed, n)


def weighted_kappa(r1, r2, scheme: str = "quadratic", categories=SEVERITY_DOMAIN) -> WeightedAgreementStats:
    """Weighted Cohen's kappa, ``1 - sum(w*o) / sum(w*e)`` over the full domain.

    ``agreed``/``total`` count exact matches whatever the scheme.
    """
    table = contingency_table(r1, r2, categories)
    wm = weight_matrix(categories, scheme)
    n = table.n
    agreed = int(np.trace(table.observed))
    p_o = agreed / n
    p_e = float((table.row * table.col).sum()) / (n * n)
    w = wm.w
    if np.array_equal(w, np.round(w)):
        # integer weights: sum(w*o)/sum(w*e) == n*sum(w*O) / sum(w*row*col) exactly
        wi = w.astype(np.int64)
        obs_w = int((wi * table.observed).sum())
        exp_w = int((wi * np.outer(table.row, table.col)).sum())
        num, den = obs_w / n, exp_w / (n * n)
        kappa = (exp_w - n * obs_w) / exp_w if exp_w else None
    else:
        num = float((w * table.observed).sum()) / n
        den = float((w * table.expected).sum()) / n
        kappa = 1.0 - num / den if den else None
    if kappa is None:
        return WeightedAgreementStats(None, p_o, p_e, agreed, n, "sum(w*e) = 0", scheme, num, den)
    return WeightedAgreementStats(kappa, p_o, p_e, agreed, n, None, scheme, num, den)


def _as_table(table) -> np.ndarray:
    if isinstance(table, RatingsTable):
        return table.cells
    return check_ratings(table)


def fleiss_kappa(table) -> FleissStats:
    """Fleiss' kappa after listwise deletion of items with any missing cell."""
    cells = _as_table(table)
    rows = cells[~np.isnan(cells).any(axis=1)].astype(np.int64)
    n_raters = cells.shape[1]
    if rows.shape[0] == 0:
        raise RatingsError("no items rated by every rater")
    cats = np.unique(rows)
    counts = (rows[:, :, None] == cats).sum(axis=1)  # items x categories
    n_items = rows.shape[0]
    pair_agree = int((counts * (counts - 1)).sum())
    pair_total = n_items * n_raters * (n_raters - 1)
    totals = counts.sum(axis=0)
    sq = int((totals * totals).sum())
    n_ratings = n_items * n_raters
    p_bar = pair_agree / pair_total
    p_bar_e = sq / (n_ratings * n_ratings)
    if cats.size == 1:
        return FleissStats(None, p_bar, p_bar_e, n_items, n_raters, "P_e = 1")
    kappa = (pair_agree * n_ratings**2 - sq * pair_total) / (pair_total * (n_ratings**2 - sq))
    return FleissStats(kappa, p_bar, p_bar_e, n_items, n_raters)


def _delta2(values: np.ndarray, marginals: np.ndarray, metric: str) -> np.ndarray:
    if metric == "nominal":
        return (values[:, None] != values[None, :]).astype(float)
    if metric == "interval":
        return (values[:, None] - values[None, :]) ** 2
    if metric == "ordinal":
        cum = np.concatenate([[0.0], np.cumsum(marginals)])
        lo = np.minimum.outer(np.arange(values.size), np.arange(values.size))
        hi = np.maximum.outer(np.arange(values.size), np.arange(values.size))
        spans = cum[hi + 1] - cum[lo]
        return (spans - (marginals[:, None] + marginals[None, :]) / 2.0) ** 2
    raise ValueError(f"unknown metric {metric!r}; expected one of {ALPHA_METRICS}")


def krippendorff_alpha(table, metric: str = "nominal") -> AlphaStats:
    """Krippendorff's alpha from the coincidence matrix.

    Missing cells are handled natively; items with fewer than two ratings
    are not pairable and are ignored.
    """
    if metric not in ALPHA_METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {ALPHA_METRICS}")
    cells = _as_table(table)
    present = ~np.isnan(cells)
    m_u = present.sum(axis=1)
    usable = m_u >= 2
    if not usable.any():
        raise RatingsError("no item has two or more ratings")
    cells, present, m_u = cells[usable], present[usable], m_u[usable]

    values = np.unique(cells[present])
    # per-item value counts: items x values
    counts = (np.where(present, cells, np.inf)[:, :, None] == values).sum(axis=1).astype(float)
    weighted = counts / (m_u[:, None] - 1.0)
    coincidence = counts.T @ weighted - np.diag(weighted.sum(axis=0))
    n_c = coincidence.sum(axis=1)
    n = float(n_c.sum())
    d2 = _delta2(values, n_c, metric)
    d_o = float((coincidence * d2).sum()) / n
    d_e = float((np.outer(n_c, n_c) * d2).sum()) / (n * (n - 1.0))
    n_items = int(usable.sum())
    if values.size == 1:
        return AlphaStats(None, d_o, d_e, metric, n_items, int(n), "D_e = 0")
    return AlphaStats(1.0 - d_o / d_e, d_o, d_e, metric, n_items, int(n))


def multi_rater_stats(table, metric: str = "nominal") -> MultiRaterStats:
    return MultiRaterStats(fleiss_kappa(table), krippendorff_alpha(table, metric))
