"""scikit-learn style wrappers around the agreement coefficients.

``fit`` takes an items x raters matrix (NaN or None for a missing cell) and
stores the result in trailing-underscore attributes; ``score`` returns the
coefficient for new data, NaN when it is undefined. ``RatingsExtractor``
turns a dataset of sessions into such a matrix so the two compose in a
``sklearn.pipeline.Pipeline``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ..catalog import heuristic_catalog
from ..schema import as_dataset
from . import analysis
from ._validation import check_ratings
from .coefficients import (
    SEVERITY_DOMAIN,
    cohen_kappa,
    fleiss_kappa,
    krippendorff_alpha,
    weighted_kappa,
)

__all__ = [
    "AgreementAnalysis",
    "CohenKappa",
    "FleissKappa",
    "KrippendorffAlpha",
    "RatingsExtractor",
]


def _nan_if_none(x):
    return float("nan") if x is None else x


class CohenKappa(BaseEstimator):
    """Two-rater kappa; ``weights=None`` is the unweighted coefficient.

    Either ``fit(X)`` with a two-column matrix or ``fit(r1, r2)``.
    """

    def __init__(self, weights=None, categories=SEVERITY_DOMAIN):
        self.weights = weights
        self.categories = categories

    def _compute(self, X, y=None):
        if y is None:
            arr = check_ratings(X, n_raters=2)
            r1, r2 = arr[:, 0], arr[:, 1]
        else:
            r1, r2 = X, y
        if self.weights is None:
            return cohen_kappa(r1, r2)
        return weighted_kappa(r1, r2, self.weights, self.categories)

    def fit(self, X, y=None):
        self.stats_ = self._compute(X, y)
        self.kappa_ = self.stats_.kappa
        self.n_items_ = self.stats_.total
        return self

    def score(self, X, y=None):
        return _nan_if_none(self._compute(X, y).kappa)


class FleissKappa(BaseEstimator):
    def fit(self, X, y=None):
        self.stats_ = fleiss_kappa(check_ratings(X))
        self.kappa_ = self.stats_.kappa
        self.n_items_ = self.stats_.n_items
        return self

    def score(self, X, y=None):
        return _nan_if_none(fleiss_kappa(check_ratings(X)).kappa)


class KrippendorffAlpha(BaseEstimator):
    def __init__(self, metric="nominal"):
        self.metric = metric

    def fit(self, X, y=None):
        self.stats_ = krippendorff_alpha(check_ratings(X), self.metric)
        self.alpha_ = self.stats_.alpha
        self.n_items_ = self.stats_.n_items
        return self

    def score(self, X, y=None):
        return _nan_if_none(krippendorff_alpha(check_ratings(X), self.metric).alpha)


class RatingsExtractor(TransformerMixin, BaseEstimator):
    """Dataset of sessions -> items x sessions matrix of issue flags or severities."""

    def __init__(self, field="issue"):
        self.field = field

    def fit(self, X, y=None):
        table = analysis.ratings_table(X, self.field)
        self.items_ = table.items
        self.raters_ = table.raters
        return self

    def transform(self, X):
        check_is_fitted(self, "items_")
        ds = as_dataset(X)
        sites = list(dict.fromkeys(site for site, _ in self.items_))
        table = analysis.ratings_table(ds, self.field, sites=sites)
        out = np.full((len(self.items_), len(self.raters_)), np.nan)
        row = {item: i for i, item in enumerate(table.items)}
        col = {r: j for j, r in enumerate(table.raters)}
        for i, item in enumerate(self.items_):
            if item not in row:
                continue
            for j, r in enumerate(self.raters_):
                if r in col:
                    out[i, j] = table.cells[row[item], col[r]]
        return out


class AgreementAnalysis(BaseEstimator):
    """Runs every dataset-level analysis; results land in ``*_`` attributes."""

    def __init__(self, weights="quadratic", alpha_metric="nominal", per_site_pair=(1, 2)):
        self.weights = weights
        self.alpha_metric = alpha_metric
        self.per_site_pair = per_site_pair

    def fit(self, X, y=None):
        ds = as_dataset(X)
        self.pairs_ = analysis.session_pairs(ds)
        self.severity_histogram_ = analysis.severity_histogram(ds)
        self.issue_frequency_ = analysis.issue_frequency(ds)
        self.pairwise_issue_ = analysis.pairwise_issue_agreement(ds, self.pairs_)
        if ds.eligible_sites:
            self.multi_rater_ = analysis.multi_rater_issue_agreement(ds, self.alpha_metric)
            self.transposed_alpha_ = analysis.transposed_alpha(ds, self.alpha_metric)
        else:
            self.multi_rater_ = None
            self.transposed_alpha_ = None
        self.pairwise_severity_ = analysis.pairwise_severity_agreement(ds, self.weights, self.pairs_)
        self.per_site_weighted_ = analysis.per_site_weighted_kappa(ds, tuple(self.per_site_pair), self.weights)
        self.per_heuristic_ = analysis.per_heuristic_kappa(ds, self.pairs_)
        self.heuristics_ = [h.canonical_name for h in heuristic_catalog()]
        self.excluded_sites_ = ds.insufficient_sites
        return self
