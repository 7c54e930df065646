"""Input checks shared by the coefficient functions and estimators."""

from __future__ import annotations

import numpy as np

from ..errors import RatingsError


def _to_float_array(values) -> np.ndarray:
    if isinstance(values, np.ndarray) and values.dtype.kind in "fiub":
        return values.astype(float)
    arr = np.array(
        [[np.nan if v is None else v for v in row] for row in values]
        if _is_nested(values)
        else [np.nan if v is None else v for v in values],
        dtype=object,
    )
    try:
        return arr.astype(float)
    except (TypeError, ValueError) as exc:
        raise RatingsError(f"ratings must be numeric category codes or missing: {exc}") from None


def _is_nested(values) -> bool:
    for v in values:
        return isinstance(v, (list, tuple, np.ndarray))
    return False


def _check_integral(arr: np.ndarray) -> None:
    present = arr[~np.isnan(arr)]
    if np.isinf(present).any() or (present != np.round(present)).any():
        raise RatingsError("ratings must be integer category codes")


def check_vector(values, name="ratings") -> np.ndarray:
    """1-D float array, NaN marking missing cells."""
    arr = _to_float_array(values)
    if arr.ndim != 1:
        raise RatingsError(f"{name} must be one-dimensional, got shape {arr.shape}")
    _check_integral(arr)
    return arr


def check_pair(r1, r2) -> tuple[np.ndarray, np.ndarray]:
    """Validate two rating vectors and keep only the pairwise-complete cases."""
    a, b = check_vector(r1, "r1"), check_vector(r2, "r2")
    if a.shape != b.shape:
        raise RatingsError(f"length mismatch: {a.size} != {b.size}")
    keep = ~(np.isnan(a) | np.isnan(b))
    if not keep.any():
        raise RatingsError("no pairwise-complete ratings")
    return a[keep].astype(np.int64), b[keep].astype(np.int64)


def check_ratings(X, min_raters: int = 2, n_raters: int | None = None) -> np.ndarray:
    """2-D items x raters float array with NaN for missing cells."""
    arr = _to_float_array(X)
    if arr.ndim != 2:
        raise RatingsError(f"expected an items x raters matrix, got shape {arr.shape}")
    if n_raters is not None and arr.shape[1] != n_raters:
        raise RatingsError(f"expected exactly {n_raters} raters, got {arr.shape[1]}")
    if arr.shape[1] < min_raters:
        raise RatingsError(f"need at least {min_raters} raters, got {arr.shape[1]}")
    _check_integral(arr)
    return arr


def check_domain(values: np.ndarray, domain) -> None:
    present = values[~np.isnan(values)] if values.dtype.kind == "f" else values
    bad = sorted(set(np.unique(present).tolist()) - set(domain))
    if bad:
        raise RatingsError(f"values {bad} outside category domain {list(domain)}")
