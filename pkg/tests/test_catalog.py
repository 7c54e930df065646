import re

import pytest

from heurikappa.catalog import (
    RESPONSE_FIELDS,
    SEVERITY_LABELS,
    build_instructions,
    canonicalize_heuristic,
    heuristic_catalog,
    slugify,
)
from heurikappa.errors import UnrecognizedHeuristicError


def test_catalog_shape():
    cat = heuristic_catalog()
    assert len(cat) == 10
    assert cat[0].canonical_name == "Visibility Of System Status"
    assert cat[-1].canonical_name == "Help And Documentation"
    slugs = [h.slug for h in cat]
    assert len(set(slugs)) == 10
    assert all(re.fullmatch(r"[a-z0-9]+(-[a-z0-9]+)*", s) for s in slugs)


def test_severity_scale():
    assert SEVERITY_LABELS == {0: "No Issue", 1: "Cosmetic", 2: "Minor", 3: "Major", 4: "Catastrophic"}


def test_instructions_contract():
    text = build_instructions()
    assert text == build_instructions()
    for name in RESPONSE_FIELDS:
        assert name in text
    assert "Assign a SeverityRating (0 through 4)" in text
    assert "SeverityRating must be 0, IssueFound must be false" in text
    assert "Always return a single, clean, valid JSON object" in text


@pytest.mark.parametrize("raw, slug", [
    ("Visibility of system status", "visibility-of-system-status"),
    ("HELP AND DOCUMENTATION ", "help-and-documentation"),
    ("Match between system and the real world", "match-system-and-real-world"),
    ("Help users recognize, diagnose, and recover from errors", "help-users-recognize-errors"),
    ("Aesthetic & minimalist design", "aesthetic-and-minimalist-design"),
    ("Flexibility and efficiency of use", "flexibility-and-efficiency-of-use"),
    ("3. User control and freedom", "user-control-and-freedom"),
    ("H5: Error prevention", "error-prevention"),
])
def test_canonicalize(raw, slug):
    assert canonicalize_heuristic(raw).slug == slug


@pytest.mark.parametrize("raw", ["Discoverability", "", "   ", "Error"])
def test_unrecognized(raw):
    with pytest.raises(UnrecognizedHeuristicError) as exc:
        canonicalize_heuristic(raw)
    assert exc.value.raw_name == raw


def test_canonicalize_round_trips():
    for h in heuristic_catalog():
        assert canonicalize_heuristic(h.canonical_name) == h
        assert canonicalize_heuristic(h.slug) == h
        assert canonicalize_heuristic(canonicalize_heuristic(h.canonical_name.lower()).canonical_name) == h


def test_slugify():
    assert slugify("  Help  &  Docs!! ") == "help-and-docs"
