import json

import hypothesis.strategies as st
import pytest
from builders import response
from hypothesis import given, settings

from heurikappa.client import FAULT_MODES, MockBackend
from heurikappa.errors import UnparseableResponseError
from heurikappa.schema import (
    Dataset,
    ExclusionRecord,
    extract_json,
    parse_evaluation,
    parse_or_exclude,
    parse_severity,
    validate_dataset,
)

APPENDIX_ENTRY = {
    "Heuristic": "Visibility of system status",
    "SeverityRating": 3,
    "IssueFound": True,
    "IssueDescription": "No loading indicator while the cart updates.",
    "CodeReference": "cart.js: Line 40-52",
    "CodeSnippet": "fetch('/cart')",
    "EvaluationAnswers": {"Does the system show progress?": "No."},
    "Recommendation": "Show a spinner.",
}


def reasons(session):
    return [(x.reason, x.scope) for x in session.exclusions]


def test_single_valid_entry():
    s = parse_evaluation(json.dumps([APPENDIX_ENTRY]), "a", 1)
    assert len(s.entries) == 1 and not s.exclusions
    e = s.entries[0]
    assert e.heuristic.slug == "visibility-of-system-status"
    assert (e.severity, e.issue_found) == (3, True)
    assert e.evaluation_answers == APPENDIX_ENTRY["EvaluationAnswers"]
    assert e.raw == APPENDIX_ENTRY


def test_malformed_severity_split_keeps_issue_flag():
    s = parse_evaluation(json.dumps(response([("Error prevention", True, "high")])), "a", 1)
    assert reasons(s) == [("malformed_severity", "severity")]
    assert s.entries[0].severity is None and s.entries[0].issue_found is True
    assert s.severity_valid == []


def test_malformed_severity_strict_drops_entry():
    s = parse_evaluation(json.dumps(response([("Error prevention", True, "high")])), "a", 1, policy="strict")
    assert reasons(s) == [("malformed_severity", "entry")]
    assert s.entries == ()


def test_missing_severity():
    s = parse_evaluation(json.dumps(response([("Error prevention", True, None)])), "a", 1)
    assert reasons(s) == [("missing_severity", "severity")]


def test_bad_issue_flag_with_bad_severity_drops_entry():
    s = parse_evaluation(json.dumps(response([("Error prevention", "yes", "high")])), "a", 1)
    assert reasons(s) == [("malformed_severity", "entry")]
    assert s.entries == ()


def test_non_boolean_issue_flag_keeps_severity():
    s = parse_evaluation(json.dumps(response([("Error prevention", "true", 2)])), "a", 1)
    assert reasons(s) == [("unparseable_entry", "issue")]
    assert s.entries[0].severity == 2 and s.entries[0].issue_found is None


@pytest.mark.parametrize("value, expected", [
    (0, (0, None)), (4, (4, None)), (" 3 ", (3, None)), (2.0, (2, None)),
    (2.5, (None, "malformed_severity")), ("2.0", (None, "malformed_severity")),
    (5, (None, "malformed_severity")), (-1, (None, "malformed_severity")),
    (True, (None, "malformed_severity")), ("high", (None, "malformed_severity")),
    ([], (None, "malformed_severity")), (None, (None, "missing_severity")), ("", (None, "missing_severity")),
])
def test_parse_severity(value, expected):
    assert parse_severity(value) == expected


def test_duplicate_keeps_first():
    raw = response([("Error prevention", True, 2), ("error prevention", False, 0), ("Help and documentation", False, 0)])
    s = parse_evaluation(json.dumps(raw), "a", 1)
    assert [e.heuristic.slug for e in s.entries] == ["error-prevention", "help-and-documentation"]
    assert s.entries[0].severity == 2
    assert reasons(s) == [("duplicate_heuristic", "entry")]


def test_unrecognized_and_non_object_entries():
    raw = response([("Discoverability", True, 2)]) + [42, {"SeverityRating": 1}]
    s = parse_evaluation(json.dumps(raw), "a", 1)
    assert s.entries == ()
    assert [r for r, _ in reasons(s)] == ["unrecognized_heuristic", "unparseable_entry", "unparseable_entry"]
    assert s.raw_entry_count == 3


def test_semantic_inconsistency_flagged_not_repaired():
    s = parse_evaluation(json.dumps(response([("Error prevention", False, 3)])), "a", 1)
    assert reasons(s) == [("semantic_inconsistency", "flag")]
    assert s.entries[0].severity == 3 and s.entries[0].issue_found is False


def test_prose_and_fences_stripped():
    body = json.dumps([APPENDIX_ENTRY])
    for text in (f"```json\n{body}\n```", f"Sure! Here it is:\n```\n{body}\n```\nThanks.", f"Result: {body} -- end"):
        assert len(parse_evaluation(text, "a", 1).entries) == 1


def test_object_wrappers_accepted():
    assert len(parse_evaluation(json.dumps(APPENDIX_ENTRY), "a", 1).entries) == 1
    assert len(parse_evaluation(json.dumps({"evaluations": [APPENDIX_ENTRY]}), "a", 1).entries) == 1
    keyed = {"Error Prevention": {"SeverityRating": 1, "IssueFound": True}}
    assert parse_evaluation(json.dumps(keyed), "a", 1).entries[0].heuristic.slug == "error-prevention"


def test_plain_prose_is_unparseable():
    with pytest.raises(UnparseableResponseError):
        parse_evaluation("The site looks fine overall.", "a", 1)
    s = parse_or_exclude("The site looks fine overall.", "a", 1)
    assert s.unparseable and s.entries == ()
    assert reasons(s) == [("unparseable_entry", "session")]


def test_exclusion_record_vocabulary():
    with pytest.raises(ValueError):
        ExclusionRecord("x", "bad_reason")
    with pytest.raises(ValueError):
        ExclusionRecord("x", "missing_severity", scope="everything")
    rec = ExclusionRecord("x", "missing_severity", "d", "severity", {"a": 1})
    assert ExclusionRecord.from_json(rec.to_json()) == rec


@pytest.mark.parametrize("mode", FAULT_MODES)
def test_mock_fault_modes(mode):
    text = MockBackend(seed=7, fault_mode=mode).render("site-01", 1)
    s = parse_or_exclude(text, "site-01", 1)
    found = {r for r, _ in reasons(s)}
    if mode == "none" or mode == "prose_wrapper":
        assert len(s.entries) == 10 and not s.exclusions
    elif mode == "malformed_severity":
        assert found == {"malformed_severity"} and len(s.severity_valid) == 9
    elif mode == "duplicate_heuristic":
        assert json.loads(text).__len__() == 11
        assert found == {"duplicate_heuristic"} and len(s.entries) == 10
    else:
        assert s.unparseable


def test_validate_empty_and_clean():
    empty = validate_dataset([])
    assert (empty.expected_entries, empty.valid_severity, empty.total_exclusions) == (0, 0, 0)
    mock = MockBackend(seed=1)
    sessions = [parse_evaluation(mock.render("one", k), "one", k) for k in (1, 2, 3)]
    summary = validate_dataset(sessions)
    assert (summary.expected_entries, summary.valid_severity, summary.total_exclusions) == (30, 30, 0)
    assert summary.per_site["one"][2]["valid_severity"] == 10


def test_dataset_rejects_duplicate_sessions():
    s = parse_evaluation(json.dumps([APPENDIX_ENTRY]), "a", 1)
    with pytest.raises(ValueError):
        Dataset((s, s))


entry_values = st.one_of(st.none(), st.booleans(), st.integers(-2, 6), st.floats(allow_nan=False, allow_infinity=False),
                         st.text(max_size=8), st.sampled_from(["3", " 2 ", "high", "Error Prevention"]))
names = st.one_of(st.sampled_from(["Error prevention", "help and documentation", "H1: visibility of system status",
                                   "Discoverability", ""]), st.text(max_size=20), st.integers())
entries = st.one_of(
    st.fixed_dictionaries({"Heuristic": names, "SeverityRating": entry_values, "IssueFound": entry_values}),
    st.dictionaries(st.text(max_size=5), entry_values, max_size=3),
    entry_values,
)


@settings(max_examples=500, deadline=None)
@given(st.lists(entries, max_size=14), st.sampled_from(["split", "strict"]))
def test_conservation(items, policy):
    s = parse_evaluation(json.dumps(items), "a", 1, policy)
    # every raw entry is kept or dropped with an entry-scoped record, never both
    assert s.raw_entry_count == len(items)
    slugs = [e.heuristic.slug for e in s.entries]
    assert len(slugs) == len(set(slugs))
    for e in s.entries:
        assert e.severity is None or 0 <= e.severity <= 4


@settings(max_examples=500, deadline=None)
@given(st.text(max_size=200))
def test_parse_is_total(text):
    s = parse_or_exclude(text, "a", 1)
    assert s.unparseable or s.raw_entry_count >= 0
    try:
        extract_json(text)
    except UnparseableResponseError:
        pass
