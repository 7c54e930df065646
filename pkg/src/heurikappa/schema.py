"""Parse evaluator responses into validated per-session evaluations.

Nothing in a response is dropped silently: every raw entry ends up either as
a usable :class:`HeuristicEvaluation` or as an :class:`ExclusionRecord` (and
entries whose severity is unusable but whose issue flag is fine become both,
with the record scoped to severity analysis only).
"""

from __future__ import annotations

import json
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Any

from .catalog import HeuristicId, canonicalize_heuristic, heuristic_catalog
from .errors import UnparseableResponseError, UnrecognizedHeuristicError

__all__ = [
    "EXCLUSION_POLICIES",
    "EXCLUSION_REASONS",
    "EXCLUSION_SCOPES",
    "Dataset",
    "ExclusionRecord",
    "HeuristicEvaluation",
    "SessionEvaluation",
    "ValidationSummary",
    "as_dataset",
    "extract_json",
    "parse_evaluation",
    "parse_or_exclude",
    "parse_severity",
    "validate_dataset",
]

EXCLUSION_REASONS = (
    "malformed_severity",
    "missing_severity",
    "unrecognized_heuristic",
    "duplicate_heuristic",
    "semantic_inconsistency",
    "unparseable_entry",
)
# entry: dropped entirely; severity: kept for issue analysis only;
# issue: kept for severity analysis only; flag: kept, annotated;
# session: the whole response was unreadable
EXCLUSION_SCOPES = ("entry", "severity", "issue", "flag", "session")
# split keeps entries with a bad severity for issue-presence analysis; strict drops them
EXCLUSION_POLICIES = ("split", "strict")


@dataclass(frozen=True)
class HeuristicEvaluation:
    heuristic: HeuristicId
    severity: int | None
    issue_found: bool | None
    issue_description: str = ""
    code_reference: str = ""
    code_snippet: str = ""
    evaluation_answers: dict = field(default_factory=dict)
    recommendation: str = ""
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def inconsistent(self) -> bool:
        return self.issue_found is False and self.severity is not None and self.severity > 0


@dataclass(frozen=True)
class ExclusionRecord:
    heuristic_raw_name: str
    reason: str
    detail: str = ""
    scope: str = "entry"
    raw: Any = field(default=None, repr=False)

    def __post_init__(self):
        if self.reason not in EXCLUSION_REASONS:
            raise ValueError(f"unknown exclusion reason {self.reason!r}")
        if self.scope not in EXCLUSION_SCOPES:
            raise ValueError(f"unknown exclusion scope {self.scope!r}")

    def to_json(self) -> dict:
        return {
            "heuristic_raw_name": self.heuristic_raw_name,
            "reason": self.reason,
            "scope": self.scope,
            "detail": self.detail,
            "raw": self.raw,
        }

    @classmethod
    def from_json(cls, obj: dict) -> ExclusionRecord:
        return cls(obj["heuristic_raw_name"], obj["reason"], obj.get("detail", ""),
                   obj.get("scope", "entry"), obj.get("raw"))


@dataclass(frozen=True)
class SessionEvaluation:
    site_id: str
    session_index: int
    entries: tuple[HeuristicEvaluation, ...] = ()
    exclusions: tuple[ExclusionRecord, ...] = ()
    unparseable: bool = False

    def entry(self, heuristic: HeuristicId | str) -> HeuristicEvaluation | None:
        slug = heuristic if isinstance(heuristic, str) else heuristic.slug
        for e in self.entries:
            if e.heuristic.slug == slug:
                return e
        return None

    @property
    def severity_valid(self) -> list[HeuristicEvaluation]:
        return [e for e in self.entries if e.severity is not None]

    @property
    def raw_entry_count(self) -> int:
        """Entries the response contained: kept ones plus those dropped outright."""
        return len(self.entries) + sum(1 for x in self.exclusions if x.scope == "entry")


_FENCE = re.compile(r"^\s*```[A-Za-z0-9_-]*[ \t]*\n(.*?)\n?```\s*$", re.DOTALL)
_INNER_FENCE = re.compile(r"```[A-Za-z0-9_-]*[ \t]*\n(.*?)\n?```", re.DOTALL)


def extract_json(text: str) -> Any:
    """Recover the JSON value in an evaluator reply.

    Tries the text as-is, then the body of a single fenced code block, then
    the outermost ``[...]`` (or ``{...}``) span. Raises
    UnparseableResponseError when none of these parse.
    """
    if not isinstance(text, str) or not text.strip():
        raise UnparseableResponseError("empty response")
    candidates = [text.strip()]
    m = _FENCE.match(text)
    if m:
        candidates.append(m.group(1))
    else:
        blocks = _INNER_FENCE.findall(text)
        if len(blocks) == 1:
            candidates.append(blocks[0])
    for open_ch, close_ch in (("[", "]"), ("{", "}")):
        start, end = text.find(open_ch), text.rfind(close_ch)
        if 0 <= start < end:
            candidates.append(text[start:end + 1])
    for cand in candidates:
        try:
            return json.loads(cand)
        except (json.JSONDecodeError, ValueError):
            continue
    raise UnparseableResponseError("no JSON value could be recovered from the response")


def _as_entry_list(value: Any) -> list:
    if isinstance(value, list):
        return value
    if isinstance(value, dict):
        if "Heuristic" in value:
            return [value]
        lists = [v for v in value.values() if isinstance(v, list)]
        if len(lists) == 1 and len(value) == 1:
            return lists[0]
        if value and all(isinstance(v, dict) for v in value.values()):
            # {"<heuristic name>": {...}, ...}
            return [{"Heuristic": k, **v} if "Heuristic" not in v else v for k, v in value.items()]
    raise UnparseableResponseError(f"expected a JSON array of evaluations, got {type(value).__name__}")


_INT_LITERAL = re.compile(r"^[+-]?\d+$")


def parse_severity(value: Any) -> tuple[int | None, str | None]:
    """Return (severity, problem) where problem is a reason code or None.

    Accepts integers 0..4, integral floats and trimmed integer literals in
    strings. Nothing is rounded.
    """
    if value is None:
        return None, "missing_severity"
    if isinstance(value, bool):
        return None, "malformed_severity"
    if isinstance(value, int):
        n = value
    elif isinstance(value, float):
        if not value.is_integer():
            return None, "malformed_severity"
        n = int(value)
    elif isinstance(value, str):
        s = value.strip()
        if not s:
            return None, "missing_severity"
        if not _INT_LITERAL.match(s):
            return None, "malformed_severity"
        n = int(s)
    else:
        return None, "malformed_severity"
    if not 0 <= n <= 4:
        return None, "malformed_severity"
    return n, None


def _text(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return json.dumps(value, ensure_ascii=False, sort_keys=True)


def _raw_name(obj: Any) -> str:
    if isinstance(obj, dict):
        name = obj.get("Heuristic")
        return name if isinstance(name, str) else _text(name)
    return ""


def _parse_entries(items: list, policy: str):
    entries: list[HeuristicEvaluation] = []
    records: list[ExclusionRecord] = []
    seen: set[str] = set()
    for obj in items:
        name = _raw_name(obj)
        if not isinstance(obj, dict) or "Heuristic" not in obj:
            records.append(ExclusionRecord(name, "unparseable_entry", "entry is not an object with a Heuristic field", "entry", obj))
            continue
        try:
            hid = canonicalize_heuristic(obj["Heuristic"])
        except UnrecognizedHeuristicError:
            records.append(ExclusionRecord(name, "unrecognized_heuristic", f"no catalog match for {name!r}", "entry", obj))
            continue
        if hid.slug in seen:
            records.append(ExclusionRecord(name, "duplicate_heuristic", f"{hid.canonical_name} already evaluated earlier in the response", "entry", obj))
            continue
        seen.add(hid.slug)

        severity, sev_problem = parse_severity(obj.get("SeverityRating"))
        issue = obj.get("IssueFound")
        issue_ok = isinstance(issue, bool)
        if sev_problem and (policy == "strict" or not issue_ok):
            records.append(ExclusionRecord(name, sev_problem, f"SeverityRating={obj.get('SeverityRating')!r}", "entry", obj))
            continue
        if sev_problem:
            records.append(ExclusionRecord(name, sev_problem, f"SeverityRating={obj.get('SeverityRating')!r}", "severity", obj))
        if not issue_ok:
            records.append(ExclusionRecord(name, "unparseable_entry", f"IssueFound={issue!r} is not a boolean", "issue", obj))

        answers = obj.get("EvaluationAnswers")
        entry = HeuristicEvaluation(
            heuristic=hid,
            severity=severity,
            issue_found=issue if issue_ok else None,
            issue_description=_text(obj.get("IssueDescription")),
            code_reference=_text(obj.get("CodeReference")),
            code_snippet=_text(obj.get("CodeSnippet")),
            evaluation_answers=dict(answers) if isinstance(answers, dict) else {},
            recommendation=_text(obj.get("Recommendation")),
            raw=obj,
        )
        if entry.inconsistent:
            records.append(ExclusionRecord(name, "semantic_inconsistency",
                                           f"IssueFound=false with SeverityRating={severity}", "flag", None))
        entries.append(entry)
    return entries, records


def parse_evaluation(raw, site_id: str, session_index: int, policy: str = "split") -> SessionEvaluation:
    """Parse one evaluator reply (a BackendResponse or its raw text).

    Raises UnparseableResponseError if no JSON array can be recovered.
    """
    if policy not in EXCLUSION_POLICIES:
        raise ValueError(f"unknown exclusion policy {policy!r}")
    text = getattr(raw, "raw_text", raw)
    items = _as_entry_list(extract_json(text))
    entries, records = _parse_entries(items, policy)
    return SessionEvaluation(site_id, session_index, tuple(entries), tuple(records))


def parse_or_exclude(raw, site_id: str, session_index: int, policy: str = "split") -> SessionEvaluation:
    """Like parse_evaluation, but an unreadable reply becomes a fully excluded session."""
    try:
        return parse_evaluation(raw, site_id, session_index, policy)
    except UnparseableResponseError as exc:
        text = getattr(raw, "raw_text", raw)
        rec = ExclusionRecord("*", "unparseable_entry", str(exc), "session", text)
        return SessionEvaluation(site_id, session_index, (), (rec,), unparseable=True)


@dataclass(frozen=True)
class ValidationSummary:
    n_sites: int
    n_sessions: int
    expected_entries: int
    raw_entries: int
    usable_entries: int
    valid_severity: int
    valid_issue: int
    exclusions_by_reason: dict
    exclusions_by_scope: dict
    unparseable_sessions: int
    per_site: dict

    @property
    def excluded_severity(self) -> int:
        return self.expected_entries - self.valid_severity

    @property
    def total_exclusions(self) -> int:
        return sum(self.exclusions_by_reason.values())

    def to_json(self) -> dict:
        return {
            "n_sites": self.n_sites,
            "n_sessions": self.n_sessions,
            "expected_entries": self.expected_entries,
            "raw_entries": self.raw_entries,
            "usable_entries": self.usable_entries,
            "valid_severity": self.valid_severity,
            "valid_issue": self.valid_issue,
            "exclusions_by_reason": dict(self.exclusions_by_reason),
            "exclusions_by_scope": dict(self.exclusions_by_scope),
            "unparseable_sessions": self.unparseable_sessions,
            "per_site": {site: {str(k): v for k, v in sess.items()} for site, sess in self.per_site.items()},
        }


def validate_dataset(sessions) -> ValidationSummary:
    """Dataset-wide accounting of expected, usable and excluded entries."""
    sessions = list(sessions)
    n_heuristics = len(heuristic_catalog())
    by_reason: Counter = Counter({r: 0 for r in EXCLUSION_REASONS})
    by_scope: Counter = Counter({s: 0 for s in EXCLUSION_SCOPES})
    per_site: dict = defaultdict(dict)
    raw = usable = sev = issue = unparseable = 0
    for s in sessions:
        s_sev = len(s.severity_valid)
        s_issue = sum(1 for e in s.entries if e.issue_found is not None)
        reasons = Counter(x.reason for x in s.exclusions)
        by_reason.update(reasons)
        by_scope.update(x.scope for x in s.exclusions)
        raw += s.raw_entry_count
        usable += len(s.entries)
        sev += s_sev
        issue += s_issue
        unparseable += int(s.unparseable)
        per_site[s.site_id][s.session_index] = {
            "entries": len(s.entries),
            "valid_severity": s_sev,
            "valid_issue": s_issue,
            "exclusions": dict(sorted(reasons.items())),
            "unparseable": s.unparseable,
        }
    per_site_sorted = {k: dict(sorted(v.items())) for k, v in sorted(per_site.items())}
    return ValidationSummary(
        n_sites=len(per_site),
        n_sessions=len(sessions),
        expected_entries=len(sessions) * n_heuristics,
        raw_entries=raw,
        usable_entries=usable,
        valid_severity=sev,
        valid_issue=issue,
        exclusions_by_reason=dict(by_reason),
        exclusions_by_scope=dict(by_scope),
        unparseable_sessions=unparseable,
        per_site=per_site_sorted,
    )


@dataclass(frozen=True)
class Dataset:
    """Sessions of one run, sorted by site then session index."""

    sessions: tuple[SessionEvaluation, ...] = ()
    root: str | None = None

    def __post_init__(self):
        ordered = tuple(sorted(self.sessions, key=lambda s: (s.site_id, s.session_index)))
        keys = [(s.site_id, s.session_index) for s in ordered]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (site_id, session_index) in dataset")
        object.__setattr__(self, "sessions", ordered)

    def __iter__(self):
        return iter(self.sessions)

    def __len__(self):
        return len(self.sessions)

    def __getitem__(self, i):
        return self.sessions[i]

    @property
    def sites(self) -> list[str]:
        return sorted({s.site_id for s in self.sessions})

    def by_site(self) -> dict[str, dict[int, SessionEvaluation]]:
        out: dict = defaultdict(dict)
        for s in self.sessions:
            out[s.site_id][s.session_index] = s
        return dict(out)

    @property
    def insufficient_sites(self) -> list[str]:
        """Sites with fewer than two readable sessions; left out of agreement analyses."""
        return sorted(
            site for site, sess in self.by_site().items()
            if sum(1 for s in sess.values() if not s.unparseable) < 2
        )

    @property
    def eligible_sites(self) -> list[str]:
        bad = set(self.insufficient_sites)
        return [s for s in self.sites if s not in bad]


def as_dataset(sessions) -> Dataset:
    return sessions if isinstance(sessions, Dataset) else Dataset(tuple(sessions))
