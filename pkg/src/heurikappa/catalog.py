"""Nielsen's ten usability heuristics, the severity scale and the evaluator prompt."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import UnrecognizedHeuristicError

__all__ = [
    "RESPONSE_FIELDS",
    "SEVERITY_LABELS",
    "SEVERITY_LEVELS",
    "HeuristicId",
    "build_instructions",
    "canonicalize_heuristic",
    "heuristic_catalog",
    "slugify",
]


@dataclass(frozen=True)
class HeuristicId:
    canonical_name: str
    slug: str

    def __str__(self):
        return self.canonical_name


_CANONICAL_NAMES = (
    "Visibility Of System Status",
    "Match System And Real World",
    "User Control And Freedom",
    "Consistency And Standards",
    "Error Prevention",
    "Recognition Rather Than Recall",
    "Flexibility And Efficiency Of Use",
    "Aesthetic And Minimalist Design",
    "Help Users Recognize Errors",
    "Help And Documentation",
)

SEVERITY_LABELS = {
    0: "No Issue",
    1: "Cosmetic",
    2: "Minor",
    3: "Major",
    4: "Catastrophic",
}
SEVERITY_LEVELS = tuple(SEVERITY_LABELS)

# Field names of one evaluation object, in the order the evaluator is asked to emit them.
RESPONSE_FIELDS = (
    "Heuristic",
    "SeverityRating",
    "IssueFound",
    "IssueDescription",
    "CodeReference",
    "CodeSnippet",
    "EvaluationAnswers",
    "Recommendation",
)


def slugify(text: str) -> str:
    """Lowercase, drop punctuation, collapse whitespace and join words with hyphens."""
    text = text.lower().replace("&", " and ")
    text = re.sub(r"[^a-z0-9]+", " ", text)
    return "-".join(text.split())


_CATALOG = tuple(HeuristicId(name, slugify(name)) for name in _CANONICAL_NAMES)
_BY_SLUG = {h.slug: h for h in _CATALOG}

# Long-form and common variant phrasings, keyed by slug.
_ALIASES = {
    "visibility-of-the-system-status": "visibility-of-system-status",
    "system-status-visibility": "visibility-of-system-status",
    "match-between-system-and-the-real-world": "match-system-and-real-world",
    "match-between-system-and-real-world": "match-system-and-real-world",
    "match-between-the-system-and-the-real-world": "match-system-and-real-world",
    "match-system-and-the-real-world": "match-system-and-real-world",
    "user-control-and-freedoms": "user-control-and-freedom",
    "consistency-and-standard": "consistency-and-standards",
    "recognition-instead-of-recall": "recognition-rather-than-recall",
    "flexibility-and-efficiency": "flexibility-and-efficiency-of-use",
    "aesthetic-and-minimal-design": "aesthetic-and-minimalist-design",
    "aesthetic-and-minimalistic-design": "aesthetic-and-minimalist-design",
    "aesthetics-and-minimalist-design": "aesthetic-and-minimalist-design",
    "help-users-recognize-diagnose-and-recover-from-errors": "help-users-recognize-errors",
    "help-users-recognise-diagnose-and-recover-from-errors": "help-users-recognize-errors",
    "help-users-recognize-diagnose-recover-from-errors": "help-users-recognize-errors",
    "help-users-recognize-and-recover-from-errors": "help-users-recognize-errors",
    "error-recognition-diagnosis-and-recovery": "help-users-recognize-errors",
    "help-and-documentations": "help-and-documentation",
}

# "1.", "H1:", "#3 -" style enumeration prefixes
_ENUM_PREFIX = re.compile(r"^\s*(?:#?h?\d{1,2})[\s.:)\-]+", re.IGNORECASE)


def heuristic_catalog() -> list[HeuristicId]:
    return list(_CATALOG)


def canonicalize_heuristic(raw_name: str) -> HeuristicId:
    """Map a heuristic name as written by an evaluator onto the catalog.

    Matching is exact after normalization, against canonical slugs and a
    fixed alias table; there is no fuzzy fallback.

    >>> canonicalize_heuristic("Visibility of system status").slug
    'visibility-of-system-status'
    """
    if not isinstance(raw_name, str) or not raw_name.strip():
        raise UnrecognizedHeuristicError(raw_name)
    slug = slugify(_ENUM_PREFIX.sub("", raw_name, count=1))
    slug = _ALIASES.get(slug, slug)
    try:
        return _BY_SLUG[slug]
    except KeyError:
        raise UnrecognizedHeuristicError(raw_name) from None


_HEURISTIC_LIST = "\n".join(f"{i}. {h.canonical_name}" for i, h in enumerate(_CATALOG, 1))
_SEVERITY_LIST = "\n".join(f"{k} = {v}" for k, v in SEVERITY_LABELS.items())

_INSTRUCTIONS = f"""\
You are a usability evaluation expert specializing in website usability based on code analysis.
The user message contains the source code of one website (HyperText Markup Language (HTML),
Cascading Style Sheets (CSS), JavaScript (JS)). Each file starts with a header line of the form
"==== FILE: <path> ====".

Perform a detailed heuristic evaluation based on Jakob Nielsen's 10 usability heuristics:
{_HEURISTIC_LIST}

For each heuristic, you will:
- Assign a SeverityRating (0 through 4)
- Indicate IssueFound (true/false)
- Write an IssueDescription
- Provide CodeReference (file name(s) and line number(s))
- Provide a CodeSnippet
- Complete EvaluationAnswers (with explanations)
- Offer a clear Recommendation

Severity scale:
{_SEVERITY_LIST}

If no issue is found, SeverityRating must be 0, IssueFound must be false, and the text fields
must hold the placeholder "N/A". SeverityRating must be an integer literal, never text.

Always return a single, clean, valid JSON object for all 10 heuristics: a JSON array holding
exactly one object per heuristic, without skipping any heuristic, repeating a heuristic or
reusing responses. Use professional, detailed language. Do not proceed unless source code is
provided. Verify internally that all heuristics are evaluated and the JSON is valid before
replying. Reply with the JSON array only, with no surrounding prose and no code fences.

The format must always be:
[
  {{
    "Heuristic": "Heuristic",
    "SeverityRating": 0,
    "IssueFound": false,
    "IssueDescription": "Issue Description",
    "CodeReference": "Code reference",
    "CodeSnippet": "Code snippet",
    "EvaluationAnswers": {{"Question": "Answer with explanation"}},
    "Recommendation": "Clear and actionable recommendation."
  }}
]
"""


def build_instructions() -> str:
    return _INSTRUCTIONS
