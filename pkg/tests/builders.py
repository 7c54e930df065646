"""Small constructors for hand-built datasets and evaluator replies."""

import json

from heurikappa.catalog import heuristic_catalog
from heurikappa.schema import Dataset, HeuristicEvaluation, SessionEvaluation

CATALOG = heuristic_catalog()


def session(site, k, issues, severities=None):
    severities = severities if severities is not None else [int(bool(i)) for i in issues]
    entries = tuple(
        HeuristicEvaluation(h, sev, issue)
        for h, issue, sev in zip(CATALOG, issues, severities)
    )
    return SessionEvaluation(site, k, entries)


def dataset(spec):
    """spec: {site: {k: (issues, severities)}}; severities may be None."""
    return Dataset(tuple(
        session(site, k, issues, sev)
        for site, sessions in spec.items()
        for k, (issues, sev) in sessions.items()
    ))


def response(entries):
    """JSON-ready entry dicts for (name, issue, severity) triples."""
    return [
        {"Heuristic": name, "IssueFound": issue, "SeverityRating": sev,
         "IssueDescription": "", "CodeReference": "", "CodeSnippet": "",
         "EvaluationAnswers": {}, "Recommendation": ""}
        for name, issue, sev in entries
    ]


NAMES = [h.canonical_name for h in heuristic_catalog()] + ["Discoverability", "error prevention"]
SEVERITIES = [0, 1, 2, 3, 4, 4, 2, "high", None, "3", 2.5, True]
ISSUES = [True, False, True, False, "yes", None]


def random_response(rng):
    """Evaluator-like reply text with every failure class mixed in."""
    if rng.random() < 0.05:
        return "Sorry, I could not evaluate this site."
    items = []
    for _ in range(rng.randint(0, 13)):
        if rng.random() < 0.03:
            items.append(rng.choice([7, "text", ["nested"]]))
            continue
        items.append({
            "Heuristic": rng.choice(NAMES),
            "SeverityRating": rng.choice(SEVERITIES),
            "IssueFound": rng.choice(ISSUES),
            "IssueDescription": "".join(rng.choice("abc <>&\"é\n") for _ in range(rng.randint(0, 12))),
            "CodeReference": f"index.html: Line {rng.randint(1, 99)}",
            "CodeSnippet": "<div>",
            "EvaluationAnswers": {"Q1": rng.choice(["yes", "no", ""])},
            "Recommendation": "",
        })
    text = json.dumps(items)
    return f"```json\n{text}\n```" if rng.random() < 0.2 else text
