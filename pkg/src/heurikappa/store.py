"""Archive layout: ``<root>/<site_id>/eval<k>.json`` plus an exclusions sidecar."""

from __future__ import annotations

import json
import logging
import os
import re
import tempfile
from pathlib import Path

from .catalog import RESPONSE_FIELDS
from .errors import OverwriteRefusedError
from .schema import (
    Dataset,
    ExclusionRecord,
    HeuristicEvaluation,
    SessionEvaluation,
    parse_or_exclude,
)

__all__ = ["ANALYSIS_DIR", "entry_to_record", "eval_path", "load_dataset", "save_results", "sidecar_path"]

log = logging.getLogger(__name__)

ANALYSIS_DIR = "analysis"
_EVAL_FILE = re.compile(r"^eval(\d+)\.json$")
_EVAL_DIR = re.compile(r"^eval(\d+)$")
_SAFE_SITE = re.compile(r"^[A-Za-z0-9._-]+$")


def eval_path(root, site_id: str, session_index: int) -> Path:
    if not _SAFE_SITE.match(site_id) or site_id in (".", "..", ANALYSIS_DIR):
        raise ValueError(f"site_id {site_id!r} is not usable as a directory name")
    return Path(root) / site_id / f"eval{session_index}.json"


def sidecar_path(path: Path) -> Path:
    return path.with_name(path.name[: -len(".json")] + ".exclusions.json")


def entry_to_record(entry: HeuristicEvaluation) -> dict:
    """The object as the evaluator sent it, or a rebuilt one for hand-made entries."""
    if entry.raw:
        return entry.raw
    values = (
        entry.heuristic.canonical_name,
        entry.severity,
        entry.issue_found,
        entry.issue_description,
        entry.code_reference,
        entry.code_snippet,
        entry.evaluation_answers,
        entry.recommendation,
    )
    return dict(zip(RESPONSE_FIELDS, values))


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def save_results(session: SessionEvaluation, root, force: bool = False) -> Path:
    """Write one session; refuses to overwrite an existing file unless ``force``."""
    path = eval_path(root, session.site_id, session.session_index)
    if path.exists() and not force:
        raise OverwriteRefusedError(f"{path.as_posix()} exists; pass force=True to overwrite")
    records = [entry_to_record(e) for e in session.entries]
    sidecar = {
        "site_id": session.site_id,
        "session_index": session.session_index,
        "unparseable": session.unparseable,
        "exclusions": [x.to_json() for x in session.exclusions],
    }
    _atomic_write(path, json.dumps(records, indent=2, ensure_ascii=False) + "\n")
    _atomic_write(sidecar_path(path), json.dumps(sidecar, indent=2, ensure_ascii=False) + "\n")
    return path


def _session_files(site_dir: Path) -> dict[int, Path]:
    found: dict[int, Path] = {}
    for child in sorted(site_dir.iterdir()):
        m = _EVAL_FILE.match(child.name)
        if m and child.is_file():
            found[int(m.group(1))] = child
            continue
        m = _EVAL_DIR.match(child.name)
        if m and child.is_dir():
            # published-archive form: eval<k>/<anything>.json
            jsons = sorted(p for p in child.glob("*.json") if not p.name.endswith(".exclusions.json"))
            if jsons:
                found.setdefault(int(m.group(1)), jsons[0])
    return found


def _load_session(site_id: str, k: int, path: Path, policy: str) -> SessionEvaluation:
    try:
        text = path.read_text(encoding="utf-8-sig")
    except (OSError, UnicodeDecodeError) as exc:
        text = ""
        log.warning("cannot read %s: %s", path.as_posix(), exc)
    session = parse_or_exclude(text, site_id, k, policy)
    side = sidecar_path(path)
    if not side.exists():
        return session
    meta = json.loads(side.read_text(encoding="utf-8"))
    stored = [ExclusionRecord.from_json(x) for x in meta.get("exclusions", [])]
    if meta.get("unparseable"):
        return SessionEvaluation(site_id, k, (), tuple(stored), True)
    # stored records first (they include entries dropped before saving), then anything new
    extra = [x for x in session.exclusions if x not in stored]
    return SessionEvaluation(site_id, k, session.entries, tuple(stored + extra), False)


def load_dataset(root, policy: str = "split") -> Dataset:
    """Load and re-validate every ``eval*.json`` below ``root``.

    Unreadable files become fully excluded sessions rather than errors.
    """
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset root {root.as_posix()} does not exist")
    sessions = []
    for site_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        if site_dir.name == ANALYSIS_DIR or site_dir.name.startswith("."):
            continue
        for k, path in sorted(_session_files(site_dir).items()):
            sessions.append(_load_session(site_dir.name, k, path, policy))
    dataset = Dataset(tuple(sessions), root.as_posix())
    for site in dataset.insufficient_sites:
        log.warning("site %s has fewer than 2 readable sessions; left out of agreement analyses", site)
    return dataset
