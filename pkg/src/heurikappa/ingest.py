"""Turn a website repository (directory or ZIP) into a bounded text payload."""

from __future__ import annotations

import os
import posixpath
import zipfile
from dataclasses import dataclass, field, replace
from pathlib import Path, PurePosixPath

from .errors import (
    ArchiveCorruptError,
    PathNotFoundError,
    PathTraversalError,
    PayloadError,
)

__all__ = [
    "DEFAULT_EXTENSION_MAP",
    "FILE_HEADER",
    "TRUNCATION_MARKER",
    "CorpusBundle",
    "EvaluationPayload",
    "IngestConfig",
    "PayloadLimits",
    "PayloadManifest",
    "SourceFile",
    "filter_frontend",
    "package_payload",
    "scan_repository",
]

FRONTEND_KINDS = ("html", "css", "js")

DEFAULT_EXTENSION_MAP = {
    ".html": "html",
    ".htm": "html",
    ".css": "css",
    ".js": "js",
    ".mjs": "js",
}

FILE_HEADER = "==== FILE: {path} ===="
TRUNCATION_MARKER = "[... truncated {omitted} chars ...]"


@dataclass(frozen=True)
class SourceFile:
    path: str
    content: str
    kind: str = "other"
    byte_size: int = -1

    def __post_init__(self):
        _check_relative(self.path)
        size = len(self.content.encode("utf-8"))
        if self.byte_size == -1:
            object.__setattr__(self, "byte_size", size)
        elif self.byte_size != size:
            raise ValueError(f"byte_size {self.byte_size} != encoded length {size} for {self.path}")


@dataclass(frozen=True)
class CorpusBundle:
    site_id: str
    files: tuple[SourceFile, ...] = ()

    def __post_init__(self):
        files = tuple(sorted(self.files, key=lambda f: f.path))
        paths = [f.path for f in files]
        if len(set(paths)) != len(paths):
            raise ValueError(f"duplicate paths in bundle {self.site_id!r}")
        object.__setattr__(self, "files", files)

    @property
    def total_bytes(self) -> int:
        return sum(f.byte_size for f in self.files)

    @property
    def paths(self) -> list[str]:
        return [f.path for f in self.files]

    def __len__(self):
        return len(self.files)


@dataclass(frozen=True)
class IngestConfig:
    extension_map: dict = field(default_factory=lambda: dict(DEFAULT_EXTENSION_MAP))
    case_insensitive: bool = True
    include_all: bool = False

    def kind_of(self, path: str) -> str:
        ext = posixpath.splitext(path)[1]
        if self.case_insensitive:
            ext = ext.lower()
            mapping = {k.lower(): v for k, v in self.extension_map.items()}
        else:
            mapping = self.extension_map
        return mapping.get(ext, "other")


@dataclass(frozen=True)
class PayloadLimits:
    per_file_chars: int = 64_000
    total_chars: int = 512_000


@dataclass(frozen=True)
class PayloadManifest:
    included: tuple[str, ...] = ()
    # (path, original_chars, kept_chars)
    truncated: tuple[tuple[str, int, int], ...] = ()
    omitted: tuple[str, ...] = ()

    @property
    def truncation_count(self) -> int:
        return len(self.truncated)


@dataclass(frozen=True)
class EvaluationPayload:
    site_id: str
    text: str
    manifest: PayloadManifest


def _check_relative(path: str) -> None:
    p = PurePosixPath(path)
    if not path or path.startswith(("/", "\\")) or p.is_absolute() or ".." in p.parts or "\\" in path:
        raise PathTraversalError(f"not a safe relative path: {path!r}")
    if len(path) > 1 and path[1] == ":":
        raise PathTraversalError(f"not a safe relative path: {path!r}")


def _decode(raw: bytes) -> str | None:
    if b"\x00" in raw:
        return None
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        return None


def _make_file(path: str, raw: bytes, config: IngestConfig) -> SourceFile:
    text = _decode(raw)
    if text is None:
        return SourceFile(path, "", "other")
    return SourceFile(path, text, config.kind_of(path))


def _scan_directory(root: Path, config: IngestConfig) -> list[SourceFile]:
    files = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for name in sorted(filenames):
            full = Path(dirpath) / name
            if full.is_symlink() or not full.is_file():
                continue
            rel = full.relative_to(root).as_posix()
            files.append(_make_file(rel, full.read_bytes(), config))
    return files


def _scan_archive(path: Path, config: IngestConfig) -> list[SourceFile]:
    try:
        with zipfile.ZipFile(path) as zf:
            infos = [i for i in zf.infolist() if not i.is_dir()]
            for info in infos:
                _check_relative(info.filename)
            if zf.testzip() is not None:
                raise ArchiveCorruptError(f"CRC check failed in {path}")
            names = [i.filename for i in infos]
            prefix = _common_root(names)
            return [
                _make_file(info.filename[len(prefix):], zf.read(info), config)
                for info in infos
            ]
    except zipfile.BadZipFile as exc:
        raise ArchiveCorruptError(f"{path}: {exc}") from exc


def _common_root(names: list[str]) -> str:
    """Single top-level folder shared by every entry (as in GitHub downloads), else ''."""
    tops = {n.split("/", 1)[0] for n in names}
    if len(tops) == 1 and all("/" in n for n in names):
        return tops.pop() + "/"
    return ""


def scan_repository(root, config: IngestConfig | None = None, site_id: str | None = None) -> CorpusBundle:
    """Read every regular file under a directory or inside a ZIP archive.

    Undecodable files are kept with ``kind="other"`` and empty content so the
    bundle still records their presence.
    """
    config = config or IngestConfig()
    root = Path(root)
    if not root.exists():
        raise PathNotFoundError(str(root))
    if root.is_dir():
        files = _scan_directory(root, config)
        default_id = root.resolve().name
    else:
        files = _scan_archive(root, config)
        default_id = root.stem
    return CorpusBundle(site_id or default_id, tuple(files))


def filter_frontend(bundle: CorpusBundle, config: IngestConfig | None = None) -> CorpusBundle:
    config = config or IngestConfig()
    kept = []
    for f in bundle.files:
        if f.kind == "other" and f.byte_size == 0 and not f.content:
            # undecodable (or empty) files never reach a payload
            continue
        kind = config.kind_of(f.path)
        if kind in FRONTEND_KINDS:
            kept.append(replace(f, kind=kind))
        elif config.include_all:
            kept.append(replace(f, kind="other"))
    return CorpusBundle(bundle.site_id, tuple(kept))


def package_payload(bundle: CorpusBundle, limits: PayloadLimits | None = None) -> EvaluationPayload:
    """Concatenate bundle files under ``==== FILE: <path> ====`` headers.

    Each file is cut to ``limits.per_file_chars`` and the whole text never
    exceeds ``limits.total_chars``; files that do not fit are listed as
    omitted in the manifest.
    """
    limits = limits or PayloadLimits()
    if not bundle.files:
        raise PayloadError(f"bundle {bundle.site_id!r} has no files to package")

    parts: list[str] = []
    used = 0
    included, truncated, omitted = [], [], []
    for i, f in enumerate(bundle.files):
        header = FILE_HEADER.format(path=f.path) + "\n"
        sep = "\n" if parts else ""
        room = limits.total_chars - used - len(sep) - len(header)
        if room < 0:
            omitted.extend(g.path for g in bundle.files[i:])
            break
        body, kept = _clip(f.content, limits.per_file_chars, room)
        if kept < len(f.content):
            if kept == 0:
                omitted.extend(g.path for g in bundle.files[i:])
                break
            truncated.append((f.path, len(f.content), kept))
        chunk = sep + header + body
        parts.append(chunk)
        used += len(chunk)
        included.append(f.path)

    if not included:
        raise PayloadError(
            f"total_chars={limits.total_chars} cannot fit the first file header of {bundle.site_id!r}"
        )
    text = "".join(parts)
    manifest = PayloadManifest(tuple(included), tuple(truncated), tuple(omitted))
    return EvaluationPayload(bundle.site_id, text, manifest)


def _clip(content: str, per_file: int, room: int) -> tuple[str, int]:
    """Return (text, kept_chars): at most ``per_file`` content chars, marker appended
    when cut, and the result no longer than ``room``."""
    if len(content) <= min(per_file, room):
        return content, len(content)
    kept = min(per_file, len(content))
    for _ in range(3):  # marker length depends on the digit count of the omitted total
        marker = "\n" + TRUNCATION_MARKER.format(omitted=len(content) - kept)
        if kept + len(marker) <= room:
            return content[:kept] + marker, kept
        kept = max(0, room - len(marker))
    return "", 0
