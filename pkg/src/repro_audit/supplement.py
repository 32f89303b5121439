"""Deterministic inventory of a code and data supplement.

Walks a supplement root and classifies every regular file by name-based
precedence rules. Classification never looks at file contents, so two
scans of an unchanged tree always produce identical inventories.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from enum import Enum
from fnmatch import fnmatch
from pathlib import Path, PurePosixPath

from .errors import IoFailure, RootMissing

DEFAULT_IGNORE_GLOBS = (".git", ".svn", ".hg")

CODE_EXTENSIONS = {".r": "r", ".py": "py", ".sh": "shell"}
DATA_EXTENSIONS = {
    ".csv", ".tsv", ".rds", ".rda", ".parquet", ".json", ".xlsx", ".dta", ".sav",
}
DOCUMENT_EXTENSIONS = {".pdf", ".md", ".docx", ".html"}
ENVIRONMENT_SPEC_NAMES = {
    "renv.lock", "environment.yml", "requirements.txt", "description", "dockerfile",
}

_ARTIFACT_NAME_RE = re.compile(r"^(figure|table)_(\d+)\.([^.]+)$", re.IGNORECASE)


class FileClass(Enum):
    CODE = "code"
    DATA = "data"
    README = "readme"
    CODEBOOK = "codebook"
    FIGURE_OUTPUT = "figure_output"
    TABLE_OUTPUT = "table_output"
    INTERMEDIATE_RESULT = "intermediate_result"
    ENVIRONMENT_SPEC = "environment_spec"
    DOCUMENT = "document"
    OTHER = "other"


class ArtifactKind(Enum):
    FIGURE = "figure"
    TABLE = "table"


@dataclass(frozen=True)
class ArtifactLabel:
    """Manuscript-facing identifier of an empirical result, e.g. Figure 2."""

    kind: ArtifactKind
    number: int

    def __post_init__(self):
        if self.number < 1:
            raise ValueError(f"artifact number must be >= 1, got {self.number}")

    def __lt__(self, other: "ArtifactLabel") -> bool:
        return (self.kind.value, self.number) < (other.kind.value, other.number)

    def render(self) -> str:
        return f"{self.kind.value.title()} {self.number}"

    @classmethod
    def parse(cls, text: str) -> "ArtifactLabel":
        kind_word, _, num = text.strip().partition(" ")
        return cls(ArtifactKind(kind_word.lower()), int(num))


@dataclass(frozen=True)
class ScanConfig:
    root: Path
    ignore_globs: tuple[str, ...] = DEFAULT_IGNORE_GLOBS
    follow_symlinks: bool = False
    max_file_bytes_for_content_sniff: int = 1_048_576

    def __post_init__(self):
        object.__setattr__(self, "root", Path(self.root))
        object.__setattr__(self, "ignore_globs", tuple(self.ignore_globs))


@dataclass(frozen=True)
class FileEntry:
    rel_path: str
    size: int
    file_class: FileClass
    dialect: str | None = None
    artifact_label: ArtifactLabel | None = None

    def __post_init__(self):
        normalized = self.rel_path.replace("\\", "/")
        if normalized.startswith("/") or ".." in normalized.split("/"):
            raise ValueError(f"rel_path escapes the root: {self.rel_path!r}")


@dataclass(frozen=True)
class SupplementInventory:
    root: Path
    entries: tuple[FileEntry, ...]
    class_counts: dict[FileClass, int]
    directories: tuple[str, ...] = ()

    def by_class(self, file_class: FileClass) -> list[FileEntry]:
        return [e for e in self.entries if e.file_class is file_class]

    def rel_paths(self) -> set[str]:
        return {e.rel_path for e in self.entries}

    def has_directory(self, rel_path: str) -> bool:
        wanted = rel_path.lower()
        return any(d.lower() == wanted for d in self.directories)


def extract_artifact_label(file_name: str) -> ArtifactLabel | None:
    """Parse ``figure_<n>.<ext>`` / ``table_<n>.<ext>`` names, n >= 1."""
    m = _ARTIFACT_NAME_RE.match(file_name)
    if m is None:
        return None
    number = int(m.group(2))
    if number < 1:
        return None
    return ArtifactLabel(ArtifactKind(m.group(1).lower()), number)


def render_artifact_name(kind: ArtifactKind, number: int, ext: str) -> str:
    return f"{kind.value}_{number}.{ext}"


def classify_file(rel_path: str, content_head: bytes | None = None) -> FileClass:
    """Classify one file by its relative path.

    Precedence: root README, codebook name, environment spec name, code
    extension, artifact-label name, intermediate directory segment, data
    extension, document extension, other. ``content_head`` is accepted for
    interface stability but never consulted; classification stays
    name-based and content-agnostic.
    """
    path = PurePosixPath(rel_path.replace("\\", "/"))
    name = path.name
    lower = name.lower()
    suffix = path.suffix.lower()

    if len(path.parts) == 1 and (lower == "readme" or lower.startswith("readme.")):
        return FileClass.README
    if "codebook" in lower:
        return FileClass.CODEBOOK
    if lower in ENVIRONMENT_SPEC_NAMES:
        return FileClass.ENVIRONMENT_SPEC
    if suffix in CODE_EXTENSIONS:
        return FileClass.CODE
    label = extract_artifact_label(name)
    if label is not None:
        if label.kind is ArtifactKind.FIGURE:
            return FileClass.FIGURE_OUTPUT
        return FileClass.TABLE_OUTPUT
    if any(part.lower() == "intermediate" for part in path.parts[:-1]):
        return FileClass.INTERMEDIATE_RESULT
    if suffix in DATA_EXTENSIONS:
        return FileClass.DATA
    if suffix in DOCUMENT_EXTENSIONS:
        return FileClass.DOCUMENT
    return FileClass.OTHER


def script_dialect(rel_path: str) -> str:
    return CODE_EXTENSIONS.get(PurePosixPath(rel_path).suffix.lower(), "unknown")


def _ignored(rel_path: str, globs: tuple[str, ...]) -> bool:
    parts = PurePosixPath(rel_path).parts
    for pattern in globs:
        if fnmatch(rel_path, pattern):
            return True
        if any(fnmatch(part, pattern) for part in parts):
            return True
    return False


def _make_entry(rel_path: str, size: int) -> FileEntry:
    file_class = classify_file(rel_path)
    dialect = script_dialect(rel_path) if file_class is FileClass.CODE else None
    label = None
    if file_class in (FileClass.FIGURE_OUTPUT, FileClass.TABLE_OUTPUT):
        label = extract_artifact_label(PurePosixPath(rel_path).name)
    return FileEntry(rel_path, size, file_class, dialect, label)


def scan_supplement(config: ScanConfig) -> SupplementInventory:
    """Build the classified inventory of every non-ignored regular file.

    Entries are sorted by rel_path under lexicographic byte comparison, so
    repeat scans of an unchanged tree yield identical inventories.
    """
    root = config.root
    if not root.is_dir():
        raise RootMissing(str(root))

    entries: list[FileEntry] = []
    directories: list[str] = []
    for dirpath, dirnames, filenames in os.walk(root, followlinks=config.follow_symlinks):
        rel_dir = os.path.relpath(dirpath, root)
        kept = []
        for d in sorted(dirnames):
            rel = d if rel_dir == "." else f"{rel_dir}/{d}".replace(os.sep, "/")
            if _ignored(rel, config.ignore_globs):
                continue
            kept.append(d)
            directories.append(rel)
        dirnames[:] = kept
        for fname in filenames:
            rel = fname if rel_dir == "." else f"{rel_dir}/{fname}".replace(os.sep, "/")
            if _ignored(rel, config.ignore_globs):
                continue
            full = Path(dirpath) / fname
            if not config.follow_symlinks and full.is_symlink():
                continue
            try:
                size = full.stat().st_size
            except OSError as exc:
                raise IoFailure(rel, str(exc)) from exc
            entries.append(_make_entry(rel, size))

    entries.sort(key=lambda e: e.rel_path.encode("utf-8"))
    directories.sort(key=lambda d: d.encode("utf-8"))
    counts = {fc: 0 for fc in FileClass}
    for entry in entries:
        counts[entry.file_class] += 1
    return SupplementInventory(
        root=root,
        entries=tuple(entries),
        class_counts=counts,
        directories=tuple(directories),
    )
