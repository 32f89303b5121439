"""Extract machine-usable structure from a supplement README.

Everything here is a documented line-level grammar, not NLP: execution
steps come from numbered lines naming a script, environment evidence from
pasted session blocks and spec files, runtime notes from duration phrases.
Parsing is total; missing structure yields empty fields for the checks
engine to flag.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .supplement import ArtifactKind, ArtifactLabel, FileClass, SupplementInventory

SESSION_BLOCK_CONFIRM_WINDOW = 50
SESSION_BLOCK_MAX_LINES = 200

_SCRIPT_TOKEN_RE = re.compile(r"[\w./\\-]+\.(?:R|r|py|sh)\b")
_STEP_LINE_RE = re.compile(r"^\s*(\d+)[.)]\s+(.*)$")
_LABEL_MENTION_RE = re.compile(r"\b(figure|table)[\s_]+(\d+)\b", re.IGNORECASE)
_DURATION_RE = re.compile(
    r"(?:~\s*|approx(?:\.|imately)?\s+|about\s+)?"
    r"(\d+(?:\.\d+)?)\s*(seconds?|secs?|minutes?|mins?|hours?|hrs?)\b",
    re.IGNORECASE,
)
_HARDWARE_RE = re.compile(r"\s+on\s+(.+?)\s*\.?\s*$")
_SESSION_PACKAGE_RE = re.compile(r"([A-Za-z][A-Za-z0-9.]*)_([0-9][0-9A-Za-z.\-]*)")
_DCF_PACKAGE_RE = re.compile(r"^Package:\s*(\S+)\s*$")
_DCF_VERSION_RE = re.compile(r"^Version:\s*(\S+)\s*$")
_REQUIREMENT_RE = re.compile(r"^\s*([A-Za-z0-9_.\-]+)\s*==\s*(\S+)\s*$")
_NAME_PAREN_RE = re.compile(r"^\s*([A-Za-z0-9_.\-]+)\s*\(([^()]+)\)\s*$")

_OPEN_PHRASES = ("openly available", "publicly available", "open access", "freely available")
_RESTRICTED_PHRASES = (
    "cannot be shared",
    "cannot be made available",
    "cannot be published",
    "not publicly available",
    "restricted access",
    "data sharing restrictions",
)
_SYNTHETIC_PHRASES = ("synthetic data", "pseudo data", "pseudodata", "synthetic version")


class DataAvailability(Enum):
    OPEN = "open"
    RESTRICTED_WITH_SYNTHETIC = "restricted_with_synthetic"
    RESTRICTED = "restricted"
    UNSTATED = "unstated"


@dataclass(frozen=True)
class ExecutionStep:
    position: int
    script_ref: str
    produces: tuple[ArtifactLabel, ...] = ()


@dataclass(frozen=True)
class EnvironmentEvidence:
    session_block_present: bool = False
    session_block_span: tuple[int, int] | None = None
    spec_files: tuple[str, ...] = ()
    declared_packages: tuple[tuple[str, str | None], ...] = ()

    def package_names(self) -> set[str]:
        return {name.lower() for name, _ in self.declared_packages}


@dataclass(frozen=True)
class RuntimeNote:
    script_ref: str | None
    duration_minutes: float
    hardware_hint: str = ""


@dataclass(frozen=True)
class ReadmeModel:
    steps: tuple[ExecutionStep, ...] = ()
    environment: EnvironmentEvidence = EnvironmentEvidence()
    runtime_notes: tuple[RuntimeNote, ...] = ()
    mentioned_files: frozenset[str] = frozenset()
    data_availability: DataAvailability = DataAvailability.UNSTATED
    present: bool = False


def _labels_in(text: str) -> tuple[ArtifactLabel, ...]:
    labels = []
    for m in _LABEL_MENTION_RE.finditer(text):
        number = int(m.group(2))
        if number >= 1:
            label = ArtifactLabel(ArtifactKind(m.group(1).lower()), number)
            if label not in labels:
                labels.append(label)
    return tuple(labels)


def _parse_steps(lines: list[str]) -> tuple[ExecutionStep, ...]:
    steps = []
    for line in lines:
        m = _STEP_LINE_RE.match(line)
        if m is None:
            continue
        item = m.group(2)
        script = _SCRIPT_TOKEN_RE.search(item)
        if script is None:
            continue
        steps.append(
            ExecutionStep(
                position=len(steps) + 1,
                script_ref=script.group(0),
                produces=_labels_in(item),
            )
        )
    return tuple(steps)


def _block_end(lines: list[str], start_idx: int) -> int:
    """Index of the last line of a session block starting at start_idx."""
    end = min(len(lines), start_idx + SESSION_BLOCK_MAX_LINES)
    previous_blank = False
    for i in range(start_idx + 1, end):
        stripped = lines[i].strip()
        if stripped.startswith("#"):
            return i - 1
        if not stripped:
            if previous_blank:
                return i - 2
            previous_blank = True
        else:
            previous_blank = False
    return end - 1


def _find_session_block(lines: list[str]) -> tuple[int, int] | None:
    for i, line in enumerate(lines):
        stripped = line.strip()
        if stripped.startswith("R version"):
            window = lines[i + 1 : i + 1 + SESSION_BLOCK_CONFIRM_WINDOW]
            if any(w.strip().startswith("attached base packages:") for w in window):
                return (i + 1, _block_end(lines, i) + 1)
        if stripped.lower().startswith("session information"):
            return (i + 1, _block_end(lines, i) + 1)
    return None


def _session_packages(lines: list[str], span: tuple[int, int]) -> list[tuple[str, str | None]]:
    packages: list[tuple[str, str | None]] = []
    block = lines[span[0] - 1 : span[1]]
    in_attached = False
    for line in block:
        stripped = line.strip()
        if stripped.startswith("other attached packages:"):
            in_attached = True
            continue
        if in_attached:
            if not stripped or stripped.endswith(":"):
                in_attached = False
                continue
            for m in _SESSION_PACKAGE_RE.finditer(stripped):
                packages.append((m.group(1), m.group(2)))
    return packages


def _dedupe_packages(
    packages: list[tuple[str, str | None]],
) -> tuple[tuple[str, str | None], ...]:
    merged: dict[str, str | None] = {}
    for name, version in packages:
        merged[name] = version
    return tuple(merged.items())


def _availability(text: str) -> DataAvailability:
    lowered = text.lower()
    restricted = any(p in lowered for p in _RESTRICTED_PHRASES)
    synthetic = any(p in lowered for p in _SYNTHETIC_PHRASES)
    if synthetic:
        return DataAvailability.RESTRICTED_WITH_SYNTHETIC
    if restricted:
        return DataAvailability.RESTRICTED
    if any(p in lowered for p in _OPEN_PHRASES):
        return DataAvailability.OPEN
    return DataAvailability.UNSTATED


def extract_runtime_notes(text: str) -> list[RuntimeNote]:
    """Find duration phrases and tie each to the nearest preceding script."""
    notes = []
    lines = text.splitlines()
    for idx, line in enumerate(lines):
        for m in _DURATION_RE.finditer(line):
            value = float(m.group(1))
            unit = m.group(2).lower()
            if unit.startswith("s"):
                minutes = value / 60.0
            elif unit.startswith("h"):
                minutes = value * 60.0
            else:
                minutes = value
            script_ref = None
            preceding = _SCRIPT_TOKEN_RE.findall(line[: m.start()])
            if preceding:
                script_ref = preceding[-1]
            elif idx > 0:
                prev_tokens = _SCRIPT_TOKEN_RE.findall(lines[idx - 1])
                if prev_tokens:
                    script_ref = prev_tokens[-1]
            hardware = ""
            hw = _HARDWARE_RE.match(line[m.end():])
            if hw is None:
                hw = _HARDWARE_RE.search(line[m.end():])
            if hw is not None:
                hardware = hw.group(1)
            notes.append(RuntimeNote(script_ref, minutes, hardware))
    return notes


def parse_readme(text: str, inventory: SupplementInventory) -> ReadmeModel:
    """Parse README text into its machine-usable structure. Never fails."""
    lines = text.splitlines()
    span = _find_session_block(lines)
    packages: list[tuple[str, str | None]] = []
    if span is not None:
        packages = _session_packages(lines, span)
    spec_files = tuple(
        e.rel_path for e in inventory.by_class(FileClass.ENVIRONMENT_SPEC)
    )
    environment = EnvironmentEvidence(
        session_block_present=span is not None,
        session_block_span=span,
        spec_files=spec_files,
        declared_packages=_dedupe_packages(packages),
    )
    mentioned = frozenset(rel for rel in inventory.rel_paths() if rel in text)
    return ReadmeModel(
        steps=_parse_steps(lines),
        environment=environment,
        runtime_notes=tuple(extract_runtime_notes(text)),
        mentioned_files=mentioned,
        data_availability=_availability(text),
        present=bool(text.strip()),
    )


def _spec_file_packages(text: str) -> list[tuple[str, str | None]]:
    packages: list[tuple[str, str | None]] = []
    pending: str | None = None
    for line in text.splitlines():
        dcf_pkg = _DCF_PACKAGE_RE.match(line)
        if dcf_pkg is not None:
            if pending is not None:
                packages.append((pending, None))
            pending = dcf_pkg.group(1)
            continue
        dcf_ver = _DCF_VERSION_RE.match(line)
        if dcf_ver is not None and pending is not None:
            packages.append((pending, dcf_ver.group(1)))
            pending = None
            continue
        req = _REQUIREMENT_RE.match(line)
        if req is not None:
            packages.append((req.group(1), req.group(2)))
            continue
        paren = _NAME_PAREN_RE.match(line)
        if paren is not None:
            packages.append((paren.group(1), paren.group(2).strip()))
    if pending is not None:
        packages.append((pending, None))
    return packages


def detect_environment_evidence(
    readme: ReadmeModel,
    inventory: SupplementInventory,
    spec_file_texts: dict[str, str] | None = None,
) -> EnvironmentEvidence:
    """Merge README session-block evidence with environment spec files.

    ``spec_file_texts`` maps spec-file rel_paths to decoded contents; the
    caller does the reading so this stays I/O free.
    """
    spec_files = tuple(
        e.rel_path for e in inventory.by_class(FileClass.ENVIRONMENT_SPEC)
    )
    packages = list(readme.environment.declared_packages)
    if spec_file_texts:
        for rel in spec_files:
            text = spec_file_texts.get(rel)
            if text:
                packages.extend(_spec_file_packages(text))
    return EnvironmentEvidence(
        session_block_present=readme.environment.session_block_present,
        session_block_span=readme.environment.session_block_span,
        spec_files=spec_files,
        declared_packages=_dedupe_packages(packages),
    )
