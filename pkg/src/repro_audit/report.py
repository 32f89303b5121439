"""Report assembly and rendering: stable text, round-trippable JSON.

The structured format is plain JSON with sorted keys and a schema
version; ``parse_structured(render_structured(doc))`` reconstructs the
document field for field. Timestamps are omitted unless explicitly
requested, so identical inputs render byte-identical outputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .checks import (
    AuditReport,
    Finding,
    LinkageReport,
    Location,
    ProducedLocation,
    Severity,
)
from .scoring import Dimension, DimensionLevel, ScoreProfile, render_profile
from .spotcheck import SpotCheckOutcome, SpotCheckStatus
from .supplement import (
    ArtifactLabel,
    FileClass,
    FileEntry,
    SupplementInventory,
)

SCHEMA_VERSION = 1
TOOL_NAME = "repro-audit"

_SEVERITY_DISPLAY = {
    Severity.PASS: "PASS",
    Severity.INFO: "INFO",
    Severity.WARN: "WARN",
    Severity.FAIL: "FAIL",
    Severity.NOT_APPLICABLE: "N/A",
}

_DIMENSION_TITLES = {
    Dimension.AVAILABILITY: "availability of materials",
    Dimension.VERIFICATION_SCOPE: "verification scope",
    Dimension.VERIFICATION_SOURCE: "verification source",
    Dimension.REPRODUCIBILITY_SCOPE: "scope of reproducibility",
    Dimension.CODE_QUALITY: "code quality",
}


@dataclass(frozen=True)
class RenderedReport:
    format: str
    body: bytes
    exit_code: int


@dataclass(frozen=True)
class AuditDocument:
    report: AuditReport
    profile: ScoreProfile | None = None
    config_echo: dict | None = None
    tool_version: str = __version__
    generated_at: str | None = None


# ---------------------------------------------------------------------------
# JSON encoding
# ---------------------------------------------------------------------------


def _entry_dict(entry: FileEntry) -> dict:
    return {
        "rel_path": entry.rel_path,
        "size": entry.size,
        "class": entry.file_class.value,
        "dialect": entry.dialect,
        "artifact_label": entry.artifact_label.render() if entry.artifact_label else None,
    }


def _inventory_dict(inventory: SupplementInventory) -> dict:
    return {
        "root": str(inventory.root),
        "entries": [_entry_dict(e) for e in inventory.entries],
        "directories": list(inventory.directories),
        "class_counts": {fc.value: inventory.class_counts[fc] for fc in FileClass},
    }


def _finding_dict(finding: Finding) -> dict:
    location = None
    if finding.location is not None:
        location = {"path": finding.location.path, "line": finding.location.line}
    return {
        "check": finding.check,
        "severity": finding.severity.value,
        "location": location,
        "message": finding.message,
        "guideline": finding.guideline,
    }


def _linkage_dict(linkage: LinkageReport) -> dict:
    return {
        "produced": [
            {
                "label": label.render(),
                "locations": [
                    {"kind": loc.kind, "path": loc.path, "line": loc.line}
                    for loc in locations
                ],
            }
            for label, locations in linkage.produced
        ],
        "unlinked_labels": sorted(l.render() for l in linkage.unlinked_labels),
        "orphan_outputs": sorted(linkage.orphan_outputs),
    }


def _profile_dict(profile: ScoreProfile) -> dict:
    aggregate = None
    if profile.aggregate is not None:
        aggregate = {"policy": profile.aggregate[0], "tier": profile.aggregate[1]}
    return {
        "levels": {
            d.value: {
                "level": profile.levels[d].level,
                "evidence": profile.levels[d].evidence,
            }
            for d in Dimension
        },
        "aggregate": aggregate,
        "badge": render_profile(profile),
    }


def document_dict(document: AuditDocument) -> dict:
    report = document.report
    payload = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": TOOL_NAME, "version": document.tool_version},
        "config": document.config_echo,
        "inventory": _inventory_dict(report.inventory),
        "findings": [_finding_dict(f) for f in report.findings],
        "severity_counts": {s.value: report.severity_counts[s] for s in Severity},
        "linkage": _linkage_dict(report.linkage) if report.linkage else None,
        "io_notes": [{"path": p, "note": n} for p, n in report.io_notes],
        "profile": _profile_dict(document.profile) if document.profile else None,
    }
    if document.generated_at is not None:
        payload["generated_at"] = document.generated_at
    return payload


def render_structured(document: AuditDocument, exit_code: int = 0) -> RenderedReport:
    body = json.dumps(document_dict(document), sort_keys=True, indent=2) + "\n"
    return RenderedReport("json", body.encode("utf-8"), exit_code)


# ---------------------------------------------------------------------------
# JSON decoding (round trip)
# ---------------------------------------------------------------------------


def _entry_from(d: dict) -> FileEntry:
    label = ArtifactLabel.parse(d["artifact_label"]) if d["artifact_label"] else None
    return FileEntry(
        rel_path=d["rel_path"],
        size=d["size"],
        file_class=FileClass(d["class"]),
        dialect=d["dialect"],
        artifact_label=label,
    )


def _inventory_from(d: dict) -> SupplementInventory:
    return SupplementInventory(
        root=Path(d["root"]),
        entries=tuple(_entry_from(e) for e in d["entries"]),
        class_counts={FileClass(k): v for k, v in d["class_counts"].items()},
        directories=tuple(d["directories"]),
    )


def _finding_from(d: dict) -> Finding:
    location = None
    if d["location"] is not None:
        location = Location(d["location"]["path"], d["location"]["line"])
    return Finding(
        check=d["check"],
        severity=Severity(d["severity"]),
        location=location,
        message=d["message"],
        guideline=d["guideline"],
    )


def _linkage_from(d: dict | None) -> LinkageReport | None:
    if d is None:
        return None
    produced = tuple(
        (
            ArtifactLabel.parse(item["label"]),
            tuple(
                ProducedLocation(loc["kind"], loc["path"], loc["line"])
                for loc in item["locations"]
            ),
        )
        for item in d["produced"]
    )
    return LinkageReport(
        produced=produced,
        unlinked_labels=frozenset(ArtifactLabel.parse(l) for l in d["unlinked_labels"]),
        orphan_outputs=frozenset(d["orphan_outputs"]),
    )


def _profile_from(d: dict | None) -> ScoreProfile | None:
    if d is None:
        return None
    levels = {
        Dimension(name): DimensionLevel(Dimension(name), item["level"], item["evidence"])
        for name, item in d["levels"].items()
    }
    aggregate = None
    if d["aggregate"] is not None:
        aggregate = (d["aggregate"]["policy"], d["aggregate"]["tier"])
    return ScoreProfile(levels=levels, aggregate=aggregate)


def parse_structured(body: bytes | str) -> AuditDocument:
    """Inverse of :func:`render_structured`."""
    if isinstance(body, bytes):
        body = body.decode("utf-8")
    payload = json.loads(body)
    report = AuditReport(
        inventory=_inventory_from(payload["inventory"]),
        findings=tuple(_finding_from(f) for f in payload["findings"]),
        linkage=_linkage_from(payload["linkage"]),
        severity_counts={
            Severity(k): v for k, v in payload["severity_counts"].items()
        },
        io_notes=tuple((n["path"], n["note"]) for n in payload["io_notes"]),
    )
    return AuditDocument(
        report=report,
        profile=_profile_from(payload["profile"]),
        config_echo=payload["config"],
        tool_version=payload["tool"]["version"],
        generated_at=payload.get("generated_at"),
    )


# ---------------------------------------------------------------------------
# Text rendering
# ---------------------------------------------------------------------------


def _finding_line(finding: Finding) -> str:
    severity = _SEVERITY_DISPLAY[finding.severity]
    where = f" {finding.location.render()}" if finding.location else ""
    return f"{severity} {finding.check}{where} — {finding.message} [{finding.guideline}]"


def _class_summary(inventory: SupplementInventory) -> str:
    parts = [
        f"{fc.value} {inventory.class_counts[fc]}"
        for fc in FileClass
        if inventory.class_counts[fc] > 0
    ]
    return ", ".join(parts) if parts else "empty"


def render_text(document: AuditDocument, exit_code: int = 0) -> RenderedReport:
    report = document.report
    lines: list[str] = []
    lines.append(f"supplement audit: {report.inventory.root}")
    lines.append(f"files: {len(report.inventory.entries)} ({_class_summary(report.inventory)})")
    counts = report.severity_counts
    if not report.findings:
        lines.append("0 findings")
    else:
        lines.append(
            f"findings: {len(report.findings)} | "
            f"pass {counts[Severity.PASS]} info {counts[Severity.INFO]} "
            f"warn {counts[Severity.WARN]} fail {counts[Severity.FAIL]} "
            f"n/a {counts[Severity.NOT_APPLICABLE]}"
        )
        lines.append("")
        lines.extend(_finding_line(f) for f in report.findings)
    if report.io_notes:
        lines.append("")
        lines.extend(f"NOTE {path}: {note}" for path, note in report.io_notes)
    if report.linkage is not None:
        lines.append("")
        lines.append(
            "linkage: "
            f"{len(report.linkage.produced)} labels produced, "
            f"{len(report.linkage.unlinked_labels)} unlinked, "
            f"{len(report.linkage.orphan_outputs)} orphan outputs"
        )
        for label in sorted(report.linkage.unlinked_labels):
            lines.append(f"  unlinked: {label.render()}")
        for orphan in sorted(report.linkage.orphan_outputs):
            lines.append(f"  orphan output: {orphan}")
    if document.profile is not None:
        lines.append("")
        lines.append(render_profile(document.profile))
        for d in Dimension:
            level = document.profile.levels[d]
            lines.append(
                f"  {d.value} {_DIMENSION_TITLES[d]:<26} {level.level}  ({level.evidence})"
            )
    if document.generated_at is not None:
        lines.append("")
        lines.append(f"generated at: {document.generated_at}")
    body = "\n".join(lines) + "\n"
    return RenderedReport("text", body.encode("utf-8"), exit_code)


def render_outcomes_text(outcomes: list[SpotCheckOutcome], exit_code: int) -> RenderedReport:
    lines = [f"spotcheck: {len(outcomes)} replications"]
    for o in outcomes:
        line = f"{o.id}: {o.status.value}"
        if o.detail:
            line += f" ({o.detail})"
        lines.append(line)
    matched = sum(1 for o in outcomes if o.status is SpotCheckStatus.MATCH)
    lines.append(f"matched {matched} of {len(outcomes)}")
    return RenderedReport("text", ("\n".join(lines) + "\n").encode("utf-8"), exit_code)


def render_outcomes_structured(
    outcomes: list[SpotCheckOutcome], exit_code: int
) -> RenderedReport:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": TOOL_NAME, "version": __version__},
        "outcomes": [
            {"id": o.id, "status": o.status.value, "detail": o.detail} for o in outcomes
        ],
    }
    body = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    return RenderedReport("json", body.encode("utf-8"), exit_code)
