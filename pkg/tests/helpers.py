"""Builders for synthetic inventories, facts, and reports used in tests."""

from pathlib import Path

from repro_audit.checks import Finding, Location, Severity, AuditReport, builtin_catalog
from repro_audit.script_scanner import OutputWrite, ScriptFacts
from repro_audit.supplement import (
    FileClass,
    FileEntry,
    SupplementInventory,
    classify_file,
    extract_artifact_label,
    script_dialect,
)

_CATALOG_BY_ID = {c.id: c for c in builtin_catalog()}


def make_entry(rel_path: str, size: int = 1) -> FileEntry:
    file_class = classify_file(rel_path)
    dialect = script_dialect(rel_path) if file_class is FileClass.CODE else None
    label = None
    if file_class in (FileClass.FIGURE_OUTPUT, FileClass.TABLE_OUTPUT):
        label = extract_artifact_label(rel_path.rsplit("/", 1)[-1])
    return FileEntry(rel_path, size, file_class, dialect, label)


def make_inventory(paths, directories=(), root="/synthetic") -> SupplementInventory:
    entries = tuple(
        sorted((make_entry(p) for p in set(paths)), key=lambda e: e.rel_path.encode())
    )
    counts = {fc: 0 for fc in FileClass}
    for entry in entries:
        counts[entry.file_class] += 1
    inferred_dirs = set(directories)
    for entry in entries:
        parts = entry.rel_path.split("/")
        for i in range(1, len(parts)):
            inferred_dirs.add("/".join(parts[:i]))
    return SupplementInventory(
        root=Path(root),
        entries=entries,
        class_counts=counts,
        directories=tuple(sorted(inferred_dirs, key=lambda d: d.encode())),
    )


def make_facts(rel_path, writes=(), comments=()) -> ScriptFacts:
    output_writes = tuple(
        OutputWrite(line, "write.csv", target, extract_artifact_label(target.rsplit("/", 1)[-1]))
        for line, target in writes
    )
    return ScriptFacts(
        rel_path=rel_path,
        dialect="r",
        output_writes=output_writes,
        artifact_comments=tuple(comments),
    )


def make_finding(check_id: str, severity: Severity, path=None, line=None) -> Finding:
    check = _CATALOG_BY_ID[check_id]
    location = Location(path, line) if path else None
    return Finding(check_id, severity, location, f"synthetic {severity.value}", check.guideline)


def make_report(findings, inventory=None) -> AuditReport:
    inventory = inventory or make_inventory(["code/a.R"])
    counts = {s: 0 for s in Severity}
    for f in findings:
        counts[f.severity] += 1
    return AuditReport(
        inventory=inventory,
        findings=tuple(sorted(findings, key=Finding.sort_key)),
        linkage=None,
        severity_counts=counts,
    )
