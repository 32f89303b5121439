"""Guideline check catalog and evaluation engine.

Each check inspects the inventory, README model, and script facts, and
yields at least one finding: per-subject findings where subjects exist,
a single Pass or NotApplicable finding otherwise. The catalog is fixed
data; severity defaults can be overridden by configuration, but CODE-01
and CODE-03 can never drop below Info.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import ConfigError, InconsistentInput
from .readme import DataAvailability, ReadmeModel
from .script_scanner import ScriptFacts
from .supplement import (
    ArtifactLabel,
    FileClass,
    FileEntry,
    SupplementInventory,
    extract_artifact_label,
)

HEAVY_RUNTIME_MINUTES = 60.0
CONSOLIDATION_MAX_CODE_FILES = 15
CONSOLIDATION_MIN_STEM_PAIRS = 3
MAX_FUNCTION_DEF_LINES = 50
MAX_DISTINCT_IMPORTS = 15

SEVERITY_FLOOR_CHECKS = ("CODE-01", "CODE-03")

R_BASE_PACKAGES = frozenset({
    "base", "compiler", "datasets", "grdevices", "graphics", "grid",
    "methods", "parallel", "splines", "stats", "stats4", "tcltk",
    "tools", "utils",
})
PY_STDLIB_PACKAGES = frozenset({
    "abc", "argparse", "collections", "concurrent", "csv", "dataclasses",
    "datetime", "functools", "glob", "io", "itertools", "json", "logging",
    "math", "multiprocessing", "os", "pathlib", "pickle", "random", "re",
    "shutil", "statistics", "string", "subprocess", "sys", "time", "typing",
})


class Severity(Enum):
    PASS = "pass"
    INFO = "info"
    WARN = "warn"
    FAIL = "fail"
    NOT_APPLICABLE = "not_applicable"

    @property
    def rank(self) -> int:
        return _SEVERITY_RANK[self]

    def at_least(self, other: "Severity") -> bool:
        if self is Severity.NOT_APPLICABLE or other is Severity.NOT_APPLICABLE:
            return False
        return self.rank >= other.rank


_SEVERITY_RANK = {
    Severity.NOT_APPLICABLE: -1,
    Severity.PASS: 0,
    Severity.INFO: 1,
    Severity.WARN: 2,
    Severity.FAIL: 3,
}


@dataclass(frozen=True)
class Check:
    id: str
    description: str
    default_severity: Severity
    guideline: str


@dataclass(frozen=True)
class Location:
    path: str
    line: int | None = None

    def render(self) -> str:
        return self.path if self.line is None else f"{self.path}:{self.line}"


@dataclass(frozen=True)
class Finding:
    check: str
    severity: Severity
    location: Location | None
    message: str
    guideline: str

    def sort_key(self):
        path = self.location.path if self.location else ""
        line = self.location.line if self.location and self.location.line else 0
        return (self.check, path, line, self.severity.value, self.message)


@dataclass(frozen=True)
class DeclaredLabels:
    labels: frozenset[ArtifactLabel]

    @classmethod
    def from_strings(cls, names: list[str]) -> "DeclaredLabels":
        return cls(frozenset(ArtifactLabel.parse(n) for n in names if n.strip()))

    def __bool__(self) -> bool:
        return bool(self.labels)


@dataclass(frozen=True)
class ProducedLocation:
    kind: str  # output_file | output_write | comment
    path: str
    line: int | None = None


@dataclass(frozen=True)
class LinkageReport:
    produced: tuple[tuple[ArtifactLabel, tuple[ProducedLocation, ...]], ...]
    unlinked_labels: frozenset[ArtifactLabel]
    orphan_outputs: frozenset[str]

    def produced_labels(self) -> frozenset[ArtifactLabel]:
        return frozenset(label for label, _ in self.produced)


@dataclass(frozen=True)
class CheckConfig:
    severity_overrides: dict[str, Severity] = field(default_factory=dict)

    def __post_init__(self):
        for check_id in SEVERITY_FLOOR_CHECKS:
            override = self.severity_overrides.get(check_id)
            if override is not None and override.rank < Severity.INFO.rank:
                raise ConfigError(
                    f"severity of {check_id} cannot be lowered below info"
                )


@dataclass(frozen=True)
class AuditReport:
    inventory: SupplementInventory
    findings: tuple[Finding, ...]
    linkage: LinkageReport | None
    severity_counts: dict[Severity, int]
    io_notes: tuple[tuple[str, str], ...] = ()

    def worst_severity(self) -> Severity:
        worst = Severity.PASS
        for f in self.findings:
            if f.severity is not Severity.NOT_APPLICABLE and f.severity.rank > worst.rank:
                worst = f.severity
        return worst

    def findings_for(self, check_id: str) -> list[Finding]:
        return [f for f in self.findings if f.check == check_id]


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

_CATALOG = (
    Check("STRUCT-01", "conventional top-level folders (data, code, results)",
          Severity.WARN,
          "keep a simple folder structure with clearly named directories for data, code, and results"),
    Check("STRUCT-02", "results subfolders for intermediate results, figures, and tables",
          Severity.INFO,
          "organise results into subfolders such as intermediate, figures, and tables"),
    Check("STRUCT-03", "README present at supplement root",
          Severity.FAIL,
          "include a README as the central entry point of the supplement"),
    Check("STRUCT-04", "file names free of spaces",
          Severity.WARN,
          "use underscores or camel case instead of spaces in file names"),
    Check("STRUCT-05", "codebook accompanies the data",
          Severity.INFO,
          "document variable names, descriptions, types, and admissible values in a codebook"),
    Check("STRUCT-06", "related functionality consolidated into few files",
          Severity.INFO,
          "consolidate related functionality into a single file rather than many files serving the same purpose"),
    Check("README-01", "execution order of scripts documented",
          Severity.WARN,
          "state the order in which scripts must be run to reproduce the final results"),
    Check("README-02", "software environment documented",
          Severity.WARN,
          "record the software environment, e.g. a pasted session block or an environment specification file"),
    Check("README-03", "README gives an overview of all files",
          Severity.INFO,
          "briefly describe every file in the supplement"),
    Check("README-04", "runtime notes for scripts storing intermediates",
          Severity.INFO,
          "give approximate runtimes and a hardware note for each analysis script"),
    Check("CODE-01", "no absolute paths in scripts",
          Severity.FAIL,
          "use only relative paths, resolved from the supplement root"),
    Check("CODE-02", "no IDE-specific APIs",
          Severity.WARN,
          "code should run outside any particular IDE or editor"),
    Check("CODE-03", "random number use is seeded",
          Severity.FAIL,
          "set the random number generator seed to an arbitrary but fixed value"),
    Check("CODE-04", "parallel randomness uses deterministic streams",
          Severity.WARN,
          "use parallel-safe, deterministic random number streams; a single global seed is not enough"),
    Check("CODE-05", "fork-based parallelization is platform dependent",
          Severity.INFO,
          "prefer platform-independent constructs unless there is a strong reason not to"),
    Check("CODE-06", "spacing after commas and around operators",
          Severity.INFO,
          "write spaces after commas and around operators"),
    Check("CODE-07", "analysis scripts avoid lengthy function definitions",
          Severity.WARN,
          "collect longer self-written functions in separate scripts and source them"),
    Check("CODE-08", "small dependency footprint",
          Severity.INFO,
          "rely on a small number of widely used packages"),
    Check("CODE-09", "imports covered by environment documentation",
          Severity.WARN,
          "document the versions of all additional packages used"),
    Check("CODE-10", "no manual-edit markers in code",
          Severity.WARN,
          "results should be obtainable without any manual changes to the code"),
    Check("CODE-11", "self-written functions briefly documented",
          Severity.INFO,
          "briefly document input and output parameters of key self-written functions"),
    Check("LINK-01", "every declared figure and table is produced",
          Severity.FAIL,
          "each empirical figure and table should be linked to the code and output that produce it"),
    Check("LINK-02", "output files follow artifact naming",
          Severity.INFO,
          "name output files after the artifact they contain, e.g. figure_1.pdf or table_1.csv"),
    Check("INTR-01", "long-running analyses store intermediate results",
          Severity.WARN,
          "save per-replication intermediate results for analyses running more than about an hour"),
    Check("INTR-02", "intermediate generation split from evaluation",
          Severity.INFO,
          "keep the script generating intermediate results separate from the script evaluating them"),
    Check("SYNT-01", "synthetic data provided when real data are restricted",
          Severity.WARN,
          "provide synthetic data mimicking the computational structure when the real data cannot be shared"),
    Check("SYNT-02", "real-data results shipped alongside synthetic runs",
          Severity.WARN,
          "ship the real-data results next to the matching synthetic-run results from the same script"),
)

_CATALOG = tuple(sorted(_CATALOG, key=lambda c: c.id))
_CATALOG_BY_ID = {c.id: c for c in _CATALOG}


def builtin_catalog() -> tuple[Check, ...]:
    """The full, fixed check catalog in stable id order."""
    return _CATALOG


# ---------------------------------------------------------------------------
# Linkage
# ---------------------------------------------------------------------------


def build_linkage(
    inventory: SupplementInventory,
    facts: list[ScriptFacts],
    declared: DeclaredLabels,
) -> LinkageReport:
    """Connect declared artifact labels to the places that produce them."""
    produced: dict[ArtifactLabel, list[ProducedLocation]] = {}

    def add(label: ArtifactLabel, loc: ProducedLocation) -> None:
        produced.setdefault(label, []).append(loc)

    labelled_outputs: dict[ArtifactLabel, list[str]] = {}
    for entry in inventory.entries:
        if entry.artifact_label is not None:
            add(entry.artifact_label, ProducedLocation("output_file", entry.rel_path))
            labelled_outputs.setdefault(entry.artifact_label, []).append(entry.rel_path)
    for f in sorted(facts, key=lambda f: f.rel_path):
        for write in f.output_writes:
            if write.inferred_label is not None:
                add(write.inferred_label, ProducedLocation("output_write", f.rel_path, write.line))
        for line, label in f.artifact_comments:
            add(label, ProducedLocation("comment", f.rel_path, line))

    unlinked = frozenset(declared.labels - set(produced))
    orphans = frozenset(
        path
        for label, paths in labelled_outputs.items()
        if label not in declared.labels
        for path in paths
    )
    produced_sorted = tuple(
        (label, tuple(locs)) for label, locs in sorted(produced.items())
    )
    return LinkageReport(produced_sorted, unlinked, orphans)


# ---------------------------------------------------------------------------
# Check evaluators
# ---------------------------------------------------------------------------


def _finding(check_id: str, severity: Severity, location: Location | None, message: str) -> Finding:
    return Finding(check_id, severity, location, message, _CATALOG_BY_ID[check_id].guideline)


def _passed(check_id: str, message: str, location: Location | None = None) -> Finding:
    return _finding(check_id, Severity.PASS, location, message)


def _vacuous(check_id: str, message: str) -> Finding:
    return _finding(check_id, Severity.NOT_APPLICABLE, None, message)


def _fired(check_id: str, location: Location | None, message: str) -> Finding:
    return _finding(check_id, _CATALOG_BY_ID[check_id].default_severity, location, message)


def _norm_ref(ref: str) -> str:
    return ref[2:] if ref.startswith("./") else ref


def _readme_entries(inventory: SupplementInventory) -> list[FileEntry]:
    return inventory.by_class(FileClass.README)


def _struct_01(inventory, readme, facts, declared):
    missing = [d for d in ("data", "code", "results") if not inventory.has_directory(d)]
    if not missing:
        return [_passed("STRUCT-01", "top-level folders data, code, and results present")]
    return [_fired("STRUCT-01", None, "missing top-level folders: " + ", ".join(missing))]


def _struct_02(inventory, readme, facts, declared):
    if not inventory.has_directory("results"):
        return [_vacuous("STRUCT-02", "no results folder to inspect")]
    missing = [
        f"results/{d}"
        for d in ("intermediate", "figures", "tables")
        if not inventory.has_directory(f"results/{d}")
    ]
    if not missing:
        return [_passed("STRUCT-02", "results subfolders intermediate, figures, and tables present")]
    return [_fired("STRUCT-02", None, "missing results subfolders: " + ", ".join(missing))]


def _struct_03(inventory, readme, facts, declared):
    readmes = _readme_entries(inventory)
    if not readmes:
        return [_fired("STRUCT-03", None, "no README found at the supplement root")]
    findings = [
        _passed("STRUCT-03", "README present", Location(readmes[0].rel_path))
    ]
    for extra in readmes[1:]:
        findings.append(
            _finding(
                "STRUCT-03",
                Severity.INFO,
                Location(extra.rel_path),
                "additional README is ignored; the lexicographically first one is used",
            )
        )
    return findings


def _struct_04(inventory, readme, facts, declared):
    offenders = [e for e in inventory.entries if " " in e.rel_path]
    offenders_dirs = [d for d in inventory.directories if " " in d.rsplit("/", 1)[-1]]
    if not offenders and not offenders_dirs:
        return [_passed("STRUCT-04", "no file or folder names contain spaces")]
    findings = [
        _fired("STRUCT-04", Location(e.rel_path), "file name contains spaces")
        for e in offenders
    ]
    findings.extend(
        _fired("STRUCT-04", Location(d), "folder name contains spaces")
        for d in offenders_dirs
    )
    return findings


def _struct_05(inventory, readme, facts, declared):
    if inventory.class_counts[FileClass.DATA] == 0:
        return [_vacuous("STRUCT-05", "no data files in the supplement")]
    if inventory.class_counts[FileClass.CODEBOOK] > 0:
        return [_passed("STRUCT-05", "codebook present for the data files")]
    return [_fired("STRUCT-05", None, "data files present but no codebook found")]


def _stem(name: str) -> str:
    base = name.rsplit("/", 1)[-1].lower()
    base = base.rsplit(".", 1)[0]
    return re.sub(r"[_\-]?\d+$", "", base)


def _struct_06(inventory, readme, facts, declared):
    code_entries = inventory.by_class(FileClass.CODE)
    if len(code_entries) <= CONSOLIDATION_MAX_CODE_FILES:
        return [_passed("STRUCT-06", f"{len(code_entries)} code files; no consolidation concern")]
    stems: dict[str, int] = {}
    for e in code_entries:
        stems[_stem(e.rel_path)] = stems.get(_stem(e.rel_path), 0) + 1
    pairs = sum(k * (k - 1) // 2 for k in stems.values())
    if pairs >= CONSOLIDATION_MIN_STEM_PAIRS:
        return [
            _fired(
                "STRUCT-06",
                None,
                f"{len(code_entries)} code files with {pairs} same-stem pairs; "
                "consider consolidating related scripts",
            )
        ]
    return [_passed("STRUCT-06", f"{len(code_entries)} code files; no repeated-stem clusters")]


def _readme_location(inventory) -> Location | None:
    readmes = _readme_entries(inventory)
    return Location(readmes[0].rel_path) if readmes else None


def _readme_01(inventory, readme, facts, declared):
    loc = _readme_location(inventory)
    if not readme.present:
        return [_fired("README-01", None, "no README, so no execution order is documented")]
    if not readme.steps:
        return [_fired("README-01", loc, "README does not document an execution order")]
    known = inventory.rel_paths()
    findings = []
    for step in readme.steps:
        if _norm_ref(step.script_ref) not in known:
            findings.append(
                _fired(
                    "README-01",
                    loc,
                    f"execution step {step.position} names {step.script_ref}, which is not in the supplement",
                )
            )
    if not findings:
        findings.append(
            _passed("README-01", f"execution order with {len(readme.steps)} steps documented", loc)
        )
    return findings


def _readme_02(inventory, readme, facts, declared):
    env = readme.environment
    if env.session_block_present and env.spec_files:
        return [_passed("README-02", "session block and environment spec file present")]
    if env.session_block_present:
        return [_passed("README-02", "session block documents the environment")]
    if env.spec_files:
        return [_passed("README-02", "environment spec file present: " + ", ".join(env.spec_files))]
    return [_fired("README-02", None, "no session block and no environment specification file")]


def _readme_03(inventory, readme, facts, declared):
    required = [
        e.rel_path
        for e in inventory.entries
        if e.file_class in (FileClass.CODE, FileClass.DATA, FileClass.CODEBOOK)
    ]
    if not required:
        return [_vacuous("README-03", "no code or data files to describe")]
    if not readme.present:
        return [_fired("README-03", None, f"no README describes the {len(required)} code/data files")]
    missing = sorted(set(required) - set(readme.mentioned_files))
    if not missing:
        return [_passed("README-03", f"README mentions all {len(required)} code/data files")]
    return [
        _fired(
            "README-03",
            Location(missing[0]),
            f"README does not mention {len(missing)} of {len(required)} files: " + ", ".join(missing[:5]),
        )
    ]


def _writes_intermediates(f: ScriptFacts) -> bool:
    for write in f.output_writes:
        if write.target_literal is None:
            continue
        parts = write.target_literal.replace("\\", "/").lower().split("/")
        if "intermediate" in parts[:-1]:
            return True
    return False


def _readme_04(inventory, readme, facts, declared):
    subjects = [f for f in facts if _writes_intermediates(f)]
    if not subjects:
        return [_vacuous("README-04", "no script stores intermediate results")]
    noted = {
        _norm_ref(n.script_ref) for n in readme.runtime_notes if n.script_ref is not None
    }
    findings = []
    for f in subjects:
        if f.rel_path in noted:
            findings.append(
                _passed("README-04", "runtime note present", Location(f.rel_path))
            )
        else:
            findings.append(
                _fired(
                    "README-04",
                    Location(f.rel_path),
                    "script stores intermediate results but has no runtime note",
                )
            )
    return findings


def _code_01(inventory, readme, facts, declared):
    if not facts:
        return [_vacuous("CODE-01", "no scripts to scan")]
    findings = []
    for f in facts:
        offenders = [p for p in f.path_literals if p.absolute]
        if not offenders:
            findings.append(_passed("CODE-01", "only relative paths", Location(f.rel_path)))
            continue
        for p in offenders:
            findings.append(
                _fired(
                    "CODE-01",
                    Location(f.rel_path, p.line),
                    f'absolute path "{p.value}" ({p.kind})',
                )
            )
    return findings


def _code_02(inventory, readme, facts, declared):
    if not facts:
        return [_vacuous("CODE-02", "no scripts to scan")]
    findings = []
    for f in facts:
        if not f.ide_api_uses:
            findings.append(_passed("CODE-02", "no IDE-specific APIs", Location(f.rel_path)))
            continue
        for line, token in f.ide_api_uses:
            findings.append(
                _fired("CODE-02", Location(f.rel_path, line), f"IDE-specific API {token}")
            )
    return findings


def _code_03(inventory, readme, facts, declared):
    subjects = [f for f in facts if f.rng_uses]
    if not subjects:
        return [_vacuous("CODE-03", "no random number use detected")]
    by_path = {f.rel_path: f for f in facts}
    order = [_norm_ref(s.script_ref) for s in readme.steps]
    findings = []
    for f in subjects:
        scope = list(f.seed_calls)
        if f.rel_path in order:
            for prior in order[: order.index(f.rel_path)]:
                prior_facts = by_path.get(prior)
                if prior_facts is not None:
                    scope.extend(prior_facts.seed_calls)
        first_rng_line = f.rng_uses[0][0]
        if not scope:
            findings.append(
                _fired(
                    "CODE-03",
                    Location(f.rel_path, first_rng_line),
                    "random numbers used but no seed is set on the execution path",
                )
            )
        elif all(c.argument_literal is None for c in scope):
            findings.append(
                _finding(
                    "CODE-03",
                    Severity.WARN,
                    Location(f.rel_path, first_rng_line),
                    "seed is set, but not to a fixed literal value",
                )
            )
        else:
            findings.append(
                _passed("CODE-03", "seed set before random number use", Location(f.rel_path))
            )
    return findings


def _code_04(inventory, readme, facts, declared):
    subjects = [
        f for f in facts if f.parallel_uses and (f.rng_uses or f.seed_calls)
    ]
    if not subjects:
        return [_vacuous("CODE-04", "no parallel computation combined with randomness")]
    findings = []
    for f in subjects:
        unsafe = [p for p in f.parallel_uses if not p.safe_stream_evidence]
        if not unsafe:
            findings.append(
                _passed("CODE-04", "parallel-safe stream mechanism present", Location(f.rel_path))
            )
            continue
        for p in unsafe:
            findings.append(
                _fired(
                    "CODE-04",
                    Location(f.rel_path, p.line),
                    f"{p.construct_token} without a parallel-safe random stream mechanism",
                )
            )
    return findings


_FORK_TOKENS = {"r": {"mclapply"}, "py": {"Pool", "os.fork"}}


def _code_05(inventory, readme, facts, declared):
    subjects = [f for f in facts if f.parallel_uses]
    if not subjects:
        return [_vacuous("CODE-05", "no parallel constructs detected")]
    findings = []
    for f in subjects:
        forky = [
            p for p in f.parallel_uses
            if p.construct_token in _FORK_TOKENS.get(f.dialect, set())
        ]
        if not forky:
            findings.append(
                _passed("CODE-05", "parallel constructs are platform independent", Location(f.rel_path))
            )
            continue
        for p in forky:
            findings.append(
                _fired(
                    "CODE-05",
                    Location(f.rel_path, p.line),
                    f"{p.construct_token} is fork-based and platform dependent",
                )
            )
    return findings


def _code_06(inventory, readme, facts, declared):
    if not facts:
        return [_vacuous("CODE-06", "no scripts to scan")]
    findings = []
    for f in facts:
        total = f.style.comma_space_violations + f.style.operator_space_violations
        if total == 0:
            findings.append(_passed("CODE-06", "spacing style clean", Location(f.rel_path)))
        else:
            findings.append(
                _fired(
                    "CODE-06",
                    Location(f.rel_path),
                    f"{f.style.comma_space_violations} comma and "
                    f"{f.style.operator_space_violations} operator spacing issues",
                )
            )
    return findings


def _code_07(inventory, readme, facts, declared):
    subjects = [f for f in facts if f.output_writes]
    if not subjects:
        return [_vacuous("CODE-07", "no analysis scripts writing outputs")]
    findings = []
    for f in subjects:
        total = f.function_def_lines_total
        if total > MAX_FUNCTION_DEF_LINES:
            findings.append(
                _fired(
                    "CODE-07",
                    Location(f.rel_path, f.function_blocks[0].line if f.function_blocks else None),
                    f"{total} lines of function definitions inside an analysis script",
                )
            )
        else:
            findings.append(
                _passed("CODE-07", "no lengthy function definitions", Location(f.rel_path))
            )
    return findings


def _code_08(inventory, readme, facts, declared):
    if not facts:
        return [_vacuous("CODE-08", "no scripts to scan")]
    packages = sorted({ref.package for f in facts for ref in f.imports})
    if len(packages) > MAX_DISTINCT_IMPORTS:
        return [
            _fired(
                "CODE-08",
                None,
                f"{len(packages)} distinct packages imported across the supplement",
            )
        ]
    return [_passed("CODE-08", f"{len(packages)} distinct packages imported")]


def _code_09(inventory, readme, facts, declared):
    if not facts:
        return [_vacuous("CODE-09", "no scripts to scan")]
    env = readme.environment
    if not env.session_block_present and not env.spec_files:
        return [_vacuous("CODE-09", "no environment documentation to check imports against")]
    declared_names = env.package_names()
    findings = []
    seen_missing = set()
    for f in sorted(facts, key=lambda f: f.rel_path):
        exempt = R_BASE_PACKAGES if f.dialect == "r" else PY_STDLIB_PACKAGES
        for ref in f.imports:
            name = ref.package.lower()
            if name in declared_names or name in exempt or name in seen_missing:
                continue
            seen_missing.add(name)
            findings.append(
                _fired(
                    "CODE-09",
                    Location(f.rel_path, ref.line),
                    f"imported package {ref.package} is not in the documented environment",
                )
            )
    if not findings:
        return [_passed("CODE-09", "all imports covered by the documented environment")]
    return findings


def _code_10(inventory, readme, facts, declared):
    if not facts:
        return [_vacuous("CODE-10", "no scripts to scan")]
    findings = []
    for f in facts:
        if not f.manual_edit_markers:
            findings.append(_passed("CODE-10", "no manual-edit markers", Location(f.rel_path)))
            continue
        for line, marker in f.manual_edit_markers:
            findings.append(
                _fired(
                    "CODE-10",
                    Location(f.rel_path, line),
                    f'comment asks the reader to edit the code ("{marker}")',
                )
            )
    return findings


def _code_11(inventory, readme, facts, declared):
    subjects = [f for f in facts if f.function_defs > 0]
    if not subjects:
        return [_vacuous("CODE-11", "no self-written top-level functions")]
    findings = []
    for f in subjects:
        undocumented = [b for b in f.function_blocks if not b.documented]
        if not undocumented:
            findings.append(
                _passed("CODE-11", "all top-level functions documented", Location(f.rel_path))
            )
        else:
            findings.append(
                _fired(
                    "CODE-11",
                    Location(f.rel_path, undocumented[0].line),
                    f"{len(undocumented)} of {f.function_defs} top-level functions lack an adjacent comment",
                )
            )
    return findings


def _link_01(inventory, readme, facts, declared, linkage):
    if not declared:
        return [_vacuous("LINK-01", "no declared figure/table labels supplied")]
    if not linkage.unlinked_labels:
        return [
            _passed(
                "LINK-01",
                f"all {len(declared.labels)} declared labels are produced",
            )
        ]
    return [
        _fired("LINK-01", None, f"{label.render()} is declared but never produced")
        for label in sorted(linkage.unlinked_labels)
    ]


def _link_02(inventory, readme, facts, declared, linkage):
    if not declared:
        return [_vacuous("LINK-02", "no declared figure/table labels supplied")]
    offenders = []
    for e in inventory.entries:
        parts = e.rel_path.lower().split("/")
        if len(parts) < 2 or not any(seg in ("figures", "tables") for seg in parts[:-1]):
            continue
        if extract_artifact_label(parts[-1]) is None:
            offenders.append(e.rel_path)
    if not offenders:
        return [_passed("LINK-02", "output files follow the figure_n/table_n naming pattern")]
    return [
        _fired("LINK-02", Location(path), "output file does not follow the figure_n/table_n naming pattern")
        for path in offenders
    ]


def _intr_01(inventory, readme, facts, declared):
    heavy_notes = [
        n for n in readme.runtime_notes if n.duration_minutes > HEAVY_RUNTIME_MINUTES
    ]
    if not heavy_notes:
        return [_vacuous("INTR-01", "no script is documented to run longer than an hour")]
    has_intermediates = inventory.class_counts[FileClass.INTERMEDIATE_RESULT] > 0
    by_path = {f.rel_path: f for f in facts}
    findings = []
    for note in heavy_notes:
        ref = _norm_ref(note.script_ref) if note.script_ref else None
        stores = has_intermediates or (
            ref in by_path and _writes_intermediates(by_path[ref])
        )
        loc = Location(ref) if ref else None
        label = ref if ref else "a long-running analysis"
        if stores:
            findings.append(
                _passed("INTR-01", f"{label} has stored intermediate results", loc)
            )
        else:
            findings.append(
                _fired(
                    "INTR-01",
                    loc,
                    f"{label} runs {note.duration_minutes:g} minutes but no intermediate results are stored",
                )
            )
    return findings


def _writes_final_outputs(f: ScriptFacts) -> bool:
    for write in f.output_writes:
        if write.inferred_label is not None:
            return True
        if write.target_literal is not None:
            parts = write.target_literal.replace("\\", "/").lower().split("/")
            if any(seg in ("figures", "tables") for seg in parts[:-1]):
                return True
    return False


def _intr_02(inventory, readme, facts, declared):
    subjects = [f for f in facts if _writes_intermediates(f)]
    if not subjects:
        return [_vacuous("INTR-02", "no script stores intermediate results")]
    findings = []
    for f in subjects:
        if _writes_final_outputs(f):
            findings.append(
                _fired(
                    "INTR-02",
                    Location(f.rel_path),
                    "script both generates intermediate results and produces final outputs",
                )
            )
        else:
            findings.append(
                _passed("INTR-02", "intermediate generation kept separate", Location(f.rel_path))
            )
    return findings


_SYNTHETIC_MARKER_RE = re.compile(r"synthetic|pseudo", re.IGNORECASE)


def _synthetic_data_entries(inventory) -> list[FileEntry]:
    return [
        e
        for e in inventory.by_class(FileClass.DATA)
        if _SYNTHETIC_MARKER_RE.search(e.rel_path)
    ]


def _synt_01(inventory, readme, facts, declared):
    if readme.data_availability not in (
        DataAvailability.RESTRICTED,
        DataAvailability.RESTRICTED_WITH_SYNTHETIC,
    ):
        return [_vacuous("SYNT-01", "data are not stated to be restricted")]
    synthetic = _synthetic_data_entries(inventory)
    if synthetic:
        return [
            _passed(
                "SYNT-01",
                "synthetic data provided: " + ", ".join(e.rel_path for e in synthetic),
            )
        ]
    return [
        _fired("SYNT-01", None, "data are restricted but no synthetic data are provided")
    ]


def _strip_synthetic(rel_path: str) -> str:
    out = rel_path
    for pattern in (r"_synthetic", r"synthetic_", r"-synthetic", r"synthetic-",
                    r"_pseudo", r"pseudo_", r"-pseudo", r"pseudo-"):
        out = re.sub(pattern, "", out, flags=re.IGNORECASE)
    out = re.sub(r"/(synthetic|pseudo)/", "/", out, flags=re.IGNORECASE)
    return out


def _synt_02(inventory, readme, facts, declared):
    synthetic_data = _synthetic_data_entries(inventory)
    applicable = (
        readme.data_availability is DataAvailability.RESTRICTED_WITH_SYNTHETIC
        or bool(synthetic_data)
    )
    if not applicable:
        return [_vacuous("SYNT-02", "no synthetic data in play")]
    known = inventory.rel_paths()
    synthetic_results = [
        e.rel_path
        for e in inventory.entries
        if e.file_class is not FileClass.CODE
        and not e.rel_path.split("/")[0] == "data"
        and _SYNTHETIC_MARKER_RE.search(e.rel_path)
    ]
    if not synthetic_results:
        return [
            _fired("SYNT-02", None, "no synthetic-run result files found next to the real results")
        ]
    findings = []
    for rel in synthetic_results:
        twin = _strip_synthetic(rel)
        if twin != rel and twin in known:
            findings.append(
                _passed("SYNT-02", f"paired with real-data result {twin}", Location(rel))
            )
        else:
            findings.append(
                _fired(
                    "SYNT-02",
                    Location(rel),
                    "synthetic-run result has no matching real-data result",
                )
            )
    return findings


_PLAIN_EVALUATORS = {
    "STRUCT-01": _struct_01,
    "STRUCT-02": _struct_02,
    "STRUCT-03": _struct_03,
    "STRUCT-04": _struct_04,
    "STRUCT-05": _struct_05,
    "STRUCT-06": _struct_06,
    "README-01": _readme_01,
    "README-02": _readme_02,
    "README-03": _readme_03,
    "README-04": _readme_04,
    "CODE-01": _code_01,
    "CODE-02": _code_02,
    "CODE-03": _code_03,
    "CODE-04": _code_04,
    "CODE-05": _code_05,
    "CODE-06": _code_06,
    "CODE-07": _code_07,
    "CODE-08": _code_08,
    "CODE-09": _code_09,
    "CODE-10": _code_10,
    "CODE-11": _code_11,
    "INTR-01": _intr_01,
    "INTR-02": _intr_02,
    "SYNT-01": _synt_01,
    "SYNT-02": _synt_02,
}

_LINKAGE_EVALUATORS = {
    "LINK-01": _link_01,
    "LINK-02": _link_02,
}


def run_checks(
    inventory: SupplementInventory,
    readme: ReadmeModel,
    facts: list[ScriptFacts],
    declared: DeclaredLabels | None = None,
    config: CheckConfig | None = None,
) -> AuditReport:
    """Evaluate the whole catalog and assemble the deterministic report."""
    config = config or CheckConfig()
    declared = declared or DeclaredLabels(frozenset())

    code_paths = {e.rel_path for e in inventory.by_class(FileClass.CODE)}
    fact_paths = {f.rel_path for f in facts}
    if fact_paths != code_paths:
        extra = sorted(fact_paths - code_paths)
        missing = sorted(code_paths - fact_paths)
        raise InconsistentInput(
            f"facts do not cover the inventory code entries (extra={extra}, missing={missing})"
        )

    facts = sorted(facts, key=lambda f: f.rel_path)
    linkage = build_linkage(inventory, facts, declared) if declared else None

    findings: list[Finding] = []
    for check in _CATALOG:
        if check.id in _LINKAGE_EVALUATORS:
            produced = _LINKAGE_EVALUATORS[check.id](
                inventory, readme, facts, declared, linkage
            )
        else:
            produced = _PLAIN_EVALUATORS[check.id](inventory, readme, facts, declared)
        findings.extend(produced)

    override_map = config.severity_overrides
    adjusted: list[Finding] = []
    for f in findings:
        override = override_map.get(f.check)
        if (
            override is not None
            and f.severity not in (Severity.PASS, Severity.NOT_APPLICABLE)
        ):
            if f.check in SEVERITY_FLOOR_CHECKS and override.rank < Severity.INFO.rank:
                override = Severity.INFO
            f = Finding(f.check, override, f.location, f.message, f.guideline)
        adjusted.append(f)
    adjusted.sort(key=Finding.sort_key)

    counts = {sev: 0 for sev in Severity}
    for f in adjusted:
        counts[f.severity] += 1

    io_notes = tuple(
        (f.rel_path, f.io_note) for f in facts if f.io_note is not None
    )
    return AuditReport(
        inventory=inventory,
        findings=tuple(adjusted),
        linkage=linkage,
        severity_counts=counts,
        io_notes=io_notes,
    )
