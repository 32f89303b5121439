"""Spot-check orchestration: rerun selected replications, compare outputs.

The manifest is line-oriented UTF-8: a ``spotcheck v1`` header, then one
tab-separated record per replication (id, seed, comparator, abs_tol,
rel_tol, expected_output, command_template). ``#`` starts a comment,
``n_full=<int>`` and ``working_dir=<path>`` are directives, and a
``[reduced]`` line introduces the reduced-replication entries.

Execution is delegated to a CommandRunner; each replication gets its own
scratch directory and nothing outside it is written.
"""

from __future__ import annotations

import csv
import io
import math
import re
import shutil
import subprocess
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import (
    DimensionMismatch,
    DuplicateId,
    KTooLarge,
    MalformedManifest,
    NoReducedSet,
    ParseFailure,
    UnknownId,
)

COMPARATORS = ("bitwise", "numeric_table")
DEFAULT_TIMEOUT_SECONDS = 600.0
_PLACEHOLDER_RE = re.compile(r"\{([^{}]*)\}")
_ALLOWED_PLACEHOLDERS = {"id", "seed", "out"}
_MASK64 = (1 << 64) - 1


class SpotCheckStatus(Enum):
    MATCH = "match"
    MISMATCH = "mismatch"
    EXECUTION_ERROR = "execution_error"
    MISSING_EXPECTED = "missing_expected"


@dataclass(frozen=True)
class ReplicationEntry:
    id: str
    seed: int | str
    command_template: str
    expected_output: str
    comparator: str = "bitwise"
    abs_tol: float = 0.0
    rel_tol: float = 0.0


@dataclass(frozen=True)
class SpotCheckManifest:
    entries: tuple[ReplicationEntry, ...]
    working_dir: str = "."
    n_full: int | None = None
    reduced_entries: tuple[ReplicationEntry, ...] | None = None


@dataclass(frozen=True)
class SpotCheckOutcome:
    id: str
    status: SpotCheckStatus
    detail: str = ""


@dataclass(frozen=True)
class Selection:
    ids: tuple[str, ...] | None = None
    random_k: int | None = None
    audit_seed: int = 0
    reduced: bool = False


@dataclass(frozen=True)
class RunResult:
    exit_code: int
    captured_paths: frozenset[str] = frozenset()
    timed_out: bool = False
    detail: str = ""


class SubprocessRunner:
    """Run replication commands through the shell."""

    def run(
        self,
        command: str,
        working_dir: Path,
        timeout: float,
        output_paths: tuple[Path, ...] = (),
    ) -> RunResult:
        try:
            proc = subprocess.run(
                command,
                shell=True,
                cwd=str(working_dir),
                timeout=timeout,
                capture_output=True,
                text=True,
            )
        except subprocess.TimeoutExpired:
            return RunResult(exit_code=-1, timed_out=True,
                             detail=f"timed out after {timeout:g} s")
        captured = frozenset(str(p) for p in output_paths if p.exists())
        tail = (proc.stderr or "").strip().splitlines()
        return RunResult(
            exit_code=proc.returncode,
            captured_paths=captured,
            detail=tail[-1] if tail else "",
        )


class ScriptedRunner:
    """Deterministic mock runner for tests; no subprocesses involved.

    ``plan`` maps replication id to a behaviour: ``match`` copies the
    stored expected file to the out path, ``mismatch`` writes a perturbed
    copy, ``exit_error`` returns a nonzero status, ``no_output`` succeeds
    without producing anything, ``timeout`` reports a timeout.
    """

    def __init__(self, root: Path, expected_by_id: dict[str, str], plan: dict[str, str]):
        self.root = Path(root)
        self.expected_by_id = dict(expected_by_id)
        self.plan = dict(plan)
        self.commands_seen: list[str] = []

    @classmethod
    def from_manifest(
        cls, root: Path, manifest: SpotCheckManifest, plan: dict[str, str]
    ) -> "ScriptedRunner":
        expected = {e.id: e.expected_output for e in manifest.entries}
        if manifest.reduced_entries:
            for e in manifest.reduced_entries:
                expected.setdefault(e.id, e.expected_output)
        return cls(root, expected, plan)

    def _entry_id(self, command: str) -> str | None:
        hits = [rid for rid in self.expected_by_id if rid in command]
        if not hits:
            return None
        return max(hits, key=len)

    def run(
        self,
        command: str,
        working_dir: Path,
        timeout: float,
        output_paths: tuple[Path, ...] = (),
    ) -> RunResult:
        self.commands_seen.append(command)
        rid = self._entry_id(command)
        behaviour = self.plan.get(rid or "", "match")
        if behaviour == "timeout":
            return RunResult(exit_code=-1, timed_out=True,
                             detail=f"timed out after {timeout:g} s")
        if behaviour == "exit_error":
            return RunResult(exit_code=3, detail="planned failure")
        if behaviour == "no_output":
            return RunResult(exit_code=0)
        out_path = Path(output_paths[0]) if output_paths else None
        if out_path is None or rid is None:
            return RunResult(exit_code=0)
        expected = self.root / self.expected_by_id[rid]
        if behaviour == "match":
            shutil.copyfile(expected, out_path)
        elif behaviour == "mismatch":
            data = expected.read_bytes()
            perturbed = _perturb(data)
            out_path.write_bytes(perturbed)
        captured = frozenset({str(out_path)}) if out_path.exists() else frozenset()
        return RunResult(exit_code=0, captured_paths=captured)


def _perturb(data: bytes) -> bytes:
    text = None
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        pass
    if text is not None:
        m = re.search(r"-?\d+(?:\.\d+)?", text)
        if m is not None:
            value = float(m.group(0)) + 0.1
            return (text[: m.start()] + repr(value) + text[m.end():]).encode("utf-8")
        return (text + "x").encode("utf-8")
    if data:
        return bytes([data[0] ^ 0xFF]) + data[1:]
    return b"x"


# ---------------------------------------------------------------------------
# Manifest parsing
# ---------------------------------------------------------------------------


def _parse_record(parts: list[str], line_no: int) -> ReplicationEntry:
    if len(parts) != 7:
        raise MalformedManifest(
            f"expected 7 tab-separated fields, got {len(parts)}", line_no
        )
    rid, seed_text, comparator, abs_text, rel_text, expected, template = parts
    if not rid:
        raise MalformedManifest("empty id", line_no)
    if comparator not in COMPARATORS:
        raise MalformedManifest(f"unknown comparator {comparator!r}", line_no)
    try:
        abs_tol = float(abs_text)
        rel_tol = float(rel_text)
    except ValueError:
        raise MalformedManifest("tolerances must be numbers", line_no) from None
    if abs_tol < 0 or rel_tol < 0:
        raise MalformedManifest("tolerances must be nonnegative", line_no)
    if not expected:
        raise MalformedManifest("empty expected_output", line_no)
    leftover = _PLACEHOLDER_RE.sub("", template)
    if "{" in leftover or "}" in leftover:
        raise MalformedManifest("unbalanced braces in command template", line_no)
    for name in _PLACEHOLDER_RE.findall(template):
        if name not in _ALLOWED_PLACEHOLDERS:
            raise MalformedManifest(f"unknown placeholder {{{name}}}", line_no)
    seed: int | str = int(seed_text) if re.fullmatch(r"-?\d+", seed_text) else seed_text
    return ReplicationEntry(rid, seed, template, expected, comparator, abs_tol, rel_tol)


def parse_manifest(text: str) -> SpotCheckManifest:
    """Parse and structurally validate manifest text."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != "spotcheck v1":
        raise MalformedManifest("missing 'spotcheck v1' header", 1)
    entries: list[ReplicationEntry] = []
    reduced: list[ReplicationEntry] | None = None
    n_full: int | None = None
    working_dir = "."
    seen: set[str] = set()
    seen_reduced: set[str] = set()
    for line_no, raw in enumerate(lines[1:], start=2):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line.strip() == "[reduced]":
            if reduced is not None:
                raise MalformedManifest("duplicate [reduced] section", line_no)
            reduced = []
            continue
        if line.startswith("n_full="):
            try:
                n_full = int(line.split("=", 1)[1])
            except ValueError:
                raise MalformedManifest("n_full must be an integer", line_no) from None
            continue
        if line.startswith("working_dir="):
            working_dir = line.split("=", 1)[1].strip() or "."
            continue
        entry = _parse_record(line.split("\t"), line_no)
        if reduced is None:
            if entry.id in seen:
                raise DuplicateId(f"duplicate id {entry.id!r}", line_no)
            seen.add(entry.id)
            entries.append(entry)
        else:
            if entry.id in seen_reduced:
                raise DuplicateId(f"duplicate id {entry.id!r}", line_no)
            seen_reduced.add(entry.id)
            reduced.append(entry)
    if reduced is not None and not reduced:
        raise MalformedManifest("[reduced] section has no entries")
    if n_full is not None and n_full < len(entries):
        raise MalformedManifest(
            f"n_full={n_full} is smaller than the {len(entries)} listed entries"
        )
    return SpotCheckManifest(
        entries=tuple(entries),
        working_dir=working_dir,
        n_full=n_full,
        reduced_entries=tuple(reduced) if reduced is not None else None,
    )


# ---------------------------------------------------------------------------
# Selection
# ---------------------------------------------------------------------------


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31), state


def select_replications(
    manifest: SpotCheckManifest, selection: Selection
) -> list[ReplicationEntry]:
    """Pick the replications to rerun.

    Random selection is a partial Fisher-Yates shuffle over entry indices
    driven by a SplitMix-style 64-bit generator seeded with the audit
    seed: for step i in 0..k-1, draw v, swap index i with
    i + (v mod (n - i)), and take the first k indices in selection order.
    """
    if selection.reduced:
        if not manifest.reduced_entries:
            raise NoReducedSet("manifest has no [reduced] section")
        return list(manifest.reduced_entries)
    if selection.ids is not None:
        by_id = {e.id: e for e in manifest.entries}
        chosen = []
        for rid in selection.ids:
            if rid not in by_id:
                raise UnknownId(rid)
            chosen.append(by_id[rid])
        return chosen
    if selection.random_k is not None:
        n = len(manifest.entries)
        k = selection.random_k
        if k > n:
            raise KTooLarge(f"k={k} exceeds {n} entries")
        indices = list(range(n))
        state = selection.audit_seed & _MASK64
        for i in range(k):
            value, state = _splitmix64(state)
            j = i + value % (n - i)
            indices[i], indices[j] = indices[j], indices[i]
        return [manifest.entries[i] for i in indices[:k]]
    return list(manifest.entries)


# ---------------------------------------------------------------------------
# Comparison
# ---------------------------------------------------------------------------


def _sniff_delimiter(first_line: str) -> str:
    counts = [(first_line.count(","), ","), (first_line.count(";"), ";"), (first_line.count("\t"), "\t")]
    best = max(counts, key=lambda c: c[0])
    return best[1] if best[0] > 0 else ","


def _read_table(path: Path) -> list[list[str]]:
    data = path.read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseFailure(f"{path}: not decodable as UTF-8 ({exc.reason})") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        return []
    delimiter = _sniff_delimiter(lines[0])
    reader = csv.reader(io.StringIO("\n".join(lines)), delimiter=delimiter)
    return [[cell.strip() for cell in row] for row in reader]


def _cells_equal(expected: str, actual: str, abs_tol: float, rel_tol: float) -> tuple[bool, float | None]:
    try:
        b = float(expected)
        a = float(actual)
    except ValueError:
        return (expected == actual, None)
    if a == b:
        return (True, 0.0)
    if math.isnan(a) and math.isnan(b):
        return (True, 0.0)
    delta = abs(a - b)
    return (delta <= abs_tol + rel_tol * abs(b), delta)


def compare_outputs(
    expected: Path,
    actual: Path,
    comparator: str,
    abs_tol: float = 0.0,
    rel_tol: float = 0.0,
) -> tuple[bool, str]:
    """Compare a freshly produced output against the stored one.

    bitwise compares raw bytes; numeric_table parses both files as
    delimiter-separated tables and accepts cellwise
    ``|a - b| <= abs_tol + rel_tol * |b|`` with b the stored value.
    Cells that do not parse as numbers must match exactly.
    """
    expected = Path(expected)
    actual = Path(actual)
    if comparator == "bitwise":
        be = expected.read_bytes()
        ba = actual.read_bytes()
        if be == ba:
            return (True, "")
        limit = min(len(be), len(ba))
        offset = next((i for i in range(limit) if be[i] != ba[i]), limit)
        return (
            False,
            f"first divergent byte at offset {offset} "
            f"(expected {len(be)} bytes, actual {len(ba)} bytes)",
        )
    if comparator != "numeric_table":
        raise ParseFailure(f"unknown comparator {comparator!r}")
    rows_e = _read_table(expected)
    rows_a = _read_table(actual)
    if len(rows_e) != len(rows_a):
        raise DimensionMismatch(f"{len(rows_e)} rows vs {len(rows_a)} rows")
    for r, (row_e, row_a) in enumerate(zip(rows_e, rows_a), start=1):
        if len(row_e) != len(row_a):
            raise DimensionMismatch(
                f"row {r}: {len(row_e)} columns vs {len(row_a)} columns"
            )
        for c, (cell_e, cell_a) in enumerate(zip(row_e, row_a), start=1):
            equal, delta = _cells_equal(cell_e, cell_a, abs_tol, rel_tol)
            if not equal:
                detail = f"row {r}, column {c}: expected {cell_e!r}, actual {cell_a!r}"
                if delta is not None:
                    detail += f" (|delta| = {delta:.6g})"
                return (False, detail)
    return (True, "")


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------


def _run_one(
    entry: ReplicationEntry,
    root: Path,
    working_dir: Path,
    runner,
    timeout: float,
    scratch_base: Path,
) -> SpotCheckOutcome:
    expected = root / entry.expected_output
    if not expected.is_file():
        return SpotCheckOutcome(
            entry.id, SpotCheckStatus.MISSING_EXPECTED,
            f"expected output {entry.expected_output} not found",
        )
    scratch = Path(tempfile.mkdtemp(prefix=f"rep_{entry.id}_", dir=scratch_base))
    try:
        suffix = Path(entry.expected_output).suffix
        out_path = scratch / f"out{suffix}"
        command = (
            entry.command_template
            .replace("{id}", entry.id)
            .replace("{seed}", str(entry.seed))
            .replace("{out}", str(out_path))
        )
        result = runner.run(command, working_dir, timeout, output_paths=(out_path,))
        if result.timed_out:
            return SpotCheckOutcome(entry.id, SpotCheckStatus.EXECUTION_ERROR, result.detail)
        if result.exit_code != 0:
            detail = f"exit status {result.exit_code}"
            if result.detail:
                detail += f": {result.detail}"
            return SpotCheckOutcome(entry.id, SpotCheckStatus.EXECUTION_ERROR, detail)
        if not out_path.exists():
            return SpotCheckOutcome(
                entry.id, SpotCheckStatus.EXECUTION_ERROR, "command produced no output"
            )
        try:
            equal, detail = compare_outputs(
                expected, out_path, entry.comparator, entry.abs_tol, entry.rel_tol
            )
        except (ParseFailure, DimensionMismatch) as exc:
            return SpotCheckOutcome(entry.id, SpotCheckStatus.MISMATCH, str(exc))
        if equal:
            return SpotCheckOutcome(entry.id, SpotCheckStatus.MATCH, "")
        return SpotCheckOutcome(entry.id, SpotCheckStatus.MISMATCH, detail)
    finally:
        shutil.rmtree(scratch, ignore_errors=True)


def run_spotcheck(
    manifest: SpotCheckManifest,
    selected: list[ReplicationEntry],
    runner,
    timeout_per_rep: float = DEFAULT_TIMEOUT_SECONDS,
    root: Path = Path("."),
    jobs: int = 1,
) -> list[SpotCheckOutcome]:
    """Execute the selected replications; outcomes follow manifest order."""
    root = Path(root)
    working_dir = (root / manifest.working_dir).resolve()
    scratch_base = Path(tempfile.mkdtemp(prefix="spotcheck_"))
    position: dict[str, int] = {}
    for i, e in enumerate(manifest.entries):
        position.setdefault(e.id, i)
    for j, e in enumerate(manifest.reduced_entries or ()):
        position.setdefault(e.id, len(manifest.entries) + j)
    try:
        if jobs <= 1:
            outcomes = [
                _run_one(e, root, working_dir, runner, timeout_per_rep, scratch_base)
                for e in selected
            ]
        else:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                outcomes = list(
                    pool.map(
                        lambda e: _run_one(
                            e, root, working_dir, runner, timeout_per_rep, scratch_base
                        ),
                        selected,
                    )
                )
    finally:
        shutil.rmtree(scratch_base, ignore_errors=True)
    outcomes.sort(key=lambda o: position.get(o.id, len(position)))
    return outcomes
