"""Lexical fact extraction from analysis scripts.

A minimal dialect-aware lexer masks out comments and string literals,
then data-driven token tables drive every detector over the masked code.
String contents are scanned only for path literals, comments only for
artifact labels and manual-edit markers. No parsing or execution.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass

from .errors import UnknownDialect
from .supplement import ArtifactKind, ArtifactLabel, FileEntry, extract_artifact_label

# ---------------------------------------------------------------------------
# Facts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImportRef:
    line: int
    package: str


@dataclass(frozen=True)
class SeedCall:
    line: int
    pattern: str
    argument_literal: str | None = None


@dataclass(frozen=True)
class PathLiteral:
    line: int
    value: str
    absolute: bool
    kind: str | None = None


@dataclass(frozen=True)
class OutputWrite:
    line: int
    writer_token: str
    target_literal: str | None = None
    inferred_label: ArtifactLabel | None = None


@dataclass(frozen=True)
class ParallelUse:
    line: int
    construct_token: str
    safe_stream_evidence: bool = False


@dataclass(frozen=True)
class FunctionBlock:
    line: int
    end_line: int
    documented: bool = False

    @property
    def n_lines(self) -> int:
        return self.end_line - self.line + 1


@dataclass(frozen=True)
class StyleMetrics:
    lines: int = 0
    comment_lines: int = 0
    comma_space_violations: int = 0
    operator_space_violations: int = 0
    longest_function_lines: int = 0


@dataclass(frozen=True)
class ScriptFacts:
    rel_path: str
    dialect: str
    imports: tuple[ImportRef, ...] = ()
    seed_calls: tuple[SeedCall, ...] = ()
    rng_uses: tuple[tuple[int, str], ...] = ()
    path_literals: tuple[PathLiteral, ...] = ()
    output_writes: tuple[OutputWrite, ...] = ()
    artifact_comments: tuple[tuple[int, ArtifactLabel], ...] = ()
    parallel_uses: tuple[ParallelUse, ...] = ()
    ide_api_uses: tuple[tuple[int, str], ...] = ()
    style: StyleMetrics = StyleMetrics()
    function_defs: int = 0
    function_blocks: tuple[FunctionBlock, ...] = ()
    manual_edit_markers: tuple[tuple[int, str], ...] = ()
    io_note: str | None = None

    @property
    def function_def_lines_total(self) -> int:
        return sum(b.n_lines for b in self.function_blocks)


def empty_facts(rel_path: str, dialect: str, io_note: str | None = None) -> ScriptFacts:
    return ScriptFacts(rel_path=rel_path, dialect=dialect, io_note=io_note)


# ---------------------------------------------------------------------------
# Detector tables (data, versioned with the package)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DialectTables:
    dialect: str
    seed_patterns: tuple[str, ...]
    rng_patterns: tuple[str, ...]
    parallel_patterns: tuple[str, ...]
    fork_patterns: tuple[str, ...]
    safe_stream_markers: tuple[str, ...]
    ide_patterns: tuple[str, ...]
    writer_patterns: tuple[str, ...]


_TABLES = {
    "r": DialectTables(
        dialect="r",
        seed_patterns=("set.seed",),
        rng_patterns=("rnorm", "runif", "rbinom", "sample", "rexp", "rpois"),
        parallel_patterns=("mclapply", "parLapply", "future_lapply", "future_map", "%dopar%"),
        fork_patterns=("mclapply",),
        safe_stream_markers=(
            "registerDoRNG",
            "doRNG",
            "%dorng%",
            "clusterSetRNGStream",
            "future.seed=TRUE",
        ),
        ide_patterns=("rstudioapi", "readClipboard", "writeClipboard"),
        writer_patterns=("ggsave", "pdf", "png", "write.csv", "write_csv", "saveRDS"),
    ),
    "py": DialectTables(
        dialect="py",
        seed_patterns=("default_rng", "seed", "SeedSequence"),
        rng_patterns=(".random.", "normal(", "choice(", "shuffle("),
        parallel_patterns=("Pool(", "ProcessPoolExecutor", "Parallel("),
        fork_patterns=("Pool(", "os.fork"),
        safe_stream_markers=("SeedSequence", "spawn(", "default_rng(child"),
        ide_patterns=("get_ipython(",),
        writer_patterns=("savefig", "to_csv", "to_parquet"),
    ),
}

MANUAL_EDIT_MARKERS = (
    "todo: set",
    "todo set",
    "change this",
    "edit this",
    "set your",
    "your path",
    "adjust path",
    "fill in",
)

_LABEL_IN_COMMENT_RE = re.compile(r"\b(figure|table)[\s_]+(\d+)\b", re.IGNORECASE)
_URL_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*://")
_DRIVE_RE = re.compile(r"^[A-Za-z]:[\\/]")


def pattern_tables(dialect: str) -> DialectTables:
    """Detector token tables for a dialect; raises for unsupported ones."""
    try:
        return _TABLES[dialect]
    except KeyError:
        raise UnknownDialect(dialect) from None


# ---------------------------------------------------------------------------
# Masking lexer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _StringLit:
    line: int
    offset: int
    content: str


@dataclass(frozen=True)
class _Comment:
    line: int
    text: str


def _mask_source(text: str, dialect: str) -> tuple[str, list[_StringLit], list[_Comment]]:
    """Blank strings and comments out of the source, preserving layout.

    Returns the masked code (same length, newlines kept) plus the string
    literals and comment texts that were removed. Single-quoted strings
    terminate at end of line; Python triple-quoted strings span lines.
    """
    masked = list(text)
    strings: list[_StringLit] = []
    comments: list[_Comment] = []
    i = 0
    n = len(text)
    line = 1

    def blank(start: int, stop: int) -> None:
        for j in range(start, stop):
            if masked[j] != "\n":
                masked[j] = " "

    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
            continue
        if ch == "#":
            end = text.find("\n", i)
            if end == -1:
                end = n
            comments.append(_Comment(line, text[i:end]))
            blank(i, end)
            i = end
            continue
        if dialect == "py" and text[i : i + 3] in ("'''", '"""'):
            quote = text[i : i + 3]
            close = text.find(quote, i + 3)
            if close == -1:
                close = n
                content_end = n
            else:
                content_end = close
                close += 3
            content = text[i + 3 : content_end]
            strings.append(_StringLit(line, i + 3, content))
            line += text.count("\n", i, close)
            blank(i, close)
            i = close
            continue
        if ch in "'\"":
            j = i + 1
            while j < n and text[j] not in (ch, "\n"):
                if text[j] == "\\" and j + 1 < n and text[j + 1] != "\n":
                    j += 1
                j += 1
            content = text[i + 1 : j]
            strings.append(_StringLit(line, i + 1, content))
            stop = j + 1 if j < n and text[j] == ch else j
            blank(i, stop)
            i = stop
            continue
        i += 1

    return "".join(masked), strings, comments


def _line_starts(text: str) -> list[int]:
    starts = [0]
    for i, ch in enumerate(text):
        if ch == "\n":
            starts.append(i + 1)
    return starts


def _line_of(starts: list[int], offset: int) -> int:
    return bisect_right(starts, offset)


def _matching_paren(masked: str, open_idx: int, limit: int = 4000) -> int | None:
    depth = 0
    stop = min(len(masked), open_idx + limit)
    for i in range(open_idx, stop):
        if masked[i] == "(":
            depth += 1
        elif masked[i] == ")":
            depth -= 1
            if depth == 0:
                return i
    return None


# ---------------------------------------------------------------------------
# Absolute path predicate
# ---------------------------------------------------------------------------


def detect_absolute(value: str) -> tuple[bool, str | None]:
    """Classify a string literal's content as an absolute path or not.

    URLs (any ``scheme://`` prefix) are never absolute paths.
    """
    if _URL_RE.match(value):
        return (False, None)
    if value.startswith("/"):
        return (True, "posix_root")
    if value.startswith("~"):
        return (True, "home_tilde")
    if _DRIVE_RE.match(value):
        return (True, "drive_letter")
    if value.startswith("\\\\"):
        return (True, "unc")
    return (False, None)


def _path_literals(strings: list[_StringLit]) -> tuple[PathLiteral, ...]:
    out = []
    for lit in strings:
        value = lit.content
        if "://" in value:
            continue
        absolute, kind = detect_absolute(value)
        if absolute:
            out.append(PathLiteral(lit.line, value, True, kind))
        elif "/" in value or "\\" in value:
            out.append(PathLiteral(lit.line, value, False, None))
    return tuple(out)


# ---------------------------------------------------------------------------
# Style metrics
# ---------------------------------------------------------------------------

_MULTI_OPS = ("<<-", "->>", "<-", "->", "==", "<=", ">=", "!=")
_SINGLE_OPS = "=+-*/<>"
_CHECKED_OPS = {"<-", "=", "+", "-", "*", "/", "==", "<", ">"}
_UNARY_CONTEXT = set("([{,=<>+-*/&|^~!")


def _count_operator_violations(code_line: str, dialect: str) -> int:
    violations = 0
    i = 0
    n = len(code_line)
    prev_nonspace: str | None = None
    while i < n:
        ch = code_line[i]
        if ch in " \t":
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and code_line[i + 1].isdigit()):
            m = re.match(r"\d*\.?\d+(?:[eE][+-]?\d+)?", code_line[i:])
            i += m.end()
            prev_nonspace = "0"
            continue
        if ch.isalpha() or ch == "_":
            m = re.match(r"[\w.]+" if dialect == "r" else r"\w+", code_line[i:])
            i += m.end()
            prev_nonspace = "a"
            continue
        if dialect == "r" and ch == "%":
            m = re.match(r"%[^%\n]*%", code_line[i:])
            if m is not None:
                i += m.end()
                prev_nonspace = "%"
                continue
        op = None
        for candidate in _MULTI_OPS:
            if code_line.startswith(candidate, i):
                op = candidate
                break
        if op is None and ch in _SINGLE_OPS:
            op = ch
        if op is None:
            prev_nonspace = ch
            i += 1
            continue
        if op in _CHECKED_OPS:
            unary = op in "+-" and (prev_nonspace is None or prev_nonspace in _UNARY_CONTEXT)
            if not unary:
                before_ok = i == 0 or code_line[i - 1] in " \t"
                after = i + len(op)
                after_ok = after >= n or code_line[after] in " \t"
                if not (before_ok and after_ok):
                    violations += 1
        prev_nonspace = op[-1]
        i += len(op)
    return violations


def _style_metrics(
    text: str, masked: str, dialect: str, blocks: tuple[FunctionBlock, ...]
) -> StyleMetrics:
    source_lines = text.splitlines()
    comment_lines = sum(1 for ln in source_lines if ln.lstrip().startswith("#"))
    comma_violations = 0
    operator_violations = 0
    for code_line in masked.splitlines():
        for i, ch in enumerate(code_line):
            if ch == "," and i + 1 < len(code_line):
                if code_line[i + 1] not in " \t)]}":
                    comma_violations += 1
        operator_violations += _count_operator_violations(code_line, dialect)
    longest = max((b.n_lines for b in blocks), default=0)
    return StyleMetrics(
        lines=len(source_lines),
        comment_lines=comment_lines,
        comma_space_violations=comma_violations,
        operator_space_violations=operator_violations,
        longest_function_lines=longest,
    )


# ---------------------------------------------------------------------------
# Function blocks
# ---------------------------------------------------------------------------

_R_FUNCTION_RE = re.compile(r"^[\w.]+\s*(?:<-|=)\s*function\s*\(")
_PY_FUNCTION_RE = re.compile(r"^(?:async\s+)?def\s+\w+")


def _comment_line_set(comments: list[_Comment], source_lines: list[str]) -> set[int]:
    own_line = set()
    for c in comments:
        idx = c.line - 1
        if 0 <= idx < len(source_lines) and source_lines[idx].lstrip().startswith("#"):
            own_line.add(c.line)
    return own_line


def _r_function_blocks(
    masked_lines: list[str], comment_lines: set[int]
) -> tuple[FunctionBlock, ...]:
    blocks = []
    for idx, line in enumerate(masked_lines):
        if _R_FUNCTION_RE.match(line) is None:
            continue
        depth = 0
        end_idx = idx
        opened = False
        for j in range(idx, len(masked_lines)):
            depth += masked_lines[j].count("{") - masked_lines[j].count("}")
            if "{" in masked_lines[j]:
                opened = True
            if opened and depth <= 0:
                end_idx = j
                break
        else:
            end_idx = len(masked_lines) - 1 if opened else idx
        documented = (idx) in comment_lines  # comment on the line directly above
        blocks.append(FunctionBlock(idx + 1, end_idx + 1, documented))
    return tuple(blocks)


def _py_function_blocks(
    masked_lines: list[str],
    comment_lines: set[int],
    strings: list[_StringLit],
) -> tuple[FunctionBlock, ...]:
    string_start_lines = {s.line for s in strings}
    blocks = []
    starts = [
        i for i, line in enumerate(masked_lines) if _PY_FUNCTION_RE.match(line) is not None
    ]
    for idx in starts:
        end_idx = idx
        for j in range(idx + 1, len(masked_lines)):
            line = masked_lines[j]
            if line.strip() and not line[0] in " \t":
                break
            if line.strip():
                end_idx = j
        documented = (idx) in comment_lines
        if not documented:
            for j in range(idx + 1, min(idx + 3, len(masked_lines)) + 1):
                if j + 1 in string_start_lines:
                    documented = True
                    break
                if j < len(masked_lines) and masked_lines[j].strip():
                    break
        blocks.append(FunctionBlock(idx + 1, end_idx + 1, documented))
    return tuple(blocks)


# ---------------------------------------------------------------------------
# Code detectors
# ---------------------------------------------------------------------------


def _squash(masked: str) -> str:
    return re.sub(r"[ \t]+", "", masked)


def _call_sites(masked: str, name: str, dot_ok: bool = False) -> list[int]:
    """Offsets where ``name`` occurs as a call token (not mid-identifier).

    With ``dot_ok`` a preceding dot is allowed, so the name matches as the
    last component of a dotted method chain.
    """
    behind = r"(?<!\w)" if dot_ok else r"(?<![\w.])"
    pattern = re.compile(behind + re.escape(name) + r"\s*\(")
    return [m.start() for m in pattern.finditer(masked)]


def _token_sites(masked: str, name: str, dot_ok: bool = False) -> list[int]:
    behind = r"(?<!\w)" if dot_ok else r"(?<![\w.])"
    pattern = re.compile(behind + re.escape(name) + r"(?![\w.])")
    return [m.start() for m in pattern.finditer(masked)]


def _argument_literal(text: str, masked: str, site: int) -> str | None:
    open_idx = masked.find("(", site)
    if open_idx == -1:
        return None
    close_idx = _matching_paren(masked, open_idx)
    if close_idx is None:
        return None
    raw = text[open_idx + 1 : close_idx].strip()
    if re.fullmatch(r"-?\d+", raw):
        return raw
    if re.fullmatch(r"\"[^\"]*\"|'[^']*'", raw):
        return raw
    return None


def _first_string_in_call(
    masked: str, strings: list[_StringLit], site: int
) -> str | None:
    open_idx = masked.find("(", site)
    if open_idx == -1:
        return None
    close_idx = _matching_paren(masked, open_idx)
    if close_idx is None:
        close_idx = len(masked)
    for lit in strings:
        if open_idx < lit.offset < close_idx:
            return lit.content
    return None


def _scan_r(
    text: str, masked: str, strings: list[_StringLit], starts: list[int]
) -> dict:
    tables = pattern_tables("r")
    squashed = _squash(masked)
    out: dict = {}

    seeds = []
    for site in _call_sites(masked, "set.seed"):
        seeds.append(
            SeedCall(_line_of(starts, site), "set.seed", _argument_literal(text, masked, site))
        )
    out["seed_calls"] = tuple(seeds)

    rng = []
    for name in tables.rng_patterns:
        for site in _call_sites(masked, name):
            rng.append((_line_of(starts, site), name))
    out["rng_uses"] = tuple(sorted(set(rng)))

    has_safe_marker = False
    for marker in tables.safe_stream_markers:
        if "=" in marker or "%" in marker:
            if marker.replace(" ", "") in squashed or marker in masked:
                has_safe_marker = True
        elif _token_sites(masked, marker):
            has_safe_marker = True
    parallel = []
    for name in tables.parallel_patterns:
        sites = (
            [m.start() for m in re.finditer(re.escape(name), masked)]
            if name.startswith("%")
            else _call_sites(masked, name)
        )
        for site in sites:
            parallel.append(ParallelUse(_line_of(starts, site), name, has_safe_marker))
    out["parallel_uses"] = tuple(sorted(parallel, key=lambda p: (p.line, p.construct_token)))

    ide = []
    for name in tables.ide_patterns:
        for site in _token_sites(masked, name):
            ide.append((_line_of(starts, site), name))
    out["ide_api_uses"] = tuple(sorted(set(ide)))

    writes = []
    for name in tables.writer_patterns:
        for site in _call_sites(masked, name):
            target = _first_string_in_call(masked, strings, site)
            label = None
            if target is not None:
                label = extract_artifact_label(target.replace("\\", "/").rsplit("/", 1)[-1])
            writes.append(OutputWrite(_line_of(starts, site), name, target, label))
    out["output_writes"] = tuple(sorted(writes, key=lambda w: (w.line, w.writer_token)))

    imports = []
    for m in re.finditer(
        r"(?<![\w.])(?:library|require|requireNamespace)\s*\(\s*([A-Za-z][\w.]*)\s*[),]",
        masked,
    ):
        imports.append(ImportRef(_line_of(starts, m.start()), m.group(1)))
    for m in re.finditer(r"(?<![\w.:])([A-Za-z][\w.]*)::", masked):
        imports.append(ImportRef(_line_of(starts, m.start()), m.group(1)))
    out["imports"] = imports
    return out


def _scan_py(
    text: str, masked: str, strings: list[_StringLit], starts: list[int]
) -> dict:
    tables = pattern_tables("py")
    squashed = _squash(masked)
    out: dict = {}

    seeds = []
    for site in _call_sites(masked, "default_rng", dot_ok=True):
        seeds.append(
            SeedCall(_line_of(starts, site), "default_rng", _argument_literal(text, masked, site))
        )
    for m in re.finditer(r"\.seed\s*\(", masked):
        seeds.append(
            SeedCall(_line_of(starts, m.start()), "seed", _argument_literal(text, masked, m.start()))
        )
    for site in _call_sites(masked, "SeedSequence", dot_ok=True):
        seeds.append(
            SeedCall(_line_of(starts, site), "SeedSequence", _argument_literal(text, masked, site))
        )
    out["seed_calls"] = tuple(sorted(seeds, key=lambda s: (s.line, s.pattern)))

    rng = []
    chain_spans = []
    for m in re.finditer(r"[\w.]*\.random\.[\w.]*", masked):
        chain_spans.append((m.start(), m.end()))
        rng.append((_line_of(starts, m.start()), m.group(0)))
    for m in re.finditer(r"\.(normal|choice|shuffle)\s*\(", masked):
        if any(s <= m.start() < e for s, e in chain_spans):
            continue
        rng.append((_line_of(starts, m.start()), m.group(1)))
    out["rng_uses"] = tuple(sorted(set(rng)))

    has_safe_marker = bool(_token_sites(masked, "SeedSequence", dot_ok=True))
    if re.search(r"\.spawn\s*\(", masked) is not None:
        has_safe_marker = True
    if "default_rng(child" in squashed:
        has_safe_marker = True
    parallel = []
    for site in _call_sites(masked, "Pool", dot_ok=True):
        parallel.append(ParallelUse(_line_of(starts, site), "Pool", has_safe_marker))
    for site in _token_sites(masked, "ProcessPoolExecutor", dot_ok=True):
        parallel.append(ParallelUse(_line_of(starts, site), "ProcessPoolExecutor", has_safe_marker))
    for site in _call_sites(masked, "Parallel", dot_ok=True):
        parallel.append(ParallelUse(_line_of(starts, site), "Parallel", has_safe_marker))
    out["parallel_uses"] = tuple(sorted(parallel, key=lambda p: (p.line, p.construct_token)))

    ide = []
    for site in _call_sites(masked, "get_ipython", dot_ok=True):
        ide.append((_line_of(starts, site), "get_ipython"))
    out["ide_api_uses"] = tuple(sorted(set(ide)))

    writes = []
    for m in re.finditer(r"\.(savefig|to_csv|to_parquet)\s*\(", masked):
        target = _first_string_in_call(masked, strings, m.start())
        label = None
        if target is not None:
            label = extract_artifact_label(target.replace("\\", "/").rsplit("/", 1)[-1])
        writes.append(
            OutputWrite(_line_of(starts, m.start()), m.group(1), target, label)
        )
    out["output_writes"] = tuple(sorted(writes, key=lambda w: (w.line, w.writer_token)))

    imports = []
    for idx, line in enumerate(masked.splitlines(), start=1):
        m = re.match(r"^\s*import\s+(.+)$", line)
        if m is not None:
            for piece in m.group(1).split(","):
                head = piece.strip().split(" ")[0].split(".")[0]
                if head:
                    imports.append(ImportRef(idx, head))
            continue
        m = re.match(r"^\s*from\s+([\w.]+)\s+import\b", line)
        if m is not None:
            head = m.group(1).split(".")[0]
            if head:
                imports.append(ImportRef(idx, head))
    out["imports"] = imports
    return out


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------


def decode_script(data: bytes) -> tuple[str, str | None]:
    """Decode script bytes; binary or undecodable content yields a note."""
    if b"\x00" in data:
        return "", "binary content"
    try:
        return data.decode("utf-8"), None
    except UnicodeDecodeError as exc:
        return "", f"undecodable content: {exc.reason}"


def scan_script(entry: FileEntry, text: str) -> ScriptFacts:
    """Run every detector over one script in a single masked pass."""
    dialect = entry.dialect or "unknown"
    masked, strings, comments = _mask_source(text, dialect)
    starts = _line_starts(text)
    source_lines = text.splitlines()
    masked_lines = masked.splitlines()
    comment_line_set = _comment_line_set(comments, source_lines)

    artifact_comments = []
    markers = []
    for c in comments:
        for m in _LABEL_IN_COMMENT_RE.finditer(c.text):
            number = int(m.group(2))
            if number >= 1:
                label = ArtifactLabel(ArtifactKind(m.group(1).lower()), number)
                if (c.line, label) not in artifact_comments:
                    artifact_comments.append((c.line, label))
        lowered = c.text.lower()
        for marker in MANUAL_EDIT_MARKERS:
            if marker in lowered:
                markers.append((c.line, marker))
                break

    if dialect == "r":
        blocks = _r_function_blocks(masked_lines, comment_line_set)
        detected = _scan_r(text, masked, strings, starts)
    elif dialect == "py":
        blocks = _py_function_blocks(masked_lines, comment_line_set, strings)
        detected = _scan_py(text, masked, strings, starts)
    else:
        blocks = ()
        detected = {}

    style = _style_metrics(text, masked, dialect, blocks)

    deduped_imports: dict[str, ImportRef] = {}
    for ref in detected.get("imports", []):
        if ref.package not in deduped_imports:
            deduped_imports[ref.package] = ref

    return ScriptFacts(
        rel_path=entry.rel_path,
        dialect=dialect,
        imports=tuple(sorted(deduped_imports.values(), key=lambda r: (r.line, r.package))),
        seed_calls=detected.get("seed_calls", ()),
        rng_uses=detected.get("rng_uses", ()),
        path_literals=_path_literals(strings),
        output_writes=detected.get("output_writes", ()),
        artifact_comments=tuple(artifact_comments),
        parallel_uses=detected.get("parallel_uses", ()),
        ide_api_uses=detected.get("ide_api_uses", ()),
        style=style,
        function_defs=len(blocks),
        function_blocks=blocks,
        manual_edit_markers=tuple(markers),
    )
