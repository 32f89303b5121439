import pytest
from hypothesis import given, strategies as st

from repro_audit.errors import UnknownDialect
from repro_audit.script_scanner import (
    decode_script,
    detect_absolute,
    pattern_tables,
    scan_script,
)
from repro_audit.supplement import ArtifactKind, ArtifactLabel, FileClass, FileEntry


def r_entry(rel_path="code/a.R"):
    return FileEntry(rel_path, 0, FileClass.CODE, "r")


def py_entry(rel_path="code/a.py"):
    return FileEntry(rel_path, 0, FileClass.CODE, "py")


def test_r_seed_and_rng():
    facts = scan_script(r_entry(), "set.seed(1234)\nx <- rnorm(10)\n")
    assert [(c.line, c.pattern, c.argument_literal) for c in facts.seed_calls] == [
        (1, "set.seed", "1234")
    ]
    assert facts.rng_uses == ((2, "rnorm"),)


def test_py_default_rng_seed():
    facts = scan_script(py_entry(), "rng = numpy.random.default_rng(1234)\n")
    assert [(c.line, c.pattern, c.argument_literal) for c in facts.seed_calls] == [
        (1, "default_rng", "1234")
    ]


def test_non_literal_seed_argument_recorded_as_none():
    facts = scan_script(r_entry(), "seed <- get_seed()\nset.seed(seed)\n")
    assert facts.seed_calls[0].argument_literal is None


def test_drive_letter_path_literal():
    facts = scan_script(r_entry(), 'setwd("C:/Users/a/proj")\n')
    lit = facts.path_literals[0]
    assert (lit.line, lit.value, lit.absolute, lit.kind) == (
        1, "C:/Users/a/proj", True, "drive_letter",
    )


def test_artifact_comment_detected():
    facts = scan_script(r_entry(), "# Produces Figure 2\nplot(x)\n")
    assert facts.artifact_comments == ((1, ArtifactLabel(ArtifactKind.FIGURE, 2)),)


def test_ide_api_use():
    facts = scan_script(r_entry(), "library(rstudioapi)\n")
    assert facts.ide_api_uses == ((1, "rstudioapi"),)


def test_parallel_without_safe_stream():
    facts = scan_script(r_entry(), "mclapply(1:10, f)\n")
    assert len(facts.parallel_uses) == 1
    use = facts.parallel_uses[0]
    assert (use.line, use.construct_token, use.safe_stream_evidence) == (1, "mclapply", False)


def test_safe_stream_marker_is_file_scoped():
    text = "registerDoRNG(42)\nres <- mclapply(1:10, f)\n"
    facts = scan_script(r_entry(), text)
    assert facts.parallel_uses[0].safe_stream_evidence


def test_safe_stream_evidence_monotone_under_marker_insertion():
    base = "res <- mclapply(1:10, f)\n"
    for marker in ("registerDoRNG(1)\n", "cl <- clusterSetRNGStream(cl, 1)\n"):
        before = scan_script(r_entry(), base)
        after = scan_script(r_entry(), marker + base)
        assert not before.parallel_uses[0].safe_stream_evidence
        assert after.parallel_uses[0].safe_stream_evidence


def test_future_seed_marker():
    text = "y <- future_lapply(1:2, f, future.seed = TRUE)\n"
    facts = scan_script(r_entry(), text)
    assert facts.parallel_uses[0].safe_stream_evidence


def test_py_seedsequence_spawn_marks_pool_safe():
    text = (
        "ss = np.random.SeedSequence(7)\n"
        "children = ss.spawn(4)\n"
        "with Pool(4) as pool:\n"
        "    pass\n"
    )
    facts = scan_script(py_entry(), text)
    pool_use = [p for p in facts.parallel_uses if p.construct_token == "Pool"][0]
    assert pool_use.safe_stream_evidence


def test_output_write_with_inferred_label():
    facts = scan_script(
        r_entry(), 'write.csv(tab, "results/tables/table_1.csv", row.names = FALSE)\n'
    )
    write = facts.output_writes[0]
    assert write.writer_token == "write.csv"
    assert write.target_literal == "results/tables/table_1.csv"
    assert write.inferred_label == ArtifactLabel(ArtifactKind.TABLE, 1)


def test_detectors_ignore_strings_and_comments():
    text = (
        'msg <- "call set.seed(1) and rnorm(10) please"\n'
        "# a comment about mclapply and setwd\n"
        "x <- 1\n"
    )
    facts = scan_script(r_entry(), text)
    assert facts.seed_calls == ()
    assert facts.rng_uses == ()
    assert facts.parallel_uses == ()


def test_path_detection_only_inside_strings():
    facts = scan_script(r_entry(), 'read.csv("data/d.csv")\n# see /etc/passwd\n')
    assert [p.value for p in facts.path_literals] == ["data/d.csv"]
    assert not facts.path_literals[0].absolute


def test_imports_r_and_py():
    facts = scan_script(r_entry(), "library(ggplot2)\nrequire(dplyr)\nstats::sd(x)\n")
    assert sorted(ref.package for ref in facts.imports) == ["dplyr", "ggplot2", "stats"]

    facts = scan_script(
        py_entry(), "import numpy as np\nimport os, sys\nfrom pandas.io import api\n"
    )
    assert sorted(ref.package for ref in facts.imports) == ["numpy", "os", "pandas", "sys"]


def test_manual_edit_marker():
    facts = scan_script(r_entry(), "# TODO: set path to your data directory\n")
    assert facts.manual_edit_markers[0][0] == 1


def test_style_metrics_counts():
    text = "x<-1\nf(a,b)\ny <- c(1, 2)\n# comment\n"
    facts = scan_script(r_entry(), text)
    assert facts.style.lines == 4
    assert facts.style.comment_lines == 1
    assert facts.style.comma_space_violations == 1
    assert facts.style.operator_space_violations == 1


def test_style_ignores_exponents_and_unary_minus():
    text = "x <- 1e-5\ny <- -2\nz <- x * -1\n"
    facts = scan_script(r_entry(), text)
    assert facts.style.operator_space_violations == 0


def test_function_blocks_and_docs():
    text = (
        "# Adds one.\n"
        "add_one <- function(x) {\n"
        "  x + 1\n"
        "}\n"
        "undocumented <- function(y) {\n"
        "  y\n"
        "}\n"
    )
    facts = scan_script(r_entry(), text)
    assert facts.function_defs == 2
    documented = {b.line: b.documented for b in facts.function_blocks}
    assert documented == {2: True, 5: False}
    assert facts.style.longest_function_lines == 3


def test_py_docstring_counts_as_documentation():
    text = 'def f(x):\n    """Doc."""\n    return x\n\ndef g(y):\n    return y\n'
    facts = scan_script(py_entry(), text)
    documented = {b.line: b.documented for b in facts.function_blocks}
    assert documented == {1: True, 5: False}


def test_unknown_dialect_only_paths_and_style():
    entry = FileEntry("code/run.sh", 0, FileClass.CODE, "shell")
    facts = scan_script(entry, 'cp "/abs/path" out\nrnorm(10)\n')
    assert facts.seed_calls == () and facts.rng_uses == ()
    assert [p.value for p in facts.path_literals] == ["/abs/path"]
    assert facts.style.lines == 2


def test_binary_content_yields_io_note():
    text, note = decode_script(b"\x00\x01\x02")
    assert text == "" and note == "binary content"
    text, note = decode_script("x <- 1\n".encode("utf-8"))
    assert note is None


def test_scan_is_deterministic():
    text = (
        "set.seed(1)\nx <- rnorm(5)\nwrite.csv(x, 'results/tables/table_1.csv')\n"
    )
    assert scan_script(r_entry(), text) == scan_script(r_entry(), text)


@pytest.mark.parametrize(
    "value, expected",
    [
        ("/home/a/x.csv", (True, "posix_root")),
        ("~/data/x.csv", (True, "home_tilde")),
        ("C:\\Users\\a", (True, "drive_letter")),
        ("\\\\server\\share", (True, "unc")),
        ("data/x.csv", (False, None)),
        ("https://example.org/d.csv", (False, None)),
        ("ftp://host/file", (False, None)),
    ],
)
def test_detect_absolute(value, expected):
    assert detect_absolute(value) == expected


@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=40))
def test_prefixing_slash_makes_any_string_absolute(value):
    assert detect_absolute("/" + value)[0]


def test_pattern_tables_contents():
    assert "set.seed" in pattern_tables("r").seed_patterns
    assert "default_rng" in pattern_tables("py").seed_patterns
    with pytest.raises(UnknownDialect):
        pattern_tables("shell")
