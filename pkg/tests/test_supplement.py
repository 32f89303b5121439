import pytest
from hypothesis import given, strategies as st

from repro_audit.errors import RootMissing
from repro_audit.supplement import (
    ArtifactKind,
    ArtifactLabel,
    FileClass,
    ScanConfig,
    classify_file,
    extract_artifact_label,
    render_artifact_name,
    scan_supplement,
)

from conftest import SUPPLEMENTS


def test_empty_directory_scans_to_empty_inventory(tmp_path):
    inv = scan_supplement(ScanConfig(tmp_path))
    assert len(inv.entries) == 0
    assert all(count == 0 for count in inv.class_counts.values())


def test_missing_root_raises(tmp_path):
    with pytest.raises(RootMissing):
        scan_supplement(ScanConfig(tmp_path / "nope"))


def test_compliant_fixture_inventory_counts():
    inv = scan_supplement(ScanConfig(SUPPLEMENTS / "fix_compliant"))
    assert len(inv.entries) == 8
    expected = {
        FileClass.README: 1,
        FileClass.CODE: 2,
        FileClass.DATA: 1,
        FileClass.CODEBOOK: 1,
        FileClass.FIGURE_OUTPUT: 1,
        FileClass.TABLE_OUTPUT: 1,
        FileClass.INTERMEDIATE_RESULT: 1,
    }
    for file_class, count in expected.items():
        assert inv.class_counts[file_class] == count
    assert inv.class_counts[FileClass.OTHER] == 0


def test_scan_is_deterministic_and_sorted():
    config = ScanConfig(SUPPLEMENTS / "fix_compliant")
    first = scan_supplement(config)
    second = scan_supplement(config)
    assert first == second
    paths = [e.rel_path for e in first.entries]
    assert paths == sorted(paths, key=lambda p: p.encode("utf-8"))


def test_ignore_globs_drop_matching_segments(tmp_path):
    (tmp_path / ".git").mkdir()
    (tmp_path / ".git" / "config").write_text("x")
    (tmp_path / "code").mkdir()
    (tmp_path / "code" / "a.R").write_text("x <- 1\n")
    inv = scan_supplement(ScanConfig(tmp_path))
    assert [e.rel_path for e in inv.entries] == ["code/a.R"]


def test_symlinks_skipped_by_default(tmp_path):
    (tmp_path / "real.csv").write_text("a\n")
    (tmp_path / "link.csv").symlink_to(tmp_path / "real.csv")
    inv = scan_supplement(ScanConfig(tmp_path))
    assert [e.rel_path for e in inv.entries] == ["real.csv"]


@pytest.mark.parametrize(
    "rel_path, expected",
    [
        ("code/analysis.R", FileClass.CODE),
        ("code/analysis.py", FileClass.CODE),
        ("code/run.sh", FileClass.CODE),
        ("results/figures/figure_1.pdf", FileClass.FIGURE_OUTPUT),
        ("results/tables/table_2.csv", FileClass.TABLE_OUTPUT),
        ("results/intermediate/rep_0001.rds", FileClass.INTERMEDIATE_RESULT),
        ("data/codebook.csv", FileClass.CODEBOOK),
        ("data/d.csv", FileClass.DATA),
        ("other/d.parquet", FileClass.DATA),
        ("README.md", FileClass.README),
        ("readme", FileClass.README),
        ("docs/README.md", FileClass.DOCUMENT),
        ("renv.lock", FileClass.ENVIRONMENT_SPEC),
        ("DESCRIPTION", FileClass.ENVIRONMENT_SPEC),
        ("Dockerfile", FileClass.ENVIRONMENT_SPEC),
        ("paper.pdf", FileClass.DOCUMENT),
        ("notes.txt", FileClass.OTHER),
    ],
)
def test_classification_precedence(rel_path, expected):
    assert classify_file(rel_path) is expected


def test_code_dialects():
    inv = scan_supplement(ScanConfig(SUPPLEMENTS / "fix_compliant"))
    dialects = {e.rel_path: e.dialect for e in inv.entries if e.file_class is FileClass.CODE}
    assert dialects == {"code/01_sim.R": "r", "code/02_figs.R": "r"}


@pytest.mark.parametrize(
    "name, expected",
    [
        ("figure_1.pdf", ArtifactLabel(ArtifactKind.FIGURE, 1)),
        ("table_12.csv", ArtifactLabel(ArtifactKind.TABLE, 12)),
        ("FIGURE_3.PNG", ArtifactLabel(ArtifactKind.FIGURE, 3)),
        ("plot.pdf", None),
        ("figure_0.png", None),
        ("figure_1", None),
        ("table_1_synthetic.csv", None),
    ],
)
def test_extract_artifact_label(name, expected):
    assert extract_artifact_label(name) == expected


@given(
    kind=st.sampled_from(list(ArtifactKind)),
    number=st.integers(min_value=1, max_value=10**6),
    ext=st.sampled_from(["pdf", "csv", "png", "tex"]),
)
def test_label_round_trip(kind, number, ext):
    name = render_artifact_name(kind, number, ext)
    assert extract_artifact_label(name) == ArtifactLabel(kind, number)
