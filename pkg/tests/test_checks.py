import pytest

from repro_audit.checks import (
    CheckConfig,
    DeclaredLabels,
    Severity,
    build_linkage,
    builtin_catalog,
    run_checks,
)
from repro_audit.errors import ConfigError, InconsistentInput
from repro_audit.readme import parse_readme
from repro_audit.script_scanner import scan_script
from repro_audit.supplement import (
    ArtifactKind,
    ArtifactLabel,
    FileClass,
    FileEntry,
    ScanConfig,
    scan_supplement,
)

from conftest import SUPPLEMENTS, audit_fixture


def label(kind, n):
    return ArtifactLabel(ArtifactKind(kind), n)


def test_catalog_is_stable_and_ordered():
    catalog = builtin_catalog()
    ids = [c.id for c in catalog]
    assert len(ids) == len(set(ids)) == 27
    assert ids == sorted(ids, key=lambda i: (i.split("-")[0], i))
    by_id = {c.id: c for c in catalog}
    assert by_id["CODE-01"].default_severity is Severity.FAIL
    assert by_id["CODE-06"].default_severity is Severity.INFO
    assert by_id["STRUCT-03"].default_severity is Severity.FAIL


def test_catalog_golden_snapshot():
    snapshot = {
        (c.id, c.default_severity.value) for c in builtin_catalog()
    }
    assert snapshot == {
        ("STRUCT-01", "warn"), ("STRUCT-02", "info"), ("STRUCT-03", "fail"),
        ("STRUCT-04", "warn"), ("STRUCT-05", "info"), ("STRUCT-06", "info"),
        ("README-01", "warn"), ("README-02", "warn"), ("README-03", "info"),
        ("README-04", "info"),
        ("CODE-01", "fail"), ("CODE-02", "warn"), ("CODE-03", "fail"),
        ("CODE-04", "warn"), ("CODE-05", "info"), ("CODE-06", "info"),
        ("CODE-07", "warn"), ("CODE-08", "info"), ("CODE-09", "warn"),
        ("CODE-10", "warn"), ("CODE-11", "info"),
        ("LINK-01", "fail"), ("LINK-02", "info"),
        ("INTR-01", "warn"), ("INTR-02", "info"),
        ("SYNT-01", "warn"), ("SYNT-02", "warn"),
    }


def test_every_check_reports_at_least_once(compliant_audit):
    report, _, _ = compliant_audit
    reported = {f.check for f in report.findings}
    assert reported == {c.id for c in builtin_catalog()}


def test_compliant_fixture_zero_warn_fail(compliant_audit):
    report, _, _ = compliant_audit
    assert report.severity_counts[Severity.WARN] == 0
    assert report.severity_counts[Severity.FAIL] == 0


def test_abs_path_fixture_single_fail_with_location():
    report, _, _ = audit_fixture("fix_abs_path")
    fails = [f for f in report.findings if f.severity is Severity.FAIL]
    assert len(fails) == 1
    finding = fails[0]
    assert finding.check == "CODE-01"
    assert finding.location.path == "code/01_sim.R"
    assert finding.location.line == 3


def test_missing_seed_fixture_fails_code_03():
    report, _, _ = audit_fixture("fix_missing_seed")
    fails = [f for f in report.findings if f.severity is Severity.FAIL]
    assert [(f.check, f.location.path) for f in fails] == [("CODE-03", "code/01_sim.R")]


def test_seed_in_upstream_step_satisfies_code_03(tmp_path):
    (tmp_path / "code").mkdir()
    (tmp_path / "code" / "00_setup.R").write_text("set.seed(99)\n")
    (tmp_path / "code" / "01_sim.R").write_text("x <- rnorm(5)\n")
    (tmp_path / "README.md").write_text(
        "1. code/00_setup.R\n2. code/01_sim.R\n"
    )
    inv = scan_supplement(ScanConfig(tmp_path))
    readme = parse_readme((tmp_path / "README.md").read_text(), inv)
    facts = [
        scan_script(e, (tmp_path / e.rel_path).read_text())
        for e in inv.by_class(FileClass.CODE)
    ]
    report = run_checks(inv, readme, facts)
    code_03 = report.findings_for("CODE-03")
    assert [f.severity for f in code_03] == [Severity.PASS]


def test_without_steps_upstream_seed_does_not_count(tmp_path):
    (tmp_path / "code").mkdir()
    (tmp_path / "code" / "00_setup.R").write_text("set.seed(99)\n")
    (tmp_path / "code" / "01_sim.R").write_text("x <- rnorm(5)\n")
    inv = scan_supplement(ScanConfig(tmp_path))
    readme = parse_readme("", inv)
    facts = [
        scan_script(e, (tmp_path / e.rel_path).read_text())
        for e in inv.by_class(FileClass.CODE)
    ]
    report = run_checks(inv, readme, facts)
    severities = {f.severity for f in report.findings_for("CODE-03")}
    assert Severity.FAIL in severities


def test_non_literal_seed_downgrades_to_warn(tmp_path):
    (tmp_path / "code").mkdir()
    (tmp_path / "code" / "01_sim.R").write_text(
        "seed <- as.integer(Sys.time())\nset.seed(seed)\nx <- rnorm(5)\n"
    )
    inv = scan_supplement(ScanConfig(tmp_path))
    readme = parse_readme("", inv)
    facts = [
        scan_script(e, (tmp_path / e.rel_path).read_text())
        for e in inv.by_class(FileClass.CODE)
    ]
    report = run_checks(inv, readme, facts)
    assert [f.severity for f in report.findings_for("CODE-03")] == [Severity.WARN]


def test_declared_absent_means_link_checks_not_applicable():
    report, _, _ = audit_fixture("fix_no_readme")
    for check in ("LINK-01", "LINK-02"):
        assert [f.severity for f in report.findings_for(check)] == [
            Severity.NOT_APPLICABLE
        ]


def test_unlinked_label_fails():
    report, _, _ = audit_fixture("fix_unlinked_table")
    fails = [f for f in report.findings if f.severity is Severity.FAIL]
    assert [f.check for f in fails] == ["LINK-01"]
    assert "Table 2" in fails[0].message
    assert report.linkage.unlinked_labels == frozenset({label("table", 2)})
    assert report.linkage.orphan_outputs == frozenset({"results/tables/table_1.csv"})


def test_linkage_examples():
    inv = scan_supplement(ScanConfig(SUPPLEMENTS / "fix_compliant"))
    facts = [
        scan_script(e, (SUPPLEMENTS / "fix_compliant" / e.rel_path).read_text())
        for e in inv.by_class(FileClass.CODE)
    ]
    declared = DeclaredLabels(frozenset({label("figure", 1), label("table", 1)}))
    linkage = build_linkage(inv, facts, declared)
    assert linkage.unlinked_labels == frozenset()
    assert linkage.produced_labels() >= declared.labels

    declared = DeclaredLabels(frozenset({label("figure", 1), label("table", 2)}))
    linkage = build_linkage(inv, facts, declared)
    assert linkage.unlinked_labels == frozenset({label("table", 2)})
    assert linkage.orphan_outputs == frozenset({"results/tables/table_1.csv"})


def test_severity_override_applies_only_to_fired_findings():
    overrides = {"README-02": Severity.INFO}
    report, _, _ = audit_fixture("fix_code_only", severity_overrides=overrides)
    assert [f.severity for f in report.findings_for("README-02")] == [Severity.INFO]
    report, _, _ = audit_fixture("fix_compliant", severity_overrides=overrides)
    assert [f.severity for f in report.findings_for("README-02")] == [Severity.PASS]


def test_floor_checks_cannot_be_disabled():
    with pytest.raises(ConfigError):
        CheckConfig(severity_overrides={"CODE-01": Severity.PASS})
    with pytest.raises(ConfigError):
        CheckConfig(severity_overrides={"CODE-03": Severity.PASS})
    CheckConfig(severity_overrides={"CODE-01": Severity.INFO})


def test_inconsistent_facts_rejected():
    inv = scan_supplement(ScanConfig(SUPPLEMENTS / "fix_compliant"))
    readme = parse_readme("", inv)
    stray = scan_script(FileEntry("code/ghost.R", 0, FileClass.CODE, "r"), "x <- 1\n")
    with pytest.raises(InconsistentInput):
        run_checks(inv, readme, [stray])


def test_findings_sorted_by_check_then_location(compliant_audit):
    report, _, _ = compliant_audit
    keys = [f.sort_key() for f in report.findings]
    assert keys == sorted(keys)


def test_ide_api_flagged(tmp_path):
    (tmp_path / "code").mkdir()
    (tmp_path / "code" / "01.R").write_text("library(rstudioapi)\n")
    inv = scan_supplement(ScanConfig(tmp_path))
    readme = parse_readme("", inv)
    facts = [
        scan_script(e, (tmp_path / e.rel_path).read_text())
        for e in inv.by_class(FileClass.CODE)
    ]
    report = run_checks(inv, readme, facts)
    assert [f.severity for f in report.findings_for("CODE-02")] == [Severity.WARN]


def test_parallel_checks(tmp_path):
    (tmp_path / "code").mkdir()
    (tmp_path / "code" / "01.R").write_text(
        "set.seed(1)\nres <- mclapply(1:10, function(i) rnorm(1))\n"
    )
    inv = scan_supplement(ScanConfig(tmp_path))
    readme = parse_readme("", inv)
    facts = [
        scan_script(e, (tmp_path / e.rel_path).read_text())
        for e in inv.by_class(FileClass.CODE)
    ]
    report = run_checks(inv, readme, facts)
    assert [f.severity for f in report.findings_for("CODE-04")] == [Severity.WARN]
    assert [f.severity for f in report.findings_for("CODE-05")] == [Severity.INFO]


def test_heavy_runtime_without_intermediates(tmp_path):
    (tmp_path / "code").mkdir()
    (tmp_path / "code" / "01.R").write_text("x <- 1\n")
    (tmp_path / "README.md").write_text(
        "- code/01.R: ~3 hours on a server\n"
    )
    inv = scan_supplement(ScanConfig(tmp_path))
    readme = parse_readme((tmp_path / "README.md").read_text(), inv)
    facts = [
        scan_script(e, (tmp_path / e.rel_path).read_text())
        for e in inv.by_class(FileClass.CODE)
    ]
    report = run_checks(inv, readme, facts)
    assert [f.severity for f in report.findings_for("INTR-01")] == [Severity.WARN]


def test_synthetic_fixture_passes_synt_checks():
    report, _, _ = audit_fixture("fix_synthetic_only")
    assert [f.severity for f in report.findings_for("SYNT-01")] == [Severity.PASS]
    assert [f.severity for f in report.findings_for("SYNT-02")] == [Severity.PASS]


def test_restricted_without_synthetic_warns(tmp_path):
    (tmp_path / "code").mkdir()
    (tmp_path / "code" / "01.R").write_text("x <- 1\n")
    (tmp_path / "README.md").write_text("The data cannot be shared.\n")
    inv = scan_supplement(ScanConfig(tmp_path))
    readme = parse_readme((tmp_path / "README.md").read_text(), inv)
    facts = [
        scan_script(e, (tmp_path / e.rel_path).read_text())
        for e in inv.by_class(FileClass.CODE)
    ]
    report = run_checks(inv, readme, facts)
    assert [f.severity for f in report.findings_for("SYNT-01")] == [Severity.WARN]


def _audit_tree(tmp_path, declared=None):
    inv = scan_supplement(ScanConfig(tmp_path))
    readme_file = tmp_path / "README.md"
    readme_text = readme_file.read_text() if readme_file.exists() else ""
    readme = parse_readme(readme_text, inv)
    facts = [
        scan_script(e, (tmp_path / e.rel_path).read_text())
        for e in inv.by_class(FileClass.CODE)
    ]
    return run_checks(inv, readme, facts, declared)


def test_struct_06_consolidation_heuristic(tmp_path):
    (tmp_path / "code").mkdir()
    for i in range(1, 15):
        (tmp_path / "code" / f"step_{i:02d}.R").write_text("x <- 1\n")
    # three files sharing one stem: 3 same-stem pairs
    for i in range(1, 4):
        (tmp_path / "code" / f"helper_{i}.R").write_text("x <- 1\n")
    report = _audit_tree(tmp_path)
    severities = [f.severity for f in report.findings_for("STRUCT-06")]
    assert severities == [Severity.INFO]


def test_deleting_a_file_keeps_fails_about_other_files(tmp_path):
    import shutil

    shutil.copytree(SUPPLEMENTS / "fix_abs_path", tmp_path / "supp")
    before = _audit_tree(tmp_path / "supp")
    fails_before = {
        (f.check, f.location.path if f.location else None)
        for f in before.findings
        if f.severity is Severity.FAIL
    }
    (tmp_path / "supp" / "data" / "d.csv").unlink()
    after = _audit_tree(tmp_path / "supp")
    fails_after = {
        (f.check, f.location.path if f.location else None)
        for f in after.findings
        if f.severity is Severity.FAIL
    }
    assert fails_before <= fails_after


def test_code_09_flags_undocumented_imports(tmp_path):
    (tmp_path / "code").mkdir()
    (tmp_path / "code" / "01.R").write_text("library(ggplot2)\nlibrary(survival)\n")
    (tmp_path / "README.md").write_text(
        "R version 4.3.1\nattached base packages:\n[1] stats\n\n"
        "other attached packages:\n[1] ggplot2_3.4.1\n"
    )
    report = _audit_tree(tmp_path)
    findings = report.findings_for("CODE-09")
    assert [f.severity for f in findings] == [Severity.WARN]
    assert "survival" in findings[0].message


def test_code_02_flags_ipython_use(tmp_path):
    (tmp_path / "code").mkdir()
    (tmp_path / "code" / "01.py").write_text("shell = get_ipython()\n")
    report = _audit_tree(tmp_path)
    assert [f.severity for f in report.findings_for("CODE-02")] == [Severity.WARN]


def test_undecodable_script_carries_io_note(tmp_path):
    from repro_audit.cli import run_audit_pipeline
    from repro_audit.config import AuditConfig

    (tmp_path / "code").mkdir()
    (tmp_path / "code" / "01.R").write_bytes(b"\x00\x01\x02")
    report, _, _ = run_audit_pipeline(tmp_path, AuditConfig())
    assert report.io_notes == (("code/01.R", "binary content"),)


def test_manual_edit_marker_warns(tmp_path):
    (tmp_path / "code").mkdir()
    (tmp_path / "code" / "01.R").write_text(
        "# TODO: set path to the data before running\nx <- 1\n"
    )
    report = _audit_tree(tmp_path)
    assert [f.severity for f in report.findings_for("CODE-10")] == [Severity.WARN]


def test_code_11_undocumented_functions(tmp_path):
    (tmp_path / "code").mkdir()
    (tmp_path / "code" / "01.R").write_text(
        "helper <- function(x) {\n  x\n}\n"
    )
    report = _audit_tree(tmp_path)
    assert [f.severity for f in report.findings_for("CODE-11")] == [Severity.INFO]


def test_code_07_long_functions_in_analysis_script(tmp_path):
    body = "\n".join(["  y <- %d" % i for i in range(60)])
    text = "big <- function(x) {\n" + body + "\n}\nwrite.csv(x, \"results/tables/table_1.csv\")\n"
    (tmp_path / "code").mkdir()
    (tmp_path / "code" / "01.R").write_text(text)
    report = _audit_tree(tmp_path)
    assert [f.severity for f in report.findings_for("CODE-07")] == [Severity.WARN]


def test_multiple_readmes_flagged_informationally(tmp_path):
    (tmp_path / "README.md").write_text("# main\n")
    (tmp_path / "README.txt").write_text("extra\n")
    report = _audit_tree(tmp_path)
    findings = report.findings_for("STRUCT-03")
    assert [f.severity for f in findings] == [Severity.PASS, Severity.INFO]
    assert findings[0].location.path == "README.md"
    assert findings[1].location.path == "README.txt"


def test_struct_04_flags_spaces(tmp_path):
    (tmp_path / "my data").mkdir()
    (tmp_path / "my data" / "raw file.csv").write_text("a\n")
    report = _audit_tree(tmp_path)
    fired = [f for f in report.findings_for("STRUCT-04") if f.severity is Severity.WARN]
    assert {f.location.path for f in fired} == {"my data", "my data/raw file.csv"}
