"""Command line interface: audit, score, spotcheck, init, checklist."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

from .checks import (
    AuditReport,
    CheckConfig,
    DeclaredLabels,
    Severity,
    builtin_catalog,
    run_checks,
)
from .config import (
    AuditConfig,
    CONFIG_ENV_VAR,
    apply_overrides,
    parse_attestation,
    parse_weights,
    resolve_config,
)
from .errors import AuditError, ConfigError, IoFailure, RootMissing, TargetNotEmpty
from .readme import ReadmeModel, detect_environment_evidence, parse_readme
from .report import (
    AuditDocument,
    RenderedReport,
    render_outcomes_structured,
    render_outcomes_text,
    render_structured,
    render_text,
)
from .scoring import AggregationPolicy, aggregate, derive_profile
from .script_scanner import decode_script, empty_facts, scan_script
from .spotcheck import (
    Selection,
    SpotCheckStatus,
    SubprocessRunner,
    parse_manifest,
    run_spotcheck,
    select_replications,
)
from .supplement import FileClass, ScanConfig, SupplementInventory, scan_supplement

README_TEMPLATE = """\
# Code and data supplement

## File overview
Describe every file briefly, one line per file.

## Execution order
List the scripts in the order they must be run, one numbered line each,
and name the figures and tables each script creates.

## Environment
Paste the output of sessionInfo() here, or add an environment
specification file such as renv.lock, and keep package versions current.

## Runtimes
Give an approximate runtime and a hardware note per script.

## Data availability
State how the analysed data can be obtained and any access conditions.
"""

INIT_DIRECTORIES = (
    "data",
    "code",
    "results/intermediate",
    "results/figures",
    "results/tables",
)


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------


def _read_bytes(root: Path, rel_path: str) -> bytes:
    try:
        return (root / rel_path).read_bytes()
    except OSError as exc:
        raise IoFailure(rel_path, str(exc)) from exc


def run_audit_pipeline(
    root: Path, config: AuditConfig
) -> tuple[AuditReport, ReadmeModel, SupplementInventory]:
    """scan -> readme -> scripts -> checks, shared by audit and score."""
    inventory = scan_supplement(ScanConfig(root, ignore_globs=config.ignore_globs))

    readmes = inventory.by_class(FileClass.README)
    readme_text = ""
    if readmes:
        readme_text = _read_bytes(root, readmes[0].rel_path).decode(
            "utf-8", errors="replace"
        )
    readme = parse_readme(readme_text, inventory)

    spec_texts = {}
    for entry in inventory.by_class(FileClass.ENVIRONMENT_SPEC):
        spec_texts[entry.rel_path] = _read_bytes(root, entry.rel_path).decode(
            "utf-8", errors="replace"
        )
    readme = replace(
        readme, environment=detect_environment_evidence(readme, inventory, spec_texts)
    )

    facts = []
    for entry in inventory.by_class(FileClass.CODE):
        text, io_note = decode_script(_read_bytes(root, entry.rel_path))
        if io_note is not None:
            facts.append(empty_facts(entry.rel_path, entry.dialect or "unknown", io_note))
        else:
            facts.append(scan_script(entry, text))

    try:
        declared = DeclaredLabels.from_strings(list(config.declared_labels))
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"declared_labels: {exc}") from exc

    report = run_checks(
        inventory,
        readme,
        facts,
        declared,
        CheckConfig(severity_overrides=config.severity_overrides),
    )
    return report, readme, inventory


def _exit_code_for(report: AuditReport, fail_on: Severity) -> int:
    hit = any(f.severity.at_least(fail_on) for f in report.findings)
    return 1 if hit else 0


def _timestamp(config: AuditConfig) -> str | None:
    if not config.emit_timestamp:
        return None
    return datetime.now(timezone.utc).isoformat()


def cmd_audit(root: Path, config: AuditConfig, fmt: str = "text") -> RenderedReport:
    report, _readme, _inventory = run_audit_pipeline(root, config)
    document = AuditDocument(
        report=report,
        config_echo=config.echo_dict(),
        generated_at=_timestamp(config),
    )
    exit_code = _exit_code_for(report, config.fail_on)
    if fmt == "json":
        return render_structured(document, exit_code)
    return render_text(document, exit_code)


def cmd_score(root: Path, config: AuditConfig, fmt: str = "text") -> RenderedReport:
    report, readme, inventory = run_audit_pipeline(root, config)
    profile = derive_profile(
        report,
        inventory,
        readme,
        config.attestation,
        e_thresholds=config.e_thresholds,
    )
    profile = aggregate(profile, AggregationPolicy(config.policy, config.weights))
    document = AuditDocument(
        report=report,
        profile=profile,
        config_echo=config.echo_dict(),
        generated_at=_timestamp(config),
    )
    exit_code = _exit_code_for(report, config.fail_on)
    if fmt == "json":
        return render_structured(document, exit_code)
    return render_text(document, exit_code)


def cmd_spotcheck(
    root: Path,
    manifest_path: Path,
    selection: Selection,
    fmt: str = "text",
    jobs: int = 1,
    timeout: float = 600.0,
    runner=None,
) -> RenderedReport:
    manifest = parse_manifest(Path(manifest_path).read_text(encoding="utf-8"))
    selected = select_replications(manifest, selection)
    runner = runner if runner is not None else SubprocessRunner()
    outcomes = run_spotcheck(
        manifest, selected, runner, timeout_per_rep=timeout, root=root, jobs=jobs
    )
    all_match = all(o.status is SpotCheckStatus.MATCH for o in outcomes)
    exit_code = 0 if all_match else 1
    if fmt == "json":
        return render_outcomes_structured(outcomes, exit_code)
    return render_outcomes_text(outcomes, exit_code)


def cmd_init(target_dir: Path) -> list[str]:
    """Create the skeleton supplement layout; target must be empty."""
    target = Path(target_dir)
    if target.exists() and any(target.iterdir()):
        raise TargetNotEmpty(str(target))
    created = []
    for rel in INIT_DIRECTORIES:
        (target / rel).mkdir(parents=True, exist_ok=True)
        created.append(rel)
    (target / "README.md").write_text(README_TEMPLATE, encoding="utf-8")
    created.append("README.md")
    return created


def cmd_checklist() -> str:
    lines = ["guideline check catalog"]
    for check in builtin_catalog():
        lines.append(
            f"{check.id} [{check.default_severity.value}] {check.description}"
            f" — {check.guideline}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _severity_arg(value: str) -> Severity:
    try:
        return Severity(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected info, warn, or fail, got {value!r}"
        ) from None


def _parse_weights_arg(text: str) -> dict:
    raw = {}
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        if "=" not in piece:
            raise ConfigError(f"--weights: expected NAME=VALUE, got {piece!r}")
        name, value = piece.split("=", 1)
        raw[name.strip()] = value.strip()
    return parse_weights(raw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="repro-audit",
        description="Statically audit a code and data supplement against "
        "reproducibility guidelines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--root", default=".", help="supplement root directory")
        p.add_argument("--config", default=None, help=f"config file (or ${CONFIG_ENV_VAR})")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--fail-on", type=_severity_arg, default=None,
                       help="lowest severity that fails the audit (info|warn|fail)")
        p.add_argument("--declared-labels", default=None,
                       help='comma-separated labels, e.g. "Figure 1,Table 2"')
        p.add_argument("--ignore-glob", action="append", default=None, dest="ignore_globs",
                       help="pattern to ignore while scanning (repeatable)")
        p.add_argument("--no-timestamp", action="store_true", default=False,
                       help="omit timestamps from reports (default)")
        p.add_argument("--emit-timestamp", action="store_true", default=False)

    audit_p = sub.add_parser("audit", help="run the guideline checks")
    add_common(audit_p)

    score_p = sub.add_parser("score", help="audit plus the five-dimension profile")
    add_common(score_p)
    score_p.add_argument("--attestation-source", default=None,
                         choices=("none", "author", "teammate", "journal"))
    score_p.add_argument("--attestation-scope", default=None,
                         choices=("none", "completeness", "quality", "computational"))
    score_p.add_argument("--attestation-repro", default=None,
                         choices=("none", "partial", "full-with-caveats", "full"))
    score_p.add_argument("--weights", default=None, help="e.g. A=1,B=2,C=1,D=1,E=1")
    score_p.add_argument("--policy", default=None,
                         choices=("profile", "min", "weighted-floor"))

    spot_p = sub.add_parser("spotcheck", help="re-execute selected replications")
    spot_p.add_argument("--root", default=".")
    spot_p.add_argument("--config", default=None)
    spot_p.add_argument("--format", choices=("text", "json"), default="text")
    spot_p.add_argument("--manifest", default=None, help="spot-check manifest path")
    spot_p.add_argument("--ids", default=None, help="comma-separated replication ids")
    spot_p.add_argument("--random", type=int, default=None, metavar="K")
    spot_p.add_argument("--audit-seed", type=int, default=0)
    spot_p.add_argument("--reduced", action="store_true", default=False,
                        help="run the reduced-replication entries")
    spot_p.add_argument("--jobs", type=int, default=1)
    spot_p.add_argument("--timeout", type=float, default=600.0,
                        help="seconds per replication")

    init_p = sub.add_parser("init", help="create a skeleton supplement layout")
    init_p.add_argument("target", help="directory to create the skeleton in")

    sub.add_parser("checklist", help="print the check catalog")

    return parser


def _config_for(args) -> AuditConfig:
    root = Path(args.root)
    config = resolve_config(args.config, root)
    updates: dict = {}
    if args.fail_on is not None:
        updates["fail_on"] = args.fail_on
    if args.declared_labels is not None:
        updates["declared_labels"] = tuple(
            s.strip() for s in args.declared_labels.split(",") if s.strip()
        )
    if args.ignore_globs is not None:
        updates["ignore_globs"] = tuple(args.ignore_globs)
    if args.emit_timestamp:
        updates["emit_timestamp"] = True
    elif args.no_timestamp:
        updates["emit_timestamp"] = False

    if getattr(args, "weights", None) is not None:
        updates["weights"] = _parse_weights_arg(args.weights)
    if getattr(args, "policy", None) is not None:
        from .scoring import PolicyKind

        updates["policy"] = PolicyKind(args.policy)
    attestation_updates = {}
    if getattr(args, "attestation_scope", None) is not None:
        attestation_updates["verification_scope"] = args.attestation_scope
    if getattr(args, "attestation_source", None) is not None:
        attestation_updates["verification_source"] = args.attestation_source
    if getattr(args, "attestation_repro", None) is not None:
        attestation_updates["reproducibility_scope"] = args.attestation_repro
    if attestation_updates:
        base = config.attestation
        merged = {
            "verification_scope": base.verification_scope.value,
            "verification_source": base.verification_source.value,
            "reproducibility_scope": base.reproducibility_scope.value,
            "notes": base.notes,
        }
        merged.update(attestation_updates)
        updates["attestation"] = parse_attestation(merged)
    return apply_overrides(config, **updates)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "audit":
            root = Path(args.root)
            if not root.is_dir():
                raise RootMissing(str(root))
            rendered = cmd_audit(root, _config_for(args), args.format)
        elif args.command == "score":
            root = Path(args.root)
            if not root.is_dir():
                raise RootMissing(str(root))
            rendered = cmd_score(root, _config_for(args), args.format)
        elif args.command == "spotcheck":
            root = Path(args.root)
            config = resolve_config(args.config, root)
            manifest_path = args.manifest or config.spotcheck_manifest
            if manifest_path is None:
                raise ConfigError("no manifest given (--manifest or config)")
            manifest_path = Path(manifest_path)
            if not manifest_path.is_absolute():
                manifest_path = root / manifest_path
            ids = None
            if args.ids is not None:
                ids = tuple(s.strip() for s in args.ids.split(",") if s.strip())
            selection = Selection(
                ids=ids,
                random_k=args.random,
                audit_seed=args.audit_seed,
                reduced=args.reduced,
            )
            rendered = cmd_spotcheck(
                root, manifest_path, selection, args.format, args.jobs, args.timeout
            )
        elif args.command == "init":
            created = cmd_init(Path(args.target))
            body = "".join(f"created {path}\n" for path in created)
            rendered = RenderedReport("text", body.encode("utf-8"), 0)
        elif args.command == "checklist":
            rendered = RenderedReport("text", cmd_checklist().encode("utf-8"), 0)
        else:  # pragma: no cover - argparse enforces choices
            parser.error(f"unknown command {args.command}")
    except AuditError as exc:
        print(f"repro-audit: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # internal error contract: exit 2
        print(f"repro-audit: internal error: {exc}", file=sys.stderr)
        return 2

    sys.stdout.buffer.write(rendered.body)
    sys.stdout.buffer.flush()
    return rendered.exit_code


if __name__ == "__main__":
    sys.exit(main())
