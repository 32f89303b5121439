"""Audit configuration: TOML file plus CLI overrides.

All keys are optional; unknown keys are rejected so typos fail loudly.
CLI flags override file values. The effective configuration is echoed in
structured reports for transparency.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .checks import Severity
from .errors import ConfigError
from .scoring import (
    Attestation,
    DEFAULT_E_THRESHOLDS,
    Dimension,
    PolicyKind,
    ReproducibilityScope,
    VerificationScope,
    VerificationSource,
)
from .supplement import DEFAULT_IGNORE_GLOBS

DEFAULT_CONFIG_NAME = "repro-audit.toml"
CONFIG_ENV_VAR = "REPRO_AUDIT_CONFIG"

_TOP_LEVEL_KEYS = {
    "declared_labels",
    "ignore_globs",
    "emit_timestamp",
    "spotcheck_manifest",
    "severity_overrides",
    "scoring",
    "attestation",
}
_SCORING_KEYS = {"policy", "weights", "e_thresholds"}
_ATTESTATION_KEYS = {
    "verification_scope",
    "verification_source",
    "reproducibility_scope",
    "notes",
}


@dataclass(frozen=True)
class AuditConfig:
    declared_labels: tuple[str, ...] = ()
    severity_overrides: dict[str, Severity] = field(default_factory=dict)
    policy: PolicyKind = PolicyKind.PROFILE_ONLY
    weights: dict[Dimension, float] = field(default_factory=dict)
    e_thresholds: tuple[float, float, float] = DEFAULT_E_THRESHOLDS
    attestation: Attestation = Attestation()
    spotcheck_manifest: str | None = None
    ignore_globs: tuple[str, ...] = DEFAULT_IGNORE_GLOBS
    emit_timestamp: bool = False
    fail_on: Severity = Severity.FAIL

    def echo_dict(self) -> dict:
        """JSON-able snapshot of the effective configuration."""
        return {
            "declared_labels": sorted(self.declared_labels),
            "severity_overrides": {
                k: v.value for k, v in sorted(self.severity_overrides.items())
            },
            "policy": self.policy.value,
            "weights": {d.value: w for d, w in sorted(self.weights.items(), key=lambda i: i[0].value)},
            "e_thresholds": list(self.e_thresholds),
            "attestation": {
                "verification_scope": self.attestation.verification_scope.value,
                "verification_source": self.attestation.verification_source.value,
                "reproducibility_scope": self.attestation.reproducibility_scope.value,
                "notes": self.attestation.notes,
            },
            "spotcheck_manifest": self.spotcheck_manifest,
            "ignore_globs": list(self.ignore_globs),
            "emit_timestamp": self.emit_timestamp,
            "fail_on": self.fail_on.value,
        }


def _parse_severity(value: str, key: str) -> Severity:
    try:
        return Severity(value)
    except ValueError:
        raise ConfigError(f"{key}: unknown severity {value!r}") from None


def parse_severity_overrides(raw: dict) -> dict[str, Severity]:
    from .checks import builtin_catalog

    known = {c.id for c in builtin_catalog()}
    overrides = {}
    for check_id, value in raw.items():
        if check_id not in known:
            raise ConfigError(f"severity_overrides: unknown check id {check_id!r}")
        severity = _parse_severity(str(value), f"severity_overrides.{check_id}")
        if check_id in ("CODE-01", "CODE-03") and severity.rank < Severity.INFO.rank:
            raise ConfigError(
                f"severity_overrides: {check_id} cannot be lowered below info"
            )
        overrides[check_id] = severity
    return overrides


def parse_weights(raw: dict) -> dict[Dimension, float]:
    weights = {}
    for name, value in raw.items():
        try:
            dim = Dimension(name)
        except ValueError:
            raise ConfigError(f"weights: unknown dimension {name!r}") from None
        try:
            w = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"weights: {name} must be a number") from None
        if w < 0:
            raise ConfigError(f"weights: {name} must be nonnegative")
        weights[dim] = w
    return weights


def _parse_enum(enum_cls, value: str, key: str):
    normalized = str(value).replace("-", "_")
    try:
        return enum_cls(normalized)
    except ValueError:
        choices = ", ".join(e.value for e in enum_cls)
        raise ConfigError(f"{key}: expected one of {choices}, got {value!r}") from None


def parse_attestation(raw: dict) -> Attestation:
    unknown = set(raw) - _ATTESTATION_KEYS
    if unknown:
        raise ConfigError(f"attestation: unknown keys {sorted(unknown)}")
    return Attestation(
        verification_scope=_parse_enum(
            VerificationScope, raw.get("verification_scope", "none"),
            "attestation.verification_scope",
        ),
        verification_source=_parse_enum(
            VerificationSource, raw.get("verification_source", "none"),
            "attestation.verification_source",
        ),
        reproducibility_scope=_parse_enum(
            ReproducibilityScope, raw.get("reproducibility_scope", "none"),
            "attestation.reproducibility_scope",
        ),
        notes=str(raw.get("notes", "")),
    )


def _parse_thresholds(raw) -> tuple[float, float, float]:
    if not isinstance(raw, list) or len(raw) != 3:
        raise ConfigError("scoring.e_thresholds must be a list of three numbers")
    values = tuple(float(v) for v in raw)
    if not (0 <= values[0] <= values[1] <= values[2] <= 1):
        raise ConfigError("scoring.e_thresholds must be nondecreasing within [0, 1]")
    return values


def load_config(path: Path) -> AuditConfig:
    """Read and validate a TOML config file."""
    try:
        raw = tomllib.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    return config_from_mapping(raw, source=str(path))


def config_from_mapping(raw: dict, source: str = "config") -> AuditConfig:
    unknown = set(raw) - _TOP_LEVEL_KEYS
    if unknown:
        raise ConfigError(f"{source}: unknown keys {sorted(unknown)}")
    scoring = raw.get("scoring", {})
    unknown_scoring = set(scoring) - _SCORING_KEYS
    if unknown_scoring:
        raise ConfigError(f"{source}: unknown scoring keys {sorted(unknown_scoring)}")

    labels = raw.get("declared_labels", [])
    if not isinstance(labels, list):
        raise ConfigError(f"{source}: declared_labels must be a list of strings")
    globs = raw.get("ignore_globs", list(DEFAULT_IGNORE_GLOBS))
    if not isinstance(globs, list):
        raise ConfigError(f"{source}: ignore_globs must be a list of patterns")

    policy = PolicyKind.PROFILE_ONLY
    if "policy" in scoring:
        policy = _parse_enum_policy(scoring["policy"])
    thresholds = DEFAULT_E_THRESHOLDS
    if "e_thresholds" in scoring:
        thresholds = _parse_thresholds(scoring["e_thresholds"])

    return AuditConfig(
        declared_labels=tuple(str(v) for v in labels),
        severity_overrides=parse_severity_overrides(raw.get("severity_overrides", {})),
        policy=policy,
        weights=parse_weights(scoring.get("weights", {})),
        e_thresholds=thresholds,
        attestation=parse_attestation(raw.get("attestation", {})),
        spotcheck_manifest=raw.get("spotcheck_manifest"),
        ignore_globs=tuple(str(g) for g in globs),
        emit_timestamp=bool(raw.get("emit_timestamp", False)),
    )


def _parse_enum_policy(value: str) -> PolicyKind:
    try:
        return PolicyKind(str(value))
    except ValueError:
        choices = ", ".join(p.value for p in PolicyKind)
        raise ConfigError(f"scoring.policy: expected one of {choices}") from None


def resolve_config(
    explicit_path: str | None, root: Path, env: dict | None = None
) -> AuditConfig:
    """Locate and load the config: flag, then env var, then root default."""
    import os

    env = env if env is not None else dict(os.environ)
    if explicit_path:
        return load_config(Path(explicit_path))
    env_path = env.get(CONFIG_ENV_VAR)
    if env_path:
        return load_config(Path(env_path))
    default = Path(root) / DEFAULT_CONFIG_NAME
    if default.is_file():
        return load_config(default)
    return AuditConfig()


def apply_overrides(config: AuditConfig, **updates) -> AuditConfig:
    """Return a copy with the given non-None fields replaced."""
    effective = {k: v for k, v in updates.items() if v is not None}
    return replace(config, **effective)
