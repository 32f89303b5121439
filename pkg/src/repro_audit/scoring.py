"""Five-dimension reproducibility profile and optional aggregation.

Levels run 0..3 per dimension: A availability of materials, B
verification scope, C verification source, D scope of reproducibility,
E code quality. A and E are computed from the audit, C comes from the
attestation, B and D combine both. Aggregation to a single tier is
opt-in; the profile is the primary output.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .checks import AuditReport, Severity
from .errors import ConfigError, ZeroWeights
from .readme import DataAvailability, ReadmeModel
from .supplement import FileClass, SupplementInventory

E_POOL_CHECKS = (
    "STRUCT-04", "STRUCT-06",
    "README-01", "README-02", "README-03", "README-04",
    "CODE-01", "CODE-02", "CODE-03", "CODE-04", "CODE-05", "CODE-06",
    "CODE-07", "CODE-08", "CODE-09", "CODE-10", "CODE-11",
    "LINK-01", "LINK-02",
    "INTR-01", "INTR-02",
)

DEFAULT_E_THRESHOLDS = (0.4, 0.7, 0.9)


class Dimension(Enum):
    AVAILABILITY = "A"
    VERIFICATION_SCOPE = "B"
    VERIFICATION_SOURCE = "C"
    REPRODUCIBILITY_SCOPE = "D"
    CODE_QUALITY = "E"


class VerificationScope(Enum):
    NONE = "none"
    COMPLETENESS = "completeness"
    QUALITY = "quality"
    COMPUTATIONAL = "computational"


class VerificationSource(Enum):
    NONE = "none"
    AUTHOR = "author"
    TEAMMATE = "teammate"
    JOURNAL = "journal"


class ReproducibilityScope(Enum):
    NONE = "none"
    PARTIAL = "partial"
    FULL_WITH_CAVEATS = "full_with_caveats"
    FULL = "full"


_SCOPE_LEVEL = {
    VerificationScope.NONE: 0,
    VerificationScope.COMPLETENESS: 1,
    VerificationScope.QUALITY: 2,
    VerificationScope.COMPUTATIONAL: 3,
}
_SOURCE_LEVEL = {
    VerificationSource.NONE: 0,
    VerificationSource.AUTHOR: 1,
    VerificationSource.TEAMMATE: 2,
    VerificationSource.JOURNAL: 3,
}
_REPRO_LEVEL = {
    ReproducibilityScope.NONE: 0,
    ReproducibilityScope.PARTIAL: 1,
    ReproducibilityScope.FULL_WITH_CAVEATS: 2,
    ReproducibilityScope.FULL: 3,
}


@dataclass(frozen=True)
class Attestation:
    verification_scope: VerificationScope = VerificationScope.NONE
    verification_source: VerificationSource = VerificationSource.NONE
    reproducibility_scope: ReproducibilityScope = ReproducibilityScope.NONE
    notes: str = ""


@dataclass(frozen=True)
class DimensionLevel:
    dimension: Dimension
    level: int
    evidence: str  # computed | attested | mixed

    def __post_init__(self):
        if self.level not in (0, 1, 2, 3):
            raise ValueError(f"level must be 0..3, got {self.level}")


class PolicyKind(Enum):
    PROFILE_ONLY = "profile"
    MIN = "min"
    WEIGHTED_FLOOR = "weighted-floor"


@dataclass(frozen=True)
class AggregationPolicy:
    kind: PolicyKind = PolicyKind.PROFILE_ONLY
    weights: dict[Dimension, float] = field(default_factory=dict)


@dataclass(frozen=True)
class ScoreProfile:
    levels: dict[Dimension, DimensionLevel]
    aggregate: tuple[str, int] | None = None

    def level(self, dimension: Dimension) -> int:
        return self.levels[dimension].level


# ---------------------------------------------------------------------------
# Rubric
# ---------------------------------------------------------------------------


def _availability_level(inventory: SupplementInventory, readme: ReadmeModel) -> int:
    if inventory.class_counts[FileClass.CODE] == 0:
        return 0
    if inventory.class_counts[FileClass.DATA] == 0:
        return 1
    has_codebook = inventory.class_counts[FileClass.CODEBOOK] > 0
    env = readme.environment
    has_env = env.session_block_present or bool(env.spec_files)
    if has_codebook and has_env:
        return 3
    return 2


def _check_status(report: AuditReport, check_id: str) -> str:
    """'pass', 'fired', or 'na' for one check across its findings."""
    severities = {f.severity for f in report.findings_for(check_id)}
    severities.discard(Severity.NOT_APPLICABLE)
    if not severities:
        return "na"
    if severities == {Severity.PASS}:
        return "pass"
    return "fired"


def _has_fail(report: AuditReport, check_id: str) -> bool:
    return any(
        f.severity is Severity.FAIL for f in report.findings_for(check_id)
    )


def _code_quality_level(
    report: AuditReport, thresholds: tuple[float, float, float]
) -> int:
    applicable = 0
    passed = 0
    any_fail = False
    for check_id in E_POOL_CHECKS:
        status = _check_status(report, check_id)
        if status == "na":
            continue
        applicable += 1
        if status == "pass":
            passed += 1
        if _has_fail(report, check_id):
            any_fail = True
    if applicable == 0:
        return 0
    rate = passed / applicable
    low, mid, high = thresholds
    if rate >= high and not any_fail:
        return 3
    if rate >= mid:
        return 2
    if rate >= low:
        return 1
    return 0


def _synthetic_only(inventory: SupplementInventory, readme: ReadmeModel) -> bool:
    if readme.data_availability is DataAvailability.RESTRICTED_WITH_SYNTHETIC:
        return True
    data_entries = inventory.by_class(FileClass.DATA)
    if not data_entries:
        return False
    marker = re.compile(r"synthetic|pseudo", re.IGNORECASE)
    return all(marker.search(e.rel_path) for e in data_entries)


def derive_profile(
    report: AuditReport,
    inventory: SupplementInventory,
    readme: ReadmeModel,
    attestation: Attestation,
    spotcheck_matched: bool = False,
    e_thresholds: tuple[float, float, float] = DEFAULT_E_THRESHOLDS,
) -> ScoreProfile:
    """Map audit evidence plus the attestation onto levels A..E.

    ``spotcheck_matched`` records that a spot-check run reproduced all of
    its selected replications; it raises B to 3 and D to at least 1.
    """
    zero_fail = report.severity_counts.get(Severity.FAIL, 0) == 0

    a_level = _availability_level(inventory, readme)

    tool_b = 2 if zero_fail else 1
    attested_b = _SCOPE_LEVEL[attestation.verification_scope]
    b_level = max(tool_b, attested_b, 3 if spotcheck_matched else 0)

    c_level = _SOURCE_LEVEL[attestation.verification_source]

    d_level = _REPRO_LEVEL[attestation.reproducibility_scope]
    if spotcheck_matched and d_level < 1:
        d_level = 1
    seed_failures = _has_fail(report, "CODE-03") or _has_fail(report, "CODE-04")
    if seed_failures:
        d_level = min(d_level, 1)
    if _synthetic_only(inventory, readme):
        d_level = min(d_level, 1)

    e_level = _code_quality_level(report, e_thresholds)

    levels = {
        Dimension.AVAILABILITY: DimensionLevel(Dimension.AVAILABILITY, a_level, "computed"),
        Dimension.VERIFICATION_SCOPE: DimensionLevel(Dimension.VERIFICATION_SCOPE, b_level, "mixed"),
        Dimension.VERIFICATION_SOURCE: DimensionLevel(Dimension.VERIFICATION_SOURCE, c_level, "attested"),
        Dimension.REPRODUCIBILITY_SCOPE: DimensionLevel(Dimension.REPRODUCIBILITY_SCOPE, d_level, "mixed"),
        Dimension.CODE_QUALITY: DimensionLevel(Dimension.CODE_QUALITY, e_level, "computed"),
    }
    return ScoreProfile(levels=levels)


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------


def aggregate(profile: ScoreProfile, policy: AggregationPolicy) -> ScoreProfile:
    """Attach the aggregate tier demanded by the policy, if any."""
    if policy.kind is PolicyKind.PROFILE_ONLY:
        return ScoreProfile(levels=dict(profile.levels), aggregate=None)
    values = [profile.level(d) for d in Dimension]
    if policy.kind is PolicyKind.MIN:
        return ScoreProfile(
            levels=dict(profile.levels),
            aggregate=(PolicyKind.MIN.value, min(values)),
        )
    weights = {d: Fraction(policy.weights.get(d, 1.0)) for d in Dimension}
    if any(w < 0 for w in weights.values()):
        raise ConfigError("aggregation weights must be nonnegative")
    total = sum(weights.values())
    if total <= 0:
        raise ZeroWeights("aggregation weights sum to zero")
    # exact rational arithmetic keeps the floor stable under weight scaling
    tier = math.floor(
        sum(weights[d] * profile.level(d) for d in Dimension) / total
    )
    return ScoreProfile(
        levels=dict(profile.levels),
        aggregate=(PolicyKind.WEIGHTED_FLOOR.value, tier),
    )


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

_PROFILE_RE = re.compile(
    r"^A(\d) B(\d) C(\d) D(\d) E(\d)(?: \| tier (\d) \(([a-z\-]+)\))?$"
)


def render_profile(profile: ScoreProfile) -> str:
    badge = " ".join(f"{d.value}{profile.level(d)}" for d in Dimension)
    if profile.aggregate is not None:
        policy_id, tier = profile.aggregate
        badge += f" | tier {tier} ({policy_id})"
    return badge


def parse_profile(text: str, evidence: dict[Dimension, str] | None = None) -> ScoreProfile:
    """Inverse of :func:`render_profile` (evidence defaults to the rubric's)."""
    m = _PROFILE_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not a profile badge: {text!r}")
    default_evidence = {
        Dimension.AVAILABILITY: "computed",
        Dimension.VERIFICATION_SCOPE: "mixed",
        Dimension.VERIFICATION_SOURCE: "attested",
        Dimension.REPRODUCIBILITY_SCOPE: "mixed",
        Dimension.CODE_QUALITY: "computed",
    }
    evidence = evidence or default_evidence
    levels = {}
    for d, group in zip(Dimension, m.groups()[:5]):
        levels[d] = DimensionLevel(d, int(group), evidence[d])
    agg = None
    if m.group(6) is not None:
        agg = (m.group(7), int(m.group(6)))
    return ScoreProfile(levels=levels, aggregate=agg)
