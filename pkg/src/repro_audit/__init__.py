"""Static reproducibility auditor for code and data supplements.

Audits a supplement directory against reproducibility guidelines, derives
a five-dimension profile (availability, verification scope, verification
source, scope of reproducibility, code quality), and orchestrates
spot-check re-execution of selected replications against stored
intermediate results.
"""

__version__ = "0.1.0"

from .checks import (  # noqa: F401
    AuditReport,
    CheckConfig,
    DeclaredLabels,
    Finding,
    LinkageReport,
    Severity,
    build_linkage,
    builtin_catalog,
    run_checks,
)
from .readme import (  # noqa: F401
    DataAvailability,
    ReadmeModel,
    detect_environment_evidence,
    extract_runtime_notes,
    parse_readme,
)
from .scoring import (  # noqa: F401
    AggregationPolicy,
    Attestation,
    Dimension,
    PolicyKind,
    ReproducibilityScope,
    ScoreProfile,
    VerificationScope,
    VerificationSource,
    aggregate,
    derive_profile,
    parse_profile,
    render_profile,
)
from .script_scanner import (  # noqa: F401
    ScriptFacts,
    detect_absolute,
    pattern_tables,
    scan_script,
)
from .spotcheck import (  # noqa: F401
    ScriptedRunner,
    Selection,
    SpotCheckManifest,
    SpotCheckOutcome,
    SpotCheckStatus,
    SubprocessRunner,
    compare_outputs,
    parse_manifest,
    run_spotcheck,
    select_replications,
)
from .supplement import (  # noqa: F401
    ArtifactKind,
    ArtifactLabel,
    FileClass,
    FileEntry,
    ScanConfig,
    SupplementInventory,
    classify_file,
    extract_artifact_label,
    scan_supplement,
)
