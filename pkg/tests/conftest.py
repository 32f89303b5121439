import json
from pathlib import Path

import pytest

from repro_audit.cli import run_audit_pipeline
from repro_audit.config import AuditConfig

FIXTURE_ROOT = Path(__file__).parent / "fixtures"
SUPPLEMENTS = FIXTURE_ROOT / "supplements"
EXPECTED = FIXTURE_ROOT / "expected"

GOLDEN_FIXTURES = sorted(p.stem for p in EXPECTED.glob("*.json"))


def load_expected(name: str) -> dict:
    return json.loads((EXPECTED / f"{name}.json").read_text())


def audit_fixture(name: str, **config_kwargs):
    expected = load_expected(name)
    config = AuditConfig(
        declared_labels=tuple(expected["declared_labels"]), **config_kwargs
    )
    return run_audit_pipeline(SUPPLEMENTS / name, config)


@pytest.fixture
def compliant_audit():
    return audit_fixture("fix_compliant")
