from __future__ import annotations

from pathlib import Path

import pytest

from adavu.laban_map import load_mapping_db
from adavu.ontology import load_ontology

DATA = Path(__file__).parent / "data"

_acceptance: dict[str, str] = {}


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def registry():
    return load_ontology()


@pytest.fixture(scope="session")
def mapping_db():
    return load_mapping_db()


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_ac"):
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance):
        terminalreporter.write_line(f"{_acceptance[name]}  {name}")
