from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"
PLANTED = ["zorbitase", "kelvaminol", "prestocyte", "vantrelin", "quoraxide"]


@pytest.fixture
def fixtures():
    return FIXTURES


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return p

    return _write


# acceptance criteria report: one line per criterion in the terminal summary
ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    for marker in report.keywords:
        if marker.startswith("criterion_"):
            ACCEPTANCE[marker] = (report.outcome, report.nodeid.split("::")[-1], report.duration)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split("_")[1])):
        outcome, name, duration = ACCEPTANCE[key]
        status = "PASS" if outcome == "passed" else "FAIL"
        tr.write_line(f"{status}  #{key.split('_')[1]:>2}  {name}  ({duration:.2f}s)")


def pytest_configure(config):
    for i in range(1, 11):
        config.addinivalue_line("markers", f"criterion_{i}: acceptance criterion {i}")
