import os

import pytest

# filled by tests/test_acceptance.py: criterion id -> (passed, detail)
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_collection_modifyitems(config, items):
    if os.environ.get("TORICGEN_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="slow; set TORICGEN_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (len(k), k)):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key:<6} {'PASS' if ok else 'FAIL'}  {detail}")
