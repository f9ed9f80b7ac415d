import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "pdm", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("pdm")

#: criterion number -> {part: (passed, detail)}; filled by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture
def record_acceptance():
    def record(key, part, passed, detail=""):
        ACCEPTANCE.setdefault(str(key), {})[part] = (bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=int):
        parts = ACCEPTANCE[key]
        ok = all(passed for passed, _ in parts.values())
        detail = "; ".join(f"{name}: {'ok' if passed else 'FAIL'} ({d})" if d else f"{name}: {'ok' if passed else 'FAIL'}"
                           for name, (passed, d) in parts.items())
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
