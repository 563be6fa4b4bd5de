import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, title = marker.args
    entry = _criteria.setdefault(n, [title, "PASS", ""])
    details = [str(v) for k, v in rep.user_properties if k == "detail"]
    if rep.when == "call" and details:
        entry[2] = "; ".join(filter(None, [entry[2], *details]))
    if rep.failed:
        entry[1] = "FAIL"
    elif rep.skipped and entry[1] == "PASS":
        entry[1] = "SKIP"
        entry[2] = str(rep.longrepr[-1]) if isinstance(rep.longrepr, tuple) else ""


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, status, note = _criteria[n]
        line = f"criterion {n:2d}: {status}  {title}"
        if note:
            line += f"  ({note})"
        terminalreporter.write_line(line)
