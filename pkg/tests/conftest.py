"""Terminal summary: one PASS/FAIL line per acceptance criterion."""

import re

_PATTERN = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    outcomes: dict[int, tuple[str, str]] = {}
    for status in ("passed", "failed", "error", "skipped"):
        for report in terminalreporter.stats.get(status, []):
            if getattr(report, "when", "call") not in ("call", "setup"):
                continue
            m = _PATTERN.search(report.nodeid)
            if not m:
                continue
            num, slug = int(m.group(1)), m.group(2)
            label = {"passed": "PASS", "failed": "FAIL", "error": "FAIL", "skipped": "SKIP"}[status]
            # setup-phase skip reports arrive with status "skipped"
            if num in outcomes and outcomes[num][0] == "FAIL":
                continue
            outcomes[num] = (label, slug)
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(outcomes):
        label, slug = outcomes[num]
        terminalreporter.write_line(f"criterion {num} [{slug}]: {label}")
