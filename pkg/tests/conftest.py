import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance test at the end of the run."""
    results = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            if outcome == "passed" and rep.when != "call":
                continue
            if results.get(name) != "FAIL":
                results[name] = "PASS" if outcome == "passed" else "FAIL"
    if results:
        terminalreporter.write_sep("-", "acceptance summary")
        for name in sorted(results):
            terminalreporter.write_line(f"{name}: {results[name]}")
