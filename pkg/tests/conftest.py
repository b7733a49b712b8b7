import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def record_criterion(num: int, ok: bool, detail: str = ""):
    ACCEPTANCE_RESULTS[num] = (ok, detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[num]
        status = "PASS" if ok else "FAIL"
        line = f"criterion {num:>2}: {status}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
