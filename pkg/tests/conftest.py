import time

SUITE_BUDGET = 600.0
_start = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    elapsed = time.perf_counter() - _start
    tag = "PASS" if elapsed < SUITE_BUDGET else "FAIL"
    terminalreporter.write_line(f"[{tag}] suite runtime {elapsed:.1f}s / {SUITE_BUDGET:.0f}s")
