import time

RESULTS: dict = {}
_START = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        ok, text = RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key}: {text}")
    terminalreporter.write_line(f"suite wall time {time.perf_counter() - _START:.1f}s")
