import time
from contextlib import contextmanager

import pytest

RESULTS: list = []


class Clock:
    def __init__(self):
        self.elapsed = 0.0

    def __call__(self, fn, *args, **kw):
        """Run ``fn`` and add its wall time to the budget."""
        t0 = time.perf_counter()
        try:
            return fn(*args, **kw)
        finally:
            self.elapsed += time.perf_counter() - t0


@pytest.fixture
def criterion():
    @contextmanager
    def run(label, limit=None):
        clock = Clock()
        ok = False
        t0 = time.perf_counter()
        try:
            yield clock
            ok = limit is None or clock.elapsed < limit
        finally:
            # untimed blocks report their whole wall time
            shown = clock.elapsed if limit else time.perf_counter() - t0
            RESULTS.append((label, ok, shown, limit))
        if not ok:
            pytest.fail(f"{label}: {clock.elapsed:.2f} s exceeds the {limit} s limit")
    return run


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, dt, limit in sorted(RESULTS, key=lambda r: int(r[0].split(".")[0])):
        budget = f", limit {limit} s" if limit else ""
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  ({dt:.2f} s{budget})")
