"""Shared fixtures plus the acceptance-summary reporting hook."""

from __future__ import annotations

import time

import pytest

EXPECTED_CRITERIA = tuple(range(1, 10))
_RESULTS: dict[int, tuple[bool, str]] = {}


class AcceptanceRecorder:
    """Collects one pass/fail line per acceptance criterion."""

    def __init__(self, criterion: int):
        self.criterion = criterion
        self.checks: list[tuple[bool, str]] = []
        self._t0 = time.perf_counter()

    def check(self, ok, detail: str) -> None:
        self.checks.append((bool(ok), detail))

    def elapsed(self) -> float:
        return time.perf_counter() - self._t0

    def finish(self, budget_seconds: float) -> None:
        elapsed = self.elapsed()
        self.check(elapsed < budget_seconds,
                   f"runtime {elapsed:.2f}s < {budget_seconds:g}s")
        ok = all(c for c, _ in self.checks)
        detail = "; ".join(f"{'ok' if c else 'FAIL'}: {d}" for c, d in self.checks)
        _RESULTS[self.criterion] = (ok, detail)
        failed = [d for c, d in self.checks if not c]
        assert ok, f"criterion {self.criterion} failed: {'; '.join(failed)}"


@pytest.fixture
def acceptance():
    def _make(criterion: int) -> AcceptanceRecorder:
        _RESULTS.setdefault(criterion, (False, "did not complete"))
        return AcceptanceRecorder(criterion)

    return _make


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for criterion in EXPECTED_CRITERIA:
        if criterion not in _RESULTS:
            continue
        ok, detail = _RESULTS[criterion]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE {criterion}: {status} - {detail}")
