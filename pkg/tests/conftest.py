"""Shared pytest hooks: one PASS/FAIL line per acceptance criterion."""

import pytest

_KEY = pytest.StashKey[list]()


class _Criterion:
    def __init__(self, label):
        self.label = label
        self.parts = []

    def check(self, what, ok, detail=""):
        self.parts.append((what, bool(ok), detail))
        return bool(ok)

    @property
    def ok(self):
        return bool(self.parts) and all(ok for _, ok, _ in self.parts)

    def assert_ok(self):
        bad = [f"{w}: {d}" for w, ok, d in self.parts if not ok]
        assert not bad, "; ".join(bad)


@pytest.fixture
def criterion(request):
    marker = request.node.get_closest_marker("criterion")
    c = _Criterion(marker.args[0] if marker else request.node.name)
    yield c
    parts = ", ".join(f"{w}={'ok' if ok else 'FAIL'}" + (f" ({d})" if d else "") for w, ok, d in c.parts)
    line = f"{c.label:<4} {'PASS' if c.ok else 'FAIL'}  {parts or 'no result (error before any check)'}"
    request.config.stash.setdefault(_KEY, []).append(line)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion label")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines, key=lambda s: int(s[1:4].strip() or 0)):
        terminalreporter.write_line(line)
