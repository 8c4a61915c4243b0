import pytest

_RESULTS: dict[int, list[tuple[bool, str]]] = {}


class AcceptanceLog:
    def record(self, criterion: int, ok: bool, detail: str) -> bool:
        _RESULTS.setdefault(criterion, []).append((bool(ok), detail))
        return bool(ok)


@pytest.fixture
def acceptance():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_RESULTS):
        entries = _RESULTS[crit]
        ok = all(e[0] for e in entries)
        detail = "; ".join(e[1] for e in entries)
        terminalreporter.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'}  {detail}")
