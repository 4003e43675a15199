import pytest
from hypothesis import settings

# first calls into jitted code include compilation time
settings.register_profile("dalescope", deadline=None)
settings.load_profile("dalescope")

_ACCEPTANCE = {}


@pytest.fixture
def report(capsys):
    """Print one status line per acceptance criterion, inline and in the summary."""

    def emit(number, ok, detail, kind=None):
        status = kind or ("PASS" if ok else "FAIL")
        line = f"criterion {number:>2}: {status} {detail}"
        _ACCEPTANCE.setdefault(number, []).append(line)
        with capsys.disabled():
            print("\n" + line, flush=True)

    return emit


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        for line in _ACCEPTANCE[number]:
            terminalreporter.write_line(line)
