import pytest


@pytest.fixture
def out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("PSPIN_OUT", str(tmp_path / "runs"))
    return tmp_path / "runs"


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1])):
            terminalreporter.write_line(line)
