import contextlib
import io
import json
import os
import sys
from importlib import resources
from pathlib import Path

import pytest

FIXTURES = Path(str(resources.files("incongruity").joinpath("fixtures")))
GOLDEN = Path(__file__).parent / "golden"


def load_cases():
    return json.loads((FIXTURES / "cases.json").read_text())


@contextlib.contextmanager
def chdir(path):
    old = os.getcwd()
    os.chdir(path)
    try:
        yield
    finally:
        os.chdir(old)


def run_cli(argv, cwd=FIXTURES):
    """Run the CLI in-process; returns (exit code, stdout, stderr)."""
    from incongruity.cli import main

    out, err = io.StringIO(), io.StringIO()
    with chdir(cwd), contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
