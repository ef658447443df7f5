import re

import pytest
from hypothesis import settings

from debroglie.core import PhysicalParams, make_grid

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

_VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def nat():
    return PhysicalParams.natural()


@pytest.fixture
def small_grid():
    """128 d box, 512 points: p_max ~ 12.6 hbar/d."""
    return make_grid(128.0, 512)


def pytest_configure(config):
    config.stash[_VERDICTS] = []


@pytest.fixture
def verdict(request):
    """Record one pass/fail line for an acceptance criterion.

    Call with a list of ``(label, ok, detail)`` checks; the line is printed
    in the terminal summary.  A test that dies before calling it is logged
    as FAIL.
    """
    log = request.config.stash[_VERDICTS]
    num = int(re.search(r"criterion_(\d+)", request.node.name).group(1))
    done = []

    def record(title, checks):
        ok = all(c[1] for c in checks)
        parts = "; ".join(f"{label}: {detail} [{'ok' if good else 'FAIL'}]"
                          for label, good, detail in checks)
        line = f"criterion {num} {'PASS' if ok else 'FAIL'} - {title} | {parts}"
        log.append((num, line))
        done.append(ok)
        print(line)
        return ok

    yield record
    if not done:
        log.append((num, f"criterion {num} FAIL - did not complete"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_VERDICTS, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)
