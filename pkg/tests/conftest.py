import functools

import pytest

from skindefect.classify import classify_hn, classify_ssh
from skindefect.presets import hn_reference, ssh_reference

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@functools.lru_cache(maxsize=None)
def hn_classified(n_sites=50):
    return classify_hn(hn_reference(n_sites), workers=1)


@functools.lru_cache(maxsize=None)
def ssh_classified(gamma=0.4, p=None):
    return classify_ssh(ssh_reference(gamma, p), workers=1)


@pytest.fixture(scope="session")
def report():
    """Record one acceptance verdict: ``report(k, ok, detail)``."""
    def record(k, ok, detail):
        ACCEPTANCE[k] = (bool(ok), detail)
        print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
