import warnings

import pytest

from implode.profile import solve_profile

CASES = [(1, 3.0), (2, 2.0), (2, 5.0), (3, 1.2), (4, 1.2)]

_cache = {}


def solved(k, ell):
    key = (k, float(ell))
    if key not in _cache:
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            _cache[key] = solve_profile(k, ell)
    return _cache[key]


@pytest.fixture(scope="session")
def prof22():
    return solved(2, 2.0)


ACCEPTANCE = {}


def report(n, ok, text):
    """Record the outcome line for acceptance criterion n (later records for n are merged)."""
    prev = ACCEPTANCE.get(n)
    if prev is not None:
        ok, text = ok and prev[0], prev[1] + "; " + text
    ACCEPTANCE[n] = (ok, text)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {text}")
