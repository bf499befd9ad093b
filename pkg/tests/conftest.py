import numpy as np
import pytest

from gpnt import _kernels
from gpnt.generators import gen_e1, gen_tight


def dense_rank(a) -> int:
    """Gaussian elimination mod 2 on a dense copy; independent of the packed kernels."""
    a = (np.array(a, dtype=np.uint8) % 2).copy()
    if a.size == 0:
        return 0
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        hits = np.flatnonzero(a[r:, c])
        if len(hits) == 0:
            continue
        p = r + hits[0]
        a[[r, p]] = a[[p, r]]
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
        if r == rows:
            break
    return r


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    before = _kernels.backend()
    _kernels.set_backend(request.param)
    yield request.param
    _kernels.set_backend(before)


@pytest.fixture(scope="session")
def e1():
    return gen_e1()


@pytest.fixture(scope="session")
def tight1():
    return gen_tight(1)


# -- acceptance reporting ------------------------------------------------------

def pytest_configure(config):
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    n, title = mark.args
    details = [v for k, v in item.user_properties if k == "detail"]
    prev = item.config._criteria.get(n)
    ok = rep.passed and (prev is None or prev[1])
    item.config._criteria[n] = (title, ok, (prev[2] if prev else []) + details)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    crit = getattr(config, "_criteria", {})
    if not crit:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(crit):
        title, ok, details = crit[n]
        terminalreporter.line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")
        for d in details:
            terminalreporter.line(f"    {d}")
