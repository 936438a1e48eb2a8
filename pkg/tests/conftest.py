from __future__ import annotations

import numpy as np
import pytest

from ignis.families import FAMILIES, CopulaFamily

# Representative in-domain parameters per family.
THETAS = {
    CopulaFamily.CLAYTON: (0.1, 0.5, 2.0, 5.0, 10.0, 20.0),
    CopulaFamily.GUMBEL: (1.0, 1.5, 2.0, 5.0, 10.0, 20.0),
    CopulaFamily.FRANK: (-20.0, -5.0, -0.5, 0.5, 2.0, 5.0, 20.0),
    CopulaFamily.A1: (1.0, 1.5, 2.0, 5.0, 10.0, 20.0),
    CopulaFamily.A2: (1.0, 1.5, 2.0, 5.0, 10.0, 20.0),
}

FAMILY_THETA = [(f, th) for f in FAMILIES for th in THETAS[f]]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from oracles import ACCEPTANCE_RESULTS

    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
