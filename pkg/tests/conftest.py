import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

# criterion -> list of (ok, detail); filled by the acceptance tests
ACCEPTANCE = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))
    print(f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        rows = ACCEPTANCE[crit]
        bad = [d for ok, d in rows if not ok]
        if bad:
            terminalreporter.write_line(f"FAIL criterion {crit}: {len(bad)} of {len(rows)} checks failed: "
                                        + "; ".join(bad))
        else:
            terminalreporter.write_line(f"PASS criterion {crit}: " + "; ".join(d for _, d in rows))
