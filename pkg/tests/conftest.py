import os

import pytest

from ppbf.code import build_code
from ppbf.proximity import get_template

# criterion number -> (title, passed, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def pytest_configure(config):
    os.environ.setdefault("PPBF_CACHE_DIR", str(config.rootpath / ".pytest_cache" / "ppbf-templates"))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {k}. {title}: {detail}")


@pytest.fixture(scope="session")
def codes():
    cache = {}

    def get(family, L):
        if (family, L) not in cache:
            cache[family, L] = build_code(family, L)
        return cache[family, L]

    return get


@pytest.fixture(scope="session")
def pair(codes):
    def get(family, L, D=None):
        return codes(family, L), get_template(family, L, D)

    return get
