import pytest

from cubedistort.presentations import build_P, build_Q


@pytest.fixture(scope="session")
def P1():
    return build_P(1)


@pytest.fixture(scope="session")
def P2():
    return build_P(2)


@pytest.fixture(scope="session")
def Q2():
    return build_Q(2)


def pytest_terminal_summary(terminalreporter):
    rows = []
    for key in ("passed", "failed", "xfailed", "xpassed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid or rep.when not in ("call", "setup"):
                continue
            if key == "passed" and rep.when != "call":
                continue
            name = nodeid.split("test_criterion_")[1]
            num, _, label = name.partition("_")
            verdict = "PASS" if key == "passed" else "FAIL"
            note = " (expected failure, see ledger)" if key == "xfailed" else ""
            rows.append((int(num), f"criterion {int(num):2d} {label}: {verdict}{note}"))
    if rows:
        terminalreporter.section("acceptance")
        for _, line in sorted(rows):
            terminalreporter.write_line(line)
