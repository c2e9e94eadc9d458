"""Shared fixtures plus a terminal summary line for each acceptance criterion."""

from __future__ import annotations

import re

import pytest

from designforge import GroupRegistry, orbit_partition

CRITERIA = {
    1: "k-subset orbit multisets of the degree-22 Mathieu action, k = 1..11",
    2: "k-subset orbit multisets of the degree-11 and degree-12 Mathieu actions",
    3: "all 48 block-transitive 3-design rows of the degree-22 Mathieu action",
    4: "complement duality between the k and 22-k designs",
    5: "Higman-Sims 2-designs from every shipped maximal-subgroup fixture",
    6: "Conway-group 2-designs for the small-block-count subgroup fixtures",
    7: "oracle equivalence on pseudo-random groups of order at most 5000",
    8: "formula identities and merge/decompose round trips",
    9: "byte-identical results across 1, 4 and 8 threads",
}

_outcomes: dict[int, str] = {}
_CRITERION_RE = re.compile(r"test_criterion_(\d+)")


def pytest_runtest_logreport(report):
    match = _CRITERION_RE.match(report.nodeid.split("::")[-1])
    if not match:
        return
    num = int(match.group(1))
    if report.when == "setup" and report.skipped:
        _outcomes.setdefault(num, "SKIP")
    if report.when != "call":
        if report.failed:
            _outcomes[num] = "FAIL"
        return
    if report.failed or _outcomes.get(num) == "FAIL":
        _outcomes[num] = "FAIL"
    elif report.skipped:
        _outcomes.setdefault(num, "SKIP")
    else:
        _outcomes.setdefault(num, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_outcomes):
        label = CRITERIA.get(num, "")
        terminalreporter.write_line(f"[criterion {num}] {_outcomes[num]} - {label}")


@pytest.fixture(scope="session")
def registry() -> GroupRegistry:
    return GroupRegistry.default()


@pytest.fixture(scope="session")
def m22(registry):
    return registry.load_group("M22")


@pytest.fixture(scope="session")
def m11(registry):
    return registry.load_group("M11")


@pytest.fixture(scope="session")
def m12(registry):
    return registry.load_group("M12")


@pytest.fixture(scope="session")
def hs(registry):
    return registry.load_group("HS")


@pytest.fixture(scope="session")
def co3(registry):
    return registry.load_group("Co3")


@pytest.fixture(scope="session")
def hexad_partition(m22):
    """The 6-subset orbit partition of the degree-22 action, smallest orbit first."""
    return orbit_partition(m22, 6, group_name="M22")
