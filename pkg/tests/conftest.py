"""Expensive shared results, computed once per session."""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from beaverlab.census import HaltingCensus, output_censuses, scan_space  # noqa: E402
from beaverlab.prover import filter_systems, truth_space  # noqa: E402
from beaverlab.terms import enumerate_formulas, generate_axiom_systems  # noqa: E402

L4_SAMPLE = 1000
VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line; the line is printed and repeated in the summary."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        VERDICTS.append(line)
        return ok

    return record


@pytest.fixture(scope="session")
def scan32():
    return scan_space(3, 21, outputs=True)


@pytest.fixture(scope="session")
def census32(scan32):
    return HaltingCensus.from_scan(scan32)


@pytest.fixture(scope="session")
def outputs32(scan32):
    return output_censuses(scan32)


@pytest.fixture(scope="session")
def reports3():
    return filter_systems(generate_axiom_systems(enumerate_formulas(3)))


@pytest.fixture(scope="session")
def space3(reports3):
    return truth_space([r.system for r in reports3 if r.usable], enumerate_formulas(3))


@pytest.fixture(scope="session")
def reports4():
    return filter_systems(generate_axiom_systems(enumerate_formulas(4), L4_SAMPLE))


@pytest.fixture(scope="session")
def space4(reports4):
    return truth_space([r.system for r in reports4 if r.usable], enumerate_formulas(4))
