import pytest

from hnpgroup.permgroup import PermGroup, Permutation

ACCEPTANCE_LINES = []


def group(*cycles, n):
    return PermGroup([Permutation.from_cycles(c, n) for c in cycles], degree=n)


SMALL = {
    "C1": lambda: PermGroup([], degree=1),
    "C2": lambda: group("(1,2)", n=2),
    "C3": lambda: group("(1,2,3)", n=3),
    "C4": lambda: group("(1,2,3,4)", n=4),
    "V4": lambda: group("(1,2)(3,4)", "(1,3)(2,4)", n=4),
    "S3": lambda: group("(1,2,3)", "(1,2)", n=3),
    "C6": lambda: group("(1,2,3,4,5,6)", n=6),
    "D4": lambda: group("(1,2,3,4)", "(1,3)", n=4),
    "Q8": lambda: group("(1,2,4,7)(3,6,8,5)", "(1,3,4,8)(2,5,7,6)", n=8),
    "C2xC4": lambda: group("(1,2,3,4)(5,6,7,8)", "(1,5)(2,6)(3,7)(4,8)", n=8),
    "C3xC3": lambda: group("(1,2,3)", "(4,5,6)", n=6),
    "A4": lambda: group("(1,2,3)", "(2,3,4)", n=4),
}


@pytest.fixture(params=sorted(SMALL))
def small_group(request):
    return request.param, SMALL[request.param]()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
