import itertools

import pytest

from cycleguess.protocol import Protocol, evaluate


def brute_fixed_set(p: Protocol) -> list[tuple[int, ...]]:
    """Every colouring of Z_s^n tested directly, in lexicographic order."""
    return [c for c in itertools.product(range(p.s), repeat=p.n) if evaluate(p, c) == c]


@pytest.fixture
def brute():
    return brute_fixed_set
