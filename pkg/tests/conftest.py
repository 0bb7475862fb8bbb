import pytest

from gasketwalk import GasketSpec, build_gasket

_CACHE = {}


@pytest.fixture
def graph_of():
    """Memoized graph builder shared across the whole test session."""

    def build(generation, boundary):
        key = (generation, boundary)
        if key not in _CACHE:
            _CACHE[key] = build_gasket(GasketSpec(generation, boundary))
        return _CACHE[key]

    return build
