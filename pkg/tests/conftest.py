import pytest

from wellbands import Potential, find_levels


@pytest.fixture(scope="session")
def levels_of():
    """Memoised find_levels so the expensive configurations run once."""
    cache = {}

    def get(v1, v2, n_cells):
        key = (v1, v2, n_cells)
        if key not in cache:
            cache[key] = find_levels(Potential(v1, v2, n_cells))
        return cache[key]

    return get
