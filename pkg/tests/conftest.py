import pytest

import pnmcore as p

# (preset params, analysis horizon) for every catalog entry; the
# quasi-eternal horizon is long because its condition-(B) constraint only
# binds at large final times
CATALOG = {
    "paper-example": ({}, 2.5),
    "appendix-f": ({}, 5.0),
    "eternal": ({}, 3.0),
    "quasi-eternal": ({"alpha": 0.1, "t0": 4.0}, 40.0),
    "pathological": ({}, 3.0),
    "unitary-prefix": ({}, 5.0),
}

GRID_N = 200


@pytest.fixture(scope="session")
def catalog():
    """name -> (evolution, horizon, CharTimes) for every preset."""
    out = {}
    for name, (params, horizon) in CATALOG.items():
        e = p.make_preset(name, **params)
        out[name] = (e, horizon, p.characteristic_times(e, horizon, 400))
    return out


@pytest.fixture(scope="session")
def catalog_grids(catalog):
    """name -> CptpGrid scanned at the catalog horizon."""
    return {
        name: p.scan_regions(e, horizon, GRID_N)
        for name, (e, horizon, _) in catalog.items()
    }
