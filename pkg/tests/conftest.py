import pytest

from pseudoflat.incidence import span_lines, span_planes
from pseudoflat.pointgen import integer_grid, perturbed_lattice


@pytest.fixture
def grid3():
    return integer_grid(3, 2)


@pytest.fixture
def grid3_lines(grid3):
    return span_lines(grid3)


@pytest.fixture
def lattice_planes():
    P = perturbed_lattice(3, 27, seed=1)
    return P, span_planes(P)


@pytest.fixture
def grid_config(tmp_path):
    """A minimal grid-lines config file, no plots."""
    path = tmp_path / "grid3.json"
    path.write_text(
        '{"scenario": "grid-lines", "n": 2, "sizes": [3], "k_values": [2, 3], "svg": false,'
        ' "prooflab": {"k_values": [3]}, "certify": {"theorem": "1.3", "r": 2, "c_thresh": 2}}',
        encoding="utf-8",
    )
    return path
