import pytest

from lattice_kms.graphs import Graph, chain, custom, grid, ring


def test_chain():
    g = chain(4)
    assert g.vertices == (0, 1, 2, 3)
    assert g.edges == ((0, 1), (1, 2), (2, 3))
    assert g.distance(0, 3) == 3


def test_ring_distance_wraps():
    g = ring(6)
    assert g.distance(0, 5) == 1
    assert g.distance(0, 3) == 3


def test_grid_shells():
    g = grid(3, 3)
    shells = g.shells()
    assert shells[0] == [0]
    assert shells[1] == [1, 3]
    assert shells[4] == [8]


def test_custom_and_components():
    g = custom([(0, 1), (2, 3)], vertices=(0, 1, 2, 3))
    assert g.component(0) == {0, 1}
    assert g.distance(0, 2) == float("inf")


def test_validation():
    with pytest.raises(ValueError):
        Graph((0, 1), ((0, 0),))
    with pytest.raises(ValueError):
        Graph((0, 1), ((0, 2),))
    with pytest.raises(ValueError):
        Graph((0, 1), ((0, 1),), origin=9)
