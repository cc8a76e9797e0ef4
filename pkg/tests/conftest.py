"""Shared fixtures: small networks with known geometry."""

import numpy as np
import pytest

from netkernel import Edge, Vertex, build_network, generate


@pytest.fixture
def path3():
    """A--B--C path with lengths 2 and 3, embedded on the x-axis."""
    return build_network(
        [Vertex(0, 0.0, 0.0), Vertex(1, 2.0, 0.0), Vertex(2, 5.0, 0.0)],
        [Edge(0, 0, 1, 2.0), Edge(1, 1, 2, 3.0)])


@pytest.fixture
def triangle():
    """Distance-consistent 3-cycle with side lengths 1, 1, 1.5."""
    return build_network(
        [Vertex(0, 0.0, 0.0), Vertex(1, 1.0, 0.0), Vertex(2, 0.5, 0.8)],
        [Edge(0, 0, 1, 1.0), Edge(1, 1, 2, 1.0), Edge(2, 2, 0, 1.5)])


@pytest.fixture
def cycle10():
    """Cycle of circumference 10 (10 unit edges)."""
    return generate("cycle", {"n": 10, "length": 1.0})


@pytest.fixture
def star5():
    """Star with 5 unit spokes (a 5-leaf tree)."""
    return generate("star", {"leaves": 5, "length": 1.0})


@pytest.fixture
def theta_graph():
    """Two vertices joined by three internally disjoint paths; its single
    biconnected block is neither an edge nor a simple cycle."""
    return build_network(
        [Vertex(0, 0.0, 0.0), Vertex(1, 3.0, 0.0), Vertex(2, 1.5, 1.0),
         Vertex(3, 1.5, -1.0)],
        [Edge(0, 0, 1, 3.0),
         Edge(1, 0, 2, 2.0), Edge(2, 2, 1, 2.0),
         Edge(3, 0, 3, 2.5), Edge(4, 3, 1, 2.5)])


@pytest.fixture
def river():
    """Small deterministic river tree used across kernel/GP tests."""
    return generate("river_tree", {"depth": 4}, seed=7)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
