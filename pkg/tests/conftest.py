import random

import pytest

from lingequiv.digraph import Digraph
from lingequiv.reduction import is_irreducible

FIVE_VERTEX_FAMILY = {
    "G1": [("L1", "X1"), ("L1", "X2"), ("L2", "X2"), ("L2", "X3"), ("X2", "X3")],
    "G2": [("L1", "X1"), ("L1", "X2"), ("L2", "X2"), ("X2", "L2"), ("L2", "X3"), ("X2", "X3")],
    "G3": [("L1", "X1"), ("L1", "X2"), ("L2", "X2"), ("X2", "L2"), ("L2", "X3")],
    "G4": [("L1", "X1"), ("L1", "L2"), ("L2", "X2"), ("L2", "X3"), ("X2", "X3")],
    "G5": [("L1", "X1"), ("L1", "L2"), ("L2", "X2"), ("X2", "L2"), ("L2", "X3"), ("X2", "X3")],
    "G6": [("L1", "X1"), ("L1", "L2"), ("L2", "X2"), ("X2", "L2"), ("L2", "X3")],
}

FOUR_VERTEX_FAMILY = {
    "G1": [("L", "X1"), ("L", "X3"), ("X2", "L"), ("X3", "X1"), ("X3", "X2")],
    "G2": [("L", "X1"), ("L", "X3"), ("X3", "X1"), ("X3", "X2"), ("X2", "X3")],
    "G3": [("L", "X1"), ("L", "X2"), ("X2", "X3"), ("X3", "L"), ("X3", "X1")],
    "G4": [("L", "X1"), ("L", "X2"), ("X2", "X3"), ("X3", "X2"), ("X3", "X1")],
    "G5": [("L", "X1"), ("L", "X3"), ("X3", "L"), ("X2", "L"), ("X3", "X1"), ("X3", "X2")],
    "G6": [("L", "X1"), ("L", "X3"), ("X3", "L"), ("X3", "X1"), ("X3", "X2"), ("X2", "X3")],
    "G7": [("L", "X1"), ("L", "X2"), ("X2", "X3"), ("X3", "X2"), ("X3", "X1"), ("X3", "L")],
    "G8": [("L", "X1"), ("L", "X3"), ("X3", "L"), ("X2", "L"), ("X3", "X2")],
    "G9": [("L", "X1"), ("L", "X3"), ("X3", "L"), ("X3", "X2"), ("X2", "X3")],
    "G10": [("L", "X1"), ("L", "X2"), ("X2", "X3"), ("X3", "X2"), ("X3", "L")],
}

FOUR_VERTEX_EDGE_LINKS = {("G1", "G5"), ("G2", "G6"), ("G3", "G7"), ("G4", "G7"),
                   ("G5", "G8"), ("G6", "G9"), ("G10", "G7")}
FOUR_VERTEX_REVERSAL_LINKS = {("G1", "G3"), ("G2", "G4"), ("G5", "G6"), ("G6", "G7"),
                       ("G5", "G7"), ("G10", "G8"), ("G10", "G9"), ("G8", "G9")}


def five_vertex(name: str) -> Digraph:
    return Digraph.build(["L1", "L2"], ["X1", "X2", "X3"], FIVE_VERTEX_FAMILY[name])


def four_vertex(name: str) -> Digraph:
    return Digraph.build(["L"], ["X1", "X2", "X3"], FOUR_VERTEX_FAMILY[name])


def redundant_tail_example() -> Digraph:
    return Digraph.build(["L1", "L2"], ["X1", "X2"],
                         [("L1", "L2"), ("L1", "X1"), ("L2", "X2")])


def redundant_triangle_example() -> Digraph:
    return Digraph.build(
        ["L1", "L2", "L3"], ["X1", "X2", "X3"],
        [("L1", "L2"), ("L2", "L3"), ("L1", "L3"),
         ("L1", "X1"), ("L2", "X2"), ("L3", "X3")])


def redundant_cycle_example() -> Digraph:
    return Digraph.build(
        ["L1", "L2"], ["X1", "X2"],
        [("X1", "L1"), ("X1", "L2"), ("L1", "L2"), ("L2", "L1"),
         ("L1", "X2"), ("L2", "X2")])


def layered_graph(m: int, n: int, latent=()) -> Digraph:
    """Two-bottleneck layered digraph: every Y feeds C1 and C2, which feed
    every Z."""
    ys = [f"Y{i+1}" for i in range(m)]
    cs = ["C1", "C2"]
    zs = [f"Z{i+1}" for i in range(n)]
    edges = [(y, c) for y in ys for c in cs] + [(c, z) for c in cs for z in zs]
    observed = [v for v in ys + cs + zs if v not in set(latent)]
    return Digraph.build(list(latent), observed, edges)


def random_digraph(n: int, num_latent: int, rng: random.Random,
                   p: float = 0.35) -> Digraph:
    edges = {(i, j) for i in range(n) for j in range(n)
             if i != j and rng.random() < p}
    labels = tuple([f"L{k+1}" for k in range(num_latent)]
                   + [f"X{k+1}" for k in range(n - num_latent)])
    return Digraph(labels, num_latent, frozenset(edges))


def random_irreducible(n: int, num_latent: int, rng: random.Random,
                       p: float = 0.35, connected: bool = True) -> Digraph:
    assert num_latent <= max(n - 2, 0), "no irreducible models with |X| < 2 and latents"
    for _ in range(200_000):
        g = random_digraph(n, num_latent, rng, p)
        if is_irreducible(g) and (not connected or g.is_weakly_connected()):
            return g
    raise AssertionError(f"no irreducible model found for n={n}, l={num_latent}")


@pytest.fixture
def rng():
    return random.Random(20240817)
