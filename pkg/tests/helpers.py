"""Shared builders and golden theta-graph cells for the test suite."""

from functools import lru_cache

import braidforge as bf
from braidforge.cells import Cell
from braidforge.fixtures import load_fixture

E18, E111, E59 = (1, 8), (1, 11), (5, 9)


@lru_cache(maxsize=None)
def graph(name: str) -> bf.Graph:
    return bf.parse_graph(load_fixture(name))


@lru_cache(maxsize=None)
def og(name: str) -> bf.OrderedGraph:
    return bf.ordered(graph(name))


@lru_cache(maxsize=None)
def complex_for(name: str, n: int) -> bf.CubeComplex:
    return bf.CubeComplex(og(name), n)


@lru_cache(maxsize=None)
def morse(name: str, n: int) -> bf.MorsePresentation:
    return bf.morse_presentation(complex_for(name, n))


@lru_cache(maxsize=None)
def minimized(name: str, n: int):
    result, h1 = bf.minimize_morse(og(name), morse(name, n))
    return result


def cell(edges, vertices) -> Cell:
    return Cell(tuple(edges), tuple(vertices))


def theta_cells(n: int) -> dict[str, Cell]:
    """The critical cells of the theta fixture by their conventional names."""
    if n == 2:
        d = {"a1": cell([E18], [2]), "a2": cell([E111], [2]),
             "g": cell([E59], [6])}
    elif n == 3:
        d = {"a1": cell([E18], [2, 3]), "a2": cell([E111], [2, 3]),
             "g": cell([E59], [1, 6]),
             "s1": cell([E59], [6, 7]), "s2": cell([E59], [6, 10]),
             "t1": cell([E18, E59], [6]), "t2": cell([E111, E59], [6])}
    elif n == 4:
        d = {"a1": cell([E18], [2, 3, 4]), "a2": cell([E111], [2, 3, 4]),
             "g": cell([E59], [1, 2, 6]),
             "s1": cell([E59], [1, 6, 7]), "s2": cell([E59], [1, 6, 10]),
             "s3": cell([E59], [6, 7, 8]), "s4": cell([E59], [6, 7, 10]),
             "s5": cell([E59], [6, 10, 11]),
             "t1": cell([E18, E59], [2, 6]), "t2": cell([E111, E59], [2, 6]),
             "t3": cell([E111, E59], [6, 7]), "t4": cell([E18, E59], [6, 7]),
             "t5": cell([E111, E59], [6, 10]), "t6": cell([E18, E59], [6, 10])}
    else:
        raise ValueError(n)
    return d


def cw(cells: dict, *letters) -> tuple:
    """Cell word from ('a1', +1)-style pairs using a theta cell table."""
    return tuple((cells[k], s) for k, s in letters)


def theta_loop_specs(n: int):
    U = (1, 2, 3, 4, 5, 6, 7, 8)
    D = (5, 6, 7, 8, 1, 11, 10, 9)
    if n == 2:
        return {"gamma": bf.YLoopSpec(4, 6, 9),
                "aD": bf.OLoopSpec(D, (2,)),
                "aU": bf.OLoopSpec(U, (9,))}
    if n == 4:
        return {"gamma": bf.YLoopSpec(4, 6, 9, (1, 2)),
                "gamma_p": bf.YLoopSpec(4, 6, 9, (1, 10)),
                "gamma_pp": bf.YLoopSpec(4, 6, 9, (10, 11)),
                "aU": bf.OLoopSpec(U, (9, 10, 11)),
                "aD": bf.OLoopSpec(D, (2, 3, 4))}
    raise ValueError(n)


def edge_crossings(word, edge) -> int:
    """Net signed crossings of one graph edge; a homomorphism to Z for
    deleted edges, killed by every square boundary."""
    total = 0
    for c, s in word:
        if edge in c.edges:
            total += s
    return total


def raw_theta() -> bf.Graph:
    return bf.parse_graph({"vertices": [1, 2],
                           "edges": [[1, 2], [1, 2], [1, 2]],
                           "tree_edges": [[1, 2]], "root": 1})


def complete_graph(n: int) -> bf.Graph:
    """K_n with a spanning path tree and ascending rotations."""
    vs = list(range(1, n + 1))
    return bf.parse_graph({
        "vertices": vs,
        "edges": [[a, b] for a in vs for b in vs if a < b],
        "tree_edges": [[i, i + 1] for i in vs[:-1]],
        "root": 1,
        "rotation": {str(v): [w for w in vs if w != v] for v in vs}})


def complete_bipartite_33() -> bf.Graph:
    """K_{3,3} on parts {1,3,5} and {2,4,6} with a spanning path tree."""
    return bf.parse_graph({
        "vertices": [1, 2, 3, 4, 5, 6],
        "edges": sorted([a, b] for a in (1, 3, 5) for b in (2, 4, 6)),
        "tree_edges": [[1, 2], [2, 3], [3, 4], [4, 5], [5, 6]],
        "root": 1,
        "rotation": {str(v): ([2, 4, 6] if v % 2 else [1, 3, 5])
                     for v in range(1, 7)}})
