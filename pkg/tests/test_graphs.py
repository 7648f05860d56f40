import itertools
import random

import mpmath
import pytest

from toruspenny.errors import CatalogError, InvalidInputError
from toruspenny.graphs import (
    SmallGraph,
    complete_graph,
    cycle_graph,
    harborth_bound,
    identify,
    is_bipartite,
    is_isomorphic,
    is_planar,
    k33,
    kuratowski_kind,
    named_graph,
    octahedron,
    path_graph,
)


def brute_isomorphic(g, h):
    if g.n != h.n:
        return False
    e_h = set(h.edges())
    e_g = g.edges()
    if len(e_g) != len(e_h):
        return False
    for perm in itertools.permutations(range(g.n)):
        if all(tuple(sorted((perm[i], perm[j]))) in e_h for i, j in e_g):
            return True
    return False


def random_graph(rng, n, p=0.5):
    return SmallGraph.from_edges(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < p])


def all_graphs(n):
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield SmallGraph.from_edges(n, [e for k, e in enumerate(pairs) if mask >> k & 1])


def triangle_free(g):
    return not any(g.has_edge(a, b) and g.has_edge(b, c) and g.has_edge(a, c)
                   for a, b, c in itertools.combinations(range(g.n), 3))


# -- construction --------------------------------------------------------------


@pytest.mark.parametrize("name,n,m,deg", [
    ("K5", 5, 10, 4), ("K33", 6, 9, 3), ("octahedron", 6, 12, 4),
    ("K4", 4, 6, 3), ("K6", 6, 15, 5), ("K7", 7, 21, 6),
    ("cycle(6)", 6, 6, 2), ("k3,3", 6, 9, 3),
])
def test_named_graph(name, n, m, deg):
    g = named_graph(name)
    assert (g.n, g.edge_count, g.regular_degree()) == (n, m, deg)


def test_path_graph_degrees():
    assert sorted(named_graph("path(4)").degrees()) == [1, 1, 2, 2]


def test_unknown_name():
    with pytest.raises(CatalogError):
        named_graph("petersen")


def test_small_graph_validation():
    with pytest.raises(InvalidInputError):
        SmallGraph.from_edges(3, [(0, 0)])
    with pytest.raises(InvalidInputError):
        SmallGraph.from_edges(3, [(0, 3)])
    with pytest.raises(InvalidInputError):
        SmallGraph(2, (0b10, 0b00))
    with pytest.raises(InvalidInputError):
        complete_graph(17)


def test_json_round_trip():
    g = octahedron()
    assert SmallGraph.from_json(g.to_json()) == g
    with pytest.raises(InvalidInputError):
        SmallGraph.from_json({"n": 3, "edges": [[0, 1, 2]]})
    with pytest.raises(InvalidInputError):
        SmallGraph.from_json({"edges": []})


def test_identify():
    assert identify(octahedron()) == "octahedron"
    assert identify(k33().relabel([5, 3, 1, 0, 2, 4])) == "K33"
    assert identify(SmallGraph.from_edges(4, [(0, 1)])) is None


# -- isomorphism -------------------------------------------------------------


def test_isomorphism_examples():
    assert is_isomorphic(complete_graph(5), named_graph("K5")) is not None
    assert is_isomorphic(k33(), octahedron()) is None
    assert is_isomorphic(cycle_graph(6), k33()) is None


def test_witness_preserves_adjacency():
    g = k33()
    h = g.relabel([3, 0, 4, 1, 5, 2])
    w = is_isomorphic(g, h)
    assert w is not None
    for i, j in itertools.combinations(range(6), 2):
        assert g.has_edge(i, j) == h.has_edge(w[i], w[j])


def test_witness_is_lexicographically_first():
    g = cycle_graph(5)
    w = is_isomorphic(g, g)
    assert w == (0, 1, 2, 3, 4)
    firsts = [p for p in itertools.permutations(range(5))
              if all(g.has_edge(p[i], p[j]) for i, j in g.edges())]
    assert w == min(firsts)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_isomorphism_exhaustive_small(n):
    graphs = list(all_graphs(n))
    for g, h in itertools.product(graphs, graphs):
        assert (is_isomorphic(g, h) is not None) == brute_isomorphic(g, h)


@pytest.mark.parametrize("n", [5, 6, 7])
def test_isomorphism_matches_brute_force(n):
    rng = random.Random(n)
    for _ in range(60 if n < 7 else 25):
        g = random_graph(rng, n)
        if rng.random() < 0.5:
            perm = list(range(n))
            rng.shuffle(perm)
            h = g.relabel(perm)
        else:
            h = random_graph(rng, n, g.edge_count / max(1, n * (n - 1) / 2))
        assert (is_isomorphic(g, h) is not None) == brute_isomorphic(g, h)


# -- bipartiteness -------------------------------------------------------------


def test_bipartite_examples():
    assert is_bipartite(k33()) == ((0, 1, 2), (3, 4, 5))
    assert is_bipartite(complete_graph(5)) is None
    assert is_bipartite(cycle_graph(6)) == ((0, 2, 4), (1, 3, 5))
    assert is_bipartite(cycle_graph(5)) is None


def test_bipartite_handles_isolated_vertices():
    g = SmallGraph.from_edges(4, [(0, 1)])
    left, right = is_bipartite(g)
    assert set(left) | set(right) == {0, 1, 2, 3}


# -- planarity ---------------------------------------------------------------


@pytest.mark.parametrize("name,planar", [
    ("K5", False), ("K33", False), ("K6", False), ("K7", False),
    ("K4", True), ("octahedron", True), ("cycle(6)", True),
])
def test_planarity_examples(name, planar):
    res = is_planar(named_graph(name))
    assert res.planar is planar
    if not planar:
        assert res.witness_kind in ("K5", "K33")


def test_planarity_invariant_under_relabelling():
    rng = random.Random(4)
    for name in ("K5", "K33", "octahedron"):
        g = named_graph(name)
        expect = is_planar(g).planar
        for _ in range(100):
            perm = list(range(g.n))
            rng.shuffle(perm)
            assert is_planar(g.relabel(perm)).planar is expect


def test_planarity_against_euler_bounds_and_witnesses():
    rng = random.Random(9)
    for _ in range(300):
        n = rng.randint(3, 9)
        g = random_graph(rng, n, rng.uniform(0.2, 0.9))
        res = is_planar(g)
        if res.planar:
            assert g.edge_count <= 3 * n - 6
            if triangle_free(g):
                assert g.edge_count <= 2 * n - 4
        else:
            assert res.witness is not None
            assert kuratowski_kind(res.witness) in ("K5", "K33")
            assert set(res.witness.edges()) <= set(g.edges())


def test_kuratowski_kind_on_subdivisions():
    # K33 with edge (0, 3) subdivided by vertex 6
    edges = [e for e in k33().edges() if e != (0, 3)] + [(0, 6), (3, 6)]
    assert kuratowski_kind(SmallGraph.from_edges(7, edges)) == "K33"
    assert kuratowski_kind(complete_graph(5)) == "K5"
    assert kuratowski_kind(complete_graph(4)) is None
    assert kuratowski_kind(octahedron()) is None
    assert kuratowski_kind(path_graph(5)) is None


# -- Harborth bound ------------------------------------------------------------


def test_harborth_examples():
    assert harborth_bound(11) == 21
    assert harborth_bound(1) == 0
    assert harborth_bound(7) == 12


def test_harborth_matches_high_precision():
    mpmath.mp.dps = 50
    for n in range(1, 101):
        ref = int(mpmath.floor(3 * n - mpmath.sqrt(12 * n - 3)))
        assert harborth_bound(n) == ref, n


def test_harborth_monotone_and_below_3n():
    vals = [harborth_bound(n) for n in range(1, 2001)]
    assert all(v < 3 * n for n, v in enumerate(vals, start=1))
    assert all(a <= b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("bad", [0, -3, 2.5, True])
def test_harborth_rejects(bad):
    with pytest.raises(InvalidInputError):
        harborth_bound(bad)
