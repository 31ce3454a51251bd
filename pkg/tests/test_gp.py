"""Test graph products: normal forms, balls and graphical criteria."""

import itertools
import os
import tempfile

import networkx as nx
import pytest

import gentlenet as gn
from gentlenet.gp import GraphProductSpec, Syllable


def _spec(names, groups, edges=()):
    return GraphProductSpec.build(list(names), list(groups), list(edges))


def _word(spec, text):
    return gn.gp.normalize(spec, gn.gp.parse_word(spec, text))


def test_cyclic_group_descriptors():
    assert gn.gp.CyclicGroup.parse("c3").order == 3  # noqa: PLR2004
    z = gn.gp.CyclicGroup.parse("z:window=5")
    assert z.order is None
    assert z.window == 5  # noqa: PLR2004
    assert gn.gp.CyclicGroup.parse("z").window == 8  # noqa: PLR2004
    assert z.descriptor == "z:window=5"
    assert len(z.nontrivial_elements()) == 10  # noqa: PLR2004
    assert gn.gp.CyclicGroup.parse("c3").symmetric_generators() == (1, 2)
    with pytest.raises(ValueError):
        gn.gp.CyclicGroup.parse("q7")
    with pytest.raises(ValueError):
        gn.gp.CyclicGroup(1)
    with pytest.raises(ValueError):
        gn.gp.CyclicGroup(None)


def test_spec_validation():
    with pytest.raises(KeyError):
        _spec("ab", ["c2", "c2"], [("a", "x")])
    with pytest.raises(ValueError):
        _spec("aa", ["c2", "c2"])
    spec = _spec("ab", ["c2", "z:window=3"], [("a", "b")])
    assert spec.commute(0, 1)
    assert spec.vertex("b") == 1
    with pytest.raises(KeyError):
        spec.vertex("c")


def test_normalize_rewrites():
    raag = _spec("abc", ["z"] * 3, [("a", "b"), ("b", "c")])
    assert gn.gp.format_word(raag, _word(raag, "b a")) == "a b"
    assert _word(raag, "a a^-1") == gn.gp.IDENTITY
    assert gn.gp.format_word(raag, gn.gp.IDENTITY) == "1"
    assert _word(raag, "a b a^-1") == _word(raag, "b")
    assert len(_word(raag, "a c a^-1")) == 3  # noqa: PLR2004
    assert gn.gp.format_word(raag, _word(raag, "a c b a")) == "a b c a"
    racg = _spec("ab", ["c2", "c2"])
    assert _word(racg, "a a") == gn.gp.IDENTITY
    assert len(_word(racg, "a b a b")) == 4  # noqa: PLR2004
    z3 = _spec("a", ["c3"])
    assert _word(z3, "a a a") == gn.gp.IDENTITY
    assert _word(z3, "a a") == _word(z3, "a^-1")
    with pytest.raises(ValueError):
        gn.gp.parse_word(racg, "a^2")
    with pytest.raises(ValueError):
        gn.gp.parse_word(racg, "a+b")


def test_multiply_inverse():
    spec = _spec("abc", ["c3", "z", "c2"], [("a", "b")])
    w = _word(spec, "a b^2 c a c b^-1")
    assert gn.gp.multiply(spec, w, gn.gp.inverse(spec, w)) == gn.gp.IDENTITY
    assert gn.gp.multiply(spec, gn.gp.inverse(spec, w), w) == gn.gp.IDENTITY
    assert gn.gp.equal(spec, w.syllables, list(w.syllables))


def test_normal_form_matches_ball_distance():
    specs = [
        _spec("abc", ["c2", "c3", "c2"], [("a", "b"), ("b", "c")]),
        _spec("abcd", ["c2"] * 4, [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]),
        _spec("abcd", ["c3", "c2", "c2", "c3"], [("a", "b"), ("a", "c"), ("a", "d")]),
    ]
    for spec in specs:
        ball = gn.gp.qm_ball(spec, 4)
        depths = ball.depths()
        letters = [
            Syllable(gn.interfaces.VertexIndex(v), x)
            for v, group in enumerate(spec.groups)
            for x in group.nontrivial_elements()
        ]
        for n in range(5):
            for word in itertools.product(letters, repeat=n):
                reduced = gn.gp.normalize(spec, word)
                assert len(reduced) <= n
                length = gn.gp.syllable_length(spec, word)
                assert depths[ball.vertex(reduced)] == length == len(reduced)


def test_qm_ball_shapes():
    cube = gn.gp.qm_ball(_spec("abc", ["c2"] * 3, itertools.combinations("abc", 2)), 3)
    assert len(cube) == 8  # noqa: PLR2004
    assert cube.n_edges == 12  # noqa: PLR2004
    assert nx.is_isomorphic(cube.to_networkx(), nx.hypercube_graph(3))
    triangle = gn.gp.qm_ball(_spec("a", ["c3"]), 1)
    assert len(triangle) == 3  # noqa: PLR2004
    assert triangle.n_edges == 3  # noqa: PLR2004
    assert cube.origin == 0
    assert cube.payloads[0] == gn.gp.IDENTITY
    assert {cube.edge_label(u, v) for u, v in cube.edges()} == {0, 1, 2}
    with pytest.raises(gn.interfaces.WindowOverflowError):
        gn.gp.qm_ball(_spec("a", ["z:window=2"]), 3)


def test_cayley_ball_free_group():
    f2 = _spec("ab", ["z"] * 2)
    ball = gn.gp.cayley_ball(f2, 2)
    assert len(ball) == 17  # noqa: PLR2004
    assert ball.n_edges == 16  # noqa: PLR2004
    assert ball.depths()[ball.vertex(_word(f2, "a b^-1"))] == 2  # noqa: PLR2004
    with pytest.raises(gn.interfaces.WindowOverflowError):
        gn.gp.cayley_ball(_spec("a", ["z:window=1"]), 2)
    z2 = gn.gp.cayley_ball(_spec("ab", ["z"] * 2, [("a", "b")]), 2)
    assert len(z2) == 13  # noqa: PLR2004


def test_cayley_and_qm_agree_for_small_orders():
    spec = _spec("abc", ["c2", "c3", "c2"], [("a", "b")])
    assert nx.is_isomorphic(
        gn.gp.cayley_ball(spec, 3).to_networkx(),
        gn.gp.qm_ball(spec, 3).to_networkx(),
    )


def _raag(graph):
    return gn.gp.right_angled_artin(graph)


def _racg(graph):
    return gn.gp.right_angled_coxeter(graph)


def test_graphical_criteria_table():
    k33_plus = nx.complete_bipartite_graph(3, 3)
    k33_plus.add_edge(3, 4)
    k33_plus_plus = nx.complete_bipartite_graph(3, 3)
    k33_plus_plus.add_edges_from([(0, 1), (3, 4)])
    positive = [
        _raag(nx.cycle_graph(4)),
        _racg(nx.complete_bipartite_graph(3, 3)),
        _racg(k33_plus),
        _racg(k33_plus_plus),
        _spec("abcdef", ["c2"] * 4 + ["c3", "c3"], [(u, v) for u in "abcd" for v in "ef"]),
    ]
    negative = [
        _raag(nx.path_graph(3)),
        _raag(nx.balanced_tree(2, 2)),
        _racg(nx.cycle_graph(5)),
        _racg(nx.empty_graph(2)),
        _racg(nx.complete_graph(4)),
    ]
    for spec in positive:
        assert gn.gp.contains_F2xF2(spec)
        assert not gn.gp.lin_polynomially_hyperbolic(spec)
    for spec in negative:
        assert not gn.gp.contains_F2xF2(spec)
        assert gn.gp.lin_polynomially_hyperbolic(spec)
    name, embedding = gn.gp.contains_F2xF2_witness(positive[0])
    assert name == "NF1*NF1"
    assert len(set(embedding.values())) == 4  # noqa: PLR2004


def test_free_subgroup_criterion():
    assert gn.gp.contains_F2(_raag(nx.empty_graph(2)))
    assert not gn.gp.contains_F2(_raag(nx.complete_graph(2)))
    assert not gn.gp.contains_F2(_racg(nx.empty_graph(2)))
    assert gn.gp.contains_F2(_racg(nx.empty_graph(3)))
    assert gn.gp.contains_F2(_racg(nx.cycle_graph(5)))
    assert gn.gp.contains_F2(_spec("ab", ["c2", "c3"]))
    assert not gn.gp.contains_F2(_spec("ab", ["c2", "c3"], [("a", "b")]))


def test_parabolics_and_dimension():
    c5 = _racg(nx.cycle_graph(5))
    maximal = gn.gp.maximal_polynomial_parabolics(c5)
    assert len(maximal) == 5  # noqa: PLR2004
    for subset in maximal:
        sub, _ = c5.gamma.induced_subgraph(subset)
        assert nx.is_isomorphic(sub.to_networkx(), nx.path_graph(3))
    p3 = _spec("abc", ["z"] * 3, [("a", "b"), ("b", "c")])
    assert gn.gp.maximal_polynomial_parabolics(p3) == [
        frozenset({0, 1}),
        frozenset({1, 2}),
    ]
    assert gn.gp.join_factors(p3, [0, 1, 2]) == [frozenset({0, 2}), frozenset({1})]
    assert not gn.gp.parabolic_has_polynomial_growth(p3, [0, 2])
    assert gn.gp.cubical_dimension(_racg(nx.complete_graph(3))) == 3  # noqa: PLR2004
    assert gn.gp.cubical_dimension(c5) == 2  # noqa: PLR2004


def test_spec_file():
    spec = _spec("abc", ["c2", "z:window=4", "c3"], [("a", "c")])
    with tempfile.TemporaryDirectory() as tmpdir:
        path = os.path.join(tmpdir, "spec.json")
        gn.gp.write_spec(spec, path)
        back = gn.gp.read_spec(path)
    assert back.groups == spec.groups
    assert back.gamma.adjacency == spec.gamma.adjacency
    assert [back.name(v) for v in back.gamma.vertices] == ["a", "b", "c"]
    document = gn.gp.spec_to_document(spec)
    document["version"] = 2
    with pytest.raises(NotImplementedError):
        gn.gp.spec_from_document(document)


def test_equality_is_a_congruence():
    spec = _spec("abc", ["c3", "z", "c2"], [("a", "b")])
    same = [("a b a c", "a^2 b c"), ("b a^2 b^-1", "a^-1"), ("c c", "")]
    others = ["", "a", "b^2 c", "c a c", "a^-1 b^-3 c a"]
    for left, right in same:
        w1, w2 = gn.gp.parse_word(spec, left), gn.gp.parse_word(spec, right)
        assert gn.gp.equal(spec, w1, w2)
        for u, v in itertools.product(others, repeat=2):
            pre, post = gn.gp.parse_word(spec, u), gn.gp.parse_word(spec, v)
            assert gn.gp.equal(spec, pre + w1 + post, pre + w2 + post)
            product = gn.gp.multiply(spec, pre, w1)
            assert product == gn.gp.multiply(spec, pre, w2)
    w3, w4 = gn.gp.parse_word(spec, "a b c"), gn.gp.parse_word(spec, "c")
    for u in others:
        pre = gn.gp.parse_word(spec, u)
        assert not gn.gp.equal(spec, pre + w3, pre + w4)


@pytest.mark.slow
def test_normal_forms_on_every_small_graph_product():
    for index in range(1, 19):
        gamma = nx.graph_atlas(index)
        names = [f"v{v}" for v in gamma]
        edges = [(f"v{u}", f"v{v}") for u, v in gamma.edges()]
        for orders in itertools.product((2, 3), repeat=len(names)):
            spec = _spec(names, [f"c{k}" for k in orders], edges)
            ball = gn.gp.qm_ball(spec, 5)
            depths = ball.depths()
            letters = [
                Syllable(gn.interfaces.VertexIndex(v), x)
                for v, group in enumerate(spec.groups)
                for x in group.nontrivial_elements()
            ]
            for n in range(6):
                for word in itertools.product(letters, repeat=n):
                    reduced = gn.gp.normalize(spec, word)
                    assert depths[ball.vertex(reduced)] == len(reduced) <= n
                    if n <= 2:  # noqa: PLR2004
                        assert gn.gp.syllable_length(spec, word) == len(reduced)


@pytest.mark.slow
def test_no_join_of_free_parabolics_without_pattern():
    for gamma in nx.graph_atlas_g()[1:]:
        for spec in (_racg(gamma), _raag(gamma)):
            if gn.gp.contains_F2xF2(spec):
                continue
            vertices = list(spec.gamma.vertices)
            for size in range(1, len(vertices) + 1):
                for subset in itertools.combinations(vertices, size):
                    free = [
                        factor
                        for factor in gn.gp.join_factors(spec, subset)
                        if not gn.gp.parabolic_has_polynomial_growth(
                            spec, factor
                        )
                    ]
                    assert len(free) <= 1
