"""Test cone-offs, gentleness profiles, syllabic checks and horoballs."""

import itertools
import math

import networkx as nx
import numpy as np
import pytest

import gentlenet as gn
from gentlenet.coneoff import Collection, GentlenessProfile, Provenance, VertexMap
from gentlenet.gp import GraphProductSpec
from gentlenet.graphcore import FiniteGraph
from gentlenet.interfaces import HostMode


def _cycle(n):
    return FiniteGraph.build(n, [(i, (i + 1) % n) for i in range(n)])


def _grid(a, b):
    return FiniteGraph.from_networkx(nx.grid_2d_graph(a, b))


def _word(spec, ball, text):
    return ball.vertex(gn.gp.normalize(spec, gn.gp.parse_word(spec, text)))


def _f2():
    return GraphProductSpec.build(["a", "b"], ["z", "z"])


def _z2():
    return GraphProductSpec.build(["a", "b"], ["z", "z"], [("a", "b")])


def _z4z4():
    return GraphProductSpec.build(["a", "b"], ["c4", "c4"], [("a", "b")])


def test_collection_build():
    g = _cycle(6)
    P = Collection.build(g, [[0, 1], [1, 0], [2, 3, 4]])
    assert len(P) == 2  # noqa: PLR2004
    assert P.memberships()[1] == {0}
    assert P.local_finiteness() == 1
    with pytest.raises(ValueError):
        Collection.build(g, [[]])
    with pytest.raises(ValueError):
        Collection.build(g, [[0, 3]])
    with pytest.raises(ValueError):
        Collection.build(g, [[0, 1]], [Provenance(), Provenance()])
    with pytest.raises(KeyError):
        Collection.build(g, [[0, 6]])
    with pytest.raises(ValueError):
        Provenance("coset")


def test_cone_off_edges():
    g = _cycle(6)
    coned = gn.coneoff.cone_off(g, Collection.build(g, [[0, 1, 2, 3]]))
    assert coned.n_edges == 9  # noqa: PLR2004
    assert coned.edge_label(0, 3) == "cone"
    assert coned.edge_label(0, 1) is None
    assert gn.graphcore.distance(coned, 0, 3) == 1
    assert coned.origin is None
    phi = VertexMap.canonical(g, coned)
    assert phi.lipschitz() == 1
    assert VertexMap.constant(g, coned, 2).lipschitz() == 0
    with pytest.raises(ValueError):
        VertexMap(domain=g, codomain=g, image=(0, 1))


def test_fiber_count_free_group():
    spec = _f2()
    ball = gn.gp.cayley_ball(spec, 4)
    P = gn.coneoff.vertex_group_collection(ball, spec)
    assert {tag.kind for tag in P.provenance} == {"vertex-group"}
    phi = VertexMap.canonical(ball, gn.coneoff.cone_off(ball, P))
    origin = ball.origin
    assert gn.coneoff.fiber_count(phi, origin, origin, 2, 1) == 9  # noqa: PLR2004
    assert gn.coneoff.fiber_count(phi, origin, origin, 0, 0) == 1
    with pytest.raises(gn.interfaces.CoverageError):
        gn.coneoff.fiber_count(phi, origin, origin, 5, 1)
    with pytest.raises(ValueError):
        gn.coneoff.fiber_count(phi, origin, origin, -1, 1)


def test_identity_profile_on_cycle():
    phi = VertexMap.identity(_cycle(8))
    profile = gn.coneoff.gentleness_profile(phi, 2, 2)
    assert profile.table.tolist() == [[1, 1, 1], [1, 3, 3], [1, 3, 5]]
    assert profile.sampling == "all"
    assert profile.n_centers == 8  # noqa: PLR2004
    assert profile.is_monotone()
    assert profile[2, 1] == 3  # noqa: PLR2004
    frame = profile.to_frame()
    assert list(frame.columns) == ["R1", "R2", "G", "eta_hat"]
    assert len(frame) == 9  # noqa: PLR2004
    parallel = gn.coneoff.gentleness_profile(phi, 2, 2, num_process=2)
    assert np.array_equal(parallel.table, profile.table)
    with pytest.raises(ValueError):
        gn.coneoff.gentleness_profile(phi, 2, 2, num_process=0)


def test_profile_centers_on_balls():
    spec = GraphProductSpec.build(["a"], ["z"])
    line = gn.gp.cayley_ball(spec, 6)
    phi = VertexMap.identity(line)
    profile = gn.coneoff.gentleness_profile(phi, 2, 1)
    assert profile.sampling == "inner-ball;undercovered:2"
    assert profile.n_centers == 9  # noqa: PLR2004
    single = gn.coneoff.gentleness_profile(phi, 2, 1, centers=[line.origin])
    assert single.sampling == "centers:1;undercovered:2"
    inner = gn.coneoff.gentleness_profile(
        phi, 2, 1, targets=[v for v in line.vertices if line.depths()[v] < 6]
    )
    assert inner.sampling == "inner-ball"
    assert np.array_equal(single.table, profile.table)
    with pytest.raises(gn.interfaces.CoverageError):
        gn.coneoff.gentleness_profile(phi, 7, 1)


def test_fit_constant_families():
    phi = VertexMap.identity(_cycle(12))
    profile = gn.coneoff.gentleness_profile(phi, 3, 2)
    assert gn.coneoff.fit_constant(profile, "pol:1").constant == 2  # noqa: PLR2004
    assert gn.coneoff.fit_constant(profile, "lin").constant == 2  # noqa: PLR2004
    fit = gn.coneoff.fit_constant(profile, "exp")
    assert fit.family == "exp"
    assert fit.constant == 2  # noqa: PLR2004
    assert not fit.infinite
    huge = GentlenessProfile(
        table=np.array([[1, 1], [1, 10**6]]), sampling="all", n_centers=1
    )
    assert gn.coneoff.fit_constant(huge, "pol:0").infinite
    with pytest.raises(ValueError):
        gn.coneoff.parse_family("pol:x")
    with pytest.raises(ValueError):
        gn.coneoff.parse_family("cubic")
    assert gn.coneoff.parse_family(" pol:3 ").name == "pol:3"


def test_observed_degree():
    squares = GentlenessProfile(
        table=np.array([[1], [1], [4], [9], [16]]), sampling="all", n_centers=1
    )
    assert gn.coneoff.observed_degree(squares) == pytest.approx(2.0)
    assert squares.eta_hat(0) == pytest.approx(2.0)
    flat = GentlenessProfile(
        table=np.array([[1, 2], [0, 3]]), sampling="all", n_centers=1
    )
    assert not flat.is_monotone()
    assert math.isnan(gn.coneoff.observed_degree(flat))
    spec = _f2()
    ball = gn.gp.cayley_ball(spec, 5)
    constant = VertexMap.constant(ball, ball, ball.origin)
    profile = gn.coneoff.gentleness_profile(
        constant, 5, 0, centers=[ball.origin]
    )
    assert profile.table[:, 0].tolist() == [1, 5, 17, 53, 161, 485]
    assert gn.coneoff.observed_degree(profile) > 4  # noqa: PLR2004


def test_counting_bound():
    g = _cycle(6)
    P = Collection.build(g, [[0, 1, 2, 3]])
    assert gn.coneoff.collection_growth(g, P, 3) == [1, 3, 4, 4]
    gamma = [1, 2, 3]
    assert gn.coneoff.counting_bound(2, gamma.__getitem__, 1, 0, 2, 1) == 36  # noqa: PLR2004
    profile = gn.coneoff.gentleness_profile(VertexMap.identity(_cycle(8)), 2, 2)
    assert gn.coneoff.check_counting_bound(profile, 1, [1, 3, 5]) == []
    violations = gn.coneoff.check_counting_bound(profile, 1, [1, 1, 1])
    assert (1, 1, 3, 1) in violations
    with pytest.raises(ValueError):
        gn.coneoff.check_counting_bound(profile, 1, [1, 3])


def test_syllabic_finite_torus():
    spec = _z4z4()
    ball = gn.gp.cayley_ball(spec, 4)
    assert len(ball) == 16  # noqa: PLR2004
    P = gn.coneoff.vertex_group_collection(ball, spec)
    assert len(P) == 8  # noqa: PLR2004
    report = gn.coneoff.is_strongly_syllabic_sample(ball, P)
    assert report.holds
    assert report.pairs_checked == 120  # noqa: PLR2004
    x, y = ball.origin, _word(spec, ball, "a^2 b")
    witness = gn.coneoff.is_syllabic_pair(ball, P, x, y)
    assert witness is not None
    assert len(witness.cone_path) == 3  # noqa: PLR2004
    assert witness.host_path[0] == x
    assert witness.host_path[-1] == y
    assert len(witness.host_path) - 1 == gn.graphcore.distance(ball, x, y)
    assert gn.coneoff.quasi_syllabic_constants(ball, P) == (1, 0)
    coned = gn.coneoff.cone_off(ball, P)
    qm = gn.gp.qm_ball(spec, 2)
    assert nx.is_isomorphic(coned.to_networkx(), qm.to_networkx())


def test_line_in_plane_is_not_syllabic():
    spec = _z2()
    ball = gn.gp.cayley_ball(spec, 4)
    rows = gn.coneoff.parabolic_collection(ball, spec, [[0]])
    line = [m for m in rows if ball.origin in m]
    P = Collection.build(ball, line)
    x, y = _word(spec, ball, "a^-2 b"), _word(spec, ball, "a^2 b")
    assert gn.coneoff.is_syllabic_pair(ball, P, x, y) is None
    report = gn.coneoff.is_strongly_syllabic_sample(ball, P, [(x, y)])
    assert not report.holds
    assert report.counterexample[0] == x
    assert report.counterexample[-1] == y
    assert gn.coneoff.quasi_syllabic_constants(ball, P, [(x, y)]) == (1, 1)


def test_parallel_closure_on_grid():
    g = _grid(3, 2)
    dec = gn.median.hyperplanes(g)
    rows = [[g.vertex((i, j)) for i in range(3)] for j in range(2)]
    both = Collection.build(g, rows)
    report = gn.coneoff.check_parallel_closure(g, dec, both, boundary="all")
    assert report.holds
    assert report.pairs_checked > 0
    literal = gn.coneoff.check_parallel_closure(
        g, dec, both, reading="ay", boundary="all"
    )
    assert not literal.holds
    one = Collection.build(g, rows[:1])
    failing = gn.coneoff.check_parallel_closure(g, dec, one, boundary="all")
    assert not failing.holds
    assert failing.counterexample is not None
    with pytest.raises(ValueError):
        gn.coneoff.check_parallel_closure(g, dec, both, reading="xy")
    with pytest.raises(gn.interfaces.PreconditionError):
        gn.coneoff.check_parallel_closure(_grid(3, 2), dec, both)


def test_parabolic_collection_tags():
    spec = GraphProductSpec.build(
        ["a", "b", "c"], ["z"] * 3, [("a", "b"), ("b", "c")]
    )
    ball = gn.gp.qm_ball(spec, 2)
    lambdas = gn.gp.maximal_polynomial_parabolics(spec)
    P = gn.coneoff.parabolic_collection(ball, spec, lambdas)
    assert {tag.kind for tag in P.provenance} == {"parabolic"}
    assert {tag.parabolic for tag in P.provenance} == {("a", "b"), ("b", "c")}
    assert any(ball.origin in member for member in P)
    for member, tag in zip(P.members, P.provenance):
        assert tag.representative in member


def test_horoball():
    base = FiniteGraph.build(3, [(0, 1), (1, 2)])
    h = gn.coneoff.horoball(base, 1)
    assert len(h) == 6  # noqa: PLR2004
    assert h.n_edges == 8  # noqa: PLR2004
    assert h.name(4) == "1@1"
    assert h.has_edge(3, 5)
    path = FiniteGraph.build(9, [(i, i + 1) for i in range(8)])
    deep = gn.coneoff.horoball(path, 2)
    assert gn.graphcore.distance(deep, 0, 8) == 6  # noqa: PLR2004
    with pytest.raises(ValueError):
        gn.coneoff.horoball(base, -1)


def test_fiber_count_respects_symmetry():
    g = _cycle(8)
    P = Collection.build(g, [[0, 1, 2], [4, 5, 6]])
    phi = VertexMap.canonical(g, gn.coneoff.cone_off(g, P))

    def turn(v):
        return (v + 4) % 8

    for p, q in itertools.product(range(8), range(8)):
        for R1, R2 in itertools.product(range(3), range(3)):
            assert gn.coneoff.fiber_count(phi, p, q, R1, R2) == (
                gn.coneoff.fiber_count(phi, turn(p), turn(q), R1, R2)
            )


def test_syllabic_pairs_are_quasi_syllabic():
    spec = _f2()
    ball = gn.gp.cayley_ball(spec, 3)
    P = gn.coneoff.vertex_group_collection(ball, spec)
    coned = gn.coneoff.cone_off(ball, P)
    found = 0
    for x, y in itertools.combinations(range(12), 2):
        if gn.coneoff.is_syllabic_pair(ball, P, x, y, coned=coned) is None:
            continue
        found += 1
        assert gn.coneoff.quasi_syllabic_constants(ball, P, [(x, y)]) == (1, 0)
    assert found > 0


@pytest.mark.slow
def test_coset_cone_off_of_free_group_is_lin_gentle():
    spec = _f2()
    ball = gn.gp.cayley_ball(spec, 8)
    assert len(ball) == 13121  # noqa: PLR2004
    P = gn.coneoff.vertex_group_collection(ball, spec)
    assert P.local_finiteness() == 2  # noqa: PLR2004
    growth = gn.coneoff.collection_growth(ball, P, 6)
    assert growth == [2 * R + 1 for R in range(7)]
    phi = VertexMap.canonical(ball, gn.coneoff.cone_off(ball, P))
    depths = ball.depths()
    profile = gn.coneoff.gentleness_profile(
        phi,
        6,
        3,
        centers=[ball.origin],
        targets=[v for v in ball.vertices if depths[v] <= 4],  # noqa: PLR2004
    )
    assert profile.table[1, 1] == 5  # noqa: PLR2004
    fit = gn.coneoff.fit_constant(profile, "lin")
    assert fit.constant is not None
    assert fit.constant <= 4  # noqa: PLR2004
    assert gn.coneoff.check_counting_bound(profile, 2, growth) == []


@pytest.mark.slow
def test_constant_map_on_free_group_is_only_exp_gentle():
    spec = _f2()
    ball = gn.gp.cayley_ball(spec, 8)
    constant = VertexMap.constant(ball, ball, ball.origin)
    profile = gn.coneoff.gentleness_profile(
        constant, 8, 1, centers=[ball.origin]
    )
    column = [1, 5, 17, 53, 161, 485, 1457, 4373, 13121]
    assert profile.table[:, 1].tolist() == column
    exp = gn.coneoff.fit_constant(profile, "exp")
    assert exp.constant == 2  # noqa: PLR2004
    assert gn.coneoff.observed_degree(profile) > 8  # noqa: PLR2004
    for k in range(1, 9):
        fit = gn.coneoff.fit_constant(profile, f"pol:{k}")
        assert fit.constant is not None
        assert fit.constant > 1


@pytest.mark.slow
def test_parallel_closure_and_syllabic_pairs_on_balls():
    for name, window, radius in (("C(C5)", 8, 4), ("A(P3)", 2, 2)):
        spec = gn.experiments.load_spec(name, window=window)
        ball = gn.gp.qm_ball(spec, radius)
        P = gn.coneoff.parabolic_collection(
            ball, spec, gn.gp.maximal_polynomial_parabolics(spec)
        )
        dec = gn.median.hyperplanes(ball, mode=HostMode.QUASI_MEDIAN)
        report = gn.coneoff.check_parallel_closure(
            ball, dec, P, boundary="certified"
        )
        assert report.holds
        assert report.pairs_checked > 0
        coned = gn.coneoff.cone_off(ball, P)
        for x, y in itertools.combinations(ball.vertices, 2):
            witness = gn.coneoff.is_syllabic_pair(ball, P, x, y, coned=coned)
            assert witness is not None
