"""Test lamplighter distances, the tree embedding and disjoint path families."""

import itertools
import math
import os
import tempfile

import pytest

import gentlenet as gn
from gentlenet.lamp import ORIGIN, LampMoves, LampVertex


def _strings(n):
    return ["".join(b) for k in range(n + 1) for b in itertools.product("01", repeat=k)]


def test_state_text():
    v = LampVertex.of([2, 0, 1], 3)
    assert v.format() == "0,1,2;3"
    assert LampVertex.parse("0,1,2;3") == v
    assert LampVertex.parse(";3") == LampVertex(frozenset(), 3)
    assert ORIGIN.format() == ";0"
    for text in ["x", "1;2;3", "a;1"]:
        with pytest.raises(ValueError):
            LampVertex.parse(text)
    assert v.toggled(1) == LampVertex.of([0, 2], 3)
    assert v.moved(-4).position == -1


def test_neighbors():
    assert gn.lamp.lamp_neighbors(ORIGIN) == [
        LampVertex.of([], 1),
        LampVertex.of([], -1),
        LampVertex.of([0], 0),
    ]
    assert gn.lamp.lamp_neighbors(ORIGIN, moves=LampMoves.STEP_AND_TOGGLE) == [
        LampVertex.of([], 1),
        LampVertex.of([1], 1),
        LampVertex.of([], -1),
        LampVertex.of([0], -1),
    ]
    assert len(gn.lamp.lamp_neighbors(ORIGIN, window=(0, 3))) == 2  # noqa: PLR2004
    with pytest.raises(gn.interfaces.WindowOverflowError):
        gn.lamp.lamp_neighbors(LampVertex.of([5], 0), window=(0, 3))


def test_small_distances():
    assert gn.lamp.lamp_distance(ORIGIN, ORIGIN) == 0
    assert gn.lamp.lamp_distance(ORIGIN, LampVertex.of([1], 1)) == 2  # noqa: PLR2004
    assert gn.lamp.lamp_distance(ORIGIN, LampVertex.of([0, 1, 2], 3)) == 6  # noqa: PLR2004
    assert gn.lamp.lamp_distance(ORIGIN, LampVertex.of([-1], 1)) == 4  # noqa: PLR2004
    explicit = gn.lamp.lamp_distance(
        ORIGIN, LampVertex.of([-1], 1), window=(-3, 3)
    )
    assert explicit == 4  # noqa: PLR2004
    for p in range(5):
        full = LampVertex.of(range(p + 1), p)
        assert gn.lamp.lamp_distance_closed_form(full) == 2 * p + 1
    with pytest.raises(gn.interfaces.WindowOverflowError):
        gn.lamp.lamp_distance(ORIGIN, LampVertex.of(range(11), 10))
    with pytest.raises(gn.interfaces.WindowOverflowError):
        gn.lamp.lamp_distance(ORIGIN, LampVertex.of([5], 0), window=(-3, 3))


def test_translation():
    x, y = LampVertex.of([1], 2), LampVertex.of([0, 3], -1)
    assert gn.lamp.translate(x, y) == LampVertex.of([-2, -1, 1], -3)
    assert gn.lamp.lamp_distance_closed_form(y, x) == 8  # noqa: PLR2004
    assert gn.lamp.lamp_distance(x, y) == 8  # noqa: PLR2004
    assert gn.lamp.lamp_distance(y, x) == 8  # noqa: PLR2004


def test_closed_form_matches_search():
    window = (-6, 6)
    table = gn.lamp.lamp_distance_table(window)
    assert table.shape == (2**13, 13)
    for k in range(10):
        for lamps in itertools.combinations(range(-3, 6), k):
            for p in range(-5, 6):
                v = LampVertex.of(lamps, p)
                index = gn.lamp.state_index(v, window)
                assert table[index] == gn.lamp.lamp_distance_closed_form(v)


def test_table_limits():
    with pytest.raises(gn.interfaces.WindowOverflowError):
        gn.lamp.lamp_distance_table((0, 20))
    with pytest.raises(ValueError):
        gn.lamp.lamp_distance_table((3, 2))
    with pytest.raises(gn.interfaces.WindowOverflowError):
        gn.lamp.lamp_distance_table((1, 4))
    with pytest.raises(gn.interfaces.WindowOverflowError):
        gn.lamp.state_index(LampVertex.of([9], 0), (0, 4))


def test_tree_embedding():
    assert gn.lamp.tree_embedding("101") == LampVertex.of([1, 3], 3)
    assert gn.lamp.tree_embedding("") == ORIGIN
    with pytest.raises(ValueError):
        gn.lamp.tree_embedding("102")
    assert gn.lamp.tree_distance("101", "100") == 2  # noqa: PLR2004
    assert gn.lamp.tree_distance("", "11") == 2  # noqa: PLR2004
    for n in range(7):
        assert gn.lamp.sphere_image_size(n) == 2**n


def test_tree_embedding_under_toggle_or_step():
    one, zero = gn.lamp.tree_embedding("1"), gn.lamp.tree_embedding("0")
    assert gn.lamp.lamp_distance_closed_form(one, zero) == 1
    assert gn.lamp.tree_distance("1", "0") == 2  # noqa: PLR2004
    for u, v in itertools.combinations(_strings(4), 2):
        t = gn.lamp.tree_distance(u, v)
        d = gn.lamp.lamp_distance_closed_form(
            gn.lamp.tree_embedding(v), gn.lamp.tree_embedding(u)
        )
        assert t - 1 <= d <= 2 * t


def test_tree_embedding_is_isometric_under_step_and_toggle():
    window = (-2, 7)
    strings = _strings(4)
    for u in strings:
        table = gn.lamp.lamp_distance_table(
            window, gn.lamp.tree_embedding(u), LampMoves.STEP_AND_TOGGLE
        )
        for v in strings:
            index = gn.lamp.state_index(gn.lamp.tree_embedding(v), window)
            assert table[index] == gn.lamp.tree_distance(u, v)


def test_index_space():
    assert gn.lamp.index_space_suffices(6)
    assert gn.lamp.index_space_suffices(4)
    assert not gn.lamp.index_space_suffices(2)
    assert not gn.lamp.index_space_suffices(3)


def test_path_family_certificate():
    y = LampVertex.of(range(14), 13)
    assert gn.lamp.lamp_distance_closed_form(y) == 27  # noqa: PLR2004
    for R, count in [(6, 3), (7, 4), (8, 4)]:
        family = gn.lamp.path_family(y, R)
        assert len(family) == count
        report = gn.lamp.verify_exp_connected(ORIGIN, y, family, R)
        assert report
        assert report.distance == 27  # noqa: PLR2004
        assert report.max_length <= 6 * 27
    family = gn.lamp.path_family(y, 6)
    assert family.index[0] == (frozenset({-1}), frozenset({14}))
    assert family.paths[0][0] == ORIGIN
    assert family.paths[0][-1] == y


def test_path_family_preconditions():
    y = LampVertex.of(range(14), 13)
    for R in (5, 14):
        with pytest.raises(gn.interfaces.PreconditionError):
            gn.lamp.path_family(y, R)
    with pytest.raises(gn.interfaces.PreconditionError):
        gn.lamp.path_family(LampVertex.of([-1, 3], 13), 6)
    family = gn.lamp.path_family(y, 6)
    with pytest.raises(ValueError):
        gn.lamp.verify_exp_connected(LampVertex.of([], 1), y, family, 6)
    few = gn.lamp.PathFamily(
        x=ORIGIN, y=y, R=6, paths=family.paths[:2], index=family.index[:2]
    )
    report = gn.lamp.verify_exp_connected(ORIGIN, y, few, 6)
    assert not report.count_ok
    assert not report


def test_move_codes():
    walk = gn.lamp.decode_moves(ORIGIN, "TL3R2")
    assert len(walk) == 7  # noqa: PLR2004
    assert walk[-1] == LampVertex.of([0], -1)
    assert gn.lamp.encode_moves(walk) == "TL3R2"
    with pytest.raises(ValueError):
        gn.lamp.decode_moves(ORIGIN, "TX")
    with pytest.raises(ValueError):
        gn.lamp.encode_moves([ORIGIN, LampVertex.of([], 2)])


def test_family_file():
    family = gn.lamp.path_family(LampVertex.of(range(14), 13), 6)
    with tempfile.TemporaryDirectory() as tmpdir:
        path = os.path.join(tmpdir, "witness.family")
        gn.lamp.write_family(family, path, header={"experiment": "demo"})
        with open(path, encoding="utf-8") as fin:
            text = fin.read()
        back = gn.lamp.read_family(path)
        bumped = os.path.join(tmpdir, "bumped.family")
        with open(bumped, "w", encoding="utf-8") as fout:
            fout.write(text.replace("# version=1", "# version=2"))
        with pytest.raises(NotImplementedError):
            gn.lamp.read_family(bumped)
        headless = os.path.join(tmpdir, "headless.family")
        with open(headless, "w", encoding="utf-8") as fout:
            fout.write("\n".join(line for line in text.splitlines() if not line.startswith("# x=")))
        with pytest.raises(ValueError):
            gn.lamp.read_family(headless)
    assert "# experiment=demo" in text
    assert back.paths == family.paths
    assert back.index == family.index
    assert (back.x, back.y, back.R) == (family.x, family.y, family.R)


def test_index_space_across_radii():
    for R in range(6, 65):
        assert gn.lamp.index_space_suffices(R)
        assert (2 ** (R // 2) - 1) ** 4 >= 2**R
    y = LampVertex.of(range(14), 13)
    for R in (6, 7, 8):
        assert len(gn.lamp.path_family(y, R)) == math.ceil(2 ** (R / 4))


@pytest.mark.slow
def test_tree_embedding_is_isometric_up_to_depth_eight():
    window = (-2, 10)
    strings = _strings(8)
    images = [gn.lamp.tree_embedding(u) for u in strings]
    indices = [gn.lamp.state_index(v, window) for v in images]
    for u, image in zip(strings, images):
        table = gn.lamp.lamp_distance_table(
            window, image, LampMoves.STEP_AND_TOGGLE
        )
        for v, index in zip(strings, indices):
            assert table[index] == gn.lamp.tree_distance(u, v)
    for n in range(13):
        assert gn.lamp.sphere_image_size(n) == 2**n
