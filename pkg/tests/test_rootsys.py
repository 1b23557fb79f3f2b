from fractions import Fraction

import pytest

from liecert.services.rootsys import (
    build_root_system,
    distinguished_simple_root,
    dynkin_labels,
    level_partition,
    pairing,
    parse_type,
    root_string,
    weyl_dimension,
)

ALL_TYPES = [("A", 1), ("A", 2), ("A", 3), ("B", 2), ("B", 3), ("C", 3), ("D", 4), ("D", 5),
             ("G", 2), ("F", 4), ("E", 6), ("E", 7), ("E", 8)]


@pytest.mark.parametrize("type_label,rank,count,dim", [
    ("A", 2, 6, 8),
    ("B", 3, 18, 21),
    ("C", 3, 18, 21),
    ("D", 4, 24, 28),
    ("G", 2, 12, 14),
    ("F", 4, 48, 52),
    ("E", 6, 72, 78),
    ("E", 7, 126, 133),
    ("E", 8, 240, 248),
])
def test_root_counts_and_dimension(type_label, rank, count, dim):
    rs = build_root_system(type_label, rank)
    assert len(rs.roots) == count
    assert rs.dimension == dim


@pytest.mark.parametrize("type_label,rank,theta", [
    ("A", 2, (1, 1)),
    ("B", 3, (1, 2, 2)),
    ("C", 3, (2, 2, 1)),
    ("D", 4, (1, 2, 1, 1)),
    ("G", 2, (3, 2)),
    ("F", 4, (2, 3, 4, 2)),
    ("E", 8, (2, 3, 4, 6, 5, 4, 3, 2)),
])
def test_highest_root(type_label, rank, theta):
    assert build_root_system(type_label, rank).highest_root == theta


@pytest.mark.parametrize("type_label,rank", ALL_TYPES)
def test_roots_come_in_pairs_and_theta_is_maximal(type_label, rank):
    rs = build_root_system(type_label, rank)
    for root in rs.roots:
        assert rs.is_root(tuple(-c for c in root))
    for simple in rs.simple_roots:
        assert not rs.is_root(tuple(t + s for t, s in zip(rs.highest_root, simple)))
    assert all(all(t >= c for t, c in zip(rs.highest_root, root)) for root in rs.positive_roots)


@pytest.mark.parametrize("type_label,rank", ALL_TYPES)
def test_pairings_are_integers(type_label, rank):
    rs = build_root_system(type_label, rank)
    for a in rs.positive_roots:
        for b in rs.simple_roots:
            assert isinstance(pairing(rs, a, b), int)


def test_g2_cartan_matrix_and_lengths():
    rs = build_root_system("G", 2)
    assert rs.cartan_matrix == ((2, -1), (-3, 2))
    assert rs.length_squares == (Fraction(2, 3), Fraction(2))


def test_b3_short_root_is_last():
    rs = build_root_system("B", 3)
    assert rs.length_squares == (Fraction(2), Fraction(2), Fraction(1))
    assert rs.cartan_matrix[1][2] == -2
    assert rs.cartan_matrix[2][1] == -1


def test_roots_sorted_by_height_negative_first():
    rs = build_root_system("A", 2)
    heights = [sum(r) for r in rs.roots]
    assert heights == sorted(heights)
    assert rs.roots[0] == (-1, -1)
    assert rs.roots[-1] == (1, 1)


def test_parse_type_accepts_case_and_spaces():
    assert parse_type("g2") == ("G", 2)
    assert parse_type(" E6 ") == ("E", 6)
    assert parse_type("D3") == ("D", 3)


@pytest.mark.parametrize("text", ["E9", "X2", "A0", "G3", "F5", "B1", "2A", ""])
def test_parse_type_rejects(text):
    with pytest.raises(ValueError):
        parse_type(text)


def test_pairing_against_zero_rejected():
    rs = build_root_system("A", 2)
    with pytest.raises(ValueError):
        pairing(rs, (1, 0), (0, 0))


def test_level_partition_a2():
    levels = level_partition(build_root_system("A", 2))
    assert {k: len(v) for k, v in levels.items()} == {2: 1, 1: 2, 0: 0, -1: 2, -2: 1}
    assert levels[2] == ((1, 1),)


def test_level_partition_g2():
    levels = level_partition(build_root_system("G", 2))
    assert {k: len(v) for k, v in levels.items()} == {2: 1, 1: 4, 0: 2, -1: 4, -2: 1}


def test_distinguished_simple_root():
    assert distinguished_simple_root(build_root_system("A", 2)) is None
    assert distinguished_simple_root(build_root_system("G", 2)) == 1
    assert distinguished_simple_root(build_root_system("B", 3)) == 1
    assert distinguished_simple_root(build_root_system("D", 4)) == 1
    assert distinguished_simple_root(build_root_system("E", 8)) == 7


def test_dynkin_labels_of_theta():
    assert dynkin_labels(build_root_system("A", 2), (1, 1)) == (1, 1)
    assert dynkin_labels(build_root_system("G", 2), (3, 2)) == (0, 1)
    assert dynkin_labels(build_root_system("B", 3), (1, 2, 2)) == (0, 1, 0)


def test_root_string():
    rs = build_root_system("G", 2)
    # the short-root string through the long simple root has length 4
    assert root_string(rs, (0, 1), (1, 0)) == (0, 3)
    assert root_string(build_root_system("A", 2), (0, 1), (1, 0)) == (0, 1)


@pytest.mark.parametrize("type_label,rank", ALL_TYPES)
def test_root_strings_through_theta(type_label, rank):
    rs = build_root_system(type_label, rank)
    theta = rs.highest_root
    for alpha in rs.simple_roots:
        if alpha == theta:
            continue
        down, up = root_string(rs, theta, alpha)
        assert up == 0
        assert down == pairing(rs, theta, alpha)
        for k in range(down + 1):
            assert rs.is_root(tuple(t - k * a for t, a in zip(theta, alpha)))
        assert not rs.is_root(tuple(t - (down + 1) * a for t, a in zip(theta, alpha)))


@pytest.mark.parametrize("type_label,rank", ALL_TYPES)
def test_levels_are_odd_under_negation(type_label, rank):
    rs = build_root_system(type_label, rank)
    levels = level_partition(rs)
    level_of = {root: level for level, members in levels.items() for root in members}
    assert len(level_of) == len(rs.roots)
    for root in rs.roots:
        assert level_of[tuple(-c for c in root)] == -level_of[root]


@pytest.mark.parametrize("type_label,rank,labels,expected", [
    ("A", 2, (1, 0), 3),
    ("A", 2, (1, 1), 8),
    ("A", 2, (2, 2), 27),
    ("A", 2, (3, 0), 10),
    ("G", 2, (1, 0), 7),
    ("G", 2, (0, 1), 14),
    ("G", 2, (0, 2), 77),
    ("G", 2, (3, 0), 77),
    ("B", 3, (1, 0, 0), 7),
    ("B", 3, (0, 0, 1), 8),
    ("B", 3, (0, 2, 0), 168),
    ("B", 3, (1, 0, 2), 189),
    ("D", 4, (0, 2, 0, 0), 300),
    ("D", 4, (1, 0, 1, 1), 350),
    ("E", 8, (0, 0, 0, 0, 0, 0, 0, 1), 248),
])
def test_weyl_dimension(type_label, rank, labels, expected):
    assert weyl_dimension(build_root_system(type_label, rank), labels) == expected


def test_weyl_dimension_rejects_bad_labels():
    rs = build_root_system("A", 2)
    with pytest.raises(ValueError):
        weyl_dimension(rs, (1,))
    with pytest.raises(ValueError):
        weyl_dimension(rs, (-1, 0))
