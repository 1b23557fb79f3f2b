from fractions import Fraction
import random

import pytest
from sympy import Matrix, Rational, zeros

from liecert.services.liealg import (
    ConstructionError,
    Element,
    ad_matrix,
    antisymmetry_failures,
    bracket,
    build_chevalley,
    coroot,
    exp_ad,
    flat,
    grading_element,
    jacobi_failures,
    killing_form,
    killing_invariance_failures,
    structure_cache_path,
)
from liecert.services.rootsys import build_root_system, pairing


def _sympy(rows):
    return Matrix([[Rational(x.numerator, x.denominator) for x in row] for row in rows])


@pytest.mark.parametrize("type_label,rank", [("A", 1), ("A", 2), ("A", 3), ("B", 2), ("C", 3), ("G", 2)])
def test_chevalley_identities(type_label, rank):
    L = build_chevalley(build_root_system(type_label, rank))
    assert jacobi_failures(L) == []
    assert antisymmetry_failures(L) == []
    assert killing_invariance_failures(L) == []


@pytest.mark.slow
@pytest.mark.parametrize("type_label,rank", [("B", 3), ("D", 4), ("F", 4)])
def test_chevalley_identities_larger(type_label, rank):
    L = build_chevalley(build_root_system(type_label, rank))
    assert jacobi_failures(L) == []
    assert antisymmetry_failures(L) == []


def test_basis_labels_and_weights(a2):
    assert a2.dim == 8
    assert a2.basis_labels[:2] == ("h1", "h2")
    assert a2.basis_labels[a2.theta_index] == "x(1,1)"
    assert a2.weights[0] == (0, 0)
    assert a2.weights[a2.minus_theta_index] == (-1, -1)


def test_cartan_action_is_pairing(g2):
    rs = g2.root_system
    for root in rs.roots:
        a = g2.index_of(root)
        for i in range(rs.rank):
            expected = pairing(rs, root, rs.simple_roots[i])
            assert dict(g2.bracket_basis(i, a)).get(a, 0) == expected


def test_root_pairs_bracket_to_coroot(g2):
    for root in g2.root_system.positive_roots:
        a = g2.index_of(root)
        minus = g2.index_of(tuple(-c for c in root))
        assert dict(g2.bracket_basis(a, minus)) == coroot(g2, root)


def test_a2_matches_matrix_realisation(a2):
    def unit(i, j):
        m = zeros(3, 3)
        m[i, j] = 1
        return m

    image = {
        0: unit(0, 0) - unit(1, 1),
        1: unit(1, 1) - unit(2, 2),
        a2.index_of((1, 0)): unit(0, 1),
        a2.index_of((0, 1)): unit(1, 2),
        a2.index_of((-1, 0)): unit(1, 0),
        a2.index_of((0, -1)): unit(2, 1),
    }
    top = dict(a2.bracket_basis(a2.index_of((1, 0)), a2.index_of((0, 1))))
    bottom = dict(a2.bracket_basis(a2.index_of((-1, 0)), a2.index_of((0, -1))))
    n_top = Rational(top[a2.theta_index].numerator, top[a2.theta_index].denominator)
    n_bottom = Rational(bottom[a2.minus_theta_index].numerator, bottom[a2.minus_theta_index].denominator)
    x1, x2 = image[a2.index_of((1, 0))], image[a2.index_of((0, 1))]
    y1, y2 = image[a2.index_of((-1, 0))], image[a2.index_of((0, -1))]
    image[a2.theta_index] = (x1 * x2 - x2 * x1) / n_top
    image[a2.minus_theta_index] = (y1 * y2 - y2 * y1) / n_bottom

    def phi(vec):
        out = zeros(3, 3)
        for k, c in vec.items():
            out += Rational(c.numerator, c.denominator) * image[k]
        return out

    for i in range(a2.dim):
        for j in range(a2.dim):
            lhs = phi(dict(a2.bracket_basis(i, j)))
            rhs = image[i] * image[j] - image[j] * image[i]
            assert lhs == rhs, (a2.basis_labels[i], a2.basis_labels[j])


def test_killing_form_values(a2):
    h1 = Element.basis(a2.dim, 0)
    x = Element.basis(a2.dim, a2.index_of((1, 0)))
    y = Element.basis(a2.dim, a2.index_of((-1, 0)))
    # 2n tr(xy) on sl3
    assert killing_form(a2, h1, h1) == 12
    assert killing_form(a2, x, y) == 6
    assert killing_form(a2, x, x) == 0


def test_killing_form_matches_trace_of_ad(g2):
    x = Element.basis(g2.dim, 0) + 3 * Element.basis(g2.dim, g2.theta_index)
    y = Element.basis(g2.dim, 1) - Element.basis(g2.dim, g2.minus_theta_index)
    trace = (_sympy(ad_matrix(g2, x)) * _sympy(ad_matrix(g2, y))).trace()
    assert killing_form(g2, x, y) == Fraction(int(trace.p), int(trace.q))


def test_flat_of_killing_form_is_identity(g2):
    result = flat(g2, g2.killing_gram)
    n = g2.dim
    assert result == [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def test_flat_rejects_wrong_shape(a2):
    with pytest.raises(ValueError):
        flat(a2, [[1, 0], [0, 1]])


def test_grading_element(a2, g2):
    assert grading_element(a2) == {0: 1, 1: 1}
    assert grading_element(g2) == {0: 1, 1: 2}


def test_exp_ad_on_sl2_triple(a2):
    n = a2.dim
    x = {a2.theta_index: Fraction(1)}
    v = {a2.minus_theta_index: Fraction(1)}
    t = Fraction(2, 3)
    result = exp_ad(a2, x, v, t)
    expected = Element.basis(n, a2.minus_theta_index) + t * Element.from_vec(n, grading_element(a2)) - (t * t) * Element.basis(n, a2.theta_index)
    assert Element.from_vec(n, result) == expected


def test_exp_ad_rejects_semisimple_element(a2):
    with pytest.raises(ConstructionError):
        exp_ad(a2, {0: Fraction(1)}, {a2.index_of((1, 0)): Fraction(1)}, Fraction(1))


def test_element_arithmetic_and_errors(a2):
    e = Element.basis(a2.dim, 3)
    assert (e - e).is_zero()
    assert (2 * e).coords[3] == 2
    assert Element.zero(a2.dim).is_zero()
    with pytest.raises(ValueError):
        e + Element.basis(3, 0)
    with pytest.raises(ValueError):
        bracket(a2, e, Element.basis(5, 0))


def test_index_of_rejects_non_root(a2):
    with pytest.raises(ValueError):
        a2.index_of((2, 0))


def test_structure_cache_round_trip(tmp_path):
    rs = build_root_system("G", 2)
    first = build_chevalley(rs, cache_dir=tmp_path)
    path = structure_cache_path(rs, tmp_path)
    assert path.exists()
    second = build_chevalley(rs, cache_dir=tmp_path)
    assert dict(second.structure) == dict(first.structure)


def test_unreadable_cache_is_rebuilt(tmp_path):
    rs = build_root_system("A", 2)
    path = structure_cache_path(rs, tmp_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("# liecert kind=structure type=A rank=2 dim=8\n0 1\n")
    L = build_chevalley(rs, cache_dir=tmp_path)
    assert jacobi_failures(L) == []


def _random_element(rng, n):
    coords = {}
    for i in range(n):
        if rng.random() < 0.6:
            coords[i] = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
    return Element.from_vec(n, coords)


def _ad_commutator_matches(L, x, y):
    ax, ay = _sympy(ad_matrix(L, x)), _sympy(ad_matrix(L, y))
    return _sympy(ad_matrix(L, bracket(L, x, y))) == ax * ay - ay * ax


def test_ad_is_a_homomorphism_on_basis_pairs(a2):
    n = a2.dim
    for i in range(n):
        for j in range(n):
            assert _ad_commutator_matches(a2, Element.basis(n, i), Element.basis(n, j)), (i, j)


def test_ad_is_a_homomorphism_on_random_pairs(g2):
    rng = random.Random(17)
    for _ in range(100):
        x, y = _random_element(rng, g2.dim), _random_element(rng, g2.dim)
        assert _ad_commutator_matches(g2, x, y)


@pytest.mark.parametrize("algebra", ["a2", "g2"])
def test_ad_of_highest_root_vector_is_nilpotent(request, algebra):
    L = request.getfixturevalue(algebra)
    ad = _sympy(ad_matrix(L, Element.basis(L.dim, L.theta_index)))
    assert ad ** 2 != zeros(L.dim, L.dim)
    assert ad ** 5 == zeros(L.dim, L.dim)


def test_ad_is_traceless(g2):
    rng = random.Random(19)
    for _ in range(20):
        assert _sympy(ad_matrix(g2, _random_element(rng, g2.dim))).trace() == 0


def test_jacobi_on_random_elements(g2):
    rng = random.Random(23)
    for _ in range(30):
        x, y, z = (_random_element(rng, g2.dim) for _ in range(3))
        total = bracket(g2, x, bracket(g2, y, z)) + bracket(g2, y, bracket(g2, z, x)) + bracket(g2, z, bracket(g2, x, y))
        assert total.is_zero()


def test_a2_brackets_in_sl3_normalisation(a2):
    # basis t1, t2, v1, v2, v_theta, v_-1, v_-2, v_-theta with v_-theta = -E31
    n = a2.dim

    def root(r):
        return Element.basis(n, a2.index_of(r))

    t1, t2 = Element.basis(n, 0), Element.basis(n, 1)
    v1, v2, vm1, vm2 = root((1, 0)), root((0, 1)), root((-1, 0)), root((0, -1))
    v_theta = bracket(a2, v1, v2)
    v_minus_theta = bracket(a2, vm1, vm2)

    top = dict(a2.bracket_basis(a2.index_of((1, 0)), a2.index_of((0, 1))))[a2.theta_index]
    bottom = dict(a2.bracket_basis(a2.index_of((-1, 0)), a2.index_of((0, -1))))[a2.minus_theta_index]
    assert top in (1, -1)
    assert bottom == -top

    assert bracket(a2, v1, vm1) == t1
    assert bracket(a2, v2, vm2) == t2
    assert bracket(a2, v_theta, v_minus_theta) == -1 * (t1 + t2)
    assert bracket(a2, vm1, v_theta) == v2
    assert bracket(a2, vm2, v_theta) == -1 * v1
    assert bracket(a2, v1, v_minus_theta) == vm2
    assert bracket(a2, v2, v_minus_theta) == -1 * vm1

    def unit(i, j):
        m = zeros(3, 3)
        m[i, j] = 1
        return m

    matrices = {
        0: unit(0, 0) - unit(1, 1),
        1: unit(1, 1) - unit(2, 2),
        a2.index_of((1, 0)): unit(0, 1),
        a2.index_of((0, 1)): unit(1, 2),
        a2.index_of((-1, 0)): unit(1, 0),
        a2.index_of((0, -1)): unit(2, 1),
        a2.theta_index: unit(0, 2) / int(top),
        a2.minus_theta_index: -unit(2, 0) / int(bottom),
    }

    def realise(element):
        out = zeros(3, 3)
        for k, c in element.to_vec().items():
            out += Rational(c.numerator, c.denominator) * matrices[k]
        return out

    assert realise(v_theta) == unit(0, 2)
    assert realise(v_minus_theta) == -unit(2, 0)
    for i in range(n):
        for j in range(n):
            a, b = Element.basis(n, i), Element.basis(n, j)
            assert realise(bracket(a2, a, b)) == realise(a) * realise(b) - realise(b) * realise(a)
