import pytest

from sixnodal.surf27 import (E, K_CLASS, L, PicClass, Surf27Error,
                             disjoint_sextuples, double_six_involution,
                             double_sixes, line_classes, partner_sextuple)


def test_27_line_classes():
    lines = line_classes()
    assert len(lines) == 27
    assert E[0] in lines
    assert PicClass(2, (0, -1, -1, -1, -1, -1)) in lines
    by_degree = {}
    for c in lines:
        by_degree[c.d] = by_degree.get(c.d, 0) + 1
    assert by_degree == {0: 6, 1: 15, 2: 6}


def test_each_line_meets_ten_others():
    lines = line_classes()
    for a in lines:
        meets = sum(1 for b in lines if a != b and a.dot(b) == 1)
        assert meets == 10
        assert a.dot(a) == -1 and a.dot(K_CLASS) == -1


def test_72_sextuples_and_36_double_sixes():
    sextuples = disjoint_sextuples()
    assert len(sextuples) == 72
    assert any(set(s) == set(E) for s in sextuples)
    doubles = double_sixes()
    assert len(doubles) == 36
    assert 72 == 36 * 2


def test_partner_bipartite_incidence():
    partner = partner_sextuple(tuple(E))
    for i in range(6):
        for j in range(6):
            assert E[i].dot(partner[j]) == (0 if i == j else 1)
    assert partner[0] == PicClass(2, (0, -1, -1, -1, -1, -1))


def test_involution_on_standard_sextuple():
    inv = double_six_involution(tuple(E))
    img = inv.apply(E[0])
    assert img == PicClass(2, (0, -1, -1, -1, -1, -1))
    assert img.dot(img) == -1
    assert inv.apply(K_CLASS) == K_CLASS
    assert inv.is_isometry()
    assert inv.order_two()
    assert inv.apply(L) == PicClass(5, (-2,) * 6)


def test_involution_squares_to_identity_on_all_lines():
    inv = double_six_involution(tuple(E))
    for c in line_classes():
        assert inv.apply(inv.apply(c)) == c


def test_involution_on_every_double_six():
    seen = set()
    for s in disjoint_sextuples():
        key = frozenset(s)
        if key in seen:
            continue
        p = partner_sextuple(s)
        seen.add(key)
        seen.add(frozenset(p))
        inv = double_six_involution(s)
        assert inv.is_isometry() and inv.order_two()
        assert inv.apply(K_CLASS) == K_CLASS
        assert all(inv.apply(a) == b for a, b in zip(s, p))
        assert all(inv.apply(b) == a for a, b in zip(s, p))


def test_involution_rejects_non_sextuple():
    with pytest.raises(Surf27Error):
        partner_sextuple((E[0], E[0], E[1], E[2], E[3], E[4]))
