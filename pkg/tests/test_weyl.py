from fractions import Fraction
from math import factorial

import pytest

from gerbelevels.intlinalg import RatVector, identity, matmul, transpose
from gerbelevels.rootdata import classical_datum
from gerbelevels.weyl import (
    WeylCapExceeded,
    act_cochar,
    generate,
    integral_reflection_subgroup,
    stabilizer,
)


def series_order(series, n):
    if series == "A":
        return factorial(n + 1)
    if series in ("B", "C"):
        return 2**n * factorial(n)
    return 2 ** (n - 1) * factorial(n)


@pytest.mark.parametrize(
    "series,rank,form",
    [
        ("A", 1, "SL"), ("A", 2, "SL"), ("A", 3, "GL"), ("A", 2, "PGL"),
        ("B", 2, "Spin"), ("B", 3, "SO"), ("C", 2, "Sp"),
        ("D", 3, "Spin"), ("D", 4, "PSO"),
    ],
)
def test_orders_match_series_formula(series, rank, form):
    rd = classical_datum(series, rank, form)
    w = generate(rd)
    assert w.order == series_order(series, rank)


def test_small_orders():
    assert generate(classical_datum("A", 1, "SL")).order == 2
    assert generate(classical_datum("B", 3, "Spin")).order == 48
    assert generate(classical_datum("D", 4, "Spin")).order == 192


def test_cap_refusal():
    rd = classical_datum("B", 3, "Spin")
    with pytest.raises(WeylCapExceeded):
        generate(rd, cap=10)


def test_contragredience_every_element():
    for args in (("B", 3, "Spin"), ("A", 2, "PGL"), ("D", 3, "SO")):
        rd = classical_datum(*args)
        w = generate(rd)
        for e in w.elements:
            assert matmul(transpose(e.char_action), e.cochar_action) == identity(rd.rank)


def test_group_closure_and_inverses():
    rd = classical_datum("A", 2, "SL")
    w = generate(rd)
    n = w.order
    for i in range(n):
        assert w.mult(i, w.inverse(i)) == w.identity_index
        for j in range(n):
            w.mult(i, j)  # must not raise (closure)


def test_act_cochar_examples():
    rd = classical_datum("B", 3, "Spin")
    w = generate(rd)
    # s_{t1-t2} acting on (1/2, -1/2, 0) gives (-1/2, 1/2, 0)
    refl_idx = w.index_of(rd.reflection_char(rd.simple_indices[0]))
    elem = w.elements[refl_idx]
    xi = RatVector.from_fractions(
        rd.cochar_coords_q((Fraction(1, 2), Fraction(-1, 2), Fraction(0)))
    )
    img = act_cochar(elem, xi)
    amb = rd.cochar_ambient(img.fractions())
    assert amb == (Fraction(-1, 2), Fraction(1, 2), Fraction(0))
    # identity fixes everything
    ident = w.elements[w.identity_index]
    assert act_cochar(ident, xi) == xi
    # a simple coroot is negated by its own reflection
    acheck = RatVector.make(list(rd.coroot_coords()[rd.simple_indices[0]]))
    assert act_cochar(elem, acheck) == -acheck


def test_stabilizer_of_zero_is_everything():
    rd = classical_datum("A", 2, "SL")
    w = generate(rd)
    s = stabilizer(w, RatVector.zero(rd.rank))
    assert len(s) == w.order


def test_spin7_stabilizer_is_z2_cubed():
    rd = classical_datum("B", 3, "Spin")
    w = generate(rd)
    xi = RatVector.from_fractions(
        rd.cochar_coords_q((Fraction(1, 2), Fraction(-1, 2), Fraction(0)))
    )
    s = stabilizer(w, xi)
    assert len(s) == 8
    # elementary abelian of exponent 2
    for i in s.members:
        assert w.mult(i, i) == w.identity_index
    assert s.verify_closed()


def test_generic_point_has_trivial_stabilizer():
    rd = classical_datum("B", 3, "Spin")
    w = generate(rd)
    coords = rd.cochar_coords_q(
        (Fraction(1, 5), Fraction(1, 7), Fraction(1, 11))
    )
    xi = RatVector.from_fractions(coords)
    s = stabilizer(w, xi)
    assert s.members == (w.identity_index,)


def test_spin7_reflection_subgroup_equals_stabilizer():
    rd = classical_datum("B", 3, "Spin")
    w = generate(rd)
    xi = RatVector.from_fractions(
        rd.cochar_coords_q((Fraction(1, 2), Fraction(-1, 2), Fraction(0)))
    )
    cmp = integral_reflection_subgroup(w, xi)
    assert len(cmp.reflection_subgroup) == 8
    assert cmp.equal


def test_reflection_subgroup_of_zero_is_whole_group():
    rd = classical_datum("A", 2, "PGL")
    w = generate(rd)
    cmp = integral_reflection_subgroup(w, RatVector.zero(rd.rank))
    assert len(cmp.reflection_subgroup) == w.order
    assert cmp.equal


def test_pgl2_half_coweight_strict_inclusion():
    # the integrality stabilizer can be strictly bigger than the
    # reflection subgroup (disconnected centralizer phenomenon)
    rd = classical_datum("A", 1, "PGL")
    w = generate(rd)
    xi = RatVector.make([1], 2)  # half the fundamental coweight
    cmp = integral_reflection_subgroup(w, xi)
    assert len(cmp.stabilizer) == 2
    assert len(cmp.reflection_subgroup) == 1
    assert not cmp.equal


def test_reflection_subgroup_always_inside_stabilizer():
    rd = classical_datum("B", 2, "SO")
    w = generate(rd)
    for nums, den in [((1, 0), 2), ((1, 1), 2), ((1, 2), 3), ((0, 1), 4)]:
        xi = RatVector.make(list(nums), den)
        cmp = integral_reflection_subgroup(w, xi)
        assert set(cmp.reflection_subgroup.members) <= set(cmp.stabilizer.members)


def test_b4_order_384():
    rd = classical_datum("B", 4, "Spin")
    w = generate(rd)
    assert w.order == 384
