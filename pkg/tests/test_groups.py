from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarsegroups.groups import (
    DirectProduct,
    ElementError,
    FiniteCyclic,
    Free,
    FreeAbelian,
    Heisenberg,
    Homomorphism,
    PresentedAbelian,
    RationalsTruncated,
    apply_hom,
    invert,
    multiply,
    power,
)
from oracles import heisenberg_matrix, matmul3

small = st.integers(-30, 30)


def elements(g):
    """Hypothesis strategy for canonical elements of ``g``."""
    if isinstance(g, FreeAbelian):
        return st.tuples(*[small] * g.rank)
    if isinstance(g, Free):
        letters = st.integers(1, g.rank).flatmap(lambda i: st.sampled_from([i, -i]))
        return st.lists(letters, max_size=8).map(g.coerce)
    if isinstance(g, FiniteCyclic):
        return st.integers(0, g.order - 1)
    if isinstance(g, PresentedAbelian):
        return st.tuples(*[small] * g.generators).map(g.coerce)
    if isinstance(g, Heisenberg):
        return st.tuples(small, small, small)
    if isinstance(g, RationalsTruncated):
        return st.integers(-200, 200).map(lambda n: Fraction(n, g.modulus))
    if isinstance(g, DirectProduct):
        return st.tuples(*[elements(f) for f in g.factors])
    raise TypeError(g)


GROUPS = [
    FreeAbelian(2),
    FreeAbelian(0),
    Free(2),
    FiniteCyclic(6),
    PresentedAbelian(3, ((2, 0, 0), (0, 3, 3))),
    PresentedAbelian(2, ((4, 6),)),
    Heisenberg(),
    RationalsTruncated(3),
    DirectProduct([FreeAbelian(1), Heisenberg()]),
    DirectProduct([DirectProduct([FiniteCyclic(2), RationalsTruncated(2)]), Free(1)]),
]


@pytest.mark.parametrize("g", GROUPS, ids=lambda g: g.kind)
def test_group_axioms(g):
    @given(elements(g), elements(g), elements(g))
    def check(x, y, z):
        e = g.identity()
        assert g.mul(g.mul(x, y), z) == g.mul(x, g.mul(y, z))
        assert g.mul(x, e) == x == g.mul(e, x)
        assert g.mul(x, g.inv(x)) == e == g.mul(g.inv(x), x)
        assert g.contains(g.mul(x, y))

    check()


@pytest.mark.parametrize("g", GROUPS, ids=lambda g: g.kind)
def test_canonical_forms_are_fixed_points(g):
    @given(elements(g))
    def check(x):
        assert g.coerce(x) == x
        g.check(x)

    check()


def test_heisenberg_law_matches_unitriangular_matrices():
    H = Heisenberg()

    @given(elements(H), elements(H))
    def check(x, y):
        z = H.mul(x, y)
        assert heisenberg_matrix(*z[:2], z[2]) == matmul3(heisenberg_matrix(*x), heisenberg_matrix(*y))

    check()


def test_heisenberg_examples():
    H = Heisenberg()
    assert H.mul((1, 0, 0), (0, 1, 0)) == (1, 1, 1)
    assert H.mul((0, 1, 0), (1, 0, 0)) == (1, 1, 0)
    assert H.inv((2, 3, 5)) == (-2, -3, 1)
    a, b = (1, 0, 0), (0, 1, 0)
    comm = H.mul(H.mul(a, b), H.mul(H.inv(a), H.inv(b)))
    assert comm == (0, 0, 1)


def test_free_words_reduce():
    F = Free(2)
    assert F.mul((1, 2), (-2, 1)) == (1, 1)
    assert F.coerce([1, -1, 2, -2]) == ()
    assert F.inv((1, 2, -1)) == (1, -2, -1)
    with pytest.raises(ElementError):
        F.coerce([3])
    with pytest.raises(ElementError):
        F.coerce([0])


def test_presented_canonical_form_is_unique():
    A = PresentedAbelian(3, ((2, 0, 0),))
    assert A.coerce((3, 1, 1)) == A.coerce((1, 1, 1)) == A.coerce((-1, 1, 1))
    C = PresentedAbelian(2, ((4, 6),))

    @given(small, small, st.integers(-5, 5))
    def check(a, b, k):
        assert C.coerce((a + 4 * k, b + 6 * k)) == C.coerce((a, b))

    check()


def test_presented_rejects_bad_relations():
    with pytest.raises(ValueError):
        PresentedAbelian(2, ((1, 2, 3),))
    with pytest.raises(ValueError):
        PresentedAbelian(0)


def test_rationals_membership():
    Q = RationalsTruncated(3)
    assert Q.coerce(Fraction(5, 6)) == Fraction(5, 6)
    with pytest.raises(ElementError):
        Q.coerce(Fraction(1, 4))
    with pytest.raises(ElementError):
        Q.coerce(0.5)


def test_cyclic_generator_with_bezout():
    Q = RationalsTruncated(4)
    xs = [Fraction(1, 2), Fraction(1, 3), Fraction(5, 8)]
    g, coeffs = Q.cyclic_generator(xs)
    assert g == Fraction(1, 24)
    assert sum(c * x for c, x in zip(coeffs, xs)) == g
    assert Q.cyclic_generator([0, 0]) == (0, [0, 0])


def test_power_and_helpers():
    H = Heisenberg()
    assert power(H, (1, 0, 0), 5) == (5, 0, 0)
    assert power(H, (1, 1, 0), -2) == H.inv(H.mul((1, 1, 0), (1, 1, 0)))
    assert multiply(H, (1, 0, 0), (0, 1, 0)) == (1, 1, 1)
    assert invert(FiniteCyclic(5), 2) == 3


def test_homomorphisms():
    F2, Z2 = Free(2), FreeAbelian(2)
    ab = Homomorphism(F2, Z2, ((1, 0), (0, 1)))
    assert ab((1, 2, -1)) == (0, 1)
    to5 = Homomorphism(FreeAbelian(1), FiniteCyclic(5), (1,))
    assert to5((12,)) == 2
    with pytest.raises(ElementError):
        apply_hom(to5, (1, 2))


def test_homomorphism_relation_checks():
    with pytest.raises(ValueError, match="not a homomorphism"):
        Homomorphism(FiniteCyclic(4), FiniteCyclic(6), (1,))
    Homomorphism(FiniteCyclic(4), FiniteCyclic(8), (2,))
    with pytest.raises(ValueError):
        Homomorphism(FreeAbelian(2), Heisenberg(), ((1, 0, 0), (0, 1, 0)))
    with pytest.raises(ValueError):
        Homomorphism(PresentedAbelian(1, ((3,),)), FreeAbelian(1), ((1,),))
    Homomorphism(Heisenberg(), FreeAbelian(2), ((1, 0), (0, 1)))


def test_heisenberg_hom_evaluates_group_law():
    H = Heisenberg()
    ident = Homomorphism.identity_map(H)

    @given(elements(H), elements(H))
    def check(x, y):
        assert ident(x) == x
        assert ident(H.mul(x, y)) == H.mul(ident(x), ident(y))

    check()


def test_rationals_hom_is_additive():
    Q = RationalsTruncated(3)
    doubling = Homomorphism(Q, Q, tuple(2 * g for g in Q.gens()))

    @given(elements(Q), elements(Q))
    def check(x, y):
        assert doubling(x) == 2 * x
        assert doubling(x + y) == doubling(x) + doubling(y)

    check()


def test_product_nesting_and_matrix():
    P = DirectProduct([FreeAbelian(1), DirectProduct([FiniteCyclic(3), FreeAbelian(1)])])
    x = P.coerce((2, (4, -1)))
    assert x == ((2,), (1, (-1,)))
    h = Homomorphism(FreeAbelian(2), FreeAbelian(2), ((1, 1), (0, 1)))
    assert h.matrix().tolist() == [[1, 1], [0, 1]]
    with pytest.raises(ValueError):
        DirectProduct([])


def test_abelianization_of_product():
    P = DirectProduct([FiniteCyclic(4), FreeAbelian(2)])
    pres = P.abelian_presentation()
    assert pres.generators == 3
    assert pres.relations == ((4, 0, 0),)
