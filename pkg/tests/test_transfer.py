import pytest
from hypothesis import given, settings, strategies as st

from sigmaforge.pcgroup import elementary_abelian, heisenberg, parse_pc
from sigmaforge import structure as stru
from sigmaforge import transfer as tr
from oracles import TableGroup


def c9xc3():
    return parse_pc("p 3\nngens 3\ng1^p = g3\n")


SMALL = {"V9": elementary_abelian(3, 2), "H27": heisenberg(3), "C9xC3": c9xc3()}


def as_set(H, table):
    return frozenset(table.index[e] for e in H.elements())


@pytest.mark.parametrize("name", list(SMALL))
def test_transfer_matches_coset_oracle(name):
    P = SMALL[name]
    T = TableGroup.from_pc(P)
    for U in tr.eq1_maximal_subgroups(P):
        tm = tr.artin_transfer(P, U)
        uset = as_set(U, T)
        for g in P.elements():
            ours = tm.image(g)
            oracle_coset = T.transfer(uset, T.index[g])
            assert T.index[ours] in oracle_coset
        ker = {g for g in P.elements() if tm.kernel_is_trivial_at(g)}
        assert {T.index[g] for g in ker} == T.transfer_kernel(uset)


def test_transfer_is_homomorphism():
    P = heisenberg(3)
    U = tr.eq1_maximal_subgroups(P)[0]
    tm = tr.artin_transfer(P, U)

    @settings(max_examples=40, deadline=None)
    @given(a=st.tuples(*[st.integers(0, 2)] * 3), b=st.tuples(*[st.integers(0, 2)] * 3))
    def inner(a, b):
        lhs = tm.image(P.multiply(a, b))
        rhs = stru.coset_rep(P, P.multiply(tm.image(a), tm.image(b)), tm.Uprime)
        assert lhs == rhs

    inner()


def test_index_check():
    P = heisenberg(3)
    with pytest.raises(ValueError):
        tr.artin_transfer(P, stru.trivial_subgroup(P))


def test_elementary_abelian_kernel_type():
    k = tr.transfer_kernel_type(elementary_abelian(3, 2))
    assert k.quartet == (0, 0, 0, 0)
    assert k.canonical == (0, 0, 0, 0)
    assert k.label == "a.1"


def test_kernel_type_quartets_consistent_with_oracle():
    for name in ("H27", "C9xC3"):
        P = SMALL[name]
        T = TableGroup.from_pc(P)
        k = tr.transfer_kernel_type(P)
        Us = tr.eq1_maximal_subgroups(P)
        Gp = stru.derived_subgroup(P)
        for i, U in enumerate(Us):
            ker = T.transfer_kernel(as_set(U, T))
            if k.quartet[i] == 0:
                assert len(ker) == T.n
            else:
                target = as_set(Us[k.quartet[i] - 1], T)
                assert ker <= target
                # full maximal quotient, or a line over the derived subgroup
                assert ker == target or len(ker) == 3 * len(as_set(Gp, T))


def test_s4_equivalences_from_naming():
    assert tr.canonical_kappa((4, 3, 4, 3)) == tr.canonical_kappa((3, 4, 4, 3))
    assert tr.naming_table()[tr.canonical_kappa((3, 4, 4, 3))] == "F.7"
    assert tr.canonical_kappa((2, 2, 4, 3)) == tr.canonical_kappa((1, 1, 4, 3))
    assert tr.naming_table()[tr.canonical_kappa((1, 1, 4, 3))] == "F.11"
    assert tr.naming_table()[tr.canonical_kappa((0, 0, 4, 3))] == "b.10"
    assert tr.naming_table()[tr.canonical_kappa((1, 2, 4, 3))] == "G.16"
    assert tr.naming_table()[tr.canonical_kappa((3, 3, 4, 3))] == "H.4"
    # the four F types are pairwise inequivalent
    canon = {tr.canonical_kappa(q) for q in
             [(3, 4, 4, 3), (1, 1, 4, 3), (1, 3, 4, 3), (3, 1, 4, 3)]}
    assert len(canon) == 4
    assert set(tr.label_only_names()) == {
        "c.18", "c.21", "D", "E.6", "E.8", "E.9", "E.14"}


quartets = st.tuples(*[st.integers(0, 4)] * 4)


@given(kappa=quartets, ptuple=st.permutations([1, 2, 3, 4]))
@settings(max_examples=200, deadline=None)
def test_canonical_is_orbit_invariant(kappa, ptuple):
    perm = {i + 1: ptuple[i] for i in range(4)}
    moved = tr._s4_act(kappa, perm)
    assert tr.canonical_kappa(moved) == tr.canonical_kappa(kappa)
    # fixed points and transpositions are genuine orbit invariants
    assert tr.kappa_fixed_points(moved) == tr.kappa_fixed_points(kappa)
    assert tr.kappa_transpositions(moved) == tr.kappa_transpositions(kappa)


def test_fixed_point_structure_of_f_types():
    assert tr.kappa_fixed_points((1, 1, 4, 3)) == 1   # F.11
    assert tr.kappa_fixed_points((1, 3, 4, 3)) == 1   # F.12
    assert tr.kappa_fixed_points((3, 4, 4, 3)) == 0   # F.7
    assert tr.kappa_fixed_points((3, 1, 4, 3)) == 0   # F.13
    for q in [(3, 4, 4, 3), (1, 1, 4, 3), (1, 3, 4, 3), (3, 1, 4, 3)]:
        assert tr.kappa_transpositions(q) == 1        # the shared (43) swap
    assert tr.kappa_transpositions((2, 1, 4, 3)) == 2  # G.19
    assert tr.kappa_fixed_points((1, 2, 4, 3)) == 2    # G.16


def test_nearly_homocyclic_values():
    assert tr.nearly_homocyclic(0) == ()
    assert tr.nearly_homocyclic(1) == (1,)
    assert tr.nearly_homocyclic(2) == (1, 1)
    assert tr.nearly_homocyclic(4) == (2, 2)
    assert tr.nearly_homocyclic(5) == (3, 2)
    assert tr.nearly_homocyclic(7) == (4, 3)
    with pytest.raises(ValueError):
        tr.nearly_homocyclic(-1)


def test_alpha1_small():
    a = tr.alpha1(elementary_abelian(3, 2))
    assert a.top == (1, 1)
    assert a.four == ((1,),) * 4
    assert a.display() == "[11;1,1,1,1]"
    b = tr.alpha1(heisenberg(3))
    assert b.top == (1, 1)
    assert b.four == ((1, 1),) * 4
    assert b.display() == "[11;11,11,11,11]"


def test_alpha2_heisenberg():
    a = tr.alpha2(heisenberg(3))
    assert a.top == (1, 1)
    assert a.com == (1,)
    assert a.pol == (1, 1)          # N(c) with c = 2
    assert a.cpl == (1, 1)          # N(cc + 1) with cc = 1
    assert a.aqis == ((1, 1),) * 4
    for layer in a.layers:
        assert sum(m for _, m in layer) == 3
        assert all(q == (1,) for q, _ in layer)
    with pytest.raises(ValueError):
        tr.classify_category(a)     # no dodecuplets on a tiny group


def test_alpha2_degenerate_root():
    a = tr.alpha2(elementary_abelian(3, 2))
    assert a.com == ()
    assert all(layer == () for layer in a.layers)


def test_category_rules():
    mk = lambda layers: tr.SecondATI(
        top=(1, 1), aqis=((3, 2), (3, 2), (1, 1, 1), (1, 1, 1)),
        com=(2, 2, 2, 1), layers=layers, pol=(3, 2), cpl=(3, 2))
    tame = (((2, 2, 1), 3), ((2, 1, 1), 9))
    wild = (((2, 1, 1, 1), 9), ((2, 2, 1), 3))
    extreme = (((1, 1, 1, 1, 1, 1), 3), ((2, 2, 2, 1), 3), ((2, 2, 1, 1), 6))
    tri = (((4, 1, 1, 1), 3),)
    assert tr.classify_category(mk((tri, tri, tame, tame))) == 3
    assert tr.classify_category(mk((tri, tri, wild, tame))) == 2
    assert tr.classify_category(mk((tri, tri, extreme, extreme))) == 1
