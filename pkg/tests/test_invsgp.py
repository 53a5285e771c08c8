"""Inverse semigroups and pseudogroups.

The symmetric inverse monoid tests run against an independent model
(partial bijections as graphs of pairs) so the abstract table, star,
order, compatibility, meets and joins are each checked twice.
"""

from __future__ import annotations

import itertools

import pytest

from etale.invsgp import (
    InverseSemigroup,
    NoCompatibleJoin,
    NonCommutingIdempotents,
    NoPartialInverse,
    NotAssociative,
    HomError,
    PseudogroupHom,
    adjoin_zero,
    compatible_cliques,
    compatible_meet_identity,
    frame_pseudogroup,
    generating_sequence,
    hom_autopreservation,
    idempotent_frame,
    identity_hom,
    invert_bijective_hom,
    invertible_group,
    pseudogroup_homs,
    pseudogroup_iso_search,
    symmetric_inverse_monoid,
    validate_pseudogroup,
)
from etale.stone import Frame, bits, frame_iso_search


def cyclic_table(n):
    return [[(i + j) % n for j in range(n)] for i in range(n)]


def z_mod(n):
    return adjoin_zero([("1" if i == 0 else f"g{i}" if n > 2 else "g") for i in range(n)],
                       cyclic_table(n))


# ---------------------------------------------------------------- model oracle


def graph_of(label, n=2):
    """Parse '[0>1,...]' back into a set of pairs; the independent model."""
    body = label.strip("[]")
    if not body:
        return frozenset()
    return frozenset(tuple(int(v) for v in p.split(">")) for p in body.split(","))


def model_compose(f, g):
    # f after g, on graphs
    return frozenset((x, fy) for (x, y) in g for (gy, fy) in f if gy == y)


def test_symmetric_inverse_monoid_against_model():
    s = symmetric_inverse_monoid(2)
    assert s.n == 7
    graphs = [graph_of(e) for e in s.elements]
    assert graphs[0] == frozenset()
    for i in range(7):
        for j in range(7):
            assert graphs[s.table[i][j]] == model_compose(graphs[i], graphs[j])
        assert graphs[s.star[i]] == frozenset((y, x) for (x, y) in graphs[i])
    # natural order is graph inclusion
    for i in range(7):
        for j in range(7):
            assert s.leq(i, j) == (graphs[i] <= graphs[j])
    # compatibility means the union is still a partial bijection
    for i in range(7):
        for j in range(7):
            u = graphs[i] | graphs[j]
            ok = len({x for x, _ in u}) == len(u) == len({y for _, y in u})
            assert s.compatible(i, j) == ok


def test_i2_is_a_verified_pseudogroup_with_model_meets_and_joins():
    s = symmetric_inverse_monoid(2)
    ps = validate_pseudogroup(s)
    assert ps.verification == "verified"
    graphs = [graph_of(e) for e in s.elements]
    gidx = {g: i for i, g in enumerate(graphs)}
    for i in range(7):
        for j in range(7):
            assert graphs[ps.meet[i][j]] == graphs[i] & graphs[j]
    for fam in compatible_cliques(s):
        union = frozenset().union(*[graphs[t] for t in fam]) if fam else frozenset()
        assert ps.join(fam) == gidx[union]
    assert ps.zero == 0
    assert s.elements[ps.one] == "[0>0,1>1]"


def test_group_with_zero():
    ps = validate_pseudogroup(z_mod(2))
    assert ps.n == 3
    g = list(ps.elements).index("g")
    one = list(ps.elements).index("1")
    zero = list(ps.elements).index("0")
    assert ps.zero == zero and ps.one == one
    # {g, 0} is compatible, g and 1 are not
    assert ps.compatible(g, zero)
    assert not ps.compatible(g, one)
    assert ps.join((g, zero)) == g
    assert ps.meet[g][one] == zero


def test_compatible_subsets_of_group_with_zero():
    ps = validate_pseudogroup(z_mod(3))
    fams = {tuple(sorted(f)) for f in compatible_cliques(ps.isg)}
    n = ps.n
    zero = ps.zero
    expected = {()} | {(t,) for t in range(n)} | {(t, zero) for t in range(n) if t != zero}
    assert fams == expected


def test_frame_as_pseudogroup():
    f = Frame.from_masks(lambda m: "{%s}" % ",".join(str(i) for i in bits(m)), range(4))
    ps = frame_pseudogroup(f)
    assert ps.verification == "verified"
    assert ps.isg.idem == (1 << ps.n) - 1
    # joins agree with the frame's joins
    for i in range(ps.n):
        for j in range(ps.n):
            assert ps.join((i, j)) == f.join[i][j]


def test_left_zero_semigroup_rejected():
    with pytest.raises(NonCommutingIdempotents):
        InverseSemigroup.build("ab", [[0, 0], [1, 1]])


def test_constant_semigroup_rejected():
    with pytest.raises(NoPartialInverse):
        InverseSemigroup.build("ab", [[1, 1], [1, 1]])


def test_nonassociative_rejected():
    with pytest.raises(NotAssociative):
        InverseSemigroup.build("abc", [[0, 1, 2], [1, 2, 0], [2, 1, 0]])


def test_star_is_an_order_automorphism():
    for s in [symmetric_inverse_monoid(2), z_mod(4)]:
        for u in range(s.n):
            for t in range(s.n):
                assert s.leq(u, t) == s.leq(s.star[u], s.star[t])


def test_compatible_down_closed():
    # elements under a common upper bound are compatible
    s = symmetric_inverse_monoid(2)
    for t in range(s.n):
        for a in bits(s.below[t]):
            for b in bits(s.below[t]):
                assert s.compatible(a, b)


def test_same_source_compatible_equal():
    # compatible with t*t = u*u forces t = u
    for s in [symmetric_inverse_monoid(2), z_mod(4)]:
        for t in range(s.n):
            for u in range(s.n):
                if s.compatible(t, u) and s.word(s.star[t], t) == s.word(s.star[u], u):
                    assert t == u


# ---------------------------------------------------------------- homs


def brute_pseudogroup_homs(S, T):
    out = []
    for m in itertools.product(range(T.n), repeat=S.n):
        try:
            out.append(PseudogroupHom.build(S, T, m).mapping)
        except HomError:
            pass
    return sorted(out)


def test_hom_enumeration_matches_brute_force():
    z2 = validate_pseudogroup(z_mod(2))
    z4 = validate_pseudogroup(z_mod(4))
    got = sorted(h.mapping for h in pseudogroup_homs(z2, z2))
    assert got == brute_pseudogroup_homs(z2, z2)
    assert len(got) == 3  # zero map, identity, and the collapse g |-> 1
    got2 = sorted(h.mapping for h in pseudogroup_homs(z4, z2))
    assert got2 == brute_pseudogroup_homs(z4, z2)


def test_quotient_hom_and_autopreservation():
    z4 = validate_pseudogroup(z_mod(4))
    z2 = validate_pseudogroup(z_mod(2))
    lbl4 = list(z4.elements)
    lbl2 = list(z2.elements)
    mapping = []
    for e in lbl4:
        if e == "0":
            mapping.append(lbl2.index("0"))
        elif e in ("1", "g2"):
            mapping.append(lbl2.index("1"))
        else:
            mapping.append(lbl2.index("g"))
    hom = PseudogroupHom.build(z4, z2, mapping)
    rep = hom_autopreservation(hom)
    assert all(rep.values())


def test_collapse_hom_breaks_general_meets_but_not_compatible_ones():
    z2 = validate_pseudogroup(z_mod(2))
    one = list(z2.elements).index("1")
    g = list(z2.elements).index("g")
    zero = z2.zero
    collapse = PseudogroupHom.build(z2, z2, [one if i != zero else zero for i in range(3)])
    # g ^ 1 = 0 is not preserved: phi(0) = 0 but phi(g) ^ phi(1) = 1
    assert collapse.mapping[z2.meet[g][one]] != z2.meet[collapse(g)][collapse(one)]
    ok, witness = compatible_meet_identity(collapse)
    assert ok and witness is None


def test_meet_preserving_group_hom_is_injective_here():
    # contrapositive instance of the collapse example above
    z2 = validate_pseudogroup(z_mod(2))
    homs = pseudogroup_homs(z2, z2)
    for h in homs:
        preserves_meets = all(
            h.mapping[z2.meet[a][b]] == z2.meet[h(a)][h(b)]
            for a in range(3)
            for b in range(3)
        )
        if preserves_meets and h.mapping[z2.one] == z2.one:
            assert h.is_bijective()


def test_bijective_hom_inverts():
    i2 = validate_pseudogroup(symmetric_inverse_monoid(2))
    ident = identity_hom(i2)
    inv = invert_bijective_hom(ident)
    assert inv.mapping == ident.mapping
    iso = pseudogroup_iso_search(i2, i2)
    assert iso is not None


def test_join_preservation_enforced():
    # meet-preserving map between frames that misses a join is rejected
    sq = Frame.from_masks(lambda m: str(m), (0, 1, 2, 3))
    ch = Frame.from_masks(lambda m: str(m), (0, 1, 3, 7))
    psq = frame_pseudogroup(sq)
    pch = frame_pseudogroup(ch)
    # kill one atom: meets survive but the atoms' join (the top) does not
    with pytest.raises(HomError) as err:
        PseudogroupHom.build(psq, pch, (0, 0, 2, 3))
    assert err.value.law == "join-not-preserved"


# ---------------------------------------------------------------- structure


def test_idempotent_frame_of_i2():
    i2 = validate_pseudogroup(symmetric_inverse_monoid(2))
    frame, which = idempotent_frame(i2)
    assert len(which) == 4
    square = Frame.from_masks(lambda m: str(m), range(4))
    assert frame_iso_search(frame, square) is not None


def test_invertible_group_of_i2():
    i2 = validate_pseudogroup(symmetric_inverse_monoid(2))
    grp, keep = invertible_group(i2)
    assert grp.n == 2
    assert set(grp.elements) == {"[0>0,1>1]", "[0>1,1>0]"}


def test_generating_sequences_are_small():
    i2 = symmetric_inverse_monoid(2)
    gens = generating_sequence(i2)
    assert len(gens) <= 3
    sq = frame_pseudogroup(Frame.from_masks(lambda m: str(m), range(4)))
    assert len(generating_sequence(sq.isg)) <= 3


def test_incomplete_family_rejected():
    # two incompatible-join idempotents: a 3-element meet semilattice
    # a ^ b = 0 with no top is not a pseudogroup (ES has no join)
    isg = InverseSemigroup.build("0ab", [[0, 0, 0], [0, 1, 0], [0, 0, 2]])
    with pytest.raises(NoCompatibleJoin):
        validate_pseudogroup(isg)
