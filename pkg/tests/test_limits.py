"""Limits of pseudogroup and groupoid diagrams.

Cone sets are pinned down on hand-sized diagrams where the limit can be
listed by hand: products of cyclic groups with zero, agreement filters
of parallel homs, and the fibered product of two quotient actors.  The
groupoid side is cross-checked against the disjoint-union product, the
coequalizer of unit spaces, and the glued-space pullback, with the
covered-arrow comparison frozen where the sober reflection collapses
points.  The idempotent-frame comparison, the group-diagram criteria,
the frame corestriction bijection, and the global-bisection description
of group actions are each swept exhaustively at small size.
"""

from __future__ import annotations

import itertools

import pytest

from etale.adjunction import actor_agreement, unit_eta
from etale.functors import bis_on_actor
from etale.groupoid import (
    Actor,
    compose_actors,
    enumerate_bisections,
    etale_discrete,
    from_group,
    group_actor,
    groupoid_iso_search,
    identity_actor,
    pair_groupoid,
    space_actor,
    translate,
    unit_groupoid,
)
from etale.invsgp import (
    HomError,
    PseudogroupHom,
    adjoin_zero,
    frame_pseudogroup,
    idempotent_frame,
    invertible_group,
    symmetric_inverse_monoid,
    validate_pseudogroup,
)
from etale.limits import (
    Cone,
    Diagram,
    E_preservation_check,
    FiniteCategory,
    NotACategory,
    NotACone,
    NotADiagram,
    NotGroupDiagram,
    NotSober,
    arrow_quotient_report,
    connected_group_limit_check,
    cospan_shape,
    discrete_shape,
    equalizer_etact,
    factor_cone_product,
    factor_cone_psgrp,
    frame_limit,
    limit_etact,
    limit_psgrp,
    parallel_pair_shape,
    product_etact,
    pullback_etact,
)
from etale.stone import (
    ContinuousMap,
    FiniteSpace,
    Frame,
    FrameHom,
    StoneError,
    bits,
    homeomorphism_search,
    mask_of,
)


def cyclic(n):
    return [[(i + j) % n for j in range(n)] for i in range(n)]


def z_mod(n):
    labels = [("1" if i == 0 else "g" if n == 2 else f"g{i}") for i in range(n)]
    return validate_pseudogroup(adjoin_zero(labels, cyclic(n)))


def zn_discrete(n):
    labels = tuple(
        "1" if i == 0 else ("g" if n == 2 else f"g{i}") for i in range(n)
    )
    return etale_discrete(from_group(labels, cyclic(n)))


def ident(ps):
    return PseudogroupHom.build(ps, ps, range(ps.n))


def discrete_psgrp_diagram(objects, labels):
    return Diagram.build(
        discrete_shape(labels), "pseudogroups", tuple(objects),
        tuple(ident(ps) for ps in objects),
    )


def quotient_parallel_pair():
    """f is the two-to-one quotient, g the trivial hom, both Z/4 -> Z/2."""
    z4, z2 = z_mod(4), z_mod(2)
    f = PseudogroupHom.build(z4, z2, (0, 1, 0, 1, 2))
    g = PseudogroupHom.build(z4, z2, (0, 0, 0, 0, 2))
    return Diagram.build(
        parallel_pair_shape(), "pseudogroups", (z4, z2),
        (ident(z4), ident(z2), f, g),
    )


def terminal_cospan():
    """Z/2 and Z/3 mapped onto the one-element group with zero."""
    z1, z2, z3 = z_mod(1), z_mod(2), z_mod(3)
    f = PseudogroupHom.build(z2, z1, (0, 0, 1))
    g = PseudogroupHom.build(z3, z1, (0, 0, 0, 1))
    return Diagram.build(
        cospan_shape(), "pseudogroups", (z2, z3, z1),
        (ident(z2), ident(z3), ident(z1), f, g),
    )


def point_groupoid():
    return unit_groupoid(FiniteSpace.discrete(("*",)))


def closed_point_actor(X):
    """The actor onto the point groupoid anchored at the last point."""
    pt = point_groupoid()
    f = ContinuousMap.build(pt.space, X.space, (X.space.n - 1,))
    return space_actor(X, pt, f), pt


# ------------------------------------------------------------- shapes


def test_shape_categories_validate_and_reject_broken_identities():
    assert discrete_shape(("a", "b")).arrows == ("1:a", "1:b")
    assert parallel_pair_shape().cod == (0, 1, 1, 1)
    assert cospan_shape().dom == (0, 1, 2, 0, 1)
    with pytest.raises(NotACategory) as err:
        FiniteCategory.build(
            ("a",), ("1:a", "f"), (0, 0), (0, 0), ((0, 0), (1, 1)), (0,)
        )
    assert err.value.law == "identity-laws"


def test_diagram_requires_identity_arrows_to_be_identities():
    z2, z3 = z_mod(2), z_mod(3)
    with pytest.raises(NotADiagram) as err:
        Diagram.build(
            discrete_shape(("a", "b")), "pseudogroups", (z2, z3),
            (ident(z2), PseudogroupHom.build(z3, z3, (0, 2, 1, 3))),
        )
    assert err.value.law == "identity-arrow" and err.value.witness == "b"


def test_cone_legs_must_close_the_diagram_squares():
    D = terminal_cospan()
    z6, z1 = z_mod(6), z_mod(1)
    la = PseudogroupHom.build(z6, z_mod(2), (0, 1, 0, 1, 0, 1, 2))
    lb = PseudogroupHom.build(z6, z_mod(3), (0, 1, 2, 0, 1, 2, 3))
    bad = PseudogroupHom.build(z6, z1, (1, 1, 1, 1, 1, 1, 1))
    with pytest.raises(NotACone) as err:
        Cone.build(D, z6, (la, lb, bad))
    assert err.value.law == "leg-square"
    good = PseudogroupHom.build(z6, z1, (0, 0, 0, 0, 0, 0, 1))
    Cone.build(D, z6, (la, lb, good))


# ------------------------------------------------------ pseudogroup limits


def test_empty_limit_is_the_one_element_pseudogroup():
    lim, cone = limit_psgrp(discrete_psgrp_diagram((), ()))
    assert lim.n == 1 and lim.elements == ("()",)
    assert lim.zero == lim.one
    assert cone.legs == ()


def test_discrete_limit_is_the_product_of_the_factors():
    D = discrete_psgrp_diagram((z_mod(2), z_mod(3)), ("a", "b"))
    lim, cone = limit_psgrp(D)
    assert lim.elements == (
        "(1,1)", "(1,g1)", "(1,g2)", "(1,0)",
        "(g,1)", "(g,g1)", "(g,g2)", "(g,0)",
        "(0,1)", "(0,g1)", "(0,g2)", "(0,0)",
    )
    assert cone.legs[0].mapping == (0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2)
    assert cone.legs[1].mapping == (0, 1, 2, 3) * 3
    assert sorted(lim.idempotents()) == [0, 3, 8, 11]


def test_parallel_pair_limit_is_the_agreement_filter():
    lim, cone = limit_psgrp(quotient_parallel_pair())
    assert lim.elements == ("(1,1)", "(g2,1)", "(0,0)")
    # the second coordinate repeats the first leg through the quotient
    assert cone.legs[0].mapping == (0, 2, 4)
    assert cone.legs[1].mapping == (0, 0, 2)


def test_the_factorization_through_a_limit_is_the_tuple_of_legs():
    D = discrete_psgrp_diagram((z_mod(2), z_mod(3)), ("a", "b"))
    lim, lcone = limit_psgrp(D)
    z6 = z_mod(6)
    la = PseudogroupHom.build(z6, z_mod(2), (0, 1, 0, 1, 0, 1, 2))
    lb = PseudogroupHom.build(z6, z_mod(3), (0, 1, 2, 0, 1, 2, 3))
    fac = factor_cone_psgrp(lcone, Cone.build(D, z6, (la, lb)))
    assert fac.mapping == (0, 5, 2, 4, 1, 6, 11)
    for t in range(z6.n):
        want = "(%s,%s)" % (
            z_mod(2).elements[la.mapping[t]], z_mod(3).elements[lb.mapping[t]])
        assert lim.elements[fac.mapping[t]] == want


# --------------------------------------------------------------- products


def test_product_is_the_disjoint_union_with_block_legs():
    prod, cone = product_etact([zn_discrete(2), zn_discrete(3)])
    assert prod.n == 5 and bin(prod.gpd.units).count("1") == 2
    assert len(prod.space.opens) == 32
    assert cone.legs[0].anchor == (0, 0)
    assert cone.legs[1].anchor == (2, 2, 2)
    ok, witness = actor_agreement(
        compose_actors(cone.legs[0], identity_actor(prod)), cone.legs[0])
    assert ok, witness


def test_product_of_a_single_factor_is_the_factor():
    G = zn_discrete(3)
    prod, cone = product_etact([G])
    assert groupoid_iso_search(prod, G) is not None


def test_product_of_spaces_is_the_topological_disjoint_union():
    s1 = unit_groupoid(FiniteSpace.sierpinski())
    s2 = unit_groupoid(FiniteSpace.sierpinski())
    prod, _cone = product_etact([s1, s2])
    assert prod.n == 4 and prod.gpd.units == 0b1111
    assert len(prod.space.opens) == 9


def test_the_factorization_through_a_product_multiplies_blockwise():
    z2d, z3d, z6d = zn_discrete(2), zn_discrete(3), zn_discrete(6)
    prod, pcone = product_etact([z2d, z3d])
    leg_a = group_actor(z6d, z2d, (0, 1, 0, 1, 0, 1))
    leg_b = group_actor(z6d, z3d, (0, 1, 2, 0, 1, 2))
    fac = factor_cone_product(pcone, Cone.build(pcone.diagram, z6d,
                                                (leg_a, leg_b)))
    assert fac.anchor == (0, 0, 0, 0, 0)
    assert fac.act[1] == (1, 0, 3, 4, 2)


# ------------------------------------------------------------- equalizers


def test_equalizer_of_an_actor_with_itself_is_the_domain():
    h = group_actor(zn_discrete(4), zn_discrete(2), (0, 1, 0, 1))
    E, e = equalizer_etact(h, h)
    assert groupoid_iso_search(E, zn_discrete(4)) is not None
    ok, witness = actor_agreement(compose_actors(h, e), compose_actors(h, e))
    assert ok, witness


def test_equalizer_of_identity_and_trivial_is_the_trivial_group():
    z2d = zn_discrete(2)
    E, e = equalizer_etact(identity_actor(z2d), group_actor(z2d, z2d, (0, 0)))
    assert E.n == 1 and bin(E.gpd.units).count("1") == 1


def test_equalizer_of_chain_endpoints_folds_to_the_sober_point():
    X = unit_groupoid(FiniteSpace.chain(3))
    pt = point_groupoid()
    h = space_actor(X, pt, ContinuousMap.build(pt.space, X.space, (0,)))
    k = space_actor(X, pt, ContinuousMap.build(pt.space, X.space, (2,)))
    E, _e = equalizer_etact(h, k)
    assert E.n == 1 and len(E.space.opens) == 2
    # three covered units fall into two glued classes over a single germ
    assert arrow_quotient_report(h, k) == {
        "onto": True, "well-defined": True, "constant-on-classes": True,
        "covered": 3, "classes": 2, "arrows": 1, "bijective": False}


def test_equalizer_of_discrete_points_is_the_set_coequalizer():
    X = unit_groupoid(FiniteSpace.discrete(("a", "b", "c")))
    pt = point_groupoid()
    h = space_actor(X, pt, ContinuousMap.build(pt.space, X.space, (0,)))
    k = space_actor(X, pt, ContinuousMap.build(pt.space, X.space, (1,)))
    E, _e = equalizer_etact(h, k)
    assert E.n == 2 and len(E.space.opens) == 4
    assert arrow_quotient_report(h, k) == {
        "onto": True, "well-defined": True, "constant-on-classes": True,
        "covered": 3, "classes": 2, "arrows": 2, "bijective": True}


# -------------------------------------------------------------- pullbacks


def test_pullback_of_identity_actors_is_the_diagonal():
    pr = etale_discrete(pair_groupoid(("1", "2")))
    idp = identity_actor(pr)
    D, (p1, p2) = pullback_etact(idp, idp)
    assert groupoid_iso_search(D, pr) is not None
    prod, pcone = product_etact([pr, pr])
    assert arrow_quotient_report(
        compose_actors(idp, pcone.legs[0]),
        compose_actors(idp, pcone.legs[1])) == {
        "onto": True, "well-defined": True, "constant-on-classes": True,
        "covered": 8, "classes": 4, "arrows": 4, "bijective": True}


def test_pullback_of_two_quotients_is_the_fiber_product_group():
    z4d, z2d = zn_discrete(4), zn_discrete(2)
    h = group_actor(z4d, z2d, (0, 1, 0, 1))
    P, (p1, p2) = pullback_etact(h, h)
    assert P.n == 8 and bin(P.gpd.units).count("1") == 1
    ok, witness = actor_agreement(compose_actors(h, p1), compose_actors(h, p2))
    assert ok, witness
    pairs = [(x, y) for x in range(4) for y in range(2)]
    idx = {p: i for i, p in enumerate(pairs)}
    table = tuple(
        tuple(idx[((a + c) % 4, (b + d) % 2)] for (c, d) in pairs)
        for (a, b) in pairs)
    z4xz2 = etale_discrete(from_group(
        tuple("e%d%d" % p for p in pairs), table))
    assert groupoid_iso_search(P, z4xz2) is not None
    assert groupoid_iso_search(P, zn_discrete(8)) is None


def test_covered_arrows_do_not_separate_the_fiber_product():
    """A covered arrow lies in one bisection per agreeing partner, so the
    germ assignment is onto but multi-valued here, and the generated
    identification collapses the two parity classes."""
    z4d, z2d = zn_discrete(4), zn_discrete(2)
    h = group_actor(z4d, z2d, (0, 1, 0, 1))
    prod, pcone = product_etact([z4d, z4d])
    report = arrow_quotient_report(
        compose_actors(h, pcone.legs[0]), compose_actors(h, pcone.legs[1]))
    assert report == {
        "onto": True, "well-defined": False, "constant-on-classes": False,
        "covered": 8, "classes": 2, "arrows": 8, "bijective": False}


def test_pullback_of_spaces_over_a_point_glues_the_base_points():
    X1 = unit_groupoid(FiniteSpace.sierpinski())
    X2 = unit_groupoid(FiniteSpace.sierpinski())
    a1, _pt = closed_point_actor(X1)
    a2, _pt = closed_point_actor(X2)
    W, (w1, w2) = pullback_etact(a1, a2)
    assert W.n == 3 and bin(W.gpd.units).count("1") == 3
    sp, _m = W.unit_space()
    wedge = FiniteSpace.build(("a", "b", "c"), (0, 1, 2, 3, 7))
    assert homeomorphism_search(sp, wedge) is not None


# --------------------------------------------------------- groupoid limits


def test_empty_groupoid_limit_is_the_empty_groupoid():
    D = Diagram.build(discrete_shape(()), "groupoids", (), ())
    L, cone = limit_etact(D)
    assert L.n == 0 and cone.legs == ()


def test_discrete_groupoid_limit_matches_the_product():
    z2d, z3d = zn_discrete(2), zn_discrete(3)
    D = Diagram.build(discrete_shape(("a", "b")), "groupoids", (z2d, z3d),
                      (identity_actor(z2d), identity_actor(z3d)))
    L, cone = limit_etact(D)
    prod, _pcone = product_etact([z2d, z3d])
    assert L.n == 5
    assert groupoid_iso_search(L, prod) is not None


def test_groupoid_limit_of_a_parallel_pair_is_the_equalizer():
    z2d = zn_discrete(2)
    idz = identity_actor(z2d)
    D = Diagram.build(parallel_pair_shape(), "groupoids", (z2d, z2d),
                      (idz, identity_actor(z2d), idz,
                       group_actor(z2d, z2d, (0, 0))))
    L, cone = limit_etact(D)
    assert L.n == 1 and bin(L.gpd.units).count("1") == 1


def test_groupoid_limits_refuse_non_sober_objects():
    flat = unit_groupoid(FiniteSpace.indiscrete(("p", "q")))
    D = Diagram.build(discrete_shape(("a",)), "groupoids", (flat,),
                      (identity_actor(flat),))
    with pytest.raises(NotSober) as err:
        limit_etact(D)
    assert err.value.law == "a"
    assert err.value.witness == "anchor-not-a-unit-bijection"


def test_bisections_of_a_limit_realize_the_pseudogroup_limit():
    z2d, z3d = zn_discrete(2), zn_discrete(3)
    D = Diagram.build(discrete_shape(("a", "b")), "groupoids", (z2d, z3d),
                      (identity_actor(z2d), identity_actor(z3d)))
    L, _cone = limit_etact(D)
    bis = enumerate_bisections(L)
    bis_diagram = discrete_psgrp_diagram(
        (enumerate_bisections(z2d), enumerate_bisections(z3d)), ("a", "b"))
    lim_ps, _c = limit_psgrp(bis_diagram)
    assert bis.n == lim_ps.n == 12
    assert unit_eta(bis).hom.is_bijective()
    assert len(bis.idempotents()) == len(lim_ps.idempotents())


# ------------------------------------------------------ frame preservation


def test_idempotent_frames_pass_through_every_limit_shape():
    single = discrete_psgrp_diagram((z_mod(2),), ("a",))
    discrete = discrete_psgrp_diagram((z_mod(2), z_mod(3)), ("a", "b"))
    for D, size in ((single, 2), (discrete, 4),
                    (quotient_parallel_pair(), 2), (terminal_cospan(), 2)):
        report = E_preservation_check(D)
        assert report == {
            "iso": True, "limit": size, "frames": size, "counterexample": None}


def test_frame_limits_require_unit_preserving_arrows():
    z2, z1 = z_mod(2), z_mod(1)
    to_zero = PseudogroupHom.build(z2, z1, (1, 1, 1))
    D = Diagram.build(
        parallel_pair_shape(), "pseudogroups", (z2, z1),
        (ident(z2), ident(z1), to_zero, to_zero))
    with pytest.raises(AssertionError, match="unit-preserving"):
        frame_limit(D)


# ---------------------------------------------------------- group diagrams


def test_connected_group_diagrams_have_group_limits():
    z4 = z_mod(4)
    sq = PseudogroupHom.build(z4, z4, (0, 2, 0, 2, 4))
    D = Diagram.build(parallel_pair_shape(), "pseudogroups", (z4, z4),
                      (ident(z4), ident(z4), ident(z4), sq))
    assert connected_group_limit_check(D) == {
        "connected": True, "group": True, "arrows": 1}
    assert connected_group_limit_check(quotient_parallel_pair()) == {
        "connected": True, "group": True, "arrows": 2}


def test_the_terminal_group_connects_a_discrete_pair():
    D = terminal_cospan()
    lim, _cone = limit_psgrp(D)
    assert lim.n == 7
    assert connected_group_limit_check(D) == {
        "connected": True, "group": True, "arrows": 6}


def test_a_disconnected_group_diagram_limits_to_a_disjoint_union():
    D = discrete_psgrp_diagram((z_mod(2), z_mod(3)), ("a", "b"))
    assert connected_group_limit_check(D) == {
        "connected": False, "components": 2, "disjoint-union": True}


def test_group_checks_reject_non_group_objects():
    i2 = validate_pseudogroup(symmetric_inverse_monoid(2))
    D = discrete_psgrp_diagram((i2,), ("a",))
    with pytest.raises(NotGroupDiagram) as err:
        connected_group_limit_check(D)
    assert err.value.law == "not-a-group-with-zero"


# ------------------------------------------------- corestriction adjunction


def square_frame():
    return Frame.from_leq(
        ("bot", "a", "b", "top"), [(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)]
    )


def test_unital_homs_from_a_frame_restrict_to_frame_homs():
    FP = frame_pseudogroup(square_frame())
    S = validate_pseudogroup(symmetric_inverse_monoid(2))
    es_frame, es = idempotent_frame(S)
    pos = {e: i for i, e in enumerate(es)}
    homs = []
    for images in itertools.product(es, repeat=FP.n):
        if images[FP.one] != S.one:
            continue
        try:
            PseudogroupHom.build(FP, S, images)
        except HomError:
            continue
        homs.append(images)
    frame_homs = []
    for images in itertools.product(range(es_frame.n), repeat=4):
        try:
            FrameHom.build(square_frame(), es_frame, images)
        except StoneError:
            continue
        frame_homs.append(images)
    assert len(homs) == len(frame_homs) == 4
    assert sorted(tuple(pos[i] for i in h) for h in homs) == sorted(frame_homs)


def test_group_actions_are_homs_into_the_global_bisections():
    z2d = zn_discrete(2)
    pr = etale_discrete(pair_groupoid(("1", "2")))
    bis = enumerate_bisections(pr)
    gamma, keep = invertible_group(bis)
    assert gamma.n == 2
    anchor = tuple(0 for _ in range(pr.gpd.n))
    actors = []
    for perm in itertools.permutations(range(pr.gpd.n)):
        act = [list(range(pr.gpd.n)), list(perm)]
        try:
            actors.append(Actor.build(z2d, pr, anchor, act))
        except Exception:
            continue
    assert len(actors) == 2
    images = set()
    for a in actors:
        ug = mask_of(a.act[1][x] for x in bits(pr.gpd.units))
        t = bis.payload.index(ug)
        assert t in keep
        images.add(t)
        for x in bits(pr.gpd.units):
            assert translate(pr, ug, x, "right") == a.act[1][x]
    assert images == set(keep)
