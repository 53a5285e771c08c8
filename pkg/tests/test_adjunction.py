"""The unit and counit of the bisection/spectrum correspondence.

The unit is pinned down on groups with zero and on frames of opens,
where it must reduce to the classical e |-> U_e map; the counit is
compared with the point-detection dual on unit-only groupoids and with
hand-written translation tables on discrete groups.  Invertibility of
the counit is swept against sobriety of the unit space, including
negatives, and both triangle identities and naturality squares are
evaluated elementwise.
"""

from __future__ import annotations

from etale.adjunction import (
    actor_agreement,
    counit_epsilon,
    counit_inverse,
    epsilon_iso_check,
    eta_iso_check,
    naturality_check,
    triangle_check_groupoid,
    triangle_check_pseudogroup,
    unit_eta,
)
from etale.functors import canonical_action
from etale.groupoid import (
    FiniteGroupoid,
    bisection_product,
    enumerate_bisections,
    etale_discrete,
    from_group,
    group_actor,
    groupoid_iso_search,
    identity_actor,
    pair_groupoid,
    space_actor,
    unit_groupoid,
    validate_etale,
)
from etale.invsgp import (
    InverseSemigroup,
    PseudogroupHom,
    adjoin_zero,
    frame_pseudogroup,
    identity_hom,
    invert_bijective_hom,
    symmetric_inverse_monoid,
    validate_pseudogroup,
)
from etale.stone import (
    ContinuousMap,
    FiniteSpace,
    Frame,
    bits,
    mask_of,
    point_character_map,
    spectrum_space,
    stone_triangle_check,
)


def cyclic(n):
    return [[(i + j) % n for j in range(n)] for i in range(n)]


def z_mod(n):
    labels = [("1" if i == 0 else "g" if n == 2 else f"g{i}") for i in range(n)]
    return validate_pseudogroup(adjoin_zero(labels, cyclic(n)))


def i2():
    return validate_pseudogroup(symmetric_inverse_monoid(2))


def chain3_frame():
    return Frame.from_leq(("bot", "mid", "top"), [(0, 1), (1, 2), (0, 2)])


def square_frame():
    return Frame.from_leq(
        ("bot", "a", "b", "top"), [(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)]
    )


def collapsed():
    return validate_pseudogroup(InverseSemigroup.build(("0",), ((0,),)))


def z2_discrete():
    return etale_discrete(from_group(("1", "g"), cyclic(2)))


def pair2_discrete():
    return etale_discrete(pair_groupoid(("1", "2")))


def two_loops():
    labels = ("u1", "a", "u2", "b")
    comp = [
        [0, 1, None, None],
        [1, 0, None, None],
        [None, None, 2, 3],
        [None, None, 3, 2],
    ]
    return FiniteGroupoid.build(
        labels, (0, 0, 2, 2), (0, 0, 2, 2), (0, 1, 2, 3), comp
    )


def two_loops_linked():
    """The loop b is only open together with the far-away unit u1, so
    the topology is etale but genuinely non-discrete."""
    g = two_loops()
    return validate_etale(g, FiniteSpace.closure_build(g.elements, [1, 2, 5, 9]))


# ------------------------------------------------------------------ unit


def test_unit_sends_a_group_element_to_its_singleton_bisection():
    eta = unit_eta(z_mod(2))
    assert eta.bis.n == 3
    # payload masks sort as {}, {unit germ}, {loop germ}
    assert eta.hom.mapping == (1, 2, 0)
    assert eta.hom.is_bijective()
    assert eta_iso_check(z_mod(2)) == {
        "iso": True, "frame-spatial": True, "agree": True}


def test_unit_is_bijective_onto_the_bisections_of_the_pair_groupoid():
    eta = unit_eta(i2())
    assert eta.bis.n == 7
    assert eta.hom.is_bijective()
    ps = eta.ps
    for t in range(ps.n):
        for u in range(ps.n):
            assert (
                eta.bis.payload[eta.hom.mapping[ps.meet[t][u]]]
                == eta.bis.payload[eta.hom.mapping[t]]
                & eta.bis.payload[eta.hom.mapping[u]]
            )


def test_unit_extends_the_frame_of_opens_unit():
    for frame in (chain3_frame(), square_frame()):
        ps = frame_pseudogroup(frame)
        eta = unit_eta(ps)
        ca = canonical_action(ps)
        for e in range(ps.n):
            covered = mask_of(eta.spec.unit_of(x) for x in bits(ca.action.dom[e]))
            assert eta.bis.payload[eta.hom.mapping[e]] == covered
        assert eta.hom.is_bijective()
        assert eta_iso_check(ps)["agree"]


# ---------------------------------------------------------------- counit


def test_counit_of_a_discrete_group_is_right_translation():
    G = z2_discrete()
    eps = counit_epsilon(G)
    assert eps.bis.n == 3 and eps.spec.gpd.n == 2
    assert eps.actor.anchor == (0, 0)
    assert eps.actor.act == ((0, 1), (1, 0))
    assert epsilon_iso_check(G, eps) == {
        "iso": True, "sober": True, "agree": True, "reason": None}


def test_counit_of_a_space_groupoid_is_dual_to_point_detection():
    for space in (FiniteSpace.sierpinski(), FiniteSpace.build("abc", (0, 1, 3, 7))):
        G = unit_groupoid(space)
        eps = counit_epsilon(G)
        kappa, report = point_character_map(space)
        assert report["homeomorphism"]
        f = ContinuousMap.build(
            space,
            eps.spec.etale.space,
            tuple(eps.spec.unit_of(kappa.mapping[x]) for x in range(space.n)),
        )
        assert actor_agreement(
            eps.actor, space_actor(eps.spec.etale, G, f)) == (True, None)
        assert epsilon_iso_check(G, eps)["iso"]


def test_counit_invertibility_fails_exactly_off_sober_spaces():
    flat = unit_groupoid(FiniteSpace.build("pq", (0, 3)))
    report = epsilon_iso_check(flat)
    assert report == {
        "iso": False, "sober": False, "agree": True,
        "reason": "anchor-not-a-unit-bijection"}
    assert counit_inverse(counit_epsilon(flat)) is None
    # loops over an indiscrete unit space: not unit-only, same verdict
    g = two_loops()
    H = validate_etale(g, FiniteSpace.closure_build(g.elements, [5, 10]))
    report = epsilon_iso_check(H)
    assert report["iso"] is False and report["sober"] is False
    assert report["agree"]


def test_translation_is_independent_of_the_bisection_neighbourhood():
    for G in (two_loops_linked(), pair2_discrete()):
        eps = counit_epsilon(G)
        inv = counit_inverse(eps)
        pos = {m: k for k, m in enumerate(eps.bis.payload)}
        for gamma in range(G.n):
            hoods = [m for m in eps.bis.payload if (m >> gamma) & 1]
            assert hoods and hoods[0] == G.base[gamma]
            for j, (u, x) in enumerate(eps.spec.reps):
                if inv.act[gamma][j] is None:
                    continue
                for v in hoods:
                    moved = bisection_product(G, v, eps.bis.payload[u])
                    assert eps.spec.germ(pos[moved], x) == inv.act[gamma][j]


# ------------------------------------------------------------- triangles


def test_triangle_identities_at_pseudogroups():
    assert triangle_check_pseudogroup(z_mod(3)) == {
        "identity": "epsilon-after-lifted-eta", "pass": True,
        "counterexample": None}
    for ps in (i2(), frame_pseudogroup(chain3_frame()), collapsed()):
        assert triangle_check_pseudogroup(ps)["pass"]


def test_frame_triangle_reduces_to_the_opens_unit():
    frame = chain3_frame()
    assert triangle_check_pseudogroup(frame_pseudogroup(frame))["pass"]
    assert stone_triangle_check(frame, spectrum_space(frame).space) == {
        "at-frame": True, "at-space": True}


def test_triangle_identities_at_groupoids():
    assert triangle_check_groupoid(pair2_discrete()) == {
        "identity": "bis-of-epsilon-after-eta", "pass": True,
        "counterexample": None}
    flat = unit_groupoid(FiniteSpace.build("pq", (0, 3)))
    for G in (z2_discrete(), unit_groupoid(FiniteSpace.sierpinski()),
              two_loops_linked(), flat):
        assert triangle_check_groupoid(G)["pass"]


# ----------------------------------------------------------- round trips


def test_round_trip_recovers_sober_groupoids():
    for G in (
        pair2_discrete(),
        z2_discrete(),
        two_loops_linked(),
        unit_groupoid(FiniteSpace.sierpinski()),
        unit_groupoid(FiniteSpace.build("abc", (0, 1, 3, 7))),
    ):
        eps = counit_epsilon(G)
        assert epsilon_iso_check(G, eps) == {
            "iso": True, "sober": True, "agree": True, "reason": None}
        assert groupoid_iso_search(eps.spec.etale, G) is not None


def test_round_trip_recovers_every_pseudogroup():
    for ps in (
        z_mod(2),
        z_mod(3),
        z_mod(4),
        i2(),
        frame_pseudogroup(chain3_frame()),
        enumerate_bisections(pair2_discrete()),
        collapsed(),
    ):
        eta = unit_eta(ps)
        assert eta.hom.is_bijective()
        back = invert_bijective_hom(eta.hom)
        assert back.after(eta.hom).mapping == identity_hom(ps).mapping


# ------------------------------------------------------------ naturality


def test_unit_naturality_squares():
    s4, s2 = z_mod(4), z_mod(2)
    quot = PseudogroupHom.build(s4, s2, (0, 1, 0, 1, 2))
    assert naturality_check(quot) == {
        "square": "unit", "pass": True, "counterexample": None}
    monoid = i2()
    pos = {lab: k for k, lab in enumerate(monoid.elements)}
    emb = PseudogroupHom.build(
        s2, monoid, (pos["[0>0,1>1]"], pos["[0>1,1>0]"], pos["[]"])
    )
    assert naturality_check(emb)["pass"]
    assert naturality_check(identity_hom(monoid))["pass"]


def test_counit_naturality_squares():
    z4 = etale_discrete(from_group(("1", "g1", "g2", "g3"), cyclic(4)))
    h = group_actor(z4, z2_discrete(), (0, 1, 0, 1))
    assert naturality_check(h) == {
        "square": "counit", "pass": True, "counterexample": None}
    s = FiniteSpace.sierpinski()
    point = unit_groupoid(FiniteSpace.discrete(("p",)))
    squash = space_actor(
        point, unit_groupoid(s),
        ContinuousMap.build(s, point.space, (0, 0)))
    assert naturality_check(squash)["pass"]
    assert naturality_check(identity_actor(two_loops_linked()))["pass"]
