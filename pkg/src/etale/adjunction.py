"""The unit and counit tying pseudogroups to etale groupoids.

For a pseudogroup S the unit eta_S sends an element t to the open
bisection of all germs of t; for a groupoid G the counit epsilon_G acts
on G by right translation, anchored by the character detecting the
range of an arrow.  Both triangle identities, the naturality squares
and the isomorphism criteria (eta is bijective iff the idempotent
frame is spatial; epsilon is invertible iff the unit space is sober)
are checked element by element, with explicit inverse morphisms
constructed rather than appealing to abstract arguments.
"""

from __future__ import annotations

from dataclasses import dataclass

from .invsgp import Pseudogroup, PseudogroupHom, idempotent_frame, identity_hom
from .stone import bits, mask_of, sober_check, spectrum_space
from .groupoid import Actor, EtaleGroupoid, actor_iso_check, bisection_product
from .groupoid import compose_actors, enumerate_bisections, identity_actor, translate
from .functors import TransformationGroupoid, bis_on_actor, canonical_action
from .functors import sigma, sigma_on_hom


@dataclass(frozen=True)
class UnitComponent:
    """eta_S : S -> Bis(Sigma S), with the spectrum it factors through."""

    ps: Pseudogroup
    spec: TransformationGroupoid
    bis: Pseudogroup
    hom: PseudogroupHom


@dataclass(frozen=True)
class CounitComponent:
    """epsilon_G : Sigma(Bis G) acting on G by right translation."""

    groupoid: EtaleGroupoid
    bis: Pseudogroup
    spec: TransformationGroupoid
    actor: Actor


def unit_eta(ps):
    """t |-> the bisection of all germs of t in the spectrum of ps.

    Validated as a pseudogroup hom; binary meet preservation is
    asserted on top, which a general hom does not enjoy.
    """
    spec = sigma(ps)
    bis = enumerate_bisections(spec.etale)
    pos = {m: k for k, m in enumerate(bis.payload)}
    mapping = tuple(pos[spec.element_open(t)] for t in range(ps.n))
    hom = PseudogroupHom.build(ps, bis, mapping)
    for t in range(ps.n):
        for u in range(ps.n):
            assert mapping[ps.meet[t][u]] == bis.meet[mapping[t]][mapping[u]], (
                "the unit must preserve binary meets")
    return UnitComponent(ps, spec, bis, hom)


def range_character(G, bis, ca, gamma):
    """The point of the spectrum of Bis G detecting the range of gamma."""
    u = G.gpd.rng[gamma]
    filt = mask_of(j for j, e in enumerate(ca.idem)
                   if (bis.payload[e] >> u) & 1)
    return ca.spectrum.filters.index(filt)


def translation_actor(ps, G, ca=None, spec=None):
    """The spectrum of a pseudogroup of bisections acting on G.

    ps must carry arrow masks of G as payload and be closed under the
    bisection operations (the full Bis G, or any sub-pseudogroup of it
    containing the unit open).  act([U, chi], gamma) = U gamma,
    anchored by the detection character of r(gamma).  The value is
    checked to be independent of the chosen representative of the germ
    class of [U, chi].  Returns (spectrum, actor).
    """
    ca = ca if ca is not None else canonical_action(ps)
    spec = spec if spec is not None else sigma(ps)
    assert spec.action == ca.action
    anchor = tuple(spec.unit_of(range_character(G, ps, ca, gamma))
                   for gamma in range(G.n))
    act = [[None] * G.n for _ in range(spec.gpd.n)]
    for i, (u, x) in enumerate(spec.reps):
        for gamma in range(G.n):
            if spec.gpd.src[i] != anchor[gamma]:
                continue
            act[i][gamma] = translate(G, ps.payload[u], gamma, "right")
    for v in range(ps.n):
        for x in bits(ca.action.dom[v]):
            i = spec.cls[v][x]
            for gamma in range(G.n):
                if spec.gpd.src[i] == anchor[gamma]:
                    assert act[i][gamma] == translate(
                        G, ps.payload[v], gamma, "right"
                    ), "translation must not depend on the germ representative"
    return spec, Actor.build(spec.etale, G, anchor, act)


def counit_epsilon(G):
    """The translation actor of the spectrum of Bis G back on G."""
    bis = enumerate_bisections(G)
    spec, actor = translation_actor(bis, G)
    return CounitComponent(G, bis, spec, actor)


# ------------------------------------------------------------- comparisons


def actor_agreement(a, b):
    """(True, None) when the actors coincide, else (False, witness)."""
    if a.dom != b.dom or a.codom != b.codom:
        return False, "different-ends"
    for x in range(a.codom.n):
        if a.anchor[x] != b.anchor[x]:
            return False, ("anchor", a.codom.gpd.elements[x])
    for g in range(a.dom.n):
        for x in range(a.codom.n):
            if a.act[g][x] != b.act[g][x]:
                return False, (
                    "act", (a.dom.gpd.elements[g], a.codom.gpd.elements[x]))
    return True, None


def hom_agreement(a, b):
    if a.source != b.source or a.target != b.target:
        return False, "different-ends"
    for t in range(a.source.n):
        if a.mapping[t] != b.mapping[t]:
            return False, a.source.elements[t]
    return True, None


def triangle_check_pseudogroup(ps, eta=None):
    """Counit-after-spectrum-of-unit is the identity actor on Sigma S."""
    eta = eta if eta is not None else unit_eta(ps)
    eps = counit_epsilon(eta.spec.etale)
    lifted = sigma_on_hom(eta.hom, source_spec=eta.spec, target_spec=eps.spec)
    ok, witness = actor_agreement(
        compose_actors(eps.actor, lifted), identity_actor(eta.spec.etale))
    return {"identity": "epsilon-after-lifted-eta", "pass": ok,
            "counterexample": witness}


def triangle_check_groupoid(G, eps=None):
    """Bisections-of-counit after eta of Bis G is the identity hom."""
    eps = eps if eps is not None else counit_epsilon(G)
    eta = unit_eta(eps.bis)
    lowered = bis_on_actor(eps.actor, source=eta.bis, target=eps.bis)
    ok, witness = hom_agreement(lowered.after(eta.hom), identity_hom(eps.bis))
    return {"identity": "bis-of-epsilon-after-eta", "pass": ok,
            "counterexample": witness}


# -------------------------------------------------------------- iso checks


def eta_iso_check(ps, eta=None):
    """Bijectivity of the unit, cross-checked against spatiality of the
    idempotent frame (finite distributive, so both always hold)."""
    eta = eta if eta is not None else unit_eta(ps)
    frame, _ = idempotent_frame(ps)
    spatial = spectrum_space(frame).opens_hom.is_bijective()
    iso = eta.hom.is_bijective()
    return {"iso": iso, "frame-spatial": spatial, "agree": iso == spatial}


def counit_inverse(eps):
    """The translation actor of G back on the spectrum of Bis G, when the
    points of the unit space biject with its detection characters.

    gamma sends [U, chi_x] to [V U, chi_x] where V is the least open
    bisection around gamma, namely its minimal open neighbourhood; the
    germ does not depend on this choice.  Returns None when some
    character detects no point or two points collide.
    """
    G, bis, spec = eps.groupoid, eps.bis, eps.spec
    g = G.gpd
    back = {}
    for u in bits(g.units):
        p = spec.point_of(eps.actor.anchor[u])
        if p in back:
            return None
        back[p] = u
    if len(back) != spec.action.space.n:
        return None
    pos = {m: k for k, m in enumerate(bis.payload)}
    anchor = tuple(back[spec.point_of(spec.gpd.rng[j])]
                   for j in range(spec.gpd.n))
    act = [[None] * spec.gpd.n for _ in range(g.n)]
    for gamma in range(g.n):
        for j, (u, x) in enumerate(spec.reps):
            if g.src[gamma] != anchor[j]:
                continue
            moved = bisection_product(G, G.base[gamma], bis.payload[u])
            act[gamma][j] = spec.germ(pos[moved], x)
    return Actor.build(G, spec.etale, anchor, act)


def epsilon_iso_check(G, eps=None):
    """Invertibility of the counit, cross-checked against sobriety.

    The explicit inverse by bisection neighbourhoods and the one found
    by the generic actor isomorphism search must agree when they exist.
    """
    eps = eps if eps is not None else counit_epsilon(G)
    usub, _ = G.unit_space()
    sober, _ = sober_check(usub)
    verdict, inverse, reason = actor_iso_check(eps.actor)
    explicit = counit_inverse(eps)
    if verdict:
        assert explicit is not None and explicit == inverse
        assert actor_agreement(
            compose_actors(eps.actor, explicit), identity_actor(G))[0]
        assert actor_agreement(
            compose_actors(explicit, eps.actor),
            identity_actor(eps.spec.etale))[0]
    return {"iso": verdict, "sober": sober, "agree": verdict == sober,
            "reason": reason}


# -------------------------------------------------------------- naturality


def naturality_check(morphism):
    """Evaluate both composites of the relevant naturality square.

    For a pseudogroup hom phi: eta_T . phi against Bis(Sigma phi) . eta_S;
    for an actor h: epsilon_H . Sigma(Bis h) against h . epsilon_G.
    """
    if isinstance(morphism, PseudogroupHom):
        eta_s = unit_eta(morphism.source)
        eta_t = unit_eta(morphism.target)
        lifted = sigma_on_hom(morphism, source_spec=eta_s.spec,
                              target_spec=eta_t.spec)
        lowered = bis_on_actor(lifted, source=eta_s.bis, target=eta_t.bis)
        ok, witness = hom_agreement(
            lowered.after(eta_s.hom), eta_t.hom.after(morphism))
        return {"square": "unit", "pass": ok, "counterexample": witness}
    assert isinstance(morphism, Actor)
    eps_g = counit_epsilon(morphism.dom)
    eps_h = counit_epsilon(morphism.codom)
    lowered = bis_on_actor(morphism, source=eps_g.bis, target=eps_h.bis)
    lifted = sigma_on_hom(lowered, source_spec=eps_g.spec,
                          target_spec=eps_h.spec)
    ok, witness = actor_agreement(
        compose_actors(eps_h.actor, lifted),
        compose_actors(morphism, eps_g.actor))
    return {"square": "counit", "pass": ok, "counterexample": witness}
