"""Inverse semigroup actions, germ groupoids and the spectrum functor.

An action assigns a partial homeomorphism of a finite space to every
semigroup element; its germ classes assemble into an etale groupoid
whose topology is generated by the sets U_{t,W} of germs of t at the
points of an open W.  Every pseudogroup acts canonically on the
character space of its idempotent frame, and the germ groupoid of that
action is the spectrum of the pseudogroup.  A unit-preserving
pseudogroup hom induces an actor between spectra, and an actor induces
a pseudogroup hom between bisection pseudogroups; both directions are
built and validated here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .invsgp import PseudogroupHom, idempotent_frame
from .stone import ContinuousMap, FiniteSpace, FrameHom, bits, mask_of
from .stone import precompose, sober_check, spectrum_space
from .groupoid import Actor, EtaleGroupoid, FiniteGroupoid
from .groupoid import enumerate_bisections, is_bisection


class ActionError(Exception):
    """An inverse semigroup action law fails; law names it, witness shows it."""

    def __init__(self, law, witness=None):
        super().__init__(law if witness is None else "%s: %r" % (law, witness))
        self.law = law
        self.witness = witness


class NotHomomorphic(ActionError):
    """alpha_{tu} differs from alpha_t . alpha_u, or zero/unit act wrongly."""


class DomainNotOpen(ActionError):
    pass


class NotPartialHomeo(ActionError):
    """Some element does not act by a homeomorphism between opens."""


# ----------------------------------------------------------------- actions


def neutral_element(isg):
    hits = [u for u in range(isg.n) if all(
        isg.table[u][t] == t and isg.table[t][u] == t for t in range(isg.n))]
    return hits[0] if hits else None


def absorbing_element(isg):
    hits = [z for z in range(isg.n) if all(
        isg.table[z][t] == z and isg.table[t][z] == z for t in range(isg.n))]
    return hits[0] if hits else None


@dataclass(frozen=True)
class IsgAction:
    """An inverse semigroup acting on a finite space by partial homeomorphisms.

    maps[t][x] is the image of point x under element t, or None when x
    lies outside the domain of t; dom[t] is the domain as an open mask.
    zero and one index the absorbing and neutral semigroup elements.
    """

    isg: "InverseSemigroup"
    space: FiniteSpace
    maps: tuple
    dom: tuple
    zero: int
    one: int

    def apply(self, t, x):
        y = self.maps[t][x]
        assert y is not None, "point outside the domain of the element"
        return y

    def ran(self, t):
        return mask_of(y for y in self.maps[t] if y is not None)


def validate_action(isg, space, maps):
    """Check that maps defines an action by partial homeomorphisms.

    The composite law is checked as equality of partial maps, so the
    domains must match as well as the values; the zero must act as the
    empty map and the unit as the identity.
    """
    maps = tuple(tuple(row) for row in maps)
    assert len(maps) == isg.n and all(len(row) == space.n for row in maps)
    one = neutral_element(isg)
    zero = absorbing_element(isg)
    assert one is not None and zero is not None, "an action needs a unit and a zero"
    dom = tuple(mask_of(x for x in range(space.n) if maps[t][x] is not None)
                for t in range(isg.n))
    for t in range(isg.n):
        if not space.is_open(dom[t]):
            raise DomainNotOpen("domain", isg.elements[t])
        image = [maps[t][x] for x in bits(dom[t])]
        if len(set(image)) != len(image):
            raise NotPartialHomeo("not-injective", isg.elements[t])
        if not space.is_open(mask_of(image)):
            raise NotPartialHomeo("image-not-open", isg.elements[t])
        for x in bits(dom[t]):
            # on open subspaces minimal opens agree with the ambient ones,
            # so a partial homeomorphism moves them exactly onto each other
            around = mask_of(maps[t][y] for y in bits(space.minimal_open(x)))
            if around != space.minimal_open(maps[t][x]):
                raise NotPartialHomeo("not-bicontinuous", isg.elements[t])
    for t in range(isg.n):
        for u in range(isg.n):
            tu = isg.table[t][u]
            for x in range(space.n):
                y = maps[u][x]
                via = maps[t][y] if y is not None else None
                if via != maps[tu][x]:
                    raise NotHomomorphic(
                        "composite", (isg.elements[t], isg.elements[u]))
    if dom[zero]:
        raise NotHomomorphic("zero-not-empty", isg.elements[zero])
    if any(maps[one][x] != x for x in range(space.n)):
        raise NotHomomorphic("unit-not-identity", isg.elements[one])
    return IsgAction(isg, space, maps, dom, zero, one)


# ----------------------------------------------------------- germ groupoids


@dataclass(frozen=True)
class TransformationGroupoid:
    """The germs of an action, as a validated etale groupoid.

    reps[i] is the canonical (t, x) pair of arrow i, the lexicographically
    least member of its germ class; cls[t][x] recovers the arrow of a pair,
    with None outside the action domain.
    """

    action: IsgAction
    etale: EtaleGroupoid
    reps: tuple
    cls: tuple

    @property
    def gpd(self):
        return self.etale.gpd

    @property
    def space(self):
        return self.etale.space

    def germ(self, t, x):
        g = self.cls[t][x]
        assert g is not None, "germ of a pair outside the action domain"
        return g

    def unit_of(self, x):
        """The unit arrow sitting over a space point."""
        return self.cls[self.action.one][x]

    def point_of(self, u):
        """The space point under a unit arrow."""
        assert (self.gpd.units >> u) & 1
        return self.reps[u][1]

    def element_open(self, t):
        """U_t, the open bisection of all germs of one element."""
        return mask_of(g for g in self.cls[t] if g is not None)


def transformation_groupoid(action):
    """Quotient the pairs (t, x in dom t) by germ equivalence.

    Two pairs (t, x) and (u, x) are identified when some idempotent e
    has x in its domain and te = ue.  Source, range, inverse and
    composition descend from s[t,x] = x, r[t,x] = t.x, [t,x]^-1 =
    [t*, t.x] and [t,x][u,y] = [tu,y]; the topology is generated by the
    sets U_{t,W} for open W inside dom t.
    """
    a = action
    isg, space = a.isg, a.space
    idem = list(bits(isg.idem))

    def same_germ(t, u, x):
        return any((a.dom[e] >> x) & 1 and isg.table[t][e] == isg.table[u][e]
                   for e in idem)

    cls = [[None] * space.n for _ in range(isg.n)]
    reps = []
    for t in range(isg.n):
        for x in bits(a.dom[t]):
            for k, (u, y) in enumerate(reps):
                if y == x and same_germ(t, u, x):
                    cls[t][x] = k
                    break
            else:
                cls[t][x] = len(reps)
                reps.append((t, x))
    labels = tuple("[%s|%s]" % (isg.elements[t], space.points[x])
                   for t, x in reps)
    src = [cls[a.one][x] for t, x in reps]
    rng = [cls[a.one][a.maps[t][x]] for t, x in reps]
    inv = [cls[isg.star[t]][a.maps[t][x]] for t, x in reps]
    comp = [[None] * len(reps) for _ in reps]
    for i, (t, x) in enumerate(reps):
        for j, (u, y) in enumerate(reps):
            if a.maps[u][y] == x:
                comp[i][j] = cls[isg.table[t][u]][y]
    gpd = FiniteGroupoid.build(labels, src, rng, inv, comp)
    gens = [mask_of(cls[t][x] for x in bits(w & a.dom[t]))
            for t in range(isg.n) for w in space.opens]
    arrows = FiniteSpace.closure_build(labels, gens)
    out = TransformationGroupoid(
        a, EtaleGroupoid.build(gpd, arrows),
        tuple(reps), tuple(tuple(row) for row in cls))
    cover = 0
    for t in range(isg.n):
        u = out.element_open(t)
        assert is_bisection(out.etale, u)
        cover |= u
    assert cover == arrows.full, "the element opens must cover the germs"
    usub, umap = out.etale.unit_space()
    into = ContinuousMap.build(
        space, usub, tuple(umap[out.unit_of(x)] for x in range(space.n)))
    assert into.is_homeomorphism(), "x |-> [1,x] must carry the space to the units"
    return out


# --------------------------------------------------------------- spectrum


@dataclass(frozen=True)
class CanonicalAction:
    """A pseudogroup acting on the spectrum of its idempotent frame.

    idem[j] is the pseudogroup element behind frame element j; the
    action sends the character chi in U_{t*t} to e |-> chi(t* e t).
    """

    ps: "Pseudogroup"
    frame: "Frame"
    idem: tuple
    spectrum: "Spectrum"
    action: IsgAction


def canonical_action(ps):
    frame, idem = idempotent_frame(ps)
    pos = {e: j for j, e in enumerate(idem)}
    spec = spectrum_space(frame)
    maps = []
    for t in range(ps.n):
        row = [None] * spec.space.n
        tt = pos[ps.mult(ps.star(t), t)]
        for k, filt in enumerate(spec.filters):
            if not (filt >> tt) & 1:
                continue
            moved = mask_of(j for j in range(frame.n) if (filt >> pos[
                ps.mult(ps.mult(ps.star(t), idem[j]), t)]) & 1)
            row[k] = spec.filters.index(moved)
        maps.append(row)
    action = validate_action(ps.isg, spec.space, maps)
    return CanonicalAction(ps, frame, idem, spec, action)


def sigma(ps):
    """The spectrum of a pseudogroup: the germ groupoid of its canonical
    action.  The unit space is always sober."""
    out = transformation_groupoid(canonical_action(ps).action)
    usub, _ = out.etale.unit_space()
    ok, witness = sober_check(usub)
    assert ok, witness
    return out


def sigma_on_hom(phi, source_spec=None, target_spec=None):
    """The actor between spectra induced by a unit-preserving hom.

    The anchor pulls the range character back along phi; the action is
    [t,tau].[u,chi] = [phi(t)u, chi].  Precomputed spectra of the source
    and target may be passed to avoid rebuilding them.
    """
    s, t = phi.source, phi.target
    assert phi.mapping[s.one] == t.one, "a unit-preserving hom is required"
    ca_s, ca_t = canonical_action(s), canonical_action(t)
    gs = source_spec if source_spec is not None else sigma(s)
    gt = target_spec if target_spec is not None else sigma(t)
    assert gs.action == ca_s.action and gt.action == ca_t.action
    pos = {e: j for j, e in enumerate(ca_t.idem)}
    restriction = FrameHom.build(
        ca_s.frame, ca_t.frame,
        tuple(pos[phi.mapping[e]] for e in ca_s.idem))
    pulled = precompose(restriction, spec_source=ca_s.spectrum,
                        spec_target=ca_t.spectrum)
    anchor = tuple(gs.unit_of(pulled(gt.point_of(gt.gpd.rng[j])))
                   for j in range(gt.gpd.n))
    act = [[None] * gt.gpd.n for _ in range(gs.gpd.n)]
    for i, (u, x) in enumerate(gs.reps):
        for j, (v, y) in enumerate(gt.reps):
            if gs.gpd.src[i] == anchor[j]:
                act[i][j] = gt.germ(t.mult(phi.mapping[u], v), y)
    return Actor.build(gs.etale, gt.etale, anchor, act)


def bis_on_actor(h, source=None, target=None, max_family=None):
    """The pseudogroup hom Bis(dom h) -> Bis(codom h): U |-> U . H^0.

    Precomputed bisection pseudogroups (with their arrow-mask payloads)
    may be passed to avoid re-enumeration.  max_family bounds the
    join-preservation sweep; joins of bisections are unions, so the
    pairwise case already forces every finite compatible family.
    """
    bs = source if source is not None else enumerate_bisections(h.dom)
    bt = target if target is not None else enumerate_bisections(h.codom)
    idx = {m: k for k, m in enumerate(bt.payload)}
    units = h.codom.gpd.units
    mapping = tuple(idx[h.bis_product(bs.payload[k], units)]
                    for k in range(bs.n))
    return PseudogroupHom.build(bs, bt, mapping, max_family=max_family)
