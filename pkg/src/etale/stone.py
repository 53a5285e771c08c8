"""Finite topological spaces, finite frames, characters and spectra.

Subsets of an n-element carrier are ints used as bitmasks.  A topology is
the complete family of open masks (finite spaces, so arbitrary unions are
finite unions).  A frame is a finite bounded distributive lattice with
explicit order and meet/join tables; at this scale "frame" and "finite
distributive lattice" coincide, and every such lattice is spatial.
"""

from __future__ import annotations

from dataclasses import dataclass


def bits(mask):
    """Iterate the set bit positions of a mask, ascending."""
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def mask_of(indices):
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def brace_label(labels, mask):
    """Render a mask over a labelled carrier as '{a,b}'."""
    return "{%s}" % ",".join(labels[i] for i in bits(mask))


class StoneError(Exception):
    """A finite structure violates one of its defining laws."""

    def __init__(self, law, witness=None):
        self.law = law
        self.witness = witness
        super().__init__(f"{law}: witness {witness!r}" if witness is not None else law)


class BadTopology(StoneError):
    pass


class NotContinuous(StoneError):
    pass


class NotALattice(StoneError):
    pass


class MissingBounds(StoneError):
    pass


class NotDistributive(StoneError):
    pass


# ---------------------------------------------------------------- spaces


@dataclass(frozen=True)
class FiniteSpace:
    """A finite space: labelled points plus the full family of open masks."""

    points: tuple
    opens: tuple

    @staticmethod
    def build(points, opens):
        points = tuple(points)
        full = (1 << len(points)) - 1
        family = sorted(set(int(o) for o in opens))
        for o in family:
            if o & ~full:
                raise BadTopology("open-not-a-subset", o)
        fam = set(family)
        if 0 not in fam or full not in fam:
            raise BadTopology("missing-empty-or-whole", (0, full))
        for a in family:
            for b in family:
                if a | b not in fam:
                    raise BadTopology("union-not-open", (a, b))
                if a & b not in fam:
                    raise BadTopology("intersection-not-open", (a, b))
        return FiniteSpace(points, tuple(family))

    @staticmethod
    def closure_build(points, generators):
        """Build from a generating family, closing under union and intersection."""
        points = tuple(points)
        full = (1 << len(points)) - 1
        fam = {0, full} | set(int(g) for g in generators)
        while True:
            extra = set()
            for a in fam:
                for b in fam:
                    if a | b not in fam:
                        extra.add(a | b)
                    if a & b not in fam:
                        extra.add(a & b)
            if not extra:
                break
            fam |= extra
        return FiniteSpace.build(points, fam)

    @staticmethod
    def discrete(points):
        points = tuple(points)
        return FiniteSpace.build(points, range(1 << len(points)))

    @staticmethod
    def indiscrete(points):
        points = tuple(points)
        return FiniteSpace.build(points, (0, (1 << len(points)) - 1))

    @staticmethod
    def sierpinski():
        # the open point is "0"
        return FiniteSpace.build(("0", "1"), (0, 1, 3))

    @staticmethod
    def chain(n):
        """n points where the opens form a chain: {}, {0}, {0,1}, ..."""
        return FiniteSpace.build(
            tuple(str(i) for i in range(n)), ((1 << k) - 1 for k in range(n + 1))
        )

    @staticmethod
    def from_preorder(points, below):
        """Alexandrov space of a preorder; below[k] = mask of {i : i <= k}.

        Opens are the up-sets.  Every topology on a finite carrier arises
        this way, which is how the corpus enumerates spaces.
        """
        points = tuple(points)
        n = len(points)
        fam = []
        for m in range(1 << n):
            # m is an up-set: no k outside m may sit above a point of m
            if all((1 << k) & m or not (below[k] & m) for k in range(n)):
                fam.append(m)
        return FiniteSpace.build(points, fam)

    @property
    def n(self):
        return len(self.points)

    @property
    def full(self):
        return (1 << self.n) - 1

    def is_open(self, mask):
        return mask in set(self.opens)

    def closed_sets(self):
        full = self.full
        return tuple(sorted(full & ~o for o in self.opens))

    def closure(self, mask):
        """Smallest closed set containing mask."""
        acc = self.full
        for c in self.closed_sets():
            if mask & ~c == 0:
                acc &= c
        return acc

    def minimal_open(self, point):
        acc = self.full
        for o in self.opens:
            if o & (1 << point):
                acc &= o
        return acc

    def t0_witness(self):
        """A pair of points no open separates, or None."""
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if self.minimal_open(i) == self.minimal_open(j):
                    return (i, j)
        return None

    def is_t0(self):
        return self.t0_witness() is None

    def subspace(self, mask, points=None):
        """Subspace on the points of mask; returns (space, old->new index map)."""
        keep = list(bits(mask))
        idx = {p: k for k, p in enumerate(keep)}
        pts = tuple(points) if points is not None else tuple(self.points[p] for p in keep)
        fam = set()
        for o in self.opens:
            fam.add(mask_of(idx[p] for p in bits(o & mask)))
        return FiniteSpace.build(pts, fam), idx


# ---------------------------------------------------------------- maps


@dataclass(frozen=True)
class ContinuousMap:
    source: FiniteSpace
    target: FiniteSpace
    mapping: tuple

    @staticmethod
    def build(source, target, mapping):
        mapping = tuple(mapping)
        assert len(mapping) == source.n
        for o in target.opens:
            pre = mask_of(x for x in range(source.n) if o & (1 << mapping[x]))
            if not source.is_open(pre):
                raise NotContinuous("preimage-not-open", (o, pre))
        return ContinuousMap(source, target, mapping)

    def __call__(self, x):
        return self.mapping[x]

    def image_mask(self, mask):
        return mask_of(self.mapping[x] for x in bits(mask))

    def preimage_mask(self, mask):
        return mask_of(x for x in range(self.source.n) if mask & (1 << self.mapping[x]))

    def after(self, other):
        """self o other."""
        assert other.target == self.source
        return ContinuousMap.build(
            other.source, self.target, tuple(self.mapping[y] for y in other.mapping)
        )

    def is_identity(self):
        return self.source == self.target and self.mapping == tuple(range(self.source.n))

    def is_homeomorphism(self):
        if sorted(self.mapping) != list(range(self.target.n)):
            return False
        return {self.image_mask(o) for o in self.source.opens} == set(self.target.opens)


def identity_map(space):
    return ContinuousMap.build(space, space, tuple(range(space.n)))


def local_homeo_check(f):
    """Is f a local homeomorphism onto an open subspace of its target?

    For each point x we need an open U around x on which f is injective,
    with f(U) open and f carrying opens inside U to opens.  Open subsets
    of opens are open, so the image condition is checked in the whole
    target.
    """
    X, Y = f.source, f.target
    for x in range(X.n):
        found = False
        for U in X.opens:
            if not U & (1 << x):
                continue
            sec = list(bits(U))
            if len({f.mapping[p] for p in sec}) != len(sec):
                continue
            if not Y.is_open(f.image_mask(U)):
                continue
            if all(Y.is_open(f.image_mask(V & U)) for V in X.opens):
                found = True
                break
        if not found:
            return False
    return True


def homeomorphism_search(X, Y):
    """Brute-force search for a homeomorphism X -> Y; returns a mapping or None."""
    if X.n != Y.n or len(X.opens) != len(Y.opens):
        return None
    xsig = [sorted(bin(o).count("1") for o in X.opens if o & (1 << p)) for p in range(X.n)]
    ysig = [sorted(bin(o).count("1") for o in Y.opens if o & (1 << q)) for q in range(Y.n)]

    def extend(assignment, used):
        p = len(assignment)
        if p == X.n:
            m = ContinuousMap(X, Y, tuple(assignment))
            return tuple(assignment) if m.is_homeomorphism() else None
        for q in range(Y.n):
            if q in used or xsig[p] != ysig[q]:
                continue
            out = extend(assignment + [q], used | {q})
            if out is not None:
                return out
        return None

    return extend([], set())


# ---------------------------------------------------------------- frames


@dataclass(frozen=True)
class Frame:
    """Finite bounded distributive lattice.

    ``up[i]`` is the mask of elements above i (inclusive), ``meet``/``join``
    are full tables, ``bottom``/``top`` element indices.
    """

    elements: tuple
    up: tuple
    meet: tuple
    join: tuple
    bottom: int
    top: int

    @staticmethod
    def from_leq(elements, leq_pairs):
        """Build from a set of (i, j) index pairs meaning i <= j.

        The relation is closed reflexively and transitively before the
        lattice checks run, so files may list a sparse generating set.
        """
        elements = tuple(elements)
        n = len(elements)
        up = [1 << i for i in range(n)]
        for i, j in leq_pairs:
            up[i] |= 1 << j
        changed = True
        while changed:
            changed = False
            for i in range(n):
                acc = up[i]
                for j in bits(up[i]):
                    acc |= up[j]
                if acc != up[i]:
                    up[i] = acc
                    changed = True
        return Frame._from_up(elements, up)

    @staticmethod
    def _from_up(elements, up):
        n = len(elements)
        for i in range(n):
            for j in bits(up[i]):
                if i != j and up[j] & (1 << i):
                    raise NotALattice("order-not-antisymmetric", (i, j))
        bottoms = [i for i in range(n) if up[i] == (1 << n) - 1]
        tops = [i for i in range(n) if all(up[j] & (1 << i) for j in range(n))]
        if len(bottoms) != 1 or len(tops) != 1:
            raise MissingBounds("no-unique-bounds", (tuple(bottoms), tuple(tops)))
        meet = [[0] * n for _ in range(n)]
        join = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                lower = [w for w in range(n) if up[w] & (1 << i) and up[w] & (1 << j)]
                glb = [w for w in lower if all(up[v] & (1 << w) for v in lower)]
                if len(glb) != 1:
                    raise NotALattice("no-meet", (i, j))
                meet[i][j] = glb[0]
                upper = [w for w in range(n) if up[i] & (1 << w) and up[j] & (1 << w)]
                lub = [w for w in upper if all(up[w] & (1 << v) for v in upper)]
                if len(lub) != 1:
                    raise NotALattice("no-join", (i, j))
                join[i][j] = lub[0]
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if meet[a][join[b][c]] != join[meet[a][b]][meet[a][c]]:
                        raise NotDistributive("meet-over-join", (a, b, c))
        return Frame(
            elements,
            tuple(up),
            tuple(tuple(r) for r in meet),
            tuple(tuple(r) for r in join),
            bottoms[0],
            tops[0],
        )

    @staticmethod
    def from_tables(elements, meet, join):
        """Build from explicit tables; the order is derived and re-verified."""
        elements = tuple(elements)
        n = len(elements)
        up = []
        for i in range(n):
            m = 0
            for j in range(n):
                if meet[i][j] == i:
                    m |= 1 << j
            up.append(m)
        frame = Frame._from_up(elements, up)
        if frame.meet != tuple(tuple(r) for r in meet):
            bad = next(
                (i, j)
                for i in range(n)
                for j in range(n)
                if frame.meet[i][j] != meet[i][j]
            )
            raise NotALattice("meet-table-disagrees-with-order", bad)
        if frame.join != tuple(tuple(r) for r in join):
            bad = next(
                (i, j)
                for i in range(n)
                for j in range(n)
                if frame.join[i][j] != join[i][j]
            )
            raise NotALattice("join-table-disagrees-with-order", bad)
        return frame

    @staticmethod
    def from_masks(labels_for, masks):
        """Lattice of a mask family ordered by inclusion (meet=and, join=or)."""
        fam = sorted(set(masks))
        idx = {m: k for k, m in enumerate(fam)}
        n = len(fam)
        up = [mask_of(j for j in range(n) if fam[i] & ~fam[j] == 0) for i in range(n)]
        frame = Frame._from_up(tuple(labels_for(m) for m in fam), up)
        for i in range(n):
            for j in range(n):
                assert frame.meet[i][j] == idx[fam[i] & fam[j]]
                assert frame.join[i][j] == idx[fam[i] | fam[j]]
        return frame

    @property
    def n(self):
        return len(self.elements)

    def leq(self, i, j):
        return bool(self.up[i] & (1 << j))


def opens_frame(space):
    """The frame of opens of a finite space, elements labelled '{p,q}'."""
    return Frame.from_masks(lambda m: brace_label(space.points, m), space.opens)


@dataclass(frozen=True)
class FrameHom:
    source: Frame
    target: Frame
    mapping: tuple

    @staticmethod
    def build(source, target, mapping):
        mapping = tuple(mapping)
        assert len(mapping) == source.n
        if mapping[source.bottom] != target.bottom:
            raise StoneError("hom-bottom", mapping[source.bottom])
        if mapping[source.top] != target.top:
            raise StoneError("hom-top", mapping[source.top])
        for i in range(source.n):
            for j in range(source.n):
                if mapping[source.meet[i][j]] != target.meet[mapping[i]][mapping[j]]:
                    raise StoneError("hom-meet", (i, j))
                if mapping[source.join[i][j]] != target.join[mapping[i]][mapping[j]]:
                    raise StoneError("hom-join", (i, j))
        return FrameHom(source, target, mapping)

    def __call__(self, e):
        return self.mapping[e]

    def is_bijective(self):
        return sorted(self.mapping) == list(range(self.target.n))


def frame_iso_search(F, G):
    """Brute-force frame isomorphism search; returns a FrameHom or None."""
    if F.n != G.n:
        return None
    fsig = [(bin(F.up[i]).count("1"), sorted(bin(F.up[j]).count("1") for j in bits(F.up[i]))) for i in range(F.n)]
    gsig = [(bin(G.up[i]).count("1"), sorted(bin(G.up[j]).count("1") for j in bits(G.up[i]))) for i in range(G.n)]

    def extend(assignment, used):
        i = len(assignment)
        if i == F.n:
            try:
                hom = FrameHom.build(F, G, tuple(assignment))
            except StoneError:
                return None
            return hom if hom.is_bijective() else None
        for q in range(G.n):
            if q in used or fsig[i] != gsig[q]:
                continue
            ok = all(
                F.leq(j, i) == G.leq(assignment[j], q) and F.leq(i, j) == G.leq(q, assignment[j])
                for j in range(i)
            )
            if not ok:
                continue
            out = extend(assignment + [q], used | {q})
            if out is not None:
                return out
        return None

    return extend([], set())


# ---------------------------------------------------------------- characters


def is_character_filter(frame, mask):
    """Do the elements of mask form the 1-preimage of a frame map to {0,1}?

    Checked directly as the prime-filter laws: upward closed, top in,
    bottom out, closed under meet, join-prime.
    """
    if not mask & (1 << frame.top) or mask & (1 << frame.bottom):
        return False
    for i in bits(mask):
        if frame.up[i] & ~mask:
            return False
        for j in bits(mask):
            if not mask & (1 << frame.meet[i][j]):
                return False
    for i in range(frame.n):
        for j in range(frame.n):
            if mask & (1 << frame.join[i][j]) and not (mask & (1 << i) or mask & (1 << j)):
                return False
    return True


def characters(frame):
    """All frame maps to {0,1}, as filter masks, in a deterministic order.

    A prime filter of a finite distributive lattice is the up-set of a
    join-prime element, so the enumeration walks those.
    """
    out = []
    for p in range(frame.n):
        if p == frame.bottom:
            continue
        prime = True
        for a in range(frame.n):
            for b in range(frame.n):
                if frame.leq(p, frame.join[a][b]) and not (frame.leq(p, a) or frame.leq(p, b)):
                    prime = False
                    break
            if not prime:
                break
        if prime:
            out.append(frame.up[p])
    for m in out:
        assert is_character_filter(frame, m)
    return tuple(sorted(out))


def character_value(frame, filt, e):
    return 1 if filt & (1 << e) else 0


@dataclass(frozen=True)
class Spectrum:
    """The space of characters of a frame, with the frame map e |-> U_e."""

    frame: Frame
    space: FiniteSpace
    filters: tuple
    opens_hom: "FrameHom"  # frame -> opens_frame(space), surjective

    def basic_open(self, e):
        return self.space.opens[self.opens_hom(e)]


def spectrum_space(frame):
    filts = characters(frame)
    gens = []
    for f in filts:
        lows = [i for i in bits(f) if all(not (f & (1 << j)) or frame.leq(i, j) for j in bits(f))]
        assert len(lows) == 1
        gens.append(lows[0])
    points = tuple("chi:" + frame.elements[g] for g in gens)
    u = [mask_of(k for k, f in enumerate(filts) if f & (1 << e)) for e in range(frame.n)]
    space = FiniteSpace.build(points, u)
    oframe = opens_frame(space)
    fam = list(space.opens)
    hom = FrameHom.build(frame, oframe, tuple(fam.index(u[e]) for e in range(frame.n)))
    assert set(hom.mapping) == set(range(oframe.n)), "e |-> U_e must be onto the opens"
    return Spectrum(frame, space, filts, hom)


def precompose(hom, spec_source=None, spec_target=None):
    """The spectrum map of a frame hom: sigma(target) -> sigma(source)."""
    ss = spec_source if spec_source is not None else spectrum_space(hom.source)
    st = spec_target if spec_target is not None else spectrum_space(hom.target)
    mapping = []
    for filt in st.filters:
        pulled = mask_of(e for e in range(hom.source.n) if filt & (1 << hom.mapping[e]))
        mapping.append(ss.filters.index(pulled))
    return ContinuousMap.build(st.space, ss.space, tuple(mapping))


def point_character_map(space):
    """x |-> the character of the opens frame detecting x.

    Returns (map into the spectrum of opens_frame(space), report dict).
    Injectivity is exactly T0; being a homeomorphism is exactly sobriety.
    """
    F = opens_frame(space)
    spec = spectrum_space(F)
    fam = list(space.opens)
    mapping = []
    for x in range(space.n):
        filt = mask_of(k for k, o in enumerate(fam) if o & (1 << x))
        mapping.append(spec.filters.index(filt))
    m = ContinuousMap.build(space, spec.space, tuple(mapping))
    inj = len(set(mapping)) == space.n
    report = {
        "injective": inj,
        "homeomorphism": m.is_homeomorphism(),
        "t0": space.is_t0(),
    }
    return m, report


def sober_check(space):
    """Does every irreducible closed set have a unique generic point?

    Returns (verdict, witness) where witness names an offending closed set
    (as a mask) or None.
    """
    closed = [c for c in space.closed_sets() if c]
    cset = set(closed)
    for c in closed:
        proper = [d for d in closed if d != c and d & ~c == 0]
        reducible = any(a | b == c for a in proper for b in proper)
        if reducible:
            continue
        generic = [x for x in bits(c) if space.closure(1 << x) == c]
        if len(generic) != 1:
            return False, c
    return True, None


def stone_triangle_check(frame, space):
    """Both triangle identities, each at one object.

    * at the frame: precompose(e |-> U_e) after the point-character map of
      the spectrum is the identity on the spectrum;
    * at the space: pulling each basic open of the opens-frame spectrum
      back along the point-character map returns the open you started with.
    """
    spec = spectrum_space(frame)
    kap, _ = point_character_map(spec.space)
    oframe_spec = spectrum_space(opens_frame(spec.space))
    eta_star = precompose(spec.opens_hom, spec_source=spec, spec_target=oframe_spec)
    frame_side = eta_star.after(kap).is_identity()

    kap2, _ = point_character_map(space)
    F = opens_frame(space)
    spec2 = spectrum_space(F)
    fam = list(space.opens)
    space_side = all(
        kap2.preimage_mask(spec2.basic_open(e)) == fam[e] for e in range(F.n)
    )
    return {"at-frame": frame_side, "at-space": space_side}
