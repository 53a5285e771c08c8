"""Finite inverse semigroups and pseudogroups.

An inverse semigroup comes as a full multiplication table; the partial
inverse of each element is derived (it is unique once idempotents
commute).  A pseudogroup is an inverse semigroup in which every pair of
elements has a meet and every pairwise-compatible subset has a join,
with multiplication distributing over those joins.  At finite scale the
join-completeness check is an honest sweep over all compatible subsets;
a size-bounded sweep is reported as "bounded-verified", never
"verified".
"""

from __future__ import annotations

from dataclasses import dataclass

from .stone import Frame, bits, mask_of


class AlgebraError(Exception):
    def __init__(self, law, witness=None):
        self.law = law
        self.witness = witness
        super().__init__(f"{law}: witness {witness!r}" if witness is not None else law)


class NotAssociative(AlgebraError):
    pass


class NoPartialInverse(AlgebraError):
    pass


class NonCommutingIdempotents(AlgebraError):
    pass


class NoMeet(AlgebraError):
    pass


class NoCompatibleJoin(AlgebraError):
    pass


class NotCompatible(AlgebraError):
    pass


class HomError(AlgebraError):
    pass


@dataclass(frozen=True)
class InverseSemigroup:
    elements: tuple
    table: tuple
    star: tuple
    idem: int  # mask of idempotents
    above: tuple  # above[u] = mask of {t : u <= t} in the natural order
    below: tuple

    @staticmethod
    def build(elements, table):
        elements = tuple(elements)
        n = len(elements)
        table = tuple(tuple(int(x) for x in row) for row in table)
        for a in range(n):
            for b in range(n):
                ab = table[a][b]
                for c in range(n):
                    if table[ab][c] != table[a][table[b][c]]:
                        raise NotAssociative("associativity", (a, b, c))
        idem = mask_of(i for i in range(n) if table[i][i] == i)
        for e in bits(idem):
            for f in bits(idem):
                if table[e][f] != table[f][e]:
                    raise NonCommutingIdempotents("idempotents-commute", (e, f))
        star = []
        for t in range(n):
            partial = [
                u for u in range(n) if table[table[t][u]][t] == t and table[table[u][t]][u] == u
            ]
            if not partial:
                raise NoPartialInverse("regularity", t)
            # commuting idempotents force uniqueness
            assert len(partial) == 1, (t, partial)
            star.append(partial[0])
        above = []
        below = [0] * n
        for u in range(n):
            m = 0
            for t in range(n):
                # u <= t iff u = t u* u
                if table[table[t][star[u]]][u] == u:
                    m |= 1 << t
                    below[t] |= 1 << u
            above.append(m)
        return InverseSemigroup(elements, table, tuple(star), idem, tuple(above), tuple(below))

    @property
    def n(self):
        return len(self.elements)

    def mult(self, i, j):
        return self.table[i][j]

    def word(self, *idxs):
        out = idxs[0]
        for i in idxs[1:]:
            out = self.table[out][i]
        return out

    def is_idempotent(self, i):
        return bool(self.idem & (1 << i))

    def idempotents(self):
        return tuple(bits(self.idem))

    def leq(self, u, t):
        """Natural order: u <= t iff u = t u* u."""
        return bool(self.above[u] & (1 << t))

    def compatible(self, t, u):
        return self.is_idempotent(self.table[t][self.star[u]]) and self.is_idempotent(
            self.table[self.star[t]][u]
        )

    def meet_scan(self, t, u):
        """Greatest lower bound for the natural order, or None."""
        lower = self.below[t] & self.below[u]
        for w in bits(lower):
            if lower & ~self.below[w] == 0:
                return w
        return None

    def join_scan(self, family):
        """Least upper bound of a family, or None."""
        ubs = (1 << self.n) - 1
        for t in family:
            ubs &= self.above[t]
        for w in bits(ubs):
            if ubs & ~self.above[w] == 0:
                return w
        return None


def symmetric_inverse_monoid(n):
    """All partial bijections of {0..n-1} under right-to-left composition."""
    maps = []

    def grow(prefix, used):
        i = len(prefix)
        if i == n:
            maps.append(tuple(prefix))
            return
        grow(prefix + [None], used)
        for v in range(n):
            if v not in used:
                grow(prefix + [v], used | {v})

    grow([], set())
    maps.sort(key=lambda m: (sum(v is not None for v in m), tuple(-1 if v is None else v for v in m)))

    def compose(f, g):  # f after g
        out = []
        for x in range(n):
            y = g[x]
            out.append(f[y] if y is not None else None)
        return tuple(out)

    idx = {m: k for k, m in enumerate(maps)}
    table = [[idx[compose(f, g)] for g in maps] for f in maps]

    def label(m):
        ps = [f"{x}>{m[x]}" for x in range(n) if m[x] is not None]
        return "[" + ",".join(ps) + "]"

    return InverseSemigroup.build(tuple(label(m) for m in maps), table)


def adjoin_zero(elements, group_table):
    """The pseudogroup-ready inverse semigroup of a group with a zero glued on."""
    n = len(elements)
    table = [[group_table[i][j] for j in range(n)] + [n] for i in range(n)]
    table.append([n] * (n + 1))
    return InverseSemigroup.build(tuple(elements) + ("0",), table)


def frame_pseudogroup_isg(frame):
    """A frame as an idempotent inverse semigroup: multiplication is meet."""
    return InverseSemigroup.build(frame.elements, frame.meet)


# ---------------------------------------------------------------- pseudogroups


def compatible_cliques(isg, max_size=None):
    """All pairwise-compatible subsets (as index tuples), including ()."""
    n = isg.n
    compat = [mask_of(j for j in range(n) if isg.compatible(i, j)) for i in range(n)]
    out = [()]

    def rec(chosen, allowed):
        for j in bits(allowed):
            nxt = chosen + (j,)
            out.append(nxt)
            if max_size is None or len(nxt) < max_size:
                rec(nxt, allowed & compat[j] & ~((1 << (j + 1)) - 1))

    rec((), (1 << n) - 1)
    return out


@dataclass(frozen=True)
class Pseudogroup:
    isg: InverseSemigroup
    meet: tuple
    zero: int
    one: int
    verification: str
    payload: tuple = None

    @property
    def elements(self):
        return self.isg.elements

    @property
    def n(self):
        return self.isg.n

    def mult(self, i, j):
        return self.isg.table[i][j]

    def star(self, i):
        return self.isg.star[i]

    def leq(self, u, t):
        return self.isg.leq(u, t)

    def compatible(self, t, u):
        return self.isg.compatible(t, u)

    def is_idempotent(self, i):
        return self.isg.is_idempotent(i)

    def idempotents(self):
        return self.isg.idempotents()

    def join(self, family):
        family = tuple(family)
        for a in family:
            for b in family:
                if not self.compatible(a, b):
                    raise NotCompatible("join-of-incompatible", (a, b))
        j = self.isg.join_scan(family)
        if j is None:
            raise NoCompatibleJoin("no-join", family)
        return j


def validate_pseudogroup(isg, max_family=None, payload=None):
    """Check meets, compatible joins and distributivity; package the result.

    ``max_family`` bounds the size of the compatible subsets swept; when
    set, the result is only "bounded-verified".
    """
    n = isg.n
    meet = [[0] * n for _ in range(n)]
    for t in range(n):
        for u in range(n):
            m = isg.meet_scan(t, u)
            if m is None:
                raise NoMeet("binary-meet", (t, u))
            meet[t][u] = m
    cliques = compatible_cliques(isg, max_size=max_family)
    joins = {}
    for fam in cliques:
        j = isg.join_scan(fam)
        if j is None:
            raise NoCompatibleJoin("compatible-join", fam)
        joins[fam] = j
    zero = joins[()]
    one = isg.join_scan(isg.idempotents())
    if one is None:
        raise NoCompatibleJoin("join-of-idempotents", isg.idempotents())
    for fam, j in joins.items():
        for u in range(n):
            left = tuple(isg.table[u][t] for t in fam)
            right = tuple(isg.table[t][u] for t in fam)
            jl = isg.join_scan(left)
            jr = isg.join_scan(right)
            if jl != isg.table[u][j]:
                raise NoCompatibleJoin("left-distributivity", (u, fam))
            if jr != isg.table[j][u]:
                raise NoCompatibleJoin("right-distributivity", (u, fam))
    for t in range(n):
        # distributivity over the idempotent family already forces these
        assert isg.table[one][t] == t and isg.table[t][one] == t
        assert isg.table[zero][t] == zero and isg.table[t][zero] == zero
    verification = "verified" if max_family is None else "bounded-verified"
    return Pseudogroup(
        isg,
        tuple(tuple(r) for r in meet),
        zero,
        one,
        verification,
        tuple(payload) if payload is not None else None,
    )


def frame_pseudogroup(frame):
    ps = validate_pseudogroup(frame_pseudogroup_isg(frame), payload=range(frame.n))
    assert ps.meet == frame.meet
    return ps


def idempotent_frame(ps):
    """The idempotents of a pseudogroup as a frame; returns (frame, indices)."""
    es = ps.idempotents()
    pos = {e: k for k, e in enumerate(es)}
    pairs = [(pos[e], pos[f]) for e in es for f in es if ps.leq(e, f)]
    frame = Frame.from_leq(tuple(ps.elements[e] for e in es), pairs)
    for e in es:
        for f in es:
            assert frame.meet[pos[e]][pos[f]] == pos[ps.mult(e, f)]
            assert frame.join[pos[e]][pos[f]] == pos[ps.join((e, f))]
    return frame, es


def invertible_group(ps):
    """The group of global elements t with t t* = t* t = 1; (isg, indices)."""
    keep = [
        t
        for t in range(ps.n)
        if ps.mult(t, ps.star(t)) == ps.one and ps.mult(ps.star(t), t) == ps.one
    ]
    pos = {t: k for k, t in enumerate(keep)}
    for t in keep:
        for u in keep:
            assert ps.mult(t, u) in pos, "invertibles are closed under product"
    table = [[pos[ps.mult(t, u)] for u in keep] for t in keep]
    return InverseSemigroup.build(tuple(ps.elements[t] for t in keep), table), tuple(keep)


# ---------------------------------------------------------------- homs


@dataclass(frozen=True)
class PseudogroupHom:
    source: Pseudogroup
    target: Pseudogroup
    mapping: tuple

    @staticmethod
    def build(source, target, mapping, max_family=None):
        mapping = tuple(mapping)
        assert len(mapping) == source.n
        for t in range(source.n):
            for u in range(source.n):
                if mapping[source.mult(t, u)] != target.mult(mapping[t], mapping[u]):
                    raise HomError("not-multiplicative", (t, u))
        for fam in compatible_cliques(source.isg, max_size=max_family):
            image = tuple(mapping[t] for t in fam)
            for a in image:
                for b in image:
                    if not target.compatible(a, b):
                        raise HomError("image-family-incompatible", fam)
            if target.isg.join_scan(image) != mapping[source.isg.join_scan(fam)]:
                raise HomError("join-not-preserved", fam)
        return PseudogroupHom(source, target, mapping)

    def __call__(self, t):
        return self.mapping[t]

    def after(self, other):
        assert other.target == self.source
        return PseudogroupHom(
            other.source, self.target, tuple(self.mapping[t] for t in other.mapping)
        )

    def is_bijective(self):
        return sorted(self.mapping) == list(range(self.target.n))


def identity_hom(ps):
    return PseudogroupHom.build(ps, ps, range(ps.n))


def hom_autopreservation(hom):
    """The for-free laws of a pseudogroup hom: star, order, zero, unit."""
    s, t, m = hom.source, hom.target, hom.mapping
    return {
        "star": all(m[s.star(x)] == t.star(m[x]) for x in range(s.n)),
        "order": all(
            (not s.leq(u, v)) or t.leq(m[u], m[v]) for u in range(s.n) for v in range(s.n)
        ),
        "zero": m[s.zero] == t.zero,
        "unit-to-idempotent": t.is_idempotent(m[s.one]),
    }


def compatible_meet_identity(hom):
    """For compatible t,u: t ^ u = t u* u, and homs preserve that meet."""
    s, t, m = hom.source, hom.target, hom.mapping
    for a in range(s.n):
        for b in range(s.n):
            if not s.compatible(a, b):
                continue
            if s.meet[a][b] != s.isg.word(a, s.star(b), b):
                return False, ("meet-formula", (a, b))
            if m[s.meet[a][b]] != t.meet[m[a]][m[b]]:
                return False, ("meet-not-preserved", (a, b))
    return True, None


def invert_bijective_hom(hom):
    """A bijective pseudogroup hom is an isomorphism; build the inverse hom."""
    assert hom.is_bijective()
    inv = [0] * hom.target.n
    for i, v in enumerate(hom.mapping):
        inv[v] = i
    return PseudogroupHom.build(hom.target, hom.source, inv)


def generating_sequence(isg):
    """A small generating list, greedily from the top of the natural order.

    Processing high elements first keeps the list short for semilattices
    (meets only ever move down).
    """
    order = sorted(range(isg.n), key=lambda t: (bin(isg.above[t]).count("1"), t))
    closure = set()
    gens = []

    def close():
        changed = True
        while changed:
            changed = False
            for a in list(closure):
                q = isg.star[a]
                if q not in closure:
                    closure.add(q)
                    changed = True
                for b in list(closure):
                    for p in (isg.table[a][b], isg.table[b][a]):
                        if p not in closure:
                            closure.add(p)
                            changed = True

    for t in order:
        if t not in closure:
            gens.append(t)
            closure.add(t)
            close()
    return gens


def pseudogroup_homs(source, target, max_family=None):
    """All pseudogroup homs source -> target, by generator-image search.

    Images are propagated through star and products after every choice,
    so clashing branches die early; join preservation is checked once a
    full mapping exists.
    """
    gens = generating_sequence(source.isg)
    n, out = source.n, []

    def propagate(val, g, v):
        val = dict(val)
        queue = [(g, v)]
        while queue:
            a, va = queue.pop()
            if a in val:
                if val[a] != va:
                    return None
                continue
            val[a] = va
            queue.append((source.star(a), target.star(va)))
            for b, vb in list(val.items()):
                queue.append((source.mult(a, b), target.mult(va, vb)))
                queue.append((source.mult(b, a), target.mult(vb, va)))
        return val

    def rec(i, val):
        if i == len(gens):
            if len(val) == n:
                try:
                    out.append(
                        PseudogroupHom.build(
                            source, target, tuple(val[t] for t in range(n)), max_family=max_family
                        )
                    )
                except HomError:
                    pass
            return
        g = gens[i]
        if g in val:
            rec(i + 1, val)
            return
        for v in range(target.n):
            nv = propagate(val, g, v)
            if nv is not None:
                rec(i + 1, nv)

    # every hom preserves the empty join
    rec(0, {source.zero: target.zero})
    seen = set()
    uniq = []
    for h in out:
        if h.mapping not in seen:
            seen.add(h.mapping)
            uniq.append(h)
    return uniq


def pseudogroup_iso_search(S, T):
    if S.n != T.n:
        return None
    for h in pseudogroup_homs(S, T):
        if h.is_bijective():
            invert_bijective_hom(h)  # validates
            return h
    return None
